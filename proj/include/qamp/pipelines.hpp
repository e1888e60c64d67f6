#pragma once

#include "qamp/oracle.hpp"
#include "qamp/procedures.hpp"
#include "qamp/schedule.hpp"

namespace qamp {

// End-to-end constructions. Each follows its ParameterSchedule stage by stage,
// so predicted and reported resources agree by construction.

// Phase estimation, then and-repetition, then or-repetition.
VerifierInstance simple_pe_pipeline(const VerifierInstance &v,
                                    const PipelineConfig &cfg);

// Phase estimation at constant failure budget, agreement amplification, then
// the repetition stages.
VerifierInstance hybrid_pipeline(const VerifierInstance &v,
                                 const PipelineConfig &cfg);

struct RandomGuessResult {
    ParameterSchedule schedule;
    int guess_bits = 0;            // l
    std::uint64_t guess_count = 0; // 2^l
    std::uint64_t min_guess = 0;   // guesses below this reject outright
    // Per-guess instance for k in 1..2^l at index k-1. Includes the
    // and-repetition stage when the cutoff reaches it.
    std::vector<VerifierInstance> per_guess;
    // Fresh-register realisation of the uniform guess: a guess register plus a
    // mirror copy, every guess-dependent operation conditioned on it. Present
    // up to the random-guess stage.
    VerifierInstance coherent;
    // Or-repetition on top of the coherent instance (cutoff "full" only).
    // May exceed the statevector budget; spectral evaluation stays exact.
    VerifierInstance final_or;
    bool has_final_or = false;
};

// When `fixed_k` is set only that guess is constructed (per-guess slot checks
// still validate the range).
RandomGuessResult random_guess_pipeline(const VerifierInstance &v,
                                        const PipelineConfig &cfg,
                                        std::optional<std::uint64_t> fixed_k = {});

// The uniform-guess instance by itself: guess register plus mirror copy,
// adjustment/reflection/and-repetition conditioned on the guess value.
// Restricted to lifted witness states its operator is the mean of the
// per-guess operators.
VerifierInstance build_coherent_guess(const VerifierInstance &v, int guess_bits,
                                      std::uint64_t min_guess, long long n_and);

// Exact per-eigenvalue acceptance of the full construction: the composed
// operator restricted to lifted witness states is diagonal in the lifted
// eigenbasis of the input operator, so the chain of per-stage maps evaluates
// it exactly.
double chained_acceptance(const ParameterSchedule &schedule, double lam);

struct EvaluationOptions {
    int max_sim_qubits = 22;   // largest statevector the evaluation may allocate
    bool force_spectral = false;
    std::uint64_t spectrum_dim_cap = std::uint64_t{1} << 10;
};

struct PipelineEvaluation {
    ParameterSchedule schedule;
    std::vector<double> base_eigenvalues;    // descending
    std::vector<double> lifted_acceptance;   // final acceptance per eigenpair
    double max_acceptance = 0.0;             // over all witnesses
    std::string method;                      // statevector | mixture | spectral
    int simulated_qubits = 0;                // widest statevector allocated
    long long measured_calls_v = -1;         // from one tallied run, when direct
    long long measured_calls_v_dagger = -1;
};

// Runs the construction on a bare instance and measures the final acceptance
// per lifted eigenstate. Chooses direct statevector simulation when the
// composed instance fits the budget, the per-guess mixture route for the
// random-guess construction, and the exact spectral chain otherwise.
PipelineEvaluation evaluate_pipeline(const VerifierInstance &base,
                                     const PipelineConfig &cfg,
                                     const EvaluationOptions &opt = {});

// Uniform mixture acceptance over the per-guess instances for one witness.
double mixture_acceptance(const RandomGuessResult &rg,
                          std::span<const cplx> witness_amps);

} // namespace qamp
