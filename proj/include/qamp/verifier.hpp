#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qamp/applier.hpp"

namespace qamp {

// Extra-workspace and call accounting relative to the bare verifier. Calls
// are counted in applications of the original base unitary (and its inverse)
// per single application of the composed unitary; a bare instance reports
// zeros. Per-stage rows additionally record how many times the stage invokes
// its immediate input instance in each direction.
struct StageResources {
    std::string stage;
    int delta_qubits = 0;
    long long inner_calls_v = 0; // applications of the stage's input unitary
    long long inner_calls_v_dagger = 0;
    long long calls_v = 0; // cumulative, in base-unitary applications
    long long calls_v_dagger = 0;
    std::map<std::string, long long> extras;
};

struct ResourceReport {
    int extra_qubits = 0;
    long long calls_v = 0;
    long long calls_v_dagger = 0;
    std::vector<StageResources> stages;

    // Base-unitary cost of applying the instance once: (1, 0) for a bare
    // instance, the reported totals otherwise.
    std::pair<long long, long long> application_cost() const {
        if (stages.empty()) return {1, 0};
        return {calls_v, calls_v_dagger};
    }
};

struct BaseUnitary {
    Matrix u;
    int private_width = 0;
    int witness_width = 0;
    int output_qubit = 0;
};

// The verifier abstraction: a unitary applier over a named layout together
// with the projection onto legal initial states (delta) and onto accepting
// states (pi). Instances are immutable; combinators build new ones.
struct VerifierInstance {
    RegisterLayout layout;
    ApplierPtr applier;
    ProjectionSpec delta;
    ProjectionSpec pi;
    std::string witness_register = "M";
    ResourceReport resources;
    std::shared_ptr<const BaseUnitary> base; // present on instances built from a matrix

    int witness_width() const {
        return witness_register.empty() ? 0 : layout.width_of(witness_register);
    }
    std::uint64_t witness_dim() const {
        return std::uint64_t{1} << witness_width();
    }
    int total_qubits() const { return layout.total_qubits(); }
};

struct SpectrumReport {
    std::vector<double> eigenvalues; // descending, clamped to [0, 1]
    std::vector<StateVector> eigenstates;
    double max_acceptance = 0.0;
};

// Builds a bare instance over registers V (private, low qubits) and M
// (witness). delta fixes all private qubits to |0>; pi accepts output qubit 1.
VerifierInstance build_verifier(const Matrix &u, int private_width, int witness_width,
                                int output_qubit,
                                const Tolerances &tol = default_tolerances());

// Haar-random bare instance.
VerifierInstance random_verifier(int private_width, int witness_width,
                                 std::uint64_t seed);

// Bare instance (one private qubit) whose restricted operator has exactly the
// given eigenvalues, with Haar-random eigenvectors on the witness register.
// The eigenvalue count must be a power of two.
VerifierInstance planted_verifier(const std::vector<double> &eigenvalues,
                                  std::uint64_t seed);

// M = delta U' pi U delta restricted to the delta subspace, as a dense matrix
// over the accepted basis indices (returned alongside). Dimension capped.
std::pair<Matrix, std::vector<std::uint64_t>>
restricted_m_operator(const VerifierInstance &v,
                      std::uint64_t dim_cap = std::uint64_t{1} << 10);

SpectrumReport m_spectrum(const VerifierInstance &v,
                          const Tolerances &tol = default_tolerances(),
                          std::uint64_t dim_cap = std::uint64_t{1} << 10);

// |0...0> on everything except the witness register.
StateVector assemble_initial_state(const VerifierInstance &v,
                                   std::span<const cplx> witness_amps,
                                   const Tolerances &tol = default_tolerances());

// Probability that the instance accepts the given pure witness.
double acceptance_probability(const VerifierInstance &v,
                              std::span<const cplx> witness_amps,
                              CallTally *tally = nullptr,
                              const Tolerances &tol = default_tolerances());
double acceptance_probability(const VerifierInstance &v, const StateVector &witness,
                              CallTally *tally = nullptr,
                              const Tolerances &tol = default_tolerances());

// Acceptance for an explicit full-layout input state (used for lifted
// eigenstates of composed instances).
double acceptance_of_state(const VerifierInstance &v, const StateVector &input,
                           CallTally *tally = nullptr);

// Witness amplitudes of a delta-subspace state of a bare instance (all
// non-witness registers |0>).
std::vector<cplx> extract_witness(const VerifierInstance &v, const StateVector &state,
                                  double support_tol = 1e-9);

// Lift a state over a prefix layout into a larger layout with appended
// registers in |0>.
StateVector lift_state(const StateVector &state, const RegisterLayout &target);

// Bare-instance JSON serialisation; round-trips bit exactly.
std::string instance_to_json(const VerifierInstance &v);
VerifierInstance instance_from_json(const std::string &text,
                                    const Tolerances &tol = default_tolerances());

} // namespace qamp
