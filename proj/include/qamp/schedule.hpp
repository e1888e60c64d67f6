#pragma once

#include <map>
#include <string>
#include <vector>

#include "qamp/errors.hpp"

namespace qamp {

struct PipelineConfig {
    std::string construction; // "simple-pe" | "hybrid" | "random-guess"
    long long p = 2;          // target error exponent: final error <= 2^-p
    double c = 0.99;          // promised completeness of the input instance
    double s = 0.01;          // promised soundness bound of the input instance
    std::string stage_cutoff = "full";
    std::uint64_t seed = 0;

    void validate() const;
};

// One stage of a construction with every derived quantity recorded: integer
// parameters exactly, transcendental-derived reals in double precision.
struct ScheduleStage {
    std::string name;
    std::string procedure; // phase-estimation | and-repetition | or-repetition |
                           // mw-amplification | guess-adjust-reflect | coherent-guess
    std::map<std::string, long long> ints;
    std::map<std::string, double> reals;
    double target_completeness = 1.0;
    double target_soundness = 0.0;
    std::string law; // acceptance law on lifted eigenstates, human readable
    int delta_qubits = 0;
    long long inner_calls_v = 0;
    long long inner_calls_v_dagger = 0;
    long long calls_v = 0; // cumulative base-unitary calls after this stage
    long long calls_v_dagger = 0;
};

struct ParameterSchedule {
    std::string construction;
    long long p = 0;
    double c = 0.0;
    double s = 0.0;
    std::string stage_cutoff;
    std::vector<ScheduleStage> stages;
    int total_extra_qubits = 0;
    long long total_calls_v = 0;
    long long total_calls_v_dagger = 0;
    double final_completeness = 1.0;
    double final_soundness = 0.0;
};

// Derives every stage parameter of the chosen construction, in exact integer
// arithmetic for ceilings over rationals and double precision where arccos
// enters. Throws ValidationError for c <= s and for degenerate log
// denominators (hybrid needs p >= 2).
ParameterSchedule parameter_schedule(const PipelineConfig &cfg);

// Deterministic JSON rendering; reals carry 17 significant digits.
std::string schedule_to_json(const ParameterSchedule &schedule);

// Phase-estimation stage parameters shared by the constructions.
struct PhaseWindowParams {
    int l = 0;                // precision bits
    std::uint64_t t_num = 0;  // window threshold numerator over 2^l
    double t = 0.0;
    double eps = 0.0;
    int m = 0;                // phase register width
};
PhaseWindowParams phase_window_params(double c, double s, double eps);

std::string format_real(double x); // %.17g

} // namespace qamp
