#pragma once

#include <filesystem>
#include <optional>

#include "qamp/pipelines.hpp"

namespace qamp {

// Planted promise instances: one private qubit, Haar-random eigenframe, and a
// spectrum drawn to sit on the requested side of the promise gap.
VerifierInstance planted_yes_instance(double c, int witness_width,
                                      std::uint64_t seed);
VerifierInstance planted_no_instance(double s, int witness_width, std::uint64_t seed);

struct RunConfig {
    PipelineConfig pipeline;
    int instance_count = 10; // generated rows, alternating yes/no roles
    int witness_width = 1;
    std::vector<std::filesystem::path> instance_files; // used instead when set
    std::filesystem::path out_dir;
    int max_qubits = 22;
};

RunConfig run_config_from_json(const std::string &text);
std::string run_config_to_json(const RunConfig &cfg);

struct RunRow {
    long long index = 0;
    std::string role; // yes | no
    std::uint64_t seed = 0;
    double lambda_max = 0.0;
    double predicted_completeness = 0.0;
    double predicted_soundness = 0.0;
    double measured = 0.0; // max acceptance over witnesses
    double bound = 0.0;
    std::string law; // human-readable statement of the bound checked
    bool met = false;
    std::string method;
};

struct RunOutcome {
    int exit_code = 0; // 0 all bounds met, 1 bound violated, 2 config, 3 capacity
    std::string message;
    std::vector<RunRow> rows;
    std::filesystem::path schedule_path;
    std::filesystem::path resources_path;
    std::filesystem::path acceptance_path;
};

// Executes the configured construction over the instance set and writes
// schedule.json, resources.json and acceptance.csv into out_dir. Byte
// deterministic for a fixed config.
RunOutcome run_experiment(const RunConfig &cfg);

struct VerifyOptions {
    std::string name; // prop1..prop9, lemma1..lemma7, thm1-pe, thm1-hybrid, thm1-guess
    long long trials = 20;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    long long p = 2;
    double c = 0.99;
    double s = 0.01;
    int max_qubits = 22;
};

struct VerifyOutcome {
    int exit_code = 0; // 0 pass, 1 fail, 2 unknown check
    bool pass = false;
    double worst_residual = 0.0;
    std::string report; // per-trial rows plus summary
};

VerifyOutcome run_verify(const VerifyOptions &opt);

const std::vector<std::string> &verify_check_names();

} // namespace qamp
