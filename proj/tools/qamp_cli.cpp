#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qamp/experiment.hpp"

namespace {

int cmd_run(const std::string &config_path) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read config '" << config_path << "'\n";
        return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const qamp::RunConfig cfg = qamp::run_config_from_json(ss.str());
    const qamp::RunOutcome outcome = qamp::run_experiment(cfg);
    std::cout << "wrote " << outcome.schedule_path.string() << "\n";
    std::cout << "wrote " << outcome.resources_path.string() << "\n";
    std::cout << "wrote " << outcome.acceptance_path.string() << "\n";
    std::cout << outcome.message << "\n";
    return outcome.exit_code;
}

int cmd_verify(const qamp::VerifyOptions &opt, const std::string &out_path) {
    const qamp::VerifyOutcome outcome = qamp::run_verify(opt);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        out << outcome.report;
    }
    std::cout << outcome.report;
    return outcome.exit_code;
}

int cmd_schedule(const qamp::PipelineConfig &cfg, const std::string &out_path) {
    const std::string text = qamp::schedule_to_json(qamp::parameter_schedule(cfg));
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        out << text;
    } else {
        std::cout << text;
    }
    return 0;
}

int cmd_gen(std::uint64_t seed, int private_width, int witness_width,
            const std::string &plant, double c, double s, const std::string &out_path) {
    qamp::VerifierInstance inst =
        plant == "yes"  ? qamp::planted_yes_instance(c, witness_width, seed)
        : plant == "no" ? qamp::planted_no_instance(s, witness_width, seed)
                        : qamp::random_verifier(private_width, witness_width, seed);
    const std::string text = qamp::instance_to_json(inst);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        out << text;
    } else {
        std::cout << text;
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qamp: witness-preserving amplification simulator"};
    app.require_subcommand(1);

    // run
    auto *run = app.add_subcommand("run", "execute a construction over instances");
    std::string run_config;
    run->add_option("--config", run_config, "JSON run configuration")->required();

    // verify
    auto *verify = app.add_subcommand("verify", "run a named numerical check");
    qamp::VerifyOptions vopt;
    std::string verify_out;
    verify->add_option("name", vopt.name, "check name (prop1..prop9, lemma1..lemma7, "
                                          "thm1-pe, thm1-hybrid, thm1-guess)")
        ->required();
    verify->add_option("--trials", vopt.trials, "random trials");
    verify->add_option("--seed", vopt.seed, "base seed");
    verify->add_option("--tol", vopt.tol, "pass tolerance on the worst residual");
    verify->add_option("--p", vopt.p, "target exponent for lemma/theorem checks");
    verify->add_option("--c", vopt.c, "promise completeness");
    verify->add_option("--s", vopt.s, "promise soundness");
    verify->add_option("--max-qubits", vopt.max_qubits, "statevector budget");
    verify->add_option("--out", verify_out, "also write the report to a file");

    // schedule
    auto *sched = app.add_subcommand("schedule", "print a parameter schedule");
    qamp::PipelineConfig scfg;
    std::string sched_out;
    sched->add_option("--construction", scfg.construction,
                      "simple-pe | hybrid | random-guess")
        ->required();
    sched->add_option("--p", scfg.p, "target exponent");
    sched->add_option("--c", scfg.c, "promise completeness");
    sched->add_option("--s", scfg.s, "promise soundness");
    sched->add_option("--cutoff", scfg.stage_cutoff, "stage cutoff (default full)");
    sched->add_option("--out", sched_out, "write to a file instead of stdout");

    // gen
    auto *gen = app.add_subcommand("gen", "emit a seeded instance JSON file");
    std::uint64_t gen_seed = 0;
    int gen_private = 1, gen_witness = 1;
    std::string gen_plant = "none", gen_out;
    double gen_c = 0.99, gen_s = 0.01;
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("--private", gen_private, "private qubits (haar instances)");
    gen->add_option("--witness", gen_witness, "witness qubits");
    gen->add_option("--plant", gen_plant, "none | yes | no (promise side)");
    gen->add_option("--c", gen_c, "completeness used when planting yes");
    gen->add_option("--s", gen_s, "soundness used when planting no");
    gen->add_option("--out", gen_out, "output path (stdout otherwise)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_config);
        if (verify->parsed()) return cmd_verify(vopt, verify_out);
        if (sched->parsed()) return cmd_schedule(scfg, sched_out);
        if (gen->parsed())
            return cmd_gen(gen_seed, gen_private, gen_witness, gen_plant, gen_c, gen_s,
                           gen_out);
    } catch (const qamp::ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qamp::CapacityError &e) {
        std::cerr << "capacity: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
