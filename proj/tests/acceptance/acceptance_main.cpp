// Acceptance suite: exercises every advertised guarantee at desk scale and
// prints one line per criterion. Exit code 0 only if all criteria hold.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "qamp/experiment.hpp"
#include "qamp/oracle.hpp"

using namespace qamp;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass = true;
    double worst = 0.0;
    double seconds = 0.0;
    std::string note;
};

struct Harness {
    std::vector<Criterion> results;

    template <typename Fn> void run(int id, const std::string &name, Fn &&fn) {
        Criterion c{id, name};
        const auto start = std::chrono::steady_clock::now();
        try {
            fn(c);
        } catch (const std::exception &e) {
            c.pass = false;
            c.note = std::string("exception: ") + e.what();
        }
        c.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%s] criterion %d: %-34s worst=%.3e time=%.1fs %s\n",
                    c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), c.worst,
                    c.seconds, c.note.c_str());
        std::fflush(stdout);
        results.push_back(std::move(c));
    }
};

void track(Criterion &c, double residual, double tol) {
    c.worst = std::max(c.worst, residual);
    if (residual > tol) c.pass = false;
}

double lifted(const VerifierInstance &combined, const VerifierInstance &bare,
              const SpectrumReport &spec, std::size_t idx) {
    const auto w = extract_witness(bare, spec.eigenstates[idx]);
    return acceptance_probability(combined, std::span<const cplx>(w));
}

Matrix m_dense(const VerifierInstance &v) {
    const Matrix u = dense_unitary_of(v);
    const Matrix d = v.delta.to_projector(v.layout);
    const Matrix p = v.pi.to_projector(v.layout);
    return d * u.adjoint() * p * u * d;
}

Matrix zero_block(int qubits) {
    Matrix p(std::size_t{1} << qubits, std::size_t{1} << qubits);
    p(0, 0) = 1.0;
    return p;
}

StateVector lifted_input(const VerifierInstance &v, const SpectrumReport &spec,
                         std::size_t idx) {
    const auto w = extract_witness(v, spec.eigenstates[idx]);
    return assemble_initial_state(v, std::span<const cplx>(w));
}

void criterion_eigenvalue_laws(Criterion &c) {
    const double tol = 1e-9;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto base = random_verifier(1, 1, 10000 + seed);
        const auto spec = m_spectrum(base);
        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
            const double lam = spec.eigenvalues[i];
            for (long long n : {1, 2, 3}) {
                track(c,
                      std::abs(lifted(and_type_repetition(base, n), base, spec, i) -
                               laws::and_repetition(lam, n)),
                      tol);
                track(c,
                      std::abs(lifted(or_type_repetition(base, n), base, spec, i) -
                               laws::or_repetition(lam, n)),
                      tol);
            }
            for (int l : {1, 2, 3})
                for (std::uint64_t k = 1; k <= (std::uint64_t{1} << l); ++k)
                    track(c,
                          std::abs(lifted(additive_adjustment(base, l, k), base,
                                          spec, i) -
                                   laws::additive_adjustment(lam, l, k)),
                          tol);
            track(c,
                  std::abs(lifted(reflection(base), base, spec, i) -
                           laws::reflection(lam)),
                  tol);
        }
    }
}

void criterion_operator_identities(Criterion &c) {
    const double tol = 1e-9;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        for (const auto &[pw, ww] : std::vector<std::pair<int, int>>{
                 {1, 1}, {2, 1}, {1, 2}}) {
            const auto base = random_verifier(pw, ww, 11000 + seed);
            for (long long n : {1, 2}) {
                const auto and_rep = and_type_repetition(base, n);
                const int l = and_rep.layout.width_of("ctr");
                track(c,
                      (m_dense(and_rep) -
                       tensor_product(zero_block(l), m_dense(base).power(
                                                         2 * static_cast<unsigned>(n))))
                          .frobenius_norm(),
                      tol);

                const auto or_rep = or_type_repetition(base, n);
                const Matrix delta = base.delta.to_projector(base.layout);
                const Matrix diff = delta - m_dense(base);
                track(
                    c,
                    (m_dense(or_rep) -
                     tensor_product(zero_block(l),
                                    delta - diff.power(2 * static_cast<unsigned>(n))))
                        .frobenius_norm(),
                    tol);
            }
        }
    }
}

void criterion_phase_estimation(Criterion &c) {
    for (const auto &[cc, ss] : std::vector<std::pair<double, double>>{
             {0.9, 0.1}, {0.99, 0.01}}) {
        for (double eps : {0.25, 1.0 / 12.0}) {
            const auto pw = phase_window_params(cc, ss, eps);
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const auto yes = planted_yes_instance(cc, 1, 12000 + seed);
                const auto yspec = m_spectrum(yes);
                const auto pe_yes = one_shot_phase_estimation(yes, pw.t, pw.l, eps);
                track(c, std::max(0.0, (1.0 - eps) - lifted(pe_yes, yes, yspec, 0)),
                      0.0);

                const auto no = planted_no_instance(ss, 1, 13000 + seed);
                const auto nspec = m_spectrum(no);
                const auto pe_no = one_shot_phase_estimation(no, pw.t, pw.l, eps);
                for (std::size_t i = 0; i < nspec.eigenvalues.size(); ++i)
                    track(c, std::max(0.0, lifted(pe_no, no, nspec, i) - eps), 0.0);
            }
        }
    }
}

void criterion_mw_bounds(Criterion &c) {
    const double eps = 0.25;
    for (long long n : {2, 3, 4}) {
        const long long t = n;
        const double lam_hi = 0.5 + eps;
        const double lam_lo = 0.5 - eps;
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const auto hi = planted_verifier({lam_hi, lam_hi}, 14000 + seed);
            const auto hspec = m_spectrum(hi);
            const double acc = oracle::branch_sum_acceptance(
                hi, oracle::MarriottWatrous{n, t}, lifted_input(hi, hspec, 0));
            const double floor = 1.0 - std::exp(-4.0 * eps * eps * n);
            track(c, std::max(0.0, floor - acc), 0.0);
            if (!(acc > floor)) c.pass = false;

            const auto lo = planted_verifier({lam_lo, lam_lo * 0.7}, 15000 + seed);
            const auto lspec = m_spectrum(lo);
            const double ceiling = std::exp(-4.0 * eps * eps * n);
            for (std::size_t i = 0; i < lspec.eigenvalues.size(); ++i) {
                const double a = oracle::branch_sum_acceptance(
                    lo, oracle::MarriottWatrous{n, t}, lifted_input(lo, lspec, i));
                track(c, std::max(0.0, a - ceiling), 0.0);
                if (!(a < ceiling)) c.pass = false;
            }
        }
    }
}

void criterion_theorem_end_to_end(Criterion &c) {
    std::ostringstream note;
    for (const std::string cons : {"simple-pe", "hybrid", "random-guess"}) {
        for (long long p : {2, 4}) {
            PipelineConfig cfg;
            cfg.construction = cons;
            cfg.p = p;
            cfg.c = 0.99;
            cfg.s = 0.01;
            const ParameterSchedule sched = parameter_schedule(cfg);
            const double comp_bound = sched.final_completeness;
            const double snd_bound = sched.final_soundness;
            const auto start = std::chrono::steady_clock::now();
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const auto yes =
                    planted_yes_instance(0.99, 1, 16000 + 100 * p + seed);
                const auto ev = evaluate_pipeline(yes, cfg);
                if (ev.simulated_qubits > 22) c.pass = false;
                track(c, std::max(0.0, comp_bound - ev.max_acceptance), 0.0);

                const auto no = planted_no_instance(0.01, 1, 17000 + 100 * p + seed);
                const auto evn = evaluate_pipeline(no, cfg);
                if (evn.simulated_qubits > 22) c.pass = false;
                track(c, std::max(0.0, evn.max_acceptance - snd_bound), 0.0);
            }
            const double secs = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start)
                                    .count();
            if (secs > 600.0) c.pass = false;
            note << cons << "/p" << p << "=" << static_cast<int>(secs) << "s ";
        }
    }
    c.note = note.str();
}

void criterion_resource_exactness(Criterion &c) {
    auto expect_eq = [&](long long got, long long want) {
        if (got != want) {
            c.pass = false;
            c.worst = std::max(c.worst, 1.0);
        }
    };
    const auto base = random_verifier(1, 1, 18000);

    for (double eps : {0.25, 1.0 / 12.0}) {
        const int l = 3;
        const auto pe = one_shot_phase_estimation(base, 0.25, l, eps);
        const int extra = ceil_log2_double(2.0 + 1.0 / (2.0 * eps));
        expect_eq(pe.resources.extra_qubits, l + extra);
        const long long m = l + extra;
        expect_eq(pe.resources.calls_v + pe.resources.calls_v_dagger,
                  2 * ((1LL << m) - 1));
        const long long textbook =
            (1LL << l) *
                static_cast<long long>(std::ceil(1.0 / (2.0 * eps) + 2.0 - 1e-9)) -
            1;
        expect_eq(pe.resources.stages.back().extras.at("textbook_call_count"),
                  textbook);
        CallTally tally;
        const cplx basis[2] = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
        acceptance_probability(pe, std::span<const cplx>(basis, 2), &tally);
        expect_eq(tally.calls_v, pe.resources.calls_v);
        expect_eq(tally.calls_v_dagger, pe.resources.calls_v_dagger);
    }

    for (long long n : {1, 2, 3}) {
        const long long l = ceil_log2_u64(static_cast<std::uint64_t>(2 * n + 1));
        expect_eq(and_type_repetition(base, n).resources.extra_qubits, l);
        expect_eq(or_type_repetition(base, n).resources.extra_qubits, l);
    }
    for (long long n : {2, 3, 4}) {
        const long long l = ceil_log2_u64(static_cast<std::uint64_t>(2 * n + 1));
        expect_eq(marriott_watrous(base, n, n).resources.extra_qubits,
                  2 * n + l + 1);
    }
}

void criterion_oracle_equivalence(Criterion &c) {
    const double tol = 1e-9;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto v = random_verifier(1, 1, 19000 + seed);
        const auto spec = m_spectrum(v);
        const std::size_t i = seed % spec.eigenvalues.size();
        const auto input = lifted_input(v, spec, i);

        track(c,
              std::abs(oracle::branch_sum_acceptance(v, oracle::AndRepetition{2},
                                                     input) -
                       lifted(and_type_repetition(v, 2), v, spec, i)),
              tol);
        track(c,
              std::abs(oracle::branch_sum_acceptance(v, oracle::OrRepetition{2},
                                                     input) -
                       lifted(or_type_repetition(v, 2), v, spec, i)),
              tol);
        track(c,
              std::abs(oracle::branch_sum_acceptance(v, oracle::MarriottWatrous{2, 2},
                                                     input) -
                       lifted(marriott_watrous(v, 2, 2), v, spec, i)),
              tol);
        track(c,
              std::abs(oracle::branch_sum_acceptance(
                           v, oracle::AdditiveAdjustment{2, 3}, input) -
                       lifted(additive_adjustment(v, 2, 3), v, spec, i)),
              tol);
        track(c,
              std::abs(oracle::branch_sum_acceptance(v, oracle::Reflection{}, input) -
                       lifted(reflection(v), v, spec, i)),
              tol);
    }
}

void criterion_determinism(Criterion &c) {
    auto slurp = [](const std::filesystem::path &p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const auto root = std::filesystem::temp_directory_path();
    for (const std::string tag : {"acc-a", "acc-b"}) {
        std::filesystem::remove_all(root / ("qamp-" + tag));
    }
    RunConfig cfg;
    cfg.pipeline.construction = "simple-pe";
    cfg.pipeline.p = 2;
    cfg.pipeline.c = 0.99;
    cfg.pipeline.s = 0.01;
    cfg.pipeline.seed = 42;
    cfg.instance_count = 4;
    cfg.out_dir = root / "qamp-acc-a";
    const auto a = run_experiment(cfg);
    cfg.out_dir = root / "qamp-acc-b";
    const auto b = run_experiment(cfg);
    if (slurp(a.schedule_path) != slurp(b.schedule_path)) c.pass = false;
    if (slurp(a.resources_path) != slurp(b.resources_path)) c.pass = false;
    if (slurp(a.acceptance_path) != slurp(b.acceptance_path)) c.pass = false;
    if (a.exit_code != 0 || b.exit_code != 0) c.pass = false;
}

} // namespace

int main() {
    Harness h;
    h.run(1, "eigenvalue laws", criterion_eigenvalue_laws);
    h.run(2, "operator identities (dense)", criterion_operator_identities);
    h.run(3, "phase-estimation bounds", criterion_phase_estimation);
    h.run(4, "agreement-amplification bounds", criterion_mw_bounds);
    h.run(5, "end-to-end error reduction", criterion_theorem_end_to_end);
    h.run(6, "resource exactness", criterion_resource_exactness);
    h.run(7, "oracle equivalence", criterion_oracle_equivalence);
    h.run(8, "deterministic reports", criterion_determinism);

    bool all = true;
    for (const auto &c : h.results) all = all && c.pass;
    std::printf("%s: %zu/%zu criteria\n", all ? "ALL PASS" : "FAILURES",
                static_cast<std::size_t>(
                    std::count_if(h.results.begin(), h.results.end(),
                                  [](const Criterion &c) { return c.pass; })),
                h.results.size());
    return all ? 0 : 1;
}
