#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qamp/procedures.hpp"
#include "qamp/schedule.hpp"

using namespace qamp;

namespace {

Matrix m_dense(const VerifierInstance &v) {
    const Matrix u = dense_unitary_of(v);
    const Matrix d = v.delta.to_projector(v.layout);
    const Matrix p = v.pi.to_projector(v.layout);
    return d * u.adjoint() * p * u * d;
}

double lifted_acceptance(const VerifierInstance &combined,
                         const VerifierInstance &bare, const SpectrumReport &spec,
                         std::size_t idx, CallTally *tally = nullptr) {
    const auto w = extract_witness(bare, spec.eigenstates[idx]);
    return acceptance_probability(combined, std::span<const cplx>(w), tally);
}

Matrix zero_block(int qubits) {
    Matrix p(std::size_t{1} << qubits, std::size_t{1} << qubits);
    p(0, 0) = 1.0;
    return p;
}

} // namespace

TEST_CASE("and-repetition fixes eigenvalue one") {
    const auto base = planted_verifier({1.0, 1.0}, 4);
    const auto spec = m_spectrum(base);
    for (long long n : {1, 2, 3}) {
        const auto rep = and_type_repetition(base, n);
        CHECK(lifted_acceptance(rep, base, spec, 0) == doctest::Approx(1.0));
    }
}

TEST_CASE("and-repetition squares twice per round: 3/4 -> 9/16") {
    const auto base = planted_verifier({0.75, 0.25}, 6);
    const auto spec = m_spectrum(base);
    const auto rep = and_type_repetition(base, 1);
    CHECK(std::abs(lifted_acceptance(rep, base, spec, 0) - 0.5625) <= 1e-9);
}

TEST_CASE("and-repetition operator identity in dense form") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto base = random_verifier(1, 1, 700 + seed);
        const auto rep = and_type_repetition(base, 2);
        const int l = rep.layout.width_of("ctr");
        const Matrix lhs = m_dense(rep);
        const Matrix rhs = tensor_product(zero_block(l), m_dense(base).power(4));
        CHECK((lhs - rhs).frobenius_norm() <= 1e-9);
    }
}

TEST_CASE("or-repetition fixes eigenvalue zero and lifts 1/2 to 3/4") {
    const auto dead = planted_verifier({0.0, 0.0}, 8);
    const auto dspec = m_spectrum(dead);
    const auto dead_rep = or_type_repetition(dead, 2);
    CHECK(lifted_acceptance(dead_rep, dead, dspec, 0) == doctest::Approx(0.0));

    const auto base = planted_verifier({0.5, 0.125}, 9);
    const auto spec = m_spectrum(base);
    const auto rep = or_type_repetition(base, 1);
    CHECK(std::abs(lifted_acceptance(rep, base, spec, 0) - 0.75) <= 1e-9);
}

TEST_CASE("or-repetition operator identity in dense form") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto base = random_verifier(1, 1, 800 + seed);
        const auto rep = or_type_repetition(base, 2);
        const int l = rep.layout.width_of("ctr");
        const Matrix m = m_dense(base);
        const Matrix delta = base.delta.to_projector(base.layout);
        const Matrix rhs =
            tensor_product(zero_block(l), delta - (delta - m).power(4));
        CHECK((m_dense(rep) - rhs).frobenius_norm() <= 1e-9);
    }
}

TEST_CASE("eigenvalue laws hold on every eigenpair of random instances") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto base = random_verifier(1, 1, 900 + seed);
        const auto spec = m_spectrum(base);
        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
            const double lam = spec.eigenvalues[i];
            for (long long n : {1, 2}) {
                CHECK(std::abs(lifted_acceptance(and_type_repetition(base, n), base,
                                                 spec, i) -
                               laws::and_repetition(lam, n)) <= 1e-9);
                CHECK(std::abs(lifted_acceptance(or_type_repetition(base, n), base,
                                                 spec, i) -
                               laws::or_repetition(lam, n)) <= 1e-9);
            }
            CHECK(std::abs(lifted_acceptance(reflection(base), base, spec, i) -
                           laws::reflection(lam)) <= 1e-9);
            for (int l = 1; l <= 2; ++l)
                for (std::uint64_t k = 1; k <= (std::uint64_t{1} << l); ++k)
                    CHECK(std::abs(lifted_acceptance(additive_adjustment(base, l, k),
                                                     base, spec, i) -
                                   laws::additive_adjustment(lam, l, k)) <= 1e-9);
        }
    }
}

TEST_CASE("phase estimation accepts eigenvalue one exactly") {
    const auto base = planted_verifier({1.0, 1.0}, 11);
    const auto spec = m_spectrum(base);
    const auto pe = one_shot_phase_estimation(base, 0.25, 2, 0.25);
    CHECK(lifted_acceptance(pe, base, spec, 0) == doctest::Approx(1.0));
}

TEST_CASE("phase estimation rejects the dead instance exactly") {
    // All eigenvalues zero: the walk phase sits at 1/2, squarely outside the
    // window, and the estimate is exact there.
    const auto base = planted_verifier({0.0, 0.0}, 12);
    const auto spec = m_spectrum(base);
    const auto pe = one_shot_phase_estimation(base, 0.25, 2, 0.25);
    for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
        CHECK(lifted_acceptance(pe, base, spec, i) == doctest::Approx(0.0));
}

TEST_CASE("phase estimation meets its failure budget on promise instances") {
    for (const auto &[c, s] : std::vector<std::pair<double, double>>{
             {0.9, 0.1}, {0.99, 0.01}}) {
        const double eps = 0.25;
        const auto pw = phase_window_params(c, s, eps);
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            Rng rng(mix_seed(seed, 3));
            const double lam_yes = c + (1.0 - c) * rng.uniform();
            const auto yes = planted_verifier({lam_yes, lam_yes * 0.3}, seed);
            const auto yspec = m_spectrum(yes);
            const auto pe_yes = one_shot_phase_estimation(yes, pw.t, pw.l, eps);
            CHECK(lifted_acceptance(pe_yes, yes, yspec, 0) >= 1.0 - eps - 1e-9);

            const auto no = planted_verifier({s * rng.uniform(), s * rng.uniform()},
                                             seed + 100);
            const auto nspec = m_spectrum(no);
            const auto pe_no = one_shot_phase_estimation(no, pw.t, pw.l, eps);
            for (std::size_t i = 0; i < nspec.eigenvalues.size(); ++i)
                CHECK(lifted_acceptance(pe_no, no, nspec, i) <= eps + 1e-9);
        }
    }
}

TEST_CASE("phase estimation law depends on the eigenvalue only") {
    const auto pw = phase_window_params(0.9, 0.1, 0.25);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto base = random_verifier(1, 1, 950 + seed);
        const auto spec = m_spectrum(base);
        const auto pe = one_shot_phase_estimation(base, pw.t, pw.l, 0.25);
        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
            const double via_probe =
                laws::phase_estimation(spec.eigenvalues[i], pw.t, pw.l, 0.25);
            CHECK(std::abs(lifted_acceptance(pe, base, spec, i) - via_probe) <= 1e-9);
        }
    }
}

TEST_CASE("phase estimation validates its window") {
    const auto base = random_verifier(1, 1, 1);
    CHECK_THROWS_AS(one_shot_phase_estimation(base, 0.3, 2, 0.25), ValidationError);
    CHECK_THROWS_AS(one_shot_phase_estimation(base, 0.25, 2, 0.0), ValidationError);
    CHECK_THROWS_AS(one_shot_phase_estimation(base, 0.25, 2, 1.0), ValidationError);
    CHECK_THROWS_AS(one_shot_phase_estimation(base, 0.6, 2, 0.25), ValidationError);
}

TEST_CASE("mw amplification endpoints") {
    const auto perfect = planted_verifier({1.0, 1.0}, 21);
    const auto pspec = m_spectrum(perfect);
    for (long long n : {1, 2}) {
        const auto mw = marriott_watrous(perfect, n, n);
        CHECK(lifted_acceptance(mw, perfect, pspec, 0) == doctest::Approx(1.0));
    }
    const auto dead = planted_verifier({0.0, 0.0}, 22);
    const auto dspec = m_spectrum(dead);
    const auto mw = marriott_watrous(dead, 2, 2);
    CHECK(lifted_acceptance(mw, dead, dspec, 0) <= 1e-12);
}

TEST_CASE("mw acceptance is the binomial agreement tail: frozen 3942/4096") {
    const auto base = planted_verifier({0.75, 0.75}, 23);
    const auto spec = m_spectrum(base);
    const auto mw = marriott_watrous(base, 3, 3);
    const double expected = 3942.0 / 4096.0;
    CHECK(std::abs(lifted_acceptance(mw, base, spec, 0) - expected) <= 1e-9);
    CHECK(std::abs(laws::marriott_watrous(0.75, 3, 3) - expected) <= 1e-12);
    // Chernoff-style floor from the agreement statistic.
    CHECK(expected > 1.0 - std::exp(-4.0 * 0.25 * 0.25 * 3.0));
}

TEST_CASE("mw threshold validation") {
    const auto base = random_verifier(1, 1, 2);
    CHECK_THROWS_AS(marriott_watrous(base, 2, 0), ValidationError);
    CHECK_THROWS_AS(marriott_watrous(base, 2, 5), ValidationError);
}

TEST_CASE("additive adjustment frozen points") {
    const auto base = planted_verifier({1.0, 0.5}, 24);
    const auto spec = m_spectrum(base);
    for (int l : {1, 2, 3}) {
        const auto adj = additive_adjustment(base, l, std::uint64_t{1} << l);
        CHECK(std::abs(lifted_acceptance(adj, base, spec, 0) - 0.5) <= 1e-10);
    }
    const auto half = planted_verifier({0.5, 0.25}, 25);
    const auto hspec = m_spectrum(half);
    const auto adj = additive_adjustment(half, 2, 2);
    CHECK(std::abs(lifted_acceptance(adj, half, hspec, 0) - 0.5) <= 1e-10);

    const auto point9 = planted_verifier({0.9, 0.1}, 26);
    const auto pspec = m_spectrum(point9);
    const auto adj9 = additive_adjustment(point9, 3, 8);
    CHECK(std::abs(lifted_acceptance(adj9, point9, pspec, 0) - 0.45) <= 1e-10);
    CHECK_THROWS_AS(additive_adjustment(point9, 2, 5), ValidationError);
    CHECK_THROWS_AS(additive_adjustment(point9, 2, 0), ValidationError);
}

TEST_CASE("reflection endpoints and the frozen 0.99 point") {
    const auto zero = planted_verifier({0.0, 0.0}, 27);
    const auto one = planted_verifier({1.0, 1.0}, 28);
    CHECK(lifted_acceptance(reflection(zero), zero, m_spectrum(zero), 0) <= 1e-12);
    CHECK(lifted_acceptance(reflection(one), one, m_spectrum(one), 0) <= 1e-12);

    const auto half = planted_verifier({0.5, 0.5}, 29);
    CHECK(std::abs(lifted_acceptance(reflection(half), half, m_spectrum(half), 0) -
                   1.0) <= 1e-10);

    const auto p45 = planted_verifier({0.45, 0.45}, 30);
    CHECK(std::abs(lifted_acceptance(reflection(p45), p45, m_spectrum(p45), 0) -
                   0.99) <= 1e-10);
}

TEST_CASE("soundness bounds on the output spectra") {
    const double eps = 0.2;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Rng rng(mix_seed(seed, 77));
        const auto no = planted_verifier({eps * rng.uniform(), eps * rng.uniform()},
                                         1300 + seed);
        for (long long n : {1, 2}) {
            CHECK(m_spectrum(and_type_repetition(no, n)).max_acceptance <=
                  laws::and_repetition(eps, n) + 1e-9);
            CHECK(m_spectrum(or_type_repetition(no, n)).max_acceptance <=
                  laws::or_repetition(eps, n) + 1e-9);
        }
        for (std::uint64_t k = 1; k <= 4; ++k)
            CHECK(m_spectrum(additive_adjustment(no, 2, k)).max_acceptance <=
                  laws::additive_adjustment(eps, 2, k) + 1e-9);
    }
}

TEST_CASE("reflection soundness outside the central band") {
    const double band = 0.3;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Rng rng(mix_seed(seed, 78));
        const double lo = (0.5 - band) * rng.uniform();
        const double hi = 0.5 + band + (0.5 - band) * rng.uniform();
        const auto inst = planted_verifier({lo, hi}, 1400 + seed);
        CHECK(m_spectrum(reflection(inst)).max_acceptance <=
              1.0 - 4.0 * band * band + 1e-9);
    }
}

TEST_CASE("resource accounting matches closed forms and measured tallies") {
    const auto base = random_verifier(1, 1, 55);

    SUBCASE("and/or") {
        for (long long n : {1, 2, 3}) {
            const auto rep = and_type_repetition(base, n);
            const int l = ceil_log2_u64(static_cast<std::uint64_t>(2 * n + 1));
            CHECK(rep.resources.extra_qubits == l);
            CHECK(rep.resources.calls_v == n);
            CHECK(rep.resources.calls_v_dagger == n);
            CallTally tally;
            const cplx basis[2] = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
            acceptance_probability(rep, std::span<const cplx>(basis, 2), &tally);
            CHECK(tally.calls_v == rep.resources.calls_v);
            CHECK(tally.calls_v_dagger == rep.resources.calls_v_dagger);
        }
    }

    SUBCASE("phase estimation") {
        const double eps = 0.25;
        const auto pe = one_shot_phase_estimation(base, 0.25, 3, eps);
        const int m = 3 + ceil_log2_double(2.0 + 1.0 / (2.0 * eps));
        CHECK(pe.resources.extra_qubits == m);
        CHECK(pe.resources.calls_v == (1LL << m) - 1);
        CHECK(pe.resources.calls_v_dagger == (1LL << m) - 1);
        CHECK(pe.resources.stages.back().extras.at("textbook_call_count") ==
              (1LL << 3) * 4 - 1);
        CallTally tally;
        const cplx basis[2] = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
        acceptance_probability(pe, std::span<const cplx>(basis, 2), &tally);
        CHECK(tally.calls_v == pe.resources.calls_v);
        CHECK(tally.calls_v_dagger == pe.resources.calls_v_dagger);
    }

    SUBCASE("mw") {
        const auto mw = marriott_watrous(base, 2, 2);
        CHECK(mw.resources.extra_qubits ==
              2 * 2 + 1 + ceil_log2_u64(5)); // flags + counter
        CHECK(mw.resources.calls_v == 2);
        CHECK(mw.resources.calls_v_dagger == 2);
    }

    SUBCASE("adjustment and reflection") {
        const auto adj = additive_adjustment(base, 3, 4);
        CHECK(adj.resources.extra_qubits == 4);
        CHECK(adj.resources.calls_v == 1);
        CHECK(adj.resources.calls_v_dagger == 0);
        const auto refl = reflection(base);
        CHECK(refl.resources.extra_qubits == 0);
        CHECK(refl.resources.calls_v == 1);
        CHECK(refl.resources.calls_v_dagger == 1);
    }

    SUBCASE("stacking multiplies base calls") {
        const auto stacked = and_type_repetition(reflection(base), 2);
        CHECK(stacked.resources.calls_v == 4); // 2 rounds x (one call each way)
        CHECK(stacked.resources.calls_v_dagger == 4);
        int delta_sum = 0;
        for (const auto &st : stacked.resources.stages) delta_sum += st.delta_qubits;
        CHECK(delta_sum == stacked.resources.extra_qubits);
    }
}

TEST_CASE("random combinator chains match their chained scalar laws") {
    // Any stage's restricted operator is a function of the input eigenvalue,
    // so arbitrary compositions factor through scalar maps.
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(mix_seed(seed, 404));
        const auto base = random_verifier(1, 1, 1500 + seed);
        const auto spec = m_spectrum(base);

        VerifierInstance chained = base;
        std::vector<int> picks;
        for (int step = 0; step < 3; ++step) {
            const int pick = static_cast<int>(rng.next_u64() % 5);
            picks.push_back(pick);
            switch (pick) {
                case 0: chained = and_type_repetition(chained, 1); break;
                case 1: chained = or_type_repetition(chained, 1); break;
                case 2: chained = additive_adjustment(chained, 1, 1 + (rng.next_u64() & 1)); break;
                case 3: chained = reflection(chained); break;
                case 4: chained = marriott_watrous(chained, 1, 1); break;
            }
        }
        chained.delta.validate(chained.layout);
        chained.pi.validate(chained.layout);

        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
            double lam = spec.eigenvalues[i];
            Rng replay(mix_seed(seed, 404));
            for (int step = 0; step < 3; ++step) {
                const int pick = static_cast<int>(replay.next_u64() % 5);
                REQUIRE(pick == picks[static_cast<std::size_t>(step)]);
                switch (pick) {
                    case 0: lam = laws::and_repetition(lam, 1); break;
                    case 1: lam = laws::or_repetition(lam, 1); break;
                    case 2:
                        lam = laws::additive_adjustment(
                            lam, 1, 1 + (replay.next_u64() & 1));
                        break;
                    case 3: lam = laws::reflection(lam); break;
                    case 4: lam = laws::marriott_watrous(lam, 1, 1); break;
                }
            }
            CHECK(std::abs(lifted_acceptance(chained, base, spec, i) - lam) <= 1e-9);
        }

        // Measured base calls agree with the accumulated report.
        CallTally tally;
        const auto w = extract_witness(base, spec.eigenstates[0]);
        acceptance_probability(chained, std::span<const cplx>(w), &tally);
        CHECK(tally.calls_v == chained.resources.calls_v);
        CHECK(tally.calls_v_dagger == chained.resources.calls_v_dagger);
    }
}

TEST_CASE("combinator outputs stay composable") {
    const auto base = random_verifier(1, 1, 66);
    const auto out = or_type_repetition(
        additive_adjustment(reflection(and_type_repetition(base, 1)), 1, 1), 1);
    out.delta.validate(out.layout);
    out.pi.validate(out.layout);
    const auto spec = m_spectrum(out);
    for (double lam : spec.eigenvalues) {
        CHECK(lam >= 0.0);
        CHECK(lam <= 1.0);
    }
    CHECK(out.witness_register == "M");
}
