#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qamp/oracle.hpp"
#include "qamp/procedures.hpp"

using namespace qamp;

namespace {

StateVector lifted_eigenstate(const VerifierInstance &v, const SpectrumReport &spec,
                              std::size_t idx) {
    const auto w = extract_witness(v, spec.eigenstates[idx]);
    return assemble_initial_state(v, std::span<const cplx>(w));
}

double combinator_acceptance(const VerifierInstance &combined,
                             const VerifierInstance &bare, const SpectrumReport &spec,
                             std::size_t idx) {
    const auto w = extract_witness(bare, spec.eigenstates[idx]);
    return acceptance_probability(combined, std::span<const cplx>(w));
}

} // namespace

TEST_CASE("branch sum on a perfect instance accepts surely") {
    const auto v = planted_verifier({1.0, 1.0}, 3);
    const auto spec = m_spectrum(v);
    const auto input = lifted_eigenstate(v, spec, 0);
    CHECK(oracle::branch_sum_acceptance(v, oracle::AndRepetition{2}, input) ==
          doctest::Approx(1.0));
}

TEST_CASE("branch sum frozen point: N=1 at 3/4 gives 9/16") {
    const auto v = planted_verifier({0.75, 0.75}, 5);
    const auto spec = m_spectrum(v);
    const auto input = lifted_eigenstate(v, spec, 0);
    CHECK(std::abs(oracle::branch_sum_acceptance(v, oracle::AndRepetition{1}, input) -
                   0.5625) <= 1e-12);
}

TEST_CASE("branch masses account for all probability") {
    const auto v = random_verifier(1, 1, 8);
    const auto spec = m_spectrum(v);
    const auto input = lifted_eigenstate(v, spec, 0);
    for (const oracle::Procedure &proc :
         {oracle::Procedure{oracle::AndRepetition{2}},
          oracle::Procedure{oracle::OrRepetition{2}},
          oracle::Procedure{oracle::MarriottWatrous{2, 2}},
          oracle::Procedure{oracle::AdditiveAdjustment{2, 3}},
          oracle::Procedure{oracle::Reflection{}}}) {
        const auto [accept, reject] = oracle::branch_sum_masses(v, proc, input);
        CHECK(accept + reject == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("oracle agrees with the combinators on random instances") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto v = random_verifier(1, 1, 2000 + seed);
        const auto spec = m_spectrum(v);
        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
            const auto input = lifted_eigenstate(v, spec, i);
            for (long long n : {1, 2, 3}) {
                CHECK(std::abs(oracle::branch_sum_acceptance(
                                   v, oracle::AndRepetition{n}, input) -
                               combinator_acceptance(and_type_repetition(v, n), v,
                                                     spec, i)) <= 1e-9);
                CHECK(std::abs(oracle::branch_sum_acceptance(
                                   v, oracle::OrRepetition{n}, input) -
                               combinator_acceptance(or_type_repetition(v, n), v,
                                                     spec, i)) <= 1e-9);
                for (long long t = 1; t <= 2 * n; ++t)
                    CHECK(std::abs(oracle::branch_sum_acceptance(
                                       v, oracle::MarriottWatrous{n, t}, input) -
                                   combinator_acceptance(marriott_watrous(v, n, t),
                                                         v, spec, i)) <= 1e-9);
            }
            for (int l = 1; l <= 2; ++l)
                for (std::uint64_t k = 1; k <= (std::uint64_t{1} << l); ++k)
                    CHECK(std::abs(
                              oracle::branch_sum_acceptance(
                                  v, oracle::AdditiveAdjustment{l, k}, input) -
                              combinator_acceptance(additive_adjustment(v, l, k), v,
                                                    spec, i)) <= 1e-9);
            CHECK(std::abs(oracle::branch_sum_acceptance(v, oracle::Reflection{},
                                                         input) -
                           combinator_acceptance(reflection(v), v, spec, i)) <= 1e-9);
        }
    }
}

TEST_CASE("oracle agrees with the combinators on arbitrary witnesses") {
    // Superpositions of eigenstates, not just eigenstates.
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto v = random_verifier(1, 1, 2100 + seed);
        Rng rng(mix_seed(seed, 5));
        std::vector<cplx> w(2);
        double nrm = 0.0;
        for (auto &x : w) {
            x = rng.gaussian_cplx();
            nrm += std::norm(x);
        }
        for (auto &x : w) x /= std::sqrt(nrm);
        const auto input = assemble_initial_state(v, std::span<const cplx>(w));
        CHECK(std::abs(
                  oracle::branch_sum_acceptance(v, oracle::AndRepetition{2}, input) -
                  acceptance_probability(and_type_repetition(v, 2),
                                         std::span<const cplx>(w))) <= 1e-9);
        CHECK(std::abs(
                  oracle::branch_sum_acceptance(v, oracle::MarriottWatrous{2, 3},
                                                input) -
                  acceptance_probability(marriott_watrous(v, 2, 3),
                                         std::span<const cplx>(w))) <= 1e-9);
    }
}

TEST_CASE("branch explosion is refused") {
    const auto v = random_verifier(1, 1, 1);
    const auto input = StateVector::zero_state(v.layout);
    CHECK_THROWS_AS(oracle::branch_sum_acceptance(v, oracle::AndRepetition{40}, input,
                                                  std::uint64_t{1} << 20),
                    CapacityError);
}

TEST_CASE("sampling endpoints and a frozen reflection draw") {
    const auto yes = build_verifier(
        [] {
            Matrix x(2, 2);
            x(0, 1) = 1.0;
            x(1, 0) = 1.0;
            return tensor_product(Matrix::identity(2), x);
        }(),
        1, 1, 0);
    const auto wlayout = RegisterLayout({{"M", 1}});
    const auto witness = StateVector::basis_state(wlayout, 0);
    const auto hit = oracle::sampled_acceptance(yes, witness, 100, 17);
    CHECK(hit.estimate == doctest::Approx(1.0));

    const auto no = build_verifier(Matrix::identity(4), 1, 1, 0);
    const auto miss = oracle::sampled_acceptance(no, witness, 100, 17);
    CHECK(miss.estimate == doctest::Approx(0.0));

    const auto half = planted_verifier({0.5, 0.5}, 31);
    const auto hspec = m_spectrum(half);
    const auto refl = reflection(half);
    const auto hw = extract_witness(half, hspec.eigenstates[0]);
    const auto draw = oracle::sampled_acceptance(
        refl, StateVector::from_amplitudes(wlayout, hw), 100000, 11);
    CHECK(std::abs(draw.estimate - 1.0) <= draw.half_width + 1e-9);
}
