#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qamp/procedures.hpp"

using namespace qamp;

namespace {

Matrix pauli_x_on_output(int total_qubits) {
    Matrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    Matrix u = x;
    for (int q = 1; q < total_qubits; ++q) u = tensor_product(Matrix::identity(2), u);
    return u;
}

std::vector<cplx> random_witness(std::uint64_t dim, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 91));
    std::vector<cplx> w(dim);
    double nrm = 0.0;
    for (auto &x : w) {
        x = rng.gaussian_cplx();
        nrm += std::norm(x);
    }
    nrm = std::sqrt(nrm);
    for (auto &x : w) x /= nrm;
    return w;
}

} // namespace

TEST_CASE("identity verifier never accepts") {
    const auto v = build_verifier(Matrix::identity(2), 1, 0, 0);
    const auto spec = m_spectrum(v);
    REQUIRE(spec.eigenvalues.size() == 1);
    CHECK(spec.eigenvalues[0] == doctest::Approx(0.0));
    const cplx one{1.0, 0.0};
    CHECK(acceptance_probability(v, std::span<const cplx>(&one, 1)) ==
          doctest::Approx(0.0));
}

TEST_CASE("X on the output qubit always accepts") {
    const auto v = build_verifier(pauli_x_on_output(1), 1, 0, 0);
    const auto spec = m_spectrum(v);
    CHECK(spec.max_acceptance == doctest::Approx(1.0));
    const cplx one{1.0, 0.0};
    CHECK(acceptance_probability(v, std::span<const cplx>(&one, 1)) ==
          doctest::Approx(1.0));
}

TEST_CASE("haar instance exposes one eigenvalue per witness dimension") {
    const auto v = random_verifier(1, 1, 3);
    const auto spec = m_spectrum(v);
    CHECK(spec.eigenvalues.size() == 2);
    for (double lam : spec.eigenvalues) {
        CHECK(lam >= 0.0);
        CHECK(lam <= 1.0);
    }
}

TEST_CASE("degenerate projections give the fully accepting operator") {
    VerifierInstance v;
    v.layout = RegisterLayout({{"V", 1}, {"M", 1}});
    v.applier = make_base_unitary(haar_unitary(4, 5), {"V", "M"});
    v.delta = ProjectionSpec::always();
    v.pi = ProjectionSpec::always();
    v.witness_register = "M";
    const auto spec = m_spectrum(v);
    for (double lam : spec.eigenvalues) CHECK(lam == doctest::Approx(1.0));
}

TEST_CASE("witness-controlled flip accepts exactly the |1> witness") {
    // Control = witness qubit (index 1), target = output qubit (index 0).
    Matrix cnot(4, 4);
    cnot(0, 0) = 1.0;
    cnot(1, 1) = 1.0;
    cnot(3, 2) = 1.0;
    cnot(2, 3) = 1.0;
    const auto v = build_verifier(cnot, 1, 1, 0);
    const auto spec = m_spectrum(v);
    REQUIRE(spec.eigenvalues.size() == 2);
    CHECK(spec.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(spec.eigenvalues[1] == doctest::Approx(0.0));

    const std::vector<cplx> one = {cplx{0.0, 0.0}, cplx{1.0, 0.0}};
    CHECK(acceptance_probability(v, std::span<const cplx>(one)) ==
          doctest::Approx(1.0));
}

TEST_CASE("top eigenvalue dominates sampled witnesses") {
    const auto v = random_verifier(1, 1, 14);
    const auto spec = m_spectrum(v);
    double best = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto w = random_witness(2, 1000 + static_cast<std::uint64_t>(i));
        const double acc = acceptance_probability(v, std::span<const cplx>(w));
        CHECK(acc <= spec.max_acceptance + 1e-9);
        best = std::max(best, acc);
    }
    CHECK(spec.max_acceptance - best <= 1e-3);
}

TEST_CASE("eigenstates reproduce their eigenvalues") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto v = random_verifier(1, 1, 500 + seed);
        const auto spec = m_spectrum(v);
        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
            const auto w = extract_witness(v, spec.eigenstates[i]);
            CHECK(std::abs(acceptance_probability(v, std::span<const cplx>(w)) -
                           spec.eigenvalues[i]) <= 1e-10);
        }
    }
}

TEST_CASE("eigenstates live inside the initial subspace") {
    const auto v = random_verifier(1, 1, 600);
    const auto spec = m_spectrum(v);
    for (const auto &state : spec.eigenstates) {
        const auto res = project(state, v.delta);
        CHECK(res.probability == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("round trip through the verifier unitary") {
    const auto v = random_verifier(2, 1, 77);
    Rng rng(4);
    std::vector<cplx> amps(v.layout.dimension());
    double nrm = 0.0;
    for (auto &x : amps) {
        x = rng.gaussian_cplx();
        nrm += std::norm(x);
    }
    for (auto &x : amps) x /= std::sqrt(nrm);
    auto fwd = run_applier(*v.applier, v.layout, amps, false);
    auto back = run_applier(*v.applier, v.layout, std::move(fwd), true);
    double worst = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i)
        worst = std::max(worst, std::abs(back[i] - amps[i]));
    CHECK(worst <= 1e-9);
}

TEST_CASE("base resource report is zero") {
    const auto v = random_verifier(1, 1, 2);
    CHECK(v.resources.extra_qubits == 0);
    CHECK(v.resources.calls_v == 0);
    CHECK(v.resources.calls_v_dagger == 0);
    CHECK(v.resources.stages.empty());
}

TEST_CASE("build validation") {
    CHECK_THROWS_AS(build_verifier(Matrix::identity(4), 1, 2, 0), ValidationError);
    CHECK_THROWS_AS(build_verifier(Matrix::identity(4), 1, 1, 1), ValidationError);
    Matrix not_unitary = Matrix::identity(4).scaled(2.0);
    CHECK_THROWS_AS(build_verifier(not_unitary, 1, 1, 0), ValidationError);
}

TEST_CASE("planted spectra come out exactly as requested") {
    const std::vector<double> lams = {0.875, 0.25};
    const auto v = planted_verifier(lams, 9);
    const auto spec = m_spectrum(v);
    CHECK(spec.eigenvalues[0] == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(spec.eigenvalues[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("spectral analysis refuses oversized instances") {
    auto v = random_verifier(1, 1, 31);
    for (int i = 0; i < 3; ++i) v = and_type_repetition(v, 4);
    CHECK(v.total_qubits() > 10);
    CHECK_THROWS_AS(m_spectrum(v), CapacityError);
}

TEST_CASE("instance JSON round trips bit exactly") {
    const auto v = random_verifier(1, 1, 123);
    const std::string text = instance_to_json(v);
    const auto back = instance_from_json(text);
    REQUIRE(back.base);
    for (std::size_t i = 0; i < v.base->u.entries().size(); ++i) {
        CHECK(back.base->u.entries()[i].real() == v.base->u.entries()[i].real());
        CHECK(back.base->u.entries()[i].imag() == v.base->u.entries()[i].imag());
    }
    CHECK(instance_to_json(back) == text);
    CHECK_THROWS_AS(instance_from_json("{\"format\": \"other\"}"), ValidationError);
}
