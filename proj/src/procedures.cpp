#include "qamp/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qamp {

namespace {

// Wires the common parts of a combinator result: layout/applier/projections
// plus cumulative call accounting in base-unitary units.
VerifierInstance compose(const VerifierInstance &inner, RegisterLayout layout,
                         ApplierPtr applier, ProjectionSpec delta, ProjectionSpec pi,
                         StageResources stage) {
    const auto [a, b] = inner.resources.application_cost();
    stage.calls_v = stage.inner_calls_v * a + stage.inner_calls_v_dagger * b;
    stage.calls_v_dagger = stage.inner_calls_v * b + stage.inner_calls_v_dagger * a;

    VerifierInstance out;
    out.layout = std::move(layout);
    out.applier = std::move(applier);
    out.delta = std::move(delta);
    out.pi = std::move(pi);
    out.witness_register = inner.witness_register;
    out.resources = inner.resources;
    out.resources.extra_qubits += stage.delta_qubits;
    out.resources.calls_v = stage.calls_v;
    out.resources.calls_v_dagger = stage.calls_v_dagger;
    out.resources.stages.push_back(std::move(stage));
    out.base = nullptr;
    out.delta.validate(out.layout);
    out.pi.validate(out.layout);
    return out;
}

void require_counter_disjoint(const RegisterLayout &layout, const ProjectionSpec &spec,
                              const std::string &counter) {
    const std::uint64_t counter_bits =
        ((std::uint64_t{1} << layout.width_of(counter)) - 1)
        << layout.offset_of(counter);
    if (spec.support_mask(layout) & counter_bits)
        throw ValidationError("increment control would read its own counter");
}

} // namespace

int ceil_log2_u64(std::uint64_t x) {
    if (x == 0) throw ValidationError("ceil_log2 of zero");
    int k = 0;
    std::uint64_t p = 1;
    while (p < x) {
        p <<= 1;
        ++k;
    }
    return k;
}

int ceil_log2_double(double x) {
    if (!(x > 0.0)) throw ValidationError("ceil_log2 of non-positive value");
    int k = 0;
    double p = 1.0;
    while (p < x * (1.0 - 1e-12)) {
        p *= 2.0;
        ++k;
    }
    return k;
}

int phase_register_width(int l, double eps) {
    return l + ceil_log2_double(2.0 + 1.0 / (2.0 * eps));
}

VerifierInstance and_type_repetition(const VerifierInstance &v, long long n) {
    if (n < 1) throw ValidationError("repetition count must be >= 1");
    const int l = ceil_log2_u64(static_cast<std::uint64_t>(2 * n + 1));
    if (2 * n >= (1LL << l))
        throw ValidationError("counter of width " + std::to_string(l) +
                              " could wrap within " + std::to_string(2 * n) +
                              " increments");
    const std::string ctr = v.layout.unique_name("ctr");
    RegisterLayout layout = v.layout.extended(ctr, l);
    require_counter_disjoint(layout, v.pi, ctr);
    require_counter_disjoint(layout, v.delta, ctr);

    ApplierPtr step = make_sequence({
        v.applier,
        make_controlled_increment(~v.pi, ctr),
        make_adjoint(v.applier),
        make_controlled_increment(~v.delta, ctr),
    });
    ApplierPtr applier = make_repeat(std::move(step), n);

    ProjectionSpec counter_zero = ProjectionSpec::reg_equals(ctr, 0);
    StageResources stage;
    stage.stage = "and-repetition(N=" + std::to_string(n) + ")";
    stage.delta_qubits = l;
    stage.inner_calls_v = n;
    stage.inner_calls_v_dagger = n;
    stage.extras["N"] = n;
    stage.extras["counter_bits"] = l;
    return compose(v, std::move(layout), std::move(applier), v.delta & counter_zero,
                   counter_zero, std::move(stage));
}

VerifierInstance or_type_repetition(const VerifierInstance &v, long long n) {
    if (n < 1) throw ValidationError("repetition count must be >= 1");
    const int l = ceil_log2_u64(static_cast<std::uint64_t>(2 * n + 1));
    const std::string ctr = v.layout.unique_name("ctr");
    RegisterLayout layout = v.layout.extended(ctr, l);
    require_counter_disjoint(layout, v.pi, ctr);
    require_counter_disjoint(layout, v.delta, ctr);

    ApplierPtr step = make_sequence({
        v.applier,
        make_controlled_increment(v.pi, ctr),
        make_adjoint(v.applier),
        make_controlled_increment(~v.delta, ctr),
    });
    ApplierPtr applier = make_repeat(std::move(step), n);

    ProjectionSpec counter_zero = ProjectionSpec::reg_equals(ctr, 0);
    StageResources stage;
    stage.stage = "or-repetition(N=" + std::to_string(n) + ")";
    stage.delta_qubits = l;
    stage.inner_calls_v = n;
    stage.inner_calls_v_dagger = n;
    stage.extras["N"] = n;
    stage.extras["counter_bits"] = l;
    return compose(v, std::move(layout), std::move(applier), v.delta & counter_zero,
                   ~counter_zero, std::move(stage));
}

VerifierInstance one_shot_phase_estimation(const VerifierInstance &v, double t, int l,
                                           double eps) {
    if (l < 1) throw ValidationError("precision bits must be >= 1");
    if (!(eps > 0.0 && eps < 1.0))
        throw ValidationError("failure budget must lie strictly in (0, 1)");
    if (!(t >= 0.0 && t <= 0.5))
        throw ValidationError("window threshold must lie in [0, 1/2]");
    const double scaled = t * static_cast<double>(1ULL << l);
    const auto t_num = static_cast<std::uint64_t>(std::llround(scaled));
    if (std::abs(scaled - static_cast<double>(t_num)) > 1e-9)
        throw ValidationError("window threshold is not a multiple of 2^-" +
                              std::to_string(l));

    const int extra = ceil_log2_double(2.0 + 1.0 / (2.0 * eps));
    const int m = l + extra;
    const std::string phase = v.layout.unique_name("phase");
    RegisterLayout layout = v.layout.extended(phase, m);
    const int phase_off = layout.offset_of(phase);

    std::vector<int> phase_qubits(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) phase_qubits[static_cast<std::size_t>(i)] = phase_off + i;

    std::vector<ApplierPtr> steps;
    steps.push_back(make_hadamards(phase_qubits));
    for (int j = 0; j < m; ++j) {
        ProjectionSpec ctrl = ProjectionSpec::qubit_is(phase_off + j, 1);
        // Controlled walk iterate: the base applications stay unconditional,
        // only the reflections are controlled, so each iterate costs one
        // application of the inner unitary and one of its inverse.
        ApplierPtr iterate = make_sequence({
            make_phase_flip(ctrl & ~v.delta),
            v.applier,
            make_phase_flip(ctrl & ~v.pi),
            make_adjoint(v.applier),
        });
        steps.push_back(make_repeat(std::move(iterate), 1LL << j));
    }
    steps.push_back(make_fourier_adjoint(phase));
    ApplierPtr applier = make_sequence(std::move(steps));

    const long long iterations = (1LL << m) - 1;
    StageResources stage;
    stage.stage = "phase-estimation(l=" + std::to_string(l) + ",m=" + std::to_string(m) +
                  ")";
    stage.delta_qubits = m;
    stage.inner_calls_v = iterations;
    stage.inner_calls_v_dagger = iterations;
    stage.extras["precision_bits"] = l;
    stage.extras["ancilla_bits"] = extra;
    stage.extras["phase_bits"] = m;
    stage.extras["window_numerator"] = static_cast<long long>(t_num);
    stage.extras["walk_iterations"] = iterations;
    stage.extras["textbook_call_count"] =
        (1LL << l) * static_cast<long long>(std::ceil(1.0 / (2.0 * eps) + 2.0 - 1e-9)) -
        1;

    return compose(v, std::move(layout), std::move(applier),
                   v.delta & ProjectionSpec::reg_equals(phase, 0),
                   ProjectionSpec::phase_window(phase, t_num, l), std::move(stage));
}

VerifierInstance marriott_watrous(const VerifierInstance &v, long long n,
                                  long long threshold) {
    if (n < 1) throw ValidationError("round count must be >= 1");
    if (threshold < 1 || threshold > 2 * n)
        throw ValidationError("threshold " + std::to_string(threshold) +
                              " must lie in [1, " + std::to_string(2 * n) + "]");
    const int l = ceil_log2_u64(static_cast<std::uint64_t>(2 * n + 1));

    RegisterLayout layout = v.layout;
    std::vector<std::string> flags;
    std::vector<int> flag_qubits;
    for (long long j = 0; j <= 2 * n; ++j) {
        const std::string name = layout.unique_name("b" + std::to_string(j));
        layout = layout.extended(name, 1);
        flags.push_back(name);
    }
    const std::string ctr = layout.unique_name("ctr");
    layout = layout.extended(ctr, l);
    for (const auto &f : flags) flag_qubits.push_back(layout.offset_of(f));

    std::vector<ApplierPtr> steps;
    for (long long j = 1; j <= n; ++j) {
        steps.push_back(v.applier);
        steps.push_back(make_controlled_x(~v.pi, flag_qubits[static_cast<std::size_t>(
                                                     2 * j - 1)]));
        steps.push_back(make_adjoint(v.applier));
        steps.push_back(
            make_controlled_x(~v.delta, flag_qubits[static_cast<std::size_t>(2 * j)]));
    }
    for (long long j = 1; j <= 2 * n; ++j) {
        const int qa = flag_qubits[static_cast<std::size_t>(j - 1)];
        const int qb = flag_qubits[static_cast<std::size_t>(j)];
        ProjectionSpec agree = (ProjectionSpec::qubit_is(qa, 0) &
                                ProjectionSpec::qubit_is(qb, 0)) |
                               (ProjectionSpec::qubit_is(qa, 1) &
                                ProjectionSpec::qubit_is(qb, 1));
        steps.push_back(make_controlled_increment(std::move(agree), ctr));
    }
    ApplierPtr applier = make_sequence(std::move(steps));

    ProjectionSpec delta = v.delta;
    for (const auto &f : flags) delta = delta & ProjectionSpec::reg_equals(f, 0);
    delta = delta & ProjectionSpec::reg_equals(ctr, 0);

    StageResources stage;
    stage.stage = "mw-amplification(N=" + std::to_string(n) +
                  ",t=" + std::to_string(threshold) + ")";
    stage.delta_qubits = static_cast<int>(2 * n + 1) + l;
    stage.inner_calls_v = n;
    stage.inner_calls_v_dagger = n;
    stage.extras["N"] = n;
    stage.extras["threshold"] = threshold;
    stage.extras["flag_qubits"] = 2 * n + 1;
    stage.extras["counter_bits"] = l;
    return compose(v, std::move(layout), std::move(applier), std::move(delta),
                   ProjectionSpec::reg_at_least(ctr, static_cast<std::uint64_t>(threshold)),
                   std::move(stage));
}

VerifierInstance additive_adjustment(const VerifierInstance &v, int l,
                                     std::uint64_t k) {
    if (l < 1) throw ValidationError("comparison register width must be >= 1");
    if (k < 1 || k > (std::uint64_t{1} << l))
        throw ValidationError("shift index k = " + std::to_string(k) +
                              " must lie in [1, 2^" + std::to_string(l) + "]");
    const std::string coin = v.layout.unique_name("coin");
    const std::string cmp = v.layout.unique_name("cmp");
    RegisterLayout layout = v.layout.extended(coin, 1).extended(cmp, l);

    std::vector<int> h_qubits = {layout.offset_of(coin)};
    for (int q : layout.qubits_of(cmp)) h_qubits.push_back(q);
    ApplierPtr applier = make_sequence({make_hadamards(std::move(h_qubits)), v.applier});

    // Contents of the comparison register are read as 1..2^l, so "greater than
    // k" holds on exactly 2^l - k of the 2^l basis values: raw value >= k.
    ProjectionSpec coin0 = ProjectionSpec::reg_equals(coin, 0);
    ProjectionSpec coin1 = ProjectionSpec::reg_equals(coin, 1);
    ProjectionSpec pi =
        (coin0 & v.pi) | (coin1 & ProjectionSpec::reg_at_least(cmp, k));
    ProjectionSpec delta = v.delta & coin0 & ProjectionSpec::reg_equals(cmp, 0);

    StageResources stage;
    stage.stage = "additive-adjustment(l=" + std::to_string(l) +
                  ",k=" + std::to_string(k) + ")";
    stage.delta_qubits = l + 1;
    stage.inner_calls_v = 1;
    stage.inner_calls_v_dagger = 0;
    stage.extras["l"] = l;
    stage.extras["k"] = static_cast<long long>(k);
    return compose(v, std::move(layout), std::move(applier), std::move(delta),
                   std::move(pi), std::move(stage));
}

VerifierInstance reflection(const VerifierInstance &v) {
    ApplierPtr applier = make_sequence({
        v.applier,
        make_phase_flip(v.pi),
        make_adjoint(v.applier),
    });
    StageResources stage;
    stage.stage = "reflection";
    stage.delta_qubits = 0;
    stage.inner_calls_v = 1;
    stage.inner_calls_v_dagger = 1;
    return compose(v, v.layout, std::move(applier), v.delta, ~v.delta,
                   std::move(stage));
}

namespace laws {

double and_repetition(double lam, long long n) {
    return std::pow(lam, 2.0 * static_cast<double>(n));
}

double or_repetition(double lam, long long n) {
    return 1.0 - std::pow(1.0 - lam, 2.0 * static_cast<double>(n));
}

double additive_adjustment(double lam, int l, std::uint64_t k) {
    return 0.5 + 0.5 * (lam - static_cast<double>(k) /
                                  static_cast<double>(std::uint64_t{1} << l));
}

double reflection(double lam) { return 4.0 * lam * (1.0 - lam); }

double marriott_watrous(double lam, long long n, long long threshold) {
    const long long m = 2 * n;
    if (threshold <= 0) return 1.0;
    if (lam <= 0.0) return 0.0;
    if (lam >= 1.0) return threshold <= m ? 1.0 : 0.0;
    double acc = 0.0;
    const double log_lam = std::log(lam);
    const double log_1m = std::log1p(-lam);
    for (long long j = threshold; j <= m; ++j) {
        const double log_binom = std::lgamma(static_cast<double>(m + 1)) -
                                 std::lgamma(static_cast<double>(j + 1)) -
                                 std::lgamma(static_cast<double>(m - j + 1));
        acc += std::exp(log_binom + static_cast<double>(j) * log_lam +
                        static_cast<double>(m - j) * log_1m);
    }
    return std::min(acc, 1.0);
}

double phase_estimation(double lam, double t, int l, double eps) {
    lam = std::clamp(lam, 0.0, 1.0);
    const double angle = std::asin(std::sqrt(lam));
    Matrix u(2, 2);
    u(0, 0) = std::cos(angle);
    u(0, 1) = -std::sin(angle);
    u(1, 0) = std::sin(angle);
    u(1, 1) = std::cos(angle);
    VerifierInstance probe = build_verifier(u, 1, 0, 0);
    VerifierInstance pe = one_shot_phase_estimation(probe, t, l, eps);
    const cplx one{1.0, 0.0};
    return acceptance_probability(pe, std::span<const cplx>(&one, 1));
}

} // namespace laws

Matrix dense_unitary_of(const VerifierInstance &v, std::uint64_t dim_cap) {
    const std::uint64_t dim = v.layout.dimension();
    if (dim > dim_cap)
        throw CapacityError("dense extraction capped at dimension " +
                            std::to_string(dim_cap));
    Matrix u(dim, dim);
    for (std::uint64_t c = 0; c < dim; ++c) {
        std::vector<cplx> amps(dim, cplx{0.0, 0.0});
        amps[c] = 1.0;
        amps = run_applier(*v.applier, v.layout, std::move(amps), false);
        for (std::uint64_t r = 0; r < dim; ++r) u(r, c) = amps[r];
    }
    return u;
}

} // namespace qamp
