#include "qamp/oracle.hpp"

#include <cmath>

namespace qamp {
namespace oracle {

namespace {

struct Branch {
    std::vector<cplx> amps; // sub-normalised
    double mass() const {
        double acc = 0.0;
        for (const auto &a : amps) acc += std::norm(a);
        return acc;
    }
};

void split(const std::vector<cplx> &amps, const std::vector<std::uint8_t> &mask,
           std::vector<cplx> &hit, std::vector<cplx> &miss) {
    hit.assign(amps.size(), cplx{0.0, 0.0});
    miss.assign(amps.size(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (mask[i])
            hit[i] = amps[i];
        else
            miss[i] = amps[i];
    }
}

void check_branch_budget(long long checks, std::uint64_t branch_cap) {
    // Full enumeration of binary outcomes of `checks` measurements.
    if (checks >= 63 || (std::uint64_t{1} << checks) > branch_cap)
        throw CapacityError("branch enumeration of 2^" + std::to_string(checks) +
                            " outcomes exceeds the cap of " +
                            std::to_string(branch_cap) + " branches");
}

// Shared recursion for the repetition procedures and the agreement counter.
// Runs `rounds` pairs of (apply, check_pi, undo, check_delta); `on_leaf`
// receives the outcome sequence and the branch probability.
template <typename Leaf>
void enumerate_rounds(const VerifierInstance &v, long long rounds,
                      const std::vector<std::uint8_t> &pi_mask,
                      const std::vector<std::uint8_t> &delta_mask,
                      const StateVector &input, Leaf &&on_leaf) {
    struct Frame {
        std::vector<cplx> amps;
        std::vector<int> outcomes; // alternating pi-check, delta-check results
        double mass() const {
            double acc = 0.0;
            for (const auto &a : amps) acc += std::norm(a);
            return acc;
        }
    };
    std::vector<Frame> stack;
    stack.push_back({input.amplitudes(), {}});
    std::vector<cplx> hit, miss;
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        const long long done = static_cast<long long>(f.outcomes.size());
        if (done == 2 * rounds) {
            double mass = 0.0;
            for (const auto &a : f.amps) mass += std::norm(a);
            on_leaf(f.outcomes, mass);
            continue;
        }
        const bool pi_check = (done % 2 == 0);
        std::vector<cplx> amps = std::move(f.amps);
        amps = run_applier(*v.applier, v.layout, std::move(amps), !pi_check);
        const auto &mask = pi_check ? pi_mask : delta_mask;
        split(amps, mask, hit, miss);

        Frame in_branch;
        in_branch.amps = hit;
        in_branch.outcomes = f.outcomes;
        in_branch.outcomes.push_back(1);
        Frame out_branch;
        out_branch.amps = miss;
        out_branch.outcomes = std::move(f.outcomes);
        out_branch.outcomes.push_back(0);
        // Skip numerically dead branches; they contribute nothing.
        if (in_branch.mass() > 1e-300) stack.push_back(std::move(in_branch));
        if (out_branch.mass() > 1e-300) stack.push_back(std::move(out_branch));
    }
}

std::pair<double, double> masses_and_or(const VerifierInstance &v, long long n,
                                        bool and_type, const StateVector &input,
                                        std::uint64_t branch_cap) {
    check_branch_budget(2 * n, branch_cap);
    const auto pi_mask = v.pi.build_mask(v.layout);
    const auto delta_mask = v.delta.build_mask(v.layout);
    double accept = 0.0, reject = 0.0;
    enumerate_rounds(v, n, pi_mask, delta_mask, input,
                     [&](const std::vector<int> &outcomes, double mass) {
                         long long increments = 0;
                         for (std::size_t i = 0; i < outcomes.size(); ++i) {
                             const bool pi_check = (i % 2 == 0);
                             if (and_type) {
                                 // Counter bumps on failed accept checks and
                                 // failed restore checks alike.
                                 if (!outcomes[i]) ++increments;
                             } else {
                                 if (pi_check ? outcomes[i] == 1 : outcomes[i] == 0)
                                     ++increments;
                             }
                         }
                         const bool counter_zero = (increments == 0);
                         const bool accepts = and_type ? counter_zero : !counter_zero;
                         (accepts ? accept : reject) += mass;
                     });
    return {accept, reject};
}

std::pair<double, double> masses_mw(const VerifierInstance &v, long long n,
                                    long long threshold, const StateVector &input,
                                    std::uint64_t branch_cap) {
    check_branch_budget(2 * n, branch_cap);
    const auto pi_mask = v.pi.build_mask(v.layout);
    const auto delta_mask = v.delta.build_mask(v.layout);
    double accept = 0.0, reject = 0.0;
    enumerate_rounds(
        v, n, pi_mask, delta_mask, input,
        [&](const std::vector<int> &outcomes, double mass) {
            // Flag j records a failed check; flag 0 is pinned to 0.
            std::vector<int> flags;
            flags.push_back(0);
            for (int o : outcomes) flags.push_back(o ? 0 : 1);
            long long agreements = 0;
            for (std::size_t j = 1; j < flags.size(); ++j)
                if (flags[j] == flags[j - 1]) ++agreements;
            ((agreements >= threshold) ? accept : reject) += mass;
        });
    return {accept, reject};
}

std::pair<double, double> masses_additive(const VerifierInstance &v, int l,
                                          std::uint64_t k, const StateVector &input) {
    // One coin flip, one comparison draw, one accept check: evaluate the three
    // measurements directly on the uniform coin/comparison mixture.
    auto amps = input.amplitudes();
    amps = run_applier(*v.applier, v.layout, std::move(amps), false);
    const auto pi_mask = v.pi.build_mask(v.layout);
    double p_pi = 0.0, total = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double w = std::norm(amps[i]);
        total += w;
        if (pi_mask[i]) p_pi += w;
    }
    const double span = static_cast<double>(std::uint64_t{1} << l);
    const double p_cmp = (span - static_cast<double>(k)) / span;
    const double accept = 0.5 * p_pi + 0.5 * p_cmp * total;
    return {accept, total - accept};
}

std::pair<double, double> masses_reflection(const VerifierInstance &v,
                                            const StateVector &input) {
    auto amps = input.amplitudes();
    amps = run_applier(*v.applier, v.layout, std::move(amps), false);
    const auto pi_mask = v.pi.build_mask(v.layout);
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (pi_mask[i]) amps[i] = -amps[i];
    amps = run_applier(*v.applier, v.layout, std::move(amps), true);
    const auto delta_mask = v.delta.build_mask(v.layout);
    double in_delta = 0.0, total = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double w = std::norm(amps[i]);
        total += w;
        if (delta_mask[i]) in_delta += w;
    }
    return {total - in_delta, in_delta};
}

} // namespace

std::pair<double, double> branch_sum_masses(const VerifierInstance &v,
                                            const Procedure &procedure,
                                            const StateVector &input,
                                            std::uint64_t branch_cap) {
    if (input.layout() != v.layout)
        throw ValidationError("oracle input layout does not match the instance");
    return std::visit(
        [&](const auto &p) -> std::pair<double, double> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, AndRepetition>) {
                return masses_and_or(v, p.n, true, input, branch_cap);
            } else if constexpr (std::is_same_v<T, OrRepetition>) {
                return masses_and_or(v, p.n, false, input, branch_cap);
            } else if constexpr (std::is_same_v<T, MarriottWatrous>) {
                return masses_mw(v, p.n, p.threshold, input, branch_cap);
            } else if constexpr (std::is_same_v<T, AdditiveAdjustment>) {
                return masses_additive(v, p.l, p.k, input);
            } else {
                return masses_reflection(v, input);
            }
        },
        procedure);
}

double branch_sum_acceptance(const VerifierInstance &v, const Procedure &procedure,
                             const StateVector &input, std::uint64_t branch_cap) {
    return branch_sum_masses(v, procedure, input, branch_cap).first;
}

SampledAcceptance sampled_acceptance(const VerifierInstance &v,
                                     const StateVector &witness, long long shots,
                                     std::uint64_t seed) {
    if (shots < 1) throw ValidationError("shot count must be >= 1");
    const double p = acceptance_probability(v, witness);
    Rng rng(mix_seed(seed, 0x5a17ULL));
    long long accepted = 0;
    for (long long i = 0; i < shots; ++i)
        if (rng.uniform() < p) ++accepted;
    SampledAcceptance out;
    out.accepted = accepted;
    out.shots = shots;
    out.estimate = static_cast<double>(accepted) / static_cast<double>(shots);
    out.half_width =
        1.96 * std::sqrt(std::max(out.estimate * (1.0 - out.estimate), 1e-12) /
                         static_cast<double>(shots));
    return out;
}

} // namespace oracle
} // namespace qamp
