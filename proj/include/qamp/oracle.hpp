#pragma once

#include <variant>

#include "qamp/verifier.hpp"

namespace qamp {
namespace oracle {

// Independent acceptance oracle: runs a procedure as a sequence of explicit
// projective measurements on the bare input instance, enumerating every
// outcome branch with sub-normalised state propagation. No counters, no
// composed unitaries; shares nothing with the combinator path beyond the
// instance itself.

struct AndRepetition {
    long long n = 1;
};
struct OrRepetition {
    long long n = 1;
};
struct MarriottWatrous {
    long long n = 1;
    long long threshold = 1;
};
struct AdditiveAdjustment {
    int l = 1;
    std::uint64_t k = 1;
};
struct Reflection {};

using Procedure = std::variant<AndRepetition, OrRepetition, MarriottWatrous,
                               AdditiveAdjustment, Reflection>;

// Total probability of accepting branches when the procedure measures instead
// of recording coherently. `input` lives on the instance layout and must be in
// the delta subspace. Branch count is capped at 2^24.
double branch_sum_acceptance(const VerifierInstance &v, const Procedure &procedure,
                             const StateVector &input,
                             std::uint64_t branch_cap = std::uint64_t{1} << 24);

// Probabilities of all outcome branches sum to one; returned for the property
// tests. First element accept mass, second reject mass.
std::pair<double, double> branch_sum_masses(const VerifierInstance &v,
                                            const Procedure &procedure,
                                            const StateVector &input,
                                            std::uint64_t branch_cap = std::uint64_t{1}
                                                                       << 24);

struct SampledAcceptance {
    double estimate = 0.0;
    double half_width = 0.0; // 95% binomial confidence half-width
    long long accepted = 0;
    long long shots = 0;
};

// Bernoulli sampling of the final accept measurement; deterministic in seed.
SampledAcceptance sampled_acceptance(const VerifierInstance &v,
                                     const StateVector &witness, long long shots,
                                     std::uint64_t seed);

} // namespace oracle
} // namespace qamp
