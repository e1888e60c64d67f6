#pragma once

#include "qamp/verifier.hpp"

namespace qamp {

// Each combinator consumes an instance and returns a new one over an extended
// layout, with the composed unitary, the new initial/accepting projections and
// accumulated resource accounting.

// 2N coherent accept/restore checks sharing one counter; accepts when the
// counter stays zero. Lifted eigenvalue map: lambda -> lambda^(2N).
VerifierInstance and_type_repetition(const VerifierInstance &v, long long n);

// Counter incremented on accept checks instead; accepts when the counter is
// nonzero. Lifted eigenvalue map: lambda -> 1 - (1 - lambda)^(2N).
VerifierInstance or_type_repetition(const VerifierInstance &v, long long n);

// Phase estimation of the walk operator (2 U' Pi U - I)(2 Delta - I) with an
// l-bit window threshold t and failure budget eps; accepts estimates strictly
// inside (-t, t). Adds l + ceil(log2(2 + 1/(2 eps))) phase qubits.
VerifierInstance one_shot_phase_estimation(const VerifierInstance &v, double t, int l,
                                           double eps);

// N check rounds recording outcomes in fresh flag qubits, then counting
// agreements of consecutive flags; accepts when at least `threshold` of the 2N
// comparisons agree.
VerifierInstance marriott_watrous(const VerifierInstance &v, long long n,
                                  long long threshold);

// Coin-and-comparison shift of the acceptance probability:
// lambda -> 1/2 + (lambda - k/2^l)/2.
VerifierInstance additive_adjustment(const VerifierInstance &v, int l,
                                     std::uint64_t k);

// Apply, phase-flip accepting states, undo; accept outside the initial
// subspace. Lifted eigenvalue map: lambda -> 4 lambda (1 - lambda).
VerifierInstance reflection(const VerifierInstance &v);

// Closed-form (or exactly reduced) acceptance maps on lifted eigenstates.
namespace laws {

double and_repetition(double lam, long long n);
double or_repetition(double lam, long long n);
double additive_adjustment(double lam, int l, std::uint64_t k);
double reflection(double lam);
// Binomial agreement tail P[Bin(2N, lambda) >= threshold].
double marriott_watrous(double lam, long long n, long long threshold);
// Exact reduction: simulate the procedure on a minimal single-qubit instance
// with the same eigenvalue. Depends on lambda only.
double phase_estimation(double lam, double t, int l, double eps);

} // namespace laws

// Integer ceil(log2(x)) for x >= 1.
int ceil_log2_u64(std::uint64_t x);
// Smallest k >= 0 with 2^k >= x, tolerant of floating-point representation of x.
int ceil_log2_double(double x);
// Phase-register width for precision l and failure budget eps.
int phase_register_width(int l, double eps);

// Dense matrix of the composed unitary (capped; for cross-checks).
Matrix dense_unitary_of(const VerifierInstance &v,
                        std::uint64_t dim_cap = std::uint64_t{1} << 10);

} // namespace qamp
