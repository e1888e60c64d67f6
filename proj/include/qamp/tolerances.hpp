#pragma once

namespace qamp {

// Central numeric tolerances. All residual checks in the library read their
// thresholds from here so that a single record documents every default.
struct Tolerances {
    double unitarity = 1e-10;       // ||U'U - I||_F
    double projection = 1e-10;      // ||P^2 - P||_F and ||P - P'||_F
    double hermiticity = 1e-10;     // ||A - A'||_F
    double eigen_residual = 1e-9;   // ||A v - lambda v|| per column
    double orthonormality = 1e-10;  // pairwise column inner products
    double degeneracy_cluster = 1e-10; // eigenvalues closer than this share a cluster
    double state_norm = 1e-9;       // | ||psi|| - 1 |
    double norm_preservation = 1e-10;
    double probability_sum = 1e-10; // prob(P) + prob(I-P) vs 1
    double eigenvalue_clamp = 1e-10; // slack before clamping spectra into [0,1]
    double law_match = 1e-9;        // combinator vs closed form / oracle
};

inline const Tolerances &default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

} // namespace qamp
