#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qamp/errors.hpp"
#include "qamp/tolerances.hpp"

namespace qamp {

using cplx = std::complex<double>;

// Dense complex matrix in row-major order. Sized for the small operators this
// library manipulates directly (verifier unitaries, restricted Hermitian
// blocks, dense cross-checks); the register engine handles anything larger
// matrix-free.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static Matrix identity(std::size_t dim);
    static Matrix diagonal(const std::vector<double> &entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }
    const std::vector<cplx> &entries() const { return data_; }

    Matrix adjoint() const;
    Matrix operator*(const Matrix &rhs) const;
    Matrix operator+(const Matrix &rhs) const;
    Matrix operator-(const Matrix &rhs) const;
    Matrix scaled(cplx factor) const;
    Matrix power(unsigned exponent) const; // square matrices only

    double frobenius_norm() const;
    double unitarity_residual() const;   // ||U'U - I||_F
    double hermiticity_residual() const; // ||A - A'||_F
    double projection_residual() const;  // max(||P^2-P||_F, ||P-P'||_F)

    bool is_unitary(const Tolerances &tol = default_tolerances()) const;
    bool is_hermitian(const Tolerances &tol = default_tolerances()) const;
    bool is_projection(const Tolerances &tol = default_tolerances()) const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

// Standard Kronecker product; the right factor occupies the fast (least
// significant) index block.
Matrix tensor_product(const Matrix &a, const Matrix &b);

struct Eigensystem {
    std::vector<double> eigenvalues; // ascending
    Matrix eigenvectors;             // orthonormal columns, matching order
};

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
// Eigenvalues within the degeneracy tolerance are treated as a cluster and
// their eigenvectors re-orthonormalised.
Eigensystem hermitian_eigensystem(const Matrix &m,
                                  const Tolerances &tol = default_tolerances());

// Haar-distributed random unitary: complex-Gaussian matrix orthonormalised
// column by column with a positive-real diagonal. Deterministic in (dim, seed).
Matrix haar_unitary(std::size_t dim, std::uint64_t seed);

// Small deterministic PRNG helpers shared by the instance generators.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform();    // [0, 1)
    double gaussian();   // standard normal, Box-Muller
    cplx gaussian_cplx();

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qamp
