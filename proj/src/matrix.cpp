#include "qamp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qamp {

namespace {

std::string dim_string(const Matrix &m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw ValidationError("matrix entry count " + std::to_string(data_.size()) +
                              " does not equal rows*cols = " +
                              std::to_string(rows_ * cols_));
    }
}

Matrix Matrix::identity(std::size_t dim) {
    Matrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const std::vector<double> &entries) {
    Matrix m(entries.size(), entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

Matrix Matrix::operator*(const Matrix &rhs) const {
    if (cols_ != rhs.rows_) {
        throw ValidationError("matrix product shape mismatch: " + dim_string(*this) +
                              " * " + dim_string(rhs));
    }
    Matrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const cplx a = (*this)(r, k);
            if (a == cplx{0.0, 0.0}) continue;
            for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
        }
    }
    return out;
}

Matrix Matrix::operator+(const Matrix &rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw ValidationError("matrix sum shape mismatch");
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
    return out;
}

Matrix Matrix::operator-(const Matrix &rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw ValidationError("matrix difference shape mismatch");
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
    return out;
}

Matrix Matrix::scaled(cplx factor) const {
    Matrix out = *this;
    for (auto &e : out.data_) e *= factor;
    return out;
}

Matrix Matrix::power(unsigned exponent) const {
    if (!square()) throw ValidationError("matrix power requires a square matrix");
    Matrix result = Matrix::identity(rows_);
    Matrix base = *this;
    unsigned e = exponent;
    while (e > 0) {
        if (e & 1u) result = result * base;
        base = base * base;
        e >>= 1u;
    }
    return result;
}

double Matrix::frobenius_norm() const {
    double acc = 0.0;
    for (const auto &e : data_) acc += std::norm(e);
    return std::sqrt(acc);
}

double Matrix::unitarity_residual() const {
    if (!square()) return std::numeric_limits<double>::infinity();
    return (adjoint() * (*this) - Matrix::identity(rows_)).frobenius_norm();
}

double Matrix::hermiticity_residual() const {
    if (!square()) return std::numeric_limits<double>::infinity();
    return ((*this) - adjoint()).frobenius_norm();
}

double Matrix::projection_residual() const {
    if (!square()) return std::numeric_limits<double>::infinity();
    const double idem = ((*this) * (*this) - (*this)).frobenius_norm();
    return std::max(idem, hermiticity_residual());
}

bool Matrix::is_unitary(const Tolerances &tol) const {
    return square() && unitarity_residual() <= tol.unitarity;
}

bool Matrix::is_hermitian(const Tolerances &tol) const {
    return square() && hermiticity_residual() <= tol.hermiticity;
}

bool Matrix::is_projection(const Tolerances &tol) const {
    return square() && projection_residual() <= tol.projection;
}

Matrix tensor_product(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const cplx f = a(ar, ac);
            if (f == cplx{0.0, 0.0}) continue;
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = f * b(br, bc);
        }
    return out;
}

Eigensystem hermitian_eigensystem(const Matrix &m, const Tolerances &tol) {
    if (!m.square()) {
        throw ValidationError("eigensystem requires a square matrix, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    const double herm = m.hermiticity_residual();
    if (herm > tol.hermiticity) {
        std::ostringstream os;
        os << "eigensystem requires a Hermitian matrix; ||A - A'||_F = " << herm
           << " exceeds " << tol.hermiticity;
        throw ValidationError(os.str());
    }

    const std::size_t n = m.rows();
    Matrix a = m;
    // Symmetrise exactly so rounding noise cannot bias the rotations.
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c) {
            const cplx avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
            a(r, c) = avg;
            a(c, r) = std::conj(avg);
        }
    Matrix vecs = Matrix::identity(n);

    const int max_sweeps = 128;
    const double off_target = 1e-14 * std::max(1.0, a.frobenius_norm());
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        off = std::sqrt(2.0 * off);
        if (off <= off_target) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double g = std::abs(apq);
                if (g <= 1e-300) continue;
                // Phase so the pivot becomes real, then a real Jacobi rotation.
                const cplx phase = apq / g;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * g);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Column rotation J on (p, q): col_p' = c*col_p - s*conj(phase)... derived
                // from zeroing a(p,q) in J' A J with J = [[c, s*phase],[-s*conj(phase), c]].
                const cplx jp = s * phase;
                for (std::size_t r = 0; r < n; ++r) {
                    const cplx arp = a(r, p);
                    const cplx arq = a(r, q);
                    a(r, p) = c * arp - std::conj(jp) * arq;
                    a(r, q) = jp * arp + c * arq;
                }
                for (std::size_t cc = 0; cc < n; ++cc) {
                    const cplx apc = a(p, cc);
                    const cplx aqc = a(q, cc);
                    a(p, cc) = c * apc - jp * aqc;
                    a(q, cc) = std::conj(jp) * apc + c * aqc;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const cplx vrp = vecs(r, p);
                    const cplx vrq = vecs(r, q);
                    vecs(r, p) = c * vrp - std::conj(jp) * vrq;
                    vecs(r, q) = jp * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });

    Eigensystem out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = diag[order[j]];
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, j) = vecs(r, order[j]);
    }

    // Re-orthonormalise inside degenerate clusters.
    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n &&
               out.eigenvalues[stop] - out.eigenvalues[stop - 1] <= tol.degeneracy_cluster)
            ++stop;
        for (std::size_t j = start; j < stop; ++j) {
            for (std::size_t k = start; k < j; ++k) {
                cplx dot{0.0, 0.0};
                for (std::size_t r = 0; r < n; ++r)
                    dot += std::conj(out.eigenvectors(r, k)) * out.eigenvectors(r, j);
                for (std::size_t r = 0; r < n; ++r)
                    out.eigenvectors(r, j) -= dot * out.eigenvectors(r, k);
            }
            double nrm = 0.0;
            for (std::size_t r = 0; r < n; ++r) nrm += std::norm(out.eigenvectors(r, j));
            nrm = std::sqrt(nrm);
            if (nrm > 0.0)
                for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, j) /= nrm;
        }
        start = stop;
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over the pair; cheap deterministic sub-streams.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() {
    // splitmix64; sequential state walk keeps results platform independent.
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

cplx Rng::gaussian_cplx() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
}

Matrix haar_unitary(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw ValidationError("haar_unitary requires dim >= 1");
    Rng rng(mix_seed(seed, 0x48a5a3ULL));
    Matrix g(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) g(r, c) = rng.gaussian_cplx();

    // Modified Gram-Schmidt with positive-real diagonal renders the columns
    // Haar distributed.
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t k = 0; k < c; ++k) {
            cplx dot{0.0, 0.0};
            for (std::size_t r = 0; r < dim; ++r) dot += std::conj(g(r, k)) * g(r, c);
            for (std::size_t r = 0; r < dim; ++r) g(r, c) -= dot * g(r, k);
        }
        double nrm = 0.0;
        for (std::size_t r = 0; r < dim; ++r) nrm += std::norm(g(r, c));
        nrm = std::sqrt(nrm);
        for (std::size_t r = 0; r < dim; ++r) g(r, c) /= nrm;
    }
    return g;
}

} // namespace qamp
