#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qamp/matrix.hpp"

namespace qamp {

// Ordered collection of named registers. The register declared first occupies
// the least-significant qubits of the amplitude index, and register contents
// read little-endian: value(R) = (index >> offset(R)) & (2^width - 1).
class RegisterLayout {
  public:
    struct Register {
        std::string name;
        int width = 0;
    };

    RegisterLayout() = default;
    explicit RegisterLayout(std::vector<Register> regs);

    int total_qubits() const { return total_qubits_; }
    std::uint64_t dimension() const { return std::uint64_t{1} << total_qubits_; }
    int size() const { return static_cast<int>(regs_.size()); }
    const Register &at(int i) const { return regs_[static_cast<std::size_t>(i)]; }
    const std::vector<Register> &registers() const { return regs_; }

    bool has(const std::string &name) const;
    int index_of(const std::string &name) const; // ValidationError if missing
    int offset_of(const std::string &name) const;
    int width_of(const std::string &name) const;
    std::vector<int> qubits_of(const std::string &name) const;

    // Layout with one register appended at the most-significant end.
    RegisterLayout extended(const std::string &name, int width) const;
    // A name not yet present, derived from `base` ("c", "c2", "c3", ...).
    std::string unique_name(const std::string &base) const;

    bool operator==(const RegisterLayout &other) const;
    bool operator!=(const RegisterLayout &other) const { return !(*this == other); }

  private:
    std::vector<Register> regs_;
    int total_qubits_ = 0;
};

// Declarative projection, diagonal in the computational basis: a boolean
// combination of per-register conditions evaluated on basis indices.
class ProjectionSpec {
  public:
    ProjectionSpec(); // matches everything

    static ProjectionSpec always();
    static ProjectionSpec never();
    static ProjectionSpec qubit_is(int qubit, int value);
    static ProjectionSpec reg_equals(std::string reg, std::uint64_t value);
    static ProjectionSpec reg_at_least(std::string reg, std::uint64_t value);
    static ProjectionSpec reg_greater(std::string reg, std::uint64_t value);
    // value(a) > value(b); both registers must have equal width.
    static ProjectionSpec reg_exceeds_reg(std::string a, std::string b);
    // Signed phase fraction window: accepts y with min(y, 2^w - y) < num * 2^(w - log_den),
    // i.e. |y/2^w| < num/2^log_den on the circle. Strict inequality.
    static ProjectionSpec phase_window(std::string reg, std::uint64_t numerator,
                                       int log_denominator);

    friend ProjectionSpec operator&(const ProjectionSpec &a, const ProjectionSpec &b);
    friend ProjectionSpec operator|(const ProjectionSpec &a, const ProjectionSpec &b);
    friend ProjectionSpec operator~(const ProjectionSpec &a);

    bool matches(const RegisterLayout &layout, std::uint64_t index) const;
    void validate(const RegisterLayout &layout) const;
    // Bitmask over qubit indices the predicate may read.
    std::uint64_t support_mask(const RegisterLayout &layout) const;
    // 0/1 bitmap over all basis indices.
    std::vector<std::uint8_t> build_mask(const RegisterLayout &layout) const;
    Matrix to_projector(const RegisterLayout &layout) const;

    // Stable identity for mask caching.
    const void *node_id() const { return node_.get(); }

    struct Node;

  private:
    explicit ProjectionSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Normalised statevector over a layout. Projection residuals are the one
// sanctioned sub-normalised variant; they carry their squared norm as
// probability mass and are flagged.
class StateVector {
  public:
    StateVector() = default;

    static StateVector zero_state(RegisterLayout layout);
    static StateVector basis_state(RegisterLayout layout, std::uint64_t index);
    static StateVector from_amplitudes(RegisterLayout layout, std::vector<cplx> amps,
                                       const Tolerances &tol = default_tolerances());
    static StateVector subnormalized(RegisterLayout layout, std::vector<cplx> amps);

    const RegisterLayout &layout() const { return layout_; }
    const std::vector<cplx> &amplitudes() const { return amps_; }
    std::vector<cplx> &mutable_amplitudes() { return amps_; }
    bool is_subnormalized() const { return subnormalized_; }

    double norm() const;
    double probability_mass() const; // squared norm

  private:
    RegisterLayout layout_;
    std::vector<cplx> amps_;
    bool subnormalized_ = false;
};

// In-place kernels. All validation lives in the public wrappers below; the
// kernels assume consistent arguments.
namespace engine {

void apply_matrix(const RegisterLayout &layout, std::vector<cplx> &amps,
                  const Matrix &op, const std::vector<int> &target_qubits,
                  bool adjoint);
void apply_hadamard(const RegisterLayout &layout, std::vector<cplx> &amps, int qubit);
void apply_cnot(const RegisterLayout &layout, std::vector<cplx> &amps,
                int control_qubit, int target_qubit);
void apply_controlled_phase(const RegisterLayout &layout, std::vector<cplx> &amps,
                            int qubit_a, int qubit_b, double angle);
void apply_swap(const RegisterLayout &layout, std::vector<cplx> &amps, int qubit_a,
                int qubit_b);
// amps[i] *= -1 wherever mask[i] != 0.
void apply_phase_flip(std::vector<cplx> &amps, const std::vector<std::uint8_t> &mask);
// X on `qubit` where mask (ignoring `qubit`) holds; mask may be null for plain X.
void apply_x(const RegisterLayout &layout, std::vector<cplx> &amps, int qubit,
             const std::vector<std::uint8_t> *control_mask);
// |v> -> |(v + direction) mod 2^w> on the register slice, restricted to the
// control mask (which must not read the counter qubits). `scratch` is reused.
void increment_register(const RegisterLayout &layout, std::vector<cplx> &amps,
                        int offset, int width, int direction,
                        const std::vector<std::uint8_t> *control_mask,
                        std::vector<cplx> &scratch);
// Exact Fourier transform on a register slice: forward maps |x> to
// sum_y exp(2*pi*i*x*y/2^w) |y> / 2^(w/2).
void apply_fourier(const RegisterLayout &layout, std::vector<cplx> &amps, int offset,
                   int width, bool inverse);

} // namespace engine

// Public operations; each validates and returns a fresh state.
StateVector apply_unitary(const StateVector &state, const Matrix &op,
                          const std::vector<std::string> &target_registers,
                          const Tolerances &tol = default_tolerances());
StateVector apply_controlled(const StateVector &state, const ProjectionSpec &control,
                             const Matrix &op,
                             const std::vector<std::string> &target_registers,
                             const Tolerances &tol = default_tolerances());
StateVector increment_mod(const StateVector &state, const std::string &counter);
StateVector apply_phase_flip(const StateVector &state, const ProjectionSpec &spec);

struct ProjectionResult {
    StateVector residual; // sub-normalised
    double probability = 0.0;
};
ProjectionResult project(const StateVector &state, const ProjectionSpec &spec);

// Dense matrix of the unitary realised by `control ? op : identity`; used by
// the dense-agreement oracle tests.
Matrix controlled_op_dense(const RegisterLayout &layout, const ProjectionSpec &control,
                           const Matrix &op,
                           const std::vector<std::string> &target_registers);

} // namespace qamp
