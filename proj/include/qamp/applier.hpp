#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "qamp/registers.hpp"

namespace qamp {

// Counts applications of the underlying base unitary and its inverse during a
// simulation run.
struct CallTally {
    long long calls_v = 0;
    long long calls_v_dagger = 0;
};

// Mutable working state for one end-to-end application of a composed unitary.
// Masks compiled from projection specs are cached per run; spec nodes are
// immutable and shared, so the node pointer is a stable key.
class SimContext {
  public:
    SimContext(const RegisterLayout &layout, std::vector<cplx> amps,
               CallTally *tally = nullptr)
        : layout_(layout), amps_(std::move(amps)), tally_(tally) {}

    const RegisterLayout &layout() const { return layout_; }
    std::vector<cplx> &amps() { return amps_; }
    const std::vector<cplx> &amps() const { return amps_; }
    std::vector<cplx> &scratch() { return scratch_; }
    CallTally *tally() { return tally_; }

    const std::vector<std::uint8_t> &mask(const ProjectionSpec &spec);

    std::vector<cplx> take_amps() { return std::move(amps_); }

  private:
    const RegisterLayout &layout_;
    std::vector<cplx> amps_;
    std::vector<cplx> scratch_;
    CallTally *tally_;
    std::unordered_map<const void *, std::vector<std::uint8_t>> mask_cache_;
};

// A unitary program step. Appliers are immutable and shared between composed
// verifier instances; running one mutates only the SimContext.
class Applier {
  public:
    virtual ~Applier() = default;
    virtual void run(SimContext &sim, bool inverse) const = 0;
};

using ApplierPtr = std::shared_ptr<const Applier>;

// The bare verifier unitary; the only step that tallies calls.
ApplierPtr make_base_unitary(Matrix u, std::vector<std::string> target_registers);
// Steps in order; inverse runs them reversed, each inverted.
ApplierPtr make_sequence(std::vector<ApplierPtr> steps);
// Runs the child with the direction flipped.
ApplierPtr make_adjoint(ApplierPtr child);
ApplierPtr make_repeat(ApplierPtr child, long long times);
// Hadamard on each listed qubit (self-inverse).
ApplierPtr make_hadamards(std::vector<int> qubits);
// Phase flip -1 on the spec subspace (self-inverse).
ApplierPtr make_phase_flip(ProjectionSpec spec);
// X on `qubit` controlled on `control` (which must not read `qubit`).
ApplierPtr make_controlled_x(ProjectionSpec control, int qubit);
// counter += 1 (mod 2^w) where `control` holds; inverse decrements.
ApplierPtr make_controlled_increment(ProjectionSpec control, std::string counter);
// CNOT fan-out from each qubit of `src` onto the matching qubit of `dst`.
ApplierPtr make_cnot_pairs(std::string src, std::string dst);
// Inverse Fourier transform on a register (forward direction of this step);
// running it inverted applies the forward transform.
ApplierPtr make_fourier_adjoint(std::string reg);

// Convenience: run an applier over explicit amplitudes.
std::vector<cplx> run_applier(const Applier &a, const RegisterLayout &layout,
                              std::vector<cplx> amps, bool inverse,
                              CallTally *tally = nullptr);

} // namespace qamp
