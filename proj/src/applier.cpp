#include "qamp/applier.hpp"

#include <algorithm>

namespace qamp {

const std::vector<std::uint8_t> &SimContext::mask(const ProjectionSpec &spec) {
    auto it = mask_cache_.find(spec.node_id());
    if (it != mask_cache_.end()) return it->second;
    auto [pos, _] = mask_cache_.emplace(spec.node_id(), spec.build_mask(layout_));
    return pos->second;
}

namespace {

class BaseUnitaryApplier final : public Applier {
  public:
    BaseUnitaryApplier(Matrix u, std::vector<std::string> regs)
        : u_(std::move(u)), regs_(std::move(regs)) {}

    void run(SimContext &sim, bool inverse) const override {
        std::vector<int> qubits;
        for (const auto &r : regs_) {
            const auto q = sim.layout().qubits_of(r);
            qubits.insert(qubits.end(), q.begin(), q.end());
        }
        engine::apply_matrix(sim.layout(), sim.amps(), u_, qubits, inverse);
        if (auto *t = sim.tally()) {
            if (inverse)
                ++t->calls_v_dagger;
            else
                ++t->calls_v;
        }
    }

  private:
    Matrix u_;
    std::vector<std::string> regs_;
};

class SequenceApplier final : public Applier {
  public:
    explicit SequenceApplier(std::vector<ApplierPtr> steps) : steps_(std::move(steps)) {}

    void run(SimContext &sim, bool inverse) const override {
        if (!inverse) {
            for (const auto &s : steps_) s->run(sim, false);
        } else {
            for (auto it = steps_.rbegin(); it != steps_.rend(); ++it)
                (*it)->run(sim, true);
        }
    }

  private:
    std::vector<ApplierPtr> steps_;
};

class AdjointApplier final : public Applier {
  public:
    explicit AdjointApplier(ApplierPtr child) : child_(std::move(child)) {}
    void run(SimContext &sim, bool inverse) const override {
        child_->run(sim, !inverse);
    }

  private:
    ApplierPtr child_;
};

class RepeatApplier final : public Applier {
  public:
    RepeatApplier(ApplierPtr child, long long times)
        : child_(std::move(child)), times_(times) {}
    void run(SimContext &sim, bool inverse) const override {
        for (long long i = 0; i < times_; ++i) child_->run(sim, inverse);
    }

  private:
    ApplierPtr child_;
    long long times_;
};

class HadamardsApplier final : public Applier {
  public:
    explicit HadamardsApplier(std::vector<int> qubits) : qubits_(std::move(qubits)) {}
    void run(SimContext &sim, bool) const override {
        for (int q : qubits_) engine::apply_hadamard(sim.layout(), sim.amps(), q);
    }

  private:
    std::vector<int> qubits_;
};

class PhaseFlipApplier final : public Applier {
  public:
    explicit PhaseFlipApplier(ProjectionSpec spec) : spec_(std::move(spec)) {}
    void run(SimContext &sim, bool) const override {
        engine::apply_phase_flip(sim.amps(), sim.mask(spec_));
    }

  private:
    ProjectionSpec spec_;
};

class ControlledXApplier final : public Applier {
  public:
    ControlledXApplier(ProjectionSpec control, int qubit)
        : control_(std::move(control)), qubit_(qubit) {}
    void run(SimContext &sim, bool) const override {
        engine::apply_x(sim.layout(), sim.amps(), qubit_, &sim.mask(control_));
    }

  private:
    ProjectionSpec control_;
    int qubit_;
};

class ControlledIncrementApplier final : public Applier {
  public:
    ControlledIncrementApplier(ProjectionSpec control, std::string counter)
        : control_(std::move(control)), counter_(std::move(counter)) {}
    void run(SimContext &sim, bool inverse) const override {
        const int off = sim.layout().offset_of(counter_);
        const int w = sim.layout().width_of(counter_);
        engine::increment_register(sim.layout(), sim.amps(), off, w, inverse ? -1 : 1,
                                   &sim.mask(control_), sim.scratch());
    }

  private:
    ProjectionSpec control_;
    std::string counter_;
};

class CnotPairsApplier final : public Applier {
  public:
    CnotPairsApplier(std::string src, std::string dst)
        : src_(std::move(src)), dst_(std::move(dst)) {}
    void run(SimContext &sim, bool) const override {
        const int so = sim.layout().offset_of(src_);
        const int do_ = sim.layout().offset_of(dst_);
        const int w = sim.layout().width_of(src_);
        for (int i = 0; i < w; ++i)
            engine::apply_cnot(sim.layout(), sim.amps(), so + i, do_ + i);
    }

  private:
    std::string src_;
    std::string dst_;
};

class FourierAdjointApplier final : public Applier {
  public:
    explicit FourierAdjointApplier(std::string reg) : reg_(std::move(reg)) {}
    void run(SimContext &sim, bool inverse) const override {
        const int off = sim.layout().offset_of(reg_);
        const int w = sim.layout().width_of(reg_);
        engine::apply_fourier(sim.layout(), sim.amps(), off, w, !inverse);
    }

  private:
    std::string reg_;
};

} // namespace

ApplierPtr make_base_unitary(Matrix u, std::vector<std::string> target_registers) {
    return std::make_shared<BaseUnitaryApplier>(std::move(u), std::move(target_registers));
}

ApplierPtr make_sequence(std::vector<ApplierPtr> steps) {
    return std::make_shared<SequenceApplier>(std::move(steps));
}

ApplierPtr make_adjoint(ApplierPtr child) {
    return std::make_shared<AdjointApplier>(std::move(child));
}

ApplierPtr make_repeat(ApplierPtr child, long long times) {
    return std::make_shared<RepeatApplier>(std::move(child), times);
}

ApplierPtr make_hadamards(std::vector<int> qubits) {
    return std::make_shared<HadamardsApplier>(std::move(qubits));
}

ApplierPtr make_phase_flip(ProjectionSpec spec) {
    return std::make_shared<PhaseFlipApplier>(std::move(spec));
}

ApplierPtr make_controlled_x(ProjectionSpec control, int qubit) {
    return std::make_shared<ControlledXApplier>(std::move(control), qubit);
}

ApplierPtr make_controlled_increment(ProjectionSpec control, std::string counter) {
    return std::make_shared<ControlledIncrementApplier>(std::move(control),
                                                        std::move(counter));
}

ApplierPtr make_cnot_pairs(std::string src, std::string dst) {
    return std::make_shared<CnotPairsApplier>(std::move(src), std::move(dst));
}

ApplierPtr make_fourier_adjoint(std::string reg) {
    return std::make_shared<FourierAdjointApplier>(std::move(reg));
}

std::vector<cplx> run_applier(const Applier &a, const RegisterLayout &layout,
                              std::vector<cplx> amps, bool inverse, CallTally *tally) {
    SimContext sim(layout, std::move(amps), tally);
    a.run(sim, inverse);
    return sim.take_amps();
}

} // namespace qamp
