#include "qamp/pipelines.hpp"

#include <algorithm>
#include <cmath>

namespace qamp {

namespace {

double stage_t(const ScheduleStage &st) {
    return static_cast<double>(st.ints.at("t_numerator")) /
           static_cast<double>(1ULL << st.ints.at("l"));
}

VerifierInstance execute_linear_stage(VerifierInstance v, const ScheduleStage &st) {
    if (st.procedure == "phase-estimation")
        return one_shot_phase_estimation(v, stage_t(st),
                                         static_cast<int>(st.ints.at("l")),
                                         st.reals.at("eps"));
    if (st.procedure == "and-repetition")
        return and_type_repetition(v, st.ints.at("N"));
    if (st.procedure == "or-repetition")
        return or_type_repetition(v, st.ints.at("N"));
    if (st.procedure == "mw-amplification")
        return marriott_watrous(v, st.ints.at("N"), st.ints.at("threshold"));
    throw ValidationError("stage '" + st.procedure +
                          "' does not belong to a linear construction");
}

const ScheduleStage *find_stage(const ParameterSchedule &sched,
                                const std::string &procedure) {
    for (const auto &st : sched.stages)
        if (st.procedure == procedure) return &st;
    return nullptr;
}

} // namespace

VerifierInstance simple_pe_pipeline(const VerifierInstance &v,
                                    const PipelineConfig &cfg) {
    if (cfg.construction != "simple-pe")
        throw ValidationError("config names construction '" + cfg.construction + "'");
    const ParameterSchedule sched = parameter_schedule(cfg);
    VerifierInstance out = v;
    for (const auto &st : sched.stages) out = execute_linear_stage(std::move(out), st);
    return out;
}

VerifierInstance hybrid_pipeline(const VerifierInstance &v, const PipelineConfig &cfg) {
    if (cfg.construction != "hybrid")
        throw ValidationError("config names construction '" + cfg.construction + "'");
    const ParameterSchedule sched = parameter_schedule(cfg);
    VerifierInstance out = v;
    for (const auto &st : sched.stages) out = execute_linear_stage(std::move(out), st);
    return out;
}

RandomGuessResult random_guess_pipeline(const VerifierInstance &v,
                                        const PipelineConfig &cfg,
                                        std::optional<std::uint64_t> fixed_k) {
    if (cfg.construction != "random-guess")
        throw ValidationError("config names construction '" + cfg.construction + "'");
    RandomGuessResult rg;
    rg.schedule = parameter_schedule(cfg);

    const ScheduleStage *adjust = find_stage(rg.schedule, "guess-adjust-reflect");
    const ScheduleStage *and_st = find_stage(rg.schedule, "and-repetition");
    const ScheduleStage *coherent_st = find_stage(rg.schedule, "coherent-guess");
    const ScheduleStage *or_st = find_stage(rg.schedule, "or-repetition");

    rg.guess_bits = static_cast<int>(adjust->ints.at("l"));
    rg.guess_count = std::uint64_t{1} << rg.guess_bits;
    rg.min_guess = static_cast<std::uint64_t>(adjust->ints.at("min_guess"));
    if (fixed_k && (*fixed_k < 1 || *fixed_k > rg.guess_count))
        throw ValidationError("guess k = " + std::to_string(*fixed_k) +
                              " out of range [1, " + std::to_string(rg.guess_count) +
                              "]");

    for (std::uint64_t k = 1; k <= rg.guess_count; ++k) {
        if (fixed_k && k != *fixed_k) continue;
        VerifierInstance inst = reflection(additive_adjustment(v, rg.guess_bits, k));
        if (k < rg.min_guess) inst.pi = ProjectionSpec::never(); // reject outright
        if (and_st) inst = and_type_repetition(inst, and_st->ints.at("N"));
        rg.per_guess.push_back(std::move(inst));
    }

    if (coherent_st && !fixed_k) {
        rg.coherent =
            build_coherent_guess(v, rg.guess_bits, rg.min_guess, and_st->ints.at("N"));
        if (or_st) {
            rg.final_or = or_type_repetition(rg.coherent, or_st->ints.at("N"));
            rg.has_final_or = true;
        }
    }
    return rg;
}

VerifierInstance build_coherent_guess(const VerifierInstance &v, int guess_bits,
                                      std::uint64_t min_guess, long long n_and) {
    // Fresh-register uniform guess: every guess-dependent operation is
    // conditioned on the guess register, whose qubits are copied onto a mirror
    // register so branches stay orthogonal.
    const int l = guess_bits;
    if (l < 1) throw ValidationError("guess register needs at least one qubit");
    if (n_and < 1) throw ValidationError("repetition count must be >= 1");
    if (min_guess > (std::uint64_t{1} << l))
        throw ValidationError("guess cutoff exceeds the guess range");
    const int ctr_bits = ceil_log2_u64(static_cast<std::uint64_t>(2 * n_and + 1));

    RegisterLayout layout = v.layout;
    const std::string coin = layout.unique_name("coin");
    layout = layout.extended(coin, 1);
    const std::string cmp = layout.unique_name("cmp");
    layout = layout.extended(cmp, l);
    const std::string guess = layout.unique_name("guess");
    layout = layout.extended(guess, l);
    const std::string mirror = layout.unique_name("mirror");
    layout = layout.extended(mirror, l);
    const std::string ctr = layout.unique_name("ctr");
    layout = layout.extended(ctr, ctr_bits);

    std::vector<int> adj_qubits = {layout.offset_of(coin)};
    for (int q : layout.qubits_of(cmp)) adj_qubits.push_back(q);
    ApplierPtr adjusted = make_sequence({make_hadamards(adj_qubits), v.applier});

    ProjectionSpec coin0 = ProjectionSpec::reg_equals(coin, 0);
    ProjectionSpec delta_adj = v.delta & coin0 & ProjectionSpec::reg_equals(cmp, 0);
    // Per guess k = g+1 the accept rule compares the register read as 1..2^l
    // against k, i.e. raw(cmp) >= k, i.e. raw(cmp) > raw(guess).
    ProjectionSpec pi_adj =
        (coin0 & v.pi) | (ProjectionSpec::reg_equals(coin, 1) &
                          ProjectionSpec::reg_exceeds_reg(cmp, guess));
    ApplierPtr reflected = make_sequence({
        adjusted,
        make_phase_flip(pi_adj),
        make_adjoint(adjusted),
    });
    // Guesses below the cutoff reject outright: their accepting projection is
    // empty, which the guess-register condition encodes.
    ProjectionSpec pi_mild =
        ~delta_adj & ProjectionSpec::reg_at_least(
                         guess, min_guess == 0 ? 0 : min_guess - 1);
    ApplierPtr and_step = make_sequence({
        reflected,
        make_controlled_increment(~pi_mild, ctr),
        make_adjoint(reflected),
        make_controlled_increment(~delta_adj, ctr),
    });
    ApplierPtr applier = make_sequence({
        make_hadamards(layout.qubits_of(guess)),
        make_cnot_pairs(guess, mirror),
        make_repeat(std::move(and_step), n_and),
    });

    VerifierInstance coh;
    coh.layout = layout;
    coh.applier = std::move(applier);
    coh.delta = delta_adj & ProjectionSpec::reg_equals(guess, 0) &
                ProjectionSpec::reg_equals(mirror, 0) &
                ProjectionSpec::reg_equals(ctr, 0);
    coh.pi = ProjectionSpec::reg_equals(ctr, 0);
    coh.witness_register = v.witness_register;
    coh.resources = v.resources;

    const auto [a, b] = v.resources.application_cost();
    StageResources adj_row;
    adj_row.stage = "guess-adjust-reflect";
    adj_row.delta_qubits = l + 1;
    adj_row.inner_calls_v = 1;
    adj_row.inner_calls_v_dagger = 1;
    adj_row.calls_v = a + b;
    adj_row.calls_v_dagger = a + b;
    adj_row.extras["l"] = l;
    adj_row.extras["min_guess"] = static_cast<long long>(min_guess);
    StageResources and_row;
    and_row.stage = "and-repetition(N=" + std::to_string(n_and) + ")";
    and_row.delta_qubits = ctr_bits;
    and_row.inner_calls_v = n_and;
    and_row.inner_calls_v_dagger = n_and;
    and_row.calls_v = 2 * n_and * (a + b);
    and_row.calls_v_dagger = and_row.calls_v;
    and_row.extras["N"] = n_and;
    StageResources coh_row;
    coh_row.stage = "coherent-guess";
    coh_row.delta_qubits = 2 * l;
    coh_row.inner_calls_v = 1;
    coh_row.inner_calls_v_dagger = 0;
    coh_row.calls_v = and_row.calls_v;
    coh_row.calls_v_dagger = and_row.calls_v_dagger;
    coh_row.extras["guess_count"] = 1LL << l;
    for (auto &row : {adj_row, and_row, coh_row}) {
        coh.resources.extra_qubits += row.delta_qubits;
        coh.resources.calls_v = row.calls_v;
        coh.resources.calls_v_dagger = row.calls_v_dagger;
        coh.resources.stages.push_back(row);
    }
    coh.delta.validate(coh.layout);
    coh.pi.validate(coh.layout);
    return coh;
}

double chained_acceptance(const ParameterSchedule &schedule, double lam) {
    double value = lam;
    std::vector<double> per_guess; // active between the guess stages
    bool guess_mode = false;

    for (std::size_t i = 0; i < schedule.stages.size(); ++i) {
        const auto &st = schedule.stages[i];
        if (st.procedure == "phase-estimation") {
            value = laws::phase_estimation(value, stage_t(st),
                                           static_cast<int>(st.ints.at("l")),
                                           st.reals.at("eps"));
        } else if (st.procedure == "mw-amplification") {
            value = laws::marriott_watrous(value, st.ints.at("N"),
                                           st.ints.at("threshold"));
        } else if (st.procedure == "guess-adjust-reflect") {
            const int l = static_cast<int>(st.ints.at("l"));
            const auto span = std::uint64_t{1} << l;
            const auto cutoff = static_cast<std::uint64_t>(st.ints.at("min_guess"));
            per_guess.assign(span, 0.0);
            for (std::uint64_t k = 1; k <= span; ++k) {
                if (k < cutoff) continue;
                per_guess[k - 1] =
                    laws::reflection(laws::additive_adjustment(value, l, k));
            }
            guess_mode = true;
        } else if (st.procedure == "coherent-guess") {
            double acc = 0.0;
            for (double g : per_guess) acc += g;
            value = acc / static_cast<double>(per_guess.size());
            guess_mode = false;
        } else if (st.procedure == "and-repetition") {
            if (guess_mode) {
                for (double &g : per_guess) g = laws::and_repetition(g, st.ints.at("N"));
            } else {
                value = laws::and_repetition(value, st.ints.at("N"));
            }
        } else if (st.procedure == "or-repetition") {
            if (guess_mode)
                throw ValidationError(
                    "schedule ends in per-guess stages; no scalar chain exists");
            value = laws::or_repetition(value, st.ints.at("N"));
        } else {
            throw ValidationError("unknown stage procedure '" + st.procedure + "'");
        }
    }
    if (guess_mode)
        throw ValidationError(
            "schedule ends in per-guess stages; no scalar chain exists");
    return value;
}

double mixture_acceptance(const RandomGuessResult &rg,
                          std::span<const cplx> witness_amps) {
    if (rg.per_guess.size() != rg.guess_count)
        throw ValidationError("mixture needs every per-guess instance constructed");
    double acc = 0.0;
    for (std::uint64_t k = 1; k <= rg.guess_count; ++k) {
        if (k < rg.min_guess) continue; // rejects outright
        acc += acceptance_probability(rg.per_guess[k - 1], witness_amps);
    }
    return acc / static_cast<double>(rg.guess_count);
}

PipelineEvaluation evaluate_pipeline(const VerifierInstance &base,
                                     const PipelineConfig &cfg,
                                     const EvaluationOptions &opt) {
    PipelineEvaluation ev;
    ev.schedule = parameter_schedule(cfg);

    auto [m, accepted] = restricted_m_operator(base, opt.spectrum_dim_cap);
    Eigensystem eig = hermitian_eigensystem(m);
    const std::size_t d = accepted.size();
    std::vector<std::vector<cplx>> witnesses(d);
    ev.base_eigenvalues.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t src = d - 1 - j; // descending
        ev.base_eigenvalues[j] = std::clamp(eig.eigenvalues[src], 0.0, 1.0);
        witnesses[j].resize(d);
        for (std::size_t r = 0; r < d; ++r) witnesses[j][r] = eig.eigenvectors(r, src);
    }

    const int full_width = base.total_qubits() + ev.schedule.total_extra_qubits;
    ev.lifted_acceptance.resize(d);

    if (cfg.construction == "random-guess" && cfg.stage_cutoff == "full") {
        const ScheduleStage *or_st = find_stage(ev.schedule, "or-repetition");
        const ScheduleStage *coh_st = find_stage(ev.schedule, "coherent-guess");
        const int per_guess_width =
            full_width - static_cast<int>(or_st->delta_qubits) - coh_st->delta_qubits;
        if (!opt.force_spectral && full_width <= opt.max_sim_qubits) {
            RandomGuessResult rg = random_guess_pipeline(base, cfg);
            CallTally tally;
            for (std::size_t j = 0; j < d; ++j)
                ev.lifted_acceptance[j] = acceptance_probability(
                    rg.final_or, std::span<const cplx>(witnesses[j]),
                    j == 0 ? &tally : nullptr);
            ev.method = "statevector";
            ev.simulated_qubits = full_width;
            ev.measured_calls_v = tally.calls_v;
            ev.measured_calls_v_dagger = tally.calls_v_dagger;
        } else if (!opt.force_spectral && per_guess_width <= opt.max_sim_qubits) {
            // Exact uniform mixture: the coherent operator restricted to
            // lifted witness states is the mean of the per-guess operators, so
            // the final stage acts on per-eigenstate means.
            RandomGuessResult rg = random_guess_pipeline(base, cfg);
            for (std::size_t j = 0; j < d; ++j) {
                const double f =
                    mixture_acceptance(rg, std::span<const cplx>(witnesses[j]));
                ev.lifted_acceptance[j] = laws::or_repetition(f, or_st->ints.at("N"));
            }
            ev.method = "mixture";
            ev.simulated_qubits = per_guess_width;
        } else {
            for (std::size_t j = 0; j < d; ++j)
                ev.lifted_acceptance[j] =
                    chained_acceptance(ev.schedule, ev.base_eigenvalues[j]);
            ev.method = "spectral";
            ev.simulated_qubits = 0;
        }
    } else {
        const bool linear =
            cfg.construction == "simple-pe" || cfg.construction == "hybrid";
        if (!opt.force_spectral && linear && full_width <= opt.max_sim_qubits) {
            VerifierInstance final_inst = cfg.construction == "simple-pe"
                                              ? simple_pe_pipeline(base, cfg)
                                              : hybrid_pipeline(base, cfg);
            CallTally tally;
            for (std::size_t j = 0; j < d; ++j)
                ev.lifted_acceptance[j] = acceptance_probability(
                    final_inst, std::span<const cplx>(witnesses[j]),
                    j == 0 ? &tally : nullptr);
            ev.method = "statevector";
            ev.simulated_qubits = full_width;
            ev.measured_calls_v = tally.calls_v;
            ev.measured_calls_v_dagger = tally.calls_v_dagger;
        } else {
            int probe_width = 0;
            for (const auto &st : ev.schedule.stages)
                if (st.procedure == "phase-estimation")
                    probe_width = std::max(
                        probe_width, 1 + static_cast<int>(st.ints.at("m")));
            if (probe_width > opt.max_sim_qubits)
                throw CapacityError(
                    "even the spectral route needs " + std::to_string(probe_width) +
                    " qubits for its phase-estimation probes; raise the budget");
            for (std::size_t j = 0; j < d; ++j)
                ev.lifted_acceptance[j] =
                    chained_acceptance(ev.schedule, ev.base_eigenvalues[j]);
            ev.method = "spectral";
            ev.simulated_qubits = probe_width;
        }
    }

    ev.max_acceptance = 0.0;
    for (double a : ev.lifted_acceptance) ev.max_acceptance = std::max(ev.max_acceptance, a);
    return ev;
}

} // namespace qamp
