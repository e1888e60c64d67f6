#include "qamp/schedule.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "qamp/procedures.hpp"

namespace qamp {

namespace {

constexpr double kCeilSlack = 1e-12;

long long ceil_tol(double x) {
    return static_cast<long long>(std::ceil(x - kCeilSlack));
}

struct Cost {
    long long v = 1; // base-unitary applications per forward application
    long long vd = 0;
};

Cost chain(Cost in, long long fwd, long long inv) {
    return {fwd * in.v + inv * in.vd, fwd * in.vd + inv * in.v};
}

struct Builder {
    const PipelineConfig &cfg;
    ParameterSchedule out;
    Cost cost;

    void push(ScheduleStage stage, long long fwd, long long inv) {
        cost = chain(cost, fwd, inv);
        stage.inner_calls_v = fwd;
        stage.inner_calls_v_dagger = inv;
        stage.calls_v = cost.v;
        stage.calls_v_dagger = cost.vd;
        out.total_extra_qubits += stage.delta_qubits;
        out.stages.push_back(std::move(stage));
    }

    // --- shared stages -----------------------------------------------------

    void pe_stage(const std::string &name, double eps, double tc, double ts) {
        const PhaseWindowParams pw = phase_window_params(cfg.c, cfg.s, eps);
        ScheduleStage st;
        st.name = name;
        st.procedure = "phase-estimation";
        st.ints["l"] = pw.l;
        st.ints["m"] = pw.m;
        st.ints["t_numerator"] = static_cast<long long>(pw.t_num);
        st.ints["walk_iterations"] = (1LL << pw.m) - 1;
        st.ints["textbook_call_count"] =
            (1LL << pw.l) * ceil_tol(1.0 / (2.0 * eps) + 2.0) - 1;
        st.reals["eps"] = eps;
        st.reals["t"] = pw.t;
        st.reals["arccos_sqrt_c"] = std::acos(std::sqrt(cfg.c));
        st.reals["arccos_sqrt_s"] = std::acos(std::sqrt(cfg.s));
        st.target_completeness = tc;
        st.target_soundness = ts;
        st.law = "phase in (-t,t) of walk spectrum; window t=" +
                 std::to_string(pw.t_num) + "/2^" + std::to_string(pw.l);
        st.delta_qubits = pw.m;
        push(std::move(st), (1LL << pw.m) - 1, (1LL << pw.m) - 1);
    }

    void and_stage(const std::string &name, long long n, double tc, double ts) {
        ScheduleStage st;
        st.name = name;
        st.procedure = "and-repetition";
        st.ints["N"] = n;
        st.ints["counter_bits"] = ceil_log2_u64(static_cast<std::uint64_t>(2 * n + 1));
        st.target_completeness = tc;
        st.target_soundness = ts;
        st.law = "acc = lambda^(2N)";
        st.delta_qubits = static_cast<int>(st.ints["counter_bits"]);
        push(std::move(st), n, n);
    }

    void or_stage(const std::string &name, long long n, double tc, double ts) {
        ScheduleStage st;
        st.name = name;
        st.procedure = "or-repetition";
        st.ints["N"] = n;
        st.ints["counter_bits"] = ceil_log2_u64(static_cast<std::uint64_t>(2 * n + 1));
        st.target_completeness = tc;
        st.target_soundness = ts;
        st.law = "acc = 1-(1-lambda)^(2N)";
        st.delta_qubits = static_cast<int>(st.ints["counter_bits"]);
        push(std::move(st), n, n);
    }

    void mw_stage(const std::string &name, long long n, double tc, double ts) {
        ScheduleStage st;
        st.name = name;
        st.procedure = "mw-amplification";
        st.ints["N"] = n;
        st.ints["threshold"] = n;
        st.ints["flag_qubits"] = 2 * n + 1;
        st.ints["counter_bits"] = ceil_log2_u64(static_cast<std::uint64_t>(2 * n + 1));
        st.target_completeness = tc;
        st.target_soundness = ts;
        st.law = "acc = P[Bin(2N,lambda) >= t]";
        st.delta_qubits = static_cast<int>(2 * n + 1 + st.ints["counter_bits"]);
        push(std::move(st), n, n);
    }

    // --- simple-pe ---------------------------------------------------------

    void simple_mild(long long p_param) {
        pe_stage("mild-pe(p=" + std::to_string(p_param) + ")",
                 1.0 / static_cast<double>(p_param),
                 1.0 - 1.0 / static_cast<double>(p_param),
                 1.0 / static_cast<double>(p_param));
    }

    void simple_soundness(long long p_param) {
        simple_mild(2 * p_param + 4);
        const double denom = 2.0 * std::log2(2.0 * static_cast<double>(p_param) + 4.0);
        const long long n = ceil_tol(static_cast<double>(p_param) / denom);
        and_stage("soundness-and(p=" + std::to_string(p_param) + ")", n, 0.5,
                  std::pow(2.0, -static_cast<double>(p_param)));
    }

    void simple_full() {
        const long long p_snd =
            cfg.p + ceil_log2_u64(static_cast<std::uint64_t>(cfg.p + 2));
        simple_soundness(p_snd);
        const long long n = (cfg.p + 1) / 2; // ceil(p/2)
        or_stage("final-or(p=" + std::to_string(cfg.p) + ")", n,
                 1.0 - std::pow(2.0, -static_cast<double>(cfg.p)),
                 std::pow(2.0, -static_cast<double>(cfg.p)));
    }

    // --- hybrid ------------------------------------------------------------

    void hybrid_very_mild() { pe_stage("very-mild-pe", 0.25, 0.75, 0.25); }

    void hybrid_mw(long long p_param) {
        if (p_param < 2)
            throw ValidationError("mw amplification stage requires p >= 2");
        hybrid_very_mild();
        // 4 log p / log e in any shared base is 4 ln p.
        const long long n = ceil_tol(4.0 * std::log(static_cast<double>(p_param)));
        mw_stage("mild-mw(p=" + std::to_string(p_param) + ")", n,
                 1.0 - 1.0 / static_cast<double>(p_param),
                 1.0 / static_cast<double>(p_param));
    }

    void hybrid_soundness(long long p_param) {
        hybrid_mw(4 * p_param * p_param);
        const double denom = 2.0 * std::log2(2.0 * static_cast<double>(p_param));
        const long long n = ceil_tol(static_cast<double>(p_param) / denom);
        and_stage("soundness-and(p=" + std::to_string(p_param) + ")", n,
                  1.0 - 1.0 / static_cast<double>(p_param),
                  std::pow(2.0, -2.0 * static_cast<double>(p_param)));
    }

    void hybrid_full() {
        if (cfg.p < 2)
            throw ValidationError(
                "hybrid construction divides by log2(p); use p >= 2");
        hybrid_soundness(cfg.p);
        const double denom = 2.0 * std::log2(static_cast<double>(cfg.p));
        const long long n = ceil_tol(static_cast<double>(cfg.p) / denom);
        or_stage("final-or(p=" + std::to_string(cfg.p) + ")", n,
                 1.0 - std::pow(2.0, -static_cast<double>(cfg.p)),
                 std::pow(2.0, -static_cast<double>(cfg.p)));
    }

    // --- random guess ------------------------------------------------------

    void guess_mild(long long p_param) {
        const double gap = cfg.c - cfg.s;
        const int l = static_cast<int>(
            ceil_tol(0.5 * std::log2(static_cast<double>(p_param) / (gap * gap))));
        const auto span = std::uint64_t{1} << l;
        const auto cutoff = static_cast<std::uint64_t>(
            std::ceil(cfg.c * static_cast<double>(span) - 1e-9));
        ScheduleStage st;
        st.name = "guess-adjust-reflect(p=" + std::to_string(p_param) + ")";
        st.procedure = "guess-adjust-reflect";
        st.ints["l"] = l;
        st.ints["guess_count"] = static_cast<long long>(span);
        st.ints["min_guess"] = static_cast<long long>(cutoff);
        st.target_completeness = 1.0 - gap * gap / static_cast<double>(p_param);
        st.target_soundness = 1.0 - gap * gap;
        st.law = "per guess k >= C: acc = 4*adj(lambda)*(1-adj(lambda)), "
                 "adj(lambda) = 1/2 + (lambda - k/2^l)/2; else 0";
        st.delta_qubits = l + 1; // coin + comparison register
        // Adjustment costs one forward call, the reflection one call each way.
        push(std::move(st), 1, 1);
    }

    void guess_soundness(long long p_param) {
        guess_mild(6 * p_param);
        const double gap = cfg.c - cfg.s;
        const long long n =
            ceil_tol(static_cast<double>(p_param) / (2.0 * gap * gap));
        and_stage("guess-and(p=" + std::to_string(p_param) + ")", n, 0.5,
                  std::pow(2.0, -static_cast<double>(p_param)));
    }

    void guess_random(long long p_param) {
        const double gap = cfg.c - cfg.s;
        const double mixture_completeness =
            gap / (4.0 * std::sqrt(6.0 * static_cast<double>(p_param)));
        if (!(mixture_completeness > std::pow(2.0, -static_cast<double>(p_param))))
            throw ValidationError(
                "random-guess stage requires (c-s)/(4*sqrt(6p)) > 2^-p; increase p");
        guess_soundness(p_param);
        const long long l = out.stages[out.stages.size() - 2].ints.at("l");
        ScheduleStage st;
        st.name = "coherent-guess(p=" + std::to_string(p_param) + ")";
        st.procedure = "coherent-guess";
        st.ints["l"] = l;
        st.ints["guess_count"] = 1LL << l;
        st.target_completeness = mixture_completeness;
        st.target_soundness = std::pow(2.0, -static_cast<double>(p_param));
        st.law = "acc = mean over guesses k of per-guess acceptance";
        st.delta_qubits = static_cast<int>(2 * l); // guess register + its mirror
        push(std::move(st), 1, 0);
    }

    void guess_full() {
        const double gap = cfg.c - cfg.s;
        const long long q = ceil_tol(
            2.0 * (static_cast<double>(cfg.p) +
                   std::log2(6.0 * static_cast<double>(cfg.p) / gap) + 1.0));
        guess_random(q);
        const long long n = ceil_tol(2.0 * std::sqrt(6.0 * static_cast<double>(q)) /
                                     gap * static_cast<double>(cfg.p));
        or_stage("final-or(p=" + std::to_string(cfg.p) + ")", n,
                 1.0 - std::pow(2.0, -static_cast<double>(cfg.p)),
                 std::pow(2.0, -static_cast<double>(cfg.p)));
        out.stages.back().ints["q"] = q;
    }
};

} // namespace

void PipelineConfig::validate() const {
    if (construction != "simple-pe" && construction != "hybrid" &&
        construction != "random-guess")
        throw ValidationError("unknown construction '" + construction +
                              "'; expected simple-pe, hybrid or random-guess");
    if (!(c > 0.0 && c <= 1.0) || !(s >= 0.0 && s < 1.0))
        throw ValidationError("c must lie in (0,1] and s in [0,1)");
    if (!(c > s)) throw ValidationError("completeness c must exceed soundness s");
    if (p < 1) throw ValidationError("target exponent p must be >= 1");
}

PhaseWindowParams phase_window_params(double c, double s, double eps) {
    if (!(c > s)) throw ValidationError("completeness c must exceed soundness s");
    PhaseWindowParams pw;
    pw.eps = eps;
    const double theta_c = std::acos(std::sqrt(c));
    const double theta_s = std::acos(std::sqrt(s));
    pw.l = ceil_log2_double(2.0 * M_PI / (theta_s - theta_c));
    const double exact = (theta_c + theta_s) / (2.0 * M_PI);
    const double scaled = exact * static_cast<double>(1ULL << pw.l);
    // Nearest grid point, ties toward zero.
    const double fl = std::floor(scaled);
    pw.t_num = static_cast<std::uint64_t>((scaled - fl > 0.5) ? fl + 1.0 : fl);
    pw.t = static_cast<double>(pw.t_num) / static_cast<double>(1ULL << pw.l);
    pw.m = phase_register_width(pw.l, eps);
    return pw;
}

ParameterSchedule parameter_schedule(const PipelineConfig &cfg) {
    cfg.validate();
    Builder b{cfg, {}, {}};
    b.out.construction = cfg.construction;
    b.out.p = cfg.p;
    b.out.c = cfg.c;
    b.out.s = cfg.s;
    b.out.stage_cutoff = cfg.stage_cutoff;

    const auto &cut = cfg.stage_cutoff;
    if (cfg.construction == "simple-pe") {
        if (cut == "mild")
            b.simple_mild(cfg.p);
        else if (cut == "soundness")
            b.simple_soundness(cfg.p);
        else if (cut == "full")
            b.simple_full();
        else
            throw ValidationError("simple-pe cutoff must be mild, soundness or full");
    } else if (cfg.construction == "hybrid") {
        if (cut == "very-mild")
            b.hybrid_very_mild();
        else if (cut == "mw")
            b.hybrid_mw(cfg.p);
        else if (cut == "soundness")
            b.hybrid_soundness(cfg.p);
        else if (cut == "full")
            b.hybrid_full();
        else
            throw ValidationError(
                "hybrid cutoff must be very-mild, mw, soundness or full");
    } else {
        if (cut == "mild")
            b.guess_mild(cfg.p);
        else if (cut == "soundness")
            b.guess_soundness(cfg.p);
        else if (cut == "random-guess")
            b.guess_random(cfg.p);
        else if (cut == "full")
            b.guess_full();
        else
            throw ValidationError(
                "random-guess cutoff must be mild, soundness, random-guess or full");
    }

    b.out.total_calls_v = b.cost.v;
    b.out.total_calls_v_dagger = b.cost.vd;
    b.out.final_completeness = b.out.stages.back().target_completeness;
    b.out.final_soundness = b.out.stages.back().target_soundness;
    return b.out;
}

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string schedule_to_json(const ParameterSchedule &schedule) {
    nlohmann::ordered_json j;
    j["schema"] = "qamp-schedule";
    j["version"] = 1;
    j["construction"] = schedule.construction;
    j["p"] = schedule.p;
    j["c"] = format_real(schedule.c);
    j["s"] = format_real(schedule.s);
    j["stage_cutoff"] = schedule.stage_cutoff;
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto &st : schedule.stages) {
        nlohmann::ordered_json sj;
        sj["name"] = st.name;
        sj["procedure"] = st.procedure;
        auto ints = nlohmann::ordered_json::object();
        for (const auto &[k, v] : st.ints) ints[k] = v;
        sj["ints"] = std::move(ints);
        auto reals = nlohmann::ordered_json::object();
        for (const auto &[k, v] : st.reals) reals[k] = format_real(v);
        sj["reals"] = std::move(reals);
        sj["target_completeness"] = format_real(st.target_completeness);
        sj["target_soundness"] = format_real(st.target_soundness);
        sj["law"] = st.law;
        sj["delta_qubits"] = st.delta_qubits;
        sj["inner_calls_v"] = st.inner_calls_v;
        sj["inner_calls_v_dagger"] = st.inner_calls_v_dagger;
        sj["calls_v"] = st.calls_v;
        sj["calls_v_dagger"] = st.calls_v_dagger;
        stages.push_back(std::move(sj));
    }
    j["stages"] = std::move(stages);
    j["total_extra_qubits"] = schedule.total_extra_qubits;
    j["total_calls_v"] = schedule.total_calls_v;
    j["total_calls_v_dagger"] = schedule.total_calls_v_dagger;
    j["final_completeness"] = format_real(schedule.final_completeness);
    j["final_soundness"] = format_real(schedule.final_soundness);
    return j.dump(2) + "\n";
}

} // namespace qamp
