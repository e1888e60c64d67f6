#include "qamp/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace qamp {

namespace {

RegisterLayout base_layout(int private_width, int witness_width) {
    std::vector<RegisterLayout::Register> regs;
    regs.push_back({"V", private_width});
    if (witness_width > 0) regs.push_back({"M", witness_width});
    return RegisterLayout(std::move(regs));
}

} // namespace

VerifierInstance build_verifier(const Matrix &u, int private_width, int witness_width,
                                int output_qubit, const Tolerances &tol) {
    if (private_width < 1)
        throw ValidationError("build_verifier requires at least one private qubit");
    if (witness_width < 0)
        throw ValidationError("witness width must be >= 0");
    if (output_qubit < 0 || output_qubit >= private_width)
        throw ValidationError("output qubit " + std::to_string(output_qubit) +
                              " must index a private qubit (width " +
                              std::to_string(private_width) + ")");
    const std::uint64_t dim = std::uint64_t{1} << (private_width + witness_width);
    if (u.rows() != dim || u.cols() != dim)
        throw ValidationError("unitary dimension " + std::to_string(u.rows()) +
                              " does not match 2^(private+witness) = " +
                              std::to_string(dim));
    if (!u.is_unitary(tol)) {
        std::ostringstream os;
        os << "verifier matrix is not unitary: ||U'U - I||_F = "
           << u.unitarity_residual() << " exceeds " << tol.unitarity;
        throw ValidationError(os.str());
    }

    VerifierInstance v;
    v.layout = base_layout(private_width, witness_width);
    std::vector<std::string> targets = {"V"};
    if (witness_width > 0) targets.push_back("M");
    v.applier = make_base_unitary(u, targets);
    v.delta = ProjectionSpec::reg_equals("V", 0);
    v.pi = ProjectionSpec::qubit_is(output_qubit, 1);
    v.witness_register = witness_width > 0 ? "M" : "V"; // degenerate: no witness
    if (witness_width == 0) {
        // No witness register: keep the delta subspace one-dimensional and let
        // witness_dim() report 1 via a zero-width view.
        v.witness_register = "";
    }
    v.base = std::make_shared<BaseUnitary>(
        BaseUnitary{u, private_width, witness_width, output_qubit});
    return v;
}

VerifierInstance random_verifier(int private_width, int witness_width,
                                 std::uint64_t seed) {
    const std::size_t dim = std::size_t{1} << (private_width + witness_width);
    return build_verifier(haar_unitary(dim, seed), private_width, witness_width, 0);
}

VerifierInstance planted_verifier(const std::vector<double> &eigenvalues,
                                  std::uint64_t seed) {
    const std::size_t wdim = eigenvalues.size();
    if (wdim == 0 || (wdim & (wdim - 1)) != 0)
        throw ValidationError("planted spectrum size must be a power of two");
    for (double lam : eigenvalues)
        if (lam < 0.0 || lam > 1.0)
            throw ValidationError("planted eigenvalues must lie in [0, 1]");
    int ww = 0;
    while ((std::size_t{1} << ww) < wdim) ++ww;
    const std::size_t dim = 2 * wdim;

    const Matrix w = haar_unitary(wdim, mix_seed(seed, 1));
    Matrix u(dim, dim);
    // Column for input |v=0, e_j>: sqrt(lam_i)|1, i> + sqrt(1-lam_i)|0, i>,
    // transported through the eigenvector frame w. Index = v + 2*m.
    for (std::size_t j = 0; j < wdim; ++j) {
        for (std::size_t i = 0; i < wdim; ++i) {
            const cplx coeff = std::conj(w(j, i));
            u(2 * i + 1, 2 * j + 0) += coeff * std::sqrt(eigenvalues[i]);
            u(2 * i + 0, 2 * j + 0) += coeff * std::sqrt(1.0 - eigenvalues[i]);
        }
    }
    // Complete the v=1 input columns by Gram-Schmidt over seeded Gaussian
    // candidates.
    Rng rng(mix_seed(seed, 2));
    std::vector<std::size_t> done;
    for (std::size_t j = 0; j < wdim; ++j) done.push_back(2 * j);
    for (std::size_t j = 0; j < wdim; ++j) {
        const std::size_t col = 2 * j + 1;
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::vector<cplx> cand(dim);
            for (auto &e : cand) e = rng.gaussian_cplx();
            for (std::size_t pc : done) {
                cplx dot{0.0, 0.0};
                for (std::size_t r = 0; r < dim; ++r) dot += std::conj(u(r, pc)) * cand[r];
                for (std::size_t r = 0; r < dim; ++r) cand[r] -= dot * u(r, pc);
            }
            double nrm = 0.0;
            for (const auto &e : cand) nrm += std::norm(e);
            nrm = std::sqrt(nrm);
            if (nrm > 1e-6) {
                for (std::size_t r = 0; r < dim; ++r) u(r, col) = cand[r] / nrm;
                done.push_back(col);
                break;
            }
        }
    }
    return build_verifier(u, 1, ww, 0);
}

std::pair<Matrix, std::vector<std::uint64_t>>
restricted_m_operator(const VerifierInstance &v, std::uint64_t dim_cap) {
    const std::uint64_t dim = v.layout.dimension();
    if (dim > dim_cap) {
        throw CapacityError(
            "dense spectral analysis capped at dimension " + std::to_string(dim_cap) +
            ", instance has " + std::to_string(dim) +
            "; evaluate acceptance_probability on chosen witnesses instead");
    }
    const auto delta_mask = v.delta.build_mask(v.layout);
    const auto pi_mask = v.pi.build_mask(v.layout);
    std::vector<std::uint64_t> accepted;
    for (std::uint64_t i = 0; i < dim; ++i)
        if (delta_mask[i]) accepted.push_back(i);

    const std::size_t d = accepted.size();
    Matrix m(d, d);
    for (std::size_t col = 0; col < d; ++col) {
        std::vector<cplx> amps(dim, cplx{0.0, 0.0});
        amps[accepted[col]] = 1.0;
        amps = run_applier(*v.applier, v.layout, std::move(amps), false);
        for (std::uint64_t i = 0; i < dim; ++i)
            if (!pi_mask[i]) amps[i] = cplx{0.0, 0.0};
        amps = run_applier(*v.applier, v.layout, std::move(amps), true);
        for (std::size_t row = 0; row < d; ++row) m(row, col) = amps[accepted[row]];
    }
    // Symmetrise away round-off.
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = r; c < d; ++c) {
            const cplx avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
            m(r, c) = avg;
            m(c, r) = std::conj(avg);
        }
    return {std::move(m), std::move(accepted)};
}

SpectrumReport m_spectrum(const VerifierInstance &v, const Tolerances &tol,
                          std::uint64_t dim_cap) {
    auto [m, accepted] = restricted_m_operator(v, dim_cap);
    Eigensystem eig = hermitian_eigensystem(m, tol);

    const std::size_t d = accepted.size();
    SpectrumReport report;
    report.eigenvalues.resize(d);
    report.eigenstates.reserve(d);
    // Descending order.
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t src = d - 1 - j;
        double lam = eig.eigenvalues[src];
        if (lam < -tol.eigenvalue_clamp || lam > 1.0 + tol.eigenvalue_clamp) {
            std::ostringstream os;
            os << "spectrum value " << lam << " escapes [0,1] beyond clamp tolerance "
               << tol.eigenvalue_clamp;
            throw ValidationError(os.str());
        }
        report.eigenvalues[j] = std::clamp(lam, 0.0, 1.0);
        std::vector<cplx> amps(v.layout.dimension(), cplx{0.0, 0.0});
        for (std::size_t r = 0; r < d; ++r) amps[accepted[r]] = eig.eigenvectors(r, src);
        report.eigenstates.push_back(
            StateVector::from_amplitudes(v.layout, std::move(amps), tol));
    }
    report.max_acceptance = report.eigenvalues.empty() ? 0.0 : report.eigenvalues[0];
    return report;
}

StateVector assemble_initial_state(const VerifierInstance &v,
                                   std::span<const cplx> witness_amps,
                                   const Tolerances &tol) {
    if (v.witness_register.empty()) {
        if (witness_amps.size() > 1)
            throw ValidationError("instance carries no witness register");
        return StateVector::zero_state(v.layout);
    }
    const std::uint64_t wdim = v.witness_dim();
    if (witness_amps.size() != wdim)
        throw ValidationError("witness has " + std::to_string(witness_amps.size()) +
                              " amplitudes, register expects " + std::to_string(wdim));
    double nrm = 0.0;
    for (const auto &a : witness_amps) nrm += std::norm(a);
    if (std::abs(std::sqrt(nrm) - 1.0) > tol.state_norm)
        throw ValidationError("witness state is not normalised");

    const int off = v.layout.offset_of(v.witness_register);
    std::vector<cplx> amps(v.layout.dimension(), cplx{0.0, 0.0});
    for (std::uint64_t w = 0; w < wdim; ++w) amps[w << off] = witness_amps[w];
    return StateVector::from_amplitudes(v.layout, std::move(amps), tol);
}

double acceptance_of_state(const VerifierInstance &v, const StateVector &input,
                           CallTally *tally) {
    if (input.layout() != v.layout)
        throw ValidationError("input state layout does not match the instance");
    auto amps = run_applier(*v.applier, v.layout, input.amplitudes(), false, tally);
    const auto pi_mask = v.pi.build_mask(v.layout);
    double prob = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (pi_mask[i]) prob += std::norm(amps[i]);
    return prob;
}

double acceptance_probability(const VerifierInstance &v,
                              std::span<const cplx> witness_amps, CallTally *tally,
                              const Tolerances &tol) {
    return acceptance_of_state(v, assemble_initial_state(v, witness_amps, tol), tally);
}

double acceptance_probability(const VerifierInstance &v, const StateVector &witness,
                              CallTally *tally, const Tolerances &tol) {
    return acceptance_probability(
        v, std::span<const cplx>(witness.amplitudes().data(), witness.amplitudes().size()),
        tally, tol);
}

std::vector<cplx> extract_witness(const VerifierInstance &v, const StateVector &state,
                                  double support_tol) {
    if (v.witness_register.empty()) return {cplx{1.0, 0.0}};
    const int off = v.layout.offset_of(v.witness_register);
    const int w = v.layout.width_of(v.witness_register);
    const std::uint64_t wdim = std::uint64_t{1} << w;
    const std::uint64_t reg_mask = (wdim - 1) << off;
    std::vector<cplx> out(wdim, cplx{0.0, 0.0});
    double leak = 0.0;
    for (std::uint64_t i = 0; i < state.amplitudes().size(); ++i) {
        const cplx a = state.amplitudes()[i];
        if (a == cplx{0.0, 0.0}) continue;
        if ((i & ~reg_mask) != 0) {
            leak += std::norm(a);
            continue;
        }
        out[(i & reg_mask) >> off] = a;
    }
    if (leak > support_tol)
        throw ValidationError(
            "state carries weight outside the witness register; cannot extract");
    return out;
}

StateVector lift_state(const StateVector &state, const RegisterLayout &target) {
    const auto &src = state.layout().registers();
    const auto &dst = target.registers();
    if (src.size() > dst.size())
        throw ValidationError("target layout is smaller than the source layout");
    for (std::size_t i = 0; i < src.size(); ++i)
        if (src[i].name != dst[i].name || src[i].width != dst[i].width)
            throw ValidationError("target layout does not extend the source layout");
    std::vector<cplx> amps(target.dimension(), cplx{0.0, 0.0});
    std::copy(state.amplitudes().begin(), state.amplitudes().end(), amps.begin());
    if (state.is_subnormalized())
        return StateVector::subnormalized(target, std::move(amps));
    return StateVector::from_amplitudes(target, std::move(amps));
}

namespace {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

std::string instance_to_json(const VerifierInstance &v) {
    if (!v.base)
        throw ValidationError(
            "only bare instances serialise; composed ones are rebuilt from their "
            "construction parameters");
    nlohmann::ordered_json j;
    j["format"] = "qamp-instance";
    j["version"] = 1;
    j["private_width"] = v.base->private_width;
    j["witness_width"] = v.base->witness_width;
    j["output_qubit"] = v.base->output_qubit;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    const Matrix &u = v.base->u;
    for (std::size_t r = 0; r < u.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < u.cols(); ++c) {
            row.push_back(nlohmann::ordered_json::array(
                {format_double(u(r, c).real()), format_double(u(r, c).imag())}));
        }
        rows.push_back(std::move(row));
    }
    j["unitary"] = std::move(rows);
    return j.dump(2) + "\n";
}

VerifierInstance instance_from_json(const std::string &text, const Tolerances &tol) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception &e) {
        throw ValidationError(std::string("instance JSON parse failure: ") + e.what());
    }
    if (!j.contains("format") || j["format"] != "qamp-instance")
        throw ValidationError("document is not a qamp-instance JSON file");
    const int pw = j.at("private_width").get<int>();
    const int ww = j.at("witness_width").get<int>();
    const int oq = j.at("output_qubit").get<int>();
    const auto &rows = j.at("unitary");
    const std::size_t dim = rows.size();
    Matrix u(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        const auto &row = rows.at(r);
        if (row.size() != dim) throw ValidationError("unitary rows must be square");
        for (std::size_t c = 0; c < dim; ++c) {
            const auto &pair = row.at(c);
            const double re = std::strtod(pair.at(0).get<std::string>().c_str(), nullptr);
            const double im = std::strtod(pair.at(1).get<std::string>().c_str(), nullptr);
            u(r, c) = cplx{re, im};
        }
    }
    return build_verifier(u, pw, ww, oq, tol);
}

} // namespace qamp
