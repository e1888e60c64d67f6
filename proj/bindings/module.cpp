#include <cstring>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qamp/experiment.hpp"
#include "qamp/oracle.hpp"

namespace py = pybind11;
using namespace qamp;

namespace {

Matrix matrix_from_array(const py::array_t<cplx, py::array::c_style | py::array::forcecast> &arr) {
    if (arr.ndim() != 2) throw ValidationError("expected a 2-d complex array");
    Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    auto r = arr.unchecked<2>();
    for (py::ssize_t i = 0; i < arr.shape(0); ++i)
        for (py::ssize_t j = 0; j < arr.shape(1); ++j)
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = r(i, j);
    return m;
}

py::array_t<cplx> matrix_to_array(const Matrix &m) {
    py::array_t<cplx> arr({m.rows(), m.cols()});
    auto w = arr.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
    return arr;
}

std::vector<cplx> witness_from_array(
    const py::array_t<cplx, py::array::c_style | py::array::forcecast> &arr) {
    if (arr.ndim() != 1) throw ValidationError("expected a 1-d complex array");
    std::vector<cplx> w(static_cast<std::size_t>(arr.shape(0)));
    auto r = arr.unchecked<1>();
    for (py::ssize_t i = 0; i < arr.shape(0); ++i)
        w[static_cast<std::size_t>(i)] = r(i);
    return w;
}

PipelineConfig make_config(const std::string &construction, long long p, double c,
                           double s, const std::string &cutoff) {
    PipelineConfig cfg;
    cfg.construction = construction;
    cfg.p = p;
    cfg.c = c;
    cfg.s = s;
    cfg.stage_cutoff = cutoff;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_qamp, m) {
    m.doc() = "Statevector simulator for witness-preserving amplification "
              "procedures over small quantum verifiers";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);

    py::class_<ResourceReport>(m, "ResourceReport")
        .def_readonly("extra_qubits", &ResourceReport::extra_qubits)
        .def_readonly("calls_v", &ResourceReport::calls_v)
        .def_readonly("calls_v_dagger", &ResourceReport::calls_v_dagger)
        .def("__repr__", [](const ResourceReport &r) {
            return "<ResourceReport extra_qubits=" + std::to_string(r.extra_qubits) +
                   " calls_v=" + std::to_string(r.calls_v) +
                   " calls_v_dagger=" + std::to_string(r.calls_v_dagger) + ">";
        });

    py::class_<VerifierInstance>(m, "VerifierInstance")
        .def_property_readonly("total_qubits", &VerifierInstance::total_qubits)
        .def_property_readonly("witness_width", &VerifierInstance::witness_width)
        .def_readonly("resources", &VerifierInstance::resources)
        .def("__repr__", [](const VerifierInstance &v) {
            return "<VerifierInstance qubits=" + std::to_string(v.total_qubits()) +
                   " witness=" + std::to_string(v.witness_width()) + ">";
        });

    m.def("build_verifier",
          [](const py::array_t<cplx, py::array::c_style | py::array::forcecast> &u,
             int private_width, int witness_width, int output_qubit) {
              return build_verifier(matrix_from_array(u), private_width,
                                    witness_width, output_qubit);
          },
          py::arg("unitary"), py::arg("private_width"), py::arg("witness_width"),
          py::arg("output_qubit") = 0);
    m.def("random_verifier", &random_verifier, py::arg("private_width"),
          py::arg("witness_width"), py::arg("seed"));
    m.def("planted_verifier", &planted_verifier, py::arg("eigenvalues"),
          py::arg("seed"));
    m.def("planted_yes_instance", &planted_yes_instance, py::arg("c"),
          py::arg("witness_width"), py::arg("seed"));
    m.def("planted_no_instance", &planted_no_instance, py::arg("s"),
          py::arg("witness_width"), py::arg("seed"));
    m.def("haar_unitary",
          [](std::size_t dim, std::uint64_t seed) {
              return matrix_to_array(haar_unitary(dim, seed));
          },
          py::arg("dim"), py::arg("seed"));

    m.def("spectrum",
          [](const VerifierInstance &v) {
              const auto rep = m_spectrum(v);
              py::list witnesses;
              for (const auto &state : rep.eigenstates) {
                  const auto w = extract_witness(v, state);
                  const std::vector<py::ssize_t> shape = {
                      static_cast<py::ssize_t>(w.size())};
                  py::array_t<cplx> arr(shape);
                  std::memcpy(arr.mutable_data(), w.data(), w.size() * sizeof(cplx));
                  witnesses.append(std::move(arr));
              }
              py::dict out;
              out["eigenvalues"] = rep.eigenvalues;
              out["max_acceptance"] = rep.max_acceptance;
              out["witnesses"] = std::move(witnesses);
              return out;
          },
          py::arg("instance"),
          "Eigenvalues (descending), the top acceptance, and the witness "
          "amplitudes of each eigenstate");

    m.def("acceptance_probability",
          [](const VerifierInstance &v,
             const py::array_t<cplx, py::array::c_style | py::array::forcecast> &w) {
              const auto witness = witness_from_array(w);
              return acceptance_probability(v, std::span<const cplx>(witness));
          },
          py::arg("instance"), py::arg("witness"));

    m.def("and_type_repetition", &and_type_repetition, py::arg("instance"),
          py::arg("n"));
    m.def("or_type_repetition", &or_type_repetition, py::arg("instance"),
          py::arg("n"));
    m.def("one_shot_phase_estimation", &one_shot_phase_estimation,
          py::arg("instance"), py::arg("t"), py::arg("l"), py::arg("eps"));
    m.def("marriott_watrous", &marriott_watrous, py::arg("instance"), py::arg("n"),
          py::arg("threshold"));
    m.def("additive_adjustment", &additive_adjustment, py::arg("instance"),
          py::arg("l"), py::arg("k"));
    m.def("reflection", &reflection, py::arg("instance"));

    m.def("law_and_repetition", &laws::and_repetition, py::arg("lam"), py::arg("n"));
    m.def("law_or_repetition", &laws::or_repetition, py::arg("lam"), py::arg("n"));
    m.def("law_additive_adjustment", &laws::additive_adjustment, py::arg("lam"),
          py::arg("l"), py::arg("k"));
    m.def("law_reflection", &laws::reflection, py::arg("lam"));
    m.def("law_marriott_watrous", &laws::marriott_watrous, py::arg("lam"),
          py::arg("n"), py::arg("threshold"));
    m.def("law_phase_estimation", &laws::phase_estimation, py::arg("lam"),
          py::arg("t"), py::arg("l"), py::arg("eps"));

    m.def("branch_sum_acceptance",
          [](const VerifierInstance &v, const std::string &procedure,
             const py::array_t<cplx, py::array::c_style | py::array::forcecast> &w,
             long long n, long long threshold, int l, std::uint64_t k) {
              oracle::Procedure proc;
              if (procedure == "and-rep")
                  proc = oracle::AndRepetition{n};
              else if (procedure == "or-rep")
                  proc = oracle::OrRepetition{n};
              else if (procedure == "mw")
                  proc = oracle::MarriottWatrous{n, threshold};
              else if (procedure == "additive")
                  proc = oracle::AdditiveAdjustment{l, k};
              else if (procedure == "reflection")
                  proc = oracle::Reflection{};
              else
                  throw ValidationError("unknown procedure '" + procedure + "'");
              const auto witness = witness_from_array(w);
              const auto input =
                  assemble_initial_state(v, std::span<const cplx>(witness));
              return oracle::branch_sum_acceptance(v, proc, input);
          },
          py::arg("instance"), py::arg("procedure"), py::arg("witness"),
          py::arg("n") = 1, py::arg("threshold") = 1, py::arg("l") = 1,
          py::arg("k") = 1);

    m.def("parameter_schedule_json",
          [](const std::string &construction, long long p, double c, double s,
             const std::string &cutoff) {
              return schedule_to_json(
                  parameter_schedule(make_config(construction, p, c, s, cutoff)));
          },
          py::arg("construction"), py::arg("p"), py::arg("c"), py::arg("s"),
          py::arg("cutoff") = "full");

    m.def("evaluate_pipeline",
          [](const VerifierInstance &v, const std::string &construction, long long p,
             double c, double s, const std::string &cutoff, int max_qubits,
             bool force_spectral) {
              EvaluationOptions opt;
              opt.max_sim_qubits = max_qubits;
              opt.force_spectral = force_spectral;
              const auto ev =
                  evaluate_pipeline(v, make_config(construction, p, c, s, cutoff), opt);
              py::dict out;
              out["base_eigenvalues"] = ev.base_eigenvalues;
              out["lifted_acceptance"] = ev.lifted_acceptance;
              out["max_acceptance"] = ev.max_acceptance;
              out["method"] = ev.method;
              out["simulated_qubits"] = ev.simulated_qubits;
              out["total_extra_qubits"] = ev.schedule.total_extra_qubits;
              out["total_calls_v"] = ev.schedule.total_calls_v;
              out["total_calls_v_dagger"] = ev.schedule.total_calls_v_dagger;
              return out;
          },
          py::arg("instance"), py::arg("construction"), py::arg("p"), py::arg("c"),
          py::arg("s"), py::arg("cutoff") = "full", py::arg("max_qubits") = 22,
          py::arg("force_spectral") = false);

    m.def("instance_to_json", &instance_to_json, py::arg("instance"));
    m.def("instance_from_json",
          [](const std::string &text) { return instance_from_json(text); },
          py::arg("text"));

    m.def("verify_check_names", [] { return verify_check_names(); });
    m.def("run_verify",
          [](const std::string &name, long long trials, std::uint64_t seed, double tol,
             long long p, double c, double s) {
              VerifyOptions opt;
              opt.name = name;
              opt.trials = trials;
              opt.seed = seed;
              opt.tol = tol;
              opt.p = p;
              opt.c = c;
              opt.s = s;
              const auto outcome = run_verify(opt);
              py::dict out;
              out["exit_code"] = outcome.exit_code;
              out["pass"] = outcome.pass;
              out["worst_residual"] = outcome.worst_residual;
              out["report"] = outcome.report;
              return out;
          },
          py::arg("name"), py::arg("trials") = 20, py::arg("seed") = 1,
          py::arg("tol") = 1e-9, py::arg("p") = 2, py::arg("c") = 0.99,
          py::arg("s") = 0.01);
}
