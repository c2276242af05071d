#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcap/bounds.hpp"
#include "qcap/io.hpp"

namespace py = pybind11;
using namespace qcap;

namespace {

sdp::SolverSettings solver_settings(double tol) {
  sdp::SolverSettings s;
  s.tol_gap = tol;
  s.tol_feas = tol;
  return s;
}

KappaSettings kappa_settings(double tol_k, double tol) {
  KappaSettings s;
  s.tol_k = tol_k;
  s.solver = solver_settings(tol);
  return s;
}

}  // namespace

PYBIND11_MODULE(_qcap, m) {
  m.doc() = "SDP bounds on quantum channel capacities";

  py::class_<QuantumChannel>(m, "QuantumChannel")
      .def_property_readonly("dim_in", &QuantumChannel::dim_in)
      .def_property_readonly("dim_out", &QuantumChannel::dim_out)
      .def_property_readonly("name", &QuantumChannel::name)
      .def_property_readonly("kraus", &QuantumChannel::kraus)
      .def("apply", &QuantumChannel::apply)
      .def("choi", [](const QuantumChannel& ch) { return choi(ch).matrix; })
      .def("to_json", [](const QuantumChannel& ch) { return io::channel_to_json(ch); })
      .def("__repr__", [](const QuantumChannel& ch) {
        return "<QuantumChannel " + ch.name() + " " + std::to_string(ch.dim_in()) + "->" +
               std::to_string(ch.dim_out()) + ">";
      });

  py::register_exception<ChannelError>(m, "ChannelError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("from_kraus", &from_kraus, py::arg("kraus"), py::arg("name") = "channel");
  m.def("channel_from_json", &io::channel_from_json, py::arg("text"));
  m.def("identity_channel", &identity_channel, py::arg("d"));
  m.def("erasure_channel", &erasure_channel, py::arg("d"), py::arg("p"));
  m.def("werner_holevo", &werner_holevo, py::arg("d"));
  m.def("nr_channel", &nr_channel, py::arg("r"));
  m.def("mixed_unitary", &mixed_unitary, py::arg("unitaries"), py::arg("probs"));
  m.def("random_channel", &random_channel, py::arg("dim_in"), py::arg("dim_out"), py::arg("kraus_rank"),
        py::arg("seed"));
  m.def("tensor_channels", &tensor_channels, py::arg("n"), py::arg("m"));

  m.def(
      "fidelity",
      [](const QuantumChannel& ch, double k, const std::string& code, double tol) {
        return fidelity(ch, k, parse_code_class(code), Side::Primal, solver_settings(tol)).value;
      },
      py::arg("channel"), py::arg("k"), py::arg("code") = "pptp", py::arg("tol") = 1e-8);
  m.def(
      "gamma",
      [](const QuantumChannel& ch, double tol) {
        const GammaResult g = gamma(ch, Side::Both, solver_settings(tol));
        return py::make_tuple(g.gamma, *g.dual_mu);
      },
      py::arg("channel"), py::arg("tol") = 1e-8, "Returns (primal, dual) values of Gamma.");
  m.def(
      "q_gamma", [](const QuantumChannel& ch, double tol) { return gamma(ch, Side::Primal, solver_settings(tol)).q_gamma; },
      py::arg("channel"), py::arg("tol") = 1e-8);
  m.def(
      "q_theta", [](const QuantumChannel& ch, double tol) { return cb_norm_pt(ch, solver_settings(tol)).q_theta; },
      py::arg("channel"), py::arg("tol") = 1e-8);
  m.def(
      "kappa",
      [](const QuantumChannel& ch, const std::string& code, double tol_k, double tol) {
        return kappa(ch, parse_code_class(code), kappa_settings(tol_k, tol)).kappa;
      },
      py::arg("channel"), py::arg("code") = "pptp", py::arg("tol_k") = 1e-4, py::arg("tol") = 1e-8);
  m.def(
      "upsilon",
      [](const QuantumChannel& ch, double tol) { return upsilon(kraus_support(ch), solver_settings(tol)).upsilon; },
      py::arg("channel"), py::arg("tol") = 1e-8);
  m.def(
      "report",
      [](const QuantumChannel& ch, const std::string& bounds_list) {
        return bounds::to_json(bounds::report(ch, bounds::parse_bound_list(bounds_list)), false);
      },
      py::arg("channel"), py::arg("bounds"), "JSON bound report for a comma-separated list of bound identifiers.");
  m.def(
      "verify",
      [](const std::string& suites, std::uint64_t seed, int random_channels) {
        bounds::VerifyOptions opt;
        opt.random_channels = random_channels;
        const auto rep = bounds::verify_suite(bounds::parse_suite_list(suites), seed, opt);
        return py::make_tuple(rep.passed(), bounds::to_json(rep));
      },
      py::arg("suites"), py::arg("seed") = 42, py::arg("random_channels") = 10,
      "Returns (passed, JSON report).");
}
