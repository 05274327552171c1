#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spde/harness.hpp"
#include "spde/io.hpp"

namespace py = pybind11;
using namespace spde;

namespace {

py::array_t<double> to_array(const FieldSample& f) {
  const auto& g = f.grid();
  py::array_t<double> out({g.N + 1, g.M1 + 1, g.M2 + 1});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

FieldSample from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 3) throw std::invalid_argument("field must be a 3-d array (t, y, z)");
  const SpaceTimeGrid g(static_cast<int>(a.shape(0)) - 1, static_cast<int>(a.shape(1)) - 1,
                        static_cast<int>(a.shape(2)) - 1);
  return FieldSample(g, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict estimates_dict(const PluginEstimates& e) {
  py::dict d;
  d["case"] = std::string(to_string(e.kind));
  d["failure"] = e.failure ? py::object(py::str(std::string(to_string(*e.failure)))) : py::object(py::none());
  d["theta0"] = e.theta0;
  d["theta1"] = e.theta1;
  d["eta1"] = e.eta1;
  d["theta2"] = e.theta2;
  d["sigma2"] = e.sigma2;
  d["mu0"] = e.mu0;
  d["lambda11"] = e.lambda11_hat;
  return d;
}

py::dict record_dict(const ReplicationRecord& r) {
  py::dict d;
  d["rep_index"] = r.rep_index;
  d["scale"] = r.fit.scale;
  d["kappa"] = r.fit.kappa_hat;
  d["eta"] = r.fit.eta_hat;
  d["contrast"] = r.fit.contrast;
  d["converged"] = r.fit.converged;
  d["qv11"] = r.qv11;
  d["qv12"] = r.qv12;
  d["degenerate"] = r.degenerate;
  d["estimates"] = estimates_dict(r.estimates);
  return d;
}

ModelParams make_params(double theta0, double theta1, double eta1, double theta2, double sigma, double alpha,
                        std::optional<double> mu0) {
  return ModelParams(theta0, theta1, eta1, theta2, sigma, alpha, mu0);
}

}  // namespace

PYBIND11_MODULE(_spdeest, m) {
  m.doc() = "Simulation and estimation for a linear parabolic SPDE on the unit square";
  py::register_exception<ResourceError>(m, "ResourceError");

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&make_params), py::arg("theta0"), py::arg("theta1"), py::arg("eta1"), py::arg("theta2"),
           py::arg("sigma"), py::arg("alpha"), py::arg("mu0") = py::none())
      .def_property_readonly("theta0", &ModelParams::theta0)
      .def_property_readonly("theta1", &ModelParams::theta1)
      .def_property_readonly("eta1", &ModelParams::eta1)
      .def_property_readonly("theta2", &ModelParams::theta2)
      .def_property_readonly("sigma", &ModelParams::sigma)
      .def_property_readonly("alpha", &ModelParams::alpha)
      .def_property_readonly("mu0", &ModelParams::mu0)
      .def_property_readonly("kappa", &ModelParams::kappa)
      .def_property_readonly("eta", &ModelParams::eta);

  m.def("eigenvalue", [](int k, int l, const ModelParams& p) { return eigenvalue(Mode{k, l}, p); });
  m.def("eigenfunction", [](int k, int l, double y, double z, const ModelParams& p) {
    return eigenfunction(Mode{k, l}, y, z, p);
  });

  m.def(
      "simulate_field",
      [](const ModelParams& p, const std::string& kind, int N, int M1, int M2, int K, int L, std::uint64_t seed,
         std::uint64_t rep) {
        return to_array(
            simulate_field({p, parse_noise_kind(kind), SpaceTimeGrid(N, M1, M2), TruncationSpec(K, L), {}, RngSeed{seed}, rep}));
      },
      py::arg("params"), py::arg("kind"), py::arg("N"), py::arg("M1"), py::arg("M2"), py::arg("K"), py::arg("L"),
      py::arg("seed"), py::arg("rep") = 0);

  m.def("write_field", [](const std::string& path, py::array_t<double> a) { write_field(path, from_array(a)); });
  m.def("read_field", [](const std::string& path) { return to_array(read_field(path)); });

  m.def(
      "expected_squared_increments",
      [](const ModelParams& p, const std::string& kind, int N, double y, double z, int K, int L) {
        return expected_squared_increment_series(p, parse_noise_kind(kind), N, y, z, TruncationSpec(K, L));
      },
      py::arg("params"), py::arg("kind"), py::arg("N"), py::arg("y"), py::arg("z"), py::arg("K"), py::arg("L"));
  m.def("asymptotic_mean", [](const ModelParams& p, const std::string& kind, double y, double z) {
    return asymptotic_mean(p, parse_noise_kind(kind), y, z);
  });

  m.def(
      "estimate_field",
      [](py::array_t<double> a, const std::string& config_json, std::uint64_t rep) {
        return record_dict(estimate_field(from_array(a), parse_config(config_json), rep));
      },
      py::arg("field"), py::arg("config_json"), py::arg("rep") = 0);
  m.def("run_replication", [](const std::string& config_json, std::uint64_t rep) {
    return record_dict(run_replication(parse_config(config_json), rep));
  });
  m.def(
      "run_monte_carlo",
      [](const std::string& config_json) {
        const ExperimentConfig c = parse_config(config_json);
        SummaryTable t;
        {
          py::gil_scoped_release release;
          t = run_monte_carlo(c);
        }
        return py::make_tuple(summary_csv(t), summary_json(t, c), records_csv(t));
      },
      "Returns (summary_csv, summary_json, records_csv)");
  m.def("default_config", [] { return config_to_json(ExperimentConfig{}); });

  m.def("q1_plugin", [](double s, double kappa, double eta, double qv11, double qv12, double alpha) {
    return estimates_dict(q1_plugin(s, kappa, eta, qv11, qv12, alpha));
  });
  m.def("q2_known_plugin", [](double S, double kappa, double eta, double qv11, double mu0, double alpha) {
    return estimates_dict(q2_known_plugin(S, kappa, eta, qv11, mu0, alpha));
  });
  m.def("q2_unknown_plugin", [](double S, double kappa, double eta, double qv11, double qv12, double alpha) {
    return estimates_dict(q2_unknown_plugin(S, kappa, eta, qv11, qv12, alpha));
  });
}
