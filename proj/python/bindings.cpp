#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>

#include "kirchdelay/basis.hpp"
#include "kirchdelay/cli.hpp"
#include "kirchdelay/config.hpp"
#include "kirchdelay/diagnostics.hpp"
#include "kirchdelay/errors.hpp"

namespace py = pybind11;
namespace kd = kirchdelay;

namespace {

kd::RunConfig make_config(const std::string& path, const py::dict& overrides) {
  kd::KeyValues kv = path.empty() ? kd::KeyValues{} : kd::read_key_values_file(path);
  if (path.empty()) kv.source = "defaults";
  for (auto item : overrides) {
    const auto key = py::str(item.first).cast<std::string>();
    const auto& keys = kd::known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw kd::ConfigError("unknown config path '" + key + "'");
    }
    kv.set(key, py::str(item.second).cast<std::string>());
  }
  return kd::build_run_config(kv);
}

py::dict summary_dict(const kd::RunSummary& s) {
  py::dict d;
  d["samples"] = s.samples;
  d["t_end"] = s.t_end;
  d["aborted"] = s.aborted;
  d["validation_passed"] = s.validation_passed;
  d["xi"] = s.xi;
  d["xi_window"] = py::make_tuple(s.window.lo, s.window.hi);
  d["theta1"] = s.theta.theta1;
  d["theta2"] = s.theta.theta2;
  d["E0"] = s.E0;
  d["E_end"] = s.E_end;
  if (s.fit) {
    d["K"] = s.fit->K;
    d["k"] = s.fit->k;
    d["r2"] = s.fit->r2;
  }
  if (s.equivalence) {
    d["k0"] = s.equivalence->k0;
    d["k1"] = s.equivalence->k1;
  }
  if (s.max_identity_residual) d["max_identity_residual"] = *s.max_identity_residual;
  d["max_energy_increase"] = s.max_energy_increase;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Galerkin simulator for a viscoelastic Kirchhoff beam with delayed feedback";

  py::register_exception<kd::Error>(m, "KirchdelayError");

  m.def("characteristic_roots", &kd::solve_characteristic_roots, py::arg("n"),
        py::arg("length") = 1.0, py::arg("tol") = 1e-14);

  m.def(
      "mode_matrices",
      [](int n, double length) {
        const kd::ModeSet modes = kd::build_modes(n, length);
        py::dict d;
        d["betas"] = modes.betas();
        d["lambdas"] = Eigen::VectorXd(modes.lambdas());
        d["grad"] = Eigen::MatrixXd(modes.grad_matrix());
        d["mass_residual"] = modes.mass_residual();
        d["stiffness_residual"] = modes.stiffness_residual();
        return d;
      },
      py::arg("n"), py::arg("length") = 1.0);

  m.def(
      "xi_window",
      [](const std::string& config, const py::dict& overrides) {
        const kd::XiWindow w = kd::xi_window(make_config(config, overrides).spec);
        return py::make_tuple(w.lo, w.hi);
      },
      py::arg("config") = "", py::arg("overrides") = py::dict());

  m.def(
      "validate",
      [](const std::string& config, const py::dict& overrides) {
        const kd::RunConfig c = make_config(config, overrides);
        const kd::ValidationReport report = kd::validate_config(c);
        py::list entries;
        for (const auto& e : report.entries) {
          py::dict d;
          d["name"] = e.name;
          d["condition"] = e.condition;
          d["passed"] = e.passed;
          d["margin"] = e.margin;
          d["note"] = e.note;
          entries.append(d);
        }
        py::dict out;
        out["passed"] = report.passed() && kd::xi_window(c.spec).nonempty();
        out["entries"] = entries;
        return out;
      },
      py::arg("config") = "", py::arg("overrides") = py::dict());

  m.def(
      "run",
      [](const std::string& config, const py::dict& overrides) {
        const kd::RunConfig c = make_config(config, overrides);
        kd::RunOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = kd::execute(c);
        }
        const auto& samples = outcome.trajectory.samples;
        const Eigen::Index rows = static_cast<Eigen::Index>(samples.size());
        const Eigen::Index n = c.numerics.n_modes;
        Eigen::VectorXd t(rows), E(rows), F(rows);
        Eigen::MatrixXd a(rows, n), v(rows, n), parts(rows, 7);
        for (Eigen::Index i = 0; i < rows; ++i) {
          const auto& s = samples[static_cast<std::size_t>(i)];
          t[i] = s.t;
          E[i] = s.energy.total;
          F[i] = kd::lyapunov_F(s, c.weights);
          a.row(i) = s.a.transpose();
          v.row(i) = s.v.transpose();
          const auto& e = s.energy;
          parts.row(i) << e.kinetic_rho, e.bending, e.kinetic_grad, e.kirchhoff, e.memory_deficit,
              e.history, e.delay;
        }
        py::dict d;
        d["t"] = t;
        d["E"] = E;
        d["F"] = F;
        d["a"] = a;
        d["v"] = v;
        d["energy_parts"] = parts;
        d["residual"] = outcome.residual;
        d["summary"] = summary_dict(outcome.summary);
        return d;
      },
      py::arg("config") = "", py::arg("overrides") = py::dict());

  m.def(
      "fit_decay",
      [](const std::vector<double>& t, const std::vector<double>& E, double t0) {
        const kd::DecayFit fit = kd::fit_decay(t, E, t0);
        py::dict d;
        d["K"] = fit.K;
        d["k"] = fit.k;
        d["r2"] = fit.r2;
        d["t0"] = fit.t0;
        d["t_end"] = fit.t_end;
        return d;
      },
      py::arg("t"), py::arg("E"), py::arg("t0") = 0.0);
}
