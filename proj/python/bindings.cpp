#include "msms/msalgebra.hpp"
#include "msms/output.hpp"
#include "msms/scenario.hpp"
#include "msms/study.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

msms::MixtureSpec make_spec(const Eigen::VectorXd& M, const Eigen::VectorXd& z,
                            const Eigen::MatrixXd& Dms, double lambda) {
  msms::MixtureSpec spec;
  spec.n = static_cast<int>(M.size());
  spec.M = M;
  spec.z = z;
  spec.Dms = Dms;
  spec.lambda = lambda;
  spec.validate();
  return spec;
}

msms::ScenarioFile file_from_json(const std::string& text) {
  return msms::parse_scenario(nlohmann::json::parse(text));
}

py::dict trajectory_dict(const msms::Trajectory& traj, const msms::Problem& problem) {
  const int n = problem.spec.n;
  const auto frames = static_cast<py::ssize_t>(traj.frames.size());
  const int nodes = problem.grid.nodes();

  py::array_t<double> t(frames);
  py::array_t<double> rho({frames, static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(nodes)});
  py::array_t<double> phi({frames, static_cast<py::ssize_t>(nodes)});
  auto tv = t.mutable_unchecked<1>();
  auto rv = rho.mutable_unchecked<3>();
  auto pv = phi.mutable_unchecked<2>();
  for (py::ssize_t f = 0; f < frames; ++f) {
    const msms::State& s = traj.frames[static_cast<std::size_t>(f)];
    tv(f) = s.t;
    for (int j = 0; j < nodes; ++j) {
      for (int i = 0; i < n; ++i) rv(f, i, j) = s.comp[j].rho[i];
      pv(f, j) = s.phi[j];
    }
  }
  py::array_t<double> y(nodes);
  auto yv = y.mutable_unchecked<1>();
  for (int j = 0; j < nodes; ++j) yv(j) = problem.grid.node(j);

  std::vector<double> rt, H, H_rel, res;
  std::vector<int> its;
  for (const auto& r : traj.reports) {
    rt.push_back(r.t);
    H.push_back(r.H);
    H_rel.push_back(r.H_rel);
    res.push_back(r.entropy_residual);
    its.push_back(r.iterations);
  }
  py::dict diag;
  diag["t"] = py::array(py::cast(rt));
  diag["H"] = py::array(py::cast(H));
  diag["H_rel"] = py::array(py::cast(H_rel));
  diag["entropy_residual"] = py::array(py::cast(res));
  diag["iterations"] = py::array(py::cast(its));

  py::dict out;
  out["t"] = t;
  out["y"] = y;
  out["rho"] = rho;
  out["phi"] = phi;
  out["diagnostics"] = diag;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entropy-stable finite-element solver for ionized Maxwell-Stefan mixtures";

  py::register_exception<msms::ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<msms::NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);

  m.def("preset_names", &msms::preset_names);
  m.def(
      "preset_json", [](const std::string& name) { return msms::to_json(msms::preset(name)).dump(); },
      py::arg("name"));
  m.def(
      "normalize_scenario_json",
      [](const std::string& text) { return msms::to_json(file_from_json(text)).dump(); },
      py::arg("text"), "Validates a scenario and fills in every default.");

  m.def(
      "run_json",
      [](const std::string& text) {
        const msms::ScenarioFile file = file_from_json(text);
        const msms::Scenario sc = msms::to_scenario(file);
        msms::RunResult result;
        {
          py::gil_scoped_release release;
          result = msms::run_with_reference(
              sc, msms::parse_reference(file.diagnostics.reference),
              {file.diagnostics.fit_window[0], file.diagnostics.fit_window[1]});
        }
        py::dict out = trajectory_dict(result.traj, sc.problem);
        if (result.decay)
          out["decay_fit"] = py::dict(py::arg("slope") = result.decay->slope,
                                      py::arg("r_squared") = result.decay->r_squared,
                                      py::arg("points") = result.decay->points);
        return out;
      },
      py::arg("text"));

  m.def(
      "convergence_json",
      [](const std::string& text, int max_jobs) {
        const msms::ScenarioFile file = file_from_json(text);
        const msms::Scenario sc = msms::to_scenario(file);
        msms::ConvergenceTable table;
        {
          py::gil_scoped_release release;
          table = msms::convergence_study(sc, file.convergence.levels, file.convergence.reference,
                                          max_jobs > 0 ? max_jobs : msms::job_limit(
                                              static_cast<int>(file.convergence.levels.size()) + 1));
        }
        py::dict out;
        out["h"] = table.h;
        out["err"] = table.err;
        out["slope"] = table.slope;
        return out;
      },
      py::arg("text"), py::arg("max_jobs") = 0);

  m.def(
      "x_from_w",
      [](const Eigen::VectorXd& w, double phi, const Eigen::VectorXd& M, const Eigen::VectorXd& z) {
        const auto spec = make_spec(M, z, Eigen::MatrixXd::Ones(M.size(), M.size()), 1.0);
        return Eigen::VectorXd(msms::x_from_w({w, phi}, spec));
      },
      py::arg("w"), py::arg("phi"), py::arg("M"), py::arg("z"),
      "Molar fractions from entropy variables w_1..w_{n-1} and the potential.");
  m.def(
      "w_from_x",
      [](const Eigen::VectorXd& x, double phi, const Eigen::VectorXd& M, const Eigen::VectorXd& z) {
        const auto spec = make_spec(M, z, Eigen::MatrixXd::Ones(M.size(), M.size()), 1.0);
        return Eigen::VectorXd(msms::w_from_x(x, phi, spec));
      },
      py::arg("x"), py::arg("phi"), py::arg("M"), py::arg("z"));
  m.def(
      "mobility",
      [](const Eigen::VectorXd& rho, const Eigen::VectorXd& M, const Eigen::MatrixXd& Dms) {
        const auto spec = make_spec(M, Eigen::VectorXd::Zero(M.size()), Dms, 1.0);
        const double c = rho.cwiseQuotient(M).sum();
        return Eigen::MatrixXd(msms::build_B(rho, c, msms::rescaled_k(spec, c)));
      },
      py::arg("rho"), py::arg("M"), py::arg("Dms"), "Mobility matrix B at mass densities rho.");
  m.def(
      "convergence_rates",
      [](const std::vector<double>& hs, const std::vector<double>& errs) {
        const msms::RateFit fit = msms::convergence_rates(hs, errs);
        return py::make_tuple(fit.slopes, fit.slope);
      },
      py::arg("hs"), py::arg("errs"));
}
