#include "msms/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

namespace msms {

namespace {

std::vector<Field> final_components(const State& s) {
  const Fields rho = s.rho();
  std::vector<Field> out;
  for (int i = 0; i < rho.rows(); ++i) out.push_back(rho.row(i).transpose());
  out.push_back(s.phi);
  return out;
}

}  // namespace

int job_limit(int jobs) {
  const char* env = std::getenv("MSMS_THREADS");
  if (env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, jobs));
  }
  return std::max(1, jobs);
}

ConvergenceTable convergence_study(const Scenario& base, const std::vector<int>& levels,
                                   int reference, int max_jobs) {
  if (levels.size() < 2) throw InvalidParameter("a convergence study needs at least two levels");
  for (int level : levels)
    if (level < 2 || reference % level != 0 || level >= reference)
      throw InvalidParameter("every level must be a proper divisor of the reference mesh");

  std::vector<int> meshes = levels;
  meshes.push_back(reference);
  std::vector<State> finals(meshes.size());
  std::vector<std::exception_ptr> errors(meshes.size());

  // Largest job first so it overlaps with the small ones.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < meshes.size();) {
      const std::size_t job = meshes.size() - 1 - k;
      try {
        Scenario sc = base;
        sc.problem.grid = Grid1D(meshes[job]);
        sc.output_every = sc.T > 0.0 ? sc.T : 0.0;
        Trajectory traj = run(sc);
        finals[job] = std::move(traj.frames.back());
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(max_jobs, 1, static_cast<int>(meshes.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const Grid1D fine(reference);
  const std::vector<Field> ref = final_components(finals.back());
  const std::size_t comps = ref.size();

  ConvergenceTable table;
  table.levels = levels;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const Grid1D coarse(levels[l]);
    const std::vector<Field> u = final_components(finals[l]);
    std::vector<double> e(comps);
    for (std::size_t c = 0; c < comps; ++c) e[c] = l2_distance(coarse, u[c], fine, ref[c]);
    table.h.push_back(coarse.h());
    table.err.push_back(std::move(e));
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  table.slope.assign(comps, nan);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    std::vector<double> r(comps, nan);
    if (l > 0) {
      for (std::size_t c = 0; c < comps; ++c) {
        std::vector<double> hs(table.h.begin(), table.h.begin() + static_cast<long>(l) + 1);
        std::vector<double> es;
        for (std::size_t k = 0; k <= l; ++k) es.push_back(table.err[k][c]);
        bool positive = true;
        for (double v : es) positive = positive && v > 0.0;
        if (positive) r[c] = convergence_rates(hs, es).slope;
      }
    }
    table.rate.push_back(r);
  }
  table.slope = table.rate.back();
  return table;
}

Reference parse_reference(const std::string& name) {
  if (name == "none") return Reference::none;
  if (name == "steady") return Reference::steady;
  if (name == "uniform") return Reference::uniform;
  throw InvalidParameter("unknown relative-entropy reference '" + name + "'");
}

RunResult run_with_reference(const Scenario& scenario, Reference ref,
                             std::array<double, 2> fit_window, const StepObserver& observer) {
  RunResult out;
  out.traj = run(scenario, observer);
  const Problem& problem = scenario.problem;
  if (ref == Reference::none) return out;

  if (ref == Reference::uniform) {
    out.reference = uniform_state(masses(out.traj.frames.front(), problem.grid), problem,
                                  out.traj.lift);
  } else {
    SolverParams p = scenario.solver;
    out.reference = relax_to_steady(out.traj.frames.back(), p, out.traj.lift, problem);
  }
  attach_relative_entropy(out.traj, *out.reference, problem);

  std::vector<double> t, v;
  for (std::size_t f = 0; f < out.traj.frames.size(); ++f) {
    const StepReport& r = out.traj.reports[out.traj.frame_reports[f]];
    t.push_back(r.t);
    v.push_back(r.H_rel);
  }
  const DecayFit fit = semilog_fit(t, v, fit_window[0], fit_window[1]);
  if (fit.points >= 2) out.decay = fit;
  return out;
}

}  // namespace msms
