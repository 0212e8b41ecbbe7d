#include "msms/diagnostics.hpp"

#include <cmath>

namespace msms {

namespace {

double mixing_density(const Composition& c) {
  double sum = 0.0;
  for (int i = 0; i < c.size(); ++i)
    if (c.x[i] > 0.0) sum += c.x[i] * std::log(c.x[i]);
  return c.c_tot * sum;
}

double field_energy(const Field& a, const Field& b, const Grid1D& grid, double lambda) {
  double sum = 0.0;
  const double h = grid.h();
  for (int e = 0; e < grid.elements(); ++e) {
    const double g = ((a[e + 1] - b[e + 1]) - (a[e] - b[e])) / h;
    sum += h * g * g;
  }
  return 0.5 * lambda * sum;
}

}  // namespace

double entropy(const State& s, const Lift& lift, const Problem& problem) {
  const Grid1D& grid = problem.grid;
  double mix = 0.0;
  for (int j = 0; j < grid.nodes(); ++j) mix += grid.weight(j) * mixing_density(s.comp[j]);
  return mix + field_energy(s.phi, lift.phi_D, grid, problem.spec.lambda);
}

double relative_entropy(const State& s, const State& steady, const Problem& problem) {
  const Grid1D& grid = problem.grid;
  double mix = 0.0;
  for (int j = 0; j < grid.nodes(); ++j) {
    const Composition& c = s.comp[j];
    const Composition& r = steady.comp[j];
    double sum = 0.0;
    for (int i = 0; i < c.size(); ++i)
      if (c.x[i] > 0.0) sum += c.x[i] * std::log(c.x[i] / r.x[i]);
    mix += grid.weight(j) * c.c_tot * sum;
  }
  return mix + field_energy(s.phi, steady.phi, grid, problem.spec.lambda);
}

SmallVec masses(const State& s, const Grid1D& grid) {
  const int n = s.comp.front().size();
  SmallVec m = SmallVec::Zero(n);
  for (int j = 0; j < grid.nodes(); ++j) m += grid.weight(j) * s.comp[j].rho;
  return m;
}

double entropy_step_residual(const State& current, const State& previous, const Lift& lift,
                             double tau, double eps_reg, const Problem& problem) {
  const Grid1D& grid = problem.grid;
  const MixtureSpec& spec = problem.spec;
  const double h = grid.h();

  const std::vector<SmallMat> mob = element_mobility(current, lift, spec);
  double dissipation = 0.0;
  for (int e = 0; e < grid.elements(); ++e) {
    const SmallVec du = current.u.col(e + 1) - current.u.col(e);
    const SmallVec dw = du + SmallVec(lift.w_D.col(e + 1) - lift.w_D.col(e));
    dissipation += du.dot(mob[e] * dw) / h;
  }

  double regularization = 0.0;
  double reaction = 0.0;
  const SmallVec zm = spec.z.cwiseQuotient(spec.M);
  for (int j = 0; j < grid.nodes(); ++j) {
    regularization += grid.weight(j) * current.u.col(j).squaredNorm();
    if (spec.has_reactions()) {
      const SmallVec r = spec.reaction_rates(current.comp[j].x);
      reaction += grid.weight(j) * zm.dot(r) * (current.phi[j] - lift.phi_D[j]);
    }
  }

  return entropy(current, lift, problem) + tau * dissipation + eps_reg * tau * regularization -
         tau * reaction - entropy(previous, lift, problem);
}

double stationarity(const State& current, const State& previous, double tau) {
  double worst = 0.0;
  for (int j = 0; j < current.nodes(); ++j)
    worst = std::max(worst, (current.comp[j].rho - previous.comp[j].rho).cwiseAbs().maxCoeff());
  return worst / tau;
}

RateFit convergence_rates(std::span<const double> hs, std::span<const double> errs) {
  if (hs.size() != errs.size() || hs.size() < 2)
    throw InvalidParameter("need at least two (h, error) pairs");
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (!(hs[i] > 0.0) || !(errs[i] > 0.0))
      throw InvalidParameter("mesh widths and errors must be positive");
  RateFit fit;
  for (std::size_t i = 0; i + 1 < hs.size(); ++i)
    fit.slopes.push_back(std::log(errs[i] / errs[i + 1]) / std::log(hs[i] / hs[i + 1]));
  const auto n = static_cast<double>(hs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double x = std::log(hs[i]);
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

DecayFit semilog_fit(std::span<const double> t, std::span<const double> v, double t0, double t1,
                     double floor) {
  if (t.size() != v.size()) throw InvalidParameter("time and value series differ in length");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1 || !(v[i] > floor) || !std::isfinite(v[i])) continue;
    xs.push_back(t[i]);
    ys.push_back(std::log(v[i]));
  }
  DecayFit fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 2) return fit;
  const double n = fit.points;
  double mx = 0, my = 0;
  for (int i = 0; i < fit.points; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < fit.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace msms
