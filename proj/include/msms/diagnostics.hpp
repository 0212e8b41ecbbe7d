#pragma once

#include "msms/model.hpp"

#include <limits>
#include <span>
#include <vector>

namespace msms {

/// Per-step diagnostics. H_rel is NaN when no reference state was supplied.
struct StepReport {
  double t = 0.0;
  double tau = 0.0;
  double H = 0.0;
  double H_rel = std::numeric_limits<double>::quiet_NaN();
  SmallVec masses;
  double entropy_residual = 0.0;
  int iterations = 0;
  double zeta_inf = 0.0;
  /// ||rho^k - rho^{k-1}||_inf / tau
  double stationarity = 0.0;
};

/// H = int c_tot sum x_i log x_i + lambda/2 |(phi - phi_D)'|^2 dy. Trapezoidal
/// rule for the mixing part, per-element difference quotients for the field.
double entropy(const State& s, const Lift& lift, const Problem& problem);

/// Entropy relative to a steady state (x_inf, phi_inf).
double relative_entropy(const State& s, const State& steady, const Problem& problem);

/// Trapezoidal L1 norms of each rho_i.
SmallVec masses(const State& s, const Grid1D& grid);

/// Signed residual of the discrete entropy inequality between consecutive
/// states; non-positive for an exact solution of the scheme.
double entropy_step_residual(const State& current, const State& previous, const Lift& lift,
                             double tau, double eps_reg, const Problem& problem);

/// ||rho^k - rho^{k-1}||_inf / tau.
double stationarity(const State& current, const State& previous, double tau);

struct RateFit {
  std::vector<double> slopes;  // one per consecutive pair of levels
  double slope = 0.0;          // least-squares slope of log err against log h
};

RateFit convergence_rates(std::span<const double> hs, std::span<const double> errs);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Least-squares line through (t, log v) for samples with t in [t0, t1] and v > floor.
DecayFit semilog_fit(std::span<const double> t, std::span<const double> v, double t0, double t1,
                     double floor = 0.0);

}  // namespace msms
