#pragma once

#include "msms/mixture.hpp"

namespace msms {

/// Electro-chemical potentials w_1..w_{n-1} and the potential at one point.
struct EntropyVars {
  SmallVec w;
  double phi = 0.0;
};

/// Scalar problem f(s) = sum_i a_i (1-s)^{p_i} = s whose root gives x_n = 1 - s.
///
/// Coefficients are stored as logarithms so that large entropy variables do
/// not overflow; the exponent of each a_i is clamped to [-kExponentClamp,
/// kExponentClamp] and `clamped` records whether that happened.
struct FixedPointProblem {
  static constexpr double kExponentClamp = 700.0;

  SmallVec log_a;
  SmallVec p;
  bool clamped = false;

  /// f(s) for s in [0,1].
  double evaluate(double s) const;
};

FixedPointProblem fixed_point_problem(const EntropyVars& ev, const MixtureSpec& spec);

struct FixedPointRoot {
  double s0 = 0.0;
  double log_xn = 0.0;  // log(1 - s0), kept separately for relative accuracy near s0 -> 1
  int iterations = 0;
};

/// Root of f(s) = s on (0,1). Safeguarded Newton in log(1-s): the iteration
/// starts on the right of the root of a convex increasing function and stays
/// inside an explicit bracket, so it always terminates.
FixedPointRoot solve_fixed_point(const FixedPointProblem& fp);

/// s0 with |f(s0) - s0| <= tol.
double solve_s0(const FixedPointProblem& fp, double tol);

/// Molar fractions from entropy variables. All entries lie in (0,1).
SmallVec x_from_w(const EntropyVars& ev, const MixtureSpec& spec);

/// c_tot = (sum_j M_j x_j)^{-1}, rho_i = c_tot M_i x_i.
Composition rho_from_x(const SmallVec& x, const MixtureSpec& spec);

/// x_from_w followed by rho_from_x.
Composition composition_from_w(const EntropyVars& ev, const MixtureSpec& spec);

/// Entropy variables w_i = log x_i/M_i - log x_n/M_n + zeta_i phi.
SmallVec w_from_x(const SmallVec& x, double phi, const MixtureSpec& spec);

/// u = w - w_D with w_D,i = zeta_i phi_D. Throws DomainError if some x_i <= 0.
SmallVec w_from_rho(const Composition& comp, double phi, double phi_D, const MixtureSpec& spec);

/// Metric G_ij = delta_ij/(M_i x_i) + 1/(M_n x_n) with dw = G dx' + zeta dphi.
SmallMat entropy_metric(const Composition& comp, const MixtureSpec& spec);

/// Closed-form inverse of entropy_metric.
SmallMat inverse_entropy_metric(const Composition& comp, const MixtureSpec& spec);

/// Full gradient of x (n entries) consistent with grad w and grad phi.
SmallVec grad_x_from_entropy(const Composition& comp, const SmallVec& grad_w, double grad_phi,
                             const MixtureSpec& spec);

/// d rho' / d(w, phi), shape (n-1) x n, last column is the phi derivative.
SmallMat jacobian_rho(const Composition& comp, const MixtureSpec& spec);
SmallMat jacobian_rho(const EntropyVars& ev, const MixtureSpec& spec);

}  // namespace msms
