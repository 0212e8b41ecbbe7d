#include "msms/statemap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msms {

double FixedPointProblem::evaluate(double s) const {
  const double t = 1.0 - s;
  if (t <= 0.0) return 0.0;
  const double log_t = std::log(t);
  double f = 0.0;
  for (int i = 0; i < log_a.size(); ++i) f += std::exp(log_a[i] + p[i] * log_t);
  return f;
}

FixedPointProblem fixed_point_problem(const EntropyVars& ev, const MixtureSpec& spec) {
  const int n = spec.n;
  if (ev.w.size() != n - 1) throw InvalidParameter("entropy variables must have n-1 entries");
  if (!std::isfinite(ev.phi) || !ev.w.allFinite()) throw DomainError("entropy variables not finite");
  const SmallVec zeta = spec.charge_contrast();
  FixedPointProblem fp;
  fp.log_a.resize(n - 1);
  fp.p.resize(n - 1);
  constexpr double clamp = FixedPointProblem::kExponentClamp;
  for (int i = 0; i < n - 1; ++i) {
    double e = spec.M[i] * ev.w[i] - spec.M[i] * zeta[i] * ev.phi;
    if (e > clamp || e < -clamp) {
      e = std::clamp(e, -clamp, clamp);
      fp.clamped = true;
    }
    fp.log_a[i] = e;
    fp.p[i] = spec.M[i] / spec.M[n - 1];
  }
  return fp;
}

FixedPointRoot solve_fixed_point(const FixedPointProblem& fp) {
  // Unknown v = log x_n. g(v) = (e^v - 1) + sum_i exp(log_a_i + p_i v) - 1 is convex
  // and strictly increasing with g(-inf) = -1. expm1 keeps tiny s0 resolvable.
  const int m = static_cast<int>(fp.log_a.size());
  const double log_inv = -std::log(static_cast<double>(m + 1));
  double hi = 0.0;
  double lo = log_inv;
  for (int i = 0; i < m; ++i) {
    hi = std::min(hi, -fp.log_a[i] / fp.p[i]);
    lo = std::min(lo, (log_inv - fp.log_a[i]) / fp.p[i]);
  }
  auto g = [&](double v, double& dg) {
    double val = std::expm1(v);
    dg = std::exp(v);
    for (int i = 0; i < m; ++i) {
      const double term = std::exp(fp.log_a[i] + fp.p[i] * v);
      val += term;
      dg += fp.p[i] * term;
    }
    return val;
  };

  FixedPointRoot root;
  double v = hi;
  for (int it = 1; it <= 200; ++it) {
    root.iterations = it;
    double dg = 0.0;
    const double gv = g(v, dg);
    if (gv == 0.0) break;
    if (gv > 0.0) hi = v; else lo = v;
    double next = v - gv / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - v);
    v = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(v)) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(v)))
      break;
  }
  root.log_xn = v;
  root.s0 = -std::expm1(v);
  return root;
}

double solve_s0(const FixedPointProblem& fp, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
  const FixedPointRoot root = solve_fixed_point(fp);
  // Residual with 1 - s0 taken from log x_n; forming 1 - s0 directly loses
  // all relative accuracy once x_n drops below machine epsilon.
  double f = 0.0;
  for (int i = 0; i < fp.log_a.size(); ++i) f += std::exp(fp.log_a[i] + fp.p[i] * root.log_xn);
  if (std::abs(f - root.s0) > tol)
    throw SolverError("fixed-point residual above tolerance; state outside the physical regime");
  return root.s0;
}

SmallVec x_from_w(const EntropyVars& ev, const MixtureSpec& spec) {
  const FixedPointProblem fp = fixed_point_problem(ev, spec);
  const FixedPointRoot root = solve_fixed_point(fp);
  const int n = spec.n;
  SmallVec x(n);
  for (int i = 0; i < n - 1; ++i) x[i] = std::exp(fp.log_a[i] + fp.p[i] * root.log_xn);
  x[n - 1] = std::exp(root.log_xn);
  return x;
}

Composition rho_from_x(const SmallVec& x, const MixtureSpec& spec) {
  const int n = spec.n;
  if (x.size() != n) throw InvalidParameter("molar fraction vector has wrong size");
  Composition comp;
  comp.x = x;
  comp.c_tot = 1.0 / spec.M.dot(x);
  comp.rho = comp.c_tot * spec.M.cwiseProduct(x);
  return comp;
}

Composition composition_from_w(const EntropyVars& ev, const MixtureSpec& spec) {
  return rho_from_x(x_from_w(ev, spec), spec);
}

SmallVec w_from_x(const SmallVec& x, double phi, const MixtureSpec& spec) {
  const int n = spec.n;
  if (x.size() != n) throw InvalidParameter("molar fraction vector has wrong size");
  for (int i = 0; i < n; ++i)
    if (!(x[i] > 0.0)) throw DomainError("entropy variables need strictly positive molar fractions");
  const SmallVec zeta = spec.charge_contrast();
  const double last = std::log(x[n - 1]) / spec.M[n - 1];
  SmallVec w(n - 1);
  for (int i = 0; i < n - 1; ++i) w[i] = std::log(x[i]) / spec.M[i] - last + zeta[i] * phi;
  return w;
}

SmallVec w_from_rho(const Composition& comp, double phi, double phi_D, const MixtureSpec& spec) {
  SmallVec u = w_from_x(comp.x, phi, spec);
  u -= spec.charge_contrast() * phi_D;
  return u;
}

SmallMat entropy_metric(const Composition& comp, const MixtureSpec& spec) {
  const int n = spec.n;
  for (int i = 0; i < n; ++i)
    if (!(comp.x[i] > 0.0)) throw DomainError("metric undefined on the simplex boundary");
  SmallMat g = SmallMat::Constant(n - 1, n - 1, 1.0 / (spec.M[n - 1] * comp.x[n - 1]));
  for (int i = 0; i < n - 1; ++i) g(i, i) += 1.0 / (spec.M[i] * comp.x[i]);
  return g;
}

SmallMat inverse_entropy_metric(const Composition& comp, const MixtureSpec& spec) {
  // Sherman-Morrison on diag(1/d) + 11^T/d_n with d = M x; stays well conditioned
  // when x_n is tiny, unlike a factorization of the metric itself.
  const int m = spec.n - 1;
  for (int i = 0; i < spec.n; ++i)
    if (!(comp.x[i] > 0.0)) throw DomainError("metric undefined on the simplex boundary");
  const SmallVec d = spec.M.cwiseProduct(comp.x);
  const SmallVec dh = d.head(m);
  SmallMat inv = -dh * dh.transpose() / d.sum();
  inv.diagonal() += dh;
  return inv;
}

SmallVec grad_x_from_entropy(const Composition& comp, const SmallVec& grad_w, double grad_phi,
                             const MixtureSpec& spec) {
  const int n = spec.n;
  const SmallVec rhs = grad_w - spec.charge_contrast() * grad_phi;
  const SmallVec gx = inverse_entropy_metric(comp, spec) * rhs;
  SmallVec full(n);
  full.head(n - 1) = gx;
  full[n - 1] = -gx.sum();
  return full;
}

SmallMat jacobian_rho(const Composition& comp, const MixtureSpec& spec) {
  const int n = spec.n;
  const int m = n - 1;
  const SmallMat g_inv = inverse_entropy_metric(comp, spec);
  // d x' / d(w, phi)
  SmallMat dx(m, n);
  dx.leftCols(m) = g_inv;
  dx.col(m) = -g_inv * spec.charge_contrast();
  // d rho' / d x' through c_tot = (sum M_j x_j)^{-1} with x_n = 1 - sum x'
  const double c = comp.c_tot;
  SmallMat drho(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      drho(i, j) = (i == j ? c * spec.M[i] : 0.0) -
                   c * c * spec.M[i] * comp.x[i] * (spec.M[j] - spec.M[n - 1]);
  return drho * dx;
}

SmallMat jacobian_rho(const EntropyVars& ev, const MixtureSpec& spec) {
  return jacobian_rho(composition_from_w(ev, spec), spec);
}

}  // namespace msms
