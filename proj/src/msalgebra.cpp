#include "msms/msalgebra.hpp"

#include "msms/statemap.hpp"

#include <cmath>

namespace msms {

namespace {

void check_dims(const SmallVec& rho, const SmallMat& k) {
  const auto n = rho.size();
  if (n < 2 || k.rows() != n || k.cols() != n)
    throw InvalidParameter("composition and k matrix dimensions do not match");
}

SmallMat solve_A0(const SmallMat& a0, const SmallMat& rhs) {
  Eigen::PartialPivLU<SmallMat> lu(a0);
  const double det = lu.determinant();
  if (!std::isfinite(det) || det == 0.0) throw SolverError("reduced Maxwell-Stefan matrix is singular");
  return lu.solve(rhs);
}

}  // namespace

SmallMat build_A(const SmallVec& rho, const SmallMat& k) {
  check_dims(rho, k);
  const int n = static_cast<int>(rho.size());
  SmallMat a(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int l = 0; l < n; ++l) {
      if (l == i) continue;
      diag += k(i, l) * rho[l];
      a(i, l) = -k(i, l) * rho[i];
    }
    a(i, i) = diag;
  }
  return a;
}

SmallMat build_A0(const SmallVec& rho, const SmallMat& k) {
  check_dims(rho, k);
  const int n = static_cast<int>(rho.size());
  const int last = n - 1;
  SmallMat a0(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i) {
    double diag = k(i, last);
    for (int l = 0; l < n - 1; ++l) {
      if (l == i) continue;
      diag += (k(i, l) - k(i, last)) * rho[l];
      a0(i, l) = -(k(i, l) - k(i, last)) * rho[i];
    }
    a0(i, i) = diag;
  }
  return a0;
}

SmallMat build_C(const SmallVec& rho, const SmallMat& k) {
  check_dims(rho, k);
  const int n = static_cast<int>(rho.size());
  for (int i = 0; i < n; ++i)
    if (!(rho[i] > 0.0)) throw DomainError("C is undefined on the simplex boundary");
  const SmallMat a = build_A(rho, k);
  const int last = n - 1;
  SmallMat c(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j)
      c(i, j) = a(i, j) / rho[i] - a(i, last) / rho[i] - a(last, j) / rho[last] +
                a(last, last) / rho[last];
  return c;
}

SmallMat build_R(const SmallVec& rho) {
  const int m = static_cast<int>(rho.size()) - 1;
  const auto head = rho.head(m);
  SmallMat r = -head * head.transpose();
  r.diagonal() += head;
  return r;
}

SmallMat build_B(const SmallVec& rho, double c_tot, const SmallMat& k) {
  check_dims(rho, k);
  if (!(c_tot > 0.0)) throw InvalidParameter("total concentration must be positive");
  return solve_A0(build_A0(rho, k), build_R(rho)) / c_tot;
}

SmallMat build_B_scaled_inverse_C(const SmallVec& rho, double c_tot, const SmallMat& k) {
  const SmallMat c = build_C(rho, k);
  return c_tot * c.inverse();
}

FluxOperators flux_operators(const SmallVec& rho, double c_tot, const SmallMat& k) {
  FluxOperators ops;
  ops.A = build_A(rho, k);
  ops.A0 = build_A0(rho, k);
  ops.C = build_C(rho, k);
  ops.R = build_R(rho);
  ops.B = solve_A0(ops.A0, ops.R) / c_tot;
  return ops;
}

SmallVec flux_from_driving(const SmallVec& rho, const SmallMat& k, const SmallVec& d_prime,
                           bool with_last) {
  check_dims(rho, k);
  const int n = static_cast<int>(rho.size());
  if (d_prime.size() != n - 1) throw InvalidParameter("driving force must have n-1 entries");
  SmallVec j_prime = -solve_A0(build_A0(rho, k), d_prime);
  if (!with_last) return j_prime;
  SmallVec j(n);
  j.head(n - 1) = j_prime;
  j[n - 1] = -j_prime.sum();
  return j;
}

double flux_equivalence_check(const Composition& comp, const SmallMat& k, const SmallVec& grad_w,
                              double grad_phi, const MixtureSpec& spec) {
  const int n = spec.n;
  const SmallVec grad_x = grad_x_from_entropy(comp, grad_w, grad_phi, spec);
  const SmallVec d = driving_force(comp, grad_x, grad_phi, spec);
  const SmallVec via_a0 = solve_A0(build_A0(comp.rho, k), d.head(n - 1));
  const SmallVec via_b = build_B(comp.rho, comp.c_tot, k) * grad_w;
  return (via_a0 - via_b).norm() / std::max(1.0, via_b.norm());
}

}  // namespace msms
