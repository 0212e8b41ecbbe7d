#include "msms/msalgebra.hpp"
#include "msms/statemap.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Dense>

using namespace msms;
using msms::testing::composition_of;
using msms::testing::random_simplex;
using msms::testing::random_spec;

namespace {

SmallMat k2(double k12) {
  SmallMat k = SmallMat::Zero(2, 2);
  k(0, 1) = k(1, 0) = k12;
  return k;
}

SmallVec vec(std::initializer_list<double> v) {
  SmallVec out(static_cast<int>(v.size()));
  int i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

// grad x from grad w by solving the full n x n chain rule with sum(dx) = 0.
Eigen::VectorXd grad_x_oracle(const Composition& c, const SmallVec& gw, double gphi,
                              const MixtureSpec& s) {
  const int n = s.n;
  const SmallVec zeta = s.charge_contrast();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n - 1; ++i) {
    a(i, i) = 1.0 / (s.M[i] * c.x[i]);
    a(i, n - 1) = -1.0 / (s.M[n - 1] * c.x[n - 1]);
    b[i] = gw[i] - zeta[i] * gphi;
  }
  a.row(n - 1).setOnes();
  b[n - 1] = 0.0;
  return a.fullPivLu().solve(b);
}

}  // namespace

TEST_CASE("A matrix examples") {
  const SmallMat a = build_A(vec({0.25, 0.75}), k2(2.0));
  CHECK(a(0, 0) == doctest::Approx(1.5));
  CHECK(a(0, 1) == doctest::Approx(-0.5));
  CHECK(a(1, 0) == doctest::Approx(-1.5));
  CHECK(a(1, 1) == doctest::Approx(0.5));

  const SmallMat e1 = build_A(vec({1.0, 0.0}), k2(3.0));
  CHECK(e1(0, 0) == 0.0);
  CHECK(e1(0, 1) == -3.0);
  CHECK(e1(1, 0) == 0.0);
  CHECK(e1(1, 1) == 3.0);
}

TEST_CASE("A has ones in the kernel of its transpose") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + trial % 5;
    const MixtureSpec s = random_spec(rng, n);
    const SmallVec x = random_simplex(rng, n, 0.0);
    const Composition c = composition_of(x, s);
    const SmallMat a = build_A(c.rho, rescaled_k(s, c.c_tot));
    for (int j = 0; j < n; ++j) {
      double off = 0.0;
      for (int i = 0; i < n; ++i)
        if (i != j) off += a(i, j);
      REQUIRE(a(j, j) + off == 0.0);
    }
  }
}

TEST_CASE("A0 examples") {
  CHECK(build_A0(vec({0.3, 0.7}), k2(2.5))(0, 0) == 2.5);
  CHECK(build_A0(vec({0.9, 0.1}), k2(2.5))(0, 0) == 2.5);

  SmallMat k = SmallMat::Zero(3, 3);
  k(0, 1) = k(1, 0) = 3;
  k(0, 2) = k(2, 0) = 6;
  k(1, 2) = k(2, 1) = 9;
  const SmallVec third = SmallVec::Constant(3, 1.0 / 3);
  const SmallMat a0 = build_A0(third, k);
  CHECK(a0(0, 0) == doctest::Approx(5));
  CHECK(a0(0, 1) == doctest::Approx(1));
  CHECK(a0(1, 0) == doctest::Approx(2));
  CHECK(a0(1, 1) == doctest::Approx(7));

  SmallMat kappa = SmallMat::Constant(4, 4, 1.7);
  kappa.diagonal().setZero();
  const SmallMat iso = build_A0(vec({0.1, 0.2, 0.3, 0.4}), kappa);
  CHECK((iso - 1.7 * SmallMat::Identity(3, 3)).norm() < 1e-15);
}

TEST_CASE("A0 reproduces the reduced flux relation D' = -A0 J'") {
  // Eliminate J_n = -sum J' from D = -A J and compare with A0 directly.
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 4;
    const MixtureSpec s = random_spec(rng, n);
    const Composition c = composition_of(random_simplex(rng, n), s);
    const SmallMat k = rescaled_k(s, c.c_tot);
    const SmallMat a = build_A(c.rho, k);
    Eigen::MatrixXd reduced(n - 1, n - 1);
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < n - 1; ++j) reduced(i, j) = a(i, j) - a(i, n - 1);
    const SmallMat a0 = build_A0(c.rho, k);
    CHECK((reduced - a0).norm() <= 1e-12 * std::max(1.0, a0.norm()));
  }
}

TEST_CASE("C closed forms and symmetry") {
  const double rho1 = 0.3;
  const SmallMat c = build_C(vec({rho1, 1 - rho1}), k2(1.3));
  CHECK(c(0, 0) == doctest::Approx(1.3 / (rho1 * (1 - rho1))).epsilon(1e-13));
  CHECK(build_C(vec({0.5, 0.5}), k2(2.0))(0, 0) == doctest::Approx(8.0));
  CHECK_THROWS_AS(build_C(vec({1.0, 0.0}), k2(2.0)), DomainError);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10000; ++trial) {
    const MixtureSpec s = random_spec(rng, 3);
    const Composition comp = composition_of(random_simplex(rng, 3), s);
    const SmallMat cm = build_C(comp.rho, rescaled_k(s, comp.c_tot));
    REQUIRE((cm - cm.transpose()).norm() <= 1e-12 * cm.norm());
    SmallVec v(2);
    v << g(rng), g(rng);
    REQUIRE(v.dot(cm * v) > 0.0);
  }
}

TEST_CASE("B for two species") {
  const SmallMat b = build_B(vec({0.25, 0.75}), 1.0, k2(2.0));
  CHECK(b(0, 0) == doctest::Approx(0.09375).epsilon(1e-14));

  // Boundary composition: the mobility vanishes.
  CHECK(build_B(vec({1.0, 0.0}), 1.0, k2(2.0))(0, 0) == 0.0);
  CHECK(build_B(vec({1.0 - 1e-9, 1e-9}), 1.0, k2(2.0))(0, 0) < 1e-9);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const MixtureSpec s = random_spec(rng, 2);
    const Composition c = composition_of(random_simplex(rng, 2), s);
    const SmallMat k = rescaled_k(s, c.c_tot);
    const double closed = c.rho[0] * c.rho[1] / (k(0, 1) * c.c_tot);
    CHECK(build_B(c.rho, c.c_tot, k)(0, 0) == doctest::Approx(closed).epsilon(1e-13));
  }
}

TEST_CASE("B is symmetric positive definite and equals C^{-1} / c_tot") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + trial % 5;
    const MixtureSpec s = random_spec(rng, n);
    const Composition c = composition_of(random_simplex(rng, n), s);
    const SmallMat k = rescaled_k(s, c.c_tot);
    const SmallMat b = build_B(c.rho, c.c_tot, k);
    REQUIRE((b - b.transpose()).norm() <= 1e-8 * b.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (b + b.transpose()));
    REQUIRE(eig.eigenvalues().minCoeff() > 0.0);

    // Independent route through the A-combination C.
    const SmallMat via_c = build_B_scaled_inverse_C(c.rho, c.c_tot, k) / (c.c_tot * c.c_tot);
    REQUIRE((b - via_c).norm() <= 1e-9 * b.norm());
  }
}

TEST_CASE("flux from driving force") {
  const SmallVec j = flux_from_driving(vec({0.4, 0.6}), k2(2.0), vec({0.3}));
  CHECK(j[0] == doctest::Approx(-0.15));
  CHECK(flux_from_driving(vec({0.4, 0.6}), k2(2.0), vec({0.0}))[0] == 0.0);

  SmallMat k = SmallMat::Zero(3, 3);
  k(0, 1) = k(1, 0) = 3;
  k(0, 2) = k(2, 0) = 6;
  k(1, 2) = k(2, 1) = 9;
  const SmallVec jp = flux_from_driving(SmallVec::Constant(3, 1.0 / 3), k, vec({33, 0}));
  CHECK(jp[0] == doctest::Approx(-7));
  CHECK(jp[1] == doctest::Approx(2));

  const SmallVec full = flux_from_driving(SmallVec::Constant(3, 1.0 / 3), k, vec({33, 0}), true);
  CHECK(full.size() == 3);
  CHECK(full[2] == doctest::Approx(5));
}

TEST_CASE("flux formulations agree") {
  MixtureSpec s;
  s.n = 2;
  s.M = SmallVec::Ones(2);
  s.z = vec({1.0, 0.0});
  s.Dms = SmallMat::Ones(2, 2);
  const Composition c = composition_of(vec({0.3, 0.7}), s);
  const SmallMat k = rescaled_k(s, c.c_tot);
  CHECK(flux_equivalence_check(c, k, vec({0.0}), 0.0, s) == 0.0);
  CHECK(flux_equivalence_check(c, k, vec({0.8}), -1.3, s) <= 1e-14);

  // n = 2, equal masses: B grad w = (grad rho_1 + rho_1 rho_2 grad phi) / k12.
  const double gw = 0.8, gphi = -1.3;
  const double grad_rho = c.rho[0] * c.rho[1] * (gw - gphi);
  const double b_gw = build_B(c.rho, 1.0, k)(0, 0) * gw;
  CHECK(b_gw == doctest::Approx((grad_rho + c.rho[0] * c.rho[1] * gphi) / k(0, 1)).epsilon(1e-14));

  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  double worst = 0.0, worst_oracle = 0.0;
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 2 + trial % 3;
    const MixtureSpec sp = random_spec(rng, n);
    const Composition cp = composition_of(random_simplex(rng, n), sp);
    const SmallMat kp = rescaled_k(sp, cp.c_tot);
    SmallVec grad_w(n - 1);
    for (int i = 0; i < n - 1; ++i) grad_w[i] = g(rng);
    const double grad_phi = g(rng);
    worst = std::max(worst, flux_equivalence_check(cp, kp, grad_w, grad_phi, sp));

    const Eigen::VectorXd gx = grad_x_oracle(cp, grad_w, grad_phi, sp);
    const SmallVec d = driving_force(cp, gx, grad_phi, sp);
    const SmallVec lhs = -flux_from_driving(cp.rho, kp, d.head(n - 1));
    const SmallVec rhs = build_B(cp.rho, cp.c_tot, kp) * grad_w;
    worst_oracle = std::max(worst_oracle, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_oracle <= 1e-10);
}

TEST_CASE("flux operators bundle") {
  const MixtureSpec s = msms::testing::example_spec(2, 1, 1);
  const Composition c = composition_of(vec({0.2, 0.3, 0.5}), s);
  const SmallMat k = rescaled_k(s, c.c_tot);
  const FluxOperators ops = flux_operators(c.rho, c.c_tot, k);
  CHECK((ops.A - build_A(c.rho, k)).norm() == 0.0);
  CHECK((ops.B - build_B(c.rho, c.c_tot, k)).norm() <= 1e-15 * ops.B.norm());
  CHECK(ops.R(0, 1) == doctest::Approx(-c.rho[0] * c.rho[1]));
}
