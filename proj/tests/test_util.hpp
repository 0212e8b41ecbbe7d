#pragma once

#include "msms/mixture.hpp"

#include <random>

namespace msms::testing {

/// Three species with the diffusivities used throughout the examples.
inline MixtureSpec example_spec(double m1, double m2, double m3) {
  MixtureSpec s;
  s.n = 3;
  s.M = SmallVec(3);
  s.M << m1, m2, m3;
  s.z = SmallVec(3);
  s.z << 1.0, 1.0, 0.0;
  s.Dms = SmallMat::Zero(3, 3);
  s.Dms(0, 1) = s.Dms(1, 0) = 0.833;
  s.Dms(0, 2) = s.Dms(2, 0) = 0.680;
  s.Dms(1, 2) = s.Dms(2, 1) = 0.168;
  return s;
}

/// Uniform point in the open simplex, kept away from the faces by `floor`.
inline SmallVec random_simplex(std::mt19937_64& rng, int n, double floor = 1e-3) {
  std::exponential_distribution<double> e(1.0);
  SmallVec x(n);
  for (int i = 0; i < n; ++i) x[i] = e(rng);
  x /= x.sum();
  x = (x.array() * (1.0 - n * floor) + floor).matrix();
  return x;
}

inline MixtureSpec random_spec(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> mass(0.5, 6.0);
  std::uniform_real_distribution<double> diff(0.1, 2.0);
  std::uniform_int_distribution<int> charge(-2, 2);
  MixtureSpec s;
  s.n = n;
  s.M = SmallVec(n);
  s.z = SmallVec(n);
  s.Dms = SmallMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    s.M[i] = mass(rng);
    s.z[i] = charge(rng);
    for (int j = i + 1; j < n; ++j) s.Dms(i, j) = s.Dms(j, i) = diff(rng);
  }
  return s;
}

/// Composition from molar fractions, computed directly from the definitions.
inline Composition composition_of(const SmallVec& x, const MixtureSpec& s) {
  Composition c;
  c.x = x;
  c.c_tot = 1.0 / s.M.dot(x);
  c.rho = c.c_tot * s.M.cwiseProduct(x);
  return c;
}

}  // namespace msms::testing
