#include "msms/mixture.hpp"

#include <cmath>
#include <sstream>

namespace msms {

void MixtureSpec::validate() const {
  if (n < 2 || n > kMaxSpecies) {
    std::ostringstream os;
    os << "species count must lie in [2, " << kMaxSpecies << "], got " << n;
    throw InvalidParameter(os.str());
  }
  if (M.size() != n || z.size() != n || Dms.rows() != n || Dms.cols() != n)
    throw InvalidParameter("species arrays do not match the species count");
  for (int i = 0; i < n; ++i) {
    if (!(M[i] > 0.0) || !std::isfinite(M[i]))
      throw InvalidParameter("molar masses must be positive and finite");
    if (!std::isfinite(z[i])) throw InvalidParameter("charge numbers must be finite");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!(Dms(i, j) > 0.0) || !std::isfinite(Dms(i, j)))
        throw InvalidParameter("Maxwell-Stefan diffusivities must be positive");
      if (Dms(i, j) != Dms(j, i))
        throw InvalidParameter("Maxwell-Stefan diffusivity matrix must be symmetric");
    }
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidParameter("permittivity lambda must be positive");
}

SmallVec MixtureSpec::charge_contrast() const {
  SmallVec zeta(n - 1);
  const double last = z[n - 1] / M[n - 1];
  for (int i = 0; i < n - 1; ++i) zeta[i] = z[i] / M[i] - last;
  return zeta;
}

SmallVec MixtureSpec::reaction_rates(const SmallVec& x) const {
  if (!reactions) return SmallVec::Zero(n);
  SmallVec r = reactions(x);
  if (r.size() != n) throw InvalidParameter("reaction hook returned wrong number of rates");
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  if (std::abs(r.sum()) > 1e-12 * scale)
    throw DomainError("reaction rates do not sum to zero");
  return r;
}

bool composition_is_consistent(const Composition& comp, const MixtureSpec& spec, double tol) {
  const int n = spec.n;
  if (comp.rho.size() != n || comp.x.size() != n) return false;
  if (std::abs(comp.rho.sum() - 1.0) > tol || std::abs(comp.x.sum() - 1.0) > tol) return false;
  const double lo = 1.0 / spec.M.maxCoeff();
  const double hi = 1.0 / spec.M.minCoeff();
  if (comp.c_tot < lo * (1.0 - tol) || comp.c_tot > hi * (1.0 + tol)) return false;
  for (int i = 0; i < n; ++i) {
    if (comp.rho[i] < 0.0 || comp.rho[i] > 1.0 || comp.x[i] < 0.0 || comp.x[i] > 1.0) return false;
    if (std::abs(comp.rho[i] - comp.c_tot * spec.M[i] * comp.x[i]) > tol) return false;
  }
  return true;
}

SmallMat rescaled_k(const MixtureSpec& spec, double c_tot) {
  if (!(c_tot > 0.0) || !std::isfinite(c_tot))
    throw InvalidParameter("total concentration must be positive");
  const int n = spec.n;
  const double c3 = c_tot * c_tot * c_tot;
  SmallMat k = SmallMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = spec.Dms(i, j);
      if (!(d > 0.0)) throw InvalidParameter("Maxwell-Stefan diffusivities must be positive");
      const double kij = 1.0 / (c3 * spec.M[i] * spec.M[j] * d);
      k(i, j) = kij;
      k(j, i) = kij;
    }
  }
  return k;
}

SmallVec driving_force(const Composition& comp, const SmallVec& grad_x, double grad_phi,
                       const MixtureSpec& spec) {
  const int n = spec.n;
  if (grad_x.size() != n) throw InvalidParameter("gradient size does not match species count");
  const double zx = spec.z.dot(comp.x);
  SmallVec d(n);
  for (int i = 0; i < n; ++i)
    d[i] = grad_x[i] + (spec.z[i] * comp.x[i] - zx * comp.rho[i]) * grad_phi;
  return d;
}

}  // namespace msms
