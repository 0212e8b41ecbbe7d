#pragma once

#include "msms/types.hpp"

#include <functional>

namespace msms {

/// Maps molar fractions to mass production rates. Rates must sum to zero.
using ReactionFn = std::function<SmallVec(const SmallVec& x)>;

/// Background charge density as a function of position y in (0,1).
using BackgroundFn = std::function<double(double y)>;

/// Species parameters of an ionized mixture in scaled units.
struct MixtureSpec {
  int n = 0;
  SmallVec M;      // molar masses
  SmallVec z;      // charge numbers
  SmallMat Dms;    // Maxwell-Stefan diffusivities, symmetric; diagonal unused
  double lambda = 1.0;
  BackgroundFn background;  // empty means f = 0
  ReactionFn reactions;     // empty means r = 0

  /// Throws InvalidParameter when any invariant is violated.
  void validate() const;

  /// zeta_i = z_i/M_i - z_n/M_n for i < n.
  SmallVec charge_contrast() const;

  /// r(x); zero when no hook is installed. Throws DomainError if the rates
  /// do not sum to zero.
  SmallVec reaction_rates(const SmallVec& x) const;

  bool has_reactions() const { return static_cast<bool>(reactions); }

  double background_at(double y) const { return background ? background(y) : 0.0; }
};

/// Mass densities, molar fractions and total concentration at one point.
struct Composition {
  SmallVec rho;
  SmallVec x;
  double c_tot = 0.0;

  int size() const { return static_cast<int>(rho.size()); }
};

/// Checks sum rules, the c_tot bounds and rho_i = c_tot M_i x_i.
/// Returns false instead of throwing; used by tests and debug checks.
bool composition_is_consistent(const Composition& comp, const MixtureSpec& spec, double tol);

/// k_ij = 1 / (c_tot^3 M_i M_j D_ij) for i != j; diagonal set to 0.
SmallMat rescaled_k(const MixtureSpec& spec, double c_tot);

/// D_i = grad x_i + (z_i x_i - (z . x) rho_i) grad phi.
SmallVec driving_force(const Composition& comp, const SmallVec& grad_x, double grad_phi,
                       const MixtureSpec& spec);

}  // namespace msms
