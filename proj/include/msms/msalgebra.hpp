#pragma once

#include "msms/mixture.hpp"

namespace msms {

/// Pointwise Maxwell-Stefan operators for one composition.
struct FluxOperators {
  SmallMat A;   // n x n, D = -A J
  SmallMat A0;  // (n-1) x (n-1), D' = -A0 J'
  SmallMat C;   // (n-1) x (n-1), symmetric positive definite
  SmallMat B;   // (n-1) x (n-1) mobility, J' = -B grad w
  SmallMat R;   // R_ij = rho_i delta_ij - rho_i rho_j
};

/// A_ii = sum_{l != i} k_il rho_l, A_ij = -k_ij rho_i. Columns sum to zero.
SmallMat build_A(const SmallVec& rho, const SmallMat& k);

/// Reduced matrix acting on the first n-1 fluxes.
SmallMat build_A0(const SmallVec& rho, const SmallMat& k);

/// C_ij = A_ij/rho_i - A_in/rho_i - A_nj/rho_n + A_nn/rho_n.
/// Throws DomainError if any rho_i vanishes.
SmallMat build_C(const SmallVec& rho, const SmallMat& k);

/// Projection R = diag(rho') - rho' rho'^T on the first n-1 species.
SmallMat build_R(const SmallVec& rho);

/// Mobility B = A0^{-1} R / c_tot, so that B grad w equals A0^{-1} D'.
SmallMat build_B(const SmallVec& rho, double c_tot, const SmallMat& k);

/// The alternative scaling c_tot * C^{-1}; kept for inspection only.
SmallMat build_B_scaled_inverse_C(const SmallVec& rho, double c_tot, const SmallMat& k);

FluxOperators flux_operators(const SmallVec& rho, double c_tot, const SmallMat& k);

/// J' = -A0^{-1} D'. The full flux vector, with J_n = -sum J', is returned
/// when `with_last` is set.
SmallVec flux_from_driving(const SmallVec& rho, const SmallMat& k, const SmallVec& d_prime,
                           bool with_last = false);

/// Relative mismatch between A0^{-1} D' and B grad w, where grad x is
/// reconstructed from (grad w, grad phi) by the chain rule of the entropy
/// variables.
double flux_equivalence_check(const Composition& comp, const SmallMat& k, const SmallVec& grad_w,
                              double grad_phi, const MixtureSpec& spec);

}  // namespace msms
