#pragma once

#include "msms/fem1d.hpp"
#include "msms/mixture.hpp"
#include "msms/statemap.hpp"

#include <vector>

namespace msms {

/// Everything that stays fixed over a run: species, mesh and potential data.
struct Problem {
  MixtureSpec spec;
  Grid1D grid{100};
  double phi_left = 0.0;
  double phi_right = 0.0;
  /// When false the potential is held at zero and the Poisson coupling is dropped.
  bool electric_field = true;

  void validate() const;
  /// Background charge f sampled at the nodes.
  Field background() const;
};

struct SolverParams {
  double tau = 1e-3;
  double eps_reg = 0x1p-52;
  double eps_tol = 1e-10;
  int m_max = 100;
  double eta = 1e-5;
  bool coupled_solve = true;

  void validate() const;
};

/// Dirichlet lift: phi_D solves -lambda phi_D'' = f with the boundary data,
/// w_D,i = zeta_i phi_D.
struct Lift {
  Field phi_D;
  Fields w_D;  // (n-1) x nodes
};

/// Nodal unknowns u = w - w_D and phi, plus the compositions they map to.
struct State {
  double t = 0.0;
  Fields u;  // (n-1) x nodes
  Field phi;
  std::vector<Composition> comp;

  int nodes() const { return static_cast<int>(phi.size()); }
  Fields rho() const;  // n x nodes
  Fields x() const;    // n x nodes
  Field c_tot() const;
};

/// Entropy variables w = u + w_D and phi at node j.
EntropyVars node_entropy_vars(const State& s, const Lift& lift, int j);

/// Recomputes every nodal composition from (u, phi).
void refresh_compositions(State& s, const Lift& lift, const MixtureSpec& spec);

/// Builds a state from nodal unknowns.
State make_state(double t, Fields u, Field phi, const Lift& lift, const MixtureSpec& spec);

/// Composition at the midpoint of element e from the averaged nodal
/// entropy variables.
Composition element_composition(const State& s, const Lift& lift, int e, const MixtureSpec& spec);

/// Mobility matrix B per element, evaluated at the element midpoint.
std::vector<SmallMat> element_mobility(const State& s, const Lift& lift, const MixtureSpec& spec);

/// Total charge sum_i z_i rho_i / M_i at every node.
Field nodal_charge(const State& s, const MixtureSpec& spec);

}  // namespace msms
