#include "msms/model.hpp"

#include "msms/msalgebra.hpp"

#include <cmath>

namespace msms {

void Problem::validate() const {
  spec.validate();
  if (!std::isfinite(phi_left) || !std::isfinite(phi_right))
    throw InvalidParameter("potential boundary values must be finite");
  if (!electric_field && (phi_left != 0.0 || phi_right != 0.0))
    throw InvalidParameter("potential boundary values must be zero when the field is disabled");
}

Field Problem::background() const {
  Field f(grid.nodes());
  for (int j = 0; j < grid.nodes(); ++j) f[j] = spec.background_at(grid.node(j));
  return f;
}

void SolverParams::validate() const {
  if (!(tau > 0.0)) throw InvalidParameter("time step must be positive");
  if (!(eps_reg >= 0.0)) throw InvalidParameter("regularization must be non-negative");
  if (!(eps_tol > 0.0)) throw InvalidParameter("iteration tolerance must be positive");
  if (m_max < 1) throw InvalidParameter("iteration cap must be at least 1");
  if (!(eta > 0.0) || eta >= 0.5) throw InvalidParameter("initial floor eta must lie in (0, 0.5)");
}

Fields State::rho() const {
  const int n = comp.empty() ? 0 : comp.front().size();
  Fields out(n, nodes());
  for (int j = 0; j < nodes(); ++j) out.col(j) = comp[j].rho;
  return out;
}

Fields State::x() const {
  const int n = comp.empty() ? 0 : comp.front().size();
  Fields out(n, nodes());
  for (int j = 0; j < nodes(); ++j) out.col(j) = comp[j].x;
  return out;
}

Field State::c_tot() const {
  Field out(nodes());
  for (int j = 0; j < nodes(); ++j) out[j] = comp[j].c_tot;
  return out;
}

EntropyVars node_entropy_vars(const State& s, const Lift& lift, int j) {
  return {s.u.col(j) + lift.w_D.col(j), s.phi[j]};
}

void refresh_compositions(State& s, const Lift& lift, const MixtureSpec& spec) {
  s.comp.resize(s.nodes());
  for (int j = 0; j < s.nodes(); ++j) s.comp[j] = composition_from_w(node_entropy_vars(s, lift, j), spec);
}

State make_state(double t, Fields u, Field phi, const Lift& lift, const MixtureSpec& spec) {
  State s;
  s.t = t;
  s.u = std::move(u);
  s.phi = std::move(phi);
  refresh_compositions(s, lift, spec);
  return s;
}

Composition element_composition(const State& s, const Lift& lift, int e, const MixtureSpec& spec) {
  const EntropyVars a = node_entropy_vars(s, lift, e);
  const EntropyVars b = node_entropy_vars(s, lift, e + 1);
  return composition_from_w({0.5 * (a.w + b.w), 0.5 * (a.phi + b.phi)}, spec);
}

std::vector<SmallMat> element_mobility(const State& s, const Lift& lift, const MixtureSpec& spec) {
  std::vector<SmallMat> out(s.nodes() - 1);
  for (int e = 0; e + 1 < s.nodes(); ++e) {
    const Composition c = element_composition(s, lift, e, spec);
    out[e] = build_B(c.rho, c.c_tot, rescaled_k(spec, c.c_tot));
  }
  return out;
}

Field nodal_charge(const State& s, const MixtureSpec& spec) {
  Field q(s.nodes());
  const SmallVec zm = spec.z.cwiseQuotient(spec.M);
  for (int j = 0; j < s.nodes(); ++j) q[j] = zm.dot(s.comp[j].rho);
  return q;
}

}  // namespace msms
