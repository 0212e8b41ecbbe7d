#include "msms/stepper.hpp"

#include "msms/msalgebra.hpp"

#include <cmath>
#include <sstream>

namespace msms {

namespace {

Field solve_potential(const Problem& problem, const Field& charge) {
  return poisson_solve(problem.grid, charge, problem.spec.lambda, problem.phi_left,
                       problem.phi_right);
}

StepReport make_report(const State& current, const State* previous, const Lift& lift,
                       const Problem& problem, const SolverParams& params) {
  StepReport r;
  r.t = current.t;
  r.H = entropy(current, lift, problem);
  r.masses = masses(current, problem.grid);
  if (previous) {
    r.tau = params.tau;
    r.entropy_residual =
        entropy_step_residual(current, *previous, lift, params.tau, params.eps_reg, problem);
    r.stationarity = stationarity(current, *previous, params.tau);
  }
  return r;
}

// Rows and columns [offset, offset + size) of every block.
BlockTridiagonal sub_blocks(const BlockTridiagonal& a, int offset, int size) {
  BlockTridiagonal out(a.nodes(), size);
  for (int j = 0; j < a.nodes(); ++j)
    for (int off = -1; off <= 1; ++off) {
      if (j + off < 0 || j + off >= a.nodes()) continue;
      out.block(j, off) = a.block(j, off).block(offset, offset, size, size);
    }
  return out;
}

Eigen::VectorXd solve_split(BandedSystem sys, int n, bool field) {
  const int nodes = sys.matrix.nodes();
  const int species = n - 1;
  Eigen::VectorXd zeta = Eigen::VectorXd::Zero(sys.matrix.size());

  // Potential increment with frozen species.
  if (field) {
    BandedSystem pot{sub_blocks(sys.matrix, species, 1), Eigen::VectorXd(nodes), {}};
    for (int j = 0; j < nodes; ++j) pot.rhs[j] = sys.rhs[j * n + species];
    for (const auto& c : sys.constraints) pot.constraints.push_back({c.node, 0, c.value});
    const Eigen::VectorXd dphi = solve_banded(std::move(pot));
    for (int j = 0; j < nodes; ++j) zeta[j * n + species] = dphi[j];
  }

  // Species increment with the potential increment moved to the right-hand side.
  const Eigen::VectorXd coupling = sys.matrix.multiply(zeta);
  BandedSystem spc{sub_blocks(sys.matrix, 0, species), Eigen::VectorXd(nodes * species), {}};
  for (int j = 0; j < nodes; ++j)
    for (int i = 0; i < species; ++i)
      spc.rhs[j * species + i] = sys.rhs[j * n + i] - coupling[j * n + i];
  const Eigen::VectorXd dw = solve_banded(std::move(spc));
  for (int j = 0; j < nodes; ++j)
    for (int i = 0; i < species; ++i) zeta[j * n + i] = dw[j * species + i];
  return zeta;
}

}  // namespace

Lift build_lift(const Problem& problem) {
  const Grid1D& grid = problem.grid;
  const int n = problem.spec.n;
  Lift lift;
  if (problem.electric_field)
    lift.phi_D = solve_potential(problem, problem.background());
  else
    lift.phi_D = Field::Zero(grid.nodes());
  lift.w_D = problem.spec.charge_contrast() * lift.phi_D.transpose();
  if (lift.w_D.rows() != n - 1) throw InvalidParameter("lift has wrong shape");
  return lift;
}

State init_state(const Scenario& scenario, const Lift& lift) {
  const Problem& problem = scenario.problem;
  const MixtureSpec& spec = problem.spec;
  const Grid1D& grid = problem.grid;
  const int n = spec.n;
  const double eta = scenario.solver.eta;
  if (!scenario.initial) throw InvalidParameter("scenario has no initial densities");

  std::vector<Composition> comp(grid.nodes());
  for (int j = 0; j < grid.nodes(); ++j) {
    SmallVec rho = scenario.initial(grid.node(j));
    if (rho.size() != n) throw InvalidParameter("initial densities have wrong size");
    for (int i = 0; i < n - 1; ++i) rho[i] = std::max(rho[i], eta);
    rho[n - 1] = 1.0 - rho.head(n - 1).sum();
    if (!(rho[n - 1] > 0.0)) {
      std::ostringstream os;
      os << "initial data leaves no mass for the last species at y = " << grid.node(j);
      throw InvalidParameter(os.str());
    }
    Composition c;
    c.rho = rho;
    c.c_tot = rho.cwiseQuotient(spec.M).sum();
    c.x = rho.cwiseQuotient(spec.M) / c.c_tot;
    comp[j] = c;
  }

  Field phi = Field::Zero(grid.nodes());
  if (problem.electric_field) {
    Field charge = problem.background();
    const SmallVec zm = spec.z.cwiseQuotient(spec.M);
    for (int j = 0; j < grid.nodes(); ++j) charge[j] += zm.dot(comp[j].rho);
    phi = solve_potential(problem, charge);
  }

  Fields u(n - 1, grid.nodes());
  for (int j = 0; j < grid.nodes(); ++j) u.col(j) = w_from_rho(comp[j], phi[j], lift.phi_D[j], spec);
  return make_state(0.0, std::move(u), std::move(phi), lift, spec);
}

State uniform_state(const SmallVec& rho, const Problem& problem, const Lift& lift) {
  const MixtureSpec& spec = problem.spec;
  const Grid1D& grid = problem.grid;
  Composition c;
  c.rho = rho / rho.sum();
  c.c_tot = c.rho.cwiseQuotient(spec.M).sum();
  c.x = c.rho.cwiseQuotient(spec.M) / c.c_tot;
  Field phi = Field::Zero(grid.nodes());
  if (problem.electric_field) {
    Field charge = problem.background().array() + spec.z.cwiseQuotient(spec.M).dot(c.rho);
    phi = solve_potential(problem, charge);
  }
  Fields u(spec.n - 1, grid.nodes());
  for (int j = 0; j < grid.nodes(); ++j) u.col(j) = w_from_rho(c, phi[j], lift.phi_D[j], spec);
  return make_state(0.0, std::move(u), std::move(phi), lift, spec);
}

BandedSystem assemble_inner_system(const State& previous, const State& guess,
                                   const SolverParams& params, const Lift& lift,
                                   const Problem& problem) {
  const MixtureSpec& spec = problem.spec;
  const Grid1D& grid = problem.grid;
  const int n = spec.n;
  const int species = n - 1;
  const int nodes = grid.nodes();
  const double tau = params.tau;
  const double h = grid.h();

  BandedSystem sys{BlockTridiagonal(nodes, n), Eigen::VectorXd::Zero(nodes * n), {}};
  auto& a = sys.matrix;
  auto& b = sys.rhs;

  const SmallVec zeta = spec.charge_contrast();
  const Field f = problem.background();

  for (int j = 0; j < nodes; ++j) {
    const Composition& c = guess.comp[j];
    for (int i = 0; i < n; ++i)
      if (!(c.rho[i] > 0.0)) throw DomainError("iterate left the open simplex");
    const double wj = grid.weight(j);
    const SmallMat jac = jacobian_rho(c, spec);

    auto diag = a.block(j, 0);
    diag.topRows(species) += wj * jac;
    for (int i = 0; i < species; ++i) diag(i, i) += wj * params.eps_reg * tau;

    SmallVec res = -wj * (c.rho.head(species) - previous.comp[j].rho.head(species)) -
                   wj * params.eps_reg * tau * SmallVec(guess.u.col(j));
    if (spec.has_reactions()) res += tau * wj * spec.reaction_rates(c.x).head(species);
    b.segment(j * n, species) += res;

    if (problem.electric_field) {
      diag.row(species) -= wj * (zeta.transpose() * jac);
      const double q = spec.z.cwiseQuotient(spec.M).dot(c.rho);
      b[j * n + species] += wj * (q + f[j]);
    }
  }

  // Diffusion with the mobility frozen at the iterate.
  const std::vector<SmallMat> mob = element_mobility(guess, lift, spec);
  add_weighted_stiffness(a, grid, mob, tau, 0);
  for (int e = 0; e < grid.elements(); ++e) {
    const SmallVec dw = SmallVec(guess.u.col(e + 1) - guess.u.col(e)) +
                        SmallVec(lift.w_D.col(e + 1) - lift.w_D.col(e));
    const SmallVec flux = tau * mob[e] * dw / h;
    b.segment(e * n, species) += flux;
    b.segment((e + 1) * n, species) -= flux;
  }

  if (problem.electric_field) {
    const double lam = problem.spec.lambda;
    add_weighted_stiffness(a, grid, std::vector<SmallMat>(grid.elements(), SmallMat::Constant(1, 1, lam)),
                           1.0, species);
    for (int e = 0; e < grid.elements(); ++e) {
      const double g = lam * (guess.phi[e + 1] - guess.phi[e]) / h;
      b[e * n + species] += g;
      b[(e + 1) * n + species] -= g;
    }
    sys.constraints = {{0, species, 0.0}, {nodes - 1, species, 0.0}};
  } else {
    for (int j = 0; j < nodes; ++j) sys.constraints.push_back({j, species, 0.0});
  }
  return sys;
}

StepOutcome advance(const State& previous, const SolverParams& params, const Lift& lift,
                    const Problem& problem) {
  const MixtureSpec& spec = problem.spec;
  const int n = spec.n;
  const int species = n - 1;
  const int nodes = previous.nodes();

  StepOutcome out;
  State guess = previous;
  guess.t = previous.t + params.tau;
  int iterations = 0;
  double err = 0.0;
  try {
    for (iterations = 1; iterations <= params.m_max; ++iterations) {
      BandedSystem sys = assemble_inner_system(previous, guess, params, lift, problem);
      const Eigen::VectorXd zeta = params.coupled_solve
                                       ? solve_banded(std::move(sys))
                                       : solve_split(std::move(sys), n, problem.electric_field);
      if (!zeta.allFinite()) throw SolverError("non-finite increment");
      for (int j = 0; j < nodes; ++j) {
        guess.u.col(j) += zeta.segment(j * n, species);
        guess.phi[j] += zeta[j * n + species];
      }
      refresh_compositions(guess, lift, spec);
      err = zeta.cwiseAbs().maxCoeff();
      if (err < params.eps_tol) {
        out.converged = true;
        break;
      }
    }
  } catch (const std::runtime_error& ex) {
    out.failure = ex.what();
  } catch (const std::logic_error& ex) {
    out.failure = ex.what();
  }
  if (!out.converged && out.failure.empty()) {
    std::ostringstream os;
    os << "inner iteration did not converge in " << params.m_max << " iterations (|zeta|_inf = "
       << err << ") at t = " << guess.t;
    out.failure = os.str();
  }
  iterations = std::min(iterations, params.m_max);

  if (out.converged) out.report = make_report(guess, &previous, lift, problem, params);
  out.report.t = guess.t;
  out.report.tau = params.tau;
  out.report.iterations = iterations;
  out.report.zeta_inf = err;
  out.state = std::move(guess);
  return out;
}

StepOutcome advance_with_fallback(const State& previous, const SolverParams& params,
                                  const Lift& lift, const Problem& problem, int max_halvings) {
  StepOutcome out = advance(previous, params, lift, problem);
  if (out.converged) return out;
  if (max_halvings <= 0) throw NonConvergence(out.failure);

  SolverParams half = params;
  half.tau = 0.5 * params.tau;
  StepOutcome first = advance_with_fallback(previous, half, lift, problem, max_halvings - 1);
  StepOutcome second = advance_with_fallback(first.state, half, lift, problem, max_halvings - 1);
  // Report the whole step; the entropy residual is the larger of the two sub-steps.
  StepReport report = make_report(second.state, &previous, lift, problem, params);
  report.entropy_residual =
      std::max(first.report.entropy_residual, second.report.entropy_residual);
  report.iterations = first.report.iterations + second.report.iterations;
  report.zeta_inf = std::max(first.report.zeta_inf, second.report.zeta_inf);
  second.report = report;
  return second;
}

Trajectory run(const Scenario& scenario, const StepObserver& observer) {
  const Problem& problem = scenario.problem;
  problem.validate();
  scenario.solver.validate();
  if (!(scenario.T >= 0.0)) throw InvalidParameter("final time must be non-negative");

  Trajectory traj;
  traj.lift = build_lift(problem);
  State state = init_state(scenario, traj.lift);
  traj.reports.push_back(make_report(state, nullptr, traj.lift, problem, scenario.solver));
  traj.frames.push_back(state);
  traj.frame_reports.push_back(0);

  const double tau = scenario.solver.tau;
  const auto steps = static_cast<long>(std::ceil(scenario.T / tau - 1e-9));
  const long stride = scenario.output_every > 0.0
                          ? std::max(1L, std::lround(scenario.output_every / tau))
                          : 1L;
  SolverParams params = scenario.solver;
  for (long k = 1; k <= steps; ++k) {
    params.tau = (k == steps) ? scenario.T - (steps - 1) * tau : tau;
    StepOutcome out = advance_with_fallback(state, params, traj.lift, problem);
    out.state.t = k == steps ? scenario.T : k * tau;
    out.report.t = out.state.t;
    if (observer) observer(out.state, state, out.report);
    traj.reports.push_back(out.report);
    state = std::move(out.state);
    if (k % stride == 0 || k == steps) {
      traj.frames.push_back(state);
      traj.frame_reports.push_back(traj.reports.size() - 1);
    }
  }
  return traj;
}

State relax_to_steady(const State& from, const SolverParams& params, const Lift& lift,
                      const Problem& problem, double rate_tol, double abs_tol) {
  constexpr double kMaxTau = 1.0;
  SolverParams p = params;
  State s = from;
  for (int step = 0; step < 200000; ++step) {
    StepOutcome out = advance(s, p, lift, problem);
    if (!out.converged) {
      p.tau *= 0.5;
      if (p.tau < 1e-10) throw NonConvergence("steady-state relaxation stalled: " + out.failure);
      continue;
    }
    const double change = out.report.stationarity * p.tau;
    const double rate = out.report.stationarity;
    s = std::move(out.state);
    if (change <= abs_tol && rate <= rate_tol) return s;
    if (out.report.iterations <= 8) p.tau = std::min(kMaxTau, 2.0 * p.tau);
  }
  throw NonConvergence("steady-state relaxation did not reach the tolerance");
}

void attach_relative_entropy(Trajectory& traj, const State& steady, const Problem& problem) {
  for (std::size_t f = 0; f < traj.frames.size(); ++f)
    traj.reports[traj.frame_reports[f]].H_rel = relative_entropy(traj.frames[f], steady, problem);
}

}  // namespace msms
