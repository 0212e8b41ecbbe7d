#pragma once

#include "msms/diagnostics.hpp"
#include "msms/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace msms {

/// Initial mass densities rho^0(y); entries are floored at eta and the last
/// species takes up the remainder.
using InitialDensities = std::function<SmallVec(double y)>;

struct Scenario {
  Problem problem;
  InitialDensities initial;
  double T = 1.0;
  SolverParams solver;
  /// Time between stored frames; 0 stores every step.
  double output_every = 0.0;
};

/// Thrown when a step cannot be completed even after repeated halving of tau.
struct NonConvergence : SolverError {
  using SolverError::SolverError;
};

Lift build_lift(const Problem& problem);

State init_state(const Scenario& scenario, const Lift& lift);

/// State with spatially constant densities `rho` and the matching potential.
State uniform_state(const SmallVec& rho, const Problem& problem, const Lift& lift);

/// Linearized system for the increment zeta = (u - u_bar, phi - phi_bar) at
/// the iterate `guess`, stepping from `previous`. Block size is n: species
/// increments first, potential last.
BandedSystem assemble_inner_system(const State& previous, const State& guess,
                                   const SolverParams& params, const Lift& lift,
                                   const Problem& problem);

struct StepOutcome {
  State state;
  StepReport report;
  bool converged = false;
  std::string failure;
};

/// One implicit Euler step with the linearized inner iteration. On
/// non-convergence the returned state is the last iterate and `converged`
/// is false.
StepOutcome advance(const State& previous, const SolverParams& params, const Lift& lift,
                    const Problem& problem);

/// advance() with recursive halving of tau on failure (up to `max_halvings`).
/// Throws NonConvergence when the step still fails.
StepOutcome advance_with_fallback(const State& previous, const SolverParams& params,
                                  const Lift& lift, const Problem& problem, int max_halvings = 6);

struct Trajectory {
  Lift lift;
  std::vector<State> frames;
  std::vector<StepReport> reports;     // index 0 is the initial state
  std::vector<std::size_t> frame_reports;  // report index of every frame
};

/// Per-step observer; called after every accepted step.
using StepObserver = std::function<void(const State& current, const State& previous,
                                        const StepReport& report)>;

/// Fixed-step march to T.
Trajectory run(const Scenario& scenario, const StepObserver& observer = {});

/// Continues from `from` with a growing time step until
/// ||rho^k - rho^{k-1}||_inf <= abs_tol and the rate is below rate_tol.
State relax_to_steady(const State& from, const SolverParams& params, const Lift& lift,
                      const Problem& problem, double rate_tol = 1e-8, double abs_tol = 1e-12);

/// Fills H_rel for every frame of the trajectory.
void attach_relative_entropy(Trajectory& traj, const State& steady, const Problem& problem);

}  // namespace msms
