#pragma once

#include "msms/stepper.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace msms {

/// L2 errors of every level against the reference solution. Components are
/// rho_1..rho_n followed by Phi.
struct ConvergenceTable {
  std::vector<int> levels;
  std::vector<double> h;
  std::vector<std::vector<double>> err;   // [level][component]
  /// Least-squares slope over the levels up to and including this one; NaN
  /// on the first row.
  std::vector<std::vector<double>> rate;  // [level][component]
  std::vector<double> slope;              // fit over all levels, per component
  int components() const { return slope.empty() ? 0 : static_cast<int>(slope.size()); }
};

/// Concurrency cap from MSMS_THREADS; falls back to `jobs` when unset or invalid.
int job_limit(int jobs);

/// Runs `base` to its final time on every level and on the reference mesh and
/// compares the final states. Jobs run concurrently, at most `max_jobs` at a time.
ConvergenceTable convergence_study(const Scenario& base, const std::vector<int>& levels,
                                   int reference, int max_jobs);

enum class Reference { none, steady, uniform };

Reference parse_reference(const std::string& name);

struct RunResult {
  Trajectory traj;
  std::optional<State> reference;
  std::optional<DecayFit> decay;  // semilog fit of H_rel over the fit window
};

/// run() followed by the relative-entropy bookkeeping for the chosen reference.
RunResult run_with_reference(const Scenario& scenario, Reference ref,
                             std::array<double, 2> fit_window = {1.0, 4.0},
                             const StepObserver& observer = {});

}  // namespace msms
