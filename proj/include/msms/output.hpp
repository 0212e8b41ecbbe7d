#pragma once

#include "msms/study.hpp"

#include <string>
#include <vector>

namespace msms {

/// "%.17g"; NaN becomes an empty field.
std::string format_number(double v);

std::string solution_csv(const Trajectory& traj, const Problem& problem);
std::string diagnostics_csv(const Trajectory& traj, int n);
std::string convergence_csv(const ConvergenceTable& table);

/// Writes `content` to `path`; throws std::ios_base::failure naming the path.
void write_file(const std::string& path, const std::string& content);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
};

/// Self-contained SVG line plot. Non-finite points, and non-positive ones on
/// log axes, are skipped.
std::string render_svg(const PlotSpec& plot);

/// Density profiles, potential, entropy and (when available) relative entropy.
/// Returns the written file names; failures are returned as warnings.
std::vector<std::string> emit_run_plots(const std::string& dir, const Trajectory& traj,
                                        const Problem& problem, std::vector<std::string>& warnings);

/// Log-log error against h with a slope-2 guide line.
std::vector<std::string> emit_convergence_plot(const std::string& dir,
                                               const ConvergenceTable& table,
                                               std::vector<std::string>& warnings);

}  // namespace msms
