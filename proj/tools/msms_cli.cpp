// msms: command-line driver for the Maxwell-Stefan mixture solver.

#include "msms/output.hpp"
#include "msms/scenario.hpp"
#include "msms/study.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

enum Exit { kOk = 0, kIo = 1, kInvalid = 2, kDiverged = 3 };

struct Source {
  std::string scenario;
  std::string preset;
  std::string out;
  std::vector<std::string> overrides;
  bool plots = false;
  bool quiet = false;
};

void add_source_options(CLI::App* cmd, Source& src) {
  auto* s = cmd->add_option("--scenario", src.scenario, "Scenario JSON file");
  auto* p = cmd->add_option("--preset", src.preset, "Built-in scenario name");
  s->excludes(p);
  cmd->add_option("--out", src.out, "Output directory (overrides outputs.dir)");
  cmd->add_option("--override", src.overrides, "Dotted-path override, e.g. time.T=2")
      ->allow_extra_args(false);
  cmd->add_flag("--plots", src.plots, "Write SVG plots");
  cmd->add_flag("-q,--quiet", src.quiet, "Only print errors");
}

nlohmann::json load_document(const Source& src) {
  if (src.scenario.empty() && src.preset.empty())
    throw msms::ScenarioError("either --scenario or --preset is required");
  nlohmann::json doc;
  if (!src.preset.empty()) {
    doc = msms::to_json(msms::preset(src.preset));
  } else {
    std::ifstream in(src.scenario);
    if (!in) throw std::ios_base::failure("cannot open scenario file " + src.scenario);
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& ex) {
      throw msms::ScenarioError(src.scenario + ": " + ex.what());
    }
  }
  for (const auto& o : src.overrides) msms::apply_override(doc, o);
  if (!src.out.empty()) msms::apply_override(doc, "outputs.dir=" + nlohmann::json(src.out).dump());
  if (src.plots) msms::apply_override(doc, "outputs.plots=true");
  return doc;
}

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create output directory " + dir + ": " + ec.message());
}

std::string path_in(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_run(const Source& src) {
  const msms::ScenarioFile file = msms::parse_scenario(load_document(src));
  const msms::Scenario scenario = msms::to_scenario(file);
  const std::string& dir = file.outputs.dir;
  prepare_dir(dir);

  const auto start = std::chrono::steady_clock::now();
  long steps = 0;
  const double T = scenario.T;
  double next_note = 0.0;
  msms::StepObserver observer = [&](const msms::State& cur, const msms::State&,
                                    const msms::StepReport& r) {
    ++steps;
    if (!src.quiet && cur.t >= next_note) {
      std::fprintf(stderr, "t = %-10.4g H = %-14.8g iterations = %d\n", r.t, r.H, r.iterations);
      next_note += std::max(T / 10.0, 1e-300);
    }
  };
  const msms::RunResult result = msms::run_with_reference(
      scenario, msms::parse_reference(file.diagnostics.reference),
      {file.diagnostics.fit_window[0], file.diagnostics.fit_window[1]}, observer);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const int n = scenario.problem.spec.n;
  msms::write_file(path_in(dir, "solution.csv"), msms::solution_csv(result.traj, scenario.problem));
  msms::write_file(path_in(dir, "diagnostics.csv"), msms::diagnostics_csv(result.traj, n));
  msms::write_file(path_in(dir, "scenario.json"), msms::to_json(file).dump(2) + "\n");

  nlohmann::json summary;
  const msms::StepReport& last = result.traj.reports.back();
  summary["t_final"] = last.t;
  summary["steps"] = steps;
  summary["H_final"] = last.H;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < result.traj.reports.size(); ++k)
    worst = std::max(worst, result.traj.reports[k].entropy_residual);
  summary["max_entropy_residual"] = steps > 0 ? nlohmann::json(worst) : nlohmann::json(nullptr);
  if (result.decay) {
    summary["decay_fit"] = {{"slope", result.decay->slope},
                            {"intercept", result.decay->intercept},
                            {"r_squared", result.decay->r_squared},
                            {"points", result.decay->points},
                            {"window", file.diagnostics.fit_window}};
  }
  msms::write_file(path_in(dir, "summary.json"), summary.dump(2) + "\n");

  if (file.outputs.plots) {
    std::vector<std::string> warnings;
    msms::emit_run_plots(dir, result.traj, scenario.problem, warnings);
    report_warnings(warnings);
  }
  if (!src.quiet) {
    std::printf("%ld steps to t = %g in %.1f s; H = %.10g; outputs in %s\n", steps, last.t, secs,
                last.H, dir.c_str());
    if (result.decay)
      std::printf("relative entropy decay: slope %.6g, R^2 %.6f over [%g, %g]\n",
                  result.decay->slope, result.decay->r_squared, file.diagnostics.fit_window[0],
                  file.diagnostics.fit_window[1]);
  }
  return kOk;
}

int cmd_convergence(const Source& src) {
  const msms::ScenarioFile file = msms::parse_scenario(load_document(src));
  if (file.convergence.levels.size() < 2)
    throw msms::ScenarioError("convergence.levels: at least two mesh levels are required");
  const msms::Scenario scenario = msms::to_scenario(file);
  const std::string& dir = file.outputs.dir;
  prepare_dir(dir);

  const int jobs = static_cast<int>(file.convergence.levels.size()) + 1;
  const msms::ConvergenceTable table = msms::convergence_study(
      scenario, file.convergence.levels, file.convergence.reference, msms::job_limit(jobs));
  msms::write_file(path_in(dir, "convergence.csv"), msms::convergence_csv(table));
  msms::write_file(path_in(dir, "scenario.json"), msms::to_json(file).dump(2) + "\n");
  if (file.outputs.plots) {
    std::vector<std::string> warnings;
    msms::emit_convergence_plot(dir, table, warnings);
    report_warnings(warnings);
  }
  if (!src.quiet) {
    const int comps = table.components();
    std::printf("fitted L2 rates:");
    for (int c = 0; c < comps; ++c)
      std::printf(" %s=%.4f", c + 1 < comps ? ("rho_" + std::to_string(c + 1)).c_str() : "Phi",
                  table.slope[c]);
    std::printf("\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-stable finite-element solver for ionized Maxwell-Stefan mixtures"};
  app.require_subcommand(1);

  Source run_src, conv_src;
  auto* run = app.add_subcommand("run", "March a scenario in time and write CSV tables");
  add_source_options(run, run_src);
  auto* conv = app.add_subcommand("convergence", "Mesh-refinement study against a fine reference");
  add_source_options(conv, conv_src);

  std::string preset_name;
  bool list = false;
  auto* show = app.add_subcommand("preset", "Print a built-in scenario as JSON");
  show->add_option("name", preset_name, "Preset name");
  show->add_flag("--list", list, "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(run_src);
    if (*conv) return cmd_convergence(conv_src);
    if (list || preset_name.empty()) {
      for (const auto& p : msms::preset_names()) std::printf("%s\n", p.c_str());
      return kOk;
    }
    std::printf("%s\n", msms::to_json(msms::preset(preset_name)).dump(2).c_str());
    return kOk;
  } catch (const msms::NonConvergence& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kDiverged;
  } catch (const std::ios_base::failure& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "invalid scenario: " << ex.what() << '\n';
    return kInvalid;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kDiverged;
  }
}
