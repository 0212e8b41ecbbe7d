#pragma once

#include "msms/stepper.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace msms {

/// Schema violation in a scenario document.
struct ScenarioError : InvalidParameter {
  using InvalidParameter::InvalidParameter;
};

/// Piecewise-linear table over (0,1): one row of values per component.
struct NodalTable {
  std::vector<double> y;
  std::vector<std::vector<double>> values;

  double interpolate(std::size_t row, double at) const;
  bool operator==(const NodalTable&) const = default;
};

/// In-memory form of a scenario JSON document.
struct ScenarioFile {
  struct Species {
    int n = 3;
    std::vector<double> M;
    std::vector<double> z;
    std::vector<std::vector<double>> Dms;
    bool operator==(const Species&) const = default;
  } species;

  struct Physics {
    double lambda = 1.0;
    std::optional<NodalTable> f;  // empty means "zero"
    std::string reactions = "none";
    bool electric_field = true;
    bool operator==(const Physics&) const = default;
  } physics;

  struct Domain {
    int n_p = 100;
    bool operator==(const Domain&) const = default;
  } domain;

  struct Bc {
    double phi_left = 0.0;
    double phi_right = 0.0;
    bool operator==(const Bc&) const = default;
  } bc;

  struct Initial {
    std::string preset = "trapezoid";  // empty when `table` is used
    std::optional<NodalTable> table;
    bool operator==(const Initial&) const = default;
  } initial;

  struct Time {
    double tau = 1e-3;
    double T = 1.0;
    double output_every = 0.1;
    bool operator==(const Time&) const = default;
  } time;

  struct Solver {
    double eps_reg = 0x1p-52;
    double eps_tol = 1e-10;
    int m_max = 100;
    double eta = 1e-5;
    bool coupled_solve = true;
    bool operator==(const Solver&) const = default;
  } solver;

  struct Outputs {
    std::string dir = "out";
    bool plots = false;
    bool operator==(const Outputs&) const = default;
  } outputs;

  /// Relative-entropy reference: "none", "steady" (relaxed discrete steady
  /// state) or "uniform" (constant densities with the initial masses).
  struct Diagnostics {
    std::string reference = "none";
    std::vector<double> fit_window{1.0, 4.0};
    bool operator==(const Diagnostics&) const = default;
  } diagnostics;

  /// Mesh-refinement study; element counts must divide `reference`.
  struct Convergence {
    std::vector<int> levels;
    int reference = 25600;
    bool operator==(const Convergence&) const = default;
  } convergence;

  bool operator==(const ScenarioFile&) const = default;
};

ScenarioFile parse_scenario(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioFile& file);

ScenarioFile load_scenario(const std::string& path);

std::vector<std::string> preset_names();
/// Built-in scenarios example1..example5 and convergence.
ScenarioFile preset(const std::string& name);

/// Applies "dotted.path=value"; the value is parsed as JSON when possible and
/// kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Density datum with a plateau of 0.7 on the left, a linear ramp on
/// [0.25, 0.75] down to eta, rho_2 = 0.2 and the remainder in the last species.
SmallVec trapezoid_datum(double y, double eta, int n);

Scenario to_scenario(const ScenarioFile& file);

}  // namespace msms
