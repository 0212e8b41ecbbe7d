#include "msms/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace msms {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

double number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<int>();
}

bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string text(const json& obj, const std::string& path, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

const json& required(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(join(path, key), "missing");
  return obj.at(key);
}

NodalTable parse_table(const json& v, const std::string& path, const char* values_key,
                       std::size_t rows) {
  check_keys(v, path, {"y", values_key});
  NodalTable t;
  t.y = numbers(required(v, path, "y"), join(path, "y"));
  if (t.y.size() < 2) fail(join(path, "y"), "needs at least two abscissae");
  if (!std::is_sorted(t.y.begin(), t.y.end()) ||
      std::adjacent_find(t.y.begin(), t.y.end()) != t.y.end())
    fail(join(path, "y"), "must be strictly increasing");
  if (t.y.front() > 0.0 || t.y.back() < 1.0) fail(join(path, "y"), "must cover [0, 1]");
  const json& vals = required(v, path, values_key);
  const std::string vpath = join(path, values_key);
  if (!vals.is_array()) fail(vpath, "expected an array");
  // A flat array is accepted for single-row tables.
  if (rows == 1 && !vals.empty() && vals.front().is_number()) {
    t.values.push_back(numbers(vals, vpath));
  } else {
    for (const auto& row : vals) t.values.push_back(numbers(row, vpath));
  }
  if (t.values.size() != rows) fail(vpath, "expected " + std::to_string(rows) + " rows");
  for (const auto& row : t.values)
    if (row.size() != t.y.size()) fail(vpath, "row length differs from y");
  return t;
}

json table_json(const NodalTable& t, const char* values_key, bool flat) {
  json j;
  j["y"] = t.y;
  if (flat)
    j[values_key] = t.values.front();
  else
    j[values_key] = t.values;
  return j;
}

ScenarioFile::Species example_species(double m1, double m2) {
  ScenarioFile::Species s;
  s.n = 3;
  s.M = {m1, m2, 1.0};
  s.z = {1.0, 1.0, 0.0};
  s.Dms = {{0.0, 0.833, 0.680}, {0.833, 0.0, 0.168}, {0.680, 0.168, 0.0}};
  return s;
}

}  // namespace

double NodalTable::interpolate(std::size_t row, double at) const {
  const auto& v = values.at(row);
  if (at <= y.front()) return v.front();
  if (at >= y.back()) return v.back();
  const auto it = std::upper_bound(y.begin(), y.end(), at);
  const std::size_t k = static_cast<std::size_t>(it - y.begin());
  const double s = (at - y[k - 1]) / (y[k] - y[k - 1]);
  return (1.0 - s) * v[k - 1] + s * v[k];
}

ScenarioFile parse_scenario(const json& doc) {
  check_keys(doc, "", {"species", "physics", "domain", "bc", "initial", "time", "solver",
                       "outputs", "diagnostics", "convergence"});
  ScenarioFile f;

  {
    const json& s = required(doc, "", "species");
    check_keys(s, "species", {"n", "M", "z", "Dms"});
    f.species.n = integer(s, "species", "n", 0);
    if (f.species.n < 2 || f.species.n > kMaxSpecies)
      fail("species.n", "must be between 2 and " + std::to_string(kMaxSpecies));
    const auto n = static_cast<std::size_t>(f.species.n);
    f.species.M = numbers(required(s, "species", "M"), "species.M");
    f.species.z = numbers(required(s, "species", "z"), "species.z");
    if (f.species.M.size() != n) fail("species.M", "expected n entries");
    if (f.species.z.size() != n) fail("species.z", "expected n entries");
    const json& d = required(s, "species", "Dms");
    if (!d.is_array() || d.size() != n) fail("species.Dms", "expected an n x n array");
    for (const auto& row : d) {
      f.species.Dms.push_back(numbers(row, "species.Dms"));
      if (f.species.Dms.back().size() != n) fail("species.Dms", "expected an n x n array");
    }
  }
  const auto n = static_cast<std::size_t>(f.species.n);

  if (doc.contains("physics")) {
    const json& p = doc.at("physics");
    check_keys(p, "physics", {"lambda", "f", "reactions", "electric_field"});
    f.physics.lambda = number(p, "physics", "lambda", f.physics.lambda);
    if (p.contains("f")) {
      const json& fv = p.at("f");
      if (fv.is_string()) {
        if (fv.get<std::string>() != "zero") fail("physics.f", "expected \"zero\" or a table");
      } else {
        f.physics.f = parse_table(fv, "physics.f", "values", 1);
      }
    }
    f.physics.reactions = text(p, "physics", "reactions", "none");
    if (f.physics.reactions != "none") fail("physics.reactions", "only \"none\" is supported");
    f.physics.electric_field = boolean(p, "physics", "electric_field", true);
  }

  if (doc.contains("domain")) {
    check_keys(doc.at("domain"), "domain", {"n_p"});
    f.domain.n_p = integer(doc.at("domain"), "domain", "n_p", f.domain.n_p);
    if (f.domain.n_p < 2) fail("domain.n_p", "must be at least 2");
  }

  if (doc.contains("bc")) {
    check_keys(doc.at("bc"), "bc", {"phi_left", "phi_right"});
    f.bc.phi_left = number(doc.at("bc"), "bc", "phi_left", 0.0);
    f.bc.phi_right = number(doc.at("bc"), "bc", "phi_right", 0.0);
  }

  if (doc.contains("initial")) {
    const json& i = doc.at("initial");
    check_keys(i, "initial", {"preset", "y", "rho"});
    if (i.contains("preset")) {
      if (i.contains("y") || i.contains("rho"))
        fail("initial", "give either a preset or tables, not both");
      f.initial.preset = text(i, "initial", "preset", "");
      if (f.initial.preset != "trapezoid") fail("initial.preset", "unknown initial preset");
    } else {
      f.initial.preset.clear();
      f.initial.table = parse_table(i, "initial", "rho", n);
    }
  }

  if (doc.contains("time")) {
    const json& t = doc.at("time");
    check_keys(t, "time", {"tau", "T", "output_every"});
    f.time.tau = number(t, "time", "tau", f.time.tau);
    f.time.T = number(t, "time", "T", f.time.T);
    f.time.output_every = number(t, "time", "output_every", f.time.output_every);
    if (!(f.time.tau > 0.0)) fail("time.tau", "must be positive");
    if (!(f.time.T >= 0.0)) fail("time.T", "must be non-negative");
    if (!(f.time.output_every >= 0.0)) fail("time.output_every", "must be non-negative");
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    check_keys(s, "solver", {"eps_reg", "eps_tol", "m_max", "eta", "coupled_solve"});
    f.solver.eps_reg = number(s, "solver", "eps_reg", f.solver.eps_reg);
    f.solver.eps_tol = number(s, "solver", "eps_tol", f.solver.eps_tol);
    f.solver.m_max = integer(s, "solver", "m_max", f.solver.m_max);
    f.solver.eta = number(s, "solver", "eta", f.solver.eta);
    f.solver.coupled_solve = boolean(s, "solver", "coupled_solve", f.solver.coupled_solve);
  }

  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    check_keys(o, "outputs", {"dir", "plots"});
    f.outputs.dir = text(o, "outputs", "dir", f.outputs.dir);
    f.outputs.plots = boolean(o, "outputs", "plots", f.outputs.plots);
  }

  if (doc.contains("diagnostics")) {
    const json& d = doc.at("diagnostics");
    check_keys(d, "diagnostics", {"reference", "fit_window"});
    f.diagnostics.reference = text(d, "diagnostics", "reference", f.diagnostics.reference);
    if (f.diagnostics.reference != "none" && f.diagnostics.reference != "steady" &&
        f.diagnostics.reference != "uniform")
      fail("diagnostics.reference", "expected \"none\", \"steady\" or \"uniform\"");
    if (d.contains("fit_window")) {
      f.diagnostics.fit_window = numbers(d.at("fit_window"), "diagnostics.fit_window");
      const auto& w = f.diagnostics.fit_window;
      if (w.size() != 2 || !(w[0] < w[1])) fail("diagnostics.fit_window", "expected [t0, t1], t0 < t1");
    }
  }

  if (doc.contains("convergence")) {
    const json& c = doc.at("convergence");
    check_keys(c, "convergence", {"levels", "reference"});
    f.convergence.reference = integer(c, "convergence", "reference", f.convergence.reference);
    if (c.contains("levels")) {
      const json& l = c.at("levels");
      if (!l.is_array()) fail("convergence.levels", "expected an array of element counts");
      for (const auto& e : l) {
        if (!e.is_number_integer() || e.get<int>() < 2)
          fail("convergence.levels", "expected element counts >= 2");
        f.convergence.levels.push_back(e.get<int>());
      }
    }
    if (f.convergence.reference < 2) fail("convergence.reference", "must be at least 2");
    for (int level : f.convergence.levels)
      if (f.convergence.reference % level != 0 || level >= f.convergence.reference)
        fail("convergence.levels", "every level must be a proper divisor of the reference");
  }

  // Cross-field checks that depend on the species block.
  if (f.physics.electric_field == false && (f.bc.phi_left != 0.0 || f.bc.phi_right != 0.0))
    fail("bc", "potential data requires physics.electric_field");
  try {
    const Scenario sc = to_scenario(f);
    sc.problem.validate();
    sc.solver.validate();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::invalid_argument& ex) {
    throw ScenarioError(ex.what());
  }
  return f;
}

json to_json(const ScenarioFile& f) {
  json j;
  j["species"] = {{"n", f.species.n}, {"M", f.species.M}, {"z", f.species.z},
                  {"Dms", f.species.Dms}};
  j["physics"] = {{"lambda", f.physics.lambda},
                  {"f", f.physics.f ? table_json(*f.physics.f, "values", true) : json("zero")},
                  {"reactions", f.physics.reactions},
                  {"electric_field", f.physics.electric_field}};
  j["domain"] = {{"n_p", f.domain.n_p}};
  j["bc"] = {{"phi_left", f.bc.phi_left}, {"phi_right", f.bc.phi_right}};
  if (f.initial.table)
    j["initial"] = table_json(*f.initial.table, "rho", false);
  else
    j["initial"] = {{"preset", f.initial.preset}};
  j["time"] = {{"tau", f.time.tau}, {"T", f.time.T}, {"output_every", f.time.output_every}};
  j["solver"] = {{"eps_reg", f.solver.eps_reg},
                 {"eps_tol", f.solver.eps_tol},
                 {"m_max", f.solver.m_max},
                 {"eta", f.solver.eta},
                 {"coupled_solve", f.solver.coupled_solve}};
  j["outputs"] = {{"dir", f.outputs.dir}, {"plots", f.outputs.plots}};
  j["diagnostics"] = {{"reference", f.diagnostics.reference},
                      {"fit_window", f.diagnostics.fit_window}};
  if (!f.convergence.levels.empty())
    j["convergence"] = {{"levels", f.convergence.levels}, {"reference", f.convergence.reference}};
  return j;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open scenario file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ScenarioError(path + ": " + ex.what());
  }
  return parse_scenario(doc);
}

std::vector<std::string> preset_names() {
  return {"example1", "example2", "example3", "example4", "example5", "convergence"};
}

ScenarioFile preset(const std::string& name) {
  ScenarioFile f;
  f.time.tau = 1e-3;
  f.time.output_every = 0.1;
  f.domain.n_p = 100;
  if (name == "example1") {
    f.species = example_species(1.0, 1.0);
    f.time.T = 17.0;
  } else if (name == "example2") {
    f.species = example_species(6.0, 1.0);
    f.time.T = 4.0;
    f.time.output_every = 0.05;
    f.diagnostics.reference = "steady";
  } else if (name == "example3") {
    f.species = example_species(2.0, 1.0);
    f.bc = {10.0, 0.0};
    f.time.T = 8.0;
    f.diagnostics.reference = "steady";
  } else if (name == "example4") {
    f.species = example_species(1.0, 2.0);
    f.bc = {10.0, 0.0};
    f.time.T = 8.0;
    f.diagnostics.reference = "steady";
  } else if (name == "example5") {
    f.species = example_species(1.0, 1.0);
    f.physics.electric_field = false;
    f.time.T = 8.0;
    f.time.output_every = 0.05;
    f.diagnostics.reference = "uniform";
  } else if (name == "convergence") {
    f.species = example_species(2.0, 1.0);
    f.bc = {10.0, 0.0};
    f.time.tau = 1e-4;
    f.time.T = 0.01;
    f.time.output_every = 0.01;
    f.convergence.levels = {100, 200, 400};
    f.convergence.reference = 25600;
  } else {
    std::ostringstream os;
    os << "unknown preset '" << name << "' (known:";
    for (const auto& p : preset_names()) os << ' ' << p;
    os << ')';
    throw ScenarioError(os.str());
  }
  return f;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ScenarioError("override '" + assignment + "' is not of the form key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ScenarioError("override path '" + path + "' has an empty segment");
    if (!node->is_object()) throw ScenarioError("override path '" + path + "' is not an object");
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

SmallVec trapezoid_datum(double y, double eta, int n) {
  SmallVec rho = SmallVec::Zero(n);
  double r1;
  if (y <= 0.25)
    r1 = 0.7;
  else if (y < 0.75)
    r1 = 0.7 + (eta - 0.7) * (y - 0.25) / 0.5;
  else
    r1 = eta;
  rho[0] = r1;
  if (n > 2) rho[1] = 0.2;
  rho[n - 1] = 1.0 - rho.head(n - 1).sum();
  return rho;
}

Scenario to_scenario(const ScenarioFile& f) {
  const int n = f.species.n;
  if (n < 2 || n > kMaxSpecies) throw ScenarioError("species.n out of range");
  const auto un = static_cast<std::size_t>(n);
  if (f.species.M.size() != un || f.species.z.size() != un || f.species.Dms.size() != un)
    throw ScenarioError("species arrays do not match n");

  Scenario s;
  MixtureSpec& spec = s.problem.spec;
  spec.n = n;
  spec.M = Eigen::Map<const Eigen::VectorXd>(f.species.M.data(), n);
  spec.z = Eigen::Map<const Eigen::VectorXd>(f.species.z.data(), n);
  spec.Dms = SmallMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (f.species.Dms[static_cast<std::size_t>(i)].size() != un)
      throw ScenarioError("species.Dms is not square");
    for (int k = 0; k < n; ++k)
      spec.Dms(i, k) = f.species.Dms[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  spec.lambda = f.physics.lambda;
  if (f.physics.f) {
    const NodalTable table = *f.physics.f;
    spec.background = [table](double y) { return table.interpolate(0, y); };
  }

  s.problem.grid = Grid1D(f.domain.n_p);
  s.problem.phi_left = f.bc.phi_left;
  s.problem.phi_right = f.bc.phi_right;
  s.problem.electric_field = f.physics.electric_field;

  s.solver.tau = f.time.tau;
  s.solver.eps_reg = f.solver.eps_reg;
  s.solver.eps_tol = f.solver.eps_tol;
  s.solver.m_max = f.solver.m_max;
  s.solver.eta = f.solver.eta;
  s.solver.coupled_solve = f.solver.coupled_solve;
  s.T = f.time.T;
  s.output_every = f.time.output_every;

  if (f.initial.table) {
    const NodalTable table = *f.initial.table;
    s.initial = [table, n](double y) {
      SmallVec rho(n);
      for (int i = 0; i < n; ++i) rho[i] = table.interpolate(static_cast<std::size_t>(i), y);
      return rho;
    };
  } else {
    const double eta = f.solver.eta;
    s.initial = [eta, n](double y) { return trapezoid_datum(y, eta, n); };
  }
  return s;
}

}  // namespace msms
