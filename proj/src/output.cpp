#include "msms/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ios>
#include <limits>
#include <sstream>

namespace msms {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string colour(int i) { return kPalette[i % 8]; }

struct Axis {
  double lo, hi;
  bool log;
  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    const double t = log ? std::log10(v) : v;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;
  } else {
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5 * std::max(1.0, std::abs(lo));
      hi += 0.5 * std::max(1.0, std::abs(hi));
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return {lo, hi, log};
}

std::vector<double> ticks(const Axis& a) {
  std::vector<double> out;
  if (a.log) {
    const int lo = static_cast<int>(a.lo), hi = static_cast<int>(a.hi);
    const int step = std::max(1, (hi - lo) / 6);
    for (int e = lo; e <= hi; e += step) out.push_back(std::pow(10.0, e));
    return out;
  }
  for (int k = 0; k <= 5; ++k) out.push_back(a.lo + (a.hi - a.lo) * k / 5.0);
  return out;
}

bool plottable(double x, double y, bool logx, bool logy) {
  if (!std::isfinite(x) || !std::isfinite(y)) return false;
  if (logx && !(x > 0.0)) return false;
  if (logy && !(y > 0.0)) return false;
  return true;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create directory " + dir + ": " + ec.message());
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string solution_csv(const Trajectory& traj, const Problem& problem) {
  const int n = problem.spec.n;
  std::ostringstream os;
  os << "t,y";
  for (int i = 1; i <= n; ++i) os << ",rho_" << i;
  for (int i = 1; i <= n; ++i) os << ",x_" << i;
  os << ",Phi\n";
  for (const State& s : traj.frames) {
    for (int j = 0; j < s.nodes(); ++j) {
      const Composition& c = s.comp[j];
      os << format_number(s.t) << ',' << format_number(problem.grid.node(j));
      for (int i = 0; i < n; ++i) os << ',' << format_number(c.rho[i]);
      for (int i = 0; i < n; ++i) os << ',' << format_number(c.x[i]);
      os << ',' << format_number(s.phi[j]) << '\n';
    }
  }
  return os.str();
}

std::string diagnostics_csv(const Trajectory& traj, int n) {
  std::ostringstream os;
  os << "t,H,H_rel";
  for (int i = 1; i <= n; ++i) os << ",mass_" << i;
  os << ",entropy_residual,iterations,zeta_inf\n";
  for (const StepReport& r : traj.reports) {
    os << format_number(r.t) << ',' << format_number(r.H) << ',' << format_number(r.H_rel);
    for (int i = 0; i < n; ++i) os << ',' << format_number(r.masses[i]);
    os << ',' << format_number(r.entropy_residual) << ',' << r.iterations << ','
       << format_number(r.zeta_inf) << '\n';
  }
  return os.str();
}

std::string convergence_csv(const ConvergenceTable& table) {
  const int comps = table.components();
  const int n = comps - 1;
  std::ostringstream os;
  os << 'h';
  for (int i = 1; i <= n; ++i) os << ",err_rho_" << i;
  os << ",err_Phi";
  for (int i = 1; i <= n; ++i) os << ",rate_rho_" << i;
  os << ",rate_Phi\n";
  for (std::size_t l = 0; l < table.h.size(); ++l) {
    os << format_number(table.h[l]);
    for (double e : table.err[l]) os << ',' << format_number(e);
    for (double r : table.rate[l]) os << ',' << format_number(r);
    os << '\n';
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
  out << content;
  out.close();
  if (!out) throw std::ios_base::failure("failed writing " + path);
}

std::string render_svg(const PlotSpec& plot) {
  constexpr double W = 640, H = 420, L = 78, R = 150, T = 40, B = 56;
  std::vector<double> xs, ys;
  for (const Series& s : plot.series)
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k)
      if (plottable(s.x[k], s.y[k], plot.logx, plot.logy)) {
        xs.push_back(s.x[k]);
        ys.push_back(s.y[k]);
      }
  const Axis ax = make_axis(xs, plot.logx);
  const Axis ay = make_axis(ys, plot.logy);
  const double x0 = L, x1 = W - R, y0 = H - B, y1 = T;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(y1) << "\" width=\"" << fixed(x1 - x0)
     << "\" height=\"" << fixed(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(ax)) {
    const double px = ax.map(t, x0, x1);
    os << "<line x1=\"" << fixed(px) << "\" y1=\"" << fixed(y0) << "\" x2=\"" << fixed(px)
       << "\" y2=\"" << fixed(y0 + 5) << "\" stroke=\"black\"/>"
       << "<text x=\"" << fixed(px) << "\" y=\"" << fixed(y0 + 18)
       << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double py = ay.map(t, y0, y1);
    os << "<line x1=\"" << fixed(x0 - 5) << "\" y1=\"" << fixed(py) << "\" x2=\"" << fixed(x0)
       << "\" y2=\"" << fixed(py) << "\" stroke=\"black\"/>"
       << "<text x=\"" << fixed(x0 - 8) << "\" y=\"" << fixed(py + 4)
       << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << fixed((x0 + x1) / 2) << "\" y=\"" << fixed(H - 14)
     << "\" text-anchor=\"middle\">" << escape(plot.xlabel) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fixed((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fixed((y0 + y1) / 2) << ")\">" << escape(plot.ylabel) << "</text>\n";

  int legend = 0;
  for (const Series& s : plot.series) {
    std::ostringstream pts;
    int count = 0;
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!plottable(s.x[k], s.y[k], plot.logx, plot.logy)) continue;
      pts << (count++ ? " " : "") << fixed(ax.map(s.x[k], x0, x1)) << ','
          << fixed(ay.map(s.y[k], y0, y1));
    }
    if (count == 0) continue;
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts.str() << "\"/>\n";
    const double ly = y1 + 14 + 18 * legend++;
    os << "<line x1=\"" << fixed(x1 + 10) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(x1 + 34)
       << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>"
       << "<text x=\"" << fixed(x1 + 40) << "\" y=\"" << fixed(ly + 4) << "\">" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> emit_run_plots(const std::string& dir, const Trajectory& traj,
                                        const Problem& problem, std::vector<std::string>& warnings) {
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const PlotSpec& plot) {
    try {
      write_file(dir + "/" + name, render_svg(plot));
      written.push_back(name);
    } catch (const std::exception& ex) {
      warnings.push_back(std::string("plot ") + name + " skipped: " + ex.what());
    }
  };
  try {
    ensure_dir(dir);
  } catch (const std::exception& ex) {
    warnings.push_back(ex.what());
    return written;
  }
  if (traj.frames.empty()) return written;

  const int n = problem.spec.n;
  std::vector<double> y;
  for (int j = 0; j < problem.grid.nodes(); ++j) y.push_back(problem.grid.node(j));
  const State& first = traj.frames.front();
  const State& last = traj.frames.back();
  char tlabel[32];
  std::snprintf(tlabel, sizeof tlabel, "t=%g", last.t);

  PlotSpec dens{"Mass densities", "y", "rho_i", false, false, {}};
  const Fields r0 = first.rho(), r1 = last.rho();
  for (int i = 0; i < n; ++i) {
    std::vector<double> a(r0.cols()), b(r1.cols());
    for (int j = 0; j < r0.cols(); ++j) a[j] = r0(i, j), b[j] = r1(i, j);
    dens.series.push_back({"rho_" + std::to_string(i + 1) + " t=0", y, a, colour(i), true});
    dens.series.push_back({"rho_" + std::to_string(i + 1) + " " + tlabel, y, b, colour(i), false});
  }
  emit("densities.svg", dens);

  if (problem.electric_field) {
    PlotSpec pot{"Electric potential", "y", "Phi", false, false, {}};
    pot.series.push_back({"t=0", y, {first.phi.data(), first.phi.data() + first.phi.size()},
                          colour(0), true});
    pot.series.push_back({tlabel, y, {last.phi.data(), last.phi.data() + last.phi.size()},
                          colour(1), false});
    emit("potential.svg", pot);
  }

  std::vector<double> t, h, hrel;
  for (const StepReport& r : traj.reports) {
    t.push_back(r.t);
    h.push_back(r.H);
  }
  PlotSpec ent{"Entropy", "t", "H", false, false, {{"H", t, h, colour(0), false}}};
  emit("entropy.svg", ent);

  std::vector<double> tf;
  bool any = false;
  for (std::size_t idx : traj.frame_reports) {
    tf.push_back(traj.reports[idx].t);
    hrel.push_back(traj.reports[idx].H_rel);
    any = any || std::isfinite(traj.reports[idx].H_rel);
  }
  if (any) {
    PlotSpec rel{"Relative entropy", "t", "H*", false, true, {{"H*", tf, hrel, colour(1), false}}};
    emit("relative_entropy.svg", rel);
  }
  return written;
}

std::vector<std::string> emit_convergence_plot(const std::string& dir,
                                               const ConvergenceTable& table,
                                               std::vector<std::string>& warnings) {
  std::vector<std::string> written;
  if (table.h.empty()) return written;
  PlotSpec plot{"Spatial convergence", "h", "L2 error", true, true, {}};
  const int comps = table.components();
  double top = 0.0;
  for (int c = 0; c < comps; ++c) {
    std::vector<double> e;
    for (const auto& row : table.err) e.push_back(row[c]);
    top = std::max(top, *std::max_element(e.begin(), e.end()));
    const std::string label = c + 1 < comps ? "rho_" + std::to_string(c + 1) : "Phi";
    plot.series.push_back({label, table.h, e, colour(c), false});
  }
  // Slope-2 guide anchored above the largest error at the coarsest level.
  const double h0 = table.h.front();
  std::vector<double> guide;
  for (double h : table.h) guide.push_back(2.0 * top * (h / h0) * (h / h0));
  plot.series.push_back({"slope 2", table.h, guide, "#444444", true});
  try {
    ensure_dir(dir);
    write_file(dir + "/convergence.svg", render_svg(plot));
    written.push_back("convergence.svg");
  } catch (const std::exception& ex) {
    warnings.push_back(std::string("plot convergence.svg skipped: ") + ex.what());
  }
  return written;
}

}  // namespace msms
