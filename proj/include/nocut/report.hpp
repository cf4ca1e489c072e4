#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "nocut/study.hpp"

namespace nocut {

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// RFC-4180: quote fields containing separators or quotes, double inner quotes.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace detail

inline const char* kStudyCsvHeader =
    "scheme,problem,n,h,theta0,gamma,sigma,gamma_div,gamma1,kappa,graddiv_scaling,"
    "dofs,cut_cells,l2_rel,h1_rel,l2_meanfree_rel,gamma_l2,triple_norm,residual,"
    "status,sigma_monotone";

inline void write_study_row(std::ostream& os, const StudyRow& r) {
  using detail::csv_field;
  using detail::fmt17;
  os << csv_field(r.scheme) << ',' << csv_field(r.problem) << ',' << r.n << ',' << fmt17(r.h)
     << ',' << fmt17(r.theta0) << ',' << fmt17(r.gamma) << ',' << fmt17(r.sigma) << ','
     << fmt17(r.gamma_div) << ',' << fmt17(r.gamma1) << ',' << fmt17(r.kappa) << ','
     << r.graddiv_scaling << ',' << r.dofs << ',' << r.cut_cells << ',';
  if (r.ok) {
    os << fmt17(r.err.l2_rel) << ',' << fmt17(r.err.h1_rel) << ','
       << fmt17(r.err.l2_meanfree_rel) << ',' << fmt17(r.err.gamma_l2) << ','
       << fmt17(r.err.triple_norm) << ',' << fmt17(r.residual) << ",ok,";
  } else {
    os << ",,,,," << csv_field("failed: " + r.message) << ',';
  }
  os << r.sigma_monotone << "\r\n";
}

// ---------------------------------------------------------------------------
// SVG plotting (static, no dependencies)
// ---------------------------------------------------------------------------

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double pix0 = 0.0, pix1 = 1.0;

  double to_pix(double v) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return pix0 + t * (pix1 - pix0);
  }
};

inline void fit_axis(Axis& ax, double mn, double mx) {
  if (ax.log) {
    mn = std::log10(mn);
    mx = std::log10(mx);
  }
  const double span = (mx - mn > 0.0) ? mx - mn : 1.0;
  ax.lo = mn - 0.08 * span;
  ax.hi = mx + 0.08 * span;
}

}  // namespace detail

/// Writes a simple line plot. Log-log plots get reference triangles for
/// slopes 1 and 2.
inline void write_svg_plot(std::ostream& os, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series, bool log_x, bool log_y) {
  const double W = 720, H = 540, ml = 90, mr = 30, mt = 50, mb = 70;
  detail::Axis xa, ya;
  xa.log = log_x;
  ya.log = log_y;
  xa.pix0 = ml;
  xa.pix1 = W - mr;
  ya.pix0 = H - mb;  // y grows downward in SVG
  ya.pix1 = mt;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (log_x && !(x > 0.0)) continue;
      if (log_y && !(y > 0.0)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) {
    xmin = log_x ? 0.1 : 0.0;
    xmax = 1.0;
  }
  if (ymin > ymax) {
    ymin = log_y ? 0.1 : 0.0;
    ymax = 1.0;
  }
  detail::fit_axis(xa, xmin, xmax);
  detail::fit_axis(ya, ymin, ymax);

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
     << title << "</text>\n";

  // frame
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
     << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";

  // ticks
  const auto emit_tick = [&](bool on_x, double value, const std::string& label) {
    if (on_x) {
      const double px = xa.to_pix(value);
      if (px < ml - 0.5 || px > W - mr + 0.5) return;
      os << "<line x1=\"" << px << "\" y1=\"" << H - mb << "\" x2=\"" << px << "\" y2=\""
         << H - mb + 6 << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << px << "\" y=\"" << H - mb + 22
         << "\" text-anchor=\"middle\" font-size=\"11\">" << label << "</text>\n";
    } else {
      const double py = ya.to_pix(value);
      if (py < mt - 0.5 || py > H - mb + 0.5) return;
      os << "<line x1=\"" << ml - 6 << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\"" << py
         << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << ml - 10 << "\" y=\"" << py + 4
         << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
    }
  };
  const auto emit_axis_ticks = [&](const detail::Axis& ax, bool on_x) {
    if (ax.log) {
      for (int e = static_cast<int>(std::floor(ax.lo)); e <= static_cast<int>(std::ceil(ax.hi));
           ++e)
        emit_tick(on_x, std::pow(10.0, e), "1e" + std::to_string(e));
    } else {
      for (int k = 0; k <= 5; ++k) {
        const double v = ax.lo + (ax.hi - ax.lo) * k / 5.0;
        emit_tick(on_x, v, detail::fmt6(v));
      }
    }
  };
  emit_axis_ticks(xa, true);
  emit_axis_ticks(ya, false);

  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 20
     << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  os << "<text x=\"22\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
     << "transform=\"rotate(-90 22 " << H / 2 << ")\">" << y_label << "</text>\n";

  int color = 0;
  double legend_y = mt + 16;
  for (const auto& s : series) {
    const char* col = detail::kPalette[color % 6];
    ++color;
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) {
      if ((log_x && !(x > 0.0)) || (log_y && !(y > 0.0))) continue;
      os << detail::fmt6(xa.to_pix(x)) << ',' << detail::fmt6(ya.to_pix(y)) << ' ';
    }
    os << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      if ((log_x && !(x > 0.0)) || (log_y && !(y > 0.0))) continue;
      os << "<circle cx=\"" << detail::fmt6(xa.to_pix(x)) << "\" cy=\""
         << detail::fmt6(ya.to_pix(y)) << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
    }
    os << "<text x=\"" << W - mr - 8 << "\" y=\"" << legend_y
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << col << "\">" << s.name
       << "</text>\n";
    legend_y += 16;
  }

  // Reference slope triangles (rates 1 and 2) on log-log plots.
  if (log_x && log_y && xmin < xmax) {
    const double x0 = xmin, x1 = std::min(xmax, 2.0 * xmin);
    for (double rate : {1.0, 2.0}) {
      const double y0 = ymin * (rate == 1.0 ? 0.55 : 0.3);
      const double y1 = y0 * std::pow(x1 / x0, rate);
      os << "<polyline fill=\"none\" stroke=\"#888888\" points=\""
         << detail::fmt6(xa.to_pix(x0)) << ',' << detail::fmt6(ya.to_pix(y0)) << ' '
         << detail::fmt6(xa.to_pix(x1)) << ',' << detail::fmt6(ya.to_pix(y0)) << ' '
         << detail::fmt6(xa.to_pix(x1)) << ',' << detail::fmt6(ya.to_pix(y1)) << ' '
         << detail::fmt6(xa.to_pix(x0)) << ',' << detail::fmt6(ya.to_pix(y0)) << "\"/>\n";
      os << "<text x=\"" << detail::fmt6(xa.to_pix(x1) + 4) << "\" y=\""
         << detail::fmt6(0.5 * (ya.to_pix(y0) + ya.to_pix(y1))) << "\" font-size=\"11\" "
         << "fill=\"#888888\">" << detail::fmt6(rate) << "</text>\n";
    }
  }
  os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Study output files
// ---------------------------------------------------------------------------

namespace detail {

inline void write_study_svg(std::ostream& os, const StudyReport& report) {
  std::vector<PlotSeries> series;
  bool log_x = true;
  std::string x_label = "h";

  if (report.study == "rotate" || report.study == "compare") {
    log_x = false;
    x_label = "theta0";
    std::map<std::pair<std::string, int>, PlotSeries> by_group;
    for (const auto& r : report.rows) {
      if (!r.ok) continue;
      auto& h1 = by_group[{r.scheme + " h1 n=" + std::to_string(r.n), 2 * r.n}];
      auto& l2 = by_group[{r.scheme + " l2 n=" + std::to_string(r.n), 2 * r.n + 1}];
      h1.points.emplace_back(r.theta0, r.err.h1_rel);
      l2.points.emplace_back(r.theta0, r.err.l2_rel);
    }
    for (auto& [key, s] : by_group) {
      s.name = key.first;
      series.push_back(std::move(s));
    }
  } else if (report.study == "params") {
    log_x = true;
    x_label = "sigma";
    std::map<std::string, PlotSeries> by_gamma;
    for (const auto& r : report.rows) {
      if (!r.ok) continue;
      auto& s = by_gamma["l2 gamma=" + fmt6(r.gamma)];
      s.points.emplace_back(r.sigma, r.err.l2_rel);
    }
    for (auto& [name, s] : by_gamma) {
      s.name = name;
      series.push_back(std::move(s));
    }
  } else {
    std::map<std::string, PlotSeries> by_norm;
    for (const auto& r : report.rows) {
      if (!r.ok) continue;
      by_norm["l2_rel"].points.emplace_back(r.h, r.err.l2_rel);
      by_norm["h1_rel"].points.emplace_back(r.h, r.err.h1_rel);
      if (scheme_is_meanzero(parse_scheme(r.scheme)))
        by_norm["l2_meanfree_rel"].points.emplace_back(r.h, r.err.l2_meanfree_rel);
    }
    for (auto& [name, s] : by_norm) {
      s.name = name;
      std::sort(s.points.begin(), s.points.end());
      series.push_back(std::move(s));
    }
  }
  write_svg_plot(os, report.study, x_label, "relative error", series, log_x, true);
}

}  // namespace detail

/// Writes `<study>.csv` (deterministic payload), `<study>_timings.csv`
/// (wall-clock sidecar), slope/ratio summaries when present, and `<study>.svg`.
inline std::vector<std::filesystem::path> emit_outputs(const StudyReport& report,
                                                       const std::string& out_dir) {
  if (report.rows.empty()) throw std::invalid_argument("emit_outputs: empty report");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("emit_outputs: cannot create " + out_dir);

  std::vector<fs::path> written;
  const fs::path base = fs::path(out_dir) / report.study;

  {
    auto os = detail::open_output(base.string() + ".csv");
    os << kStudyCsvHeader << "\r\n";
    for (const auto& r : report.rows) write_study_row(os, r);
    written.push_back(base.string() + ".csv");
  }
  {
    auto os = detail::open_output(base.string() + "_timings.csv");
    os << "scheme,n,theta0,gamma,sigma,gamma_div,gamma1,assemble_time,solve_time\r\n";
    for (const auto& r : report.rows)
      os << r.scheme << ',' << r.n << ',' << detail::fmt17(r.theta0) << ','
         << detail::fmt17(r.gamma) << ',' << detail::fmt17(r.sigma) << ','
         << detail::fmt17(r.gamma_div) << ',' << detail::fmt17(r.gamma1) << ','
         << detail::fmt17(r.assemble_time) << ',' << detail::fmt17(r.solve_time) << "\r\n";
    written.push_back(base.string() + "_timings.csv");
  }
  if (!report.slopes.empty()) {
    auto os = detail::open_output(base.string() + "_slopes.csv");
    os << "scheme,theta0,norm,slope,degenerate\r\n";
    for (const auto& s : report.slopes)
      os << s.scheme << ',' << detail::fmt17(s.theta0) << ',' << s.norm << ','
         << detail::fmt17(s.slope) << ',' << (s.degenerate ? "true" : "false") << "\r\n";
    written.push_back(base.string() + "_slopes.csv");
  }
  if (!report.ratios.empty()) {
    auto os = detail::open_output(base.string() + "_ratios.csv");
    os << "scheme,n,norm,max_err,min_err,ratio\r\n";
    for (const auto& r : report.ratios)
      os << r.scheme << ',' << r.n << ',' << r.norm << ',' << detail::fmt17(r.max_err) << ','
         << detail::fmt17(r.min_err) << ',' << detail::fmt17(r.ratio) << "\r\n";
    written.push_back(base.string() + "_ratios.csv");
  }
  {
    auto os = detail::open_output(base.string() + ".svg");
    detail::write_study_svg(os, report);
    written.push_back(base.string() + ".svg");
  }
  return written;
}

}  // namespace nocut
