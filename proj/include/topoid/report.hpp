#pragma once

// CSV and SVG output for experiment results.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoid/error.hpp"
#include "topoid/experiments.hpp"
#include "topoid/io.hpp"

namespace topoid {

inline constexpr const char* kCsvHeader = "T,a_T,misclass_raw,misclass_projected,skipped,bound";
inline constexpr double kPlotFloor = 1e-4;

namespace detail {

inline std::string fmt_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_fixed(double x, int digits = 2) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline void require_rows(const ExperimentResult& result) {
  if (result.rows.empty()) throw std::invalid_argument("experiment result has no horizons");
}

}  // namespace detail

/// Header, one row per horizon, then `# meta:` lines. Everything except the
/// wall_clock_seconds line is a deterministic function of the config.
inline std::string format_csv(const ExperimentResult& result) {
  detail::require_rows(result);
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& row : result.rows) {
    os << row.horizon << "," << detail::fmt_real(row.speed) << ","
       << detail::fmt_real(row.misclass_raw) << "," << detail::fmt_real(row.misclass_projected)
       << "," << row.skipped << "," << detail::fmt_real(row.bound) << "\n";
  }
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(io::config_hash(result.config)));
  os << "# meta: seed=" << result.config.seed << "\n";
  os << "# meta: config_hash=" << hash << "\n";
  os << "# meta: rate=" << detail::fmt_real(result.rate) << "\n";
  std::istringstream cfg(io::format_config(result.config));
  for (std::string line; std::getline(cfg, line);) os << "# meta: config " << line << "\n";
  os << "# meta: wall_clock_seconds=" << detail::fmt_fixed(result.wall_clock_seconds, 3) << "\n";
  return os.str();
}

inline void emit_csv(const ExperimentResult& result, const std::string& path) {
  detail::write_file(path, format_csv(result));
}

/// Rows of a CSV produced by emit_csv, without the meta block.
inline std::vector<std::string> csv_data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream is(csv);
  for (std::string line; std::getline(is, line);) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

struct PlotSeries {
  std::string label;
  std::string color;
  std::string marker;  // circle | square | triangle
  std::vector<double> values;
};

/// Self-contained SVG: empirical raw, empirical projected, and the bound
/// against T on a log-scale y axis. Zero frequencies are drawn at kPlotFloor.
inline std::string format_plot(const ExperimentResult& result) {
  detail::require_rows(result);
  const double width = 720, height = 480, left = 80, right = 200, top = 40, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  std::vector<PlotSeries> series = {
      {"empirical, raw LS", "#1f77b4", "circle", {}},
      {"empirical, projected", "#d62728", "square", {}},
      {"bound exp(-r a_T)", "#2ca02c", "triangle", {}},
  };
  double smallest_bound = 1.0;
  for (const auto& row : result.rows) {
    series[0].values.push_back(row.misclass_raw);
    series[1].values.push_back(row.misclass_projected);
    series[2].values.push_back(row.bound);
    if (row.bound > 0.0) smallest_bound = std::min(smallest_bound, row.bound);
  }
  const double y_low = std::pow(
      10.0, std::floor(std::log10(std::max(1e-12, std::min(kPlotFloor, smallest_bound)))));
  const double y_high = 1.0;
  for (auto& s : series) {
    const bool frequency = &s != &series[2];
    for (double& v : s.values) {
      if (frequency && v <= 0.0) v = kPlotFloor;
      v = std::clamp(v, y_low, y_high);
    }
  }

  const double t_min = static_cast<double>(result.rows.front().horizon);
  const double t_max = static_cast<double>(result.rows.back().horizon);
  const double t_span = t_max > t_min ? t_max - t_min : 1.0;
  const double t_origin = t_max > t_min ? t_min : t_min - 0.5;
  auto px = [&](double t) { return left + (t - t_origin) / t_span * plot_w; };
  auto py = [&](double v) {
    return top + (std::log10(y_high) - std::log10(v)) / (std::log10(y_high) - std::log10(y_low)) *
                     plot_h;
  };
  using detail::fmt_fixed;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << "Topological misclassification (" << to_string(result.config.coupling) << ", E = "
     << result.config.trials << ")</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
     << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double decade = y_low; decade <= y_high * 1.0001; decade *= 10.0) {
    const double y = py(decade);
    os << "<line x1=\"" << left << "\" y1=\"" << fmt_fixed(y) << "\" x2=\"" << left + plot_w
       << "\" y2=\"" << fmt_fixed(y) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << fmt_fixed(y + 4)
       << "\" text-anchor=\"end\">1e" << static_cast<int>(std::lround(std::log10(decade)))
       << "</text>\n";
  }
  for (const auto& row : result.rows) {
    const double x = px(static_cast<double>(row.horizon));
    os << "<line x1=\"" << fmt_fixed(x) << "\" y1=\"" << top + plot_h << "\" x2=\"" << fmt_fixed(x)
       << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt_fixed(x) << "\" y=\"" << top + plot_h + 18
       << "\" text-anchor=\"middle\">" << row.horizon << "</text>\n";
  }
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16
     << "\" text-anchor=\"middle\">T</text>\n";
  os << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << top + plot_h / 2 << ")\">probability (log scale)</text>\n";

  auto marker = [&](const PlotSeries& s, double x, double y) {
    std::ostringstream m;
    if (s.marker == "circle") {
      m << "<circle class=\"marker\" cx=\"" << fmt_fixed(x) << "\" cy=\"" << fmt_fixed(y)
        << "\" r=\"4\" fill=\"" << s.color << "\"/>";
    } else if (s.marker == "square") {
      m << "<rect class=\"marker\" x=\"" << fmt_fixed(x - 4) << "\" y=\"" << fmt_fixed(y - 4)
        << "\" width=\"8\" height=\"8\" fill=\"" << s.color << "\"/>";
    } else {
      m << "<polygon class=\"marker\" points=\"" << fmt_fixed(x) << "," << fmt_fixed(y - 5) << " "
        << fmt_fixed(x - 5) << "," << fmt_fixed(y + 4) << " " << fmt_fixed(x + 5) << ","
        << fmt_fixed(y + 4) << "\" fill=\"" << s.color << "\"/>";
    }
    return m.str();
  };

  for (const auto& s : series) {
    os << "<g id=\"" << s.marker << "-series\">\n<polyline fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      os << (i ? " " : "") << fmt_fixed(px(static_cast<double>(result.rows[i].horizon))) << ","
         << fmt_fixed(py(s.values[i]));
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      os << marker(s, px(static_cast<double>(result.rows[i].horizon)), py(s.values[i])) << "\n";
    }
    os << "</g>\n";
  }

  const double lx = left + plot_w + 15;
  double ly = top + 10;
  for (const auto& s : series) {
    os << marker(s, lx + 5, ly) << "\n";
    os << "<text x=\"" << lx + 16 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    ly += 22;
  }
  os << "<text x=\"" << lx << "\" y=\"" << ly + 4 << "\" font-size=\"10\">zero frequencies drawn at "
     << "1e-4</text>\n";
  os << "<text x=\"" << lx << "\" y=\"" << ly + 18 << "\" font-size=\"10\">r = "
     << detail::fmt_real(result.rate).substr(0, 10) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

inline void emit_plot(const ExperimentResult& result, const std::string& path) {
  detail::write_file(path, format_plot(result));
}

}  // namespace topoid
