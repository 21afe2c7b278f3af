#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "bets/csv.hpp"
#include "bets/error.hpp"

namespace bets {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline const char* plot_color(size_t idx) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  return palette[idx % 5];
}

} // namespace detail

/// Renders one or more line series into a standalone SVG. Output is plain
/// text assembled with the same number formatting as the CSV writers, so a
/// fixed input yields a byte-identical image.
inline void write_line_svg(const std::filesystem::path& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series) {
  if (series.empty()) throw Error("plot: no series to draw");
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
      throw Error("plot: series '" + s.label + "' is empty or ragged");
    }
    for (double v : s.x) {
      if (!std::isfinite(v)) throw Error("plot: non-finite x value in series '" + s.label + "'");
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      if (!std::isfinite(v)) throw Error("plot: non-finite y value in series '" + s.label + "'");
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (x_max == x_min) {
    x_min -= 1;
    x_max += 1;
  }
  if (y_max == y_min) {
    y_min -= 1;
    y_max += 1;
  }

  const double width = 860, height = 520;
  const double ml = 80, mr = 30, mt = 50, mb = 60;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double v) { return mt + ph - (v - y_min) / (y_max - y_min) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(width) +
         "\" height=\"" + format_double(height) + "\" viewBox=\"0 0 " + format_double(width) +
         " " + format_double(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + format_double(width / 2) +
         "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">" +
         title + "</text>\n";
  // Axes
  svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(mt) + "\" x2=\"" +
         format_double(ml) + "\" y2=\"" + format_double(mt + ph) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(mt + ph) + "\" x2=\"" +
         format_double(ml + pw) + "\" y2=\"" + format_double(mt + ph) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  // Range labels
  svg += "<text x=\"" + format_double(ml) + "\" y=\"" + format_double(mt + ph + 20) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + format_double(x_min) + "</text>\n";
  svg += "<text x=\"" + format_double(ml + pw) + "\" y=\"" + format_double(mt + ph + 20) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
         format_double(x_max) + "</text>\n";
  svg += "<text x=\"" + format_double(ml - 8) + "\" y=\"" + format_double(mt + ph) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
         format_double(y_min) + "</text>\n";
  svg += "<text x=\"" + format_double(ml - 8) + "\" y=\"" + format_double(mt + 12) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
         format_double(y_max) + "</text>\n";
  // Axis titles
  svg += "<text x=\"" + format_double(ml + pw / 2) + "\" y=\"" + format_double(height - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + x_label +
         "</text>\n";
  svg += "<text x=\"20\" y=\"" + format_double(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 20 " +
         format_double(mt + ph / 2) + ")\">" + y_label + "</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    std::string points;
    for (size_t k = 0; k < s.x.size(); ++k) {
      points += format_double(sx(s.x[k]));
      points += ',';
      points += format_double(sy(s.y[k]));
      points += ' ';
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(detail::plot_color(i)) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    const double ly = mt + 16 + 18 * static_cast<double>(i);
    svg += "<line x1=\"" + format_double(ml + pw - 150) + "\" y1=\"" + format_double(ly - 4) +
           "\" x2=\"" + format_double(ml + pw - 120) + "\" y2=\"" + format_double(ly - 4) +
           "\" stroke=\"" + detail::plot_color(i) + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + format_double(ml + pw - 112) + "\" y=\"" + format_double(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label + "</text>\n";
  }
  svg += "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("plot: cannot write '" + path.string() + "'");
  out << svg;
}

enum class PlotKind { LatencyBound, EmissionsCompare, SuccessSweep };

inline PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "latency_bound") return PlotKind::LatencyBound;
  if (s == "emissions_compare") return PlotKind::EmissionsCompare;
  if (s == "success_sweep") return PlotKind::SuccessSweep;
  throw Error("plot: unknown kind '" + s +
              "' (expected latency_bound, emissions_compare, or success_sweep)");
}

namespace detail {

inline std::vector<double> numeric_column(const CsvTable& t, const std::string& name) {
  const size_t idx = t.require_column(name);
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    if (idx >= row.size()) throw Error("plot: ragged row in table");
    out.push_back(parse_double(row[idx]));
  }
  return out;
}

} // namespace detail

/// Turns a sweep or comparison table into image files. Empty or malformed
/// tables are rejected before any file is created.
inline std::vector<std::filesystem::path> emit_plots(PlotKind kind, const CsvTable& table,
                                                     const std::filesystem::path& out_dir) {
  if (table.rows.empty()) throw Error("plot: empty table");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  switch (kind) {
    case PlotKind::LatencyBound: {
      const auto x = detail::numeric_column(table, "value");
      const auto y = detail::numeric_column(table, "l_total_s");
      const auto path = out_dir / "latency_bound.svg";
      write_line_svg(path, "Window bound vs relative speed", "relative speed (km/h)",
                     "window bound (s)", {{"window bound", x, y}});
      written.push_back(path);
      break;
    }
    case PlotKind::SuccessSweep: {
      const auto x = detail::numeric_column(table, "value");
      const auto est = detail::numeric_column(table, "p_estimate");
      const auto closed = detail::numeric_column(table, "p_closed");
      const auto path = out_dir / "success_sweep.svg";
      write_line_svg(path, "Trade success probability", table.rows.front().at(0),
                     "P(success)", {{"estimate", x, est}, {"closed form", x, closed}});
      written.push_back(path);
      break;
    }
    case PlotKind::EmissionsCompare: {
      const auto t = detail::numeric_column(table, "t_s");
      const auto bco2 = detail::numeric_column(table, "baseline_cum_co2_g");
      const auto dco2 = detail::numeric_column(table, "dlt_cum_co2_g");
      const auto bnox = detail::numeric_column(table, "baseline_cum_nox_g");
      const auto dnox = detail::numeric_column(table, "dlt_cum_nox_g");
      const auto co2_path = out_dir / "emissions_co2.svg";
      write_line_svg(co2_path, "Cumulative CO2", "time (s)", "CO2 (g)",
                     {{"baseline", t, bco2}, {"dlt-controlled", t, dco2}});
      written.push_back(co2_path);
      const auto nox_path = out_dir / "emissions_nox.svg";
      write_line_svg(nox_path, "Cumulative NOx proxy", "time (s)", "NOx (g)",
                     {{"baseline", t, bnox}, {"dlt-controlled", t, dnox}});
      written.push_back(nox_path);
      break;
    }
  }
  return written;
}

} // namespace bets
