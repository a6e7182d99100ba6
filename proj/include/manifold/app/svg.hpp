#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "manifold/dataset.hpp"

namespace manifold::plot {

struct PlotSpec {
  std::string color_by = "label";
  int width = 800;
  int height = 600;
  double radius = 3.0;
  bool legend = true;
};

/// Twelve fixed colors; labels take them in sorted order, wrapping after 12.
inline constexpr std::array<std::string_view, 12> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a"};

inline std::map<std::string, std::string_view> assign_colors(const std::vector<std::string>& labels) {
  std::set<std::string> sorted(labels.begin(), labels.end());
  std::map<std::string, std::string_view> colors;
  std::size_t i = 0;
  for (const auto& l : sorted) colors[l] = kPalette[i++ % kPalette.size()];
  return colors;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

inline constexpr int kLegendWidth = 180;

/// Standalone SVG scatter of the first two columns of `coords` (a single
/// column is drawn at mid-height). Points are mapped independently per axis
/// into the plot area with a 5% margin; a zero range maps to the centre.
inline std::string render_svg(const Matrix& coords, const std::vector<std::string>& labels, const PlotSpec& spec) {
  const auto colors = assign_colors(labels);
  const double plot_w = spec.width - (spec.legend ? kLegendWidth : 0);
  const double plot_h = spec.height;
  const double mx = 0.05 * plot_w, my = 0.05 * plot_h;

  auto axis = [&](Eigen::Index col, double lo_px, double span) {
    std::vector<double> px(static_cast<std::size_t>(coords.rows()), lo_px + span / 2);
    if (col >= coords.cols() || coords.rows() == 0) return px;
    const double lo = coords.col(col).minCoeff(), hi = coords.col(col).maxCoeff();
    if (hi > lo)
      for (Eigen::Index i = 0; i < coords.rows(); ++i)
        px[static_cast<std::size_t>(i)] = lo_px + (coords(i, col) - lo) / (hi - lo) * span;
    return px;
  };
  const auto xs = axis(0, mx, plot_w - 2 * mx);
  auto ys = axis(1, my, plot_h - 2 * my);
  for (auto& y : ys) y = plot_h - y;  // y axis points up

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height << "\" fill=\"#ffffff\"/>\n"
      << "<g class=\"points\">\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << "<circle cx=\"" << detail::num(xs[i]) << "\" cy=\"" << detail::num(ys[i]) << "\" r=\""
        << detail::num(spec.radius) << "\" fill=\"" << colors.at(labels[i]) << "\" fill-opacity=\"0.8\"/>\n";
  out << "</g>\n";
  if (spec.legend) {
    out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<text x=\"" << plot_w + 10 << "\" y=\"20\" font-weight=\"bold\">" << xml_escape(spec.color_by)
        << "</text>\n";
    int y = 40;
    for (const auto& [label, color] : colors) {
      out << "<g class=\"legend-entry\"><rect x=\"" << plot_w + 10 << "\" y=\"" << y - 10
          << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/><text x=\"" << plot_w + 26 << "\" y=\"" << y
          << "\">" << xml_escape(label) << "</text></g>\n";
      y += 18;
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace manifold::plot
