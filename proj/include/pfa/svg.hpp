// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfa/experiments.hpp"

namespace pfa {

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string curve_color(size_t idx, size_t total) {
  const int hue = total > 1 ? static_cast<int>(360.0 * idx / total) : 210;
  return "hsl(" + std::to_string(hue) + ",70%,40%)";
}

}  // namespace detail

/// Static SVG plot of one sample count's sweep: mean extraction error against
/// added noise dimension, one polyline per horizon k, plus the noise-free
/// relaxation bound as a red horizontal line.
inline void write_sweep_svg(const std::string& path, const std::vector<ExperimentRecord>& records,
                            const std::string& title) {
  if (records.empty()) throw std::invalid_argument("no records to plot");
  std::map<int, std::vector<const ExperimentRecord*>> by_k;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  const double bound = records.front().lower_bound;
  for (const auto& r : records) {
    by_k[r.k].push_back(&r);
    xmin = std::min(xmin, static_cast<double>(r.noise_dim));
    xmax = std::max(xmax, static_cast<double>(r.noise_dim));
    ymin = std::min(ymin, r.mean_error);
    ymax = std::max(ymax, r.mean_error);
  }
  ymin = std::min(ymin, bound);
  ymax = std::max(ymax, bound);
  if (xmax == xmin) xmax = xmin + 1;
  const double pad = std::max(1e-12, (ymax - ymin) * 0.08);
  ymin -= pad;
  ymax += pad;

  const double width = 860, height = 520;
  const double ml = 70, mr = 160, mt = 40, mb = 50;
  const auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  const auto sy = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << width
      << " " << height << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">added noise dimensions</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (mt + height - mb) / 2
      << ")\">mean prediction error</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    out << "<text x=\"" << sx(fx) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\">" << detail::svg_num(fx) << "</text>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">"
        << detail::svg_num(fy) << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << sy(fy) << "\" x2=\"" << width - mr << "\" y2=\""
        << sy(fy) << "\" stroke=\"#dddddd\"/>\n";
  }

  // lower bound
  out << "<line x1=\"" << ml << "\" y1=\"" << sy(bound) << "\" x2=\"" << width - mr << "\" y2=\""
      << sy(bound) << "\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
  out << "<text x=\"" << width - mr + 8 << "\" y=\"" << sy(bound) + 4
      << "\" fill=\"red\">bound " << detail::svg_num(bound) << "</text>\n";

  size_t idx = 0;
  for (const auto& [k, cells] : by_k) {
    auto sorted = cells;
    std::sort(sorted.begin(), sorted.end(),
              [](const ExperimentRecord* a, const ExperimentRecord* b) { return a->noise_dim < b->noise_dim; });
    const std::string color = detail::curve_color(idx, by_k.size());
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto* r : sorted)
      out << sx(static_cast<double>(r->noise_dim)) << "," << sy(r->mean_error) << " ";
    out << "\"/>\n";
    const double ly = mt + 18.0 * static_cast<double>(idx);
    out << "<line x1=\"" << width - mr + 8 << "\" y1=\"" << ly << "\" x2=\"" << width - mr + 28
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << width - mr + 34 << "\" y=\"" << ly + 4 << "\">k=" << k << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace pfa
