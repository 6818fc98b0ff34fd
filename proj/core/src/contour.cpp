/*
 * Copyright 2026 The mixrobust Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "mixrobust/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "mixrobust/csv.hpp"
#include "mixrobust/error.hpp"

namespace mixrobust {
namespace {

constexpr double kSqrt3Over2 = 0.86602540378443864676;

// Canvas layout in pixels.
constexpr double kSide = 360.0;
constexpr double kOriginX = 40.0;
constexpr double kOriginY = 410.0;
constexpr int kWidth = 600;
constexpr int kHeight = 450;

struct Vertex {
  double x;
  double y;
  double value;
};

using Polygon = std::vector<Vertex>;

void enumerate(std::size_t m, int q, int min_count, std::vector<int>& counts, std::size_t pos,
               int left, std::vector<MixturePoint>& out) {
  if (pos + 1 == m) {
    if (left < min_count) return;
    counts[pos] = left;
    MixturePoint p{std::vector<double>(m)};
    for (std::size_t j = 0; j < m; ++j) p.proportions[j] = static_cast<double>(counts[j]) / q;
    out.push_back(std::move(p));
    return;
  }
  for (int a = min_count; a <= left; ++a) {
    counts[pos] = a;
    enumerate(m, q, min_count, counts, pos + 1, left - a, out);
  }
}

// Keeps the part of the polygon where sign * (value - level) >= 0.
Polygon clip(const Polygon& poly, double level, double sign) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex& a = poly[i];
    const Vertex& b = poly[(i + 1) % n];
    const double fa = sign * (a.value - level);
    const double fb = sign * (b.value - level);
    if (fa >= 0.0) out.push_back(a);
    if ((fa >= 0.0) != (fb >= 0.0)) {
      const double t = fa / (fa - fb);
      out.push_back(Vertex{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), level});
    }
  }
  return out;
}

std::string color_at(double t) {
  // Five-stop perceptual ramp from dark violet to yellow.
  static constexpr double kStops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(kStops[i][0] + f * (kStops[i + 1][0] - kStops[i][0]))),
                static_cast<int>(std::lround(kStops[i][1] + f * (kStops[i + 1][1] - kStops[i][1]))),
                static_cast<int>(std::lround(kStops[i][2] + f * (kStops[i + 1][2] - kStops[i][2]))));
  return buf;
}

std::string xml_escape(std::string_view s) {
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

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string px(double v) { return csv::fixed(v, 2); }

PlanePoint to_canvas(const PlanePoint& p) {
  return {kOriginX + kSide * p.x, kOriginY - kSide * p.y};
}

void append_polygon(std::string& path, const Polygon& poly) {
  if (poly.size() < 3) return;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    path += (i == 0 ? "M" : "L");
    path += px(poly[i].x);
    path += ',';
    path += px(poly[i].y);
  }
  path += 'Z';
}

}  // namespace

std::vector<MixturePoint> simplex_lattice(std::size_t m, int q, double min_prop) {
  if (m < 2) throw InvalidArgument("lattice needs m >= 2");
  if (q < 1) throw InvalidArgument("lattice resolution must be positive");
  if (!(min_prop >= 0.0) || min_prop * static_cast<double>(m) >= 1.0) {
    throw InvalidArgument("min_prop must lie in [0, 1/m)");
  }
  // Smallest count a with a / q >= min_prop.
  int min_count = static_cast<int>(std::ceil(min_prop * q - 1e-9));
  min_count = std::max(min_count, 0);
  std::vector<MixturePoint> out;
  std::vector<int> counts(m);
  enumerate(m, q, min_count, counts, 0, q, out);
  return out;
}

std::vector<MixturePoint> ternary_grid(int q, double min_prop) {
  if (q < 2) throw InvalidArgument("ternary grid needs q >= 2");
  return simplex_lattice(3, q, min_prop);
}

TernaryGrid make_grid(std::size_t m, int q, double min_prop) {
  TernaryGrid grid;
  grid.resolution = q;
  grid.min_prop = min_prop;
  grid.points = m == 3 ? ternary_grid(q, min_prop) : simplex_lattice(m, q, min_prop);
  return grid;
}

TernaryGrid grid_predict(const MixtureModelFit& fit, TernaryGrid grid, std::span<const double> z) {
  grid.covariates.assign(z.begin(), z.end());
  grid.values.resize(grid.points.size());
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    grid.values[i] = predict(fit, grid.points[i], z);
  }
  return grid;
}

PlanePoint ternary_to_plane(const MixturePoint& point) {
  if (point.size() != 3) throw InvalidArgument("ternary projection needs 3 components");
  return {point[1] + 0.5 * point[2], kSqrt3Over2 * point[2]};
}

std::string render_ternary(const TernaryGrid& grid, int levels) {
  if (grid.points.empty()) throw InvalidArgument("cannot render an empty grid");
  if (grid.values.size() != grid.points.size()) throw InvalidArgument("grid has no values");
  if (grid.points.front().size() != 3) throw InvalidArgument("ternary plots need m = 3");
  if (levels < 1) throw InvalidArgument("need at least one contour level");
  const int q = grid.resolution;
  if (q < 1) throw InvalidArgument("grid resolution must be positive");

  const auto [lo_it, hi_it] = std::minmax_element(grid.values.begin(), grid.values.end());
  const double vmin = *lo_it;
  const double vmax = *hi_it;
  const bool constant = (vmax - vmin) <= 1e-12 * std::max(1.0, std::abs(vmax));
  const int bands = constant ? 1 : levels;
  std::vector<double> edges(static_cast<std::size_t>(bands) + 1);
  for (int b = 0; b <= bands; ++b) {
    edges[static_cast<std::size_t>(b)] = vmin + (vmax - vmin) * b / bands;
  }
  auto band_of = [&](double v) {
    if (constant) return 0;
    const int b = static_cast<int>(std::floor((v - vmin) / (vmax - vmin) * bands));
    return std::clamp(b, 0, bands - 1);
  };

  // Lattice lookup keyed by (b, c) counts of x2 and x3.
  std::map<std::pair<int, int>, std::size_t> index;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const auto& p = grid.points[i];
    index[{static_cast<int>(std::lround(p[1] * q)), static_cast<int>(std::lround(p[2] * q))}] = i;
  }
  auto vertex = [&](std::size_t i) {
    const PlanePoint c = to_canvas(ternary_to_plane(grid.points[i]));
    return Vertex{c.x, c.y, grid.values[i]};
  };

  std::vector<std::string> paths(static_cast<std::size_t>(bands));
  auto emit_triangle = [&](std::size_t i0, std::size_t i1, std::size_t i2) {
    const Polygon tri{vertex(i0), vertex(i1), vertex(i2)};
    const int b0 = band_of(tri[0].value);
    const int b1 = band_of(tri[1].value);
    const int b2 = band_of(tri[2].value);
    if (b0 == b1 && b1 == b2) {
      append_polygon(paths[static_cast<std::size_t>(b0)], tri);
      return;
    }
    for (int b = std::min({b0, b1, b2}); b <= std::max({b0, b1, b2}); ++b) {
      Polygon piece = tri;
      if (b > 0) piece = clip(piece, edges[static_cast<std::size_t>(b)], 1.0);
      if (b + 1 < bands) piece = clip(piece, edges[static_cast<std::size_t>(b) + 1], -1.0);
      append_polygon(paths[static_cast<std::size_t>(b)], piece);
    }
  };
  for (const auto& [key, i] : index) {
    const auto [b, c] = key;
    const auto right = index.find({b + 1, c});
    const auto up = index.find({b, c + 1});
    if (right == index.end() || up == index.end()) continue;
    emit_triangle(i, right->second, up->second);
    const auto diag = index.find({b + 1, c + 1});
    if (diag != index.end()) emit_triangle(right->second, diag->second, up->second);
  }

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  std::string title = grid.response.empty() ? "prediction" : grid.response;
  if (!grid.scenario.empty()) title += " | " + grid.scenario;
  if (!grid.covariates.empty()) {
    title += " | z=(";
    for (std::size_t k = 0; k < grid.covariates.size(); ++k) {
      title += (k ? "," : "") + number(grid.covariates[k]);
    }
    title += ")";
  }
  svg << "<title>" << xml_escape(title) << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"#ffffff\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">"
      << xml_escape(title) << "</text>\n";

  svg << "<g id=\"bands\" stroke-width=\"0.3\">\n";
  for (int b = 0; b < bands; ++b) {
    const auto& d = paths[static_cast<std::size_t>(b)];
    if (d.empty()) continue;
    const std::string color = color_at(bands == 1 ? 0.5 : (b + 0.5) / bands);
    svg << "<path fill=\"" << color << "\" stroke=\"" << color << "\" d=\"" << d << "\"/>\n";
  }
  svg << "</g>\n";

  auto corner = [&](double a, double b, double c) {
    return to_canvas(ternary_to_plane(MixturePoint{{a, b, c}}));
  };
  const PlanePoint v1 = corner(1, 0, 0);
  const PlanePoint v2 = corner(0, 1, 0);
  const PlanePoint v3 = corner(0, 0, 1);
  svg << "<polygon points=\"" << px(v1.x) << ',' << px(v1.y) << ' ' << px(v2.x) << ','
      << px(v2.y) << ' ' << px(v3.x) << ',' << px(v3.y)
      << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.2\"/>\n";
  if (grid.min_prop > 0.0) {
    const double mp = grid.min_prop;
    const double top = 1.0 - 2.0 * mp;
    const PlanePoint c1 = corner(top, mp, mp);
    const PlanePoint c2 = corner(mp, top, mp);
    const PlanePoint c3 = corner(mp, mp, top);
    svg << "<polygon points=\"" << px(c1.x) << ',' << px(c1.y) << ' ' << px(c2.x) << ','
        << px(c2.y) << ' ' << px(c3.x) << ',' << px(c3.y)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
  }
  svg << "<g font-family=\"sans-serif\" font-size=\"14\">\n"
      << "<text x=\"" << px(v1.x - 8) << "\" y=\"" << px(v1.y + 20) << "\">x1</text>\n"
      << "<text x=\"" << px(v2.x - 8) << "\" y=\"" << px(v2.y + 20) << "\">x2</text>\n"
      << "<text x=\"" << px(v3.x - 8) << "\" y=\"" << px(v3.y - 10) << "\">x3</text>\n"
      << "</g>\n";

  const double legend_x = 450.0;
  const double legend_top = 70.0;
  const double swatch = 22.0;
  svg << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int b = bands - 1, row = 0; b >= 0; --b, ++row) {
    const double y = legend_top + row * swatch;
    const std::string color = color_at(bands == 1 ? 0.5 : (b + 0.5) / bands);
    const std::string label =
        constant ? number(vmin)
                 : number(edges[static_cast<std::size_t>(b)]) + " to " +
                       number(edges[static_cast<std::size_t>(b) + 1]);
    svg << "<rect x=\"" << px(legend_x) << "\" y=\"" << px(y) << "\" width=\"16\" height=\""
        << px(swatch - 4) << "\" fill=\"" << color << "\"/>\n"
        << "<text x=\"" << px(legend_x + 22) << "\" y=\"" << px(y + 13) << "\">"
        << xml_escape(label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void write_grid_csv(std::ostream& out, const TernaryGrid& grid) {
  if (grid.points.empty()) throw InvalidArgument("empty grid");
  if (grid.values.size() != grid.points.size()) throw InvalidArgument("grid has no values");
  const std::size_t m = grid.points.front().size();
  for (std::size_t j = 1; j <= m; ++j) out << 'x' << j << ',';
  out << "value\n";
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    for (double v : grid.points[i].proportions) out << csv::exact(v) << ',';
    out << csv::exact(grid.values[i]) << '\n';
  }
}

std::string covariate_tag(std::span<const double> z) {
  std::string tag = "z";
  bool compact = true;
  std::vector<std::string> parts;
  for (double v : z) {
    parts.push_back(number(v));
    if (parts.back().size() != 1) compact = false;
  }
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (!compact && k > 0) tag += '_';
    tag += parts[k];
  }
  return tag;
}

}  // namespace mixrobust
