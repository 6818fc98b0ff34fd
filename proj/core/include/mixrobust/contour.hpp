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
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mixrobust/design.hpp"
#include "mixrobust/mixmodel.hpp"

namespace mixrobust {

// Fitted response over a lattice of the constrained simplex.
struct TernaryGrid {
  int resolution = 0;  // lattice denominator q
  double min_prop = 0.0;
  std::vector<MixturePoint> points;
  std::vector<double> values;  // empty until grid_predict
  std::vector<double> covariates;
  std::string response;
  std::string scenario;
};

// Every point (a_1/q, ..., a_m/q) with sum a_j = q and each coordinate at
// least min_prop. Lexicographic in (a_1, ..., a_m).
std::vector<MixturePoint> simplex_lattice(std::size_t m, int q, double min_prop);

// The m = 3 lattice; requires q >= 2 and min_prop < 1/3.
std::vector<MixturePoint> ternary_grid(int q, double min_prop);

TernaryGrid make_grid(std::size_t m, int q, double min_prop);

// Evaluates the fit at every grid point for the covariate levels z.
TernaryGrid grid_predict(const MixtureModelFit& fit, TernaryGrid grid, std::span<const double> z);

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

// Equilateral projection with unit side: x1 at (0, 0), x2 at (1, 0) and
// x3 at (1/2, sqrt(3)/2).
PlanePoint ternary_to_plane(const MixturePoint& point);

// SVG with filled contour bands between "levels" equally spaced thresholds,
// vertex labels, a legend and a dashed triangle marking the min_prop floor.
// Requires a valid m = 3 grid with values.
std::string render_ternary(const TernaryGrid& grid, int levels);

// Grid CSV: x1..xm,value.
void write_grid_csv(std::ostream& out, const TernaryGrid& grid);

// "z" followed by the covariate levels, e.g. z10 for (1, 0).
std::string covariate_tag(std::span<const double> z);

}  // namespace mixrobust
