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
#include "mixrobust/student_t.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

namespace mixrobust {
namespace {

// Student-t CDF by adaptive Gauss-Kronrod quadrature of the density.
double quadrature_cdf(double t, double df) {
  const double log_norm = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) -
                          0.5 * std::log(df * M_PI);
  auto pdf = [&](double x) {
    return std::exp(log_norm - (df + 1) / 2 * std::log1p(x * x / df));
  };
  const double half =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(pdf, 0.0, std::abs(t), 15,
                                                                    1e-14);
  return t >= 0 ? 0.5 + half : 0.5 - half;
}

TEST(StudentT, MatchesQuadratureOracle) {
  double worst = 0.0;
  for (int df = 1; df <= 200; ++df) {
    for (double t = -40.0; t <= 40.0; t += 0.625) {
      const double err = std::abs(student_t_cdf(t, df) - quadrature_cdf(t, df));
      worst = std::max(worst, err);
      ASSERT_LE(err, 1e-9) << "t=" << t << " df=" << df;
    }
  }
  RecordProperty("max_abs_error", std::to_string(worst));
}

TEST(StudentT, SymmetryAndCenter) {
  for (double df : {1.0, 3.5, 71.0}) {
    EXPECT_DOUBLE_EQ(student_t_cdf(0.0, df), 0.5);
    for (double t : {0.3, 2.0, 17.0}) {
      EXPECT_NEAR(student_t_cdf(t, df) + student_t_cdf(-t, df), 1.0, 1e-15);
    }
  }
  // df = 1 is Cauchy.
  EXPECT_NEAR(student_t_cdf(1.0, 1.0), 0.75, 1e-15);
  EXPECT_NEAR(student_t_cdf(-3.0, 1.0), 0.5 + std::atan(-3.0) / M_PI, 1e-15);
}

TEST(StudentT, TwoSidedPValuesAtDf71) {
  EXPECT_NEAR(student_t_two_sided_p(-0.758, 71), 0.451, 0.005);
  EXPECT_NEAR(student_t_two_sided_p(1.233, 71), 0.222, 0.005);
  EXPECT_NEAR(student_t_two_sided_p(-1.919, 71), 0.059, 0.005);
  EXPECT_LT(student_t_two_sided_p(25.43, 71), 0.001);
  EXPECT_DOUBLE_EQ(student_t_two_sided_p(0.0, 71), 1.0);
  // Far tail without cancellation.
  EXPECT_GT(student_t_two_sided_p(40.0, 71), 0.0);
  EXPECT_LT(student_t_two_sided_p(40.0, 71), 1e-40);
}

TEST(IncompleteBeta, ClosedForms) {
  for (double x : {0.0, 0.1, 0.5, 0.93, 1.0}) {
    EXPECT_NEAR(regularized_incomplete_beta(1, 1, x), x, 1e-15);
    EXPECT_NEAR(regularized_incomplete_beta(3, 1, x), x * x * x, 1e-15);
    EXPECT_NEAR(regularized_incomplete_beta(1, 4, x), 1 - std::pow(1 - x, 4), 1e-15);
  }
  for (double x : {0.2, 0.7}) {
    EXPECT_NEAR(regularized_incomplete_beta(2.5, 7.0, x) + regularized_incomplete_beta(7.0, 2.5, 1 - x),
                1.0, 1e-14);
  }
}

}  // namespace
}  // namespace mixrobust
