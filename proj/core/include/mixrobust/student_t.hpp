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

namespace mixrobust {

// I_x(a, b), the regularized incomplete beta function, for a, b > 0 and
// x in [0, 1]. Continued fraction (modified Lentz) with the symmetry
// I_x(a, b) = 1 - I_{1-x}(b, a) applied where the fraction converges slowly.
double regularized_incomplete_beta(double a, double b, double x);

// Central Student-t distribution function.
double student_t_cdf(double t, double df);

// 2 * (1 - F(|t|; df)), evaluated without cancellation.
double student_t_two_sided_p(double t, double df);

}  // namespace mixrobust
