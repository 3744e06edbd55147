// Copyright 2026 The dramorigin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oracle/dual_oracle.h"

#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

Matrix rbf_matrix(const std::vector<std::vector<double>>& points, double gamma) {
  const std::size_t n = points.size();
  Matrix k(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0;
      for (std::size_t t = 0; t < points[i].size(); ++t) {
        d += (points[i][t] - points[j][t]) * (points[i][t] - points[j][t]);
      }
      k[i][j] = std::exp(-gamma * d);
    }
  }
  return k;
}

double dual_objective(const Matrix& k, const std::vector<double>& alpha) {
  double lin = 0, quad = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    lin += alpha[i] * k[i][i];
    for (std::size_t j = 0; j < alpha.size(); ++j) quad += alpha[i] * alpha[j] * k[i][j];
  }
  return lin - quad;
}

double grid_dual_max(const Matrix& k, double C, double step) {
  const int units = static_cast<int>(std::lround(1.0 / step));
  const int cap = static_cast<int>(std::floor(C / step + 1e-9));
  const std::size_t n = k.size();
  std::vector<double> alpha(n, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      if (left > cap) return;
      alpha[i] = left * step;
      best = std::max(best, dual_objective(k, alpha));
      return;
    }
    for (int u = 0; u <= std::min(left, cap); ++u) {
      alpha[i] = u * step;
      rec(i + 1, left - u);
    }
  };
  rec(0, units);
  return best;
}

}  // namespace oracle
