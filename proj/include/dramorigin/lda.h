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

#ifndef DRAMORIGIN_LDA_H_
#define DRAMORIGIN_LDA_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dramorigin/features.h"

namespace dramorigin {

/// Within-class and between-class scatter, each normalized by the total
/// sample count.
struct ScatterMatrices {
  Eigen::MatrixXd within;
  Eigen::MatrixXd between;
  Eigen::VectorXd mean;
  std::vector<std::int32_t> classes;  // sorted
};

ScatterMatrices scatter_matrices(std::span<const Point> points,
                                 std::span<const std::int32_t> labels);

/// Fisher criterion v'Sb v / v'Sw v of one direction.
double fisher_criterion(const ScatterMatrices& scatter, std::span<const double> direction);

struct LdaProjection {
  Eigen::MatrixXd directions;  // d x m, columns ordered by eigenvalue
  Eigen::VectorXd center;      // global mean, subtracted before projecting
  std::vector<double> eigenvalues;   // all d generalized eigenvalues, descending
  std::vector<double> separability;  // eigenvalue share of each kept component
  std::vector<std::int32_t> classes;
  double ridge = 0.0;

  std::size_t components() const { return static_cast<std::size_t>(directions.cols()); }
  std::size_t dimension() const { return static_cast<std::size_t>(directions.rows()); }
};

/// Solves Sb v = lambda (Sw + ridge I) v through the Cholesky factor of the
/// regularized Sw, with ridge = 1e-6 trace(Sw) / d. Directions are scaled
/// so v'(Sw + ridge I)v = 1 and signed so their first nonzero coefficient
/// is positive. Needs >= 2 classes with >= 2 samples each and
/// m <= min(d, classes - 1).
LdaProjection fit_lda(std::span<const Point> points, std::span<const std::int32_t> labels,
                      std::size_t m);

std::vector<Point> project(const LdaProjection& projection, std::span<const Point> points);

}  // namespace dramorigin

#endif  // DRAMORIGIN_LDA_H_
