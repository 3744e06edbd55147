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

#ifndef DRAMORIGIN_SVDD_H_
#define DRAMORIGIN_SVDD_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dramorigin/features.h"

namespace dramorigin {

/// exp(-gamma * ||x - y||^2). Throws DomainError on dimension mismatch or
/// gamma <= 0.
double kernel_eval(std::span<const double> x, std::span<const double> y, double gamma);

/// Per-feature z-score standardization fitted on training points. Features
/// with zero spread map to 0. An empty scaler is the identity.
class Scaler {
 public:
  Scaler() = default;
  Scaler(std::vector<double> means, std::vector<double> stds);

  static Scaler fit(std::span<const Point> points);

  bool is_identity() const { return means_.empty(); }
  std::size_t dimension() const { return means_.size(); }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stds() const { return stds_; }

  Point apply(std::span<const double> x) const;

  bool operator==(const Scaler&) const = default;

 private:
  std::vector<double> means_;
  std::vector<double> stds_;
};

struct SolverOptions {
  double tolerance = 1e-6;              // KKT residual at which SMO stops
  std::uint64_t max_iterations = 1'000'000;
  double support_threshold = 1e-8;      // alphas at or below are dropped
};

/// A trained one-class SVDD. The center is implicit in the alphas; w2 is
/// sum_ij alpha_i alpha_j K_ij.
struct SvddModel {
  std::int32_t class_tag = 0;
  double C = 1.0;
  double gamma = 1.0;
  double r2 = 0.0;
  double w2 = 0.0;
  double tolerance = 1e-6;
  Scaler scaler;
  std::vector<Point> support_vectors;  // scaled coordinates
  std::vector<double> alphas;
  std::string feature_fingerprint;     // empty for non-feature models

  // Training diagnostics.
  std::size_t training_size = 0;
  double dual_objective = 0.0;
  double kkt_residual = 0.0;
  std::uint64_t iterations = 0;

  std::size_t dimension() const {
    return support_vectors.empty() ? 0 : support_vectors.front().size();
  }
};

/// Full dual solution, before support-vector pruning.
struct DualSolution {
  std::vector<double> alphas;
  std::vector<double> distance2;  // per training point
  double r2 = 0.0;
  double w2 = 0.0;
  double objective = 0.0;  // sum a_i K_ii - sum a_i a_j K_ij
  double kkt_residual = 0.0;
  std::uint64_t iterations = 0;
};

/// Maximizes sum_i a_i K_ii - sum_ij a_i a_j K_ij subject to sum a = 1 and
/// 0 <= a_i <= C by pairwise coordinate ascent on the maximal KKT violating
/// pair. Throws DomainError for C < 1/l and ConvergenceError when the
/// iteration cap is reached.
DualSolution solve_dual(const Eigen::MatrixXd& kernel, double C,
                        const SolverOptions& options = {});

/// Trains on already scaled points; the returned model has an identity
/// scaler and an empty fingerprint.
SvddModel train(std::span<const Point> points, double C, double gamma,
                const SolverOptions& options = {});

/// Fits a z-score scaler on raw feature vectors, trains on the scaled
/// points and stamps the feature fingerprint.
SvddModel train_feature_model(std::span<const FeatureVector> features, double C,
                              double gamma, std::int32_t class_tag,
                              const SolverOptions& options = {});

struct Decision {
  double distance2 = 0.0;
  bool inside = false;
};

/// Applies the model scaler to x_raw, then distance2 = 1 - 2 sum a_i K(x_i, x)
/// + w2 and inside iff distance2 <= r2 + tolerance.
Decision decide(const SvddModel& model, std::span<const double> x_raw);

/// Uniform draws from the training bounding box scaled 1.5x about its
/// center. Throws DomainError for count == 0 or an empty training set.
std::vector<Point> generate_artificial_outliers(std::span<const Point> training,
                                                std::size_t count, std::uint64_t seed);

struct GridScore {
  double C = 0.0;
  double gamma = 0.0;
  bool feasible = false;
  double score = 0.0;  // mean over folds of (TPR + TNR) / 2
  double true_positive_rate = 0.0;
  double true_negative_rate = 0.0;
};

struct TuneOptions {
  std::size_t outlier_factor = 10;  // artificial outliers per training point
  SolverOptions solver;
};

struct TuneResult {
  double C = 0.0;
  double gamma = 0.0;
  double score = 0.0;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::size_t outlier_count = 0;
  std::vector<GridScore> grid;  // sorted by (gamma, C)
  std::vector<GridScore> skipped() const;
};

/// k-fold cross-validated grid search over (C, gamma) on scaled training
/// points, scoring held-out positives against artificial outliers. Ties
/// go to the smaller gamma, then the smaller C, so the choice does not
/// depend on grid order. Infeasible C values are skipped and reported.
TuneResult tune(std::span<const Point> training, std::span<const double> c_grid,
                std::span<const double> gamma_grid, std::size_t folds, std::uint64_t seed,
                const TuneOptions& options = {});

std::vector<double> default_c_grid();      // 0.05, 0.1, 0.2, 0.5, 1
std::vector<double> default_gamma_grid();  // 2^-12 .. 2^2

// Model file: JSON text with every field needed to reproduce decide().
inline constexpr int kModelFormatVersion = 1;
std::string model_to_json(const SvddModel& model,
                          const std::optional<TuneResult>& tuning = std::nullopt);
SvddModel model_from_json(std::string_view text);
void save_model(const SvddModel& model, const std::filesystem::path& path,
                const std::optional<TuneResult>& tuning = std::nullopt);
SvddModel load_model(const std::filesystem::path& path);

}  // namespace dramorigin

#endif  // DRAMORIGIN_SVDD_H_
