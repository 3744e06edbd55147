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

#include "dramorigin/svdd.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dramorigin/error.h"
#include "dramorigin/parallel.h"
#include "dramorigin/rng.h"

namespace dramorigin {
namespace {

std::size_t common_dimension(std::span<const Point> points, const char* what) {
  if (points.empty()) throw DomainError(std::string(what) + ": no points");
  const std::size_t d = points.front().size();
  for (const auto& p : points) {
    if (p.size() != d) throw DomainError(std::string(what) + ": points differ in dimension");
  }
  return d;
}

// Points as columns of a d x n matrix, so each point is contiguous.
Eigen::MatrixXd to_matrix(std::span<const Point> points) {
  const std::size_t d = points.empty() ? 0 : points.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::copy(points[i].begin(), points[i].end(), m.col(static_cast<Eigen::Index>(i)).data());
  }
  return m;
}

// Pairwise squared Euclidean distances between the columns of a and b.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index d = a.rows();
  Eigen::MatrixXd out(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    const double* y = b.col(j).data();
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      const double* x = a.col(i).data();
      double acc = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double t = x[k] - y[k];
        acc += t * t;
      }
      out(i, j) = acc;
    }
  }
  return out;
}

// exp() falls into a slow path near underflow; entries below e^-700 are
// stored as 0, which moves no sum by more than 1e-304.
constexpr double kKernelFloorArg = -700.0;

Eigen::MatrixXd rbf(const Eigen::MatrixXd& sqdist, double gamma) {
  const auto arg = -gamma * sqdist.array();
  return (arg < kKernelFloorArg).select(0.0, arg.max(kKernelFloorArg).exp()).matrix();
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("kernel gamma must be a positive finite number");
  }
}

}  // namespace

double kernel_eval(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) throw DomainError("kernel_eval: dimension mismatch");
  check_gamma(gamma);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x[i] - y[i];
    d += t * t;
  }
  return std::exp(-gamma * d);
}

Scaler::Scaler(std::vector<double> means, std::vector<double> stds)
    : means_(std::move(means)), stds_(std::move(stds)) {
  if (means_.size() != stds_.size()) throw DomainError("scaler means/stds differ in length");
}

Scaler Scaler::fit(std::span<const Point> points) {
  const std::size_t d = common_dimension(points, "Scaler::fit");
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (const auto& p : points) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += p[j];
  }
  for (double& m : mean) m /= static_cast<double>(points.size());
  for (const auto& p : points) {
    for (std::size_t j = 0; j < d; ++j) sd[j] += (p[j] - mean[j]) * (p[j] - mean[j]);
  }
  for (std::size_t j = 0; j < d; ++j) {
    sd[j] = std::sqrt(sd[j] / static_cast<double>(points.size()));
    // spread below rounding noise of the mean counts as constant
    if (sd[j] <= 1e-12 * std::max(1.0, std::abs(mean[j]))) sd[j] = 0.0;
  }
  return Scaler(std::move(mean), std::move(sd));
}

Point Scaler::apply(std::span<const double> x) const {
  if (is_identity()) return Point(x.begin(), x.end());
  if (x.size() != means_.size()) {
    throw DomainError("scaler expects dimension " + std::to_string(means_.size()) +
                      ", got " + std::to_string(x.size()));
  }
  Point out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = stds_[j] > 0.0 ? (x[j] - means_[j]) / stds_[j] : 0.0;
  }
  return out;
}

DualSolution solve_dual(const Eigen::MatrixXd& kernel, double C, const SolverOptions& options) {
  const Eigen::Index l = kernel.rows();
  if (l == 0 || kernel.cols() != l) throw DomainError("solve_dual: kernel must be square and nonempty");
  if (!(C > 0.0) || C * static_cast<double>(l) < 1.0 - 1e-12) {
    throw DomainError("C = " + std::to_string(C) + " is infeasible for " + std::to_string(l) +
                      " points (need C >= 1/l)");
  }
  const double eps = options.support_threshold;

  std::vector<double> alpha(static_cast<std::size_t>(l), 0.0);
  double remaining = 1.0;
  for (Eigen::Index i = 0; i < l && remaining > 0.0; ++i) {
    const double a = std::min(C, remaining);
    alpha[static_cast<std::size_t>(i)] = a;
    remaining -= a;
  }

  // grad_i = K_ii - 2 (K alpha)_i, the gradient of the dual objective
  Eigen::VectorXd a_vec = Eigen::Map<Eigen::VectorXd>(alpha.data(), l);
  Eigen::VectorXd grad = kernel.diagonal() - 2.0 * (kernel * a_vec);

  std::uint64_t iter = 0;
  double residual = 0.0;
  while (true) {
    // i: may increase (alpha < C), largest gradient; j: may decrease, smallest
    Eigen::Index up = -1, down = -1;
    double g_up = -std::numeric_limits<double>::infinity();
    double g_down = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < l; ++k) {
      const double a = alpha[static_cast<std::size_t>(k)];
      if (a < C && grad[k] > g_up) {
        g_up = grad[k];
        up = k;
      }
      if (a > 0.0 && grad[k] < g_down) {
        g_down = grad[k];
        down = k;
      }
    }
    residual = (up < 0 || down < 0) ? 0.0 : std::max(0.0, g_up - g_down);
    if (residual <= options.tolerance) break;
    if (iter >= options.max_iterations) {
      std::ostringstream msg;
      msg << "SVDD dual solver did not converge in " << iter
          << " iterations (KKT residual " << residual << ")";
      throw ConvergenceError(msg.str(), residual, iter);
    }
    ++iter;

    double& ai = alpha[static_cast<std::size_t>(up)];
    double& aj = alpha[static_cast<std::size_t>(down)];
    const double eta = kernel(up, up) + kernel(down, down) - 2.0 * kernel(up, down);
    const double limit = std::min(C - ai, aj);
    double t = eta > 1e-12 ? (g_up - g_down) / (2.0 * eta) : limit;
    bool clipped = false;
    if (t >= limit) {
      t = limit;
      clipped = true;
    }
    if (clipped && limit == aj) {
      ai += aj;
      aj = 0.0;
    } else if (clipped) {
      aj -= C - ai;
      ai = C;
    } else {
      ai += t;
      aj -= t;
    }
    grad -= 2.0 * t * (kernel.col(up) - kernel.col(down));
  }

  DualSolution s;
  s.alphas = alpha;
  s.iterations = iter;
  s.kkt_residual = residual;
  a_vec = Eigen::Map<Eigen::VectorXd>(alpha.data(), l);
  const Eigen::VectorXd ka = kernel * a_vec;
  s.w2 = a_vec.dot(ka);
  s.objective = a_vec.dot(kernel.diagonal()) - s.w2;
  s.distance2.resize(static_cast<std::size_t>(l));
  for (Eigen::Index k = 0; k < l; ++k) {
    s.distance2[static_cast<std::size_t>(k)] = kernel(k, k) - 2.0 * ka[k] + s.w2;
  }

  double free_sum = 0.0;
  std::size_t free_n = 0;
  double lower_max = -std::numeric_limits<double>::infinity();
  double upper_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const double d = s.distance2[k];
    if (alpha[k] > eps && alpha[k] < C - eps) {
      free_sum += d;
      ++free_n;
    } else if (alpha[k] <= eps) {
      lower_max = std::max(lower_max, d);
    } else {
      upper_min = std::min(upper_min, d);
    }
  }
  if (free_n > 0) {
    s.r2 = free_sum / static_cast<double>(free_n);
  } else if (std::isfinite(lower_max) && std::isfinite(upper_min)) {
    s.r2 = 0.5 * (lower_max + upper_min);
  } else {
    s.r2 = std::isfinite(upper_min) ? upper_min : lower_max;
  }
  s.r2 = std::max(0.0, s.r2);
  return s;
}

SvddModel train(std::span<const Point> points, double C, double gamma,
                const SolverOptions& options) {
  common_dimension(points, "train");
  check_gamma(gamma);
  const Eigen::MatrixXd x = to_matrix(points);
  Eigen::MatrixXd k = rbf(squared_distances(x, x), gamma);
  k.diagonal().setOnes();
  const DualSolution sol = solve_dual(k, C, options);

  SvddModel m;
  m.C = C;
  m.gamma = gamma;
  m.r2 = sol.r2;
  m.w2 = sol.w2;
  m.tolerance = options.tolerance;
  m.training_size = points.size();
  m.dual_objective = sol.objective;
  m.kkt_residual = sol.kkt_residual;
  m.iterations = sol.iterations;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (sol.alphas[i] > options.support_threshold) {
      m.support_vectors.push_back(points[i]);
      m.alphas.push_back(sol.alphas[i]);
    }
  }
  return m;
}

SvddModel train_feature_model(std::span<const FeatureVector> features, double C, double gamma,
                              std::int32_t class_tag, const SolverOptions& options) {
  std::vector<Point> raw;
  raw.reserve(features.size());
  for (const auto& f : features) raw.push_back(f.to_point());
  if (raw.empty()) throw DomainError("train_feature_model: no training pages");
  Scaler scaler = Scaler::fit(raw);
  std::vector<Point> scaled;
  scaled.reserve(raw.size());
  for (const auto& r : raw) scaled.push_back(scaler.apply(r));
  SvddModel m = train(scaled, C, gamma, options);
  m.scaler = std::move(scaler);
  m.class_tag = class_tag;
  m.feature_fingerprint = feature_fingerprint();
  return m;
}

Decision decide(const SvddModel& model, std::span<const double> x_raw) {
  const Point x = model.scaler.apply(x_raw);
  if (x.size() != model.dimension()) {
    throw DomainError("decide: model dimension " + std::to_string(model.dimension()) +
                      ", input dimension " + std::to_string(x.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    const Point& sv = model.support_vectors[i];
    double d = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double t = sv[j] - x[j];
      d += t * t;
    }
    s += model.alphas[i] * std::exp(-model.gamma * d);
  }
  Decision out;
  out.distance2 = 1.0 - 2.0 * s + model.w2;
  out.inside = out.distance2 <= model.r2 + model.tolerance;
  return out;
}

std::vector<Point> generate_artificial_outliers(std::span<const Point> training,
                                                std::size_t count, std::uint64_t seed) {
  if (count == 0) throw DomainError("artificial outlier count must be >= 1");
  const std::size_t d = common_dimension(training, "generate_artificial_outliers");
  std::vector<double> lo(training.front()), hi(training.front());
  for (const auto& p : training) {
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double center = 0.5 * (lo[j] + hi[j]);
    const double half = 0.75 * (hi[j] - lo[j]);
    lo[j] = center - half;
    hi[j] = center + half;
  }
  Rng rng(seed);
  std::vector<Point> out(count, Point(d));
  for (auto& p : out) {
    for (std::size_t j = 0; j < d; ++j) p[j] = lo[j] == hi[j] ? lo[j] : rng.uniform(lo[j], hi[j]);
  }
  return out;
}

std::vector<GridScore> TuneResult::skipped() const {
  std::vector<GridScore> s;
  for (const auto& g : grid) {
    if (!g.feasible) s.push_back(g);
  }
  return s;
}

TuneResult tune(std::span<const Point> training, std::span<const double> c_grid,
                std::span<const double> gamma_grid, std::size_t folds, std::uint64_t seed,
                const TuneOptions& options) {
  if (folds < 2) throw DomainError("tune: need at least 2 folds");
  if (c_grid.empty() || gamma_grid.empty()) throw DomainError("tune: empty grid");
  common_dimension(training, "tune");
  const std::size_t l = training.size();
  if (l < folds) throw DomainError("tune: fewer training points than folds");

  std::vector<double> cs(c_grid.begin(), c_grid.end());
  std::vector<double> gammas(gamma_grid.begin(), gamma_grid.end());
  for (double c : cs) {
    if (!(c > 0.0)) throw DomainError("tune: C values must be positive");
  }
  for (double g : gammas) check_gamma(g);
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());

  const std::size_t n_outliers = options.outlier_factor * l;
  const std::vector<Point> outliers =
      generate_artificial_outliers(training, std::max<std::size_t>(1, n_outliers),
                                   derive_seed(seed, {1}));

  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle(derive_seed(seed, {2}));
  for (std::size_t i = l - 1; i > 0; --i) std::swap(order[i], order[shuffle.below(i + 1)]);
  std::vector<std::size_t> fold_of(l);
  for (std::size_t pos = 0; pos < l; ++pos) fold_of[order[pos]] = pos % folds;

  const std::size_t n_grid = gammas.size() * cs.size();
  std::vector<GridScore> grid(n_grid);
  std::vector<double> tpr_sum(n_grid, 0.0), tnr_sum(n_grid, 0.0);
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
      auto& g = grid[gi * cs.size() + ci];
      g.gamma = gammas[gi];
      g.C = cs[ci];
      g.feasible = true;
    }
  }

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<Point> fit, held_pos, held_neg;
    for (std::size_t i = 0; i < l; ++i) (fold_of[i] == f ? held_pos : fit).push_back(training[i]);
    for (std::size_t i = f; i < outliers.size(); i += folds) held_neg.push_back(outliers[i]);
    const Eigen::MatrixXd x = to_matrix(fit);
    const Eigen::MatrixXd d_fit = squared_distances(x, x);
    const Eigen::MatrixXd d_pos = squared_distances(to_matrix(held_pos), x);
    const Eigen::MatrixXd d_neg =
        held_neg.empty() ? Eigen::MatrixXd() : squared_distances(to_matrix(held_neg), x);

    // one kernel matrix per gamma serves every C; held-out points are only
    // evaluated against the support vectors
    parallel_for(gammas.size(), [&](std::size_t gi) {
      const double gamma = gammas[gi];
      Eigen::MatrixXd k = rbf(d_fit, gamma);
      k.diagonal().setOnes();
      for (std::size_t ci = 0; ci < cs.size(); ++ci) {
        const std::size_t idx = gi * cs.size() + ci;
        GridScore& g = grid[idx];
        if (g.C * static_cast<double>(fit.size()) < 1.0 - 1e-12) {
          g.feasible = false;
          continue;
        }
        const DualSolution sol = solve_dual(k, g.C, options.solver);
        std::vector<Eigen::Index> sv;
        for (std::size_t i = 0; i < sol.alphas.size(); ++i) {
          if (sol.alphas[i] > 0.0) sv.push_back(static_cast<Eigen::Index>(i));
        }
        Eigen::VectorXd a(static_cast<Eigen::Index>(sv.size()));
        for (std::size_t j = 0; j < sv.size(); ++j) a[static_cast<Eigen::Index>(j)] =
            sol.alphas[static_cast<std::size_t>(sv[j])];
        const double bound = sol.r2 + options.solver.tolerance;
        auto outside_count = [&](const Eigen::MatrixXd& d) {
          const Eigen::VectorXd d2 =
              (1.0 + sol.w2) - 2.0 * (rbf(d(Eigen::all, sv), gamma) * a).array();
          return static_cast<double>((d2.array() > bound).count());
        };
        const double n_pos = static_cast<double>(held_pos.size());
        tpr_sum[idx] += (n_pos - outside_count(d_pos)) / n_pos;
        tnr_sum[idx] += held_neg.empty()
                            ? 1.0
                            : outside_count(d_neg) / static_cast<double>(held_neg.size());
      }
    });
  }

  TuneResult result;
  result.folds = folds;
  result.seed = seed;
  result.outlier_count = outliers.size();
  const GridScore* best = nullptr;
  for (std::size_t idx = 0; idx < n_grid; ++idx) {
    GridScore& g = grid[idx];
    if (!g.feasible) continue;
    g.true_positive_rate = tpr_sum[idx] / static_cast<double>(folds);
    g.true_negative_rate = tnr_sum[idx] / static_cast<double>(folds);
    g.score = 0.5 * (g.true_positive_rate + g.true_negative_rate);
    // grid is ordered by (gamma, C) ascending, so strict improvement keeps
    // the smaller gamma, then smaller C, among equal scores
    if (best == nullptr || g.score > best->score + 1e-12) best = &g;
  }
  if (best == nullptr) throw DomainError("tune: every grid point is infeasible");
  result.C = best->C;
  result.gamma = best->gamma;
  result.score = best->score;
  result.grid = std::move(grid);
  return result;
}

std::vector<double> default_c_grid() { return {0.05, 0.1, 0.2, 0.5, 1.0}; }

std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int e = -12; e <= 2; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

}  // namespace dramorigin
