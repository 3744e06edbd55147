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

#include "dramorigin/lda.h"

#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "dramorigin/error.h"
#include "dramorigin/rng.h"

namespace dramorigin {
namespace {

struct Labeled {
  std::vector<Point> points;
  std::vector<std::int32_t> labels;
};

Labeled gaussian_classes(Rng& rng, std::size_t classes, std::size_t per_class, std::size_t d) {
  Labeled out;
  for (std::size_t c = 0; c < classes; ++c) {
    Point center(d), spread(d);
    for (std::size_t j = 0; j < d; ++j) {
      center[j] = rng.uniform(-3.0, 3.0);
      spread[j] = rng.uniform(0.2, 2.0);
    }
    for (std::size_t i = 0; i < per_class; ++i) {
      Point p(d);
      for (std::size_t j = 0; j < d; ++j) p[j] = center[j] + spread[j] * rng.normal();
      // correlate the first two axes so Sw is not diagonal
      p[1] += 0.5 * (p[0] - center[0]);
      out.points.push_back(p);
      out.labels.push_back(static_cast<std::int32_t>(c + 1));
    }
  }
  return out;
}

double angle_to(const Eigen::VectorXd& v, const Eigen::VectorXd& axis) {
  const double c = std::abs(v.dot(axis)) / (v.norm() * axis.norm());
  return std::acos(std::min(1.0, c));
}

TEST(Lda, IdenticalMeansGiveZeroEigenvalues) {
  std::vector<Point> pts;
  std::vector<std::int32_t> labels;
  for (int c = 0; c < 3; ++c) {
    for (const Point& off : std::vector<Point>{{1, 0}, {-1, 0}, {0, 2}, {0, -2}}) {
      pts.push_back(off);
      labels.push_back(c);
    }
  }
  const LdaProjection p = fit_lda(pts, labels, 2);
  for (double e : p.eigenvalues) EXPECT_NEAR(e, 0.0, 1e-12);
}

TEST(Lda, TwoClusterAxisRecovery) {
  // symmetric clusters at (+-4, 0): mean difference lies exactly on axis 1
  std::vector<Point> pts;
  std::vector<std::int32_t> labels;
  const std::vector<Point> ring = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {0.6, 0.8}, {-0.6, -0.8},
                                   {0.8, -0.6}, {-0.8, 0.6}};
  for (int c = 0; c < 2; ++c) {
    const double cx = c == 0 ? -4.0 : 4.0;
    for (const auto& r : ring) {
      pts.push_back({cx + r[0], r[1]});
      labels.push_back(c);
    }
  }
  const LdaProjection p = fit_lda(pts, labels, 1);
  Eigen::Vector2d axis(1.0, 0.0);
  EXPECT_LE(angle_to(p.directions.col(0), axis), 1e-6);
  EXPECT_GT(p.directions(0, 0), 0.0);  // sign rule
}

TEST(Lda, ShiftedClusterRecoversMeanDifference) {
  // anisotropic but shared within-class cloud: optimum is Sw^-1 (mu1 - mu0)
  Rng rng(3);
  std::vector<Point> base;
  for (int i = 0; i < 50; ++i) base.push_back({rng.normal() * 2.0, rng.normal() * 0.5, rng.normal()});
  const Point shift = {1.0, 0.3, -0.7};
  std::vector<Point> pts;
  std::vector<std::int32_t> labels;
  for (const auto& b : base) {
    pts.push_back(b);
    labels.push_back(0);
    pts.push_back({b[0] + shift[0], b[1] + shift[1], b[2] + shift[2]});
    labels.push_back(1);
  }
  const ScatterMatrices s = scatter_matrices(pts, labels);
  const Eigen::Vector3d want = s.within.ldlt().solve(Eigen::Vector3d(shift[0], shift[1], shift[2]));
  const LdaProjection p = fit_lda(pts, labels, 1);
  // the ridge tilts the answer by O(1e-6)
  EXPECT_LE(angle_to(p.directions.col(0), want), 1e-5);
}

TEST(Lda, FisherBeatsRandomDirections) {
  Rng rng(4);
  const Labeled data = gaussian_classes(rng, 5, 40, 6);
  const LdaProjection p = fit_lda(data.points, data.labels, 4);
  const ScatterMatrices s = scatter_matrices(data.points, data.labels);
  const double top = fisher_criterion(
      s, std::span<const double>(p.directions.col(0).data(), p.directions.rows()));
  for (int i = 0; i < 100; ++i) {
    Point dir(6);
    double n = 0.0;
    for (double& x : dir) {
      x = rng.normal();
      n += x * x;
    }
    for (double& x : dir) x /= std::sqrt(n);
    EXPECT_GE(top, fisher_criterion(s, dir));
  }
  // components come in decreasing criterion order
  double prev = top;
  for (Eigen::Index k = 1; k < p.directions.cols(); ++k) {
    const double f = fisher_criterion(
        s, std::span<const double>(p.directions.col(k).data(), p.directions.rows()));
    EXPECT_LE(f, prev * (1 + 1e-9));
    prev = f;
  }
  for (std::size_t k = 1; k < p.eigenvalues.size(); ++k) {
    EXPECT_GE(p.eigenvalues[k - 1], p.eigenvalues[k]);
  }
}

TEST(Lda, EachComponentOptimalInItsComplement) {
  // component k beats random directions that are Sw-orthogonal to 1..k-1
  Rng rng(10);
  const Labeled data = gaussian_classes(rng, 6, 40, 7);
  const LdaProjection p = fit_lda(data.points, data.labels, 5);
  const ScatterMatrices s = scatter_matrices(data.points, data.labels);
  Eigen::MatrixXd sw = s.within;
  sw.diagonal().array() += p.ridge;
  for (Eigen::Index k = 1; k < 5; ++k) {
    const Eigen::MatrixXd a = sw * p.directions.leftCols(k);
    const auto col = p.directions.col(k);
    const double f = fisher_criterion(s, std::span<const double>(col.data(), col.size()));
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd v(7);
      for (Eigen::Index j = 0; j < 7; ++j) v[j] = rng.normal();
      v -= a * (a.transpose() * a).ldlt().solve(a.transpose() * v);
      v.normalize();
      EXPECT_GE(f * (1 + 1e-9), fisher_criterion(s, std::span<const double>(v.data(), 7)));
    }
  }
}

TEST(Lda, GlobalMeanProjectsToOrigin) {
  Rng rng(5);
  const Labeled data = gaussian_classes(rng, 3, 20, 4);
  const LdaProjection p = fit_lda(data.points, data.labels, 2);
  Point mean(4, 0.0);
  for (const auto& x : data.points) {
    for (std::size_t j = 0; j < 4; ++j) mean[j] += x[j] / data.points.size();
  }
  const std::vector<Point> in = {mean};
  const auto out = project(p, in);
  for (double y : out[0]) EXPECT_NEAR(y, 0.0, 1e-12);
}

TEST(Lda, DuplicatedRowsProjectIdentically) {
  Rng rng(6);
  const Labeled data = gaussian_classes(rng, 3, 10, 3);
  const LdaProjection p = fit_lda(data.points, data.labels, 2);
  const std::vector<Point> in = {data.points[4], data.points[4], data.points[7], data.points[4]};
  const auto out = project(p, in);
  EXPECT_EQ(out[0], out[1]);
  EXPECT_EQ(out[0], out[3]);
  EXPECT_NE(out[0], out[2]);
}

TEST(Lda, OneDimensionalClosedForm) {
  const std::vector<Point> pts = {{1.0}, {2.0}, {3.0}, {7.0}, {9.0}};
  const std::vector<std::int32_t> labels = {0, 0, 0, 1, 1};
  // class means 2 and 8, global mean 4.4, within scatter (2 + 2) / 5
  const double sw = 4.0 / 5.0;
  const LdaProjection p = fit_lda(pts, labels, 1);
  const auto out = project(p, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(out[i][0], (pts[i][0] - 4.4) / std::sqrt(sw), 1e-12);
  }
  // between scatter (3*2.4^2 + 2*3.6^2)/5 = 8.64 over sw, less the ridge
  EXPECT_NEAR(p.eigenvalues[0], 8.64 / sw, 1e-4);
}

TEST(Lda, UnitWithinClassScatterPerComponent) {
  Rng rng(7);
  const Labeled data = gaussian_classes(rng, 6, 30, 8);
  const LdaProjection p = fit_lda(data.points, data.labels, 5);
  const auto y = project(p, data.points);
  for (std::size_t k = 0; k < 5; ++k) {
    std::map<std::int32_t, std::pair<double, int>> sums;
    for (std::size_t i = 0; i < y.size(); ++i) {
      sums[data.labels[i]].first += y[i][k];
      sums[data.labels[i]].second += 1;
    }
    double scatter = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto& [sum, n] = sums[data.labels[i]];
      const double d = y[i][k] - sum / n;
      scatter += d * d;
    }
    EXPECT_NEAR(scatter / y.size(), 1.0, 1e-6) << "component " << k;
  }
}

TEST(Lda, RelabelingInvariance) {
  Rng rng(8);
  Labeled data = gaussian_classes(rng, 4, 15, 5);
  const LdaProjection a = fit_lda(data.points, data.labels, 3);
  const std::map<std::int32_t, std::int32_t> perm = {{1, 40}, {2, -3}, {3, 7}, {4, 2}};
  for (auto& l : data.labels) l = perm.at(l);
  const LdaProjection b = fit_lda(data.points, data.labels, 3);
  EXPECT_LE((a.directions - b.directions).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Lda, FiniteOutputs) {
  Rng rng(9);
  Labeled data = gaussian_classes(rng, 3, 10, 4);
  for (auto& p : data.points) p[3] = 5.0;  // constant feature: singular Sw
  const LdaProjection p = fit_lda(data.points, data.labels, 2);
  for (const auto& y : project(p, data.points)) {
    for (double v : y) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Lda, Errors) {
  const std::vector<Point> pts = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const std::vector<std::int32_t> one_class = {1, 1, 1, 1};
  EXPECT_THROW(fit_lda(pts, one_class, 1), DomainError);
  const std::vector<std::int32_t> two = {1, 1, 2, 2};
  EXPECT_THROW(fit_lda(pts, two, 2), DomainError);
  EXPECT_THROW(fit_lda(pts, two, 0), DomainError);
  const std::vector<std::int32_t> singleton = {1, 1, 1, 2};
  EXPECT_THROW(fit_lda(pts, singleton, 1), DomainError);
  const std::vector<std::int32_t> short_labels = {1, 2};
  EXPECT_THROW(fit_lda(pts, short_labels, 1), DomainError);
  const LdaProjection p = fit_lda(pts, two, 1);
  const std::vector<Point> bad = {{1, 2, 3}};
  EXPECT_THROW(project(p, bad), DomainError);
}

}  // namespace
}  // namespace dramorigin
