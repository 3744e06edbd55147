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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dramorigin/error.h"

namespace dramorigin {
namespace {

Eigen::VectorXd as_vector(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

}  // namespace

ScatterMatrices scatter_matrices(std::span<const Point> points,
                                 std::span<const std::int32_t> labels) {
  if (points.size() != labels.size()) throw DomainError("lda: one label per point required");
  if (points.empty()) throw DomainError("lda: no points");
  const auto d = static_cast<Eigen::Index>(points.front().size());
  for (const auto& p : points) {
    if (static_cast<Eigen::Index>(p.size()) != d) throw DomainError("lda: dimension mismatch");
  }

  std::map<std::int32_t, std::pair<Eigen::VectorXd, std::size_t>> sums;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [it, fresh] = sums.try_emplace(labels[i], Eigen::VectorXd::Zero(d), 0);
    const Eigen::VectorXd x = as_vector(points[i]);
    it->second.first += x;
    it->second.second += 1;
    mean += x;
  }
  const double n = static_cast<double>(points.size());
  mean /= n;

  ScatterMatrices s;
  s.mean = mean;
  s.within = Eigen::MatrixXd::Zero(d, d);
  s.between = Eigen::MatrixXd::Zero(d, d);
  std::map<std::int32_t, Eigen::VectorXd> class_mean;
  for (auto& [label, acc] : sums) {
    s.classes.push_back(label);
    const Eigen::VectorXd mu = acc.first / static_cast<double>(acc.second);
    class_mean.emplace(label, mu);
    const Eigen::VectorXd diff = mu - mean;
    s.between += static_cast<double>(acc.second) * diff * diff.transpose();
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::VectorXd diff = as_vector(points[i]) - class_mean.at(labels[i]);
    s.within += diff * diff.transpose();
  }
  s.within /= n;
  s.between /= n;
  return s;
}

double fisher_criterion(const ScatterMatrices& scatter, std::span<const double> direction) {
  const Eigen::VectorXd v = as_vector(direction);
  if (v.size() != scatter.within.rows()) throw DomainError("fisher_criterion: dimension mismatch");
  const double w = v.dot(scatter.within * v);
  const double b = v.dot(scatter.between * v);
  return w > 0.0 ? b / w : (b > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
}

LdaProjection fit_lda(std::span<const Point> points, std::span<const std::int32_t> labels,
                      std::size_t m) {
  const ScatterMatrices s = scatter_matrices(points, labels);
  if (s.classes.size() < 2) throw DomainError("lda: need at least two classes");
  for (std::int32_t c : s.classes) {
    if (std::count(labels.begin(), labels.end(), c) < 2) {
      throw DomainError("lda: class " + std::to_string(c) + " has fewer than 2 samples");
    }
  }
  const auto d = static_cast<std::size_t>(s.within.rows());
  if (m == 0 || m > std::min(d, s.classes.size() - 1)) {
    throw DomainError("lda: " + std::to_string(m) + " components requested, at most " +
                      std::to_string(std::min(d, s.classes.size() - 1)) + " available");
  }

  double ridge = 1e-6 * s.within.trace() / static_cast<double>(d);
  if (!(ridge > 0.0)) ridge = 1e-6;
  Eigen::MatrixXd sw = s.within;
  sw.diagonal().array() += ridge;
  const Eigen::LLT<Eigen::MatrixXd> llt(sw);
  if (llt.info() != Eigen::Success) throw DomainError("lda: within-class scatter not factorizable");
  const Eigen::MatrixXd l = llt.matrixL();

  // M = L^-1 Sb L^-T
  Eigen::MatrixXd tmp = l.triangularView<Eigen::Lower>().solve(s.between);
  Eigen::MatrixXd reduced = l.triangularView<Eigen::Lower>().solve(tmp.transpose());
  reduced = 0.5 * (reduced + reduced.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
  if (eig.info() != Eigen::Success) throw DomainError("lda: eigen decomposition failed");

  LdaProjection p;
  p.center = s.mean;
  p.classes = s.classes;
  p.ridge = ridge;
  const auto& values = eig.eigenvalues();
  double total = 0.0;
  for (Eigen::Index i = values.size() - 1; i >= 0; --i) {
    p.eigenvalues.push_back(values[i]);
    total += std::max(0.0, values[i]);
  }
  p.directions.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::Index src = values.size() - 1 - static_cast<Eigen::Index>(k);
    Eigen::VectorXd v =
        l.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors().col(src));
    // unit within-class scatter along each component (ridge excluded)
    const double w = v.dot(s.within * v);
    if (w > 0.0) v /= std::sqrt(w);
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > 1e-12 * scale) {
        if (v[i] < 0) v = -v;
        break;
      }
    }
    p.directions.col(static_cast<Eigen::Index>(k)) = v;
    p.separability.push_back(total > 0.0 ? std::max(0.0, values[src]) / total : 0.0);
  }
  return p;
}

std::vector<Point> project(const LdaProjection& projection, std::span<const Point> points) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& x : points) {
    if (x.size() != projection.dimension()) throw DomainError("project: dimension mismatch");
    const Eigen::VectorXd c = as_vector(x) - projection.center;
    const Eigen::VectorXd y = projection.directions.transpose() * c;
    out.emplace_back(y.data(), y.data() + y.size());
  }
  return out;
}

}  // namespace dramorigin
