// Copyright 2026 The FairFict Authors.
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

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairfict/dataset.hpp"
#include "fairfict/fairness_metrics.hpp"
#include "fairfict/marginal_family.hpp"
#include "fairfict/regression_oracle.hpp"

namespace fairfict {

// A witnessing subgroup for the audited classifier.
struct AuditResult {
  LinearThreshold group;  // over protected attributes
  std::optional<std::string> marginal_name;
  FairnessReport report;

  double value() const { return report.gamma; }
  // +1: group FP rate above the base rate, -1: below.
  int direction() const { return report.direction(); }
};

// Rich-subgroup auditor built on the regression CSC heuristic. Since
//   alpha (FP(D, g) - FP(D)) = (1/n) sum_{y_i = 0} g(x_i) (p_i - FP(D)),
// the most-violated group in each direction is a CSC problem over the
// protected attributes with c1_i = -/+ (p_i - FP(D)) / n on negatives and
// zero cost elsewhere. Both directions are solved and the larger true
// violation wins.
class HeuristicAuditor {
 public:
  explicit HeuristicAuditor(const Dataset& data) : oracle_(data.protected_features()) {}

  AuditResult operator()(std::span<const double> p, const Dataset& data) const {
    const auto& y = data.labels();
    if (data.negatives() == 0) throw std::invalid_argument("audit: no negative rows");
    const double base = fp_rate(p, y);
    const auto n = static_cast<Eigen::Index>(data.size());
    const double inv_n = 1.0 / static_cast<double>(n);
    Vector above(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(i);
      above[i] = y[r] == 0 ? -(p[r] - base) * inv_n : 0.0;
    }
    const Vector zero = Vector::Zero(n);
    const Vector below = -above;
    const std::array<const Vector*, 2> sides{&above, &below};

    std::optional<AuditResult> best;
    for (const Vector* c1 : sides) {
      LinearThreshold g = oracle_.solve(zero, *c1);
      const GroupMask mask = g.classify_rows(data.protected_features());
      FairnessReport rep = gamma_unfairness(p, y, mask);
      if (!best || rep.gamma > best->report.gamma) {
        best = AuditResult{std::move(g), std::nullopt, rep};
      }
    }
    return *best;
  }

 private:
  RegressionOracle oracle_;
};

inline AuditResult audit_heuristic(std::span<const double> p, const Dataset& data) {
  return HeuristicAuditor(data)(p, data);
}

inline AuditResult audit_heuristic(const MixtureClassifier& mixture, const Dataset& data) {
  const auto p = expected_predictions(mixture, data);
  return audit_heuristic(p, data);
}

// Exact maximisation over the single-attribute family.
class MarginalAuditor {
 public:
  explicit MarginalAuditor(const Dataset& data) : family_(build_marginal_family(data)) {}
  explicit MarginalAuditor(MarginalGroupFamily family) : family_(std::move(family)) {}

  const MarginalGroupFamily& family() const { return family_; }

  AuditResult operator()(std::span<const double> p, const Dataset& data) const {
    std::optional<AuditResult> best;
    for (const auto& g : family_.groups) {
      FairnessReport rep = gamma_unfairness(p, data.labels(), g.mask);
      if (!best || rep.gamma > best->report.gamma) {
        best = AuditResult{g.threshold, g.name, rep};
      }
    }
    return *best;
  }

 private:
  MarginalGroupFamily family_;
};

inline AuditResult audit_marginal(std::span<const double> p, const Dataset& data) {
  return MarginalAuditor(data)(p, data);
}

inline AuditResult audit_marginal(const MixtureClassifier& mixture, const Dataset& data) {
  const auto p = expected_predictions(mixture, data);
  return audit_marginal(p, data);
}

// Exact maximisation over all linear thresholds (with intercept) on the
// protected attributes, via csc_brute_force on the distinct protected
// points of the negative rows. Limited to <= 16 such points and d_p <= 3.
inline AuditResult audit_exhaustive(std::span<const double> p, const Dataset& data) {
  const Matrix& x = data.protected_features();
  const auto& y = data.labels();
  const double base = fp_rate(p, y);
  const double inv_n = 1.0 / static_cast<double>(data.size());

  std::map<std::vector<double>, double> excess;  // point -> sum (p_i - FP) / n
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto r = static_cast<std::size_t>(i);
    if (y[r] != 0) continue;
    std::vector<double> key(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) key[static_cast<std::size_t>(j)] = x(i, j);
    excess[key] += (p[r] - base) * inv_n;
  }
  const auto k = static_cast<Eigen::Index>(excess.size());
  if (k > BruteForceLimits::kMaxRows || x.cols() > BruteForceLimits::kMaxDim) {
    throw std::invalid_argument(
        "audit_exhaustive: needs <= 16 distinct negative protected points and d_p <= 3");
  }
  Matrix points(k, x.cols());
  Vector gain(k);
  Eigen::Index r = 0;
  for (const auto& [pt, e] : excess) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) points(r, j) = pt[static_cast<std::size_t>(j)];
    gain[r] = e;
    ++r;
  }

  std::optional<AuditResult> best;
  for (double sign : {-1.0, 1.0}) {
    LinearThreshold g = csc_brute_force(CscInstance(points, Vector::Zero(k), sign * gain));
    FairnessReport rep = gamma_unfairness(p, y, g.classify_rows(x));
    if (!best || rep.gamma > best->report.gamma) best = AuditResult{std::move(g), std::nullopt, rep};
  }
  return *best;
}

inline AuditResult audit_exhaustive(const MixtureClassifier& mixture, const Dataset& data) {
  const auto p = expected_predictions(mixture, data);
  return audit_exhaustive(p, data);
}

// Discrimination surface over g_theta(x) = 1{theta1 x_a + theta2 x_b >= 0}.
struct SurfaceGrid {
  static constexpr int kSteps = 20;

  std::array<double, kSteps> axis{};
  Matrix signed_disparity;  // alpha (FP(D, g) - FP(D)); (i, j) <-> (axis[i], axis[j])
  Matrix gamma;             // alpha |FP(D, g) - FP(D)|
  double threshold = 0.02;

  double max_gamma() const { return gamma.maxCoeff(); }

  std::pair<double, double> argmax() const {
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    gamma.maxCoeff(&i, &j);
    return {axis[static_cast<std::size_t>(i)], axis[static_cast<std::size_t>(j)]};
  }

  double fraction_above(double t) const {
    return static_cast<double>((gamma.array() > t).count()) /
           static_cast<double>(gamma.size());
  }
  double fraction_above() const { return fraction_above(threshold); }
};

// theta runs over {-1.0, -0.9, ..., 0.9} on both axes: 400 subgroups.
inline double grid_theta(int k) { return static_cast<double>(k - 10) / 10.0; }

inline SurfaceGrid audit_grid(std::span<const double> p, const Dataset& data,
                              std::pair<Eigen::Index, Eigen::Index> attrs,
                              double threshold = 0.02) {
  const Matrix& x = data.protected_features();
  for (Eigen::Index c : {attrs.first, attrs.second}) {
    if (c < 0 || c >= x.cols()) throw std::invalid_argument("audit_grid: no such protected column");
    if (x.col(c).cwiseAbs().maxCoeff() > 1.0) {
      throw DataError("audit_grid: column '" +
                      data.protected_names()[static_cast<std::size_t>(c)] +
                      "' is not scaled to [-1, 1]");
    }
  }
  SurfaceGrid grid;
  grid.threshold = threshold;
  for (int k = 0; k < SurfaceGrid::kSteps; ++k) grid.axis[static_cast<std::size_t>(k)] = grid_theta(k);
  grid.signed_disparity.resize(SurfaceGrid::kSteps, SurfaceGrid::kSteps);
  grid.gamma.resize(SurfaceGrid::kSteps, SurfaceGrid::kSteps);

  GroupMask mask(data.size());
  for (int i = 0; i < SurfaceGrid::kSteps; ++i) {
    for (int j = 0; j < SurfaceGrid::kSteps; ++j) {
      const double t1 = grid.axis[static_cast<std::size_t>(i)];
      const double t2 = grid.axis[static_cast<std::size_t>(j)];
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        mask[static_cast<std::size_t>(r)] =
            t1 * x(r, attrs.first) + t2 * x(r, attrs.second) >= 0.0 ? 1 : 0;
      }
      const FairnessReport rep = gamma_unfairness(p, data.labels(), mask);
      grid.signed_disparity(i, j) = rep.alpha * rep.signed_disparity;
      grid.gamma(i, j) = rep.gamma;
    }
  }
  return grid;
}

inline SurfaceGrid audit_grid(const MixtureClassifier& mixture, const Dataset& data,
                              std::pair<Eigen::Index, Eigen::Index> attrs,
                              double threshold = 0.02) {
  const auto p = expected_predictions(mixture, data);
  return audit_grid(p, data, attrs, threshold);
}

}  // namespace fairfict
