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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fairfict/linear_threshold.hpp"

namespace fairfict {

// Cost-sensitive classification instance: c0[i] / c1[i] is the cost of
// labelling row i with 0 / 1.
struct CscInstance {
  Matrix features;
  Vector c0;
  Vector c1;

  CscInstance() = default;
  CscInstance(Matrix x, Vector cost0, Vector cost1)
      : features(std::move(x)), c0(std::move(cost0)), c1(std::move(cost1)) {
    validate();
  }

  Eigen::Index size() const { return features.rows(); }

  void validate() const {
    if (c0.size() != features.rows() || c1.size() != features.rows()) {
      throw std::invalid_argument("CscInstance: cost vectors must have one entry per row");
    }
    if (!c0.allFinite() || !c1.allFinite()) {
      throw std::invalid_argument("CscInstance: costs must be finite");
    }
  }
};

// Sum over rows of h(X_i) c1_i + (1 - h(X_i)) c0_i.
inline double csc_cost(const GroupMask& labels, const Vector& c0, const Vector& c1) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    total += labels[i] ? c1[k] : c0[k];
  }
  return total;
}

inline double csc_cost(const LinearThreshold& h, const CscInstance& inst) {
  return csc_cost(h.classify_rows(inst.features), inst.c0, inst.c1);
}

struct LeastSquaresFit {
  Vector weights;
  double intercept = 0.0;
};

// Affine least squares against a fixed design. The centred Gram matrix is
// factored once, so repeated fits against new targets (one per fictitious
// play round) cost O(n d + d^2). The intercept is unpenalised; the weights
// carry a ridge jitter that keeps degenerate designs solvable.
class LeastSquaresSolver {
 public:
  static constexpr double kRidgeJitter = 1e-8;

  explicit LeastSquaresSolver(const Matrix& features)
      : mean_(features.rows() > 0 ? Vector(features.colwise().mean().transpose())
                                  : Vector::Zero(features.cols())),
        centered_(features.rowwise() - mean_.transpose()) {
    if (features.rows() < 1) throw std::invalid_argument("least squares needs n >= 1");
    Matrix gram = centered_.transpose() * centered_;
    gram.diagonal().array() += kRidgeJitter;
    factor_.compute(gram);
  }

  Eigen::Index rows() const { return centered_.rows(); }
  Eigen::Index dim() const { return centered_.cols(); }

  LeastSquaresFit fit(const Vector& targets) const {
    if (targets.size() != centered_.rows()) {
      throw std::invalid_argument("least squares: target length mismatch");
    }
    const double target_mean = targets.mean();
    const Vector centered_targets = targets.array() - target_mean;
    LeastSquaresFit out;
    if (dim() == 0) {
      out.weights = Vector::Zero(0);
    } else {
      out.weights = factor_.solve(centered_.transpose() * centered_targets);
    }
    out.intercept = target_mean - mean_.dot(out.weights);
    return out;
  }

 private:
  Vector mean_;
  Matrix centered_;
  Eigen::LDLT<Matrix> factor_;
};

inline LeastSquaresFit fit_least_squares(const Matrix& features, const Vector& targets) {
  return LeastSquaresSolver(features).fit(targets);
}

// The two-regression CSC heuristic: regress c0 and c1 on the features and
// label 1 wherever the predicted c1 is strictly below the predicted c0.
class RegressionOracle {
 public:
  explicit RegressionOracle(const Matrix& features) : solver_(features) {}

  LinearThreshold solve(const Vector& c0, const Vector& c1) const {
    const LeastSquaresFit r0 = solver_.fit(c0);
    const LeastSquaresFit r1 = solver_.fit(c1);
    // r0(x) - r1(x) > 0  <=>  r1(x) < r0(x); a tie labels 0.
    return {r0.weights - r1.weights, r0.intercept - r1.intercept, Boundary::Open};
  }

  Eigen::Index dim() const { return solver_.dim(); }

 private:
  LeastSquaresSolver solver_;
};

inline LinearThreshold csc_solve(const CscInstance& inst) {
  inst.validate();
  return RegressionOracle(inst.features).solve(inst.c0, inst.c1);
}

namespace detail {

// Calls fn(subset) for every size-k subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace detail

struct BruteForceLimits {
  static constexpr Eigen::Index kMaxRows = 16;
  static constexpr Eigen::Index kMaxDim = 3;
};

// Exact CSC over linear thresholds for tiny instances. Candidates: all-0,
// all-1, then for every hyperplane through an affinely independent subset
// of min(d, n) points, both orientations and every assignment of the
// on-plane points (realised by a small minimum-norm tilt of the plane).
// Ties go to fewer positive labels, then to the earlier candidate.
inline LinearThreshold csc_brute_force(const CscInstance& inst) {
  inst.validate();
  const Eigen::Index n = inst.size();
  const Eigen::Index d = inst.features.cols();
  if (n < 1 || n > BruteForceLimits::kMaxRows || d > BruteForceLimits::kMaxDim) {
    throw std::invalid_argument("csc_brute_force: requires 1 <= n <= 16 and d <= 3");
  }

  double scale = inst.c0.cwiseAbs().sum() + inst.c1.cwiseAbs().sum();
  const double tol = 1e-12 * scale;

  LinearThreshold best = LinearThreshold::constant(d, false);
  GroupMask best_labels = best.classify_rows(inst.features);
  double best_cost = csc_cost(best_labels, inst.c0, inst.c1);
  std::size_t best_pos = 0;

  auto consider = [&](const LinearThreshold& h) {
    GroupMask labels = h.classify_rows(inst.features);
    const double cost = csc_cost(labels, inst.c0, inst.c1);
    std::size_t pos = 0;
    for (auto v : labels) pos += v;
    if (cost < best_cost - tol || (cost <= best_cost + tol && pos < best_pos)) {
      best = h;
      best_cost = cost;
      best_pos = pos;
    }
  };
  consider(LinearThreshold::constant(d, true));
  if (d == 0) return best;

  // Homogeneous coordinates (x, 1).
  Matrix aug(n, d + 1);
  aug << inst.features, Vector::Ones(n);
  const int m = static_cast<int>(std::min(d, n));

  detail::for_each_subset(static_cast<int>(n), m, [&](const std::vector<int>& subset) {
    Matrix a(m, d + 1);
    for (int r = 0; r < m; ++r) a.row(r) = aug.row(subset[static_cast<std::size_t>(r)]);
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() < m) return;
    const Vector plane = lu.kernel().col(0);
    const Vector values = aug * plane;
    double off_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool on = std::find(subset.begin(), subset.end(), static_cast<int>(i)) != subset.end();
      if (!on && values[i] != 0.0) off_min = std::min(off_min, std::abs(values[i]));
    }
    const Matrix gram = a * a.transpose();
    const Eigen::PartialPivLU<Matrix> glu(gram);
    for (double orientation : {1.0, -1.0}) {
      for (std::uint32_t pattern = 0; pattern < (1u << m); ++pattern) {
        Vector side(m);
        for (int r = 0; r < m; ++r) side[r] = (pattern >> r) & 1u ? 1.0 : -1.0;
        const Vector tilt = a.transpose() * glu.solve(side);
        const double tilt_max = std::max(1.0, (aug * tilt).cwiseAbs().maxCoeff());
        const double eps =
            std::isfinite(off_min) ? 0.5 * off_min / tilt_max : 1.0;
        const Vector combined = orientation * plane + eps * tilt;
        consider(LinearThreshold(combined.head(d), combined[d], Boundary::Open));
      }
    }
  });
  return best;
}

}  // namespace fairfict
