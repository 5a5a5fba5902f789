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

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fairfict {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One 0/1 entry per data row.
using GroupMask = std::vector<std::uint8_t>;

// Whether a decision value of exactly zero belongs to the positive side.
enum class Boundary : std::uint8_t { Open, Closed };

// Affine threshold rule over a feature row: predicts 1 iff w.x + b > 0
// (Open) or w.x + b >= 0 (Closed). Used both as a Learner hypothesis over
// all features and as an Auditor subgroup indicator over protected ones.
struct LinearThreshold {
  Vector weights;
  double intercept = 0.0;
  Boundary boundary = Boundary::Open;

  LinearThreshold() = default;
  LinearThreshold(Vector w, double b, Boundary bd = Boundary::Open)
      : weights(std::move(w)), intercept(b), boundary(bd) {}

  Eigen::Index dim() const { return weights.size(); }

  template <typename Row>
  double decision_value(const Row& x) const {
    return x.dot(weights) + intercept;
  }

  bool accepts(double value) const {
    return boundary == Boundary::Closed ? value >= 0.0 : value > 0.0;
  }

  template <typename Row>
  bool classify(const Row& x) const {
    return accepts(decision_value(x));
  }

  // Labels every row of `features` (n x dim()).
  GroupMask classify_rows(const Matrix& features) const {
    if (features.cols() != weights.size()) {
      throw std::invalid_argument("LinearThreshold: feature width mismatch");
    }
    // Row-wise dot products so that classify() and classify_rows() agree
    // bit for bit.
    GroupMask out(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      out[static_cast<std::size_t>(i)] = classify(features.row(i)) ? 1 : 0;
    }
    return out;
  }

  static LinearThreshold constant(Eigen::Index dim, bool positive) {
    return {Vector::Zero(dim), positive ? 1.0 : -1.0, Boundary::Open};
  }

  // Exact (bitwise) equality; used for group deduplication.
  friend bool operator==(const LinearThreshold& a, const LinearThreshold& b) {
    return a.boundary == b.boundary && a.intercept == b.intercept &&
           a.weights.size() == b.weights.size() &&
           (a.weights.array() == b.weights.array()).all();
  }
};

}  // namespace fairfict
