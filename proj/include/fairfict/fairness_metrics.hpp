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
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairfict/dataset.hpp"
#include "fairfict/linear_threshold.hpp"
#include "fairfict/regression_oracle.hpp"

namespace fairfict {

// Uniform mixture over an ordered list of hypotheses. Evaluated through
// exact expected predictions, never by sampling.
class MixtureClassifier {
 public:
  MixtureClassifier() = default;
  explicit MixtureClassifier(std::vector<LinearThreshold> hypotheses)
      : hypotheses_(std::move(hypotheses)) {}

  void add(LinearThreshold h) { hypotheses_.push_back(std::move(h)); }
  std::size_t size() const { return hypotheses_.size(); }
  bool empty() const { return hypotheses_.empty(); }
  const std::vector<LinearThreshold>& hypotheses() const { return hypotheses_; }
  const LinearThreshold& operator[](std::size_t i) const { return hypotheses_[i]; }

  // Mixture of the first k hypotheses.
  MixtureClassifier prefix(std::size_t k) const {
    k = std::min(k, hypotheses_.size());
    return MixtureClassifier(
        std::vector<LinearThreshold>(hypotheses_.begin(), hypotheses_.begin() + static_cast<std::ptrdiff_t>(k)));
  }

 private:
  std::vector<LinearThreshold> hypotheses_;
};

// Expected prediction from integer vote counts; shared by every mixture
// evaluation path so incremental and batch results agree bitwise.
inline std::vector<double> predictions_from_counts(std::span<const std::uint32_t> counts,
                                                   std::size_t mixture_size) {
  std::vector<double> p(counts.size());
  const auto k = static_cast<double>(mixture_size);
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / k;
  return p;
}

inline std::vector<double> expected_predictions(const MixtureClassifier& mixture,
                                                const Matrix& features) {
  if (mixture.empty()) throw std::invalid_argument("expected_predictions: empty mixture");
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(features.rows()), 0);
  for (const auto& h : mixture.hypotheses()) {
    const GroupMask labels = h.classify_rows(features);
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += labels[i];
  }
  return predictions_from_counts(counts, mixture.size());
}

inline std::vector<double> expected_predictions(const MixtureClassifier& mixture,
                                                const Dataset& data) {
  return expected_predictions(mixture, data.features());
}

inline std::vector<double> predictions_of(const LinearThreshold& h, const Dataset& data) {
  const GroupMask labels = h.classify_rows(data.features());
  return {labels.begin(), labels.end()};
}

inline double error_rate(std::span<const double> p, std::span<const int> y) {
  if (p.size() != y.size()) throw std::invalid_argument("error_rate: length mismatch");
  if (p.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += y[i] == 1 ? 1.0 - p[i] : p[i];
  return total / static_cast<double>(p.size());
}

// Mean prediction over y = 0 rows (restricted to mask = 1 when a mask is
// given). A mask selecting no negatives falls back to the unmasked rate.
inline double fp_rate(std::span<const double> p, std::span<const int> y,
                      std::span<const std::uint8_t> mask = {}) {
  if (p.size() != y.size() || (!mask.empty() && mask.size() != p.size())) {
    throw std::invalid_argument("fp_rate: length mismatch");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i] != 0 || (!mask.empty() && !mask[i])) continue;
    sum += p[i];
    ++count;
  }
  if (count == 0) return mask.empty() ? 0.0 : fp_rate(p, y);
  return sum / static_cast<double>(count);
}

struct FairnessReport {
  double alpha = 0.0;             // Pr[g(x) = 1, y = 0]
  double fp_base = 0.0;           // FP(D)
  double fp_group = 0.0;          // FP(D, g)
  double beta = 0.0;              // |FP(D) - FP(D, g)|
  double signed_disparity = 0.0;  // FP(D, g) - FP(D)
  double gamma = 0.0;             // alpha * beta

  // +1 when the group's FP rate is at or above the base rate.
  int direction() const { return signed_disparity >= 0.0 ? 1 : -1; }
};

inline FairnessReport gamma_unfairness(std::span<const double> p, std::span<const int> y,
                                       std::span<const std::uint8_t> group) {
  if (p.size() != y.size() || group.size() != p.size()) {
    throw std::invalid_argument("gamma_unfairness: length mismatch");
  }
  FairnessReport r;
  r.fp_base = fp_rate(p, y);
  std::size_t in_group = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i] == 0 && group[i]) {
      ++in_group;
      sum += p[i];
    }
  }
  r.alpha = static_cast<double>(in_group) / static_cast<double>(p.size());
  r.fp_group = in_group == 0 ? r.fp_base : sum / static_cast<double>(in_group);
  r.signed_disparity = r.fp_group - r.fp_base;
  r.beta = std::abs(r.signed_disparity);
  r.gamma = r.alpha * r.beta;
  return r;
}

inline FairnessReport gamma_unfairness(const MixtureClassifier& mixture,
                                       const LinearThreshold& group, const Dataset& data) {
  const auto p = expected_predictions(mixture, data);
  const GroupMask mask = group.classify_rows(data.protected_features());
  return gamma_unfairness(p, data.labels(), mask);
}

struct PhiPair {
  double plus = 0.0;   // alpha (FP(D) - FP(D, g)) - gamma
  double minus = 0.0;  // alpha (FP(D, g) - FP(D)) - gamma
};

inline PhiPair phi_constraints(const FairnessReport& r, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("phi_constraints: gamma must be >= 0");
  const double gap = r.alpha * (r.fp_base - r.fp_group);
  return {gap - gamma, -gap - gamma};
}

inline PhiPair phi_constraints(std::span<const double> p, std::span<const int> y,
                               std::span<const std::uint8_t> group, double gamma) {
  return phi_constraints(gamma_unfairness(p, y, group), gamma);
}

// Subgroups discovered during a run, addressed by dense ids. Deduplicates
// by exact equality of the threshold.
class GroupRegistry {
 public:
  std::size_t add(const LinearThreshold& g, const Dataset& data) {
    std::vector<double> key(g.weights.data(), g.weights.data() + g.weights.size());
    key.push_back(g.intercept);
    key.push_back(g.boundary == Boundary::Closed ? 1.0 : 0.0);
    auto [it, inserted] = index_.try_emplace(std::move(key), groups_.size());
    if (!inserted) return it->second;
    GroupMask mask = g.classify_rows(data.protected_features());
    std::size_t neg_in = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) neg_in += (mask[i] && data.labels()[i] == 0);
    groups_.push_back(g);
    masks_.push_back(std::move(mask));
    negative_share_.push_back(static_cast<double>(neg_in) /
                              static_cast<double>(data.negatives()));
    return groups_.size() - 1;
  }

  std::size_t size() const { return groups_.size(); }
  bool contains(std::size_t id) const { return id < groups_.size(); }
  const LinearThreshold& group(std::size_t id) const { return groups_.at(id); }
  const GroupMask& mask(std::size_t id) const { return masks_.at(id); }
  // Pr[g(x) = 1 | y = 0] on the data the group was registered against.
  double negative_share(std::size_t id) const { return negative_share_.at(id); }

 private:
  std::vector<LinearThreshold> groups_;
  std::vector<GroupMask> masks_;
  std::vector<double> negative_share_;
  std::map<std::vector<double>, std::size_t> index_;
};

struct DualEntry {
  double plus = 0.0;
  double minus = 0.0;
};

// Sparse Lagrange multipliers keyed by GroupRegistry id.
struct DualVector {
  double bound = 10.0;
  std::map<std::size_t, DualEntry> entries;

  bool is_zero() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& kv) {
      return kv.second.plus == 0.0 && kv.second.minus == 0.0;
    });
  }

  double inf_norm() const {
    double m = 0.0;
    for (const auto& [id, e] : entries) m = std::max({m, std::abs(e.plus), std::abs(e.minus)});
    return m;
  }

  void add(const DualVector& other) {
    for (const auto& [id, e] : other.entries) {
      auto& mine = entries[id];
      mine.plus += e.plus;
      mine.minus += e.minus;
    }
  }

  DualVector scaled(double factor) const {
    DualVector out{bound, {}};
    for (const auto& [id, e] : entries) out.entries[id] = {e.plus * factor, e.minus * factor};
    return out;
  }
};

// The Learner's CSC instance for dual vector `lambda`: positives cost -1/n
// to label 1, negatives cost 1/n plus the dual-weighted shift
// (1/n) sum_g (l+ - l-) (Pr[g | y=0] - g(x_i)). Labelling 0 is free.
inline CscInstance learner_costs(const DualVector& lambda, const GroupRegistry& groups,
                                 const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const auto& [id, e] : lambda.entries) {
    if (!groups.contains(id)) {
      throw std::invalid_argument("learner_costs: unknown subgroup id " + std::to_string(id));
    }
  }
  Vector c1(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i);
    if (data.labels()[row] == 1) {
      c1[i] = -inv_n;
      continue;
    }
    double shift = 0.0;
    for (const auto& [id, e] : lambda.entries) {
      const double in_group = groups.mask(id)[row] ? 1.0 : 0.0;
      shift += (e.plus - e.minus) * (groups.negative_share(id) - in_group);
    }
    c1[i] = inv_n + inv_n * shift;
  }
  return CscInstance(data.features(), Vector::Zero(n), std::move(c1));
}

// U(h, lambda) = err(h) + sum_g (l+_g Phi+(h, g) + l-_g Phi-(h, g)).
inline double payoff(const LinearThreshold& h, const DualVector& lambda,
                     const GroupRegistry& groups, double gamma, const Dataset& data) {
  const auto p = predictions_of(h, data);
  double u = error_rate(p, data.labels());
  for (const auto& [id, e] : lambda.entries) {
    const PhiPair phi = phi_constraints(p, data.labels(), groups.mask(id), gamma);
    u += e.plus * phi.plus + e.minus * phi.minus;
  }
  return u;
}

}  // namespace fairfict
