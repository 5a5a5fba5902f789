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

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fairfict/auditor.hpp"
#include "fairfict/dataset.hpp"
#include "fairfict/fairness_metrics.hpp"
#include "fairfict/regression_oracle.hpp"

namespace fairfict {

struct FictPlayConfig {
  double gamma = 0.0;
  double C = 10.0;
  std::size_t iterations = 1000;
  // Record every k-th round; 0 picks 1 for up to 10^4 rounds, else 10.
  std::size_t trace_every = 0;
  // Replaces the unconstrained minimiser as h^0 when set.
  std::optional<LinearThreshold> initial;

  void validate() const {
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("C must be > 0");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  }

  std::size_t cadence() const {
    if (trace_every > 0) return trace_every;
    return iterations <= 10000 ? 1 : 10;
  }
};

struct TraceRecord {
  // Index of the newest hypothesis in the audited mixture h^0..h^t.
  std::size_t t = 0;
  double eps_mix = 0.0;
  double gamma_mix = 0.0;
  std::size_t group_id = 0;
  bool auditor_zero = false;
  double eps_last = 0.0;
  // Heuristic rich-subgroup violation, filled only by the marginal baseline.
  double rich_gamma = std::numeric_limits<double>::quiet_NaN();
};

// Everything a run accumulates. Copyable, so a sweep can fork a run.
struct FictPlayState {
  MixtureClassifier history;
  std::vector<std::uint32_t> votes;  // sum_h h(X_i)
  GroupMask last_labels;
  DualVector dual_sum;               // sum of lambda^{t'} over played rounds
  // sum_g (S+_g - S-_g)(Pr[g | y=0] - g(x_i)), with S the dual sums.
  std::vector<double> penalty;
  GroupRegistry groups;

  std::size_t rounds() const { return history.size(); }

  std::vector<double> mixture_predictions() const {
    return predictions_from_counts(votes, history.size());
  }

  // lambda-bar = sum_{t' < t} lambda^{t'} / t, counting the implicit zero
  // lambda^0.
  DualVector mean_dual() const { return dual_sum.scaled(1.0 / static_cast<double>(rounds())); }
};

struct AuditorMove {
  DualVector lambda;
  AuditResult audit;
  std::size_t group_id = 0;
  bool zero = true;
};

struct RunResult {
  MixtureClassifier mixture;
  std::vector<TraceRecord> trace;
  GroupRegistry groups;
  DualVector mean_dual;
};

// Fictitious play between a Learner (regression CSC over all features) and
// an Auditor policy: callable as AuditResult(span<const double> p, const
// Dataset&). The default policy is the rich-subgroup HeuristicAuditor; the
// marginal baseline swaps in MarginalAuditor.
template <typename Auditor = HeuristicAuditor>
class FairFictPlay {
 public:
  using Reporter = std::function<double(std::span<const double>)>;

  FairFictPlay(const Dataset& data, FictPlayConfig config, Auditor auditor,
               Reporter reporter = {})
      : data_(data),
        config_(std::move(config)),
        auditor_(std::move(auditor)),
        reporter_(std::move(reporter)),
        learner_(data.features()) {
    config_.validate();
  }

  const FictPlayConfig& config() const { return config_; }
  const Dataset& data() const { return data_; }

  FictPlayState init() const {
    FictPlayState s;
    s.dual_sum.bound = config_.C;
    s.votes.assign(data_.size(), 0);
    s.penalty.assign(data_.size(), 0.0);
    append(s, config_.initial ? *config_.initial : learner_response(s));
    return s;
  }

  // argmin_h <LC(lambda-bar), h> via the regression oracle. Does not modify
  // the state.
  LinearThreshold learner_response(const FictPlayState& s) const {
    const auto n = static_cast<Eigen::Index>(data_.size());
    const double inv_n = 1.0 / static_cast<double>(n);
    const double inv_t = s.rounds() == 0 ? 0.0 : 1.0 / static_cast<double>(s.rounds());
    Vector c1(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(i);
      c1[i] = data_.labels()[r] == 1 ? -inv_n : inv_n + inv_n * (s.penalty[r] * inv_t);
    }
    return learner_.solve(Vector::Zero(n), c1);
  }

  // Adds h to the history and to the cached mixture votes.
  void append(FictPlayState& s, LinearThreshold h) const {
    s.last_labels = h.classify_rows(data_.features());
    for (std::size_t i = 0; i < s.votes.size(); ++i) s.votes[i] += s.last_labels[i];
    s.history.add(std::move(h));
  }

  void learner_step(FictPlayState& s) const { append(s, learner_response(s)); }

  AuditResult audit(const FictPlayState& s) const {
    if (s.history.empty()) throw std::logic_error("audit: empty mixture");
    const auto p = s.mixture_predictions();
    return auditor_(p, data_);
  }

  // Pure-strategy best response: mass C on the violated side of the found
  // group, or the zero vector when the violation is within gamma.
  AuditorMove apply_audit(FictPlayState& s, AuditResult found, double gamma) const {
    AuditorMove move;
    move.lambda.bound = config_.C;
    move.group_id = s.groups.add(found.group, data_);
    move.zero = !(found.value() > gamma);
    if (!move.zero) {
      DualEntry& e = move.lambda.entries[move.group_id];
      const double share = s.groups.negative_share(move.group_id);
      const GroupMask& mask = s.groups.mask(move.group_id);
      // lambda^- penalises a group FP rate above the base, lambda^+ below.
      const double signed_mass = found.direction() > 0 ? -config_.C : config_.C;
      (found.direction() > 0 ? e.minus : e.plus) = config_.C;
      for (std::size_t i = 0; i < s.penalty.size(); ++i) {
        s.penalty[i] += signed_mass * (share - (mask[i] ? 1.0 : 0.0));
      }
      s.dual_sum.add(move.lambda);
    }
    move.audit = std::move(found);
    return move;
  }

  AuditorMove auditor_step(FictPlayState& s) const {
    return apply_audit(s, audit(s), config_.gamma);
  }

  TraceRecord make_record(const FictPlayState& s, const AuditorMove& move) const {
    const auto p = s.mixture_predictions();
    TraceRecord rec;
    rec.t = s.rounds() - 1;
    rec.eps_mix = error_rate(p, data_.labels());
    rec.gamma_mix = move.audit.value();
    rec.group_id = move.group_id;
    rec.auditor_zero = move.zero;
    const std::vector<double> last(s.last_labels.begin(), s.last_labels.end());
    rec.eps_last = error_rate(last, data_.labels());
    if (reporter_) rec.rich_gamma = reporter_(p);
    return rec;
  }

  bool should_record(std::size_t round, std::size_t total) const {
    return (round - 1) % config_.cadence() == 0 || round == total;
  }

  // One round t: both players best respond to the history h^0..h^{t-1} and
  // lambda^0..lambda^{t-1}; h^t is appended afterwards unless `last`.
  TraceRecord round(FictPlayState& s, double gamma, bool last) const {
    std::optional<LinearThreshold> next;
    if (!last) next = learner_response(s);
    AuditorMove move = apply_audit(s, audit(s), gamma);
    TraceRecord rec = make_record(s, move);
    if (next) append(s, std::move(*next));
    return rec;
  }

  RunResult run() const {
    FictPlayState s = init();
    std::vector<TraceRecord> trace;
    const std::size_t total = config_.iterations;
    for (std::size_t r = 1; r <= total; ++r) {
      TraceRecord rec = round(s, config_.gamma, r == total);
      if (should_record(r, total)) trace.push_back(rec);
    }
    return finish(std::move(s), std::move(trace));
  }

  RunResult finish(FictPlayState s, std::vector<TraceRecord> trace) const {
    RunResult out;
    out.mean_dual = s.mean_dual();
    out.mixture = std::move(s.history);
    out.groups = std::move(s.groups);
    out.trace = std::move(trace);
    return out;
  }

 private:

  const Dataset& data_;
  FictPlayConfig config_;
  Auditor auditor_;
  Reporter reporter_;
  RegressionOracle learner_;
};

inline RunResult run(const Dataset& data, const FictPlayConfig& config) {
  return FairFictPlay<HeuristicAuditor>(data, config, HeuristicAuditor(data)).run();
}

}  // namespace fairfict
