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

#include "catch_amalgamated.hpp"
#include "fairfict/fictplay.hpp"

using namespace fairfict;

namespace {

Dataset synthetic(std::size_t n, std::uint64_t seed) {
  SyntheticSpec s;
  s.n = n;
  s.seed = seed;
  return make_synthetic(s);
}

bool same_trace(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].t != b[i].t || a[i].eps_mix != b[i].eps_mix || a[i].gamma_mix != b[i].gamma_mix ||
        a[i].group_id != b[i].group_id || a[i].auditor_zero != b[i].auditor_zero ||
        a[i].eps_last != b[i].eps_last) {
      return false;
    }
  }
  return true;
}

struct ExhaustivePolicy {
  AuditResult operator()(std::span<const double> p, const Dataset& data) const {
    return audit_exhaustive(p, data);
  }
};

}  // namespace

TEST_CASE("config validation") {
  FictPlayConfig c;
  CHECK_NOTHROW(c.validate());
  c.iterations = 0;
  CHECK_THROWS(c.validate());
  c = {};
  c.C = 0.0;
  CHECK_THROWS(c.validate());
  c = {};
  c.gamma = -0.1;
  CHECK_THROWS(c.validate());
  c = {};
  CHECK(c.cadence() == 1);
  c.iterations = 20000;
  CHECK(c.cadence() == 10);
  c.trace_every = 3;
  CHECK(c.cadence() == 3);
}

TEST_CASE("init plays the unconstrained minimiser with a zero dual") {
  const Dataset d = synthetic(80, 1);
  FictPlayConfig cfg;
  FairFictPlay<> engine(d, cfg, HeuristicAuditor(d));
  const FictPlayState s = engine.init();
  CHECK(s.rounds() == 1);
  CHECK(s.mean_dual().is_zero());
  CHECK(s.groups.size() == 0);
  const LinearThreshold h0 = csc_solve(learner_costs(DualVector{}, GroupRegistry{}, d));
  CHECK(s.history[0] == h0);
  CHECK(engine.learner_response(s) == h0);
}

TEST_CASE("the first trace record is the unconstrained classifier") {
  const Dataset d = synthetic(80, 2);
  FictPlayConfig cfg;
  cfg.iterations = 5;
  const RunResult r = run(d, cfg);
  REQUIRE(r.trace.size() == 5);
  CHECK(r.trace[0].t == 0);
  const auto p0 = predictions_of(r.mixture[0], d);
  CHECK(r.trace[0].eps_mix == error_rate(p0, d.labels()));
  CHECK(r.trace[0].gamma_mix == audit_heuristic(p0, d).value());
  CHECK(r.mixture.size() == 5);
}

TEST_CASE("the fixture's unconstrained classifier is no worse than constant") {
  const Dataset d = make_gerrymander_fixture();
  FictPlayConfig cfg;
  cfg.iterations = 1;
  CHECK(run(d, cfg).trace[0].eps_mix <= 0.5);
}

TEST_CASE("a huge dual on a group pulls its false-positive rate down") {
  const Dataset d = synthetic(150, 3);
  FictPlayConfig cfg;
  FairFictPlay<> engine(d, cfg, HeuristicAuditor(d));
  FictPlayState s = engine.init();
  const auto p0 = s.mixture_predictions();
  const AuditResult found = audit_heuristic(p0, d);
  REQUIRE(found.direction() == 1);
  FictPlayConfig big = cfg;
  big.C = 1000.0;
  FairFictPlay<> heavy(d, big, HeuristicAuditor(d));
  FictPlayState hs = heavy.init();
  heavy.apply_audit(hs, found, 0.0);
  const LinearThreshold h = heavy.learner_response(hs);
  const auto p = predictions_of(h, d);
  const GroupMask g = found.group.classify_rows(d.protected_features());
  const FairnessReport before = gamma_unfairness(p0, d.labels(), g);
  const FairnessReport after = gamma_unfairness(p, d.labels(), g);
  CHECK(after.signed_disparity < before.signed_disparity);
  // The response is the CSC solution for the dual-shifted costs.
  const CscInstance inst = learner_costs(hs.mean_dual(), hs.groups, d);
  CHECK(h.classify_rows(d.features()) == csc_solve(inst).classify_rows(d.features()));
}

TEST_CASE("learner responses are deterministic") {
  const Dataset d = synthetic(60, 4);
  FictPlayConfig cfg;
  FairFictPlay<> engine(d, cfg, HeuristicAuditor(d));
  FictPlayState s = engine.init();
  engine.auditor_step(s);
  CHECK(engine.learner_response(s) == engine.learner_response(s));
}

TEST_CASE("the incremental learner costs equal learner_costs of the mean dual") {
  const Dataset d = synthetic(100, 5);
  FictPlayConfig cfg;
  cfg.gamma = 0.0;
  FairFictPlay<> engine(d, cfg, HeuristicAuditor(d));
  FictPlayState s = engine.init();
  for (int r = 0; r < 15; ++r) {
    engine.round(s, 0.0, false);
    const LinearThreshold fresh = csc_solve(learner_costs(s.mean_dual(), s.groups, d));
    CHECK(engine.learner_response(s).classify_rows(d.features()) ==
          fresh.classify_rows(d.features()));
  }
}

TEST_CASE("auditor plays zero on a fair mixture") {
  const Dataset d = synthetic(60, 6);
  FictPlayConfig cfg;
  cfg.initial = LinearThreshold::constant(d.feature_dim(), false);
  FairFictPlay<> engine(d, cfg, HeuristicAuditor(d));
  FictPlayState s = engine.init();
  const AuditorMove m = engine.auditor_step(s);
  CHECK(m.zero);
  CHECK(m.lambda.is_zero());
  CHECK(s.dual_sum.is_zero());
}

TEST_CASE("auditor puts mass C on the violated side") {
  const Dataset d = make_gerrymander_fixture();
  FictPlayConfig cfg;
  cfg.initial = gerrymander_classifier();
  FairFictPlay<ExhaustivePolicy> engine(d, cfg, ExhaustivePolicy{});
  FictPlayState s = engine.init();
  const AuditorMove m = engine.auditor_step(s);
  REQUIRE(!m.zero);
  REQUIRE(m.lambda.entries.size() == 1);
  const DualEntry& e = m.lambda.entries.at(m.group_id);
  if (m.audit.direction() > 0) {
    CHECK(e.minus == 10.0);
    CHECK(e.plus == 0.0);
  } else {
    CHECK(e.plus == 10.0);
    CHECK(e.minus == 0.0);
  }
  // A second identical audit doubles the cumulative entry.
  engine.apply_audit(s, m.audit, 0.0);
  const DualEntry& sum = s.dual_sum.entries.at(m.group_id);
  CHECK(std::max(sum.plus, sum.minus) == 20.0);
  CHECK(s.mean_dual().inf_norm() == 20.0 / static_cast<double>(s.rounds()));
}

TEST_CASE("gamma above the unconstrained violation leaves the dynamics alone") {
  const Dataset d = synthetic(80, 7);
  FictPlayConfig cfg;
  cfg.gamma = 1.0;
  cfg.iterations = 20;
  const RunResult r = run(d, cfg);
  for (const auto& rec : r.trace) {
    CHECK(rec.auditor_zero);
    CHECK(rec.eps_mix == r.trace[0].eps_mix);
  }
  for (const auto& h : r.mixture.hypotheses()) CHECK(h == r.mixture[0]);
}

TEST_CASE("run invariants hold at every round") {
  const Dataset d = synthetic(90, 8);
  FictPlayConfig cfg;
  cfg.iterations = 60;
  cfg.C = 3.0;
  FairFictPlay<> engine(d, cfg, HeuristicAuditor(d));
  FictPlayState s = engine.init();
  for (std::size_t r = 1; r <= cfg.iterations; ++r) {
    const TraceRecord rec = engine.round(s, cfg.gamma, r == cfg.iterations);
    const auto p = s.mixture_predictions();
    CHECK(p == expected_predictions(s.history, d));
    CHECK(s.mean_dual().inf_norm() <= cfg.C);
    CHECK(rec.eps_mix >= 0.0);
    CHECK(rec.eps_mix <= 1.0);
    CHECK(rec.gamma_mix >= 0.0);
  }
}

TEST_CASE("traced gamma is realised by the traced group") {
  const Dataset d = synthetic(90, 9);
  FictPlayConfig cfg;
  cfg.iterations = 40;
  const RunResult r = run(d, cfg);
  for (const auto& rec : r.trace) {
    const MixtureClassifier mix = r.mixture.prefix(rec.t + 1);
    CHECK(gamma_unfairness(mix, r.groups.group(rec.group_id), d).gamma == rec.gamma_mix);
  }
}

TEST_CASE("runs are deterministic and respect the cadence") {
  const Dataset d = synthetic(70, 10);
  FictPlayConfig cfg;
  cfg.iterations = 25;
  cfg.trace_every = 4;
  const RunResult a = run(d, cfg);
  const RunResult b = run(d, cfg);
  CHECK(same_trace(a.trace, b.trace));
  std::vector<std::size_t> ts;
  for (const auto& rec : a.trace) ts.push_back(rec.t);
  CHECK(ts == std::vector<std::size_t>{0, 4, 8, 12, 16, 20, 24});
}

TEST_CASE("fictitious play removes the gerrymandered disparity") {
  const Dataset d = make_gerrymander_fixture();
  FictPlayConfig cfg;
  cfg.iterations = 500;
  cfg.initial = gerrymander_classifier();
  const RunResult r = run(d, cfg);
  CHECK(audit_exhaustive(r.mixture, d).value() < 0.01);
}
