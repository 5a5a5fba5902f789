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

#include <filesystem>
#include <random>

#include "catch_amalgamated.hpp"
#include "fairfict/frontier.hpp"
#include "oracles.hpp"

using namespace fairfict;

namespace {

std::vector<ParetoPoint> points(std::initializer_list<std::pair<double, double>> xs) {
  std::vector<ParetoPoint> out;
  std::size_t t = 0;
  for (auto [e, g] : xs) out.push_back({e, g, 0.0, t++, "subgroup"});
  return out;
}

void require_same_runs(const std::vector<RunResult>& a, const std::vector<RunResult>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    REQUIRE(a[k].trace.size() == b[k].trace.size());
    for (std::size_t i = 0; i < a[k].trace.size(); ++i) {
      const auto& x = a[k].trace[i];
      const auto& y = b[k].trace[i];
      CHECK(x.t == y.t);
      CHECK(x.eps_mix == y.eps_mix);
      CHECK(x.gamma_mix == y.gamma_mix);
      CHECK(x.group_id == y.group_id);
      CHECK(x.auditor_zero == y.auditor_zero);
      CHECK(x.eps_last == y.eps_last);
      CHECK((x.rich_gamma == y.rich_gamma || (std::isnan(x.rich_gamma) && std::isnan(y.rich_gamma))));
    }
    REQUIRE(a[k].mixture.size() == b[k].mixture.size());
    for (std::size_t i = 0; i < a[k].mixture.size(); ++i) CHECK(a[k].mixture[i] == b[k].mixture[i]);
  }
}

}  // namespace

TEST_CASE("mutually non-dominating points all survive") {
  const auto f = pareto_frontier(points({{1, 2}, {2, 1}, {1.5, 1.5}}));
  REQUIRE(f.size() == 3);
  CHECK(f[0].eps == 1.0);
  CHECK(f[1].eps == 1.5);
  CHECK(f[2].eps == 2.0);
}

TEST_CASE("dominated points are removed") {
  const auto f = pareto_frontier(points({{1, 1}, {2, 2}}));
  REQUIRE(f.size() == 1);
  CHECK(f[0].eps == 1.0);
  CHECK(dominates(points({{1, 1}})[0], points({{1, 2}})[0]));
  CHECK(!dominates(points({{1, 1}})[0], points({{1, 1}})[0]));
}

TEST_CASE("duplicates collapse onto the earliest point") {
  const auto f = pareto_frontier(points({{1, 1}, {0.5, 3}, {1, 1}}));
  REQUIRE(f.size() == 2);
  CHECK(f[1].t == 0);
}

TEST_CASE("frontier input is validated") {
  CHECK_THROWS(pareto_frontier({}));
  CHECK_THROWS(pareto_frontier(points({{std::nan(""), 1}})));
}

TEST_CASE("frontier matches the pairwise oracle on random sets") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<ParetoPoint> pts;
    std::vector<oracle::Point> ref;
    for (std::size_t i = 0; i < 200; ++i) {
      const double e = k % 2 ? u(rng) : std::floor(u(rng) * 10) / 10;
      const double g = k % 2 ? u(rng) : std::floor(u(rng) * 10) / 10;
      pts.push_back({e, g, 0.0, i, "subgroup"});
      ref.push_back({e, g});
    }
    const auto f = pareto_frontier(pts);
    const auto keep = oracle::pareto_indices(ref);
    REQUIRE(f.size() == keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) CHECK(f[j].t == keep[j]);
    // Coverage: every input is dominated by or equal to some output.
    for (const auto& p : pts) {
      CHECK(std::any_of(f.begin(), f.end(), [&](const ParetoPoint& q) {
        return dominates(q, p) || (q.eps == p.eps && q.gamma == p.gamma);
      }));
    }
  }
}

TEST_CASE("trace points use the rich-subgroup violation for the marginal baseline") {
  TraceRecord r;
  r.t = 3;
  r.eps_mix = 0.2;
  r.gamma_mix = 0.0;
  r.rich_gamma = 0.04;
  CHECK(trace_points({r}, 0.01, "subgroup")[0].gamma == 0.0);
  const ParetoPoint m = trace_points({r}, 0.01, "marginal")[0];
  CHECK(m.gamma == 0.04);
  CHECK(m.input_gamma == 0.01);
  CHECK(m.t == 3);
}

TEST_CASE("sweep specs must be sorted and valid") {
  const Dataset d = make_gerrymander_fixture();
  SweepSpec s;
  CHECK_THROWS(sweep(d, s));
  s.gammas = {0.02, 0.01};
  CHECK_THROWS(sweep(d, s));
  s.gammas = {0.0, 2.0};
  CHECK_THROWS(sweep(d, s));
}

TEST_CASE("shared-prefix sweeps equal independent runs") {
  SyntheticSpec syn;
  syn.n = 120;
  syn.seed = 3;
  const Dataset d = make_synthetic(syn);
  for (Algorithm algo : {Algorithm::Subgroup, Algorithm::Marginal}) {
    SweepSpec s;
    s.gammas = {0.0, 0.005, 0.01, 0.02, 0.03, 0.5};
    s.base.iterations = 120;
    s.algo = algo;
    s.share_prefix = true;
    const SweepResult shared = sweep(d, s);
    s.share_prefix = false;
    s.workers = 3;
    const SweepResult indep = sweep(d, s);
    require_same_runs(shared.runs, indep.runs);
    for (std::size_t i = 0; i < s.gammas.size(); ++i) {
      FictPlayConfig c = s.base;
      c.gamma = s.gammas[i];
      const RunResult solo = algo == Algorithm::Subgroup ? run(d, c) : run_marginal(d, c);
      require_same_runs({shared.runs[i]}, {solo});
    }
  }
}

TEST_CASE("a single generous gamma yields the unconstrained point") {
  SyntheticSpec syn;
  syn.n = 60;
  const Dataset d = make_synthetic(syn);
  SweepSpec s;
  s.gammas = {1.0};
  s.base.iterations = 15;
  const SweepResult r = sweep(d, s);
  REQUIRE(r.frontier.size() == 1);
  CHECK(r.frontier[0].eps == r.runs[0].trace[0].eps_mix);
  CHECK(r.frontier[0].gamma == r.runs[0].trace[0].gamma_mix);
}

TEST_CASE("a fixture sweep spans from the unfair start to near zero") {
  const Dataset d = make_gerrymander_fixture();
  SweepSpec s;
  s.gammas = {0.0, 0.02, 0.05};
  s.base.iterations = 200;
  s.base.initial = gerrymander_classifier();
  s.algo = Algorithm::Subgroup;
  const SweepResult r = sweep(d, s);
  for (std::size_t i = 1; i < r.frontier.size(); ++i) {
    CHECK(r.frontier[i].eps > r.frontier[i - 1].eps);
    CHECK(r.frontier[i].gamma < r.frontier[i - 1].gamma);
  }
  double lowest = 1.0;
  for (const auto& p : r.frontier) lowest = std::min(lowest, p.gamma);
  CHECK(lowest < 0.01);
}

TEST_CASE("write_sweep emits traces, trajectories, models and the frontier") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fairfict_test_write_sweep";
  fs::remove_all(dir);
  SyntheticSpec syn;
  syn.n = 50;
  const Dataset d = make_synthetic(syn);
  SweepSpec s;
  s.gammas = {0.0, 0.01};
  s.base.iterations = 10;
  const SweepResult r = sweep(d, s);
  write_sweep(r, dir.string(), s.base);
  for (const char* f : {"trace_subgroup_g0.csv", "trace_subgroup_g0.01.csv",
                        "trajectory_subgroup_g0.csv", "model_subgroup_g0.01.txt", "frontier.csv"}) {
    CHECK(fs::exists(dir / f));
  }
  std::ifstream in(dir / "trace_subgroup_g0.01.csv");
  const TraceFile tf = read_trace_csv(in);
  CHECK(tf.meta.input_gamma == 0.01);
  CHECK(tf.records.size() == 10);
  fs::remove_all(dir);
}
