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
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fairfict/fictplay.hpp"
#include "fairfict/io.hpp"
#include "fairfict/marginal_baseline.hpp"

namespace fairfict {

enum class Algorithm { Subgroup, Marginal };

inline std::string to_string(Algorithm a) {
  return a == Algorithm::Marginal ? "marginal" : "subgroup";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "subgroup") return Algorithm::Subgroup;
  if (s == "marginal") return Algorithm::Marginal;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

struct ParetoPoint {
  double eps = 0.0;
  double gamma = 0.0;
  double input_gamma = 0.0;
  std::size_t t = 0;
  std::string algo = "subgroup";
};

inline bool dominates(const ParetoPoint& p, const ParetoPoint& q) {
  return p.eps <= q.eps && p.gamma <= q.gamma && (p.eps < q.eps || p.gamma < q.gamma);
}

// Undominated points sorted by eps; exact duplicates collapse onto the
// earliest occurrence.
inline std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points) {
  if (points.empty()) throw std::invalid_argument("pareto_frontier: no points");
  for (const auto& p : points) {
    if (!std::isfinite(p.eps) || !std::isfinite(p.gamma)) {
      throw std::invalid_argument("pareto_frontier: non-finite point");
    }
  }
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].eps != points[b].eps) return points[a].eps < points[b].eps;
    return points[a].gamma < points[b].gamma;
  });
  std::vector<ParetoPoint> out;
  for (std::size_t idx : order) {
    const ParetoPoint& p = points[idx];
    // Sorted by (eps, gamma): p survives iff its gamma beats every kept one.
    if (out.empty() || p.gamma < out.back().gamma) out.push_back(p);
  }
  return out;
}

inline void write_frontier_csv(std::ostream& out, const std::vector<ParetoPoint>& points) {
  out << "eps,gamma,input_gamma,t,algo\n";
  for (const auto& p : points) {
    out << fmt9(p.eps) << ',' << fmt9(p.gamma) << ',' << fmt9(p.input_gamma) << ',' << p.t
        << ',' << p.algo << '\n';
  }
}

// The marginal baseline is scored on rich-subgroup unfairness.
inline std::vector<ParetoPoint> trace_points(const std::vector<TraceRecord>& trace,
                                             double input_gamma, const std::string& algo) {
  std::vector<ParetoPoint> pts;
  pts.reserve(trace.size());
  for (const auto& r : trace) {
    const double g = algo == "marginal" ? r.rich_gamma : r.gamma_mix;
    pts.push_back({r.eps_mix, g, input_gamma, r.t, algo});
  }
  return pts;
}

struct SweepSpec {
  std::vector<double> gammas;
  FictPlayConfig base;  // gamma field ignored
  Algorithm algo = Algorithm::Subgroup;
  std::string out_dir;
  std::size_t workers = 1;
  // Fork runs only once their trajectories diverge.
  bool share_prefix = true;

  void validate() const {
    if (gammas.empty()) throw std::invalid_argument("sweep: no gamma values");
    if (!std::is_sorted(gammas.begin(), gammas.end())) {
      throw std::invalid_argument("sweep: gamma values must be sorted ascending");
    }
    for (double g : gammas) {
      FictPlayConfig c = base;
      c.gamma = g;
      c.validate();
    }
  }
};

struct SweepResult {
  std::vector<double> gammas;
  std::vector<RunResult> runs;  // parallel to gammas
  std::vector<ParetoPoint> frontier;
  Algorithm algo = Algorithm::Subgroup;
};

namespace detail {

// Runs every gamma at once. A single trajectory is advanced while all
// gammas agree on the Auditor's move; when the found violation separates
// them, the state is forked. Each fork performs exactly the operations an
// independent run would.
template <typename Auditor>
std::vector<RunResult> shared_prefix_runs(const FairFictPlay<Auditor>& engine,
                                          const std::vector<double>& gammas) {
  struct Branch {
    FictPlayState state;
    std::vector<std::size_t> members;  // ascending gamma indices
    std::vector<TraceRecord> trace;
  };
  std::vector<Branch> branches;
  {
    Branch root{engine.init(), {}, {}};
    for (std::size_t i = 0; i < gammas.size(); ++i) root.members.push_back(i);
    branches.push_back(std::move(root));
  }
  const std::size_t total = engine.config().iterations;
  for (std::size_t r = 1; r <= total; ++r) {
    const bool last = r == total;
    std::vector<Branch> next;
    for (auto& b : branches) {
      std::optional<LinearThreshold> h;
      if (!last) h = engine.learner_response(b.state);
      const AuditResult found = engine.audit(b.state);
      std::vector<std::size_t> play;
      std::vector<std::size_t> zero;
      for (std::size_t m : b.members) (found.value() > gammas[m] ? play : zero).push_back(m);
      auto advance = [&](Branch nb) {
        const AuditorMove move = engine.apply_audit(nb.state, found, gammas[nb.members.front()]);
        TraceRecord rec = engine.make_record(nb.state, move);
        if (engine.should_record(r, total)) nb.trace.push_back(rec);
        if (h) engine.append(nb.state, *h);
        next.push_back(std::move(nb));
      };
      if (!play.empty() && !zero.empty()) {
        advance(Branch{b.state, std::move(play), b.trace});
        advance(Branch{std::move(b.state), std::move(zero), std::move(b.trace)});
      } else {
        advance(std::move(b));
      }
    }
    branches = std::move(next);
  }
  std::vector<RunResult> out(gammas.size());
  for (auto& b : branches) {
    for (std::size_t m : b.members) out[m] = engine.finish(b.state, b.trace);
  }
  return out;
}

template <typename Auditor, typename MakeEngine>
std::vector<RunResult> independent_runs(const std::vector<double>& gammas,
                                        const FictPlayConfig& base, std::size_t workers,
                                        MakeEngine&& make) {
  std::vector<RunResult> out(gammas.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < gammas.size(); i = next++) {
      FictPlayConfig c = base;
      c.gamma = gammas[i];
      out[i] = make(c).run();
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, gammas.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace detail

inline SweepResult sweep(const Dataset& data, const SweepSpec& spec) {
  spec.validate();
  SweepResult res;
  res.gammas = spec.gammas;
  res.algo = spec.algo;
  FictPlayConfig base = spec.base;
  base.gamma = spec.gammas.front();

  if (spec.algo == Algorithm::Subgroup) {
    auto make = [&](const FictPlayConfig& c) {
      return FairFictPlay<HeuristicAuditor>(data, c, HeuristicAuditor(data));
    };
    res.runs = spec.share_prefix
                   ? detail::shared_prefix_runs(make(base), spec.gammas)
                   : detail::independent_runs<HeuristicAuditor>(spec.gammas, base, spec.workers, make);
  } else {
    auto make = [&](const FictPlayConfig& c) { return make_marginal_engine(data, c); };
    res.runs = spec.share_prefix
                   ? detail::shared_prefix_runs(make(base), spec.gammas)
                   : detail::independent_runs<MarginalAuditor>(spec.gammas, base, spec.workers, make);
  }

  std::vector<ParetoPoint> pooled;
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    auto pts = trace_points(res.runs[i].trace, spec.gammas[i], to_string(spec.algo));
    pooled.insert(pooled.end(), pts.begin(), pts.end());
  }
  res.frontier = pareto_frontier(pooled);
  return res;
}

inline std::string gamma_tag(double g) { return "g" + fmt9(g); }

// Per-gamma trace, trajectory and model files plus the pooled frontier.
inline void write_sweep(const SweepResult& res, const std::string& out_dir,
                        const FictPlayConfig& base) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string algo = to_string(res.algo);
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    const std::string tag = algo + "_" + gamma_tag(res.gammas[i]);
    const auto& run = res.runs[i];
    {
      std::ofstream f(fs::path(out_dir) / ("trace_" + tag + ".csv"));
      write_trace_csv(f, run.trace, {algo, res.gammas[i], base.C, base.iterations});
    }
    {
      std::ofstream f(fs::path(out_dir) / ("trajectory_" + tag + ".csv"));
      f << "t,eps,gamma\n";
      for (const auto& p : trace_points(run.trace, res.gammas[i], algo)) {
        f << p.t << ',' << fmt9(p.eps) << ',' << fmt9(p.gamma) << '\n';
      }
    }
    {
      std::ofstream f(fs::path(out_dir) / ("model_" + tag + ".txt"));
      write_model(f, run.mixture, &run.groups);
    }
  }
  std::ofstream f(fs::path(out_dir) / "frontier.csv");
  write_frontier_csv(f, res.frontier);
}

}  // namespace fairfict
