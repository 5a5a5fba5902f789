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

// Command-line front end:
//   fixture   write the gerrymandering toy data, its config and the
//             "blue man or green woman" model
//   train     one fictitious-play run -> trace.csv, model.txt
//   audit     heuristic / marginal / exhaustive / grid audit of a model
//   sweep     gamma sweep -> per-gamma traces, trajectories, models and the
//             pooled Pareto frontier
//   frontier  pool trace files into a Pareto CSV
//   surface   grid audit at traced checkpoints of a model's history
//
// Exit codes: 0 success, 1 runtime failure, 2 bad usage.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairfict/auditor.hpp"
#include "fairfict/dataset.hpp"
#include "fairfict/fictplay.hpp"
#include "fairfict/frontier.hpp"
#include "fairfict/io.hpp"
#include "fairfict/marginal_baseline.hpp"

namespace fairfict {

namespace cli_detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string path;
  std::vector<std::string> protected_columns;
  std::vector<std::string> categorical_columns;
  std::string label;
  std::string positive_label;
  bool balance = false;
  std::uint64_t seed = 0;

  Dataset load(std::ostream& err) const {
    if (path.empty()) throw UsageError("--data is required");
    if (protected_columns.empty()) throw UsageError("--protected is required");
    PreprocessConfig cfg;
    cfg.protected_columns = protected_columns;
    cfg.categorical_columns = categorical_columns;
    if (!label.empty()) cfg.label_column = label;
    if (!positive_label.empty()) cfg.positive_label = positive_label;
    cfg.balance = balance;
    cfg.balance_seed = seed;
    std::vector<std::string> warnings;
    Dataset data = load_csv(path, cfg, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    return data;
  }
};

struct RunOptions {
  std::vector<double> gammas;
  double C = 10.0;
  std::size_t iterations = 1000;
  std::size_t trace_every = 0;
  std::string algo = "subgroup";
  std::string out = ".";
  std::size_t workers = 1;
  bool independent = false;

  FictPlayConfig config(double gamma) const {
    FictPlayConfig c;
    c.gamma = gamma;
    c.C = C;
    c.iterations = iterations;
    c.trace_every = trace_every;
    return c;
  }
};

inline std::pair<Eigen::Index, Eigen::Index> resolve_attrs(const Dataset& data,
                                                           const std::vector<std::string>& names) {
  if (names.empty()) {
    if (data.protected_dim() < 2) throw UsageError("grid audit needs two protected columns");
    return {0, 1};
  }
  if (names.size() != 2) throw UsageError("--attrs takes exactly two protected column names");
  auto find = [&](const std::string& name) {
    const auto& pn = data.protected_names();
    auto it = std::find(pn.begin(), pn.end(), name);
    if (it == pn.end()) throw UsageError("'" + name + "' is not a protected column");
    return static_cast<Eigen::Index>(it - pn.begin());
  };
  return {find(names[0]), find(names[1])};
}

inline void check_model_width(const ModelFile& model, const Dataset& data) {
  if (model.mixture[0].dim() != data.feature_dim()) {
    throw DataError("model expects " + std::to_string(model.mixture[0].dim()) +
                    " features, data has " + std::to_string(data.feature_dim()));
  }
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw DataError("cannot write " + p.string());
  return f;
}

}  // namespace cli_detail

inline int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  using namespace cli_detail;
  namespace fs = std::filesystem;

  CLI::App app{"Rich subgroup fairness: FairFictPlay training, auditing and sweeps", "fairfict"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with data options (protected=, label=, ...)");

  DataOptions data_opts;
  app.add_option("--data", data_opts.path, "Input CSV (header row, comma separated)");
  app.add_option("--protected", data_opts.protected_columns, "Protected column names")
      ->delimiter(',');
  app.add_option("--categorical", data_opts.categorical_columns,
                 "Columns to one-hot encode")
      ->delimiter(',');
  app.add_option("--label", data_opts.label, "Label column (default: last column)");
  app.add_option("--positive-label", data_opts.positive_label,
                 "Label text meaning y=1 (default: labels must be 0/1)");
  app.add_flag("--balance", data_opts.balance, "Downsample the majority label");
  app.add_option("--seed", data_opts.seed, "Seed for --balance");

  RunOptions run_opts;
  auto add_run_options = [&](CLI::App* sub, bool many_gammas) {
    auto* g = sub->add_option("--gamma", run_opts.gammas,
                              many_gammas ? "Input gamma (repeatable)" : "Input gamma");
    if (!many_gammas) g->expected(1);
    sub->add_option("--C", run_opts.C, "Dual bound")->capture_default_str();
    sub->add_option("--iters", run_opts.iterations, "Rounds T")->capture_default_str();
    sub->add_option("--trace-every", run_opts.trace_every,
                    "Trace cadence (default 1, or 10 beyond 10^4 rounds)");
    sub->add_option("--algo", run_opts.algo, "subgroup | marginal")
        ->check(CLI::IsMember({"subgroup", "marginal"}))
        ->capture_default_str();
    sub->add_option("--out", run_opts.out, "Output directory")->capture_default_str();
  };

  auto* train = app.add_subcommand("train", "Run FairFictPlay once");
  add_run_options(train, false);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a gamma sweep and its Pareto frontier");
  add_run_options(sweep_cmd, true);
  sweep_cmd->add_option("--workers", run_opts.workers, "Concurrent runs (with --independent)");
  sweep_cmd->add_flag("--independent", run_opts.independent,
                      "Run every gamma from scratch instead of sharing trajectory prefixes");

  std::string model_path;
  std::string audit_mode = "all";
  std::vector<std::string> attrs;
  std::size_t prefix = 0;
  double surface_threshold = 0.02;
  std::string audit_out;
  auto* audit = app.add_subcommand("audit", "Audit a model for subgroup unfairness");
  audit->add_option("--model", model_path, "Model file")->required();
  audit->add_option("--mode", audit_mode, "heuristic | marginal | exhaustive | grid | all")
      ->check(CLI::IsMember({"heuristic", "marginal", "exhaustive", "grid", "all"}))
      ->capture_default_str();
  audit->add_option("--attrs", attrs, "Two protected columns for the grid")->delimiter(',');
  audit->add_option("--prefix", prefix, "Audit only the first k hypotheses (0 = all)");
  audit->add_option("--threshold", surface_threshold, "Grid cell threshold")
      ->capture_default_str();
  audit->add_option("--out", audit_out, "Also write the grid surface CSV here");

  std::vector<std::string> trace_files;
  std::string frontier_out = "frontier.csv";
  auto* frontier_cmd = app.add_subcommand("frontier", "Pool trace files into a Pareto frontier");
  frontier_cmd->add_option("traces", trace_files, "Trace CSV files")->required();
  frontier_cmd->add_option("--out", frontier_out, "Frontier CSV")->capture_default_str();

  std::vector<std::size_t> checkpoints;
  std::string surface_out = "surfaces";
  auto* surface = app.add_subcommand("surface", "Grid audit at checkpoints of a model history");
  surface->add_option("--model", model_path, "Model file")->required();
  surface->add_option("--attrs", attrs, "Two protected columns")->delimiter(',');
  surface->add_option("--checkpoints", checkpoints,
                      "Values of t: audit the mixture h^0..h^t (default: first and last)")
      ->delimiter(',');
  surface->add_option("--threshold", surface_threshold, "Cell threshold for the summary")
      ->capture_default_str();
  surface->add_option("--out", surface_out, "Output directory")->capture_default_str();

  std::string fixture_out = ".";
  auto* fixture = app.add_subcommand("fixture", "Write the gerrymandering toy example");
  fixture->add_option("--out", fixture_out, "Output directory")->capture_default_str();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (fixture->parsed()) {
      const fs::path dir(fixture_out);
      fs::create_directories(dir);
      const Dataset fx = make_gerrymander_fixture();
      {
        auto f = open_out(dir / "fixture.csv");
        write_dataset_csv(f, fx);
      }
      {
        auto f = open_out(dir / "fixture.ini");
        f << "# data options for fixture.csv\n"
          << "data=" << (dir / "fixture.csv").string() << '\n'
          << "protected=race,gender\n"
          << "label=label\n";
      }
      {
        auto f = open_out(dir / "gerrymander_model.txt");
        write_model(f, MixtureClassifier({gerrymander_classifier()}));
      }
      out << "wrote " << (dir / "fixture.csv").string() << ", fixture.ini, gerrymander_model.txt\n";
      return 0;
    }

    if (frontier_cmd->parsed()) {
      std::vector<ParetoPoint> pooled;
      for (const auto& path : trace_files) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open " + path);
        TraceFile tf = read_trace_csv(in);
        auto pts = trace_points(tf.records, tf.meta.input_gamma, tf.meta.algo);
        pooled.insert(pooled.end(), pts.begin(), pts.end());
      }
      const auto front = pareto_frontier(pooled);
      auto f = open_out(frontier_out);
      write_frontier_csv(f, front);
      out << front.size() << " frontier point(s) from " << pooled.size() << " -> "
          << frontier_out << '\n';
      return 0;
    }

    const Dataset data = data_opts.load(err);

    if (train->parsed()) {
      const double gamma = run_opts.gammas.empty() ? 0.0 : run_opts.gammas.front();
      const FictPlayConfig cfg = run_opts.config(gamma);
      const RunResult res = run_opts.algo == "marginal"
                                ? run_marginal(data, cfg)
                                : run(data, cfg);
      const fs::path dir(run_opts.out);
      {
        auto f = open_out(dir / "trace.csv");
        write_trace_csv(f, res.trace, {run_opts.algo, gamma, cfg.C, cfg.iterations});
      }
      {
        auto f = open_out(dir / "model.txt");
        write_model(f, res.mixture, &res.groups);
      }
      const auto& last = res.trace.back();
      out << "t=" << last.t << " eps=" << fmt9(last.eps_mix) << " gamma=" << fmt9(last.gamma_mix);
      if (run_opts.algo == "marginal") out << " rich_gamma=" << fmt9(last.rich_gamma);
      out << " -> " << (dir / "trace.csv").string() << ", " << (dir / "model.txt").string()
          << '\n';
      return 0;
    }

    if (sweep_cmd->parsed()) {
      SweepSpec spec;
      spec.gammas = run_opts.gammas.empty() ? std::vector<double>{0.0} : run_opts.gammas;
      std::sort(spec.gammas.begin(), spec.gammas.end());
      spec.gammas.erase(std::unique(spec.gammas.begin(), spec.gammas.end()), spec.gammas.end());
      spec.base = run_opts.config(0.0);
      spec.algo = parse_algorithm(run_opts.algo);
      spec.out_dir = run_opts.out;
      spec.workers = run_opts.workers;
      spec.share_prefix = !run_opts.independent;
      const SweepResult res = sweep(data, spec);
      write_sweep(res, spec.out_dir, spec.base);
      for (std::size_t i = 0; i < res.gammas.size(); ++i) {
        const auto& last = res.runs[i].trace.back();
        out << "gamma=" << fmt9(res.gammas[i]) << " eps=" << fmt9(last.eps_mix)
            << " gamma_t=" << fmt9(last.gamma_mix) << '\n';
      }
      out << res.frontier.size() << " frontier point(s) -> "
          << (fs::path(spec.out_dir) / "frontier.csv").string() << '\n';
      return 0;
    }

    const ModelFile model = read_model_file(model_path);
    check_model_width(model, data);

    if (audit->parsed()) {
      const MixtureClassifier mix = prefix > 0 ? model.mixture.prefix(prefix) : model.mixture;
      const auto p = expected_predictions(mix, data);
      write_audit_header(out);
      const bool all = audit_mode == "all";
      if (all || audit_mode == "heuristic") write_audit_row(out, "heuristic", audit_heuristic(p, data));
      if (all || audit_mode == "marginal") write_audit_row(out, "marginal", audit_marginal(p, data));
      if (audit_mode == "exhaustive") write_audit_row(out, "exhaustive", audit_exhaustive(p, data));
      if (audit_mode == "grid" || (all && data.protected_dim() >= 2)) {
        const SurfaceGrid grid = audit_grid(p, data, resolve_attrs(data, attrs), surface_threshold);
        const auto [t1, t2] = grid.argmax();
        err << "grid: max gamma-unfairness " << fmt9(grid.max_gamma()) << " at theta=("
            << fmt9(t1) << ", " << fmt9(t2) << "); " << fmt9(100.0 * grid.fraction_above())
            << "% of cells above " << fmt9(surface_threshold) << '\n';
        if (!audit_out.empty()) {
          auto f = open_out(audit_out);
          write_surface_csv(f, grid);
        }
      }
      return 0;
    }

    if (surface->parsed()) {
      const auto cols = resolve_attrs(data, attrs);
      if (checkpoints.empty()) checkpoints = {0, model.mixture.size() - 1};
      const fs::path dir(surface_out);
      fs::create_directories(dir);
      auto summary = open_out(dir / "surface_summary.csv");
      summary << "t,max_gamma,theta1_at_max,theta2_at_max,fraction_above,threshold\n";
      for (std::size_t t : checkpoints) {
        if (t >= model.mixture.size()) {
          throw DataError("checkpoint t=" + std::to_string(t) + " beyond model history of " +
                          std::to_string(model.mixture.size()));
        }
        const SurfaceGrid grid =
            audit_grid(model.mixture.prefix(t + 1), data, cols, surface_threshold);
        {
          auto f = open_out(dir / ("surface_t" + std::to_string(t) + ".csv"));
          write_surface_csv(f, grid);
        }
        const auto [t1, t2] = grid.argmax();
        summary << t << ',' << fmt9(grid.max_gamma()) << ',' << fmt9(t1) << ',' << fmt9(t2)
                << ',' << fmt9(grid.fraction_above()) << ',' << fmt9(surface_threshold) << '\n';
      }
      out << checkpoints.size() << " surface(s) -> " << dir.string() << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

inline int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args);
}

}  // namespace fairfict
