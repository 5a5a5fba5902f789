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

// Plain-text artifacts: trace, frontier, surface and audit CSVs, and the
// model file.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairfict/auditor.hpp"
#include "fairfict/dataset.hpp"
#include "fairfict/fairness_metrics.hpp"
#include "fairfict/fictplay.hpp"

namespace fairfict {

// Report numbers: 9 significant digits.
inline std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Round-trip exact; used where values are read back (model weights).
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- trace -----------------------------------------------------------------

struct TraceMeta {
  std::string algo = "subgroup";
  double input_gamma = 0.0;
  double C = 10.0;
  std::size_t iterations = 0;
};

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace,
                            const TraceMeta& meta) {
  const bool rich = meta.algo == "marginal";
  out << "# algo=" << meta.algo << " input_gamma=" << fmt9(meta.input_gamma)
      << " C=" << fmt9(meta.C) << " iterations=" << meta.iterations << '\n';
  out << "t,eps_mix,gamma_mix,group_id,auditor_zero,eps_last" << (rich ? ",rich_gamma" : "")
      << '\n';
  for (const auto& r : trace) {
    out << r.t << ',' << fmt9(r.eps_mix) << ',' << fmt9(r.gamma_mix) << ',' << r.group_id
        << ',' << (r.auditor_zero ? 1 : 0) << ',' << fmt9(r.eps_last);
    if (rich) out << ',' << fmt9(r.rich_gamma);
    out << '\n';
  }
}

struct TraceFile {
  TraceMeta meta;
  std::vector<TraceRecord> records;
};

inline TraceFile read_trace_csv(std::istream& in) {
  TraceFile file;
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string kv;
      while (ss >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "algo") file.meta.algo = val;
        if (key == "input_gamma") file.meta.input_gamma = std::stod(val);
        if (key == "C") file.meta.C = std::stod(val);
        if (key == "iterations") file.meta.iterations = std::stoul(val);
      }
      continue;
    }
    auto cells = detail::split_csv_line(line);
    if (header.empty()) {
      header = cells;
      if (header.size() < 6 || header[0] != "t") throw DataError("not a trace file");
      continue;
    }
    if (cells.size() != header.size()) throw DataError("trace row has wrong arity");
    TraceRecord r;
    r.t = std::stoul(cells[0]);
    r.eps_mix = std::stod(cells[1]);
    r.gamma_mix = std::stod(cells[2]);
    r.group_id = std::stoul(cells[3]);
    r.auditor_zero = cells[4] == "1";
    r.eps_last = std::stod(cells[5]);
    if (cells.size() > 6) r.rich_gamma = std::stod(cells[6]);
    file.records.push_back(r);
  }
  if (header.empty()) throw DataError("trace file has no header");
  return file;
}

// ---- model -----------------------------------------------------------------

struct ModelFile {
  MixtureClassifier mixture;
  std::vector<LinearThreshold> groups;
};

inline void write_threshold(std::ostream& out, const LinearThreshold& h) {
  out << (h.boundary == Boundary::Closed ? "closed" : "open") << ' ' << fmt17(h.intercept);
  for (Eigen::Index j = 0; j < h.weights.size(); ++j) out << ' ' << fmt17(h.weights[j]);
}

inline void write_model(std::ostream& out, const MixtureClassifier& mixture,
                        const GroupRegistry* groups = nullptr) {
  out << "# fairfict model: uniform mixture of linear thresholds\n";
  out << "# hypothesis <open|closed> <intercept> <weights...>\n";
  for (const auto& h : mixture.hypotheses()) {
    out << "hypothesis ";
    write_threshold(out, h);
    out << '\n';
  }
  if (groups) {
    for (std::size_t id = 0; id < groups->size(); ++id) {
      out << "group " << id << ' ';
      write_threshold(out, groups->group(id));
      out << '\n';
    }
  }
}

inline LinearThreshold parse_threshold(std::istringstream& ss) {
  std::string bd;
  double b = 0.0;
  if (!(ss >> bd >> b) || (bd != "open" && bd != "closed")) {
    throw DataError("malformed threshold record");
  }
  std::vector<double> w;
  double v = 0.0;
  while (ss >> v) w.push_back(v);
  return {Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size())), b,
          bd == "closed" ? Boundary::Closed : Boundary::Open};
}

inline ModelFile read_model(std::istream& in) {
  ModelFile model;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string kind;
    ss >> kind;
    if (kind == "hypothesis") {
      model.mixture.add(parse_threshold(ss));
    } else if (kind == "group") {
      std::size_t id = 0;
      ss >> id;
      if (id != model.groups.size()) throw DataError("model groups out of order");
      model.groups.push_back(parse_threshold(ss));
    } else {
      throw DataError("unknown model record '" + kind + "'");
    }
  }
  if (model.mixture.empty()) throw DataError("model has no hypotheses");
  return model;
}

inline ModelFile read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_model(in);
}

// ---- reports ---------------------------------------------------------------

inline void write_fairness_header(std::ostream& out) {
  out << "group_id,alpha,fp_base,fp_group,beta,gamma_unfairness\n";
}

inline void write_fairness_row(std::ostream& out, const std::string& group_id,
                               const FairnessReport& r) {
  out << group_id << ',' << fmt9(r.alpha) << ',' << fmt9(r.fp_base) << ','
      << fmt9(r.fp_group) << ',' << fmt9(r.beta) << ',' << fmt9(r.gamma) << '\n';
}

inline void write_audit_header(std::ostream& out) {
  out << "mode,gamma_unfairness,direction,alpha,fp_base,fp_group,beta,group_name,"
         "group_boundary,group_intercept,group_weights\n";
}

inline void write_audit_row(std::ostream& out, const std::string& mode, const AuditResult& a) {
  const auto& r = a.report;
  out << mode << ',' << fmt9(r.gamma) << ',' << a.direction() << ',' << fmt9(r.alpha) << ','
      << fmt9(r.fp_base) << ',' << fmt9(r.fp_group) << ',' << fmt9(r.beta) << ','
      << a.marginal_name.value_or("") << ','
      << (a.group.boundary == Boundary::Closed ? "closed" : "open") << ','
      << fmt9(a.group.intercept) << ',';
  for (Eigen::Index j = 0; j < a.group.weights.size(); ++j) {
    out << (j ? " " : "") << fmt9(a.group.weights[j]);
  }
  out << '\n';
}

inline void write_surface_csv(std::ostream& out, const SurfaceGrid& grid) {
  out << "theta1,theta2,signed_disparity,gamma_unfairness\n";
  for (int i = 0; i < SurfaceGrid::kSteps; ++i) {
    for (int j = 0; j < SurfaceGrid::kSteps; ++j) {
      out << fmt9(grid.axis[static_cast<std::size_t>(i)]) << ','
          << fmt9(grid.axis[static_cast<std::size_t>(j)]) << ','
          << fmt9(grid.signed_disparity(i, j)) << ',' << fmt9(grid.gamma(i, j)) << '\n';
    }
  }
}

}  // namespace fairfict
