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

#include <sstream>

#include "catch_amalgamated.hpp"
#include "fairfict/io.hpp"

using namespace fairfict;

TEST_CASE("numbers are printed with nine significant digits") {
  CHECK(fmt9(1.0 / 3.0) == "0.333333333");
  CHECK(fmt9(0.0625) == "0.0625");
  CHECK(fmt9(std::nan("")) == "nan");
  CHECK(std::stod(fmt17(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("trace files round-trip at report precision") {
  std::vector<TraceRecord> trace(2);
  trace[0] = {0, 0.25, 0.0625, 0, false, 0.25, 0.1};
  trace[1] = {1, 1.0 / 3.0, 0.0, 1, true, 0.5, 0.2};
  std::stringstream ss;
  write_trace_csv(ss, trace, {"marginal", 0.01, 10.0, 2});
  const TraceFile tf = read_trace_csv(ss);
  CHECK(tf.meta.algo == "marginal");
  CHECK(tf.meta.input_gamma == 0.01);
  CHECK(tf.meta.C == 10.0);
  CHECK(tf.meta.iterations == 2);
  REQUIRE(tf.records.size() == 2);
  CHECK(tf.records[1].eps_mix == Catch::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(tf.records[1].auditor_zero);
  CHECK(tf.records[0].rich_gamma == 0.1);
}

TEST_CASE("subgroup traces have the six-column schema") {
  std::stringstream ss;
  write_trace_csv(ss, {TraceRecord{}}, {"subgroup", 0.0, 10.0, 1});
  std::string meta, header;
  std::getline(ss, meta);
  std::getline(ss, header);
  CHECK(header == "t,eps_mix,gamma_mix,group_id,auditor_zero,eps_last");
}

TEST_CASE("model files round-trip exactly") {
  SyntheticSpec s;
  s.n = 40;
  const Dataset d = make_synthetic(s);
  MixtureClassifier mix;
  mix.add({Eigen::Vector4d(0.1, -1.0 / 3.0, 2e-17, 7.25), -0.3, Boundary::Open});
  mix.add(LinearThreshold::constant(4, true));
  GroupRegistry reg;
  reg.add({Eigen::Vector2d(1.0 / 7.0, -2.0), 0.5, Boundary::Closed}, d);
  std::stringstream ss;
  write_model(ss, mix, &reg);
  const ModelFile m = read_model(ss);
  REQUIRE(m.mixture.size() == 2);
  CHECK(m.mixture[0] == mix[0]);
  CHECK(m.mixture[1] == mix[1]);
  REQUIRE(m.groups.size() == 1);
  CHECK(m.groups[0] == reg.group(0));
  CHECK(expected_predictions(m.mixture, d) == expected_predictions(mix, d));
}

TEST_CASE("malformed models are rejected") {
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_model(empty), DataError);
  std::istringstream bad("hypothesis sideways 1 2\n");
  CHECK_THROWS_AS(read_model(bad), DataError);
  std::istringstream unknown("weights 1 2\n");
  CHECK_THROWS_AS(read_model(unknown), DataError);
}

TEST_CASE("surface and fairness reports have fixed headers") {
  const Dataset d = make_gerrymander_fixture();
  const SurfaceGrid grid = audit_grid(MixtureClassifier({gerrymander_classifier()}), d, {0, 1});
  std::stringstream ss;
  write_surface_csv(ss, grid);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "theta1,theta2,signed_disparity,gamma_unfairness");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 400);

  std::stringstream fr;
  write_fairness_header(fr);
  write_fairness_row(fr, "3", FairnessReport{0.125, 0.5, 1.0, 0.5, 0.5, 0.0625});
  CHECK(fr.str() == "group_id,alpha,fp_base,fp_group,beta,gamma_unfairness\n"
                    "3,0.125,0.5,1,0.5,0.0625\n");
}
