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

#include <memory>
#include <span>

#include "fairfict/auditor.hpp"
#include "fairfict/fictplay.hpp"
#include "fairfict/marginal_family.hpp"

namespace fairfict {

// Marginal-fairness comparator: the same fictitious-play engine with the
// Auditor restricted to exact search over single-attribute groups. Each
// trace record also carries the rich-subgroup violation of the same
// mixture as found by the heuristic auditor.
inline FairFictPlay<MarginalAuditor> make_marginal_engine(const Dataset& data,
                                                          const FictPlayConfig& config) {
  auto rich = std::make_shared<HeuristicAuditor>(data);
  return FairFictPlay<MarginalAuditor>(
      data, config, MarginalAuditor(data),
      [rich, &data](std::span<const double> p) { return (*rich)(p, data).value(); });
}

inline RunResult run_marginal(const Dataset& data, const FictPlayConfig& config) {
  return make_marginal_engine(data, config).run();
}

}  // namespace fairfict
