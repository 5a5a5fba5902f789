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

#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairfict/dataset.hpp"
#include "fairfict/linear_threshold.hpp"

namespace fairfict {

enum class MarginalSide : std::uint8_t { Equals, AtLeastMean, BelowMean };

// One single-attribute group g_{i,a}.
struct MarginalGroup {
  Eigen::Index column = 0;
  MarginalSide side = MarginalSide::Equals;
  // The matched value for Equals, the column mean otherwise.
  double value = 0.0;
  std::string name;
  LinearThreshold threshold;
  GroupMask mask;
};

struct MarginalGroupFamily {
  std::vector<MarginalGroup> groups;
  // Post-scaling mean of each protected column.
  std::vector<double> means;

  std::size_t size() const { return groups.size(); }
};

namespace detail {
inline std::string format_value(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}
}  // namespace detail

// Two-valued columns give {x = hi, x = lo}; any other column gives
// {x >= mean, x < mean}.
inline MarginalGroupFamily build_marginal_family(const Dataset& data) {
  const Matrix& x = data.protected_features();
  if (x.cols() < 1) throw std::invalid_argument("marginal family needs a protected column");
  MarginalGroupFamily fam;
  const Eigen::Index d = x.cols();
  for (Eigen::Index j = 0; j < d; ++j) {
    const std::string& col = data.protected_names()[static_cast<std::size_t>(j)];
    std::set<double> distinct(x.col(j).data(), x.col(j).data() + x.rows());
    const double mean = x.col(j).mean();
    fam.means.push_back(mean);
    auto add = [&](MarginalSide side, double value, std::string name, LinearThreshold t) {
      GroupMask mask = t.classify_rows(x);
      fam.groups.push_back({j, side, value, std::move(name), std::move(t), std::move(mask)});
    };
    if (distinct.size() == 2) {
      const double lo = *distinct.begin();
      const double hi = *distinct.rbegin();
      add(MarginalSide::Equals, hi, col + "=" + detail::format_value(hi),
          LinearThreshold(Vector::Unit(d, j), -hi, Boundary::Closed));
      add(MarginalSide::Equals, lo, col + "=" + detail::format_value(lo),
          LinearThreshold(-Vector::Unit(d, j), lo, Boundary::Closed));
    } else {
      add(MarginalSide::AtLeastMean, mean, col + ">=mean",
          LinearThreshold(Vector::Unit(d, j), -mean, Boundary::Closed));
      add(MarginalSide::BelowMean, mean, col + "<mean",
          LinearThreshold(-Vector::Unit(d, j), mean, Boundary::Open));
    }
  }
  return fam;
}

}  // namespace fairfict
