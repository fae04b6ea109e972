// Copyright 2026 The concave-match Authors
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

#include "solver/oracle.hpp"

#include <algorithm>
#include <numeric>

#include "core/error.hpp"

namespace cmatch {
namespace {

struct Tiny {
  std::size_t m;
  std::size_t l;
  std::vector<double> b;  // l x m scaled bids
  const UtilitySpec* spec;

  std::vector<double> u_of(const std::vector<double>& x) const {
    std::vector<double> u(m, 0.0);
    for (std::size_t j = 0; j < l; ++j)
      for (std::size_t i = 0; i < m; ++i) u[i] += b[j * m + i] * x[j * m + i];
    return u;
  }
  double value(const std::vector<double>& x) const {
    const auto u = u_of(x);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      s += spec->value(i, std::max(0.0, u[i]));
    return s;
  }
};

// Pattern search over transfers of mass t within one column, between two
// bidders or between a bidder and the unallocated slack.
std::vector<double> polish(const Tiny& p, std::vector<double> x,
                           double grid_step) {
  const std::size_t m = p.m;
  double best = p.value(x);
  for (double h = grid_step; h >= 1e-12; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t j = 0; j < p.l; ++j) {
        // Index m stands for the slack of column j.
        for (std::size_t from = 0; from <= m; ++from) {
          for (std::size_t to = 0; to <= m; ++to) {
            if (from == to) continue;
            double avail;
            if (from == m) {
              double used = 0.0;
              for (std::size_t i = 0; i < m; ++i) used += x[j * m + i];
              avail = std::max(0.0, 1.0 - used);
            } else {
              avail = x[j * m + from];
            }
            const double t = std::min(h, avail);
            if (!(t > 0.0)) continue;
            std::vector<double> y = x;
            if (from < m) y[j * m + from] -= t;
            if (to < m) y[j * m + to] += t;
            const double v = p.value(y);
            if (v > best) {
              best = v;
              x = std::move(y);
              improved = true;
            }
          }
        }
      }
    }
  }
  return x;
}

}  // namespace

OracleResult brute_force_oracle_solve(const Instance& instance,
                                      std::span<const std::size_t> prefix,
                                      std::size_t horizon,
                                      const UtilitySpec& spec,
                                      double grid_step) {
  const std::size_t m = instance.bidders();
  const std::size_t l = prefix.size();
  require(m <= kOracleMaxBidders && l <= kOracleMaxColumns,
          ErrorKind::kArgument,
          "brute-force oracle is limited to m <= 3 bidders and n <= 5 columns");
  require(l >= 1 && l <= horizon, ErrorKind::kArgument,
          "prefix length must lie in [1, horizon]");
  require(grid_step > 0.0 && grid_step <= 0.5, ErrorKind::kArgument,
          "grid_step must lie in (0, 0.5]");
  require(spec.size() == m, ErrorKind::kArgument,
          "utility spec size does not match number of bidders");

  Tiny p{m, l, std::vector<double>(l * m), &spec};
  const double scale = static_cast<double>(horizon) / static_cast<double>(l);
  for (std::size_t j = 0; j < l; ++j) {
    require(prefix[j] < instance.arrivals(), ErrorKind::kArgument,
            "prefix column out of range");
    for (std::size_t i = 0; i < m; ++i)
      p.b[j * m + i] = scale * instance.bid(i, prefix[j]);
  }

  // Enumerate (m + 1)^l integer assignments; digit m means unallocated.
  std::size_t combos = 1;
  for (std::size_t j = 0; j < l; ++j) combos *= (m + 1);
  std::vector<double> best_x(l * m, 0.0);
  double best = -1.0;
  std::vector<double> x(l * m);
  for (std::size_t code = 0; code < combos; ++code) {
    std::fill(x.begin(), x.end(), 0.0);
    std::size_t c = code;
    for (std::size_t j = 0; j < l; ++j) {
      const std::size_t d = c % (m + 1);
      c /= (m + 1);
      if (d < m) x[j * m + d] = 1.0;
    }
    const double v = p.value(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }

  std::vector<double> uniform(l * m, 1.0 / static_cast<double>(m));
  std::vector<std::vector<double>> starts = {best_x, uniform};
  OracleResult out;
  out.objective = -1.0;
  for (auto& s : starts) {
    auto polished = polish(p, s, grid_step);
    const double v = p.value(polished);
    if (v > out.objective) {
      out.objective = v;
      out.x = std::move(polished);
    }
  }
  out.u = p.u_of(out.x);
  return out;
}

double brute_force_oracle(const Instance& instance, const UtilitySpec& spec,
                          double grid_step) {
  std::vector<std::size_t> cols(instance.arrivals());
  std::iota(cols.begin(), cols.end(), 0);
  return brute_force_oracle_solve(instance, cols, instance.arrivals(), spec,
                                  grid_step)
      .objective;
}

}  // namespace cmatch
