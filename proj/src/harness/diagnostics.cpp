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

#include "harness/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include "core/allocation.hpp"

namespace cmatch {

ConcentrationDiagnostics concentration_diagnostics(
    const Instance& instance, const ArrivalOrder& order, double epsilon,
    const UtilitySpec& spec, const SolverConfig& solver_cfg) {
  PolicyConfig cfg;
  cfg.epsilon = epsilon;
  ConcentrationDiagnostics diag;
  diag.run = run_dla(instance, order, spec, cfg, solver_cfg);

  const std::size_t m = instance.bidders();
  const std::size_t n = instance.arrivals();
  const double nd = static_cast<double>(n);
  std::size_t seg_bad = 0, full_bad = 0;
  for (const auto& seg : diag.run.segments) {
    if (seg.resolve < 0) continue;
    const auto k = static_cast<std::size_t>(seg.resolve);
    const ResolveSnapshot& snap = diag.run.resolves[k];
    const std::vector<double> prices = marginal_prices(snap.u_hat, spec);
    std::vector<double> full(m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const auto col = instance.column(j);
      const int w = allocate_by_prices(prices, col);
      if (w != kUnallocated) full[w] += col[w];
    }
    const double seg_len = static_cast<double>(seg.end - seg.begin);
    const double envelope =
        epsilon * std::sqrt(nd / static_cast<double>(snap.prefix_len));
    for (std::size_t i = 0; i < m; ++i) {
      ConcentrationRow row;
      row.bidder = i;
      row.resolve = k;
      row.prefix_len = snap.prefix_len;
      row.u_hat = snap.u_hat[i];
      row.segment_value = seg.u[i];
      row.projected_segment_value = seg.u[i] * nd / seg_len;
      row.full_horizon_value = full[i];
      row.envelope = envelope;
      const double lo = (1.0 - envelope) * row.u_hat;
      const double hi = (1.0 + envelope) * row.u_hat;
      row.segment_inside =
          row.projected_segment_value >= lo && row.projected_segment_value <= hi;
      row.full_horizon_inside =
          row.full_horizon_value >= lo && row.full_horizon_value <= hi;
      seg_bad += row.segment_inside ? 0 : 1;
      full_bad += row.full_horizon_inside ? 0 : 1;
      diag.rows.push_back(row);
    }
  }
  if (!diag.rows.empty()) {
    const double total = static_cast<double>(diag.rows.size());
    diag.segment_violation_fraction = static_cast<double>(seg_bad) / total;
    diag.full_horizon_violation_fraction = static_cast<double>(full_bad) / total;
  }
  return diag;
}

std::string diagnostics_csv(const ConcentrationDiagnostics& diag) {
  std::string out =
      "bidder,resolve,l,u_hat,segment_value,projected_segment_value,"
      "full_horizon_value,envelope,segment_inside,full_horizon_inside\n";
  char buf[256];
  for (const auto& r : diag.rows) {
    const int len = std::snprintf(
        buf, sizeof buf, "%zu,%zu,%zu,%.6g,%.6g,%.6g,%.6g,%.6g,%d,%d\n",
        r.bidder, r.resolve, r.prefix_len, r.u_hat, r.segment_value,
        r.projected_segment_value, r.full_horizon_value, r.envelope,
        r.segment_inside ? 1 : 0, r.full_horizon_inside ? 1 : 0);
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

}  // namespace cmatch
