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

#include "harness/conditions.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

#include "core/error.hpp"

namespace cmatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_term(std::size_t m, std::size_t n, double epsilon) {
  const double md = static_cast<double>(m);
  return std::log(md * md * static_cast<double>(n) / epsilon);
}

}  // namespace

double ola_threshold(std::size_t m, std::size_t n, double epsilon) {
  return 12.0 * static_cast<double>(m) * log_term(m, n, epsilon) /
         (epsilon * epsilon * epsilon);
}

double dla_threshold(std::size_t m, std::size_t n, double epsilon) {
  return 16.0 * static_cast<double>(m) * log_term(m, n, epsilon) /
         (epsilon * epsilon);
}

std::optional<double> power_growth_constant(double p, double eta) {
  require(p > 0.0 && p <= 1.0, ErrorKind::kArgument,
          "power exponent must lie in (0, 1]");
  require(eta > 0.0 && eta <= 1.0, ErrorKind::kArgument,
          "eta must lie in (0, 1]");
  if (p == 1.0) return std::nullopt;
  return 2.0 / std::pow(eta, (2.0 - p) / (1.0 - p));
}

bool growth_condition_holds(const UtilitySpec& spec, double eta, double f,
                            double c) {
  double worst_lhs = 0.0;
  double best_rhs = kInf;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    worst_lhs = std::max(worst_lhs, spec.grad(i, eta * f * c));
    best_rhs = std::min(best_rhs, eta * spec.grad(i, c));
  }
  return worst_lhs < best_rhs;
}

std::optional<double> growth_constant_by_bisection(const UtilitySpec& spec,
                                                   double eta, double c) {
  require(eta > 0.0 && eta <= 1.0, ErrorKind::kArgument,
          "eta must lie in (0, 1]");
  require(c > 0.0, ErrorKind::kArgument, "C must be positive");
  for (const auto& fn : spec.functions()) {
    if (is_linear(fn)) return std::nullopt;
  }
  double lo = 0.0;
  double hi = 1.0;
  while (!growth_condition_holds(spec, eta, hi, c)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi * eta * c)) return std::nullopt;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (growth_condition_holds(spec, eta, mid, c)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ConditionReport condition_report(const Instance& instance, double epsilon,
                                 const UtilitySpec& spec,
                                 const RunResult* run) {
  require(epsilon > 0.0 && epsilon < 0.5, ErrorKind::kConfiguration,
          "epsilon must lie in (0, 0.5)");
  require(spec.size() == instance.bidders(), ErrorKind::kArgument,
          "utility spec size does not match number of bidders");
  const double top = instance.max_bid();
  require(top > 0.0, ErrorKind::kDegenerateInstance,
          "degenerate instance: eta is undefined when every bid is zero");

  ConditionReport rep;
  rep.m = instance.bidders();
  rep.n = instance.arrivals();
  rep.epsilon = epsilon;
  const double nd = static_cast<double>(rep.n);
  const double md = static_cast<double>(rep.m);

  double min_row = kInf;
  for (std::size_t i = 0; i < rep.m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < rep.n; ++j) row += instance.bid(i, j);
    min_row = std::min(min_row, row);
  }
  rep.b_bar = min_row / nd;
  rep.eta = instance.min_positive_bid() / top;
  rep.c_ola = ola_threshold(rep.m, rep.n, epsilon);
  rep.c_dla = dla_threshold(rep.m, rep.n, epsilon);

  const auto common = spec.common();
  const Power* power = common ? std::get_if<Power>(&*common) : nullptr;
  if (power) {
    rep.growth_constant = power_growth_constant(power->p, rep.eta);
    rep.growth_constant_method =
        rep.growth_constant ? "closed_form" : "undefined";
  } else {
    rep.growth_constant = growth_constant_by_bisection(spec, rep.eta, rep.c_ola);
    rep.growth_constant_method =
        rep.growth_constant ? "bisection" : "undefined";
  }

  const double f = rep.growth_constant.value_or(kInf);
  const double lm = std::log(md / epsilon);
  const double b = rep.b_bar;
  auto bound = [&](double lead, double c) {
    if (!(b > 0.0)) return kInf;
    return std::max(lead * lm / (epsilon * b * b),
                    4.0 * md * c * f / (epsilon * b));
  };
  rep.n_bound_ola = bound(12.0, rep.c_ola);
  rep.n_bound_dla = bound(24.0, rep.c_dla);
  rep.ola_satisfied = nd >= rep.n_bound_ola;
  rep.dla_satisfied = nd >= rep.n_bound_dla;

  if (run) {
    const double c = run->policy == PolicyId::kOla ? rep.c_ola : rep.c_dla;
    for (const auto& snap : run->resolves) {
      ResolveCheck chk;
      chk.prefix_len = snap.prefix_len;
      chk.min_u_hat = kInf;
      for (double v : snap.u_hat) chk.min_u_hat = std::min(chk.min_u_hat, v);
      chk.meets_threshold = chk.min_u_hat >= c;
      rep.resolves.push_back(chk);
    }
  }
  return rep;
}

std::string condition_report_json(const ConditionReport& r) {
  using nlohmann::ordered_json;
  auto num = [](double v) -> ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  ordered_json j;
  j["m"] = r.m;
  j["n"] = r.n;
  j["epsilon"] = r.epsilon;
  j["b_bar"] = r.b_bar;
  j["eta"] = r.eta;
  j["F"] = r.growth_constant ? ordered_json(*r.growth_constant) : ordered_json(nullptr);
  j["F_method"] = r.growth_constant_method;
  if (!r.growth_constant) j["F_note"] = "F undefined for linear utilities";
  j["C_ola"] = r.c_ola;
  j["C_dla"] = r.c_dla;
  j["n_bound_ola"] = num(r.n_bound_ola);
  j["n_bound_dla"] = num(r.n_bound_dla);
  j["ola_satisfied"] = r.ola_satisfied;
  j["dla_satisfied"] = r.dla_satisfied;
  j["note"] = "sufficient conditions, not necessary";
  ordered_json res = ordered_json::array();
  for (const auto& c : r.resolves) {
    res.push_back({{"l", c.prefix_len},
                   {"min_u_hat", num(c.min_u_hat)},
                   {"meets_threshold", c.meets_threshold}});
  }
  j["resolves"] = res;
  return j.dump(2);
}

}  // namespace cmatch
