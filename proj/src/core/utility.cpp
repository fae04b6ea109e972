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

#include "core/utility.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace cmatch {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_x(double x) {
  if (!(x >= 0.0)) {
    std::ostringstream os;
    os << "utility argument must be non-negative, got " << x;
    fail(ErrorKind::kDomain, os.str());
  }
}

}  // namespace

void validate(const UtilityFn& fn) {
  std::visit(Overloaded{
                 [](const Power& f) {
                   require(f.p > 0.0 && f.p <= 1.0, ErrorKind::kArgument,
                           "power exponent must lie in (0, 1]");
                 },
                 [](const Log&) {},
                 [](const ScaledPower& f) {
                   require(f.a > 0.0 && std::isfinite(f.a),
                           ErrorKind::kArgument,
                           "scaled_power coefficient must be positive");
                   require(f.p > 0.0 && f.p <= 1.0, ErrorKind::kArgument,
                           "power exponent must lie in (0, 1]");
                 },
             },
             fn);
}

double utility_value(const UtilityFn& fn, double x) {
  check_x(x);
  if (x == 0.0) return 0.0;
  return std::visit(Overloaded{
                        [x](const Power& f) { return std::pow(x, f.p); },
                        [x](const Log&) { return std::log1p(x); },
                        [x](const ScaledPower& f) {
                          return f.a * std::pow(x, f.p);
                        },
                    },
                    fn);
}

double utility_derivative(const UtilityFn& fn, double x) {
  check_x(x);
  const double z = x < kGradientFloor ? kGradientFloor : x;
  return std::visit(
      Overloaded{
          [z](const Power& f) {
            return f.p == 1.0 ? 1.0 : f.p * std::pow(z, f.p - 1.0);
          },
          [z](const Log&) { return 1.0 / (1.0 + z); },
          [z](const ScaledPower& f) {
            return f.p == 1.0 ? f.a : f.a * f.p * std::pow(z, f.p - 1.0);
          },
      },
      fn);
}

std::optional<double> utility_inverse_derivative(const UtilityFn& fn,
                                                 double g) {
  if (!(g > 0.0)) return std::nullopt;
  return std::visit(
      Overloaded{
          [g](const Power& f) -> std::optional<double> {
            if (f.p == 1.0) return std::nullopt;
            return std::pow(g / f.p, 1.0 / (f.p - 1.0));
          },
          [g](const Log&) -> std::optional<double> {
            if (g > 1.0) return std::nullopt;
            return 1.0 / g - 1.0;
          },
          [g](const ScaledPower& f) -> std::optional<double> {
            if (f.p == 1.0) return std::nullopt;
            return std::pow(g / (f.a * f.p), 1.0 / (f.p - 1.0));
          },
      },
      fn);
}

bool is_linear(const UtilityFn& fn) {
  return std::visit(Overloaded{
                        [](const Power& f) { return f.p == 1.0; },
                        [](const Log&) { return false; },
                        [](const ScaledPower& f) { return f.p == 1.0; },
                    },
                    fn);
}

std::string describe(const UtilityFn& fn) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&os](const Power& f) { os << "power(" << f.p << ")"; },
                 [&os](const Log&) { os << "log"; },
                 [&os](const ScaledPower& f) {
                   os << "scaled_power(" << f.a << ", " << f.p << ")";
                 },
             },
             fn);
  return os.str();
}

UtilitySpec::UtilitySpec(std::vector<UtilityFn> per_bidder)
    : fns_(std::move(per_bidder)) {
  require(!fns_.empty(), ErrorKind::kArgument,
          "utility spec needs at least one bidder");
  for (const auto& f : fns_) validate(f);
}

UtilitySpec UtilitySpec::uniform(const UtilityFn& fn, std::size_t m) {
  return UtilitySpec(std::vector<UtilityFn>(m, fn));
}

void UtilitySpec::check_index(std::size_t i) const {
  if (i >= fns_.size()) {
    std::ostringstream os;
    os << "bidder index " << i << " out of range for " << fns_.size()
       << " bidders";
    fail(ErrorKind::kArgument, os.str());
  }
}

const UtilityFn& UtilitySpec::at(std::size_t i) const {
  check_index(i);
  return fns_[i];
}

std::optional<UtilityFn> UtilitySpec::common() const {
  if (fns_.empty()) return std::nullopt;
  for (const auto& f : fns_) {
    if (f.index() != fns_.front().index()) return std::nullopt;
    const bool same = std::visit(
        Overloaded{
            [&](const Power& a) {
              return std::get<Power>(fns_.front()).p == a.p;
            },
            [](const Log&) { return true; },
            [&](const ScaledPower& a) {
              const auto& b = std::get<ScaledPower>(fns_.front());
              return a.a == b.a && a.p == b.p;
            },
        },
        f);
    if (!same) return std::nullopt;
  }
  return fns_.front();
}

double UtilitySpec::value(std::size_t i, double x) const {
  return utility_value(at(i), x);
}

double UtilitySpec::grad(std::size_t i, double x) const {
  return utility_derivative(at(i), x);
}

double UtilitySpec::total(std::span<const double> u) const {
  require(u.size() == fns_.size(), ErrorKind::kArgument,
          "allocation vector length does not match utility spec");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += utility_value(fns_[i], u[i]);
  return s;
}

}  // namespace cmatch
