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

#include "solver/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "core/allocation.hpp"
#include "core/error.hpp"

namespace cmatch {
namespace {

constexpr int kLineSearchIters = 40;
constexpr int kColumnPasses = 8;
constexpr double kLocalTol = 1e-12;
constexpr int kSweepsPerStep = 3;
constexpr double kSkipFraction = 0.01;
constexpr double kInvPhi = 0.61803398874989484820;

// Scaled prefix bids b~_ij = (horizon / l) b_ij, arrival-major.
class Problem {
 public:
  Problem(const Instance& instance, std::span<const std::size_t> prefix,
          std::size_t horizon, const UtilitySpec& spec)
      : m_(instance.bidders()), l_(prefix.size()), spec_(spec) {
    require(spec.size() == m_, ErrorKind::kArgument,
            "utility spec size does not match number of bidders");
    require(l_ >= 1, ErrorKind::kArgument, "prefix length must be >= 1");
    require(l_ <= horizon, ErrorKind::kArgument,
            "prefix length exceeds the horizon");
    require(horizon <= instance.arrivals(), ErrorKind::kArgument,
            "horizon exceeds the number of arrivals");
    const double scale =
        static_cast<double>(horizon) / static_cast<double>(l_);
    bids_.resize(l_ * m_);
    has_bid_.assign(m_, 0);
    for (std::size_t j = 0; j < l_; ++j) {
      require(prefix[j] < instance.arrivals(), ErrorKind::kArgument,
              "prefix column out of range");
      const auto col = instance.column(prefix[j]);
      for (std::size_t i = 0; i < m_; ++i) {
        const double b = scale * col[i];
        bids_[j * m_ + i] = b;
        if (b > 0.0) has_bid_[i] = 1;
      }
    }
  }

  std::size_t m() const { return m_; }
  std::size_t l() const { return l_; }
  std::span<const double> column(std::size_t j) const {
    return {bids_.data() + j * m_, m_};
  }
  bool has_bid(std::size_t i) const { return has_bid_[i] != 0; }


  double value(std::span<const double> u) const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      s += utility_value(spec_.at(i), std::max(0.0, u[i]));
    return s;
  }

  double deriv(std::size_t i, double x) const {
    return utility_derivative(spec_.at(i), std::max(0.0, x));
  }

  double term(std::size_t i, double x) const {
    return utility_value(spec_.at(i), std::max(0.0, x));
  }

  void prices(std::span<const double> u, std::vector<double>& out) const {
    out.resize(m_);
    for (std::size_t i = 0; i < m_; ++i)
      out[i] = utility_derivative(spec_.at(i), std::max(0.0, u[i]));
  }

  // Sum_i (M_i(v_i) - M_i'(v_i) v_i) at v = max(u, floor), skipping bidders
  // with no positive bid.
  double conjugate_sum(std::span<const double> u) const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!has_bid_[i]) continue;
      const double v = std::max(u[i], kGradientFloor);
      s += utility_value(spec_.at(i), v) - utility_derivative(spec_.at(i), v) * v;
    }
    return s;
  }

 private:
  std::size_t m_;
  std::size_t l_;
  const UtilitySpec& spec_;
  std::vector<double> bids_;
  std::vector<char> has_bid_;
};

struct Vertex {
  std::vector<std::int32_t> assign;
  std::vector<double> u;
  double score_sum = 0.0;  // Sum_j max_i b~_ij p_i
};

void linear_oracle(const Problem& prob, std::span<const double> prices,
                   Vertex& out) {
  const std::size_t m = prob.m();
  out.assign.resize(prob.l());
  out.u.assign(m, 0.0);
  out.score_sum = 0.0;
  for (std::size_t j = 0; j < prob.l(); ++j) {
    const auto col = prob.column(j);
    const int k = allocate_by_prices(prices, col);
    out.assign[j] = k;
    if (k != kUnallocated) {
      out.u[k] += col[k];
      out.score_sum += col[k] * prices[k];
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct LineResult {
  double step = 0.0;
  double value = 0.0;
};

// Maximizes the concave h on [0, hi] by golden-section search, keeping the
// best of the bracket points and the two endpoints.
template <class H>
LineResult golden_section(const H& h, double hi, double h0) {
  LineResult best{0.0, h0};
  if (!(hi > 0.0)) return best;
  const double h_hi = h(hi);
  if (h_hi > best.value) best = {hi, h_hi};
  double a = 0.0, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = h(c), fd = h(d);
  for (int it = 0; it < kLineSearchIters; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = h(d);
    }
  }
  if (fc > best.value) best = {c, fc};
  if (fd > best.value) best = {d, fd};
  return best;
}

// Frank-Wolfe over the product of column simplices. Each outer iteration
// takes one global step toward the best vertex, then sweeps the columns
// with pairwise transfers from the worst active bidder to the best one.
class ColumnSolver {
 public:
  ColumnSolver(const Problem& prob, const SolverConfig& cfg)
      : prob_(prob),
        cfg_(cfg),
        m_(prob.m()),
        l_(prob.l()),
        x_(prob.l() * prob.m(), 0.0),
        u_(prob.m(), 0.0) {}

  PrimalSolution run(const SolverObserver& observer);

 private:
  void init();
  void recompute_u();
  bool frank_wolfe_step(const Vertex& vertex, int iter, double& step);
  double sweep(double skip);
  double transfer(std::size_t j, std::size_t to, int from);
  double pairwise_column(std::size_t j);

  const Problem& prob_;
  const SolverConfig& cfg_;
  std::size_t m_;
  std::size_t l_;
  std::vector<double> x_;
  std::vector<double> u_;
  double f_ = 0.0;
  std::vector<double> prices_;
  std::vector<double> dir_;
  std::vector<std::size_t> support_;
};

void ColumnSolver::init() {
  if (cfg_.init == InitRule::kUniform) {
    std::fill(x_.begin(), x_.end(), 1.0 / static_cast<double>(m_));
  } else {
    for (std::size_t j = 0; j < l_; ++j) {
      const int k = argmax_bid(prob_.column(j));
      if (k != kUnallocated) x_[j * m_ + k] = 1.0;
    }
  }
  recompute_u();
}

void ColumnSolver::recompute_u() {
  std::fill(u_.begin(), u_.end(), 0.0);
  for (std::size_t j = 0; j < l_; ++j) {
    const auto col = prob_.column(j);
    const double* xj = x_.data() + j * m_;
    for (std::size_t i = 0; i < m_; ++i) u_[i] += col[i] * xj[i];
  }
  f_ = prob_.value(u_);
}

bool ColumnSolver::frank_wolfe_step(const Vertex& vertex, int iter,
                                    double& step) {
  dir_.resize(m_);
  support_.clear();
  for (std::size_t i = 0; i < m_; ++i) {
    dir_[i] = vertex.u[i] - u_[i];
    if (dir_[i] != 0.0) support_.push_back(i);
  }
  const auto h = [this](double g) {
    double s = 0.0;
    for (std::size_t i : support_) s += prob_.term(i, u_[i] + g * dir_[i]);
    return s;
  };
  const double h0 = h(0.0);
  LineResult r = golden_section(h, 1.0, h0);
  if (!(r.step > 0.0) || !(r.value > h0)) {
    // Open-loop fallback when the search brackets no ascent.
    const double g = 2.0 / (iter + 2.0);
    const double v = h(g);
    if (!(v > h0)) return false;
    r = {g, v};
  }
  step = r.step;
  const double keep = 1.0 - r.step;
  for (std::size_t j = 0; j < l_; ++j) {
    double* xj = x_.data() + j * m_;
    for (std::size_t i = 0; i < m_; ++i) xj[i] *= keep;
    if (vertex.assign[j] != kUnallocated) xj[vertex.assign[j]] += r.step;
  }
  recompute_u();
  return true;
}

// Moves mass in column j from bidder `from` (or the column's slack when
// from < 0) to bidder `to`, maximizing the objective along that edge.
// Returns the objective increase.
double ColumnSolver::transfer(std::size_t j, std::size_t to, int from) {
  const auto col = prob_.column(j);
  double* xj = x_.data() + j * m_;
  const double bs = col[to];
  const double us = u_[to];
  double avail = 0.0;
  double ba = 0.0, ua = 0.0;
  if (from < 0) {
    double used = 0.0;
    for (std::size_t i = 0; i < m_; ++i) used += xj[i];
    avail = std::max(0.0, 1.0 - used);
  } else {
    avail = xj[from];
    ba = col[from];
    ua = u_[from];
  }
  if (!(avail > 0.0)) return 0.0;
  const auto slope = [&](double t) {
    double d = bs * prob_.deriv(to, us + t * bs);
    if (from >= 0) d -= ba * prob_.deriv(from, std::max(0.0, ua - t * ba));
    return d;
  };
  double t = avail;
  if (from >= 0 && slope(avail) < 0.0) {
    if (!(slope(0.0) > 0.0)) return 0.0;
    std::uintmax_t max_iter = 60;
    const auto bracket = boost::math::tools::toms748_solve(
        slope, 0.0, avail, boost::math::tools::eps_tolerance<double>(48),
        max_iter);
    t = 0.5 * (bracket.first + bracket.second);
  }
  if (!(t > 0.0)) return 0.0;
  double before = prob_.term(to, us);
  double after = prob_.term(to, us + t * bs);
  u_[to] = us + t * bs;
  xj[to] += t;
  if (from >= 0) {
    before += prob_.term(from, ua);
    const double ua_new = t >= avail ? ua - avail * ba : ua - t * ba;
    u_[from] = std::max(0.0, ua_new);
    after += prob_.term(from, u_[from]);
    xj[from] = t >= avail ? 0.0 : xj[from] - t;
  }
  return after - before;
}

double ColumnSolver::pairwise_column(std::size_t j) {
  const auto col = prob_.column(j);
  const double* xj = x_.data() + j * m_;
  double gained = 0.0;
  for (int pass = 0; pass < kColumnPasses; ++pass) {
    const int s = allocate_by_prices(prices_, col);
    if (s == kUnallocated) break;
    const double top = col[s] * prices_[s];
    int a = -1;
    double low = 0.0;
    double used = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      used += xj[i];
      if (!(xj[i] > 0.0) || static_cast<int>(i) == s) continue;
      const double q = col[i] * prices_[i];
      if (a < 0 || q < low) {
        a = static_cast<int>(i);
        low = q;
      }
    }
    // Unused capacity acts as an active entry with score zero.
    if (used < 1.0 && (a < 0 || low > 0.0)) {
      a = -1;
      low = 0.0;
    } else if (a < 0) {
      break;
    }
    if (!(top - low > kLocalTol * top)) break;
    const double g = transfer(j, static_cast<std::size_t>(s), a);
    prices_[s] = prob_.deriv(static_cast<std::size_t>(s), u_[s]);
    if (a >= 0) {
      prices_[a] = prob_.deriv(static_cast<std::size_t>(a), u_[a]);
    }
    if (!(g > 0.0)) break;
    gained += g;
  }
  return gained;
}

// Columns whose own gap is below `skip` are left alone.
double ColumnSolver::sweep(double skip) {
  prob_.prices(u_, prices_);
  double gained = 0.0;
  for (std::size_t j = 0; j < l_; ++j) {
    const auto col = prob_.column(j);
    const double* xj = x_.data() + j * m_;
    double top = 0.0, held = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double q = col[i] * prices_[i];
      top = std::max(top, q);
      held += xj[i] * q;
    }
    if (top - held <= skip) continue;
    gained += pairwise_column(j);
  }
  recompute_u();
  return gained;
}

PrimalSolution ColumnSolver::run(const SolverObserver& observer) {
  init();
  Vertex vertex;
  PrimalSolution sol;
  double last_step = 0.0;
  bool converged = false;
  int iter = 0;
  for (iter = 0; iter < cfg_.max_iters; ++iter) {
    prob_.prices(u_, prices_);
    linear_oracle(prob_, prices_, vertex);
    const double fw_gap = vertex.score_sum - dot(prices_, u_);
    const double dual = vertex.score_sum + prob_.conjugate_sum(u_);
    require(std::isfinite(f_) && std::isfinite(dual), ErrorKind::kNumeric,
            "solver produced a non-finite objective");
    if (observer) observer({iter, f_, fw_gap, last_step, u_});
    if (dual - f_ <= cfg_.rel_tol * std::max(1.0, f_)) {
      converged = true;
      break;
    }
    double step = 0.0;
    const bool moved = frank_wolfe_step(vertex, iter, step);
    const double skip = kSkipFraction * cfg_.rel_tol * std::max(1.0, f_) /
                        static_cast<double>(l_);
    double gained = 0.0;
    for (int r = 0; r < kSweepsPerStep; ++r) gained += sweep(skip);
    if (!moved && !(gained > 0.0)) {
      // No ascent along any direction at working precision.
      converged = true;
      break;
    }
    last_step = step;
  }
  sol.iterations = iter;
  sol.hit_iteration_cap = !converged;

  sol.bidders = m_;
  sol.prefix_len = l_;
  sol.x = x_;
  recompute_u();
  sol.u_hat = u_;
  sol.objective = f_;
  prob_.prices(sol.u_hat, prices_);
  linear_oracle(prob_, prices_, vertex);
  sol.fw_gap = vertex.score_sum - dot(prices_, sol.u_hat);
  sol.dual_bound = vertex.score_sum + prob_.conjugate_sum(sol.u_hat);
  sol.gap_certificate = std::max(0.0, sol.dual_bound - sol.objective);
  require(std::isfinite(sol.objective), ErrorKind::kNumeric,
          "solver produced a non-finite objective");
  return sol;
}

std::vector<std::size_t> leading_columns(std::size_t count) {
  std::vector<std::size_t> cols(count);
  std::iota(cols.begin(), cols.end(), 0);
  return cols;
}

}  // namespace

void SolverConfig::validate() const {
  require(rel_tol > 0.0 && std::isfinite(rel_tol), ErrorKind::kConfiguration,
          "solver rel_tol must be positive");
  require(max_iters >= 1, ErrorKind::kConfiguration,
          "solver max_iters must be >= 1");
}

PrimalSolution solve_concave_program(const Instance& instance,
                                     std::span<const std::size_t> prefix,
                                     std::size_t horizon,
                                     const UtilitySpec& spec,
                                     const SolverConfig& cfg,
                                     const SolverObserver& observer) {
  cfg.validate();
  const Problem prob(instance, prefix, horizon, spec);
  ColumnSolver solver(prob, cfg);
  PrimalSolution sol = solver.run(observer);
  sol.horizon = horizon;
  return sol;
}

PrimalSolution solve_concave_program(const Instance& instance,
                                     std::size_t prefix_len,
                                     std::size_t horizon,
                                     const UtilitySpec& spec,
                                     const SolverConfig& cfg,
                                     const SolverObserver& observer) {
  require(prefix_len >= 1 && prefix_len <= horizon, ErrorKind::kArgument,
          "prefix length must lie in [1, horizon]");
  require(horizon <= instance.arrivals(), ErrorKind::kArgument,
          "horizon exceeds the number of arrivals");
  const auto cols = leading_columns(prefix_len);
  return solve_concave_program(instance, cols, horizon, spec, cfg, observer);
}

DualSolution dual_solution(std::span<const double> u_hat,
                           const Instance& instance,
                           std::span<const std::size_t> prefix,
                           std::size_t horizon, const UtilitySpec& spec) {
  require(u_hat.size() == instance.bidders(), ErrorKind::kArgument,
          "u_hat length does not match number of bidders");
  for (double v : u_hat) {
    require(v >= 0.0, ErrorKind::kDomain, "u_hat must be non-negative");
  }
  const Problem prob(instance, prefix, horizon, spec);
  const std::size_t m = prob.m();
  DualSolution dual;
  dual.v.assign(m, 0.0);
  std::vector<double> prices(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (!prob.has_bid(i)) continue;
    dual.v[i] = std::max(u_hat[i], kGradientFloor);
    prices[i] = prob.deriv(i, dual.v[i]);
  }
  dual.y.assign(prob.l(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < prob.l(); ++j) {
    const auto col = prob.column(j);
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) best = std::max(best, col[i] * prices[i]);
    dual.y[j] = best;
    total += best;
  }
  dual.objective = total + prob.conjugate_sum(u_hat);
  return dual;
}

double dual_upper_bound(std::span<const double> u_hat,
                        const Instance& instance,
                        std::span<const std::size_t> prefix,
                        std::size_t horizon, const UtilitySpec& spec) {
  return dual_solution(u_hat, instance, prefix, horizon, spec).objective;
}

double dual_upper_bound(std::span<const double> u_hat,
                        const Instance& instance, std::size_t prefix_len,
                        std::size_t horizon, const UtilitySpec& spec) {
  require(prefix_len >= 1 && prefix_len <= horizon, ErrorKind::kArgument,
          "prefix length must lie in [1, horizon]");
  const auto cols = leading_columns(prefix_len);
  return dual_upper_bound(u_hat, instance, cols, horizon, spec);
}

SolverObserver SolveTrace::observer() {
  return [this](const SolverIterate& it) {
    rows_.push_back({it.iter, it.objective, it.fw_gap, it.step_size});
  };
}

std::string SolveTrace::to_csv() const {
  std::string out = "iter,objective,fw_gap,step_size\n";
  char buf[128];
  for (const auto& r : rows_) {
    const int len = std::snprintf(buf, sizeof buf, "%d,%.10g,%.6g,%.6g\n",
                                  r.iter, r.objective, r.fw_gap, r.step_size);
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

}  // namespace cmatch
