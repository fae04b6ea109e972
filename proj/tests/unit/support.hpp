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

// Reference implementations used by the tests. Nothing here calls into the
// library, so agreement with it is meaningful.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ref {

// Plain MT19937-64, written out from the published recurrence.
class Mt64 {
 public:
  explicit Mt64(std::uint64_t seed) {
    mt_[0] = seed;
    for (std::size_t i = 1; i < kN; ++i)
      mt_[i] = 6364136223846793005ULL * (mt_[i - 1] ^ (mt_[i - 1] >> 62)) + i;
    idx_ = kN;
  }

  std::uint64_t next() {
    if (idx_ >= kN) twist();
    std::uint64_t y = mt_[idx_++];
    y ^= (y >> 29) & 0x5555555555555555ULL;
    y ^= (y << 17) & 0x71D67FFFEDA60000ULL;
    y ^= (y << 37) & 0xFFF7EEE000000000ULL;
    y ^= y >> 43;
    return y;
  }

  double unit() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }

 private:
  static constexpr std::size_t kN = 312;
  void twist() {
    for (std::size_t i = 0; i < kN; ++i) {
      const std::uint64_t x = (mt_[i] & 0xFFFFFFFF80000000ULL) |
                              (mt_[(i + 1) % kN] & 0x7FFFFFFFULL);
      std::uint64_t xa = x >> 1;
      if (x & 1) xa ^= 0xB5026F5AA96619E9ULL;
      mt_[i] = mt_[(i + 156) % kN] ^ xa;
    }
    idx_ = 0;
  }
  std::array<std::uint64_t, kN> mt_{};
  std::size_t idx_ = 0;
};

inline std::uint64_t splitmix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Dense bidder-major matrix.
struct Matrix {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> v;
  double at(std::size_t i, std::size_t j) const { return v[i * n + j]; }
};

inline double pow_value(double p, double x) { return std::pow(x, p); }

// Maximizes sum_i u_i^{p_i}, u_i = scale * sum_{j in cols} b_ij x_ij, over
// per-column capped simplices by pairwise transfers with ternary search.
struct Solution {
  double objective = 0.0;
  std::vector<double> u;
};

inline Solution concave_optimum(const Matrix& b, const std::vector<double>& p,
                                const std::vector<std::size_t>& cols,
                                double scale, int sweeps = 200) {
  const std::size_t m = b.m;
  const std::size_t l = cols.size();
  std::vector<double> x(l * m, 1.0 / static_cast<double>(m));
  std::vector<double> u(m, 0.0);
  auto recompute = [&] {
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t c = 0; c < l; ++c)
      for (std::size_t i = 0; i < m; ++i)
        u[i] += scale * b.at(i, cols[c]) * x[c * m + i];
  };
  auto total = [&](const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += pow_value(p[i], std::max(0.0, w[i]));
    return s;
  };
  recompute();
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t c = 0; c < l; ++c) {
      double* col = &x[c * m];
      // Index m stands for the unused share of the column.
      for (std::size_t from = 0; from <= m; ++from) {
        for (std::size_t to = 0; to <= m; ++to) {
          if (from == to) continue;
          double used = 0.0;
          for (std::size_t i = 0; i < m; ++i) used += col[i];
          const double avail = from == m ? std::max(0.0, 1.0 - used) : col[from];
          if (avail <= 0.0) continue;
          auto eval = [&](double t) {
            std::vector<double> w = u;
            if (from < m) w[from] -= scale * b.at(from, cols[c]) * t;
            if (to < m) w[to] += scale * b.at(to, cols[c]) * t;
            return total(w);
          };
          double lo = 0.0, hi = avail;
          for (int it = 0; it < 100; ++it) {
            const double a = lo + (hi - lo) / 3.0;
            const double d = hi - (hi - lo) / 3.0;
            if (eval(a) < eval(d)) lo = a; else hi = d;
          }
          const double t = 0.5 * (lo + hi);
          if (eval(t) > eval(0.0)) {
            if (from < m) col[from] -= t;
            if (to < m) col[to] += t;
            recompute();
          }
        }
      }
    }
  }
  return {total(u), u};
}

inline std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = j;
  return v;
}

}  // namespace ref
