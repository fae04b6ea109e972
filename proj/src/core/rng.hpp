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

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace cmatch {

/// Seeded pseudo-random source used by every sampler in the library.
///
/// Raw bits come from std::mt19937_64, whose output sequence is fixed by the
/// standard. The distributions are implemented here rather than through
/// <random> so that generated instances are bit-identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform on (0, 1]; zero draws are rejected and redrawn.
  double uniform_open_closed01();

  /// Unbiased integer in [0, bound).
  std::size_t index(std::size_t bound);

  double exponential();
  /// Standard normal via the Marsaglia polar method.
  double normal();
  /// log of a Gamma(shape, 1) variate; stays finite for tiny shapes.
  double log_gamma_variate(double shape);
  double beta(double a, double b);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Independent 64-bit seed for a named sub-stream of a replication seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum Stream : std::uint64_t {
  kInstanceStream = 1,
  kOrderStream = 2,
  kPerturbStream = 3,
};

}  // namespace cmatch
