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
#include <string_view>
#include <vector>

#include "core/instance.hpp"

namespace cmatch {

class Rng;

enum class GeneratorKind { kCategory, kTruncatedNormal, kBeta, kMixed };
/// Whether distribution parameters are drawn once per bidder or per entry.
enum class ParamScope { kBidder, kEntry };

std::string_view generator_name(GeneratorKind kind);
GeneratorKind parse_generator(std::string_view name);
std::string_view param_scope_name(ParamScope scope);
ParamScope parse_param_scope(std::string_view name);

/// Category generator: one jitter multiplier shared by every bidder of an
/// arrival, or an independent multiplier per entry.
enum class JitterScope { kArrival, kEntry };

std::string_view jitter_scope_name(JitterScope scope);
JitterScope parse_jitter_scope(std::string_view name);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::kCategory;
  std::size_t m = 50;
  std::size_t n = 10000;
  std::size_t categories = 100;
  double zero_prob = 0.7;
  Interval base_range{0.2, 1.0};
  Interval jitter{0.9, 1.1};
  JitterScope jitter_scope = JitterScope::kArrival;
  ParamScope param_scope = ParamScope::kBidder;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CategoryModel {
  /// m x k, bidder-major.
  std::vector<double> base_valuations;
  std::vector<double> category_probs;
  std::size_t bidders = 0;
  std::size_t categories = 0;
};

CategoryModel draw_category_model(const GeneratorConfig& cfg, Rng& rng);

/// Unscaled bids of the base problem together with the drawn category of each
/// arrival.
struct CategoryDraw {
  CategoryModel model;
  std::vector<std::size_t> arrival_category;
  std::vector<double> rows;  // m x n, bidder-major, before scaling
};
CategoryDraw draw_category_bids(const GeneratorConfig& cfg, Rng& rng);

Instance gen_category(const GeneratorConfig& cfg, Rng& rng);
Instance gen_truncated_normal(const GeneratorConfig& cfg, Rng& rng);
Instance gen_beta(const GeneratorConfig& cfg, Rng& rng);
Instance gen_mixed(const GeneratorConfig& cfg, Rng& rng);

/// Dispatch on cfg.kind.
Instance generate(const GeneratorConfig& cfg, Rng& rng);
/// Dispatch on cfg.kind with Rng(derive_seed(cfg.seed, kInstanceStream)).
Instance generate(const GeneratorConfig& cfg);

/// Normal(mean, sd) conditioned on [0, 1], by rejection. sd == 0 returns the
/// mean clipped to [0, 1].
double sample_truncated_normal(double mean, double sd, Rng& rng);

/// Uniform permutation of 0..n-1 by Fisher-Yates.
ArrivalOrder sample_permutation(std::size_t n, Rng& rng);
ArrivalOrder sample_permutation(std::size_t n, std::uint64_t seed);

}  // namespace cmatch
