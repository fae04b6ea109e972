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

#include "datagen/generators.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace cmatch {
namespace {

void require_kind(const GeneratorConfig& cfg, GeneratorKind kind) {
  cfg.validate();
  require(cfg.kind == kind, ErrorKind::kConfiguration,
          "generator called with a config of a different kind");
}

Instance finish(const GeneratorConfig& cfg, const std::vector<double>& rows) {
  return scale_instance(cfg.m, cfg.n, rows);
}

}  // namespace

std::string_view generator_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kCategory:
      return "category";
    case GeneratorKind::kTruncatedNormal:
      return "truncated_normal";
    case GeneratorKind::kBeta:
      return "beta";
    case GeneratorKind::kMixed:
      return "mixed";
  }
  return "unknown";
}

GeneratorKind parse_generator(std::string_view name) {
  if (name == "category") return GeneratorKind::kCategory;
  if (name == "truncated_normal") return GeneratorKind::kTruncatedNormal;
  if (name == "beta") return GeneratorKind::kBeta;
  if (name == "mixed") return GeneratorKind::kMixed;
  fail(ErrorKind::kConfiguration,
       "unknown generator kind '" + std::string(name) +
           "' (expected category, truncated_normal, beta or mixed)");
}

std::string_view param_scope_name(ParamScope scope) {
  return scope == ParamScope::kBidder ? "bidder" : "entry";
}

ParamScope parse_param_scope(std::string_view name) {
  if (name == "bidder") return ParamScope::kBidder;
  if (name == "entry") return ParamScope::kEntry;
  fail(ErrorKind::kConfiguration, "unknown param scope '" + std::string(name) +
                                      "' (expected bidder or entry)");
}

std::string_view jitter_scope_name(JitterScope scope) {
  return scope == JitterScope::kArrival ? "arrival" : "entry";
}

JitterScope parse_jitter_scope(std::string_view name) {
  if (name == "arrival") return JitterScope::kArrival;
  if (name == "entry") return JitterScope::kEntry;
  fail(ErrorKind::kConfiguration, "unknown jitter scope '" +
                                      std::string(name) +
                                      "' (expected arrival or entry)");
}

void GeneratorConfig::validate() const {
  require(m >= 1, ErrorKind::kConfiguration, "generator.m must be >= 1");
  require(n >= 1, ErrorKind::kConfiguration, "generator.n must be >= 1");
  require(categories >= 1, ErrorKind::kConfiguration,
          "generator.k must be >= 1");
  require(zero_prob >= 0.0 && zero_prob <= 1.0, ErrorKind::kConfiguration,
          "generator.zero_prob must lie in [0, 1]");
  require(base_range.lo >= 0.0 && base_range.lo <= base_range.hi,
          ErrorKind::kConfiguration,
          "generator.base_range must satisfy 0 <= lo <= hi");
  require(jitter.lo >= 0.0 && jitter.lo <= jitter.hi,
          ErrorKind::kConfiguration,
          "generator.jitter must satisfy 0 <= lo <= hi");
}

CategoryModel draw_category_model(const GeneratorConfig& cfg, Rng& rng) {
  CategoryModel model;
  model.bidders = cfg.m;
  model.categories = cfg.categories;
  model.base_valuations.resize(cfg.m * cfg.categories);
  for (double& v : model.base_valuations) {
    v = rng.uniform01() < cfg.zero_prob
            ? 0.0
            : rng.uniform(cfg.base_range.lo, cfg.base_range.hi);
  }
  // Flat Dirichlet: normalized unit exponentials.
  model.category_probs.resize(cfg.categories);
  double total = 0.0;
  for (double& r : model.category_probs) {
    r = rng.exponential();
    total += r;
  }
  for (double& r : model.category_probs) r /= total;
  return model;
}

CategoryDraw draw_category_bids(const GeneratorConfig& cfg, Rng& rng) {
  CategoryDraw draw;
  draw.model = draw_category_model(cfg, rng);
  const auto& rho = draw.model.category_probs;
  std::vector<double> cdf(rho.size());
  std::partial_sum(rho.begin(), rho.end(), cdf.begin());
  draw.arrival_category.resize(cfg.n);
  draw.rows.assign(cfg.m * cfg.n, 0.0);
  for (std::size_t j = 0; j < cfg.n; ++j) {
    const double r = rng.uniform01() * cdf.back();
    std::size_t k = 0;
    while (k + 1 < cdf.size() && cdf[k] <= r) ++k;
    draw.arrival_category[j] = k;
    const double shared = cfg.jitter_scope == JitterScope::kArrival
                              ? rng.uniform(cfg.jitter.lo, cfg.jitter.hi)
                              : 0.0;
    for (std::size_t i = 0; i < cfg.m; ++i) {
      const double jit = cfg.jitter_scope == JitterScope::kArrival
                             ? shared
                             : rng.uniform(cfg.jitter.lo, cfg.jitter.hi);
      draw.rows[i * cfg.n + j] =
          draw.model.base_valuations[i * cfg.categories + k] * jit;
    }
  }
  return draw;
}

Instance gen_category(const GeneratorConfig& cfg, Rng& rng) {
  require_kind(cfg, GeneratorKind::kCategory);
  return finish(cfg, draw_category_bids(cfg, rng).rows);
}

double sample_truncated_normal(double mean, double sd, Rng& rng) {
  if (!(sd > 0.0)) return std::min(1.0, std::max(0.0, mean));
  for (;;) {
    const double v = mean + sd * rng.normal();
    if (v >= 0.0 && v <= 1.0) return v;
  }
}

Instance gen_truncated_normal(const GeneratorConfig& cfg, Rng& rng) {
  require_kind(cfg, GeneratorKind::kTruncatedNormal);
  std::vector<double> rows(cfg.m * cfg.n);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    double mu = rng.uniform01();
    double sigma = rng.uniform01();
    for (std::size_t j = 0; j < cfg.n; ++j) {
      if (cfg.param_scope == ParamScope::kEntry && j > 0) {
        mu = rng.uniform01();
        sigma = rng.uniform01();
      }
      rows[i * cfg.n + j] = sample_truncated_normal(mu, sigma, rng);
    }
  }
  return finish(cfg, rows);
}

Instance gen_beta(const GeneratorConfig& cfg, Rng& rng) {
  require_kind(cfg, GeneratorKind::kBeta);
  std::vector<double> rows(cfg.m * cfg.n);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    double a = rng.uniform_open_closed01();
    double b = rng.uniform_open_closed01();
    for (std::size_t j = 0; j < cfg.n; ++j) {
      if (cfg.param_scope == ParamScope::kEntry && j > 0) {
        a = rng.uniform_open_closed01();
        b = rng.uniform_open_closed01();
      }
      rows[i * cfg.n + j] = rng.beta(a, b);
    }
  }
  return finish(cfg, rows);
}

Instance gen_mixed(const GeneratorConfig& cfg, Rng& rng) {
  require_kind(cfg, GeneratorKind::kMixed);
  std::vector<double> rows(cfg.m * cfg.n);
  for (double& v : rows) {
    v = rng.uniform01() < 0.5 ? sample_truncated_normal(0.5, 0.5, rng)
                              : rng.beta(0.5, 0.5);
  }
  return finish(cfg, rows);
}

Instance generate(const GeneratorConfig& cfg, Rng& rng) {
  switch (cfg.kind) {
    case GeneratorKind::kCategory:
      return gen_category(cfg, rng);
    case GeneratorKind::kTruncatedNormal:
      return gen_truncated_normal(cfg, rng);
    case GeneratorKind::kBeta:
      return gen_beta(cfg, rng);
    case GeneratorKind::kMixed:
      return gen_mixed(cfg, rng);
  }
  fail(ErrorKind::kConfiguration, "unknown generator kind");
}

Instance generate(const GeneratorConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, kInstanceStream));
  return generate(cfg, rng);
}

ArrivalOrder sample_permutation(std::size_t n, Rng& rng) {
  require(n >= 1, ErrorKind::kArgument, "permutation needs n >= 1");
  ArrivalOrder order = ArrivalOrder::identity(n);
  for (std::size_t k = n - 1; k > 0; --k) {
    const std::size_t r = rng.index(k + 1);
    std::swap(order.permutation[k], order.permutation[r]);
  }
  return order;
}

ArrivalOrder sample_permutation(std::size_t n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kOrderStream));
  ArrivalOrder order = sample_permutation(n, rng);
  order.seed = seed;
  return order;
}

}  // namespace cmatch
