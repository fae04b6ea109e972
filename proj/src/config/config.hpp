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

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "harness/experiment.hpp"

namespace cmatch {

/// Parses and validates a JSON experiment config. Every error is reported
/// as ErrorKind::kConfiguration.
ExperimentConfig parse_config(std::string_view text);

/// JSON with every field spelled out; parse_config(render_config(c))
/// reproduces c.
std::string render_config(const ExperimentConfig& cfg);

/// Parses the "spec" object on its own.
UtilityDescriptor parse_spec_json(std::string_view text);

std::string_view init_rule_name(InitRule rule);
InitRule parse_init_rule(std::string_view name);

using CsvValue = std::variant<std::string, double, std::int64_t>;

/// RFC-4180 CSV with LF line endings; doubles use 6 significant digits.
std::string emit_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<CsvValue>>& rows);

/// Label for a policy entry: its name, suffixed with the epsilon when
/// several entries share the same policy.
std::string policy_label(const ExperimentConfig& cfg, std::size_t index);

/// policy,epsilon,n,m,p,runs,mean_rl,std_rl,mean_revenue,mean_opt
std::vector<std::string> summary_header();
std::vector<std::vector<CsvValue>> summary_rows(const ExperimentConfig& cfg,
                                                const SummaryStats& stats);
std::string summary_csv(const ExperimentConfig& cfg,
                        const SummaryStats& stats);
std::string sweep_csv(const std::vector<SweepCell>& cells);
/// x,series,mean,std
std::string plot_csv(const std::vector<SweepCell>& cells);

/// One JSON object per line.
std::string run_record_json(const RunRecord& record, bool with_decisions);
/// Full result of a single policy run, including segments.
std::string run_result_json(const RunResult& run);

std::string run_records_jsonl(const SummaryStats& stats, bool with_decisions);

}  // namespace cmatch
