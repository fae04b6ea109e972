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

#include <string>
#include <string_view>

#include "core/instance.hpp"

namespace cmatch {

// CSV: one line per bidder, one column per arrival, values printed with 17
// significant digits so that write/read is exact.
std::string instance_to_csv(const Instance& instance);
/// Parses and rescales (a scaled instance is returned unchanged).
Instance instance_from_csv(std::string_view text);

// Binary: "CMB1", u32 m, u32 n, then m*n little-endian f64 in bidder-major
// order.
std::string instance_to_binary(const Instance& instance);
Instance instance_from_binary(std::string_view bytes);

/// Whole-file helpers; failures raise ErrorKind::kIo.
void write_text_file(const std::string& path, std::string_view payload);
std::string read_text_file(const std::string& path);

void save_instance(const Instance& instance, const std::string& path);
/// Chooses the format by sniffing the "CMB1" magic.
Instance load_instance(const std::string& path);

}  // namespace cmatch
