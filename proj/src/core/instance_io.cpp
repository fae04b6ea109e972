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

#include "core/instance_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "core/error.hpp"

namespace cmatch {
namespace {

constexpr char kMagic[4] = {'C', 'M', 'B', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

std::uint32_t get_u32(std::string_view s, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + k])) << (8 * k);
  return v;
}

void put_f64(std::string& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xFF));
}

double get_f64(std::string_view s, std::size_t at) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[at + k])) << (8 * k);
  return std::bit_cast<double>(bits);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string instance_to_csv(const Instance& instance) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < instance.bidders(); ++i) {
    for (std::size_t j = 0; j < instance.arrivals(); ++j) {
      if (j) out.push_back(',');
      const int len = std::snprintf(buf, sizeof buf, "%.17g", instance.bid(i, j));
      out.append(buf, static_cast<std::size_t>(len));
    }
    out.push_back('\n');
  }
  return out;
}

Instance instance_from_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t count = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      const std::string_view cell = trim(line.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        std::ostringstream os;
        os << "instance CSV: bad number '" << cell << "' on row " << rows + 1;
        fail(ErrorKind::kValidation, os.str());
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (rows == 0) cols = count;
    require(count == cols, ErrorKind::kValidation,
            "instance CSV: rows have different lengths");
    ++rows;
  }
  require(rows > 0, ErrorKind::kValidation, "instance CSV is empty");
  return scale_instance(rows, cols, values);
}

std::string instance_to_binary(const Instance& instance) {
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, static_cast<std::uint32_t>(instance.bidders()));
  put_u32(out, static_cast<std::uint32_t>(instance.arrivals()));
  out.reserve(out.size() + 8 * instance.bidders() * instance.arrivals());
  for (std::size_t i = 0; i < instance.bidders(); ++i)
    for (std::size_t j = 0; j < instance.arrivals(); ++j) put_f64(out, instance.bid(i, j));
  return out;
}

Instance instance_from_binary(std::string_view bytes) {
  require(bytes.size() >= 12 && std::memcmp(bytes.data(), kMagic, 4) == 0,
          ErrorKind::kValidation, "binary instance: missing CMB1 header");
  const std::size_t m = get_u32(bytes, 4);
  const std::size_t n = get_u32(bytes, 8);
  require(bytes.size() == 12 + 8 * m * n, ErrorKind::kValidation,
          "binary instance: payload size does not match header");
  std::vector<double> rows(m * n);
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = get_f64(bytes, 12 + 8 * k);
  return scale_instance(m, n, rows);
}

void write_text_file(const std::string& path, std::string_view payload) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorKind::kIo, "cannot open " + path + " for writing");
  os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  os.close();
  require(static_cast<bool>(os), ErrorKind::kIo, "failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::kIo, "cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

void save_instance(const Instance& instance, const std::string& path) {
  const bool binary = path.ends_with(".cmb") || path.ends_with(".bin");
  write_text_file(path, binary ? instance_to_binary(instance) : instance_to_csv(instance));
}

Instance load_instance(const std::string& path) {
  const std::string bytes = read_text_file(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0)
    return instance_from_binary(bytes);
  return instance_from_csv(bytes);
}

}  // namespace cmatch
