// SPDX-License-Identifier: Apache-2.0
//
// Configuration ingestion and deterministic artifact output.
//
// System specs are JSON objects with the schema keys `spin`, `g`, `D_ghz`,
// `E_ghz`, `nuclear_spin`, `A_ghz`, `p_ghz` per site, `J_ghz` per coupling
// and a 3-vector `field_tesla`. canonical_system() re-emits the parsed spec
// in a fixed key order with shortest-round-trip number formatting, so
// parse -> canonicalize is a bit-exact fixed point.
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "spinqpu/common.hpp"
#include "spinqpu/spin_system.hpp"

namespace spinqpu::io {

inline constexpr const char* kModule = "cli";

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Parses a system spec; throws ValidationError naming the offending key.
spin::SpinSystemSpec parse_system(const Json& config);

/// Canonical JSON form of a spec (fixed key order, defaults omitted).
OrderedJson canonical_system(const spin::SpinSystemSpec& spec);

/// Loads a JSON file; parse failures are reported with line and column.
Json load_json_file(const std::filesystem::path& path);

/// Applies a `--set dotted.key=value` override; the value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(Json& config, const std::string& dotted_key,
                    const std::string& value);

/// Locale-independent formatting with 12 significant digits ('.' decimal
/// separator, shortest exponent form as produced by std::to_chars).
std::string format_number(double value);

/// Minimal CSV assembly: fixed header, rows of preformatted cells.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header);
  void add_row(const std::vector<std::string>& cells);
  const std::string& payload() const { return payload_; }

 private:
  std::size_t columns_;
  std::string payload_;
};

/// Writes content to path via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace spinqpu::io
