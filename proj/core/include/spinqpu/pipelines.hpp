// SPDX-License-Identifier: Apache-2.0
//
// The four batch analysis pipelines behind the command-line front door.
// Each consumes a JSON config, runs one analysis and writes plot-ready CSV
// payloads plus a run manifest into the output directory. Identical inputs
// produce byte-identical CSV payloads regardless of thread count; the
// manifest carries the wall time and lives outside the diffed payload set.
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "spinqpu/common.hpp"

namespace spinqpu::pipelines {

inline constexpr const char* kModule = "cli";

struct RunOptions {
  std::string pipeline;  // universality-sweep | qec-gain | cavity-gate | trotter-scan
  std::filesystem::path spec_path;
  std::filesystem::path out_dir;
  std::vector<std::pair<std::string, std::string>> overrides;  // --set key=value
  int threads = 1;
  bool ideal_pulses = false;  // force ideal pulse mode where applicable
};

/// Runs one pipeline end to end. Throws ValidationError (bad config) or
/// ContractError (physics contract violated by the configured device).
void run(const RunOptions& options);

/// Schema and physics sanity check of a spec file (with overrides applied),
/// without running any pipeline. Returns "ok"; throws ValidationError with
/// the aggregated violation list otherwise.
std::string validate_spec(const std::filesystem::path& spec_path,
                          const std::vector<std::pair<std::string, std::string>>&
                              overrides = {});

}  // namespace spinqpu::pipelines
