// SPDX-License-Identifier: Apache-2.0
//
// Batch front door: one pipeline per invocation, deterministic CSV
// artifacts. Exit codes: 0 success, 2 config/schema violations,
// 3 physics-contract violations.
#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "spinqpu/common.hpp"
#include "spinqpu/pipelines.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spinqpu - molecular spin-qudit processor analysis toolkit"};
  app.set_version_flag("--version", std::string(spinqpu::kVersion));

  spinqpu::pipelines::RunOptions options;
  std::vector<std::string> raw_overrides;
  bool validate_only = false;

  app.add_option("--pipeline", options.pipeline,
                 "universality-sweep | qec-gain | cavity-gate | trotter-scan");
  app.add_option("--spec", options.spec_path, "input spec/config file (JSON)")
      ->required();
  app.add_option("--out", options.out_dir, "output directory for CSV artifacts");
  app.add_option("--set", raw_overrides,
                 "config override key=value (repeatable, dotted keys)");
  app.add_option("--threads", options.threads, "worker threads for sweep points")
      ->check(CLI::PositiveNumber);
  app.add_flag("--ideal-pulses", options.ideal_pulses,
               "force ideal (zero-duration) pulses where applicable");
  app.add_flag("--validate", validate_only,
               "check the spec schema and physics sanity, then exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 2;
  }

  for (const std::string& raw : raw_overrides) {
    const auto eq = raw.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "cli: malformed --set override '" << raw << "' (need key=value)\n";
      return 2;
    }
    options.overrides.emplace_back(raw.substr(0, eq), raw.substr(eq + 1));
  }

  try {
    if (validate_only) {
      std::cout << spinqpu::pipelines::validate_spec(options.spec_path,
                                                     options.overrides)
                << "\n";
      return 0;
    }
    spinqpu::pipelines::run(options);
    return 0;
  } catch (const spinqpu::ValidationError& err) {
    std::cerr << err.what() << "\n";
    return 2;
  } catch (const spinqpu::ContractError& err) {
    std::cerr << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "unexpected error: " << err.what() << "\n";
    return 1;
  }
}
