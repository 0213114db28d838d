// Copyright 2026 The nvghz Authors
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

// nvghz: detection-time sweeps, validation and constant re-derivation.
//
// Exit status: 0 success, 1 validation or runtime failure, 2 bad
// configuration or arguments.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nvghz/cli_reports.hpp"
#include "nvghz/errors.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection-time model for nanoscale NMR with separable and GHZ-entangled NV probes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string convention;
  app.add_option("--config", config_path, "Scenario JSON file (defaults: NV1 preset)")
      ->check(CLI::ExistingFile);
  app.add_option("--gamma-convention", convention, "Override the config: angular or cyclic")
      ->check(CLI::IsMember({"angular", "cyclic"}));

  auto* detect = app.add_subcommand("detect-time", "Sweep z_min with the published formulas");
  detect->fallthrough();
  std::string output;
  bool fig3 = false;
  detect->add_option("--output", output, "CSV path (default: the config's output field)");
  detect->add_flag("--fig3", fig3, "NV3 with n_DD in {3, 15, 63, 255}");

  auto* validate = app.add_subcommand("validate", "Run the validation suite");
  validate->fallthrough();
  std::string depth = "fast";
  validate->add_option("--depth", depth, "fast or full")->check(CLI::IsMember({"fast", "full"}));

  auto* optimize = app.add_subcommand("optimize-geometry", "Optimal dimensionless ensemble shape");
  optimize->fallthrough();
  std::string variant;
  std::string f_ent_variant = "corrected";
  optimize->add_option("variant", variant, "sep or ent")
      ->required()
      ->check(CLI::IsMember({"sep", "ent"}));
  optimize->add_option("--f-ent-variant", f_ent_variant, "printed or corrected")
      ->check(CLI::IsMember({"printed", "corrected"}));

  auto* constants = app.add_subcommand("constants", "Published vs re-derived prefactors");
  constants->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  nvghz::ScenarioConfig config;
  try {
    if (!config_path.empty()) config = nvghz::load_config(config_path);
    if (!convention.empty()) config.gamma_convention = nvghz::parse_gamma_convention(convention);
  } catch (const nvghz::ConfigError& e) {
    for (const auto& issue : e.issues()) std::cerr << "config error: " << issue << "\n";
    return kExitConfig;
  }

  try {
    if (*detect) {
      std::optional<std::filesystem::path> path;
      if (!output.empty()) path = output;
      return nvghz::cmd_detect_time(config, path, fig3, std::cerr);
    }
    if (*validate) {
      return nvghz::cmd_validate(nvghz::parse_validation_depth(depth), config, std::cout);
    }
    if (*optimize) {
      return nvghz::cmd_optimize_geometry(nvghz::parse_geometry_variant(variant),
                                          nvghz::parse_closed_form_variant(f_ent_variant),
                                          std::cout);
    }
    if (*constants) return nvghz::cmd_constants(config, std::cout);
  } catch (const nvghz::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
