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

#pragma once

// Configuration, sweeps and reports behind the `nvghz` command-line tool.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nvghz/geometric_factors.hpp"
#include "nvghz/model_core.hpp"
#include "nvghz/protocol_optimizer.hpp"

namespace nvghz {

enum class SweepSpacing { linear, log };

struct ZSweep {
  double start_m = 1.0e-7;
  double stop_m = 2.0e-6;
  int points = 50;
  SweepSpacing spacing = SweepSpacing::log;

  std::vector<double> values() const;
};

/// Scenario file contents after preset expansion. See README.md for the
/// JSON schema.
struct ScenarioConfig {
  std::string preset = "NV1";  // NV1, NV2, NV3 or custom
  double t2_echo_s = presets::NV1.t2_echo;
  double rho_nv_per_cm3 = 1.1e17;
  double gamma_target_hz_per_t = constants::proton_gamma_hz_per_t;
  double gamma_probe_hz_per_t = constants::nv_gamma_hz_per_t;
  GammaConvention gamma_convention = GammaConvention::cyclic;
  double nuclear_count = presets::nuclear_count;
  int n_dd = presets::n_dd;
  ZSweep z_min_sweep;
  std::string output = "detect_time.csv";
  std::optional<double> omega_target_rad_per_s;

  double rho_nv() const { return per_cm3(rho_nv_per_cm3); }
  PhysicalScenario scenario() const;
  PhysicalScenario scenario(GammaConvention convention) const;
};

/// Parses JSON text. Unknown keys, wrong types and invariant violations are
/// collected and thrown together as one ConfigError.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "<config>");
/// Throws ConfigError when the file cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

enum class Verdict { pass, fail, informational };
std::string_view to_string(Verdict verdict);

struct DiscrepancyEntry {
  std::string check;
  double published = 0.0;
  double computed = 0.0;
  double rel_dev = 0.0;
  Verdict verdict = Verdict::informational;
  std::string note;
};

struct DiscrepancyReport {
  std::vector<DiscrepancyEntry> entries;

  /// rel_dev is filled from the two values (0 when both vanish).
  void add(std::string check, double published, double computed, Verdict verdict,
           std::string note = {});
  /// No entry has verdict fail.
  bool all_pass() const;
  std::size_t count(Verdict verdict) const;
  const DiscrepancyEntry* find(std::string_view check) const;
  void write(std::ostream& out) const;
};

/// Sweep over z_min with the published detection-time formulas:
///   z_min_m,t_detect_dd_s,t_detect_ent_s,ratio
/// preceded by '#' metadata lines. Byte-identical for identical input.
std::string detect_time_csv(const ScenarioConfig& config);

/// NV3 parameters, n_DD in {3, 15, 63, 255}: one DD column per pulse count.
std::string detect_time_fig3_csv(const ScenarioConfig& config);

/// Writes the sweep to `output` (or config.output); returns the exit status.
int cmd_detect_time(const ScenarioConfig& config, const std::optional<std::filesystem::path>& output,
                    bool fig3, std::ostream& log);

enum class ValidationDepth { fast, full };
ValidationDepth parse_validation_depth(std::string_view text);

/// Runs every validation check. Exit status 0 iff no entry fails.
DiscrepancyReport run_validation(ValidationDepth depth, const ScenarioConfig& config);
int cmd_validate(ValidationDepth depth, const ScenarioConfig& config, std::ostream& out);

/// Table of the multi-start optimum for one variant.
std::string optimize_geometry_table(GeometryVariant variant, ClosedFormVariant f_ent_variant);
int cmd_optimize_geometry(GeometryVariant variant, ClosedFormVariant f_ent_variant,
                          std::ostream& out);

/// Published against re-derived prefactors.
DiscrepancyReport constants_report(const ScenarioConfig& config);
int cmd_constants(const ScenarioConfig& config, std::ostream& out);

}  // namespace nvghz
