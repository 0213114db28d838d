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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "nvghz/cli_reports.hpp"
#include "nvghz/errors.hpp"

using namespace nvghz;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> out;
  for (auto& line : lines_of(csv)) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

bool mentions(const ConfigError& e, std::string_view needle) {
  for (const auto& issue : e.issues()) {
    if (issue.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("cli_reports") {

TEST_CASE("empty config gives the NV1 defaults") {
  const auto cfg = parse_config("{}");
  CHECK(cfg.preset == "NV1");
  CHECK(cfg.t2_echo_s == presets::NV1.t2_echo);
  CHECK(cfg.rho_nv() == doctest::Approx(presets::NV1.rho_nv));
  CHECK(cfg.gamma_convention == GammaConvention::cyclic);
  CHECK(cfg.n_dd == 63);
  CHECK(cfg.z_min_sweep.values().size() == 50);
}

TEST_CASE("presets expand") {
  const auto cfg = parse_config(R"({"preset": "NV3", "M": 2e6, "n_dd": 15})");
  CHECK(cfg.t2_echo_s == presets::NV3.t2_echo);
  CHECK(cfg.rho_nv() == doctest::Approx(presets::NV3.rho_nv));
  CHECK(cfg.nuclear_count == 2e6);
  CHECK(cfg.n_dd == 15);
}

TEST_CASE("custom preset requires its parameters") {
  const auto cfg = parse_config(
      R"({"preset": "custom", "t2_echo_s": 1e-4, "rho_nv_per_cm3": 5e17,
          "gamma_convention": "angular", "omega_target_rad_per_s": 1e6})");
  CHECK(cfg.t2_echo_s == 1e-4);
  CHECK(cfg.rho_nv() == doctest::Approx(5e23));
  CHECK(cfg.scenario().omega_target() == 1e6);
  CHECK(cfg.scenario().gamma_convention() == GammaConvention::angular);
  try {
    parse_config(R"({"preset": "custom"})", "x.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() >= 2);
    CHECK(mentions(e, "x.json"));
    CHECK(mentions(e, "t2_echo_s"));
    CHECK(mentions(e, "rho_nv_per_cm3"));
  }
}

TEST_CASE("config errors are collected") {
  try {
    parse_config(R"({"preset": "NV1", "t2_echo_s": 1e-4, "n_dd": 4, "colour": "red",
                     "z_min_sweep": {"start_m": 1e-6, "stop_m": 1e-7, "spacing": "cubic"}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "colour"));
    CHECK(mentions(e, "n_dd"));
    CHECK(mentions(e, "t2_echo_s"));
    CHECK(mentions(e, "spacing"));
    CHECK(mentions(e, "stop_m"));
  }
  CHECK_THROWS_AS(parse_config(R"({"n_dd": "seven"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"preset": "NV4"})"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_config("{\n  \"preset\": \"NV1\",\n  \"M\": ,\n}", "bad.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "bad.json:3:"));
  }
  CHECK_THROWS_AS(load_config("/nonexistent/nvghz.json"), ConfigError);
}

TEST_CASE("sweep grid") {
  ZSweep lin{1e-7, 1e-6, 10, SweepSpacing::linear};
  const auto v = lin.values();
  CHECK(v.front() == 1e-7);
  CHECK(v.back() == 1e-6);
  CHECK(v[1] - v[0] == doctest::Approx(1e-7));
  ZSweep lg{1e-7, 1e-5, 3, SweepSpacing::log};
  CHECK(lg.values()[1] == doctest::Approx(1e-6));
}

TEST_CASE("detect-time CSV") {
  auto cfg = parse_config(R"({"z_min_sweep": {"start_m": 1e-7, "stop_m": 1e-6, "points": 2}})");
  const auto csv = detect_time_csv(cfg);
  CHECK(csv == detect_time_csv(cfg));
  const auto rows = data_rows(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "z_min_m,t_detect_dd_s,t_detect_ent_s,ratio");
  double z, dd, ent, ratio;
  REQUIRE(std::sscanf(rows[2].c_str(), "%lf,%lf,%lf,%lf", &z, &dd, &ent, &ratio) == 4);
  CHECK(z == 1e-6);
  CHECK(ent == doctest::Approx(62.2658051023501).epsilon(1e-9));
  CHECK(dd == doctest::Approx(950900096.24073).epsilon(1e-9));
  CHECK(ratio == doctest::Approx(15271626.1305491).epsilon(1e-9));
  CHECK(csv.find("# preset=NV1") != std::string::npos);

  const auto fig3 = detect_time_fig3_csv(cfg);
  CHECK(data_rows(fig3).at(0) ==
        "z_min_m,t_detect_dd_n3_s,t_detect_dd_n15_s,t_detect_dd_n63_s,t_detect_dd_n255_s,"
        "t_detect_ent_s");
}

TEST_CASE("detect-time writes its file") {
  auto cfg = parse_config(R"({"z_min_sweep": {"points": 4}})");
  const auto path = std::filesystem::temp_directory_path() / "nvghz_unit_detect.csv";
  std::ostringstream log;
  CHECK(cmd_detect_time(cfg, path, false, log) == 0);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == detect_time_csv(cfg));
  std::filesystem::remove(path);
}

TEST_CASE("discrepancy report") {
  DiscrepancyReport r;
  r.add("a", 2.0, 2.2, Verdict::pass);
  r.add("b", 0.0, 1e-9, Verdict::informational, "note");
  CHECK(r.all_pass());
  CHECK(r.find("a")->rel_dev == doctest::Approx(0.1));
  CHECK(r.find("b")->rel_dev == 1e-9);
  CHECK(r.find("c") == nullptr);
  r.add("c", 1.0, 3.0, Verdict::fail);
  CHECK_FALSE(r.all_pass());
  CHECK(r.count(Verdict::fail) == 1);
  std::ostringstream out;
  r.write(out);
  CHECK(out.str().find("FAIL") != std::string::npos);
  CHECK(out.str().find("# 1 pass, 1 fail, 1 informational") != std::string::npos);
}

TEST_CASE("fast validation") {
  const auto report = run_validation(ValidationDepth::fast, parse_config("{}"));
  for (const char* name :
       {"f_sep_closed_vs_quadrature", "f_ent_corrected_vs_quadrature", "channel_trace_preserving",
        "channel_positive", "nuclear_state_independence", "pi_pulse_involution",
        "t_detect_ent_nv1_1um", "geometry_sep_r", "geometry_ent_z"}) {
    CAPTURE(name);
    const auto* e = report.find(name);
    REQUIRE(e != nullptr);
    CHECK(e->verdict == Verdict::pass);
  }
  // Fast depth skips the Monte-Carlo comparison.
  CHECK(report.find("monte_carlo_gamma_sep") == nullptr);
  const auto* order = report.find("oracle_order_dd_L1_M1");
  REQUIRE(order != nullptr);
  CHECK(order->published == 8.0);
  CHECK(parse_validation_depth("full") == ValidationDepth::full);
  CHECK_THROWS_AS(parse_validation_depth("deep"), DomainError);
}

TEST_CASE("geometry table and constants") {
  const auto table = optimize_geometry_table(GeometryVariant::sep, ClosedFormVariant::corrected);
  CHECK(lines_of(table).at(0) ==
        "variant,shape,r_tilde,z_tilde,objective,iterations,multimodal,at_boundary");
  CHECK(table.find("sep,corrected,1.160") != std::string::npos);

  const auto report = constants_report(parse_config("{}"));
  REQUIRE(report.find("c_dd") != nullptr);
  CHECK(report.find("c_dd")->rel_dev < 0.01);
  CHECK(report.all_pass());
}

}  // TEST_SUITE
