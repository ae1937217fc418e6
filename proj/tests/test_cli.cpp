// Copyright 2026 The modeconv Authors
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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "modeconv/cli.hpp"

using namespace modeconv;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::ContainsSubstring;
using json = nlohmann::json;

namespace {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF rows.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
    } else {
      field += c;
    }
  }
  REQUIRE_FALSE(quoted);
  REQUIRE(row.empty());
  return rows;
}

cli::RunConfig config(std::string protocol) {
  cli::RunConfig c;
  c.protocol = std::move(protocol);
  return c;
}

json run_json(const cli::RunConfig& c) {
  const auto r = cli::cmd_run(c);
  REQUIRE(r.exit_code == 0);
  return json::parse(r.output);
}

std::vector<double> column(const std::vector<std::vector<std::string>>& rows, int col) {
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) out.push_back(std::stod(rows[i][col]));
  return out;
}

}  // namespace

TEST_CASE("run reports carry the stable schema") {
  const auto j = run_json(config("massive-baseline"));
  CHECK(j["protocol_id"] == "massive_baseline");
  CHECK(j["version"] == cli::kVersion);
  CHECK(j["schema"] == cli::kSchema);
  CHECK(j["config"]["protocol"] == "massive-baseline");
  REQUIRE(j["branches"].size() == 1);
  const auto& b = j["branches"][0];
  for (const char* key : {"label", "probability", "concurrence", "chsh_max",
                          "bell_fidelity_plus"}) {
    CHECK(b.contains(key));
  }
  CHECK(b["concurrence"].get<double>() == 0.0);
  CHECK_THAT(b["chsh_max"].get<double>(), WithinAbs(2.0, 1e-9));
  CHECK(j.contains("series"));
  CHECK(j.contains("fluctuations"));
  CHECK(j.contains("parameters"));
}

TEST_CASE("documented run examples") {
  auto c = config("bec-single");
  c.n = 1;
  CHECK(run_json(c)["branches"][0]["concurrence"].get<double>() == 0.5);

  auto f = config("single-aux");
  f.variant = "ideal";
  f.statistics = "fermionic";
  const auto j = run_json(f);
  const auto label = j["primary_branch"].get<std::string>();
  CHECK(label == "(1,1)");
  for (const auto& b : j["branches"]) {
    if (b["label"] == label) CHECK_THAT(b["concurrence"].get<double>(), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("JSON round-trips through a generic parser") {
  auto c = config("bec-repeated");
  c.n = 5;
  c.m = 4;
  c.shots = 2000;
  c.seed = 3;
  const auto text = cli::cmd_run(c).output;
  const auto parsed = nlohmann::ordered_json::parse(text);
  CHECK(parsed.dump(2) + "\n" == text);
  CHECK(parsed["series"].size() == 4);
  CHECK(parsed["branches"][0]["chsh_sample"]["shots_per_setting"] == 500);
}

TEST_CASE("JSON numbers carry at most 15 significant digits") {
  auto c = config("bec-single");
  c.n = 7;
  const double value = run_json(c)["branches"][0]["concurrence"].get<double>();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", 2 * coherence_series(7));
  CHECK(value == std::stod(buf));
}

TEST_CASE("CSV run output quotes branch labels") {
  auto c = config("single-aux");
  c.format = "csv";
  const auto rows = parse_csv(cli::cmd_run(c).output);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0][0] == "branch");
  for (const auto& row : rows) CHECK(row.size() == 8);
  CHECK(rows[1][0] == "(0,2)");
  CHECK(rows[4][0] == "unconditioned");
  CHECK(rows[4][1].empty());
}

TEST_CASE("invalid configurations exit 2 naming the flag") {
  auto expect_usage = [](const cli::RunConfig& c, const std::string& flag) {
    const auto r = cli::cmd_run(c);
    CHECK(r.exit_code == 2);
    CHECK_THAT(r.error, ContainsSubstring("--" + flag));
  };
  expect_usage(config("teleport"), "protocol");
  expect_usage(config("bec-single"), "n");
  auto c = config("bec-single");
  c.n = 3;
  c.m = 2;
  expect_usage(c, "m");
  c = config("photon-baseline");
  c.format = "xml";
  expect_usage(c, "format");
  c = config("single-aux");
  c.phi = 0.2;
  expect_usage(c, "phi");
  c = config("bec-repeated");
  c.n = 0;
  c.m = 1;
  expect_usage(c, "n");
  c = config("eraser");
  c.statistics = "fermionic";
  expect_usage(c, "statistics");
}

TEST_CASE("internal failures exit 1") {
  auto c = config("bec-repeated");
  c.n = 100;
  c.m = 20;
  c.mode = "brute-force";
  const auto r = cli::cmd_run(c);
  CHECK(r.exit_code == 1);
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("sweep over N reproduces the exact series") {
  auto c = config("bec-single");
  const auto r = cli::cmd_sweep(c, "N", {1, 2, 4, 8});
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.output);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"N", "concurrence_exact", "concurrence_asymptotic",
                                            "chsh_max", "yield", "classical_std",
                                            "quantum_std", "chsh_sample",
                                            "chsh_sample_stderr"});
  const auto conc = column(rows, 1);
  CHECK(conc[0] == 0.5);
  CHECK_THAT(conc[1], WithinAbs(0.707106781, 1e-9));
  CHECK_THAT(conc[2], WithinAbs(0.862372436, 1e-9));
  CHECK_THAT(conc[3], WithinAbs(0.937522967, 1e-9));
  CHECK(column(rows, 0) == std::vector<double>{1, 2, 4, 8});
  CHECK(rows[1][5].empty());
  CHECK(rows[1][7].empty());
}

TEST_CASE("sweep over rounds keeps the concurrence fixed") {
  auto c = config("bec-repeated");
  c.n = 4;
  const auto rows = parse_csv(cli::cmd_sweep(c, "M", {1, 5, 25}).output);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][1] == rows[2][1]);
  CHECK(rows[2][1] == rows[3][1]);
  const auto classical = column(rows, 5);
  CHECK_THAT(classical[2], WithinAbs(std::sqrt(29 / 4.0), 1e-8));
}

TEST_CASE("sweep over seeds changes only the sampled columns") {
  auto c = config("photon-baseline");
  c.shots = 4000;
  const auto rows = parse_csv(cli::cmd_sweep(c, "seed", {10, 11}).output);
  REQUIRE(rows.size() == 3);
  for (int col = 1; col <= 6; ++col) CHECK(rows[1][col] == rows[2][col]);
  CHECK(rows[1][7] != rows[2][7]);
}

TEST_CASE("sweep seeds derive from the base seed per row") {
  auto c = config("photon-baseline");
  c.seed = 42;
  const auto rows = parse_csv(cli::cmd_sweep(c, "shots", {4000, 4000}).output);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][7] != rows[2][7]);
  const auto& b = run_photon_baseline().primary();
  const auto s = chsh_sample(b.dm, b.chsh.settings, 4000, derive_seed(42, 1));
  CHECK_THAT(std::stod(rows[2][7]), WithinAbs(s.estimate, 1e-8));
}

TEST_CASE("sweep validation") {
  auto c = config("bec-single");
  CHECK(cli::cmd_sweep(c, "temperature", {1}).exit_code == 2);
  CHECK(cli::cmd_sweep(c, "M", {1}).exit_code == 2);
  CHECK(cli::cmd_sweep(c, "N", {}).exit_code == 2);
  CHECK(cli::cmd_sweep(c, "N", {0}).exit_code == 2);
}

TEST_CASE("outputs are byte-identical across executions") {
  auto c = config("bec-repeated");
  c.n = 3;
  c.m = 3;
  c.shots = 1000;
  c.seed = 8;
  CHECK(cli::cmd_run(c).output == cli::cmd_run(c).output);
  c.format = "csv";
  CHECK(cli::cmd_run(c).output == cli::cmd_run(c).output);
  CHECK(cli::cmd_sweep(c, "N", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}).output ==
        cli::cmd_sweep(c, "N", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}).output);
}
