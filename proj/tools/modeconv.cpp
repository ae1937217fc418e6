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

// modeconv command-line front end.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modeconv/acceptance.hpp"
#include "modeconv/cli.hpp"

namespace {

const char* kProtocolHelp =
    "Protocols:\n"
    "  photon-baseline   flying photon split onto two sites, absorbed by two\n"
    "                    ground-state targets; maximally entangled pair\n"
    "  massive-baseline  same with a massive flying atom; particle-number\n"
    "                    superselection leaves the targets separable\n"
    "  eraser            massive atom measured in the (L +- R) basis; two\n"
    "                    entangled branches, needs a global measurement\n"
    "  single-aux        one auxiliary atom split over both sides, merged with\n"
    "                    the flying atom and counted locally; --variant\n"
    "                    ideal|nonideal, --statistics bosonic|fermionic,\n"
    "                    --phi/--chi for the nonideal merge\n"
    "  bec-single        auxiliary condensate of --n atoms split over both\n"
    "                    sides; no post-selection\n"
    "  bec-repeated      the condensate reused for --m rounds; --mode\n"
    "                    exact|brute-force\n";

struct Flags {
  modeconv::cli::RunConfig config;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::string variant;
  std::string statistics;
  double phi = 0.0;
  double chi = 0.0;
  std::string mode;
  std::string output;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("protocol", f.config.protocol, "Protocol name")->required();
  cmd->add_option("--n", f.n, "Atoms in the auxiliary condensate");
  cmd->add_option("--m", f.m, "Rounds of condensate reuse");
  cmd->add_option("--variant", f.variant, "Merge variant: ideal or nonideal");
  cmd->add_option("--statistics", f.statistics, "Particle statistics: bosonic or fermionic");
  cmd->add_option("--phi", f.phi, "Nonideal merge mixing angle");
  cmd->add_option("--chi", f.chi, "Nonideal merge relative phase");
  cmd->add_option("--mode", f.mode, "Repeated-run mode: exact or brute-force");
  cmd->add_option("--shots", f.config.shots, "CHSH sampling shots (0 = exact only)");
  cmd->add_option("--seed", f.config.seed, "Base RNG seed");
  cmd->add_option("--format", f.config.format, "Output format: json or csv");
  cmd->add_option("--output", f.output, "Output file (default standard output)");
}

modeconv::cli::RunConfig finish(const CLI::App* cmd, Flags& f) {
  auto& c = f.config;
  if (cmd->count("--n")) c.n = f.n;
  if (cmd->count("--m")) c.m = f.m;
  if (cmd->count("--variant")) c.variant = f.variant;
  if (cmd->count("--statistics")) c.statistics = f.statistics;
  if (cmd->count("--phi")) c.phi = f.phi;
  if (cmd->count("--chi")) c.chi = f.chi;
  if (cmd->count("--mode")) c.mode = f.mode;
  if (cmd->count("--output")) c.output = f.output;
  return c;
}

int emit(const modeconv::cli::CommandResult& r, const std::optional<std::string>& path) {
  if (!r.error.empty()) std::cerr << "modeconv: " << r.error << "\n";
  if (r.output.empty()) return r.exit_code;
  if (path) {
    std::ofstream out(*path, std::ios::binary);
    if (!out) {
      std::cerr << "modeconv: --output: cannot open " << *path << "\n";
      return modeconv::cli::kExitFailure;
    }
    out << r.output;
  } else {
    std::fwrite(r.output.data(), 1, r.output.size(), stdout);
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local conversion of single-particle entanglement into two-qubit "
               "entanglement"};
  app.footer(kProtocolHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", modeconv::cli::kVersion);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "Run one protocol and print its report");
  add_run_flags(run, run_flags);

  Flags sweep_flags;
  std::string axis;
  std::vector<std::int64_t> values;
  auto* sweep = app.add_subcommand("sweep", "Run a protocol over a parameter axis (CSV)");
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--axis", axis, "Swept parameter: N, M, shots or seed")->required();
  sweep->add_option("--values", values, "Comma-separated values")
      ->required()
      ->delimiter(',');

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : modeconv::cli::kExitUsage;
  }

  try {
    if (*run) {
      const auto c = finish(run, run_flags);
      return emit(modeconv::cli::cmd_run(c), c.output);
    }
    if (*sweep) {
      const auto c = finish(sweep, sweep_flags);
      return emit(modeconv::cli::cmd_sweep(c, axis, values), c.output);
    }
    if (*verify) return emit(modeconv::cli::cmd_verify(), std::nullopt);
  } catch (const std::exception& e) {
    std::cerr << "modeconv: " << e.what() << "\n";
    return modeconv::cli::kExitFailure;
  }
  return modeconv::cli::kExitUsage;
}
