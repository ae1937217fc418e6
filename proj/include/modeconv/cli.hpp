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

// Command layer behind the `modeconv` executable: run configuration,
// validation, report serialization (JSON / CSV) and parameter sweeps.
// Commands return their output as a string plus an exit code so they can be
// exercised in-process.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "modeconv/protocols.hpp"
#include "modeconv/rng.hpp"

namespace modeconv::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kSchema = "modeconv.report/1";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Invalid configuration; `flag` names the offending option.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string flag, const std::string& what)
      : std::runtime_error("--" + flag + ": " + what), flag_(std::move(flag)) {}
  const std::string& flag() const { return flag_; }

 private:
  std::string flag_;
};

struct RunConfig {
  std::string protocol;
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> m;
  std::optional<std::string> variant;
  std::optional<std::string> statistics;
  std::optional<double> phi;
  std::optional<double> chi;
  std::optional<std::string> mode;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::optional<std::string> output;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string output;
  std::string error;
};

inline const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names{
      "photon-baseline", "massive-baseline", "eraser",
      "single-aux",      "bec-single",       "bec-repeated"};
  return names;
}

inline void validate(const RunConfig& c) {
  const auto& names = protocol_names();
  if (std::find(names.begin(), names.end(), c.protocol) == names.end()) {
    throw UsageError("protocol", "unknown protocol '" + c.protocol + "'");
  }
  const bool bec = c.protocol == "bec-single" || c.protocol == "bec-repeated";
  const bool repeated = c.protocol == "bec-repeated";
  const bool single_aux = c.protocol == "single-aux";

  if (c.n && !bec) throw UsageError("n", "only valid for bec-single and bec-repeated");
  if (bec && !c.n) throw UsageError("n", "required for " + c.protocol);
  if (c.n && *c.n < 1) throw UsageError("n", "must be a positive integer");
  if (c.m && !repeated) throw UsageError("m", "only valid for bec-repeated");
  if (repeated && !c.m) throw UsageError("m", "required for bec-repeated");
  if (c.m && *c.m < 1) throw UsageError("m", "must be a positive integer");
  if (c.mode && !repeated) throw UsageError("mode", "only valid for bec-repeated");
  if (c.mode && *c.mode != "exact" && *c.mode != "brute-force") {
    throw UsageError("mode", "expected exact or brute-force");
  }
  if (c.variant && !single_aux) throw UsageError("variant", "only valid for single-aux");
  if (c.variant && *c.variant != "ideal" && *c.variant != "nonideal") {
    throw UsageError("variant", "expected ideal or nonideal");
  }
  if (c.statistics && !single_aux) {
    throw UsageError("statistics", "only valid for single-aux");
  }
  if (c.statistics && *c.statistics != "bosonic" && *c.statistics != "fermionic") {
    throw UsageError("statistics", "expected bosonic or fermionic");
  }
  const bool nonideal = single_aux && c.variant && *c.variant == "nonideal";
  if (c.phi && !nonideal) throw UsageError("phi", "only valid with --variant nonideal");
  if (c.chi && !nonideal) throw UsageError("chi", "only valid with --variant nonideal");
  if (c.format != "json" && c.format != "csv") {
    throw UsageError("format", "expected json or csv");
  }
}

inline ProtocolReport execute(const RunConfig& c) {
  if (c.protocol == "photon-baseline") return run_photon_baseline();
  if (c.protocol == "massive-baseline") return run_massive_baseline();
  if (c.protocol == "eraser") return run_eraser();
  if (c.protocol == "single-aux") {
    const auto variant = c.variant.value_or("ideal") == "ideal"
                             ? MergeVariant::ideal_biased
                             : MergeVariant::nonideal_degenerate;
    const auto stats = c.statistics.value_or("bosonic") == "bosonic"
                           ? Statistics::bosonic
                           : Statistics::fermionic;
    return run_single_aux(variant, stats, c.phi.value_or(std::numbers::pi / 4),
                          c.chi.value_or(0.0));
  }
  if (c.protocol == "bec-single") return run_bec_single(*c.n);
  const auto mode = c.mode.value_or("exact") == "exact" ? RepeatMode::exact_compact
                                                        : RepeatMode::brute_force;
  return run_bec_repeated(*c.n, *c.m, mode);
}

/// Sampled CHSH estimates per branch at that branch's optimal settings;
/// branch k uses derive_seed(seed, k).
inline std::vector<std::optional<ChshSample>> sample_branches(const ProtocolReport& r,
                                                              std::uint64_t shots,
                                                              std::uint64_t seed) {
  std::vector<std::optional<ChshSample>> out(r.branches.size());
  if (shots == 0) return out;
  for (std::size_t k = 0; k < r.branches.size(); ++k) {
    const auto& b = r.branches[k];
    out[k] = chsh_sample(b.dm, b.chsh.settings, shots, derive_seed(seed, k));
  }
  return out;
}

namespace detail {

// 15 significant digits; the JSON writer then emits the shortest form that
// round-trips, which never exceeds those digits.
inline double round15(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x == 0.0 ? 0.0 : x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  const double y = std::strtod(buf, nullptr);
  return y == 0.0 ? 0.0 : y;
}

inline std::string fmt9(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

inline nlohmann::ordered_json angles_json(const BlochAngles& a) {
  return {{"theta", round15(a.theta)}, {"lambda", round15(a.lambda)}};
}

inline nlohmann::ordered_json branch_json(const BranchReport& b,
                                          const std::optional<ChshSample>& sample) {
  nlohmann::ordered_json dm = nlohmann::ordered_json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < 4; ++j) {
      row.push_back({round15(b.dm.matrix()(i, j).real()),
                     round15(b.dm.matrix()(i, j).imag())});
    }
    dm.push_back(std::move(row));
  }
  const auto& s = b.chsh.settings;
  nlohmann::ordered_json j{
      {"label", b.label},
      {"probability", round15(b.probability)},
      {"concurrence", round15(b.concurrence)},
      {"chsh_max", round15(b.chsh.value)},
      {"bell_fidelity_plus", round15(b.bell_fidelity_plus)},
      {"bell_fidelity_minus", round15(b.bell_fidelity_minus)},
      {"coherence", {round15(b.coherence.real()), round15(b.coherence.imag())}},
      {"chsh_settings",
       {{"a", angles_json(s.a)},
        {"a_prime", angles_json(s.a_prime)},
        {"b", angles_json(s.b)},
        {"b_prime", angles_json(s.b_prime)}}},
      {"target_dm", std::move(dm)},
  };
  if (sample) {
    j["chsh_sample"] = {{"estimate", round15(sample->estimate)},
                        {"stderr", round15(sample->std_error)},
                        {"shots_per_setting", sample->shots_per_setting}};
  } else {
    j["chsh_sample"] = nullptr;
  }
  return j;
}

template <class T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json opt(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(round15(*v)) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  using detail::opt;
  return {{"protocol", c.protocol}, {"n", opt(c.n)},
          {"m", opt(c.m)},          {"variant", opt(c.variant)},
          {"statistics", opt(c.statistics)},
          {"phi", opt(c.phi)},      {"chi", opt(c.chi)},
          {"mode", opt(c.mode)},    {"shots", c.shots},
          {"seed", c.seed},         {"format", c.format}};
}

inline nlohmann::ordered_json report_json(const RunConfig& c, const ProtocolReport& r) {
  using detail::round15;
  const auto samples = sample_branches(r, c.shots, c.seed);
  nlohmann::ordered_json j;
  j["schema"] = kSchema;
  j["version"] = kVersion;
  j["protocol_id"] = std::string(to_string(r.id));
  j["config"] = config_json(c);

  nlohmann::ordered_json params;
  const auto& p = r.parameters;
  params["n"] = detail::opt(p.n);
  params["m"] = detail::opt(p.m);
  params["variant"] = p.variant ? nlohmann::ordered_json(
                                      *p.variant == MergeVariant::ideal_biased
                                          ? "ideal_biased"
                                          : "nonideal_degenerate")
                                : nlohmann::ordered_json(nullptr);
  params["statistics"] = p.statistics ? nlohmann::ordered_json(
                                            *p.statistics == Statistics::bosonic
                                                ? "bosonic"
                                                : "fermionic")
                                      : nlohmann::ordered_json(nullptr);
  params["phi"] = detail::opt(p.phi);
  params["chi"] = detail::opt(p.chi);
  params["mode"] = p.mode ? nlohmann::ordered_json(*p.mode == RepeatMode::exact_compact
                                                       ? "exact_compact"
                                                       : "brute_force")
                          : nlohmann::ordered_json(nullptr);
  params["shots"] = c.shots;
  params["seed"] = c.seed;
  j["parameters"] = std::move(params);

  j["requires_global_measurement"] = r.requires_global_measurement;
  j["total_atoms"] = detail::opt(r.total_atoms);
  j["primary_branch"] = r.primary().label;
  nlohmann::ordered_json branches = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < r.branches.size(); ++k) {
    branches.push_back(detail::branch_json(r.branches[k], samples[k]));
  }
  j["branches"] = std::move(branches);
  j["unconditioned"] = r.unconditioned
                           ? detail::branch_json(*r.unconditioned, std::nullopt)
                           : nlohmann::ordered_json(nullptr);
  if (r.parameters.n) {
    j["concurrence_asymptotic"] = round15(concurrence_asymptotic(*r.parameters.n));
  } else {
    j["concurrence_asymptotic"] = nullptr;
  }
  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  for (const auto& s : r.series) {
    series.push_back({{"round", s.round},
                      {"coherence", round15(s.coherence)},
                      {"concurrence", round15(s.concurrence)},
                      {"chsh_max", round15(s.chsh_max)},
                      {"bell_fidelity_plus", round15(s.bell_fidelity_plus)}});
  }
  j["series"] = std::move(series);
  if (r.fluctuations) {
    j["fluctuations"] = {{"classical_std", round15(r.fluctuations->classical_std)},
                         {"quantum_std", round15(r.fluctuations->quantum_std)}};
  } else {
    j["fluctuations"] = nullptr;
  }
  return j;
}

/// One row per branch; the unconditioned state is a separate, labelled row
/// with an empty probability so it cannot be mistaken for a branch.
inline std::string report_csv(const RunConfig& c, const ProtocolReport& r) {
  const auto samples = sample_branches(r, c.shots, c.seed);
  std::ostringstream out;
  out << "branch,probability,concurrence,chsh_max,bell_fidelity_plus,"
         "bell_fidelity_minus,chsh_sample,chsh_sample_stderr\r\n";
  auto row = [&](const BranchReport& b, const std::string& prob,
                 const std::optional<ChshSample>& s) {
    out << detail::csv_field(b.label) << ',' << prob << ','
        << detail::fmt9(b.concurrence) << ',' << detail::fmt9(b.chsh.value) << ','
        << detail::fmt9(b.bell_fidelity_plus) << ','
        << detail::fmt9(b.bell_fidelity_minus) << ','
        << (s ? detail::fmt9(s->estimate) : "") << ','
        << (s ? detail::fmt9(s->std_error) : "") << "\r\n";
  };
  for (std::size_t k = 0; k < r.branches.size(); ++k) {
    row(r.branches[k], detail::fmt9(r.branches[k].probability), samples[k]);
  }
  if (r.unconditioned && r.branches.size() > 1) {
    row(*r.unconditioned, "", std::nullopt);
  }
  return out.str();
}

inline CommandResult guarded(auto&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    return {kExitUsage, "", e.what()};
  } catch (const std::exception& e) {
    return {kExitFailure, "", e.what()};
  }
}

inline CommandResult cmd_run(const RunConfig& config) {
  return guarded([&]() -> CommandResult {
    validate(config);
    const auto report = execute(config);
    if (config.format == "csv") return {kExitOk, report_csv(config, report), ""};
    return {kExitOk, report_json(config, report).dump(2) + "\n", ""};
  });
}

inline std::string normalize_axis(std::string axis) {
  std::transform(axis.begin(), axis.end(), axis.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return axis;
}

/// One CSV row per value, in input order. Row k samples with
/// derive_seed(seed, k) unless the axis is the seed itself.
inline CommandResult cmd_sweep(const RunConfig& base, const std::string& axis_name,
                               const std::vector<std::int64_t>& values) {
  return guarded([&]() -> CommandResult {
    const std::string axis = normalize_axis(axis_name);
    if (axis != "n" && axis != "m" && axis != "shots" && axis != "seed") {
      throw UsageError("axis", "expected one of N, M, shots, seed");
    }
    if (values.empty()) throw UsageError("values", "at least one value required");

    std::vector<RunConfig> configs;
    for (std::size_t k = 0; k < values.size(); ++k) {
      RunConfig c = base;
      const auto v = values[k];
      c.seed = derive_seed(base.seed, k);
      if (axis == "n") c.n = v;
      if (axis == "m") c.m = v;
      if (axis == "shots" || axis == "seed") {
        if (v < 0) throw UsageError("values", "must be non-negative for " + axis_name);
        if (axis == "shots") c.shots = static_cast<std::uint64_t>(v);
        if (axis == "seed") c.seed = static_cast<std::uint64_t>(v);
      }
      validate(c);
      configs.push_back(std::move(c));
    }

    auto row_for = [](const RunConfig& c, std::int64_t value) {
      const auto r = execute(c);
      const auto& b = r.primary();
      std::ostringstream row;
      row << value << ',' << detail::fmt9(b.concurrence) << ','
          << (c.n ? detail::fmt9(concurrence_asymptotic(*c.n)) : "") << ','
          << detail::fmt9(b.chsh.value) << ',' << detail::fmt9(b.probability) << ',';
      if (r.fluctuations) {
        row << detail::fmt9(r.fluctuations->classical_std) << ','
            << detail::fmt9(r.fluctuations->quantum_std) << ',';
      } else {
        row << ",,";
      }
      if (c.shots > 0) {
        const auto s = chsh_sample(b.dm, b.chsh.settings, c.shots, c.seed);
        row << detail::fmt9(s.estimate) << ',' << detail::fmt9(s.std_error);
      } else {
        row << ',';
      }
      row << "\r\n";
      return row.str();
    };

    std::string out = axis_name +
                      ",concurrence_exact,concurrence_asymptotic,chsh_max,yield,"
                      "classical_std,quantum_std,chsh_sample,chsh_sample_stderr\r\n";
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < configs.size(); start += width) {
      const std::size_t stop = std::min(configs.size(), start + width);
      std::vector<std::future<std::string>> batch;
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back(std::async(std::launch::async, row_for, configs[k], values[k]));
      }
      for (auto& f : batch) out += f.get();
    }
    return {kExitOk, out, ""};
  });
}

}  // namespace modeconv::cli
