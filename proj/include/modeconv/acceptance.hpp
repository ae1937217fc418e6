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

// Acceptance suite shared by the `acceptance` test binary and
// `modeconv verify`. Each criterion returns a pass flag, a short detail line
// and its wall-clock time.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "modeconv/cli.hpp"

namespace modeconv::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Median wall time of `reps` calls after one untimed warm-up call.
inline double median_seconds(const std::function<void()>& f, int reps = 9) {
  f();
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    t.push_back(seconds_since(t0));
  }
  std::nth_element(t.begin(), t.begin() + reps / 2, t.end());
  return t[reps / 2];
}

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

inline double max_abs_diff(const TwoQubitDM& a, const TwoQubitDM& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

inline const BranchReport* find_branch(const ProtocolReport& r, const std::string& label) {
  for (const auto& b : r.branches) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

/// Random two-qubit state of random rank from a Ginibre matrix.
inline TwoQubitDM random_dm(std::mt19937_64& gen) {
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> rank_dist(1, 4);
  const int rank = rank_dist(gen);
  Eigen::MatrixXcd g(4, rank);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < rank; ++j) g(i, j) = cplx{gauss(gen), gauss(gen)};
  }
  Eigen::Matrix4cd rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return TwoQubitDM(rho);
}

}  // namespace detail

inline CriterionResult criterion_massive_baseline() {
  CriterionResult c{1, "baseline separability", false, {}, 0.0};
  const auto r = run_massive_baseline();
  Eigen::Matrix4cd expect = Eigen::Matrix4cd::Zero();
  expect(1, 1) = expect(2, 2) = 0.5;
  const auto& b = r.primary();
  const double dm_err = (b.dm.matrix() - expect).cwiseAbs().maxCoeff();
  const double c_err = std::abs(b.concurrence);
  const double s_err = std::abs(b.chsh.value - 2.0);
  c.seconds = detail::median_seconds([] { (void)run_massive_baseline(); });
  c.passed = dm_err <= 1e-12 && c_err <= 1e-12 && s_err <= 1e-9 && c.seconds < 1e-3;
  c.detail = "dm err " + detail::sci(dm_err) + ", C " + detail::sci(b.concurrence) +
             ", S " + detail::sci(b.chsh.value);
  return c;
}

inline CriterionResult criterion_photon_baseline() {
  CriterionResult c{2, "photon contrast", false, {}, 0.0};
  const auto r = run_photon_baseline();
  const auto& b = r.primary();
  const double c_err = std::abs(b.concurrence - 1.0);
  const double s_err = std::abs(b.chsh.value - 2.0 * std::numbers::sqrt2);
  c.seconds = detail::median_seconds([] { (void)run_photon_baseline(); });
  c.passed = c_err <= 1e-12 && s_err <= 1e-12 && c.seconds < 1e-3;
  c.detail = "C err " + detail::sci(c_err) + ", S err " + detail::sci(s_err);
  return c;
}

inline CriterionResult criterion_eraser() {
  CriterionResult c{3, "eraser branches", false, {}, 0.0};
  const auto r = run_eraser();
  const auto* plus = detail::find_branch(r, "+");
  const auto* minus = detail::find_branch(r, "-");
  if (!plus || !minus || !r.unconditioned) {
    c.detail = "missing branch";
    return c;
  }
  const double f_err = std::max(std::abs(plus->bell_fidelity_plus - 1.0),
                                std::abs(minus->bell_fidelity_minus - 1.0));
  const double p_err = std::max(std::abs(plus->probability - 0.5),
                                std::abs(minus->probability - 0.5));
  const double c_mix = std::abs(r.unconditioned->concurrence);
  c.seconds = detail::median_seconds([] { (void)run_eraser(); });
  c.passed = f_err <= 1e-12 && p_err <= 1e-12 && c_mix <= 1e-12 && c.seconds < 1e-3;
  c.detail = "fidelity err " + detail::sci(f_err) + ", p err " + detail::sci(p_err) +
             ", mixture C " + detail::sci(c_mix);
  return c;
}

inline CriterionResult criterion_single_aux() {
  CriterionResult c{4, "single auxiliary atom", false, {}, 0.0};
  const auto t0 = detail::Clock::now();
  const auto bos = run_single_aux(MergeVariant::ideal_biased, Statistics::bosonic);
  const auto fer = run_single_aux(MergeVariant::ideal_biased, Statistics::fermionic);
  const auto* b11 = detail::find_branch(bos, "(1,1)");
  const auto* f11 = detail::find_branch(fer, "(1,1)");
  const auto* b20 = detail::find_branch(bos, "(2,0)");
  const auto* b02 = detail::find_branch(bos, "(0,2)");
  if (!b11 || !f11 || !b20 || !b02) {
    c.detail = "missing branch";
    return c;
  }
  const double yield_err = std::abs(b11->probability - 0.5);
  const double c_err = std::abs(b11->concurrence - 1.0);
  const double same_side = std::max(std::abs(b20->concurrence), std::abs(b02->concurrence));
  const double stats_err = detail::max_abs_diff(b11->dm, f11->dm);
  double nonideal = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double phi = i * std::numbers::pi / 8.0;
      const double chi = j * 2.0 * std::numbers::pi / 5.0;
      const auto r = run_single_aux(MergeVariant::nonideal_degenerate,
                                    Statistics::bosonic, phi, chi);
      const auto* p = detail::find_branch(r, "(1,1)");
      nonideal = std::max(nonideal, p ? std::abs(p->concurrence) : 1.0);
    }
  }
  c.seconds = detail::seconds_since(t0);
  c.passed = yield_err <= 1e-12 && c_err <= 1e-12 && same_side <= 1e-12 &&
             stats_err <= 1e-12 && nonideal <= 1e-12 && c.seconds < 1e-2;
  c.detail = "yield " + detail::sci(b11->probability) + ", C err " + detail::sci(c_err) +
             ", boson/fermion diff " + detail::sci(stats_err) + ", nonideal max C " +
             detail::sci(nonideal);
  return c;
}

inline CriterionResult criterion_bec_single() {
  CriterionResult c{5, "BEC single run", false, {}, 0.0};
  const auto t0 = detail::Clock::now();
  const double c1 = run_bec_single(1).primary().concurrence;
  double worst = 0.0;
  for (std::int64_t n = 1; n <= 12; ++n) {
    const double brute = run_bec_single(n).primary().concurrence;
    worst = std::max(worst, std::abs(brute - 2.0 * coherence_series(n)));
  }
  c.seconds = detail::seconds_since(t0);
  const double anchor = std::abs(c1 - 0.5);
  c.passed = anchor <= 1e-15 && worst <= 1e-12 && c.seconds < 1.0;
  c.detail = "C(1) err " + detail::sci(anchor) + ", series vs state-vector " +
             detail::sci(worst);
  return c;
}

inline CriterionResult criterion_asymptotic() {
  CriterionResult c{6, "large-N asymptotics", false, {}, 0.0};
  bool ok = true;
  double prev = INFINITY;
  std::ostringstream gaps;
  for (std::int64_t n : {10, 100, 1000, 10000}) {
    const double gap = std::abs(2.0 * coherence_series(n) - concurrence_asymptotic(n));
    ok = ok && gap < std::pow(static_cast<double>(n), -1.5) && gap < prev;
    prev = gap;
    gaps << (n == 10 ? "" : " ") << detail::sci(gap);
  }
  const auto t0 = detail::Clock::now();
  const double big = 2.0 * coherence_series(1000000);
  c.seconds = detail::seconds_since(t0);
  ok = ok && std::isfinite(big) && c.seconds < 1.0;
  c.passed = ok;
  c.detail = "gaps " + gaps.str() + ", C(1e6) " + detail::sci(1.0 - big) + " below 1";
  return c;
}

inline CriterionResult criterion_repeated() {
  CriterionResult c{7, "repeated reuse", false, {}, 0.0};
  const auto t0 = detail::Clock::now();
  double drift = 0.0;
  for (auto [n, m] : {std::pair{1, 50}, std::pair{4, 100}, std::pair{16, 1000}}) {
    const auto r = run_bec_repeated(n, m, RepeatMode::exact_compact);
    for (const auto& s : r.series) {
      drift = std::max(drift, std::abs(s.concurrence - r.series.front().concurrence));
    }
  }
  double oracle = 0.0;
  for (auto [n, m] : {std::pair{1, 3}, std::pair{2, 3}, std::pair{3, 2}}) {
    const auto e = run_bec_repeated(n, m, RepeatMode::exact_compact);
    const auto b = run_bec_repeated(n, m, RepeatMode::brute_force);
    if (e.series.size() != b.series.size()) {
      c.detail = "series length mismatch";
      return c;
    }
    for (std::size_t k = 0; k < e.series.size(); ++k) {
      const auto& x = e.series[k];
      const auto& y = b.series[k];
      oracle = std::max({oracle, std::abs(x.coherence - y.coherence),
                         std::abs(x.concurrence - y.concurrence),
                         std::abs(x.chsh_max - y.chsh_max),
                         std::abs(x.bell_fidelity_plus - y.bell_fidelity_plus)});
    }
  }
  c.seconds = detail::seconds_since(t0);
  c.passed = drift <= 1e-12 && oracle <= 1e-10 && c.seconds < 10.0;
  c.detail = "round drift " + detail::sci(drift) + ", brute-force diff " +
             detail::sci(oracle);
  return c;
}

inline CriterionResult criterion_fluctuations() {
  CriterionResult c{8, "fluctuation crossover", false, {}, 0.0};
  const auto t0 = detail::Clock::now();
  bool ordering = true;
  double excess_err = 0.0;
  auto mix = ShiftMixture::fresh(100);
  for (int m = 0; m <= 400; ++m) {
    const auto f = fluctuation_report(mix);
    ordering = ordering && ((f.classical_std > f.quantum_std) == (m > 0));
    const double excess =
        f.classical_std * f.classical_std - f.quantum_std * f.quantum_std;
    excess_err = std::max(excess_err, std::abs(excess - m / 4.0));
    mix = advance_mixture(mix);
  }
  auto small = ShiftMixture::fresh(4);
  for (int m = 0; m < 20; ++m) small = advance_mixture(small);
  const auto dist = left_count_distribution(small);
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    mean += dist[k] * static_cast<double>(k);
    second += dist[k] * static_cast<double>(k) * static_cast<double>(k);
  }
  const double direct = std::sqrt(second - mean * mean);
  const double reported = fluctuation_report(small).classical_std;
  const double protocol =
      run_bec_repeated(4, 20, RepeatMode::exact_compact).fluctuations->classical_std;
  const double closed = std::sqrt((4.0 + 20.0) / 4.0);
  const double conv_err =
      std::max({std::abs(direct - closed), std::abs(reported - closed),
                std::abs(protocol - closed)});
  c.seconds = detail::seconds_since(t0);
  c.passed = ordering && excess_err <= 1e-10 && conv_err <= 1e-10 && c.seconds < 1.0;
  c.detail = std::string(ordering ? "ordering ok" : "ordering broken") +
             ", variance excess err " + detail::sci(excess_err) +
             ", convolution err " + detail::sci(conv_err);
  return c;
}

inline CriterionResult criterion_chsh() {
  CriterionResult c{9, "CHSH machinery", false, {}, 0.0};
  const auto t0 = detail::Clock::now();
  std::mt19937_64 gen(20260101);
  double closed_vs_search = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto rho = detail::random_dm(gen);
    closed_vs_search =
        std::max(closed_vs_search, std::abs(chsh_max(rho).value - chsh_max_search(rho)));
  }
  double worst_z = 0.0;
  const auto bell = run_photon_baseline().primary();
  const auto bec = run_bec_single(10).primary();
  std::uint64_t seed = 7;
  for (const auto* b : {&bell, &bec}) {
    const double exact = chsh_value(b->dm, b->chsh.settings);
    const auto s = chsh_sample(b->dm, b->chsh.settings, 1000000, seed++);
    worst_z = std::max(worst_z, std::abs(s.estimate - exact) / s.std_error);
  }
  c.seconds = detail::seconds_since(t0);
  c.passed = closed_vs_search <= 1e-6 && worst_z <= 5.0 && c.seconds < 30.0;
  c.detail = "closed vs search " + detail::sci(closed_vs_search) +
             ", worst sample deviation " + detail::sci(worst_z) + " stderr";
  return c;
}

inline CriterionResult criterion_determinism() {
  CriterionResult c{10, "determinism", false, {}, 0.0};
  const auto t0 = detail::Clock::now();
  std::vector<cli::RunConfig> runs;
  for (const auto& p : cli::protocol_names()) {
    cli::RunConfig r;
    r.protocol = p;
    if (p == "bec-single" || p == "bec-repeated") r.n = 6;
    if (p == "bec-repeated") r.m = 4;
    r.shots = 4000;
    r.seed = 12345;
    runs.push_back(r);
    r.format = "csv";
    runs.push_back(r);
  }
  cli::RunConfig nonideal;
  nonideal.protocol = "single-aux";
  nonideal.variant = "nonideal";
  nonideal.phi = 0.3;
  nonideal.chi = 1.1;
  nonideal.shots = 1000;
  runs.push_back(nonideal);

  bool ok = true;
  int compared = 0;
  for (const auto& r : runs) {
    const auto a = cli::cmd_run(r);
    const auto b = cli::cmd_run(r);
    ok = ok && a.exit_code == 0 && a.output == b.output && !a.output.empty();
    ++compared;
  }
  cli::RunConfig sweep_base;
  sweep_base.protocol = "bec-repeated";
  sweep_base.n = 4;
  sweep_base.m = 3;
  sweep_base.shots = 4000;
  sweep_base.seed = 99;
  for (const auto& [axis, values] :
       std::vector<std::pair<std::string, std::vector<std::int64_t>>>{
           {"N", {1, 2, 4, 8}}, {"M", {1, 5, 25}}, {"seed", {1, 2}}, {"shots", {0, 400}}}) {
    const auto a = cli::cmd_sweep(sweep_base, axis, values);
    const auto b = cli::cmd_sweep(sweep_base, axis, values);
    ok = ok && a.exit_code == 0 && a.output == b.output && !a.output.empty();
    ++compared;
  }
  c.seconds = detail::seconds_since(t0);
  c.passed = ok;
  c.detail = std::to_string(compared) + " command pairs compared byte for byte";
  return c;
}

inline std::vector<CriterionResult> run_all() {
  return {criterion_massive_baseline(), criterion_photon_baseline(), criterion_eraser(),
          criterion_single_aux(),       criterion_bec_single(),      criterion_asymptotic(),
          criterion_repeated(),         criterion_fluctuations(),    criterion_chsh(),
          criterion_determinism()};
}

inline std::string format_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f ms", r.seconds * 1e3);
  return std::string(r.passed ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " +
         r.name + ": " + r.detail + " (" + buf + ")";
}

}  // namespace modeconv::acceptance

namespace modeconv::cli {

/// Runs the acceptance suite; exit 0 iff every criterion passes.
inline CommandResult cmd_verify() {
  return guarded([]() -> CommandResult {
    const auto results = acceptance::run_all();
    std::string out;
    std::string failed;
    for (const auto& r : results) {
      out += acceptance::format_line(r) + "\n";
      if (!r.passed) failed += (failed.empty() ? "" : ", ") + std::to_string(r.id);
    }
    if (failed.empty()) return {kExitOk, out + "all criteria passed\n", ""};
    return {kExitFailure, out, "failed criteria: " + failed};
  });
}

}  // namespace modeconv::cli
