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

// End-to-end conversion experiments. Each run is a pure function of its
// parameters and returns a ProtocolReport with one entry per post-selection
// branch (branch probabilities sum to 1).

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modeconv/bec.hpp"
#include "modeconv/fock.hpp"
#include "modeconv/metrics.hpp"
#include "modeconv/mode_ops.hpp"

namespace modeconv {

enum class ProtocolId {
  photon_baseline,
  massive_baseline,
  eraser,
  single_aux_ideal,
  single_aux_nonideal,
  bec_single,
  bec_repeated,
};

constexpr std::string_view to_string(ProtocolId id) {
  switch (id) {
    case ProtocolId::photon_baseline: return "photon_baseline";
    case ProtocolId::massive_baseline: return "massive_baseline";
    case ProtocolId::eraser: return "eraser";
    case ProtocolId::single_aux_ideal: return "single_aux_ideal";
    case ProtocolId::single_aux_nonideal: return "single_aux_nonideal";
    case ProtocolId::bec_single: return "bec_single";
    case ProtocolId::bec_repeated: return "bec_repeated";
  }
  return "unknown";
}

enum class RepeatMode { exact_compact, brute_force };

struct BranchReport {
  std::string label;
  double probability;
  TwoQubitDM dm;
  double concurrence;
  ChshResult chsh;
  double bell_fidelity_plus;
  double bell_fidelity_minus;
  cplx coherence;
};

inline BranchReport analyze_branch(std::string label, double probability,
                                   const TwoQubitDM& dm) {
  return {std::move(label),       probability,          dm,
          concurrence(dm),        chsh_max(dm),         bell_fidelity(dm, +1),
          bell_fidelity(dm, -1),  coherence_element(dm)};
}

struct RoundMetrics {
  std::uint64_t round;
  double coherence;
  double concurrence;
  double chsh_max;
  double bell_fidelity_plus;
};

struct ProtocolParameters {
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> m;
  std::optional<MergeVariant> variant;
  std::optional<Statistics> statistics;
  std::optional<double> phi;
  std::optional<double> chi;
  std::optional<RepeatMode> mode;
};

struct ProtocolReport {
  ProtocolId id = ProtocolId::photon_baseline;
  ProtocolParameters parameters;
  std::vector<BranchReport> branches;
  std::size_t primary_branch = 0;
  std::optional<BranchReport> unconditioned;
  std::vector<RoundMetrics> series;
  std::optional<Fluctuations> fluctuations;
  std::optional<std::uint64_t> total_atoms;
  bool requires_global_measurement = false;

  const BranchReport& primary() const { return branches.at(primary_branch); }
};

/// Largest (N + 1) * 2^M accepted by the brute-force repeated-run oracle.
inline constexpr std::uint64_t kBruteForceTermLimit = std::uint64_t{1} << 20;

namespace detail {

inline const std::vector<std::string>& target_labels() {
  static const std::vector<std::string> labels{"t_L", "t_R"};
  return labels;
}

struct FlyingLabels {
  std::string in, left, right, t_left, t_right;
};

inline FlyingLabels flying_labels(const std::string& suffix = "") {
  return {"fly_in" + suffix, "fly_L" + suffix, "fly_R" + suffix, "t_L" + suffix,
          "t_R" + suffix};
}

// Flying particle after the splitter and the target excitation:
// (|1,0>|eg> + |0,1>|ge>)/sqrt 2 on modes (in, left, right), qubits (tL, tR).
inline PureState excited_pair(const FlyingLabels& l, Statistics statistics) {
  Register reg({{l.in, statistics}, {l.left, statistics}, {l.right, statistics}},
               {{l.t_left}, {l.t_right}});
  auto psi = make_state(reg, {{BasisState{{1, 0, 0}, {0, 0}}, 1.0}});
  psi = beam_splitter(psi, l.in, l.left, l.right);
  return excite_targets(psi, l.left, l.right, l.t_left, l.t_right);
}

inline TwoQubitDM targets_of(const PureState& psi, const FlyingLabels& l) {
  return TwoQubitDM::from(partial_trace(psi, {l.t_left, l.t_right}));
}

inline TwoQubitDM mixture(const std::vector<BranchReport>& branches) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (const auto& b : branches) m += b.probability * b.dm.matrix();
  return TwoQubitDM(m);
}

inline TwoQubitDM coherence_block(double c) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(1, 1) = 0.5;
  m(2, 2) = 0.5;
  m(1, 2) = c;
  m(2, 1) = c;
  return TwoQubitDM(m);
}

}  // namespace detail

/// Scenario I keeps a sample only when each side, judged on its own count,
/// holds exactly one itinerant atom.
inline bool local_accept(int side_count) { return side_count == 1; }

inline bool post_select(int left_count, int right_count) {
  return local_accept(left_count) && local_accept(right_count);
}

/// Photon through the splitter, absorbed by the same-side target atom.
inline ProtocolReport run_photon_baseline() {
  Register reg({{"ph_in", Statistics::bosonic, Species::photon},
                {"ph_L", Statistics::bosonic, Species::photon},
                {"ph_R", Statistics::bosonic, Species::photon}},
               {{"t_L"}, {"t_R"}});
  auto psi = make_state(reg, {{BasisState{{1, 0, 0}, {0, 0}}, 1.0}});
  psi = beam_splitter(psi, "ph_in", "ph_L", "ph_R");
  psi = absorb_photon(psi, "ph_L", "ph_R", "t_L", "t_R");
  ProtocolReport r;
  r.id = ProtocolId::photon_baseline;
  r.branches.push_back(analyze_branch(
      "all", 1.0, TwoQubitDM::from(partial_trace(psi, detail::target_labels()))));
  r.unconditioned = r.branches.front();
  return r;
}

/// Flying atom excites a target and is traced out: classical correlations.
inline ProtocolReport run_massive_baseline() {
  const auto l = detail::flying_labels();
  const auto psi = detail::excited_pair(l, Statistics::bosonic);
  ProtocolReport r;
  r.id = ProtocolId::massive_baseline;
  r.branches.push_back(analyze_branch("all", 1.0, detail::targets_of(psi, l)));
  r.unconditioned = r.branches.front();
  return r;
}

/// Flying atom measured in the (|L> +- |R>)/sqrt 2 basis. Needs a global
/// measurement, so it never counts as a local conversion.
inline ProtocolReport run_eraser() {
  const auto l = detail::flying_labels();
  const auto psi = detail::excited_pair(l, Statistics::bosonic);
  ProtocolReport r;
  r.id = ProtocolId::eraser;
  r.requires_global_measurement = true;
  for (const auto& o : measure_flying_pm(psi, l.left, l.right)) {
    r.branches.push_back(
        analyze_branch(o.tag, o.probability, detail::targets_of(o.collapsed, l)));
  }
  r.unconditioned = analyze_branch("unconditioned", 1.0, detail::mixture(r.branches));
  return r;
}

namespace detail {

// Auxiliary atom (|L_aux> + |R_aux>)/sqrt 2 together with the excited flying
// pair, on modes (aux_L, fly_L, aux_R, fly_R, fly_in). Fermionic kets are in
// side-local normal order: each side's creation operators are adjacent, so
// the per-side merges below never exchange operators across sides.
inline PureState single_aux_state(Statistics statistics) {
  const auto l = flying_labels();
  Register aux_reg({{"aux_L", statistics}, {"aux_R", statistics}}, {});
  const auto aux = make_state(aux_reg, {{BasisState{{1, 0}, {}}, 1.0},
                                        {BasisState{{0, 1}, {}}, 1.0}});
  const auto fly = excited_pair(l, statistics);

  Register reg({{"aux_L", statistics},
                {l.left, statistics},
                {"aux_R", statistics},
                {l.right, statistics},
                {l.in, statistics}},
               {{l.t_left}, {l.t_right}});
  std::vector<std::pair<BasisState, cplx>> entries;
  for (const auto& [ba, aa] : aux.terms()) {
    for (const auto& [bf, af] : fly.terms()) {
      BasisState b{{ba.occupations[0], bf.occupations[1], ba.occupations[1],
                    bf.occupations[2], bf.occupations[0]},
                   bf.bits};
      entries.emplace_back(std::move(b), aa * af);
    }
  }
  return make_state(reg, entries);
}

inline std::string count_label(int left, int right) {
  return "(" + std::to_string(left) + "," + std::to_string(right) + ")";
}

}  // namespace detail

/// One auxiliary atom. The ideal variant merges each side's wells with the
/// target-biased merge and then counts atoms per side; the non-ideal variant
/// counts first (merging conserves the per-side count) and applies the
/// degenerate merge to the one-atom-per-side branch.
inline ProtocolReport run_single_aux(MergeVariant variant, Statistics statistics,
                                     double phi = std::numbers::pi / 4,
                                     double chi = 0.0) {
  const auto l = detail::flying_labels();
  const auto psi = detail::single_aux_state(statistics);
  const MergeSpec left{"aux_L", l.left, "m_L", variant, phi, chi};
  const MergeSpec right{"aux_R", l.right, "m_R", variant, phi, chi};

  ProtocolReport r;
  r.id = variant == MergeVariant::ideal_biased
                             ? ProtocolId::single_aux_ideal
                             : ProtocolId::single_aux_nonideal;
  r.parameters.variant = variant;
  r.parameters.statistics = statistics;
  if (variant == MergeVariant::nonideal_degenerate) {
    r.parameters.phi = phi;
    r.parameters.chi = chi;
  }

  auto add_branches = [&](const PureState& state,
                          const std::vector<std::string>& left_modes,
                          const std::vector<std::string>& right_modes,
                          auto&& finish) {
    for (const auto& lo : measure_number(state, left_modes)) {
      for (const auto& ro : measure_number(lo.collapsed, right_modes)) {
        const PureState out = finish(ro.collapsed, lo.value, ro.value);
        r.branches.push_back(analyze_branch(detail::count_label(lo.value, ro.value),
                                            lo.probability * ro.probability,
                                            detail::targets_of(out, l)));
        if (post_select(lo.value, ro.value)) r.primary_branch = r.branches.size() - 1;
      }
    }
  };

  if (variant == MergeVariant::ideal_biased) {
    const auto merged = merge_wells(merge_wells(psi, left), right);
    add_branches(merged, merged_mode_names(left, statistics),
                 merged_mode_names(right, statistics),
                 [](const PureState& s, int, int) { return s; });
  } else {
    add_branches(psi, {"aux_L", l.left}, {"aux_R", l.right},
                 [&](const PureState& s, int nl, int nr) {
                   // Two atoms in one degenerate well are outside the model;
                   // those branches are discarded and their target state does
                   // not depend on the (local) merge.
                   if (nl > 1 || nr > 1) return s;
                   return merge_wells(merge_wells(s, left), right);
                 });
  }
  r.unconditioned = analyze_branch("unconditioned", 1.0, detail::mixture(r.branches));
  return r;
}

namespace detail {

// Condensate of N atoms split over (aux_L, aux_R) by a symmetric splitter:
// sum_j sqrt(f_{N,j}) |j, N-j>.
inline PureState split_condensate(std::int64_t n, const std::string& left,
                                  const std::string& right) {
  Register reg({{"bec"}, {left}, {right}}, {});
  const auto un = static_cast<std::uint32_t>(n);
  auto psi = make_state(reg, {{BasisState{{un, 0, 0}, {}}, 1.0}});
  return beam_splitter(psi, "bec", left, right);
}

}  // namespace detail

/// Condensate of N atoms merged with the flying atom on both sides, targets
/// read out after tracing everything else. Brute-force state vector.
inline ProtocolReport run_bec_single(std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidN, "N must be at least 1");
  const auto l = detail::flying_labels();
  auto psi = tensor_embed(detail::split_condensate(n, "aux_L", "aux_R"),
                          detail::excited_pair(l, Statistics::bosonic));
  psi = merge_wells(psi, {"aux_L", l.left, "m_L"});
  psi = merge_wells(psi, {"aux_R", l.right, "m_R"});

  ProtocolReport r;
  r.id = ProtocolId::bec_single;
  r.parameters.n = n;
  r.total_atoms = static_cast<std::uint64_t>(n) + 1;
  r.branches.push_back(analyze_branch("all", 1.0, detail::targets_of(psi, l)));
  r.unconditioned = r.branches.front();
  return r;
}

namespace detail {

inline RoundMetrics round_metrics(std::uint64_t round, const TwoQubitDM& dm) {
  return {round, coherence_element(dm).real(), concurrence(dm), chsh_max(dm).value,
          bell_fidelity(dm, +1)};
}

inline double std_of(const std::vector<MeasurementOutcome>& outcomes) {
  double mean = 0.0;
  for (const auto& o : outcomes) mean += o.probability * o.value;
  double var = 0.0;
  for (const auto& o : outcomes) var += o.probability * (o.value - mean) * (o.value - mean);
  return std::sqrt(var);
}

}  // namespace detail

/// The same condensate reused for M flying atoms. After each round that
/// round's target pair is traced out.
///
/// exact_compact tracks the condensate as a ShiftMixture. brute_force keeps
/// the full pure state with every earlier target pair still attached (a
/// purification of the traced-out mixture) and is limited to
/// (N + 1) 2^M <= kBruteForceTermLimit.
inline ProtocolReport run_bec_repeated(std::int64_t n, std::int64_t m,
                                       RepeatMode mode) {
  if (n < 1) throw Error(ErrorCode::InvalidN, "N must be at least 1");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "M must be at least 1");
  ProtocolReport r;
  r.id = ProtocolId::bec_repeated;
  r.parameters.n = n;
  r.parameters.m = m;
  r.parameters.mode = mode;
  r.total_atoms = static_cast<std::uint64_t>(n + m);
  const auto rounds = static_cast<std::uint64_t>(m);

  if (mode == RepeatMode::exact_compact) {
    auto mix = ShiftMixture::fresh(static_cast<std::uint64_t>(n));
    for (std::uint64_t k = 1; k <= rounds; ++k) {
      const auto dm = detail::coherence_block(mixture_coherence(mix));
      if (k == 1) r.branches.push_back(analyze_branch("all", 1.0, dm));
      r.series.push_back(detail::round_metrics(k, dm));
      mix = advance_mixture(mix);
    }
    r.fluctuations = fluctuation_report(mix);
    r.unconditioned = r.branches.front();
    return r;
  }

  if (m >= 40 || (static_cast<std::uint64_t>(n) + 1) << rounds > kBruteForceTermLimit) {
    throw Error(ErrorCode::ResourceBound,
                "brute force limited to (N + 1) 2^M <= 2^20");
  }
  auto psi = detail::split_condensate(n, "bec_L0", "bec_R0");
  const double quantum_std = detail::std_of(measure_number(psi, "bec_L0"));
  for (std::uint64_t k = 1; k <= rounds; ++k) {
    const auto l = detail::flying_labels(std::to_string(k));
    const auto prev = std::to_string(k - 1);
    const auto next = std::to_string(k);
    psi = tensor_embed(psi, detail::excited_pair(l, Statistics::bosonic));
    psi = merge_wells(psi, {"bec_L" + prev, l.left, "bec_L" + next});
    psi = merge_wells(psi, {"bec_R" + prev, l.right, "bec_R" + next});
    const auto dm = detail::targets_of(psi, l);
    if (k == 1) r.branches.push_back(analyze_branch("all", 1.0, dm));
    r.series.push_back(detail::round_metrics(k, dm));
  }
  r.fluctuations = Fluctuations{
      detail::std_of(measure_number(psi, "bec_L" + std::to_string(rounds))),
      quantum_std};
  r.unconditioned = r.branches.front();
  return r;
}

}  // namespace modeconv
