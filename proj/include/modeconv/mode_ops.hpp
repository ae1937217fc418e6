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

// Physical operations of the conversion experiments: beam splitter, target
// excitation, photon absorption, well merging and projective measurements.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "modeconv/fock.hpp"
#include "modeconv/rng.hpp"

namespace modeconv {

enum class MergeVariant { ideal_biased, nonideal_degenerate };

/// Merging of two same-side wells into one.
///
/// ideal_biased: occupations add in the single merged mode (fermionic
/// sources get a second level `<merged>_e` for the doubly occupied case).
/// nonideal_degenerate: the merged well is a two-level register
/// `<merged>_g`, `<merged>_e`; an atom from source_a lands in
/// cos(phi)|g> + e^{i chi} sin(phi)|e>, one from source_b in the orthogonal
/// -e^{-i chi} sin(phi)|g> + cos(phi)|e>.
struct MergeSpec {
  std::string source_a;
  std::string source_b;
  std::string merged;
  MergeVariant variant = MergeVariant::ideal_biased;
  double phi = std::numbers::pi / 4;
  double chi = 0.0;
};

struct MeasurementOutcome {
  int value;         // particle count, or +1 / -1
  std::string tag;   // printable form of value
  double probability;
  PureState collapsed;
};

namespace detail {

inline void require_distinct(const std::vector<std::size_t>& idx) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) {
        throw Error(ErrorCode::InvalidArgument, "labels must be distinct");
      }
    }
  }
}

// Sign of relabeling the occupied fermionic modes of `b` (ascending old
// index) to `key[i]` in some new canonical order.
inline int relabel_sign(const Register& reg, const BasisState& b,
                        const std::vector<std::size_t>& key) {
  std::vector<std::size_t> seq;
  for (std::size_t i = 0; i < reg.num_modes(); ++i) {
    if (reg.modes()[i].statistics == Statistics::fermionic &&
        b.occupations[i] > 0) {
      seq.push_back(key[i]);
    }
  }
  return sort_parity(seq);
}

inline std::vector<MeasurementOutcome> outcomes_from_groups(
    const Register& reg, std::map<int, PureState::Terms> groups,
    const std::map<int, std::string>& tags, double total) {
  std::vector<MeasurementOutcome> out;
  for (auto& [value, terms] : groups) {
    double p = 0.0;
    for (const auto& [b, a] : terms) p += std::norm(a);
    if (p <= 0.0) continue;
    out.push_back({value, tags.at(value), p / total,
                   PureState::from_terms(reg, std::move(terms), true)});
  }
  return out;
}

}  // namespace detail

/// Symmetric phase-free splitter: a_in^dag -> (a_left^dag + a_right^dag)/sqrt 2.
/// The output ports must be empty wherever the input port is occupied.
inline PureState beam_splitter(const PureState& state, const std::string& in_mode,
                               const std::string& out_left,
                               const std::string& out_right) {
  const auto& reg = state.reg();
  const auto in = reg.mode_index(in_mode);
  const auto l = reg.mode_index(out_left);
  const auto r = reg.mode_index(out_right);
  detail::require_distinct({in, l, r});
  const auto stats = reg.modes()[in].statistics;
  if (reg.modes()[l].statistics != stats || reg.modes()[r].statistics != stats) {
    throw Error(ErrorCode::InvalidArgument, "splitter ports differ in statistics");
  }

  PureState::Terms terms;
  for (const auto& [b, a] : state.terms()) {
    const std::uint32_t n = b.occupations[in];
    if (n == 0) {
      terms[b] += a;
      continue;
    }
    if (b.occupations[l] != 0 || b.occupations[r] != 0) {
      throw Error(ErrorCode::UnsupportedOccupancy,
                  "splitter output port already occupied");
    }
    const long double log_norm =
        std::lgammal(n + 1.0L) - static_cast<long double>(n) * std::log(2.0L);
    for (std::uint32_t k = 0; k <= n; ++k) {
      BasisState nb = b;
      nb.occupations[in] = 0;
      nb.occupations[l] = k;
      nb.occupations[r] = n - k;
      const long double log_amp =
          0.5L * (log_norm - std::lgammal(k + 1.0L) - std::lgammal(n - k + 1.0L));
      double amp = static_cast<double>(std::exp(log_amp));
      if (stats == Statistics::fermionic) {
        std::vector<std::size_t> key(reg.num_modes());
        for (std::size_t i = 0; i < key.size(); ++i) key[i] = i;
        key[in] = k == 1 ? l : r;
        amp *= detail::relabel_sign(reg, b, key);
      }
      terms[nb] += a * amp;
    }
  }
  return PureState::from_terms(reg, std::move(terms), false);
}

/// Flips each target to e on every branch where its same-side flying mode
/// is occupied.
inline PureState excite_targets(const PureState& state, const std::string& left_fly,
                                const std::string& right_fly,
                                const std::string& left_target,
                                const std::string& right_target) {
  const auto& reg = state.reg();
  const auto fl = reg.mode_index(left_fly);
  const auto fr = reg.mode_index(right_fly);
  const auto tl = reg.qubit_index(left_target);
  const auto tr = reg.qubit_index(right_target);
  detail::require_distinct({fl, fr});
  detail::require_distinct({tl, tr});

  PureState::Terms terms;
  for (const auto& [b, a] : state.terms()) {
    BasisState nb = b;
    for (auto [fly, target] : {std::pair{fl, tl}, std::pair{fr, tr}}) {
      if (b.occupations[fly] == 0) continue;
      if (nb.bits[target] != 0) {
        throw Error(ErrorCode::AlreadyExcited,
                    "target '" + reg.qubits()[target].name + "' already in e");
      }
      nb.bits[target] = 1;
    }
    terms[nb] += a;
  }
  return PureState::from_terms(reg, std::move(terms), false);
}

/// Annihilates a photon and excites the same-side target. Refuses massive
/// modes: their number is conserved, so this process cannot exist for them.
inline PureState absorb_photon(const PureState& state, const std::string& left_mode,
                               const std::string& right_mode,
                               const std::string& left_target,
                               const std::string& right_target) {
  const auto& reg = state.reg();
  const auto ml = reg.mode_index(left_mode);
  const auto mr = reg.mode_index(right_mode);
  const auto tl = reg.qubit_index(left_target);
  const auto tr = reg.qubit_index(right_target);
  detail::require_distinct({ml, mr});
  detail::require_distinct({tl, tr});
  for (auto m : {ml, mr}) {
    if (reg.modes()[m].species != Species::photon) {
      throw Error(ErrorCode::SpeciesViolation,
                  "mode '" + reg.modes()[m].name +
                      "' carries a conserved massive species");
    }
  }

  PureState::Terms terms;
  for (const auto& [b, a] : state.terms()) {
    if (b.occupations[ml] + b.occupations[mr] > 1) {
      throw Error(ErrorCode::UnsupportedOccupancy,
                  "more than one photon on a branch");
    }
    BasisState nb = b;
    for (auto [mode, target] : {std::pair{ml, tl}, std::pair{mr, tr}}) {
      if (b.occupations[mode] == 0) continue;
      if (nb.bits[target] != 0) {
        throw Error(ErrorCode::AlreadyExcited,
                    "target '" + reg.qubits()[target].name + "' already in e");
      }
      nb.occupations[mode] = 0;
      nb.bits[target] = 1;
    }
    terms[nb] += a;
  }
  return PureState::from_terms(reg, std::move(terms), false);
}

/// Names of the modes that replace the two sources after merging.
inline std::vector<std::string> merged_mode_names(const MergeSpec& spec,
                                                  Statistics statistics) {
  if (spec.variant == MergeVariant::nonideal_degenerate) {
    return {spec.merged + "_g", spec.merged + "_e"};
  }
  if (statistics == Statistics::fermionic) {
    return {spec.merged, spec.merged + "_e"};
  }
  return {spec.merged};
}

/// The merged modes take the position of the first-declared source; the
/// other source disappears from the register.
inline PureState merge_wells(const PureState& state, const MergeSpec& spec) {
  const auto& reg = state.reg();
  const auto ia = reg.mode_index(spec.source_a);
  const auto ib = reg.mode_index(spec.source_b);
  detail::require_distinct({ia, ib});
  const auto& la = reg.modes()[ia];
  if (la.statistics != reg.modes()[ib].statistics ||
      la.species != reg.modes()[ib].species) {
    throw Error(ErrorCode::InvalidArgument, "merged wells hold different species");
  }
  const auto names = merged_mode_names(spec, la.statistics);
  for (const auto& n : names) {
    if (reg.contains(n)) {
      throw Error(ErrorCode::LabelCollision, "merged label '" + n + "' not fresh");
    }
  }

  const std::size_t pos = std::min(ia, ib);
  std::vector<ModeLabel> modes;
  std::vector<std::size_t> new_index(reg.num_modes());
  std::size_t first_merged = 0;
  for (std::size_t i = 0; i < reg.num_modes(); ++i) {
    if (i == pos) {
      first_merged = modes.size();
      for (const auto& n : names) modes.push_back({n, la.statistics, la.species});
    }
    if (i == ia || i == ib) continue;
    new_index[i] = modes.size();
    modes.push_back(reg.modes()[i]);
  }
  Register out_reg(std::move(modes), reg.qubits());
  const std::size_t m_g = first_merged;
  const std::size_t m_e = first_merged + 1;

  auto carry = [&](const BasisState& b) {
    BasisState nb;
    nb.occupations.assign(out_reg.num_modes(), 0);
    for (std::size_t i = 0; i < reg.num_modes(); ++i) {
      if (i != ia && i != ib) nb.occupations[new_index[i]] = b.occupations[i];
    }
    nb.bits = b.bits;
    return nb;
  };
  const bool fermionic = la.statistics == Statistics::fermionic;
  auto sign_for = [&](const BasisState& b, std::size_t key_a, std::size_t key_b) {
    if (!fermionic) return 1;
    std::vector<std::size_t> key(new_index);
    key[ia] = key_a;
    key[ib] = key_b;
    return detail::relabel_sign(reg, b, key);
  };

  PureState::Terms terms;
  for (const auto& [b, a] : state.terms()) {
    const std::uint32_t na = b.occupations[ia];
    const std::uint32_t nb_ = b.occupations[ib];
    BasisState base = carry(b);
    if (spec.variant == MergeVariant::ideal_biased) {
      if (!fermionic) {
        base.occupations[m_g] = na + nb_;
        terms[base] += a;
      } else if (na + nb_ <= 1) {
        base.occupations[m_g] = na + nb_;
        terms[base] += a * static_cast<double>(sign_for(b, m_g, m_g));
      } else {
        base.occupations[m_g] = 1;
        base.occupations[m_e] = 1;
        terms[base] += a * static_cast<double>(sign_for(b, m_g, m_e));
      }
      continue;
    }
    if (na + nb_ > 1) {
      throw Error(ErrorCode::UnsupportedOccupancy,
                  "degenerate merge of more than one atom");
    }
    if (na + nb_ == 0) {
      terms[base] += a;
      continue;
    }
    const double c = std::cos(spec.phi);
    const double s = std::sin(spec.phi);
    const cplx phase = std::polar(1.0, spec.chi);
    const cplx to_g = na == 1 ? cplx{c} : -std::conj(phase) * s;
    const cplx to_e = na == 1 ? phase * s : cplx{c};
    for (auto [level, coeff] : {std::pair{m_g, to_g}, std::pair{m_e, to_e}}) {
      if (coeff == cplx{}) continue;
      BasisState nb = base;
      nb.occupations[level] = 1;
      terms[nb] += a * coeff * static_cast<double>(sign_for(b, level, level));
    }
  }
  return PureState::from_terms(std::move(out_reg), std::move(terms), false);
}

/// Number measurement of the total count held by `modes` (one or several
/// modes forming one local trap). Outcomes ascend by count.
inline std::vector<MeasurementOutcome> measure_number(
    const PureState& state, const std::vector<std::string>& modes) {
  std::vector<std::size_t> idx;
  for (const auto& m : modes) idx.push_back(state.reg().mode_index(m));
  detail::require_distinct(idx);
  std::map<int, PureState::Terms> groups;
  std::map<int, std::string> tags;
  for (const auto& [b, a] : state.terms()) {
    int n = 0;
    for (auto i : idx) n += static_cast<int>(b.occupations[i]);
    groups[n].emplace(b, a);
    tags[n] = std::to_string(n);
  }
  return detail::outcomes_from_groups(state.reg(), std::move(groups), tags,
                                      state.norm_squared());
}

inline std::vector<MeasurementOutcome> measure_number(const PureState& state,
                                                      const std::string& mode) {
  return measure_number(state, std::vector<std::string>{mode});
}

/// Projective measurement along the Bloch direction (theta, lambda), with
/// |+> = cos(theta/2)|g> + e^{i lambda} sin(theta/2)|e>. Outcome +1 is the
/// +1 eigenvector of n.sigma, so at theta = 0 "+" means g and "-" means e.
inline std::vector<MeasurementOutcome> measure_qubit(const PureState& state,
                                                     const std::string& qubit,
                                                     double theta, double lambda) {
  const auto q = state.reg().qubit_index(qubit);
  const cplx phase = std::polar(1.0, lambda);
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const std::array<std::array<cplx, 2>, 2> vec = {
      std::array<cplx, 2>{cplx{c}, phase * s},
      std::array<cplx, 2>{cplx{s}, -phase * c}};

  std::map<int, PureState::Terms> groups;
  for (const auto& [b, a] : state.terms()) {
    for (int k = 0; k < 2; ++k) {
      const int value = k == 0 ? 1 : -1;
      // <u_k|bit> a, redistributed onto u_k.
      const cplx overlap = std::conj(vec[k][b.bits[q]]) * a;
      for (std::uint8_t bit = 0; bit < 2; ++bit) {
        BasisState nb = b;
        nb.bits[q] = bit;
        groups[value][nb] += vec[k][bit] * overlap;
      }
    }
  }
  auto out = detail::outcomes_from_groups(state.reg(), std::move(groups),
                                          {{1, "+"}, {-1, "-"}},
                                          state.norm_squared());
  std::reverse(out.begin(), out.end());
  return out;
}

/// Measurement of a single particle shared by two modes in the basis
/// |+-> = (|L> +- |R>)/sqrt 2.
inline std::vector<MeasurementOutcome> measure_flying_pm(
    const PureState& state, const std::string& left_fly,
    const std::string& right_fly) {
  const auto& reg = state.reg();
  const auto l = reg.mode_index(left_fly);
  const auto r = reg.mode_index(right_fly);
  detail::require_distinct({l, r});

  // Amplitudes of a_L^dag|rest> and a_R^dag|rest>, keyed by |rest>.
  std::map<BasisState, std::pair<cplx, cplx>> by_rest;
  for (const auto& [b, a] : state.terms()) {
    if (b.occupations[l] + b.occupations[r] != 1) {
      throw Error(ErrorCode::UnsupportedOccupancy,
                  "expected exactly one particle across the two modes");
    }
    BasisState rest = b;
    rest.occupations[l] = 0;
    rest.occupations[r] = 0;
    if (b.occupations[l] == 1) {
      by_rest[rest].first += a * static_cast<double>(detail::creation_sign(reg, rest, l));
    } else {
      by_rest[rest].second += a * static_cast<double>(detail::creation_sign(reg, rest, r));
    }
  }
  std::map<int, PureState::Terms> groups;
  const double h = 1.0 / std::numbers::sqrt2;
  for (const auto& [rest, amps] : by_rest) {
    for (int sign : {1, -1}) {
      const cplx projected = h * (amps.first + static_cast<double>(sign) * amps.second);
      BasisState bl = rest;
      bl.occupations[l] = 1;
      BasisState br = rest;
      br.occupations[r] = 1;
      groups[sign][bl] += projected * h * static_cast<double>(detail::creation_sign(reg, rest, l));
      groups[sign][br] += projected * h * static_cast<double>(sign * detail::creation_sign(reg, rest, r));
    }
  }
  auto out = detail::outcomes_from_groups(reg, std::move(groups),
                                          {{1, "+"}, {-1, "-"}},
                                          state.norm_squared());
  std::reverse(out.begin(), out.end());
  return out;
}

/// Draws one outcome index according to the Born probabilities.
inline std::size_t sample_outcome(const std::vector<MeasurementOutcome>& outcomes,
                                  Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    acc += outcomes[i].probability;
    if (u < acc) return i;
  }
  return outcomes.size() - 1;
}

}  // namespace modeconv
