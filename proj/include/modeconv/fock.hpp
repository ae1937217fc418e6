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

// Exact Fock-space states over a hybrid register of particle modes and
// two-level target atoms.
//
// A basis state lists one occupation number per mode and one bit per qubit
// (0 = g, 1 = e), both in register declaration order. Pure states are sparse
// maps from basis states to amplitudes; std::map keeps iteration order, and
// therefore every derived matrix layout, deterministic.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "modeconv/error.hpp"

namespace modeconv {

using cplx = std::complex<double>;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kEigenTol = 1e-10;

enum class Statistics { bosonic, fermionic };

// Photons are the only species whose number may change (absorption).
enum class Species { massive, photon };

struct ModeLabel {
  std::string name;
  Statistics statistics = Statistics::bosonic;
  Species species = Species::massive;

  bool operator==(const ModeLabel&) const = default;
};

struct QubitLabel {
  std::string name;

  bool operator==(const QubitLabel&) const = default;
};

/// Ordered set of labeled modes and qubits. Names are unique across both
/// lists, so a bare name identifies a subsystem unambiguously.
class Register {
 public:
  Register() = default;

  Register(std::vector<ModeLabel> modes, std::vector<QubitLabel> qubits)
      : modes_(std::move(modes)), qubits_(std::move(qubits)) {
    std::set<std::string> seen;
    auto claim = [&](const std::string& name) {
      if (name.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty label name");
      }
      if (!seen.insert(name).second) {
        throw Error(ErrorCode::LabelCollision, "duplicate label '" + name + "'");
      }
    };
    for (const auto& m : modes_) claim(m.name);
    for (const auto& q : qubits_) claim(q.name);
  }

  const std::vector<ModeLabel>& modes() const { return modes_; }
  const std::vector<QubitLabel>& qubits() const { return qubits_; }
  std::size_t num_modes() const { return modes_.size(); }
  std::size_t num_qubits() const { return qubits_.size(); }

  std::optional<std::size_t> find_mode(const std::string& name) const {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (modes_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::optional<std::size_t> find_qubit(const std::string& name) const {
    for (std::size_t i = 0; i < qubits_.size(); ++i) {
      if (qubits_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::size_t mode_index(const std::string& name) const {
    if (auto i = find_mode(name)) return *i;
    throw Error(ErrorCode::UnknownLabel, "no mode named '" + name + "'");
  }

  std::size_t qubit_index(const std::string& name) const {
    if (auto i = find_qubit(name)) return *i;
    throw Error(ErrorCode::UnknownLabel, "no qubit named '" + name + "'");
  }

  bool contains(const std::string& name) const {
    return find_mode(name).has_value() || find_qubit(name).has_value();
  }

  bool operator==(const Register&) const = default;

 private:
  std::vector<ModeLabel> modes_;
  std::vector<QubitLabel> qubits_;
};

struct BasisState {
  std::vector<std::uint32_t> occupations;
  std::vector<std::uint8_t> bits;

  auto operator<=>(const BasisState&) const = default;
  bool operator==(const BasisState&) const = default;
};

namespace detail {

inline void check_legal(const Register& reg, const BasisState& b) {
  if (b.occupations.size() != reg.num_modes() ||
      b.bits.size() != reg.num_qubits()) {
    throw Error(ErrorCode::RegisterMismatch,
                "basis state shape does not match register");
  }
  for (std::size_t i = 0; i < b.occupations.size(); ++i) {
    if (reg.modes()[i].statistics == Statistics::fermionic &&
        b.occupations[i] > 1) {
      throw Error(ErrorCode::IllegalOccupation,
                  "fermionic mode '" + reg.modes()[i].name +
                      "' holds more than one particle");
    }
  }
  for (auto bit : b.bits) {
    if (bit > 1) throw Error(ErrorCode::IllegalOccupation, "qubit bit > 1");
  }
}

// Massive particles only: photons carry no superselection constraint.
inline std::uint64_t massive_count(const Register& reg, const BasisState& b) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < b.occupations.size(); ++i) {
    if (reg.modes()[i].species == Species::massive) n += b.occupations[i];
  }
  return n;
}

// Parity of the permutation that sorts a sequence of distinct fermionic
// mode indices (creation-operator order) into ascending order.
inline int sort_parity(const std::vector<std::size_t>& seq) {
  int inversions = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (std::size_t j = i + 1; j < seq.size(); ++j) {
      if (seq[i] > seq[j]) ++inversions;
    }
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

// Sign picked up when moving a fermionic creation operator for `mode` past
// the occupied fermionic modes declared before it.
inline int creation_sign(const Register& reg, const BasisState& b,
                         std::size_t mode) {
  if (reg.modes()[mode].statistics != Statistics::fermionic) return 1;
  int n = 0;
  for (std::size_t i = 0; i < mode; ++i) {
    if (reg.modes()[i].statistics == Statistics::fermionic) {
      n += static_cast<int>(b.occupations[i]);
    }
  }
  return (n % 2 == 0) ? 1 : -1;
}

}  // namespace detail

/// Normalized pure state confined to one massive-particle-number sector.
class PureState {
 public:
  using Terms = std::map<BasisState, cplx>;

  /// Validates every basis state and the sector rule. With `normalize` the
  /// amplitudes are rescaled to unit norm; otherwise the norm must already
  /// be 1 within kNormTol.
  static PureState from_terms(Register reg, Terms terms, bool normalize) {
    for (auto it = terms.begin(); it != terms.end();) {
      if (std::norm(it->second) == 0.0) {
        it = terms.erase(it);
      } else {
        ++it;
      }
    }
    if (terms.empty()) {
      throw Error(ErrorCode::EmptyState, "state has no nonzero amplitude");
    }
    std::optional<std::uint64_t> sector;
    double norm2 = 0.0;
    for (const auto& [b, a] : terms) {
      detail::check_legal(reg, b);
      const auto n = detail::massive_count(reg, b);
      if (sector && *sector != n) {
        throw Error(ErrorCode::SectorViolation,
                    "superposition of " + std::to_string(*sector) + " and " +
                        std::to_string(n) + " massive particles");
      }
      sector = n;
      norm2 += std::norm(a);
    }
    if (normalize) {
      const double s = 1.0 / std::sqrt(norm2);
      for (auto& [b, a] : terms) a *= s;
    } else if (std::abs(norm2 - 1.0) > kNormTol) {
      throw Error(ErrorCode::NotIsometric,
                  "operation changed the norm to " + std::to_string(norm2));
    }
    return PureState(std::move(reg), std::move(terms), *sector);
  }

  const Register& reg() const { return reg_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  cplx amplitude(const BasisState& b) const {
    auto it = terms_.find(b);
    return it == terms_.end() ? cplx{} : it->second;
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& [b, a] : terms_) s += std::norm(a);
    return s;
  }

  /// Total number of massive particles shared by every populated branch.
  std::uint64_t particle_number() const { return sector_; }

 private:
  PureState(Register reg, Terms terms, std::uint64_t sector)
      : reg_(std::move(reg)), terms_(std::move(terms)), sector_(sector) {}

  Register reg_;
  Terms terms_;
  std::uint64_t sector_ = 0;
};

/// Density matrix over an explicit ordered basis of a (sub)register.
class DensityMatrix {
 public:
  DensityMatrix(Register reg, std::vector<BasisState> basis,
                Eigen::MatrixXcd matrix)
      : reg_(std::move(reg)), basis_(std::move(basis)), m_(std::move(matrix)) {
    if (m_.rows() != m_.cols() ||
        static_cast<std::size_t>(m_.rows()) != basis_.size()) {
      throw Error(ErrorCode::InvalidDensityMatrix, "shape mismatch");
    }
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
      throw Error(ErrorCode::InvalidDensityMatrix, "not Hermitian");
    }
    if (std::abs(m_.trace() - cplx{1.0}) > kNormTol) {
      throw Error(ErrorCode::InvalidDensityMatrix, "trace differs from 1");
    }
    if (eigenvalues().minCoeff() < -kEigenTol) {
      throw Error(ErrorCode::InvalidDensityMatrix, "negative eigenvalue");
    }
  }

  const Register& reg() const { return reg_; }
  const std::vector<BasisState>& basis() const { return basis_; }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  std::size_t dim() const { return basis_.size(); }

  /// Ascending eigenvalues.
  Eigen::VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

 private:
  Register reg_;
  std::vector<BasisState> basis_;
  Eigen::MatrixXcd m_;
};

inline PureState make_state(
    const Register& reg, const std::vector<std::pair<BasisState, cplx>>& entries) {
  if (entries.empty()) {
    throw Error(ErrorCode::EmptyState, "no entries");
  }
  PureState::Terms terms;
  for (const auto& [b, a] : entries) {
    detail::check_legal(reg, b);
    terms[b] += a;
  }
  return PureState::from_terms(reg, std::move(terms), /*normalize=*/true);
}

/// <a|b>, conjugate-linear in the first argument.
inline cplx inner_product(const PureState& a, const PureState& b) {
  if (!(a.reg() == b.reg())) {
    throw Error(ErrorCode::RegisterMismatch, "inner product across registers");
  }
  const bool a_smaller = a.size() <= b.size();
  const auto& small = a_smaller ? a : b;
  const auto& large = a_smaller ? b : a;
  cplx s{};
  for (const auto& [basis, amp] : small.terms()) {
    const cplx other = large.amplitude(basis);
    s += a_smaller ? std::conj(amp) * other : std::conj(other) * amp;
  }
  return s;
}

/// Product state on the concatenated register (labels of `state` first).
/// Creation operators of `state` precede those of `extra`, which is already
/// canonical order, so no fermionic sign arises.
inline PureState tensor_embed(const PureState& state, const PureState& extra) {
  const auto& r1 = state.reg();
  const auto& r2 = extra.reg();
  for (const auto& m : r2.modes()) {
    if (r1.contains(m.name)) {
      throw Error(ErrorCode::LabelCollision, "label '" + m.name + "' in both");
    }
  }
  for (const auto& q : r2.qubits()) {
    if (r1.contains(q.name)) {
      throw Error(ErrorCode::LabelCollision, "label '" + q.name + "' in both");
    }
  }
  std::vector<ModeLabel> modes = r1.modes();
  modes.insert(modes.end(), r2.modes().begin(), r2.modes().end());
  std::vector<QubitLabel> qubits = r1.qubits();
  qubits.insert(qubits.end(), r2.qubits().begin(), r2.qubits().end());
  Register reg(std::move(modes), std::move(qubits));

  PureState::Terms terms;
  for (const auto& [b1, a1] : state.terms()) {
    for (const auto& [b2, a2] : extra.terms()) {
      BasisState b;
      b.occupations = b1.occupations;
      b.occupations.insert(b.occupations.end(), b2.occupations.begin(),
                           b2.occupations.end());
      b.bits = b1.bits;
      b.bits.insert(b.bits.end(), b2.bits.begin(), b2.bits.end());
      terms.emplace(std::move(b), a1 * a2);
    }
  }
  return PureState::from_terms(std::move(reg), std::move(terms), false);
}

namespace detail {

struct Split {
  std::vector<std::size_t> kept_modes;
  std::vector<std::size_t> kept_qubits;
  Register kept_reg;
};

inline Split resolve_keep(const Register& reg,
                          const std::vector<std::string>& keep) {
  if (keep.empty()) {
    throw Error(ErrorCode::InvalidArgument, "partial trace keeps nothing");
  }
  std::set<std::string> names;
  for (const auto& k : keep) {
    if (!reg.contains(k)) {
      throw Error(ErrorCode::UnknownLabel, "no label named '" + k + "'");
    }
    names.insert(k);
  }
  Split s;
  std::vector<ModeLabel> modes;
  std::vector<QubitLabel> qubits;
  for (std::size_t i = 0; i < reg.num_modes(); ++i) {
    if (names.contains(reg.modes()[i].name)) {
      s.kept_modes.push_back(i);
      modes.push_back(reg.modes()[i]);
    }
  }
  for (std::size_t i = 0; i < reg.num_qubits(); ++i) {
    if (names.contains(reg.qubits()[i].name)) {
      s.kept_qubits.push_back(i);
      qubits.push_back(reg.qubits()[i]);
    }
  }
  s.kept_reg = Register(std::move(modes), std::move(qubits));
  return s;
}

// Splits a basis state into (kept, environment) parts.
inline std::pair<BasisState, BasisState> split_basis(const Register& reg,
                                                     const Split& s,
                                                     const BasisState& b) {
  BasisState kept;
  BasisState env;
  std::size_t km = 0;
  for (std::size_t i = 0; i < reg.num_modes(); ++i) {
    if (km < s.kept_modes.size() && s.kept_modes[km] == i) {
      kept.occupations.push_back(b.occupations[i]);
      ++km;
    } else {
      env.occupations.push_back(b.occupations[i]);
    }
  }
  std::size_t kq = 0;
  for (std::size_t i = 0; i < reg.num_qubits(); ++i) {
    if (kq < s.kept_qubits.size() && s.kept_qubits[kq] == i) {
      kept.bits.push_back(b.bits[i]);
      ++kq;
    } else {
      env.bits.push_back(b.bits[i]);
    }
  }
  return {std::move(kept), std::move(env)};
}

// Qubit-only subsystems get the full 2^k basis (g before e, first declared
// qubit most significant); subsystems with modes list the configurations
// that actually occur, in BasisState order.
inline std::vector<BasisState> kept_basis(const Split& s,
                                          std::set<BasisState> occurring) {
  if (s.kept_modes.empty()) {
    const std::size_t k = s.kept_qubits.size();
    std::vector<BasisState> basis;
    basis.reserve(std::size_t{1} << k);
    for (std::size_t idx = 0; idx < (std::size_t{1} << k); ++idx) {
      BasisState b;
      for (std::size_t q = 0; q < k; ++q) {
        b.bits.push_back(static_cast<std::uint8_t>((idx >> (k - 1 - q)) & 1U));
      }
      basis.push_back(std::move(b));
    }
    return basis;
  }
  return {occurring.begin(), occurring.end()};
}

inline std::size_t index_of(const std::vector<BasisState>& basis,
                            const BasisState& b) {
  auto it = std::lower_bound(basis.begin(), basis.end(), b);
  return static_cast<std::size_t>(it - basis.begin());
}

}  // namespace detail

/// Reduced density matrix on the labels in `keep`.
inline DensityMatrix partial_trace(const PureState& state,
                                   const std::vector<std::string>& keep) {
  const auto split = detail::resolve_keep(state.reg(), keep);

  std::map<BasisState, std::vector<std::pair<BasisState, cplx>>> by_env;
  std::set<BasisState> occurring;
  for (const auto& [b, a] : state.terms()) {
    auto [kept, env] = detail::split_basis(state.reg(), split, b);
    occurring.insert(kept);
    by_env[std::move(env)].emplace_back(std::move(kept), a);
  }
  auto basis = detail::kept_basis(split, std::move(occurring));
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [env, group] : by_env) {
    for (const auto& [ki, ai] : group) {
      const auto i = static_cast<Eigen::Index>(detail::index_of(basis, ki));
      for (const auto& [kj, aj] : group) {
        const auto j = static_cast<Eigen::Index>(detail::index_of(basis, kj));
        rho(i, j) += ai * std::conj(aj);
      }
    }
  }
  return DensityMatrix(split.kept_reg, std::move(basis), std::move(rho));
}

inline DensityMatrix partial_trace(const DensityMatrix& dm,
                                   const std::vector<std::string>& keep) {
  const auto split = detail::resolve_keep(dm.reg(), keep);
  std::vector<BasisState> kept(dm.dim());
  std::vector<BasisState> env(dm.dim());
  std::set<BasisState> occurring;
  for (std::size_t i = 0; i < dm.dim(); ++i) {
    std::tie(kept[i], env[i]) =
        detail::split_basis(dm.reg(), split, dm.basis()[i]);
    occurring.insert(kept[i]);
  }
  auto basis = detail::kept_basis(split, std::move(occurring));
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < dm.dim(); ++i) {
    const auto ki = static_cast<Eigen::Index>(detail::index_of(basis, kept[i]));
    for (std::size_t j = 0; j < dm.dim(); ++j) {
      if (env[i] != env[j]) continue;
      const auto kj =
          static_cast<Eigen::Index>(detail::index_of(basis, kept[j]));
      rho(ki, kj) += dm.matrix()(static_cast<Eigen::Index>(i),
                                 static_cast<Eigen::Index>(j));
    }
  }
  return DensityMatrix(split.kept_reg, std::move(basis), std::move(rho));
}

/// |state><state| over the populated basis states.
inline DensityMatrix to_density_matrix(const PureState& state) {
  std::vector<std::string> all;
  for (const auto& m : state.reg().modes()) all.push_back(m.name);
  for (const auto& q : state.reg().qubits()) all.push_back(q.name);
  return partial_trace(state, all);
}

}  // namespace modeconv
