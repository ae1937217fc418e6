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

// Shared helpers for the unit tests: seeded generators for random states
// and density matrices.

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modeconv/fock.hpp"
#include "modeconv/metrics.hpp"

namespace testing_support {

using modeconv::cplx;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double normal() { return gauss_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  cplx complex() { return {normal(), normal()}; }

  Eigen::VectorXcd vector(Eigen::Index dim) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = complex();
    return v.normalized();
  }

  /// Random state of random rank from a Ginibre matrix.
  modeconv::TwoQubitDM two_qubit_dm() {
    const int rank = integer(1, 4);
    Eigen::MatrixXcd g(4, rank);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < rank; ++j) g(i, j) = complex();
    }
    Eigen::Matrix4cd rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return modeconv::TwoQubitDM(rho);
  }

  /// Haar-like single-qubit unitary from a QR decomposition.
  Eigen::Matrix2cd unitary2() {
    Eigen::Matrix2cd g;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) g(i, j) = complex();
    }
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(g);
    return qr.householderQ();
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_;
};

/// Register with `k` qubits named q0, q1, ...
inline modeconv::Register qubit_register(int k) {
  std::vector<modeconv::QubitLabel> q;
  for (int i = 0; i < k; ++i) q.push_back({"q" + std::to_string(i)});
  return modeconv::Register({}, q);
}

/// Pure state over `k` qubits from a dense vector, first qubit most
/// significant.
inline modeconv::PureState qubit_state(int k, const Eigen::VectorXcd& v) {
  std::vector<std::pair<modeconv::BasisState, cplx>> entries;
  for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
    modeconv::BasisState b;
    for (int q = 0; q < k; ++q) {
      b.bits.push_back(static_cast<std::uint8_t>((idx >> (k - 1 - q)) & 1));
    }
    entries.emplace_back(b, v(idx));
  }
  return modeconv::make_state(qubit_register(k), entries);
}

}  // namespace testing_support
