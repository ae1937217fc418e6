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
#include <numbers>

#include "modeconv/metrics.hpp"
#include "support.hpp"

using namespace modeconv;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::Matrix4cd projector(const Eigen::Vector4cd& v) { return v * v.adjoint(); }

Eigen::Vector4cd bell(int sign) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(1) = sign;
  v(2) = 1.0;
  return v / std::sqrt(2.0);
}

TwoQubitDM werner(double p) {
  Eigen::Matrix4cd m = p * projector(bell(+1)) + (1 - p) / 4 * Eigen::Matrix4cd::Identity();
  return TwoQubitDM(m);
}

TwoQubitDM rotate(const TwoQubitDM& rho, const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& v) {
  const Eigen::Matrix4cd w = pauli::kron(u, v);
  Eigen::Matrix4cd m = w * rho.matrix() * w.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return TwoQubitDM(m);
}

}  // namespace

TEST_CASE("density matrix validation") {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = 1.2;
  m(3, 3) = -0.2;
  CHECK_THROWS_AS(TwoQubitDM(m), Error);
  m = Eigen::Matrix4cd::Identity() / 2;
  CHECK_THROWS_AS(TwoQubitDM(m), Error);
  m = Eigen::Matrix4cd::Identity() / 4;
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(TwoQubitDM(m), Error);
}

TEST_CASE("pure-state concurrence equals 2|ad - bc|") {
  testing_support::Gen gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector4cd v = gen.vector(4);
    const double expect = 2.0 * std::abs(v(0) * v(3) - v(1) * v(2));
    CHECK_THAT(concurrence(TwoQubitDM(projector(v))), WithinAbs(expect, 1e-7));
  }
}

TEST_CASE("Werner family closed forms") {
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    const auto rho = werner(p);
    CHECK_THAT(concurrence(rho), WithinAbs(std::max(0.0, (3 * p - 1) / 2), 1e-7));
    CHECK_THAT(chsh_max(rho).value, WithinAbs(2 * std::numbers::sqrt2 * p, 1e-12));
    CHECK_THAT(bell_fidelity(rho, +1), WithinAbs(p + (1 - p) / 4, 1e-15));
    CHECK_THAT(bell_fidelity(rho, -1), WithinAbs((1 - p) / 4, 1e-15));
  }
}

TEST_CASE("Bell states reach the Tsirelson bound") {
  for (int sign : {1, -1}) {
    const TwoQubitDM rho(projector(bell(sign)));
    const auto r = chsh_max(rho);
    CHECK_THAT(concurrence(rho), WithinAbs(1.0, 1e-12));
    CHECK_THAT(r.value, WithinAbs(2 * std::numbers::sqrt2, 1e-12));
    CHECK_THAT(chsh_value(rho, r.settings), WithinAbs(r.value, 1e-12));
    CHECK_THAT(std::abs(coherence_element(rho)), WithinAbs(0.5, 1e-15));
  }
}

TEST_CASE("closed-form CHSH matches the numerical search and its own settings") {
  testing_support::Gen gen(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto rho = gen.two_qubit_dm();
    const auto r = chsh_max(rho);
    CHECK_THAT(r.value, WithinAbs(chsh_max_search(rho), 1e-6));
    CHECK_THAT(chsh_value(rho, r.settings), WithinAbs(r.value, 1e-10));
    CHECK(r.value <= 2 * std::numbers::sqrt2 + 1e-12);
  }
}

TEST_CASE("entanglement measures are invariant under local unitaries") {
  testing_support::Gen gen(4);
  for (int trial = 0; trial < 60; ++trial) {
    const auto rho = gen.two_qubit_dm();
    const auto moved = rotate(rho, gen.unitary2(), gen.unitary2());
    CHECK_THAT(concurrence(moved), WithinAbs(concurrence(rho), 1e-7));
    CHECK_THAT(chsh_max(moved).value, WithinAbs(chsh_max(rho).value, 1e-10));
  }
}

TEST_CASE("product states are separable and local") {
  testing_support::Gen gen(8);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Vector2cd a = gen.vector(2);
    const Eigen::Vector2cd b = gen.vector(2);
    Eigen::Vector4cd v;
    v << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
    const TwoQubitDM rho(projector(v));
    CHECK(concurrence(rho) < 1e-7);
    CHECK(chsh_max(rho).value <= 2.0 + 1e-12);
  }
}

TEST_CASE("Bloch angles round trip") {
  testing_support::Gen gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d v(gen.normal(), gen.normal(), gen.normal());
    CHECK((bloch_vector(bloch_angles(v)) - v.normalized()).norm() < 1e-14);
  }
  const auto up = bloch_vector({0.0, 0.0});
  CHECK(up.z() == 1.0);
  Eigen::Vector4cd g = Eigen::Vector4cd::Zero();
  g(0) = 1.0;
  const auto t = correlation_matrix(TwoQubitDM(projector(g)));
  CHECK_THAT(t(2, 2), WithinAbs(1.0, 1e-15));
}

TEST_CASE("sampled CHSH is reproducible and centred on the exact value") {
  const TwoQubitDM rho(projector(bell(+1)));
  const auto r = chsh_max(rho);
  const auto a = chsh_sample(rho, r.settings, 40000, 5);
  const auto b = chsh_sample(rho, r.settings, 40000, 5);
  const auto c = chsh_sample(rho, r.settings, 40000, 6);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  CHECK(a.estimate != c.estimate);
  CHECK(a.shots_per_setting == 10000);
  CHECK(std::abs(a.estimate - r.value) < 5 * a.std_error);
  CHECK_THROWS_AS(chsh_sample(rho, r.settings, 0, 1), Error);

  // Repeated estimates scatter with the reported standard error.
  const auto w = werner(0.8);
  const auto rw = chsh_max(w);
  double sum = 0.0, sum2 = 0.0, se = 0.0;
  const int reps = 200;
  for (int k = 0; k < reps; ++k) {
    const auto s = chsh_sample(w, rw.settings, 4000, 1000 + k);
    sum += s.estimate;
    sum2 += s.estimate * s.estimate;
    se += s.std_error;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt(sum2 / reps - mean * mean);
  CHECK(std::abs(mean - rw.value) < 5 * sd / std::sqrt(reps));
  CHECK(std::abs(sd / (se / reps) - 1.0) < 0.25);
}
