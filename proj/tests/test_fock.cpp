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

#include "modeconv/fock.hpp"
#include "support.hpp"

using namespace modeconv;
using Catch::Matchers::WithinAbs;

namespace {

Register boson_pair() {
  return Register({{"a", Statistics::bosonic, Species::massive},
                   {"b", Statistics::bosonic, Species::massive}},
                  {{"t"}});
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

// Dense reduced matrix of the first `keep` qubits, summing over the rest.
Eigen::MatrixXcd dense_reduce(const Eigen::VectorXcd& v, int total, int keep) {
  const Eigen::Index dk = Eigen::Index{1} << keep;
  const Eigen::Index de = Eigen::Index{1} << (total - keep);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      for (Eigen::Index e = 0; e < de; ++e) {
        rho(i, j) += v(i * de + e) * std::conj(v(j * de + e));
      }
    }
  }
  return rho;
}

}  // namespace

TEST_CASE("register rejects duplicate and unknown labels") {
  CHECK(code_of([] {
          Register({{"a", Statistics::bosonic, Species::massive}}, {{"a"}});
        }) == ErrorCode::LabelCollision);
  const auto reg = boson_pair();
  CHECK(code_of([&] { (void)reg.mode_index("zz"); }) == ErrorCode::UnknownLabel);
  CHECK(reg.mode_index("b") == 1);
  CHECK(reg.qubit_index("t") == 0);
}

TEST_CASE("construction enforces occupation, sector and emptiness rules") {
  const auto reg = boson_pair();
  SECTION("massive superposition across particle numbers") {
    CHECK(code_of([&] {
            make_state(reg, {{{{1, 0}, {0}}, 1.0}, {{{1, 1}, {0}}, 1.0}});
          }) == ErrorCode::SectorViolation);
  }
  SECTION("photons are exempt") {
    const Register ph({{"p", Statistics::bosonic, Species::photon}}, {});
    const auto s = make_state(ph, {{{{0}, {}}, 1.0}, {{{1}, {}}, 1.0}});
    CHECK(s.size() == 2);
  }
  SECTION("fermion double occupation") {
    const Register f({{"f", Statistics::fermionic, Species::massive}}, {});
    CHECK(code_of([&] { make_state(f, {{{{2}, {}}, 1.0}}); }) ==
          ErrorCode::IllegalOccupation);
  }
  SECTION("qubit value out of range") {
    CHECK(code_of([&] { make_state(reg, {{{{1, 0}, {2}}, 1.0}}); }) ==
          ErrorCode::IllegalOccupation);
  }
  SECTION("all amplitudes zero") {
    CHECK(code_of([&] { make_state(reg, {{{{1, 0}, {0}}, 0.0}}); }) ==
          ErrorCode::EmptyState);
  }
  SECTION("unnormalized terms without normalize") {
    PureState::Terms t{{{{1, 0}, {0}}, 2.0}};
    CHECK(code_of([&] { PureState::from_terms(reg, t, false); }) ==
          ErrorCode::NotIsometric);
  }
}

TEST_CASE("make_state normalizes and records the sector") {
  testing_support::Gen gen(11);
  const auto reg = boson_pair();
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(0, 6);
    std::vector<std::pair<BasisState, cplx>> entries;
    for (int k = 0; k <= n; ++k) {
      entries.emplace_back(
          BasisState{{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(n - k)},
                     {static_cast<std::uint8_t>(gen.integer(0, 1))}},
          gen.complex());
    }
    const auto s = make_state(reg, entries);
    CHECK_THAT(s.norm_squared(), WithinAbs(1.0, 1e-13));
    CHECK(s.particle_number() == static_cast<std::uint64_t>(n));
  }
}

TEST_CASE("inner product is conjugate-linear in the first argument") {
  const auto reg = boson_pair();
  const auto a = make_state(reg, {{{{1, 0}, {0}}, cplx{0, 1}}});
  const auto b = make_state(reg, {{{{1, 0}, {0}}, 1.0}, {{{0, 1}, {0}}, 1.0}});
  CHECK_THAT(std::abs(inner_product(a, b) - cplx{0, -1} / std::sqrt(2.0)),
             WithinAbs(0.0, 1e-15));
  const auto other = make_state(Register({}, {{"t"}}), {{{{}, {0}}, 1.0}});
  CHECK(code_of([&] { (void)inner_product(a, other); }) == ErrorCode::RegisterMismatch);
}

TEST_CASE("tensor_embed multiplies amplitudes and rejects shared labels") {
  const auto q = testing_support::qubit_register(1);
  const auto plus = make_state(q, {{{{}, {0}}, 1.0}, {{{}, {1}}, 1.0}});
  const auto other = make_state(Register({}, {{"r"}}), {{{{}, {1}}, 1.0}});
  const auto prod = tensor_embed(plus, other);
  CHECK(prod.reg().num_qubits() == 2);
  CHECK_THAT(prod.amplitude({{}, {0, 1}}).real(), WithinAbs(1 / std::sqrt(2.0), 1e-15));
  CHECK(prod.amplitude({{}, {0, 0}}) == cplx{0.0});
  CHECK(code_of([&] { (void)tensor_embed(plus, plus); }) == ErrorCode::LabelCollision);
}

TEST_CASE("partial trace agrees with a dense reduction") {
  testing_support::Gen gen(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int total = gen.integer(2, 5);
    const int keep = gen.integer(1, total - 1);
    const auto v = gen.vector(Eigen::Index{1} << total);
    const auto psi = testing_support::qubit_state(total, v);
    std::vector<std::string> names;
    for (int q = 0; q < keep; ++q) names.push_back("q" + std::to_string(q));
    const auto rho = partial_trace(psi, names);
    const auto expect = dense_reduce(v, total, keep);
    REQUIRE(rho.matrix().rows() == expect.rows());
    CHECK((rho.matrix() - expect).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("reduced states are valid and share their Schmidt spectrum") {
  testing_support::Gen gen(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto v = gen.vector(16);
    const auto psi = testing_support::qubit_state(4, v);
    const auto a = partial_trace(psi, {"q0", "q1"});
    const auto b = partial_trace(psi, {"q2", "q3"});
    CHECK_THAT(a.matrix().trace().real(), WithinAbs(1.0, 1e-13));
    CHECK((a.matrix() - a.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    auto ea = a.eigenvalues();
    auto eb = b.eigenvalues();
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    CHECK(ea.minCoeff() > -1e-12);
    CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("partial trace of a density matrix composes") {
  testing_support::Gen gen(5);
  const auto v = gen.vector(8);
  const auto psi = testing_support::qubit_state(3, v);
  const auto direct = partial_trace(psi, {"q0"});
  const auto staged = partial_trace(partial_trace(psi, {"q0", "q1"}), {"q0"});
  CHECK((direct.matrix() - staged.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(partial_trace(psi, {"nope"}), Error);
}

TEST_CASE("mode subsystems list occurring configurations") {
  const auto reg = boson_pair();
  const auto s = make_state(reg, {{{{1, 0}, {1}}, 1.0}, {{{0, 1}, {0}}, 1.0}});
  const auto rho = partial_trace(s, {"a"});
  REQUIRE(rho.dim() == 2);
  CHECK_THAT(rho.matrix()(0, 0).real(), WithinAbs(0.5, 1e-15));
  CHECK_THAT(std::abs(rho.matrix()(0, 1)), WithinAbs(0.0, 1e-15));
  const auto full = to_density_matrix(s);
  CHECK_THAT(full.matrix().trace().real(), WithinAbs(1.0, 1e-15));
}

TEST_CASE("density matrix constructor rejects invalid input") {
  const auto reg = testing_support::qubit_register(1);
  std::vector<BasisState> basis{{{}, {0}}, {{}, {1}}};
  Eigen::MatrixXcd m(2, 2);
  m << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(DensityMatrix(reg, basis, m), Error);
  m << 0.5, 0.7, 0.1, 0.5;
  CHECK_THROWS_AS(DensityMatrix(reg, basis, m), Error);
}
