// Copyright 2026 The RAGE Authors
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

#include <gtest/gtest.h>

#include <cmath>

#include "rage/hamiltonian.hpp"
#include "rage/oracle.hpp"
#include "test_util.hpp"

namespace rage {
namespace {

using testing::max_abs;

// Ground energy of the 4x4 periodic lattice at B = 2 from an independent
// sparse eigensolver (scipy eigsh on the same Hamiltonian).
constexpr double kIsing4x4B2 = -40.19019443767043;

DenseState basis_state(int n, Eigen::Index idx) {
  DenseState v{n, Vec::Zero(Eigen::Index{1} << n)};
  v.amplitudes(idx) = 1.0;
  return v;
}

TEST(Expand, PlainMpsByProducts) {
  Rng rng(41);
  const MpsTensorSet mps = MpsTensorSet::random(4, 2, Boundary::kPeriodic, rng);
  const DenseState v = expand(RageState(mps));
  EXPECT_LT((v.amplitudes - expand(mps).amplitudes).norm(), 1e-15);
  const Mat prod = mps.tensor(0, 1) * mps.tensor(1, 0) * mps.tensor(2, 1) *
                   mps.tensor(3, 1);
  EXPECT_LT(std::abs(v.amplitudes(0b1011) - prod.trace()), 1e-14);
}

TEST(Expand, ControlledZOnPlusPlus) {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Eigen::Vector2cd> sites(2, Eigen::Vector2cd(r, r));
  RageState st(MpsTensorSet::product(sites));
  st.phi().set(0, 1, kPi);
  Vec expected(4);
  expected << 0.5, 0.5, 0.5, -0.5;
  EXPECT_LT((expand(st).amplitudes - expected).norm(), 1e-15);
}

TEST(Expand, CapEnforced) {
  EXPECT_THROW(check_oracle_size(17), std::invalid_argument);
  EXPECT_NO_THROW(check_oracle_size(16));
  const RageState st(MpsTensorSet(6, 1, Boundary::kOpen));
  EXPECT_THROW(expand(st, 5), std::invalid_argument);
}

TEST(Gates, OneQubitAndControlledPhase) {
  DenseState v = basis_state(3, 0b010);
  apply_one_qubit(v, 0, pauli(Pauli::kX));
  EXPECT_EQ(v.amplitudes(0b110), Complex(1.0));
  apply_controlled_phase(v, 0, 1, 0.3);
  EXPECT_LT(std::abs(v.amplitudes(0b110) - std::polar(1.0, 0.3)), 1e-15);
  apply_controlled_phase(v, 0, 2, 0.3);
  EXPECT_LT(std::abs(v.amplitudes(0b110) - std::polar(1.0, 0.3)), 1e-15);
}

TEST(DenseHamiltonian, ApplyMatchesMatrix) {
  Rng rng(42);
  Hamiltonian h(4);
  h.add_pauli(0.3, {{0, Pauli::kX}, {3, Pauli::kY}});
  h.add_pauli(-1.2, {{1, Pauli::kZ}});
  h.add_pauli(0.7, {{2, Pauli::kY}, {1, Pauli::kX}});
  const Vec v = rng.complex_normal(16, 1);
  EXPECT_LT((dense_hamiltonian(h) * v - apply_hamiltonian(h, v)).norm(), 1e-13);
  const Mat2 x = pauli(Pauli::kX), y = pauli(Pauli::kY), z = pauli(Pauli::kZ);
  const Mat2 id = Mat2::Identity();
  const std::vector<Mat2> t1{x, id, id, y}, t2{id, z, id, id}, t3{id, x, y, id};
  const Mat expected = 0.3 * tensor_product(t1) - 1.2 * tensor_product(t2) +
                       0.7 * tensor_product(t3);
  EXPECT_LT(max_abs(dense_hamiltonian(h) - expected), 1e-15);
}

TEST(ExactGround, TransverseFieldOnly) {
  const int n = 5;
  Hamiltonian h(n);
  for (int j = 0; j < n; ++j) h.add_pauli(-1.0, {{j, Pauli::kX}});
  const GroundState g = exact_ground(h);
  EXPECT_NEAR(g.energy, -n, 1e-12);
  const DenseState plus{n, Vec::Ones(32)};
  EXPECT_NEAR(fidelity(g.vector, plus), 1.0, 1e-12);
  EXPECT_LE(g.residual, 1e-8);
}

TEST(ExactGround, TwoSiteClassical) {
  const GroundState g = exact_ground(build_ising_1d(2, 0.0));
  EXPECT_NEAR(g.energy, -1.0, 1e-14);
  const Vec& a = g.vector.amplitudes;
  EXPECT_NEAR(std::norm(a(0b01)) + std::norm(a(0b10)), a.squaredNorm(), 1e-12);
}

TEST(ExactGround, DenseAndLanczosAgree) {
  const Hamiltonian h = build_ising_2d(2, 4, 1.4);
  const GroundState dense = exact_ground(h);
  const GroundState lanczos = exact_ground(h, kOracleMaxQubits, 4);
  EXPECT_NEAR(dense.energy, lanczos.energy, 1e-10);
  EXPECT_LE(lanczos.residual, 1e-8);
  EXPECT_NEAR(fidelity(dense.vector, lanczos.vector), 1.0, 1e-8);
}

TEST(ExactGround, Ising4x4PinnedValue) {
  const GroundState g = exact_ground(build_ising_2d(4, 4, 2.0));
  EXPECT_NEAR(g.energy, kIsing4x4B2, 1e-8);
  EXPECT_LE(g.residual, 1e-8);
}

TEST(Fidelity, Basics) {
  Rng rng(43);
  const DenseState a{4, rng.complex_normal(16, 1)};
  const DenseState b{4, rng.complex_normal(16, 1)};
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-14);
  EXPECT_EQ(fidelity(basis_state(3, 1), basis_state(3, 6)), 0.0);
  const DenseState phased{4, std::polar(2.0, 1.1) * b.amplitudes};
  EXPECT_NEAR(fidelity(a, phased), fidelity(a, b), 1e-14);

  Complex inner = 0.0;
  double na = 0.0, nb = 0.0;
  for (int i = 0; i < 16; ++i) {
    inner += std::conj(a.amplitudes(i)) * b.amplitudes(i);
    na += std::norm(a.amplitudes(i));
    nb += std::norm(b.amplitudes(i));
  }
  EXPECT_NEAR(fidelity(a, b), std::norm(inner) / (na * nb), 1e-12);

  EXPECT_THROW(fidelity(a, basis_state(3, 0)), std::invalid_argument);
  const DenseState zero{4, Vec::Zero(16)};
  EXPECT_THROW(fidelity(a, zero), DegenerateNormError);
}

TEST(ExactRdm, IndexSummation) {
  Rng rng(44);
  const DenseState v{3, rng.complex_normal(8, 1)};
  const std::vector<int> s{1};
  const Mat rho = exact_rdm(v, s);
  Mat expected = Mat::Zero(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z)
          expected(a, b) += v.amplitudes(4 * x + 2 * a + z) *
                            std::conj(v.amplitudes(4 * x + 2 * b + z));
  expected /= v.amplitudes.squaredNorm();
  EXPECT_LT(max_abs(rho - expected), 1e-15);
}

TEST(ExactEntropy, ProductBellAndPairs) {
  const DenseState product{4, Vec::Ones(16)};
  const std::vector<int> s{0, 1};
  EXPECT_NEAR(exact_entropy(product, 2), 0.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(exact_rdm(product, s));
  EXPECT_NEAR(es.eigenvalues()(3), 1.0, 1e-12);

  const double r = 1.0 / std::sqrt(2.0);
  RageState bell(MpsTensorSet::product(
      std::vector<Eigen::Vector2cd>(2, Eigen::Vector2cd(r, r))));
  bell.phi().set(0, 1, kPi);
  EXPECT_NEAR(exact_entropy(expand(bell), 1), std::log(2.0), 1e-12);

  RageState pairs(MpsTensorSet::product(
      std::vector<Eigen::Vector2cd>(8, Eigen::Vector2cd(r, r))));
  for (int i = 0; i < 4; ++i) pairs.phi().set(i, 7 - i, kPi);
  EXPECT_NEAR(exact_entropy(expand(pairs), 4), 4.0 * std::log(2.0), 1e-10);
  EXPECT_THROW(exact_entropy(product, 5), std::invalid_argument);
}

TEST(ExactExpectation, MatchesDenseProduct) {
  Rng rng(45);
  const DenseState v{3, rng.complex_normal(8, 1)};
  const std::vector<int> s{0, 2};
  const Mat op = testing::random_hermitian(4, rng);
  Mat full = Mat::Zero(8, 8);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < 2; ++m)
        full(4 * (a >> 1) + 2 * m + (a & 1), 4 * (b >> 1) + 2 * m + (b & 1)) =
            op(a, b);
  const double expected = (v.amplitudes.dot(full * v.amplitudes)).real() /
                          v.amplitudes.squaredNorm();
  EXPECT_NEAR(exact_expectation(v, s, op), expected, 1e-13);
}

}  // namespace
}  // namespace rage
