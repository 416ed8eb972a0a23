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

#include "rage/chain.hpp"
#include "rage/graph.hpp"
#include "rage/oracle.hpp"
#include "test_util.hpp"

namespace rage {
namespace {

using testing::max_abs;

TEST(AdjacencyPhaseMatrix, SymmetricWrappedZeroDiagonal) {
  AdjacencyPhaseMatrix phi(4);
  phi.set(0, 2, -0.5);
  phi.set(3, 1, 7.0);
  phi.add(0, 2, kTwoPi);
  EXPECT_NEAR(phi(0, 2), kTwoPi - 0.5, 1e-14);
  EXPECT_EQ(phi(2, 0), phi(0, 2));
  EXPECT_NEAR(phi(1, 3), 7.0 - kTwoPi, 1e-14);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(phi(k, k), 0.0);
  EXPECT_EQ(phi.edges().size(), 2u);
  ASSERT_EQ(phi.neighbors(2).size(), 1u);
  EXPECT_EQ(phi.neighbors(2)[0].first, 0);
  phi.set(0, 2, 0.0);
  EXPECT_TRUE(phi.neighbors(2).empty());
}

TEST(AdjacencyPhaseMatrix, Errors) {
  AdjacencyPhaseMatrix phi(3);
  EXPECT_THROW(phi.set(1, 1, 0.3), std::invalid_argument);
  EXPECT_THROW(phi.set(0, 3, 0.3), std::out_of_range);
  EXPECT_THROW(phi.set(0, 1, std::nan("")), std::invalid_argument);
}

TEST(RestrictPhases, ZeroGraph) {
  AdjacencyPhaseMatrix phi(5);
  const std::vector<int> s{1, 3};
  EXPECT_EQ(restrict_phases(phi, s).omega, RealMat::Zero(5, 5));
}

TEST(RestrictPhases, ByDefinition) {
  AdjacencyPhaseMatrix phi(3);
  phi.set(0, 1, kPi);
  phi.set(1, 2, kPi / 2);
  const std::vector<int> middle{1};
  const RealMat w = restrict_phases(phi, middle).omega;
  EXPECT_DOUBLE_EQ(w(0, 1), kPi);
  EXPECT_DOUBLE_EQ(w(1, 0), kPi);
  EXPECT_DOUBLE_EQ(w(1, 2), kPi / 2);
  EXPECT_DOUBLE_EQ(w(2, 1), kPi / 2);
  EXPECT_EQ(w(0, 2), 0.0);

  const std::vector<int> first_two{0, 1};
  const RealMat w2 = restrict_phases(phi, first_two).omega;
  EXPECT_EQ(w2(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(w2(1, 2), kPi / 2);
  EXPECT_DOUBLE_EQ(w2(2, 1), kPi / 2);
  EXPECT_EQ((w2.array() != 0.0).count(), 2);
}

TEST(RestrictPhases, IdempotentAndValidated) {
  Rng rng(3);
  const RageState st = testing::make_state(6, 1, Boundary::kOpen, 3);
  const std::vector<int> s{0, 4};
  const RestrictedPhaseMatrix once = restrict_phases(st.phi(), s);
  AdjacencyPhaseMatrix again(6);
  for (int k = 0; k < 6; ++k)
    for (int l = k + 1; l < 6; ++l) again.set(k, l, once.omega(k, l));
  EXPECT_EQ(restrict_phases(again, s).omega, once.omega);

  const std::vector<int> dup{2, 2};
  const std::vector<int> out_of_range{1, 6};
  EXPECT_THROW(restrict_phases(st.phi(), dup), std::invalid_argument);
  EXPECT_THROW(restrict_phases(st.phi(), out_of_range), std::out_of_range);
}

TEST(IntraSupportGate, SingleSiteIsIdentity) {
  AdjacencyPhaseMatrix phi(3);
  phi.set(0, 1, 1.0);
  const std::vector<int> s{0};
  const Vec d = intra_support_phase_gate(phi, s);
  EXPECT_EQ(d, Vec::Ones(2));
}

TEST(IntraSupportGate, ControlledZ) {
  AdjacencyPhaseMatrix phi(2);
  phi.set(0, 1, kPi);
  const std::vector<int> s{0, 1};
  const Vec d = intra_support_phase_gate(phi, s);
  EXPECT_LT(std::abs(d(0) - 1.0) + std::abs(d(1) - 1.0) +
                std::abs(d(2) - 1.0) + std::abs(d(3) + 1.0),
            1e-15);
}

TEST(IntraSupportGate, MatchesGateProduct) {
  Rng rng(4);
  AdjacencyPhaseMatrix phi(5);
  for (int k = 0; k < 5; ++k)
    for (int l = k + 1; l < 5; ++l) phi.set(k, l, rng.uniform(0.0, kTwoPi));
  const std::vector<int> s{0, 2, 3};
  const Vec d = intra_support_phase_gate(phi, s);
  DenseState v{3, Vec::Ones(8)};
  apply_controlled_phase(v, 0, 1, phi(0, 2));
  apply_controlled_phase(v, 0, 2, phi(0, 3));
  apply_controlled_phase(v, 1, 2, phi(2, 3));
  EXPECT_LT((v.amplitudes - d).norm(), 1e-14);
  EXPECT_LT((d.cwiseAbs() - RealVec::Ones(8)).norm(), 1e-14);
  const std::vector<int> too_big{0, 1, 2, 3, 4};
  EXPECT_THROW(intra_support_phase_gate(phi, too_big), std::invalid_argument);
}

TEST(PhaseModifiedB, ZeroOmegaAndPiPhase) {
  Rng rng(5);
  const MpsTensorSet mps = MpsTensorSet::random(4, 2, Boundary::kPeriodic, rng);
  AdjacencyPhaseMatrix phi(4);
  const std::vector<int> s{1};
  const SupportAssignment one{{1}, {1}};
  for (int l = 0; l < 2; ++l) {
    EXPECT_EQ(phase_modified_b(mps, 2, restrict_phases(phi, s), one, l),
              mps.tensor(2, l));
  }
  phi.set(1, 2, kPi);
  const RestrictedPhaseMatrix w = restrict_phases(phi, s);
  EXPECT_LT(max_abs(phase_modified_b(mps, 2, w, one, 1) + mps.tensor(2, 1)),
            1e-15);
  EXPECT_EQ(phase_modified_b(mps, 2, w, one, 0), mps.tensor(2, 0));
  EXPECT_THROW(phase_modified_b(mps, 1, w, one, 1), std::invalid_argument);
}

TEST(PhaseModifiedB, FactorsMultiply) {
  Rng rng(6);
  const MpsTensorSet mps = MpsTensorSet::random(5, 2, Boundary::kOpen, rng);
  AdjacencyPhaseMatrix phi(5);
  phi.set(0, 3, 0.7);
  phi.set(1, 3, 2.1);
  const std::vector<int> s{0, 1};
  const RestrictedPhaseMatrix w = restrict_phases(phi, s);
  const Mat both = phase_modified_b(mps, 3, w, {{0, 1}, {1, 1}}, 1);
  const Mat a = phase_modified_b(mps, 3, w, {{0, 1}, {1, 0}}, 1);
  const Mat b = phase_modified_b(mps, 3, w, {{0, 1}, {0, 1}}, 1);
  const Complex fa = a(0, 0) / mps.tensor(3, 1)(0, 0);
  const Complex fb = b(0, 0) / mps.tensor(3, 1)(0, 0);
  EXPECT_LT(max_abs(both - fa * fb * mps.tensor(3, 1)), 1e-14);
}

TEST(PhaseModifiedTransfer, ZeroOmegaIsNormOperator) {
  Rng rng(7);
  const MpsTensorSet mps = MpsTensorSet::random(4, 3, Boundary::kPeriodic, rng);
  const AdjacencyPhaseMatrix phi(4);
  const std::vector<int> s{0};
  const SupportAssignment a0{{0}, {0}}, a1{{0}, {1}};
  const Mat t = phase_modified_transfer(mps, 2, restrict_phases(phi, s), a0, a1)
                    .matrix;
  const Mat e = transfer_operator(mps, 2, 0, 0).matrix +
                transfer_operator(mps, 2, 1, 1).matrix;
  EXPECT_EQ(t, e);
}

TEST(PhaseModifiedTransfer, PiPhaseSigns) {
  Rng rng(8);
  const MpsTensorSet mps = MpsTensorSet::random(3, 2, Boundary::kOpen, rng);
  AdjacencyPhaseMatrix phi(3);
  phi.set(0, 1, kPi);
  const std::vector<int> s{0};
  const RestrictedPhaseMatrix w = restrict_phases(phi, s);
  const SupportAssignment up{{0}, {1}}, down{{0}, {0}};
  const Mat e00 = transfer_operator(mps, 1, 0, 0).matrix;
  const Mat e11 = transfer_operator(mps, 1, 1, 1).matrix;
  EXPECT_LT(max_abs(phase_modified_transfer(mps, 1, w, up, down).matrix -
                    (e00 - e11)),
            1e-14);
  EXPECT_LT(max_abs(phase_modified_transfer(mps, 1, w, up, up).matrix -
                    (e00 + e11)),
            1e-14);
  const SupportAssignment other{{2}, {1}};
  EXPECT_THROW(phase_modified_transfer(mps, 1, w, up, other),
               std::invalid_argument);
}

TEST(PhaseModifiedTransfer, EntrywiseOracle) {
  Rng rng(9);
  const MpsTensorSet mps = MpsTensorSet::random(4, 2, Boundary::kPeriodic, rng);
  AdjacencyPhaseMatrix phi(4);
  for (int k = 0; k < 4; ++k)
    for (int l = k + 1; l < 4; ++l) phi.set(k, l, rng.uniform(0.0, kTwoPi));
  const std::vector<int> s{0, 3};
  const RestrictedPhaseMatrix w = restrict_phases(phi, s);
  const SupportAssignment as{{0, 3}, {1, 1}}, ar{{0, 3}, {0, 1}};
  const Mat t = phase_modified_transfer(mps, 1, w, as, ar).matrix;
  Mat expected = Mat::Zero(4, 4);
  for (int l = 0; l < 2; ++l) {
    const double angle_s = l * (phi(0, 1) + phi(3, 1));
    const double angle_r = l * phi(3, 1);
    expected += std::polar(1.0, angle_s - angle_r) *
                transfer_operator(mps, 1, l, l).matrix;
  }
  EXPECT_LT(max_abs(t - expected), 1e-14);
}

TEST(SupportEntryCoefficients, ReproducesDenseMatrixEntry) {
  // Contracting the coefficient chain gives the support density before the
  // intra-support gate, here checked against the dense phase-only state.
  Rng rng(10);
  const MpsTensorSet mps = MpsTensorSet::random(5, 2, Boundary::kOpen, rng);
  AdjacencyPhaseMatrix phi(5);
  for (int k = 0; k < 5; ++k)
    for (int l = k + 1; l < 5; ++l) phi.set(k, l, rng.uniform(0.0, kTwoPi));
  const std::vector<int> s{1, 3};
  const RageState st(mps, phi, std::vector<Mat2>(5, Mat2::Identity()));
  const DenseState v = expand(st);
  Mat dense = exact_rdm(v, s) * mps_norm_sq(mps);
  const Vec gate = intra_support_phase_gate(phi, s);
  dense = gate.conjugate().asDiagonal() * dense * gate.asDiagonal();
  for (int si = 0; si < 4; ++si) {
    for (int ri = 0; ri < 4; ++ri) {
      const Complex value =
          contract_chain(mps, mps, support_entry_coefficients(phi, s, si, ri));
      EXPECT_LT(std::abs(value - dense(si, ri)), 1e-12);
    }
  }
}

}  // namespace
}  // namespace rage
