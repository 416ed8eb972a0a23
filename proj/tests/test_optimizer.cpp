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
#include "rage/optimizer.hpp"
#include "rage/oracle.hpp"
#include "test_util.hpp"

namespace rage {
namespace {

using testing::random_two_local;

RageState plus_product(int n) {
  const double r = 1.0 / std::sqrt(2.0);
  return RageState(MpsTensorSet::product(
      std::vector<Eigen::Vector2cd>(n, Eigen::Vector2cd(r, r))));
}

RageState zero_product(int n) {
  return RageState(MpsTensorSet::product(
      std::vector<Eigen::Vector2cd>(n, Eigen::Vector2cd(1.0, 0.0))));
}

Hamiltonian field_x(int n, double b) {
  Hamiltonian h(n);
  for (int j = 0; j < n; ++j) h.add_pauli(b, {{j, Pauli::kX}});
  return h;
}

TEST(LocalMpsUpdate, SeparableGroundState) {
  Rng rng(51);
  RageState st(MpsTensorSet::random(2, 1, Boundary::kOpen, rng));
  const Hamiltonian h = field_x(2, -1.0);
  local_mps_update(st, h, 0);
  const UpdateResult r = local_mps_update(st, h, 1);
  EXPECT_TRUE(r.applied);
  EXPECT_NEAR(r.energy, -2.0, 1e-12);
  EXPECT_NEAR(energy(st, h), -2.0, 1e-12);
  EXPECT_THROW(local_mps_update(st, h, 2), std::out_of_range);
}

TEST(LocalMpsUpdate, NeverIncreasesEnergy) {
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 4;
    const Hamiltonian h = random_two_local(n, rng);
    RageState st = testing::make_state(n, 1 + trial % 3,
                                       trial % 2 ? Boundary::kPeriodic
                                                 : Boundary::kOpen,
                                       300 + trial, true, false);
    const int site = static_cast<int>(rng.below(n));
    const double before = energy(st, h);
    const UpdateResult r = local_mps_update(st, h, site);
    const double after = energy(st, h);
    EXPECT_LE(after, before + 1e-9);
    EXPECT_NEAR(after, r.energy, 1e-9);
  }
}

TEST(LocalMpsUpdate, ZeroEnvironmentSkipsSite) {
  Rng rng(53);
  MpsTensorSet mps = MpsTensorSet::random(3, 2, Boundary::kOpen, rng);
  mps.scale_site(0, 0.0);
  RageState st(mps);
  const UpdateResult r = local_mps_update(st, field_x(3, 1.0), 1);
  EXPECT_FALSE(r.applied);
  EXPECT_EQ(st.mps(), mps);
}

TEST(Sweep, IsingChainBondFourIsNearExact) {
  const Hamiltonian h = build_ising_1d(8, 1.0);
  const double exact = exact_ground(h).energy;
  Rng rng(54);
  RageState st(MpsTensorSet::random(8, 4, Boundary::kOpen, rng));
  SweepConfig cfg;
  cfg.phase_updates = false;
  cfg.rotation_updates = false;
  cfg.energy_tol = 1e-12;
  const EnergyTrace trace = sweep(st, h, cfg);
  EXPECT_LT((trace.final_energy - exact) / std::abs(exact), 1e-6);
  EXPECT_NEAR(energy(st, h), trace.final_energy, 1e-10);
  EXPECT_NEAR(mps_norm_sq(st.mps()), 1.0, 1e-12);
}

TEST(Sweep, TraceIsMonotone) {
  Rng rng(55);
  const Hamiltonian h = random_two_local(5, rng);
  RageState st = testing::make_state(5, 2, Boundary::kOpen, 56, false, false);
  SweepConfig cfg;
  cfg.max_sweeps = 4;
  double previous = energy(st, h);
  const EnergyTrace trace = sweep(st, h, cfg, [&](const TraceRecord& r) {
    EXPECT_LE(r.energy, previous + 1e-9)
        << to_string(r.kind) << " sweep " << r.sweep << " site " << r.site_a;
    previous = r.energy;
  });
  EXPECT_FALSE(trace.records.empty());
  EXPECT_NEAR(energy(st, h), trace.final_energy, 1e-9);
}

TEST(Sweep, MpsOnlyReduction) {
  const Hamiltonian h = build_ising_1d(6, 0.9, 1.0, true);
  Rng rng(57);
  const MpsTensorSet start = MpsTensorSet::random(6, 2, Boundary::kPeriodic, rng);
  SweepConfig cfg;
  cfg.phase_updates = false;
  cfg.rotation_updates = false;
  cfg.max_sweeps = 5;
  RageState st(start);
  const EnergyTrace a = sweep(st, h, cfg);
  MpsTensorSet bare = start;
  const EnergyTrace b = mps_sweep(bare, h, cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_NEAR(a.records[i].energy, b.records[i].energy, 1e-12);
  }
  EXPECT_TRUE(st.phi().is_zero());
  EXPECT_TRUE(st.rotations_identity());
  EXPECT_GT(fidelity(expand(st), expand(bare)), 1.0 - 1e-10);
}

TEST(Sweep, GraphEnhancementNoWorseThanMps) {
  const Hamiltonian h = build_ising_1d(10, 1.0);
  SweepConfig mps_cfg;
  mps_cfg.phase_updates = false;
  mps_cfg.rotation_updates = false;
  Rng rng(58);
  const MpsTensorSet start = MpsTensorSet::random(10, 2, Boundary::kOpen, rng);
  MpsTensorSet bare = start;
  const double mps_energy_value = mps_sweep(bare, h, mps_cfg).final_energy;
  RageState st(bare);
  const double rage_energy = sweep(st, h, SweepConfig{}).final_energy;
  EXPECT_LE(rage_energy, mps_energy_value + 1e-9);
}

TEST(Sweep, RejectsBadConfig) {
  RageState st = zero_product(2);
  SweepConfig cfg;
  cfg.max_sweeps = 0;
  EXPECT_THROW(sweep(st, field_x(2, 1.0), cfg), std::invalid_argument);
}

TEST(PhaseUpdate, DiagonalHamiltonianIsFlat) {
  RageState st = testing::make_state(4, 2, Boundary::kOpen, 59, true, false);
  Hamiltonian h(4);
  h.add_pauli(1.0, {{0, Pauli::kZ}, {2, Pauli::kZ}});
  h.add_pauli(0.5, {{1, Pauli::kZ}});
  const double before = st.phi()(0, 2);
  const UpdateResult r = local_phase_update(st, h, 0, 2);
  EXPECT_FALSE(r.applied);
  EXPECT_EQ(st.phi()(0, 2), before);
}

TEST(PhaseUpdate, MatchesGridScan) {
  Hamiltonian h(2);
  h.add_pauli(-1.0, {{0, Pauli::kZ}, {1, Pauli::kZ}});
  h.add_pauli(-1.0, {{0, Pauli::kX}});
  RageState st = plus_product(2);
  double best = 1e300;
  for (int i = 0; i < 6284; ++i) {
    RageState probe = st;
    probe.phi().set(0, 1, 1e-3 * i);
    best = std::min(best, energy(probe, h));
  }
  const UpdateResult r = local_phase_update(st, h, 0, 1);
  EXPECT_NEAR(r.energy, best, 1e-6);
  EXPECT_NEAR(energy(st, h), r.energy, 1e-12);
  EXPECT_LE(r.energy, best + 1e-12);
  EXPECT_THROW(local_phase_update(st, h, 1, 1), std::invalid_argument);
}

TEST(PhaseUpdate, ModelSelfConsistentAndMonotone) {
  Rng rng(60);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 4;
    const Hamiltonian h = random_two_local(n, rng);
    RageState st = testing::make_state(n, 2, Boundary::kOpen, 400 + trial);
    const int j = static_cast<int>(rng.below(n));
    const int k = (j + 1 + static_cast<int>(rng.below(n - 1))) % n;
    const PhaseQuadratic q = phase_quadratic(st, h, j, k);
    const double phi0 = st.phi()(j, k);
    const double before = energy(st, h);
    const UpdateResult r = local_phase_update(st, h, j, k);
    const double after = energy(st, h);
    EXPECT_LE(after, before + 1e-10);
    EXPECT_NEAR(after - before, q.value(st.phi()(j, k)) - q.value(phi0), 1e-9);
    EXPECT_NEAR(after, r.energy, 1e-9);
  }
}

TEST(PhaseUpdate, GraphOrDenseGateEquivalent) {
  RageState st = testing::make_state(5, 2, Boundary::kPeriodic, 61);
  DenseState dense = expand(RageState(st.mps(), st.phi(),
                                      std::vector<Mat2>(5, Mat2::Identity())));
  apply_controlled_phase(dense, 1, 3, 0.7);
  for (int k = 0; k < 5; ++k) apply_one_qubit(dense, k, st.rotation(k));
  st.phi().add(1, 3, 0.7);
  EXPECT_LT((expand(st).amplitudes - dense.amplitudes).norm(), 1e-12);
}

TEST(RotationUpdate, SingleQubitGroundState) {
  RageState st = zero_product(3);
  const Hamiltonian h = field_x(3, -1.0);
  const UpdateResult r = local_rotation_update(st, h, 0);
  EXPECT_NEAR(r.energy, -1.0, 1e-12);
  EXPECT_NEAR(energy(st, h), -1.0, 1e-12);
  EXPECT_TRUE(st.rotation_unitary(0));
  const Eigen::Vector2cd image = st.rotation(0).col(0);
  EXPECT_NEAR(std::abs(image(0) - image(1)), 0.0, 1e-10);
}

TEST(RotationUpdate, NeverIncreasesEnergy) {
  Rng rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 3;
    const Hamiltonian h = random_two_local(n, rng);
    RageState st = testing::make_state(n, 2, Boundary::kOpen, 500 + trial);
    const double before = energy(st, h);
    const UpdateResult r =
        local_rotation_update(st, h, static_cast<int>(rng.below(n)));
    const double after = energy(st, h);
    EXPECT_LE(after, before + 1e-10);
    EXPECT_NEAR(after, r.energy, 1e-9);
    EXPECT_TRUE(st.non_unitary_sites().empty());
  }
}

TEST(Quaternion, RoundTrip) {
  Rng rng(63);
  for (int i = 0; i < 10; ++i) {
    const Mat2 v = rng.haar_unitary2();
    const Eigen::Vector4d q = rotation_quaternion(v);
    EXPECT_NEAR(q.norm(), 1.0, 1e-14);
    EXPECT_GE(q(0), 0.0);
    const Mat2 w = quaternion_rotation(q);
    const Complex phase = (w.adjoint() * v).trace() / 2.0;
    EXPECT_NEAR(std::abs(phase), 1.0, 1e-12);
    EXPECT_LT(testing::max_abs(v - phase * w), 1e-12);
  }
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

TEST(Gradient, MatchesCentralDifferences) {
  Rng rng(64);
  const double eps = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 4 + trial % 2;
    const Hamiltonian h = random_two_local(n, rng);
    const RageState st = testing::make_state(n, 2, trial % 2 ? Boundary::kPeriodic
                                                             : Boundary::kOpen,
                                             600 + trial, true, false);
    const auto pairs = phase_pair_list(n, SweepConfig{});
    const EnergyGradient g = energy_gradient(st, h, pairs);
    EXPECT_NEAR(g.energy, energy(st, h), 1e-12);
    for (int check = 0; check < 6; ++check) {
      const int site = static_cast<int>(rng.below(n));
      const int idx = static_cast<int>(rng.below(g.tensors[site].size()));
      const bool imag = rng.uniform() < 0.5;
      auto shifted = [&](double delta) {
        RageState p = st;
        Vec a = flatten_site(p.mps().site(site));
        a(idx) += imag ? Complex(0.0, delta) : Complex(delta, 0.0);
        const auto t = unflatten_site(a, p.mps().left_dim(site),
                                      p.mps().right_dim(site));
        p.mps().set_tensor(site, 0, t[0]);
        p.mps().set_tensor(site, 1, t[1]);
        return energy(p, h);
      };
      const double fd = (shifted(eps) - shifted(-eps)) / (2 * eps);
      const Complex gi = g.tensors[site](idx);
      const double analytic = 2.0 * (imag ? gi.imag() : gi.real());
      EXPECT_LT(relative_error(analytic, fd), 1e-4) << "tensor entry";
    }
    for (std::size_t p = 0; p < pairs.size(); p += 3) {
      auto shifted = [&](double delta) {
        RageState q = st;
        q.phi().add(pairs[p].first, pairs[p].second, delta);
        return energy(q, h);
      };
      const double fd = (shifted(eps) - shifted(-eps)) / (2 * eps);
      EXPECT_LT(relative_error(g.phases[p], fd), 1e-4) << "phase";
    }
  }
}

TEST(Gradient, RotationMatchesCentralDifferences) {
  Rng rng(65);
  const double eps = 1e-5;
  const Hamiltonian h = random_two_local(4, rng);
  const RageState st = testing::make_state(4, 2, Boundary::kOpen, 66);
  const auto grads = rotation_gradient(st, h);
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector4d q = rotation_quaternion(st.rotation(k));
    EXPECT_NEAR(grads[k].dot(q), 0.0, 1e-10);
    for (int a = 0; a < 4; ++a) {
      auto shifted = [&](double delta) {
        Eigen::Vector4d moved = q;
        moved(a) += delta;
        RageState p = st;
        p.set_rotation(k, quaternion_rotation(moved));
        return energy(p, h);
      };
      const double fd = (shifted(eps) - shifted(-eps)) / (2 * eps);
      EXPECT_LT(relative_error(grads[k](a), fd), 1e-4);
    }
  }
}

TEST(Gradient, VanishesAtSweepFixedPoint) {
  const Hamiltonian h = build_ising_1d(6, 0.8);
  Rng rng(67);
  MpsTensorSet mps = MpsTensorSet::random(6, 2, Boundary::kOpen, rng);
  SweepConfig cfg;
  cfg.max_sweeps = 400;
  cfg.energy_tol = 1e-15;
  mps_sweep(mps, h, cfg);
  const EnergyGradient g = energy_gradient(RageState(mps), h, {});
  for (const Vec& t : g.tensors) EXPECT_LT(t.norm(), 1e-6);
}

TEST(GradientRefine, DescentNeverIncreases) {
  Rng rng(68);
  const Hamiltonian h = random_two_local(5, rng);
  for (GradientMethod m : {GradientMethod::kSteepestDescent, GradientMethod::kLbfgs}) {
    RageState st = testing::make_state(5, 2, Boundary::kOpen, 69, true, false);
    SweepConfig cfg;
    cfg.gradient_steps = 30;
    cfg.gradient_method = m;
    const double start = energy(st, h);
    const EnergyTrace trace = gradient_refine(st, h, cfg);
    double previous = start;
    for (const TraceRecord& r : trace.records) {
      EXPECT_LE(r.energy, previous + 1e-12);
      previous = r.energy;
    }
    EXPECT_LT(trace.final_energy, start);
    EXPECT_NEAR(energy(st, h), trace.final_energy, 1e-10);
  }
}

TEST(GradientRefine, RotationsAndPerturbationKeepBest) {
  const Hamiltonian h = build_ising_1d(4, 1.0);
  RageState st = testing::make_state(4, 1, Boundary::kOpen, 70, false, false);
  SweepConfig cfg;
  cfg.gradient_steps = 100;
  cfg.gradient_method = GradientMethod::kLbfgs;
  cfg.gradient_rotations = true;
  cfg.perturbation = 0.2;
  cfg.seed = 3;
  RageState plain = st;
  SweepConfig no_kick = cfg;
  no_kick.perturbation = 0.0;
  const double unkicked = gradient_refine(plain, h, no_kick).final_energy;
  const double kept = gradient_refine(st, h, cfg).final_energy;
  EXPECT_LE(kept, unkicked + 1e-12);
  EXPECT_TRUE(st.non_unitary_sites().empty());
  EXPECT_EQ(gradient_method_from_string(to_string(GradientMethod::kLbfgs)),
            GradientMethod::kLbfgs);
  EXPECT_THROW(gradient_method_from_string("newton"), std::invalid_argument);
}

TEST(PhasePairs, AllOrEdgeList) {
  SweepConfig cfg;
  EXPECT_EQ(phase_pair_list(4, cfg).size(), 6u);
  cfg.phase_pairs = PhasePairs::kEdgeList;
  cfg.edge_list = {{0, 3}, {1, 2}};
  EXPECT_EQ(phase_pair_list(4, cfg).size(), 2u);
}

}  // namespace
}  // namespace rage
