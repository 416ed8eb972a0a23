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
#include "rage/linalg.hpp"
#include "rage/mps.hpp"
#include "rage/oracle.hpp"
#include "test_util.hpp"

namespace rage {
namespace {

using testing::max_abs;

MpsTensorSet scalar_site(Complex a, Complex b) {
  MpsTensorSet m(1, 1, Boundary::kOpen);
  m.set_tensor(0, 0, Mat::Constant(1, 1, a));
  m.set_tensor(0, 1, Mat::Constant(1, 1, b));
  return m;
}

TEST(TransferOperator, ScalarKronecker) {
  const Complex a(0.3, -1.2), b(2.0, 0.5);
  const MpsTensorSet m = scalar_site(a, b);
  const TransferOperator e = transfer_operator(m, 0, 0, 1);
  ASSERT_EQ(e.matrix.rows(), 1);
  EXPECT_NEAR(std::abs(e.matrix(0, 0) - a * std::conj(b)), 0.0, 1e-15);
}

TEST(TransferOperator, IdentityTensors) {
  MpsTensorSet m(3, 2, Boundary::kPeriodic);
  for (int s = 0; s < 2; ++s) m.set_tensor(1, s, Mat::Identity(2, 2));
  for (int s = 0; s < 2; ++s) {
    for (int r = 0; r < 2; ++r) {
      EXPECT_EQ(transfer_operator(m, 1, s, r).matrix, Mat::Identity(4, 4));
    }
  }
}

TEST(TransferOperator, MatchesFourIndexLoop) {
  Rng rng(11);
  const MpsTensorSet m = MpsTensorSet::random(3, 3, Boundary::kPeriodic, rng);
  for (int s = 0; s < 2; ++s) {
    for (int r = 0; r < 2; ++r) {
      const Mat e = transfer_operator(m, 1, s, r).matrix;
      const Mat& as = m.tensor(1, s);
      const Mat& ar = m.tensor(1, r);
      double err = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
              err = std::max(err, std::abs(e(i * 3 + j, p * 3 + q) -
                                           as(i, p) * std::conj(ar(j, q))));
      EXPECT_LT(err, 1e-15);
    }
  }
}

TEST(TransferOperator, SwapConjugateSymmetry) {
  Rng rng(12);
  const MpsTensorSet m = MpsTensorSet::random(4, 2, Boundary::kOpen, rng);
  const Mat e01 = transfer_operator(m, 2, 0, 1).matrix;
  const Mat e10 = transfer_operator(m, 2, 1, 0).matrix;
  // Swapping the Kronecker factors is a permutation of both indices.
  Mat swapped(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          swapped(i * 2 + j, p * 2 + q) = std::conj(e10(j * 2 + i, q * 2 + p));
  EXPECT_LT(max_abs(swapped - e01), 1e-15);
}

TEST(TransferOperator, RejectsBadSite) {
  MpsTensorSet m(2, 2, Boundary::kOpen);
  EXPECT_THROW(transfer_operator(m, 2, 0, 0), std::out_of_range);
  EXPECT_THROW(transfer_operator(m, -1, 0, 0), std::out_of_range);
}

TEST(MpsShapes, OpenBoundaryEnds) {
  MpsTensorSet m(4, 3, Boundary::kOpen);
  EXPECT_EQ(m.left_dim(0), 1);
  EXPECT_EQ(m.right_dim(0), 3);
  EXPECT_EQ(m.left_dim(3), 3);
  EXPECT_EQ(m.right_dim(3), 1);
  EXPECT_THROW(m.set_tensor(0, 0, Mat::Zero(3, 3)), std::invalid_argument);
  MpsTensorSet single(1, 4, Boundary::kOpen);
  EXPECT_EQ(single.left_dim(0), 1);
  EXPECT_EQ(single.right_dim(0), 1);
}

TEST(MpsNorm, ProductZeroState) {
  MpsTensorSet m = scalar_site(1.0, 0.0);
  EXPECT_DOUBLE_EQ(mps_norm_sq(m), 1.0);
}

TEST(MpsNorm, PeriodicGhz) {
  MpsTensorSet m(4, 2, Boundary::kPeriodic);
  Mat a0 = Mat::Zero(2, 2), a1 = Mat::Zero(2, 2);
  a0(0, 0) = 1.0;
  a1(1, 1) = 1.0;
  for (int k = 0; k < 4; ++k) {
    m.set_tensor(k, 0, a0);
    m.set_tensor(k, 1, a1);
  }
  EXPECT_NEAR(mps_norm_sq(m), 2.0, 1e-15);
  const DenseState v = expand(m);
  EXPECT_NEAR(std::abs(v.amplitudes(0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v.amplitudes(15) - 1.0), 0.0, 1e-15);
}

class MpsDenseAgreement
    : public ::testing::TestWithParam<std::tuple<int, int, Boundary>> {};

TEST_P(MpsDenseAgreement, NormAndOverlap) {
  const auto [n, d, b] = GetParam();
  Rng rng(100 + n * 7 + d);
  const MpsTensorSet x = MpsTensorSet::random(n, d, b, rng);
  const MpsTensorSet y = MpsTensorSet::random(n, d + 1, b, rng);
  const DenseState vx = expand(x);
  const DenseState vy = expand(y);
  const double dense_norm = vx.amplitudes.squaredNorm();
  EXPECT_NEAR(mps_norm_sq(x) / dense_norm, 1.0, 1e-10);
  const Complex ov = mps_overlap(x, y);
  const Complex dense_ov = vx.amplitudes.dot(vy.amplitudes);
  EXPECT_LT(std::abs(ov - dense_ov), 1e-12 * std::max(1.0, std::abs(dense_ov)));
  EXPECT_NEAR(std::abs(mps_overlap(x, x) - mps_norm_sq(x)), 0.0,
              1e-12 * mps_norm_sq(x));
}

INSTANTIATE_TEST_SUITE_P(
    Shapes, MpsDenseAgreement,
    ::testing::Values(std::make_tuple(1, 2, Boundary::kOpen),
                      std::make_tuple(6, 2, Boundary::kOpen),
                      std::make_tuple(8, 3, Boundary::kOpen),
                      std::make_tuple(8, 3, Boundary::kPeriodic),
                      std::make_tuple(5, 1, Boundary::kPeriodic),
                      std::make_tuple(10, 2, Boundary::kPeriodic)));

TEST(MpsOverlap, OrthogonalProducts) {
  std::vector<Eigen::Vector2cd> zeros(2, Eigen::Vector2cd(1.0, 0.0));
  std::vector<Eigen::Vector2cd> ones(2, Eigen::Vector2cd(0.0, 1.0));
  EXPECT_EQ(mps_overlap(MpsTensorSet::product(zeros),
                        MpsTensorSet::product(ones)),
            Complex(0.0));
  EXPECT_THROW(mps_overlap(MpsTensorSet(2, 1, Boundary::kOpen),
                           MpsTensorSet(3, 1, Boundary::kOpen)),
               std::invalid_argument);
}

TEST(Pencil, IdentityNorm) {
  HermitianPencil p{Mat::Zero(2, 2), Mat::Identity(2, 2)};
  p.h_mat(0, 0) = 1.0;
  p.h_mat(1, 1) = 2.0;
  const PencilSolution s = solve_hermitian_pencil(p, Extremum::kMin);
  EXPECT_NEAR(s.eigenvalue, 1.0, 1e-14);
  EXPECT_NEAR(std::abs(s.eigenvector(0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(s.eigenvector(1)), 0.0, 1e-14);
  EXPECT_NEAR(solve_hermitian_pencil(p, Extremum::kMax).eigenvalue, 2.0, 1e-14);
}

TEST(Pencil, DiagonalPencil) {
  HermitianPencil p{Mat::Identity(2, 2) * 2.0, Mat::Identity(2, 2)};
  p.n_mat(1, 1) = 2.0;
  const PencilSolution s = solve_hermitian_pencil(p, Extremum::kMin);
  EXPECT_NEAR(s.eigenvalue, 1.0, 1e-14);
  EXPECT_NEAR(std::abs(s.eigenvector(0)), 0.0, 1e-14);
  // x^dagger N x = 1.
  EXPECT_NEAR(std::norm(s.eigenvector(1)) * 2.0, 1.0, 1e-14);
}

TEST(Pencil, RandomResidual) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    HermitianPencil p{testing::random_hermitian(8, rng),
                      testing::random_psd(8, 8, rng)};
    for (Extremum w : {Extremum::kMin, Extremum::kMax}) {
      const PencilSolution s = solve_hermitian_pencil(p, w);
      const Vec r = p.h_mat * s.eigenvector - s.eigenvalue * p.n_mat * s.eigenvector;
      EXPECT_LE(r.norm(), 1e-9);
    }
  }
}

TEST(Pencil, MinimumBoundsRayleighQuotients) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    HermitianPencil p{testing::random_hermitian(6, rng),
                      testing::random_psd(6, 4, rng)};
    const PencilSolution s = solve_hermitian_pencil(p, Extremum::kMin);
    for (int k = 0; k < 20; ++k) {
      const Vec x = p.n_mat * rng.complex_normal(6, 1);  // in the range of N
      const double rq = x.dot(p.h_mat * x).real() / x.dot(p.n_mat * x).real();
      EXPECT_LE(s.eigenvalue, rq + 1e-9);
    }
  }
}

TEST(Pencil, RankDeficientNorm) {
  Rng rng(8);
  HermitianPencil p{testing::random_hermitian(6, rng),
                    testing::random_psd(6, 2, rng)};
  const PencilSpectrum spec = pencil_spectrum(p);
  EXPECT_EQ(spec.values.size(), 2);
}

TEST(Pencil, Errors) {
  HermitianPencil zero{Mat::Identity(3, 3), Mat::Zero(3, 3)};
  EXPECT_THROW(solve_hermitian_pencil(zero, Extremum::kMin), DegenerateNormError);
  HermitianPencil skew{Mat::Identity(2, 2), Mat::Identity(2, 2)};
  skew.h_mat(0, 1) = 1.0;
  EXPECT_THROW(solve_hermitian_pencil(skew, Extremum::kMin),
               std::invalid_argument);
  HermitianPencil mismatched{Mat::Identity(2, 2), Mat::Identity(3, 3)};
  EXPECT_THROW(solve_hermitian_pencil(mismatched, Extremum::kMin),
               std::invalid_argument);
}

TEST(Chains, EnvironmentsMatchFullContraction) {
  Rng rng(9);
  for (Boundary b : {Boundary::kOpen, Boundary::kPeriodic}) {
    const MpsTensorSet ket = MpsTensorSet::random(6, 3, b, rng);
    const MpsTensorSet bra = MpsTensorSet::random(6, 2, b, rng);
    std::vector<Chain> chains(3);
    for (Chain& c : chains) {
      c.weight = rng.complex_normal();
      for (int k = 0; k < 6; ++k) c.coeffs.push_back(rng.complex_normal(2, 2));
    }
    const ChainEnvironments envs(ket, bra, chains);
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const Complex full = contract_chain(ket, bra, chains[c].coeffs);
      for (int site = 0; site <= 6; ++site) {
        EXPECT_LT(std::abs(envs.value(c, site) - full),
                  1e-12 * std::max(1.0, std::abs(full)));
      }
    }
    // Effective matrix reproduces the chain sum at every site.
    const MpsTensorSet bra3 = MpsTensorSet::random(6, 3, b, rng);
    const ChainEnvironments envs3(ket, bra3, chains);
    Complex total = 0.0;
    for (const Chain& c : chains) total += c.weight * contract_chain(ket, bra3, c.coeffs);
    for (int site = 0; site < 6; ++site) {
      const Mat m = effective_matrix(chains, envs3, site, ket.left_dim(site),
                                     ket.right_dim(site));
      ASSERT_EQ(m.rows(), 2 * bra3.left_dim(site) * bra3.right_dim(site));
      const Vec a = flatten_site(ket.site(site));
      const Vec bvec = flatten_site(bra3.site(site));
      EXPECT_LT(std::abs(bvec.dot(m * a) - total), 1e-11 * std::abs(total));
      const Vec ma = effective_vector(chains, envs3, site, ket.site(site));
      EXPECT_LT((ma - m * a).norm(), 1e-11 * std::max(1.0, ma.norm()));
    }
  }
}

TEST(Chains, EffectiveVectorHandlesMirroredChains) {
  Rng rng(31);
  for (Boundary b : {Boundary::kOpen, Boundary::kPeriodic}) {
    const MpsTensorSet mps = MpsTensorSet::random(5, 3, b, rng);
    std::vector<Chain> chains(4);
    for (std::size_t c = 0; c < chains.size(); ++c) {
      chains[c].weight = rng.complex_normal();
      chains[c].mirrored = c % 2 == 0;
      for (int k = 0; k < 5; ++k) {
        chains[c].coeffs.push_back(rng.complex_normal(2, 2));
      }
    }
    const ChainEnvironments envs(mps, mps, chains);
    for (int site = 0; site < 5; ++site) {
      const Mat m = effective_matrix(chains, envs, site, mps.left_dim(site),
                                     mps.right_dim(site));
      const Vec a = flatten_site(mps.site(site));
      const Vec ma = effective_vector(chains, envs, site, mps.site(site));
      EXPECT_LT((ma - m * a).norm(), 1e-11 * std::max(1.0, ma.norm()));
    }
  }
}

}  // namespace
}  // namespace rage
