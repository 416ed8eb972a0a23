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

#pragma once

#include <array>
#include <vector>

#include "rage/linalg.hpp"
#include "rage/mps.hpp"

namespace rage {

// Every bra-ket contraction in this library is a chain of generalized
// transfer operators
//
//   T^{(k)} = sum_{x,y} c^{(k)}(x, y) K_x^{(k)} (x) conj(B_y^{(k)}),
//
// where K is the ket MPS, B the bra MPS, x the ket bit and y the bra bit.
// Plain transfer operators, the phase-modified operators of the graph layer,
// and the conditional-phase operators of circuit fitting are all instances.

/// Coefficients c(x, y) for one site.
using SiteCoefficients = Mat2;

struct Chain {
  Complex weight = 1.0;
  /// When set, the chain also contributes its complex conjugate (the mirror
  /// entry of a Hermitian quantity), i.e. weight*value + conj(weight*value).
  bool mirrored = false;
  std::vector<SiteCoefficients> coeffs;
};

/// Identity coefficients: the norm transfer operator sum_l E_{l,l}.
SiteCoefficients identity_coefficients();

/// Partial contraction of a chain. One Da x Db block per closing index:
/// a single block for open chains, Da0*Db0 blocks for periodic ones.
using EnvBlocks = std::vector<Mat>;

EnvBlocks left_boundary(const MpsTensorSet& ket, const MpsTensorSet& bra);
EnvBlocks right_boundary(const MpsTensorSet& ket, const MpsTensorSet& bra);

/// Absorbs `site` into a left environment covering [0, site).
void absorb_left(EnvBlocks& env, const SiteCoefficients& c,
                 const std::array<Mat, 2>& ket, const std::array<Mat, 2>& bra);

/// Absorbs `site` into a right environment covering (site, N).
void absorb_right(EnvBlocks& env, const SiteCoefficients& c,
                  const std::array<Mat, 2>& ket,
                  const std::array<Mat, 2>& bra);

/// Joins a left and a right environment meeting at the same bond.
Complex join(const EnvBlocks& left, const EnvBlocks& right);

/// Full contraction of one chain.
Complex contract_chain(const MpsTensorSet& ket, const MpsTensorSet& bra,
                       const std::vector<SiteCoefficients>& coeffs);

/// Weighted sum over chains, honoring the mirrored flag.
Complex contract_chains(const MpsTensorSet& ket, const MpsTensorSet& bra,
                        const std::vector<Chain>& chains);

/// Cached left/right environments of a chain list, in the style of a DMRG
/// sweep. left(c, k) covers sites [0, k); right(c, k) covers sites [k, N).
class ChainEnvironments {
 public:
  ChainEnvironments(const MpsTensorSet& ket, const MpsTensorSet& bra,
                    const std::vector<Chain>& chains);

  /// Recomputes every environment from scratch.
  void rebuild(const MpsTensorSet& ket, const MpsTensorSet& bra,
               const std::vector<Chain>& chains);

  /// After site k changed: recompute left(c, k+1) from left(c, k).
  void advance_left(int site, const MpsTensorSet& ket,
                    const MpsTensorSet& bra, const std::vector<Chain>& chains);

  /// After site k changed: recompute right(c, k) from right(c, k+1).
  void advance_right(int site, const MpsTensorSet& ket,
                     const MpsTensorSet& bra,
                     const std::vector<Chain>& chains);

  const EnvBlocks& left(std::size_t chain, int site) const {
    return left_[chain][site];
  }
  const EnvBlocks& right(std::size_t chain, int site) const {
    return right_[chain][site];
  }

  /// Value of one chain, joined at bond `site` (0 <= site <= N).
  Complex value(std::size_t chain, int site = 0) const;

 private:
  int n_sites_;
  std::vector<std::vector<EnvBlocks>> left_;
  std::vector<std::vector<EnvBlocks>> right_;
};

/// Index of entry (x, i, p) of the stacked site vector [vec A_0; vec A_1].
inline int site_vector_index(int x, int i, int p, int dl, int dr) {
  return x * dl * dr + i * dr + p;
}

Vec flatten_site(const std::array<Mat, 2>& tensors);
std::array<Mat, 2> unflatten_site(const Vec& v, int dl, int dr);

/// Matrix M with sum over chains of weight * value = conj(b)^T M a, where a
/// and b are the flattened ket and bra tensors at `site`. Mirrored chains add
/// M^dagger as well, so for Hermitian inputs M is Hermitian.
Mat effective_matrix(const std::vector<Chain>& chains,
                     const ChainEnvironments& envs, int site, int dl, int dr);

/// M a for the same M, without forming M (ket tensor `ket_site`). Mirrored
/// chains need ket and bra tensors of the same shape at `site`.
Vec effective_vector(const std::vector<Chain>& chains,
                     const ChainEnvironments& envs, int site,
                     const std::array<Mat, 2>& ket_site);

}  // namespace rage
