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

#include <span>
#include <vector>

#include "rage/graph.hpp"
#include "rage/linalg.hpp"
#include "rage/mps.hpp"
#include "rage/rng.hpp"

namespace rage {

/// V_j prod U(Phi) |MPS(A)>: an MPS followed by commuting controlled-phase
/// gates on arbitrary pairs and a layer of single-qubit rotations.
class RageState {
 public:
  /// Phi = 0, V = 1.
  explicit RageState(MpsTensorSet mps);
  RageState(MpsTensorSet mps, AdjacencyPhaseMatrix phi,
            std::vector<Mat2> rotations);

  int n_sites() const { return mps_.n_sites(); }

  const MpsTensorSet& mps() const { return mps_; }
  MpsTensorSet& mps() { return mps_; }
  const AdjacencyPhaseMatrix& phi() const { return phi_; }
  AdjacencyPhaseMatrix& phi() { return phi_; }

  const Mat2& rotation(int j) const { return rotations_.at(j); }
  const std::vector<Mat2>& rotations() const { return rotations_; }
  void set_rotation(int j, const Mat2& v);
  void reset_rotations();

  /// ||V_j^dagger V_j - 1|| <= 1e-10.
  bool rotation_unitary(int j) const { return unitary_.at(j); }
  std::vector<int> non_unitary_sites() const;
  bool rotations_identity() const;

  bool operator==(const RageState& other) const;

 private:
  MpsTensorSet mps_;
  AdjacencyPhaseMatrix phi_;
  std::vector<Mat2> rotations_;
  std::vector<bool> unitary_;
};

bool is_unitary(const Mat2& v, double tol = 1e-10);

struct ReducedDensityMatrix {
  std::vector<int> support;
  Mat matrix;
};

/// Unnormalized density matrix of U(Phi)|MPS> on `support` (rotations not
/// applied, intra-support phases applied). Entries with s >= r are contracted
/// and the rest filled by Hermiticity.
Mat support_density(const RageState& state, std::span<const int> support);

/// rho_S of the full state, trace one. Non-unitary rotations are handled
/// by enlarging the contracted support with their sites; the enlarged
/// support must fit in s_max.
ReducedDensityMatrix reduced_density_matrix(const RageState& state,
                                            std::span<const int> support,
                                            int s_max = kDefaultMaxSupport);

/// tr(rho_S O) for Hermitian O on sorted `support`.
double expectation(const RageState& state, std::span<const int> support,
                   const Mat& observable, int s_max = kDefaultMaxSupport);

/// <op_j op_k> - <op_j><op_k>.
double two_point_correlation(const RageState& state, int j, int k,
                             const Mat2& op_j, const Mat2& op_k);

/// <psi|psi>.
double norm_sq(const RageState& state, int s_max = kDefaultMaxSupport);

/// sum_m alpha_m prod_j V_j prod U(Phi) |eta_{m,1}> ... |eta_{m,N}>, with
/// |eta_{m,n}> = |0> + exp(d_{m,n}) |1>.
struct WgsSuperposition {
  std::vector<Complex> amplitudes;
  std::vector<std::vector<Complex>> deformations;  // [term][site]
  AdjacencyPhaseMatrix phi;
  std::vector<Mat2> rotations;
};

/// Open-boundary RAGE state with D = number of terms and diagonal tensors.
RageState from_wgs(const WgsSuperposition& w);

/// Block entropies S(rho_L) of the first L sites, from the dense expansion.
std::vector<double> entanglement_entropy_profile(
    const RageState& state, std::span<const int> cut_sizes);

/// Keeps the qubits at `keep` (positions within a register of `n_qubits`,
/// first position most significant) and traces out the rest.
Mat partial_trace(const Mat& rho, int n_qubits, std::span<const int> keep);

/// Random MPS part; with `dense_phases` every pair gets a uniform phase, with
/// `random_rotations` every site a Haar unitary.
RageState random_state(int n_sites, int bond_dim, Boundary boundary, Rng& rng,
                       bool dense_phases, bool random_rotations);

/// Tensor product of 2x2 operators, first factor most significant.
Mat tensor_product(std::span<const Mat2> factors);

}  // namespace rage
