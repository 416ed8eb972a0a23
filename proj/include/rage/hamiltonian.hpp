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

#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "rage/chain.hpp"
#include "rage/linalg.hpp"
#include "rage/state.hpp"

namespace rage {

enum class Pauli { kI, kX, kY, kZ };

Mat2 pauli(Pauli p);

struct SiteOperator {
  int site;
  Mat2 matrix;
};

/// coefficient * prod_f factors[f]; at most two distinct sites.
struct PauliTerm {
  Complex coefficient;
  std::vector<SiteOperator> factors;
};

/// Sum of all terms acting on exactly `support` (sorted), as a dense
/// 2^|S| matrix with the first support site most significant.
struct LocalOperator {
  std::vector<int> support;
  Mat matrix;
};

class Hamiltonian {
 public:
  explicit Hamiltonian(int n_sites);

  int n_sites() const { return n_sites_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  void add_term(Complex coefficient, std::vector<SiteOperator> factors);
  void add_pauli(Complex coefficient,
                 std::initializer_list<std::pair<int, Pauli>> factors);

  /// Terms grouped by support, in order of first appearance.
  std::vector<LocalOperator> local_operators() const;

  /// Throws std::invalid_argument unless every support group is Hermitian.
  void validate() const;

 private:
  int n_sites_;
  std::vector<PauliTerm> terms_;
};

/// Bijection between lattice sites (row, col) and chain indices.
struct LatticeMap {
  int rows = 0;
  int cols = 0;
  std::vector<int> chain_index;  // [row * cols + col] -> chain site

  int operator()(int row, int col) const {
    return chain_index.at(static_cast<std::size_t>(row) * cols + col);
  }

  /// Boustrophedon path: even rows left to right, odd rows right to left.
  static LatticeMap snake(int rows, int cols);
  static LatticeMap row_major(int rows, int cols);
  void validate() const;
};

/// H = J sum_<a,b> Z_a Z_b + B sum_a X_a on a periodic rows x cols lattice.
/// Every site contributes its right and down bond; when wrap-around makes a
/// bond coincide with another (extent 2), the pair gets one term with the
/// multiplicity folded into the coefficient.
Hamiltonian build_ising_2d(int rows, int cols, double field_b,
                           double coupling = 1.0,
                           const LatticeMap* map = nullptr);

/// H = J sum_i Z_i Z_{i+1} + B sum_i X_i on a chain.
Hamiltonian build_ising_1d(int n_sites, double field_b, double coupling = 1.0,
                           bool periodic = false);

/// H_V: every single-site factor P on site j becomes V_j^dagger P V_j.
Hamiltonian conjugate_by_rotations(const Hamiltonian& h,
                                   std::span<const Mat2> rotations);

/// Chains whose weighted sum is sum_{s,r} sigma[s,r] O[r,s] for the
/// support density of U(Phi)|MPS>, where `observable` is already expressed
/// in the pre-rotation frame. Only entries s >= r are kept; off-diagonal
/// ones are mirrored. Zero-weight entries are skipped.
std::vector<Chain> observable_chains(
    const AdjacencyPhaseMatrix& phi, std::span<const int> support,
    const Mat& observable, std::vector<std::pair<int, int>>* entries = nullptr);

/// Local operator index and support entry (s, r) behind a chain.
struct ChainOrigin {
  int op = 0;
  int s = 0;
  int r = 0;
};

/// Chains for <psi|H|psi> of U(Phi)|MPS> (rotations taken as identity),
/// grouped by h.local_operators().
std::vector<Chain> hamiltonian_chains(const AdjacencyPhaseMatrix& phi,
                                      const Hamiltonian& h,
                                      std::vector<ChainOrigin>* origins = nullptr);

/// Chains for <MPS|H|MPS> built term by term on the bare MPS, one chain per
/// Pauli term, without the graph layer.
std::vector<Chain> mps_hamiltonian_chains(const Hamiltonian& h);

/// <MPS|H|MPS> / <MPS|MPS> through mps_hamiltonian_chains.
double mps_energy(const MpsTensorSet& mps, const Hamiltonian& h);

/// <H> = <psi|H|psi> / <psi|psi>.
double energy(const RageState& state, const Hamiltonian& h);

}  // namespace rage
