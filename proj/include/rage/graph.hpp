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
#include <utility>
#include <vector>

#include "rage/chain.hpp"
#include "rage/linalg.hpp"
#include "rage/mps.hpp"

namespace rage {

/// Largest support for which reduced density matrices are assembled.
inline constexpr int kDefaultMaxSupport = 4;

/// Wraps a phase into [0, 2pi).
double wrap_phase(double phi);

/// Symmetric weighted adjacency matrix of controlled-phase gates.
///
/// Entries are stored modulo 2pi with a zero diagonal. A per-site neighbor
/// list of the nonzero entries is kept in sync with the dense matrix.
class AdjacencyPhaseMatrix {
 public:
  explicit AdjacencyPhaseMatrix(int n_sites);

  int n_sites() const { return n_sites_; }
  double operator()(int k, int l) const { return phases_(k, l); }
  const RealMat& dense() const { return phases_; }

  /// Sets Phi[k,l] = Phi[l,k] = wrap(phi). k == l is rejected.
  void set(int k, int l, double phi);
  /// Phi[k,l] += dphi (mod 2pi).
  void add(int k, int l, double dphi);

  /// Nonzero neighbors of site k as (site, phase) pairs, ascending site.
  const std::vector<std::pair<int, double>>& neighbors(int k) const {
    return neighbors_.at(k);
  }
  /// Upper-triangle nonzero edges (k < l).
  std::vector<std::pair<int, int>> edges() const;

  bool is_zero() const;
  bool operator==(const AdjacencyPhaseMatrix& other) const {
    return phases_ == other.phases_;
  }

 private:
  void check_pair(int k, int l) const;
  void refresh_neighbors(int k);

  int n_sites_;
  RealMat phases_;
  std::vector<std::vector<std::pair<int, double>>> neighbors_;
};

/// Phi restricted to couplings between the support and its complement.
struct RestrictedPhaseMatrix {
  RealMat omega;
  std::vector<int> support;
};

/// Support sites with one bit each.
struct SupportAssignment {
  std::vector<int> support;
  std::vector<int> bits;
};

/// Checks that sites are strictly increasing, in range, and at most s_max.
void validate_support(std::span<const int> support, int n_sites,
                      int s_max = kDefaultMaxSupport);

RestrictedPhaseMatrix restrict_phases(const AdjacencyPhaseMatrix& phi,
                                      std::span<const int> support);

/// Diagonal of the 2^|S| unitary exp(i sum_{p<q} Phi[m_p,m_q] s_p s_q), with
/// the first support site as the most significant bit.
Vec intra_support_phase_gate(const AdjacencyPhaseMatrix& phi,
                             std::span<const int> support,
                             int s_max = kDefaultMaxSupport);

/// B_l for a complement site: A_l times exp(i l sum_{p: s_p=1} omega[m_p,site]).
Mat phase_modified_b(const MpsTensorSet& mps, int site,
                     const RestrictedPhaseMatrix& omega,
                     const SupportAssignment& assign, int l);

/// T = sum_l B_l(assign_s) (x) conj(B_l(assign_r)) as a dense matrix.
TransferOperator phase_modified_transfer(const MpsTensorSet& mps, int site,
                                         const RestrictedPhaseMatrix& omega,
                                         const SupportAssignment& assign_s,
                                         const SupportAssignment& assign_r);

/// Coefficient form of the whole chain for one density-matrix entry: plain
/// E_{s,r} on support sites and the phase-modified operator elsewhere.
/// Contracting it gives the entry (s_idx, r_idx) of the support density
/// matrix before the intra-support phase gate is applied.
std::vector<SiteCoefficients> support_entry_coefficients(
    const AdjacencyPhaseMatrix& phi, std::span<const int> support,
    int s_idx, int r_idx);

}  // namespace rage
