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
#include <span>
#include <string>
#include <vector>

#include "rage/linalg.hpp"
#include "rage/rng.hpp"

namespace rage {

enum class Boundary { kOpen, kPeriodic };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Site tensors A_s^{(k)} of a qubit matrix product state.
///
/// Sites are 0-based. Periodic chains hold D x D matrices everywhere and are
/// closed by a trace. Open chains hold a 1 x D row at site 0 and a D x 1
/// column at the last site (1 x 1 for a single site).
class MpsTensorSet {
 public:
  MpsTensorSet(int n_sites, int bond_dim, Boundary boundary);

  /// Seeded complex Gaussian tensors, rescaled to unit norm.
  static MpsTensorSet random(int n_sites, int bond_dim, Boundary boundary,
                             Rng& rng);

  /// Product state from one 2-vector per site (D = 1).
  static MpsTensorSet product(std::span<const Eigen::Vector2cd> sites);

  int n_sites() const { return n_sites_; }
  int bond_dim() const { return bond_dim_; }
  Boundary boundary() const { return boundary_; }

  int left_dim(int site) const;
  int right_dim(int site) const;

  const Mat& tensor(int site, int s) const { return at(site)[s]; }
  const std::array<Mat, 2>& site(int site) const { return at(site); }

  /// Replaces A_s^{(site)}; the shape must match.
  void set_tensor(int site, int s, Mat value);

  /// Multiplies every entry of one site by `factor`.
  void scale_site(int site, Complex factor);

  /// Throws std::invalid_argument if any shape or entry is invalid.
  void validate() const;

  bool operator==(const MpsTensorSet& other) const;

 private:
  const std::array<Mat, 2>& at(int site) const;

  int n_sites_;
  int bond_dim_;
  Boundary boundary_;
  std::vector<std::array<Mat, 2>> tensors_;
};

/// E_{s,r} = A_s (x) conj(A_r) for one site.
struct TransferOperator {
  Mat matrix;
};

TransferOperator transfer_operator(const MpsTensorSet& mps, int site, int s,
                                   int r);

double mps_norm_sq(const MpsTensorSet& mps);

/// Rescales every site by the same factor so that the norm becomes one.
void normalize_mps(MpsTensorSet& mps);

/// <bra|ket>; bond dimensions may differ but boundaries must agree.
Complex mps_overlap(const MpsTensorSet& bra, const MpsTensorSet& ket);

/// Reference expectation on a bare MPS through explicit products of
/// transfer_operator matrices. Used to cross-check the graph-aware path.
/// `observable` acts on the sorted `support` with the first site as the most
/// significant bit. Normalized by the MPS norm.
Complex mps_local_expectation(const MpsTensorSet& mps,
                              std::span<const int> support,
                              const Mat& observable);

}  // namespace rage
