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

#include "rage/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rage {

double wrap_phase(double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("non-finite phase");
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

AdjacencyPhaseMatrix::AdjacencyPhaseMatrix(int n_sites)
    : n_sites_(n_sites),
      phases_(RealMat::Zero(n_sites, n_sites)),
      neighbors_(n_sites) {
  if (n_sites < 1) throw std::invalid_argument("graph needs >= 1 site");
}

void AdjacencyPhaseMatrix::check_pair(int k, int l) const {
  if (k < 0 || l < 0 || k >= n_sites_ || l >= n_sites_) {
    throw std::out_of_range("graph site out of range");
  }
  if (k == l) throw std::invalid_argument("graph has no self-loops");
}

void AdjacencyPhaseMatrix::set(int k, int l, double phi) {
  check_pair(k, l);
  const double w = wrap_phase(phi);
  phases_(k, l) = w;
  phases_(l, k) = w;
  refresh_neighbors(k);
  refresh_neighbors(l);
}

void AdjacencyPhaseMatrix::add(int k, int l, double dphi) {
  check_pair(k, l);
  set(k, l, phases_(k, l) + dphi);
}

void AdjacencyPhaseMatrix::refresh_neighbors(int k) {
  auto& list = neighbors_[k];
  list.clear();
  for (int l = 0; l < n_sites_; ++l) {
    if (phases_(k, l) != 0.0) list.emplace_back(l, phases_(k, l));
  }
}

std::vector<std::pair<int, int>> AdjacencyPhaseMatrix::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < n_sites_; ++k) {
    for (const auto& [l, phi] : neighbors_[k]) {
      if (l > k) out.emplace_back(k, l);
    }
  }
  return out;
}

bool AdjacencyPhaseMatrix::is_zero() const {
  return std::all_of(neighbors_.begin(), neighbors_.end(),
                     [](const auto& v) { return v.empty(); });
}

void validate_support(std::span<const int> support, int n_sites, int s_max) {
  if (static_cast<int>(support.size()) > s_max) {
    throw std::invalid_argument("support of size " +
                                std::to_string(support.size()) +
                                " exceeds limit " + std::to_string(s_max));
  }
  for (std::size_t p = 0; p < support.size(); ++p) {
    if (support[p] < 0 || support[p] >= n_sites) {
      throw std::out_of_range("support site " + std::to_string(support[p]) +
                              " out of range");
    }
    if (p > 0 && support[p] <= support[p - 1]) {
      throw std::invalid_argument(
          "support sites must be distinct and increasing");
    }
  }
}

RestrictedPhaseMatrix restrict_phases(const AdjacencyPhaseMatrix& phi,
                                      std::span<const int> support) {
  const int n = phi.n_sites();
  validate_support(support, n, n);
  std::vector<bool> inside(n, false);
  for (int m : support) inside[m] = true;
  RestrictedPhaseMatrix out{RealMat::Zero(n, n),
                            std::vector<int>(support.begin(), support.end())};
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (inside[k] != inside[l]) out.omega(k, l) = phi(k, l);
    }
  }
  return out;
}

Vec intra_support_phase_gate(const AdjacencyPhaseMatrix& phi,
                             std::span<const int> support, int s_max) {
  validate_support(support, phi.n_sites(), s_max);
  const int n_support = static_cast<int>(support.size());
  const int dim = 1 << n_support;
  Vec diag(dim);
  for (int idx = 0; idx < dim; ++idx) {
    double angle = 0.0;
    for (int p = 0; p < n_support; ++p) {
      if (!((idx >> (n_support - 1 - p)) & 1)) continue;
      for (int q = p + 1; q < n_support; ++q) {
        if ((idx >> (n_support - 1 - q)) & 1) {
          angle += phi(support[p], support[q]);
        }
      }
    }
    diag(idx) = std::polar(1.0, angle);
  }
  return diag;
}

namespace {

void check_assignment(const SupportAssignment& a, int n_sites) {
  validate_support(a.support, n_sites, n_sites);
  if (a.bits.size() != a.support.size()) {
    throw std::invalid_argument("assignment needs one bit per support site");
  }
  for (int b : a.bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("bits must be 0 or 1");
  }
}

double boundary_angle(const RestrictedPhaseMatrix& omega,
                      const SupportAssignment& assign, int site) {
  double angle = 0.0;
  for (std::size_t p = 0; p < assign.support.size(); ++p) {
    if (assign.bits[p] == 1) angle += omega.omega(assign.support[p], site);
  }
  return angle;
}

void check_complement(const SupportAssignment& assign, int site) {
  if (std::find(assign.support.begin(), assign.support.end(), site) !=
      assign.support.end()) {
    throw std::invalid_argument("site " + std::to_string(site) +
                                " lies in the support");
  }
}

}  // namespace

Mat phase_modified_b(const MpsTensorSet& mps, int site,
                     const RestrictedPhaseMatrix& omega,
                     const SupportAssignment& assign, int l) {
  check_assignment(assign, mps.n_sites());
  check_complement(assign, site);
  if (l == 0) return mps.tensor(site, 0);
  if (l != 1) throw std::invalid_argument("physical index must be 0 or 1");
  return std::polar(1.0, boundary_angle(omega, assign, site)) *
         mps.tensor(site, 1);
}

TransferOperator phase_modified_transfer(const MpsTensorSet& mps, int site,
                                         const RestrictedPhaseMatrix& omega,
                                         const SupportAssignment& assign_s,
                                         const SupportAssignment& assign_r) {
  if (assign_s.support != assign_r.support) {
    throw std::invalid_argument("assignments have different supports");
  }
  Mat t = Mat::Zero(mps.left_dim(site) * mps.left_dim(site),
                    mps.right_dim(site) * mps.right_dim(site));
  for (int l = 0; l < 2; ++l) {
    t += kron(phase_modified_b(mps, site, omega, assign_s, l),
              phase_modified_b(mps, site, omega, assign_r, l).conjugate());
  }
  return TransferOperator{std::move(t)};
}

std::vector<SiteCoefficients> support_entry_coefficients(
    const AdjacencyPhaseMatrix& phi, std::span<const int> support, int s_idx,
    int r_idx) {
  const int n = phi.n_sites();
  const int n_support = static_cast<int>(support.size());
  std::vector<SiteCoefficients> coeffs(n, Mat2::Zero());
  std::vector<int> position(n, -1);
  for (int p = 0; p < n_support; ++p) position[support[p]] = p;

  // Complement sites: c(0,0) = 1, c(1,1) = exp(i (theta_s - theta_r)),
  // theta = sum over support bits set of omega[m_p, k].
  for (int k = 0; k < n; ++k) {
    if (position[k] >= 0) {
      const int shift = n_support - 1 - position[k];
      coeffs[k]((s_idx >> shift) & 1, (r_idx >> shift) & 1) = 1.0;
      continue;
    }
    double angle = 0.0;
    for (int p = 0; p < n_support; ++p) {
      const int shift = n_support - 1 - p;
      const int sb = (s_idx >> shift) & 1;
      const int rb = (r_idx >> shift) & 1;
      if (sb != rb) angle += (sb - rb) * phi(support[p], k);
    }
    coeffs[k](0, 0) = 1.0;
    coeffs[k](1, 1) = angle == 0.0 ? Complex(1.0) : std::polar(1.0, angle);
  }
  return coeffs;
}

}  // namespace rage
