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

#include "rage/mps.hpp"

#include <cmath>

namespace rage {

std::string to_string(Boundary b) {
  return b == Boundary::kOpen ? "open" : "periodic";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "open") return Boundary::kOpen;
  if (s == "periodic") return Boundary::kPeriodic;
  throw std::invalid_argument("unknown boundary '" + s + "'");
}

MpsTensorSet::MpsTensorSet(int n_sites, int bond_dim, Boundary boundary)
    : n_sites_(n_sites), bond_dim_(bond_dim), boundary_(boundary) {
  if (n_sites < 1 || bond_dim < 1) {
    throw std::invalid_argument("MPS needs n_sites >= 1 and bond_dim >= 1");
  }
  tensors_.resize(n_sites);
  for (int k = 0; k < n_sites; ++k) {
    for (int s = 0; s < 2; ++s) {
      tensors_[k][s] = Mat::Zero(left_dim(k), right_dim(k));
    }
  }
}

int MpsTensorSet::left_dim(int site) const {
  return (boundary_ == Boundary::kOpen && site == 0) ? 1 : bond_dim_;
}

int MpsTensorSet::right_dim(int site) const {
  return (boundary_ == Boundary::kOpen && site == n_sites_ - 1) ? 1
                                                                 : bond_dim_;
}

const std::array<Mat, 2>& MpsTensorSet::at(int site) const {
  if (site < 0 || site >= n_sites_) {
    throw std::out_of_range("site index " + std::to_string(site) +
                            " outside chain of " + std::to_string(n_sites_));
  }
  return tensors_[site];
}

MpsTensorSet MpsTensorSet::random(int n_sites, int bond_dim,
                                  Boundary boundary, Rng& rng) {
  MpsTensorSet m(n_sites, bond_dim, boundary);
  for (int k = 0; k < n_sites; ++k) {
    for (int s = 0; s < 2; ++s) {
      m.tensors_[k][s] = rng.complex_normal(m.left_dim(k), m.right_dim(k));
    }
  }
  // Spread the normalization evenly so no single site carries it.
  const double norm = mps_norm_sq(m);
  const double per_site = std::pow(norm, -0.5 / n_sites);
  for (int k = 0; k < n_sites; ++k) m.scale_site(k, per_site);
  return m;
}

MpsTensorSet MpsTensorSet::product(std::span<const Eigen::Vector2cd> sites) {
  MpsTensorSet m(static_cast<int>(sites.size()), 1, Boundary::kOpen);
  for (int k = 0; k < m.n_sites(); ++k) {
    for (int s = 0; s < 2; ++s) m.tensors_[k][s](0, 0) = sites[k](s);
  }
  return m;
}

void MpsTensorSet::set_tensor(int site, int s, Mat value) {
  const Mat& cur = at(site)[s];
  if (value.rows() != cur.rows() || value.cols() != cur.cols()) {
    throw std::invalid_argument("tensor shape mismatch at site " +
                                std::to_string(site));
  }
  tensors_[site][s] = std::move(value);
}

void MpsTensorSet::scale_site(int site, Complex factor) {
  at(site);
  tensors_[site][0] *= factor;
  tensors_[site][1] *= factor;
}

void MpsTensorSet::validate() const {
  for (int k = 0; k < n_sites_; ++k) {
    for (int s = 0; s < 2; ++s) {
      const Mat& a = tensors_[k][s];
      if (a.rows() != left_dim(k) || a.cols() != right_dim(k)) {
        throw std::invalid_argument("bad tensor shape at site " +
                                    std::to_string(k));
      }
      if (!a.allFinite()) {
        throw std::invalid_argument("non-finite tensor entry at site " +
                                    std::to_string(k));
      }
    }
  }
}

bool MpsTensorSet::operator==(const MpsTensorSet& other) const {
  if (n_sites_ != other.n_sites_ || bond_dim_ != other.bond_dim_ ||
      boundary_ != other.boundary_) {
    return false;
  }
  for (int k = 0; k < n_sites_; ++k) {
    for (int s = 0; s < 2; ++s) {
      if (tensors_[k][s] != other.tensors_[k][s]) return false;
    }
  }
  return true;
}

TransferOperator transfer_operator(const MpsTensorSet& mps, int site, int s,
                                   int r) {
  if ((s != 0 && s != 1) || (r != 0 && r != 1)) {
    throw std::invalid_argument("physical indices must be 0 or 1");
  }
  return TransferOperator{
      kron(mps.tensor(site, s), mps.tensor(site, r).conjugate())};
}

namespace {

// Closes a product of transfer matrices: trace for periodic chains, the
// single entry for open chains (where the product is 1 x 1).
Complex close_product(const Mat& product) { return product.trace(); }

}  // namespace

double mps_norm_sq(const MpsTensorSet& mps) {
  return mps_overlap(mps, mps).real();
}

Complex mps_overlap(const MpsTensorSet& bra, const MpsTensorSet& ket) {
  if (bra.n_sites() != ket.n_sites()) {
    throw std::invalid_argument("overlap of chains with different lengths");
  }
  if (bra.boundary() != ket.boundary()) {
    throw std::invalid_argument("overlap of chains with different boundaries");
  }
  // Row-vector contraction: left block of size (D_ket * D_bra) per bond.
  Mat env;
  for (int k = 0; k < ket.n_sites(); ++k) {
    Mat t = kron(ket.tensor(k, 0), bra.tensor(k, 0).conjugate()) +
            kron(ket.tensor(k, 1), bra.tensor(k, 1).conjugate());
    env = (k == 0) ? t : Mat(env * t);
  }
  return close_product(env);
}

Complex mps_local_expectation(const MpsTensorSet& mps,
                              std::span<const int> support,
                              const Mat& observable) {
  const int n_support = static_cast<int>(support.size());
  const int dim = 1 << n_support;
  if (observable.rows() != dim || observable.cols() != dim) {
    throw std::invalid_argument("observable dimension does not match support");
  }
  std::vector<int> position(mps.n_sites(), -1);
  for (int p = 0; p < n_support; ++p) position.at(support[p]) = p;

  Complex value = 0.0;
  for (int s_idx = 0; s_idx < dim; ++s_idx) {
    for (int r_idx = 0; r_idx < dim; ++r_idx) {
      const Complex w = observable(r_idx, s_idx);
      if (w == Complex(0.0)) continue;
      Mat product;
      for (int k = 0; k < mps.n_sites(); ++k) {
        Mat t;
        if (position[k] >= 0) {
          const int shift = n_support - 1 - position[k];
          t = transfer_operator(mps, k, (s_idx >> shift) & 1,
                                (r_idx >> shift) & 1)
                  .matrix;
        } else {
          t = transfer_operator(mps, k, 0, 0).matrix +
              transfer_operator(mps, k, 1, 1).matrix;
        }
        product = (k == 0) ? t : Mat(product * t);
      }
      value += w * close_product(product);
    }
  }
  return value / mps_norm_sq(mps);
}

void normalize_mps(MpsTensorSet& mps) {
  const double norm = mps_norm_sq(mps);
  if (!(norm > 0.0) || !std::isfinite(norm)) return;
  const double per_site = std::pow(norm, -0.5 / mps.n_sites());
  for (int k = 0; k < mps.n_sites(); ++k) mps.scale_site(k, per_site);
}

}  // namespace rage
