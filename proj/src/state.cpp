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

#include "rage/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rage/chain.hpp"
#include "rage/oracle.hpp"

namespace rage {

bool is_unitary(const Mat2& v, double tol) {
  return (v.adjoint() * v - Mat2::Identity()).norm() <= tol;
}

RageState::RageState(MpsTensorSet mps)
    : mps_(std::move(mps)),
      phi_(mps_.n_sites()),
      rotations_(mps_.n_sites(), Mat2::Identity()),
      unitary_(mps_.n_sites(), true) {}

RageState::RageState(MpsTensorSet mps, AdjacencyPhaseMatrix phi,
                     std::vector<Mat2> rotations)
    : mps_(std::move(mps)), phi_(std::move(phi)) {
  if (phi_.n_sites() != mps_.n_sites() ||
      static_cast<int>(rotations.size()) != mps_.n_sites()) {
    throw std::invalid_argument(
        "MPS, graph and rotations must cover the same sites");
  }
  rotations_ = std::move(rotations);
  unitary_.resize(rotations_.size());
  for (std::size_t j = 0; j < rotations_.size(); ++j) {
    if (!rotations_[j].allFinite()) {
      throw std::invalid_argument("non-finite rotation entry");
    }
    unitary_[j] = is_unitary(rotations_[j]);
  }
}

void RageState::set_rotation(int j, const Mat2& v) {
  if (!v.allFinite()) throw std::invalid_argument("non-finite rotation");
  rotations_.at(j) = v;
  unitary_.at(j) = is_unitary(v);
}

void RageState::reset_rotations() {
  std::fill(rotations_.begin(), rotations_.end(), Mat2::Identity());
  std::fill(unitary_.begin(), unitary_.end(), true);
}

std::vector<int> RageState::non_unitary_sites() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < unitary_.size(); ++j) {
    if (!unitary_[j]) out.push_back(static_cast<int>(j));
  }
  return out;
}

bool RageState::rotations_identity() const {
  return std::all_of(rotations_.begin(), rotations_.end(),
                     [](const Mat2& v) { return v == Mat2::Identity(); });
}

bool RageState::operator==(const RageState& other) const {
  if (!(mps_ == other.mps_) || !(phi_ == other.phi_)) return false;
  for (std::size_t j = 0; j < rotations_.size(); ++j) {
    if (rotations_[j] != other.rotations_[j]) return false;
  }
  return true;
}

Mat tensor_product(std::span<const Mat2> factors) {
  Mat out = Mat::Identity(1, 1);
  for (const Mat2& f : factors) out = kron(out, f);
  return out;
}

Mat partial_trace(const Mat& rho, int n_qubits, std::span<const int> keep) {
  const int n_keep = static_cast<int>(keep.size());
  std::vector<int> traced;
  for (int q = 0; q < n_qubits; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
      traced.push_back(q);
    }
  }
  const int n_traced = static_cast<int>(traced.size());
  auto compose = [&](int kept_idx, int traced_idx) {
    int full = 0;
    for (int p = 0; p < n_keep; ++p) {
      if ((kept_idx >> (n_keep - 1 - p)) & 1) {
        full |= 1 << (n_qubits - 1 - keep[p]);
      }
    }
    for (int p = 0; p < n_traced; ++p) {
      if ((traced_idx >> (n_traced - 1 - p)) & 1) {
        full |= 1 << (n_qubits - 1 - traced[p]);
      }
    }
    return full;
  };
  Mat out = Mat::Zero(1 << n_keep, 1 << n_keep);
  for (int a = 0; a < (1 << n_keep); ++a) {
    for (int b = 0; b < (1 << n_keep); ++b) {
      Complex sum = 0.0;
      for (int t = 0; t < (1 << n_traced); ++t) {
        sum += rho(compose(a, t), compose(b, t));
      }
      out(a, b) = sum;
    }
  }
  return out;
}

Mat support_density(const RageState& state, std::span<const int> support) {
  const int n = state.n_sites();
  validate_support(support, n, n);
  const int dim = 1 << support.size();
  const MpsTensorSet& mps = state.mps();
  Mat sigma(dim, dim);
  for (int s = 0; s < dim; ++s) {
    for (int r = 0; r <= s; ++r) {
      const Complex v = contract_chain(
          mps, mps, support_entry_coefficients(state.phi(), support, s, r));
      sigma(s, r) = v;
      sigma(r, s) = std::conj(v);
    }
    sigma(s, s) = sigma(s, s).real();
  }
  const Vec gate = intra_support_phase_gate(state.phi(), support, n);
  return gate.asDiagonal() * sigma * gate.conjugate().asDiagonal();
}

ReducedDensityMatrix reduced_density_matrix(const RageState& state,
                                            std::span<const int> support,
                                            int s_max) {
  validate_support(support, state.n_sites(), s_max);
  std::vector<int> enlarged(support.begin(), support.end());
  for (int j : state.non_unitary_sites()) {
    if (std::find(enlarged.begin(), enlarged.end(), j) == enlarged.end()) {
      enlarged.push_back(j);
    }
  }
  std::sort(enlarged.begin(), enlarged.end());
  if (static_cast<int>(enlarged.size()) > s_max) {
    throw std::invalid_argument(
        "support plus non-unitary rotation sites exceeds the support limit");
  }

  const Mat sigma = support_density(state, enlarged);
  std::vector<Mat2> factors;
  factors.reserve(enlarged.size());
  for (int j : enlarged) factors.push_back(state.rotation(j));
  const Mat w = tensor_product(factors);
  Mat rho = w * sigma * w.adjoint();

  const double norm = rho.trace().real();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DegenerateNormError("state has zero norm");
  }
  if (enlarged.size() != support.size()) {
    std::vector<int> keep;
    for (int m : support) {
      keep.push_back(static_cast<int>(
          std::find(enlarged.begin(), enlarged.end(), m) - enlarged.begin()));
    }
    rho = partial_trace(rho, static_cast<int>(enlarged.size()), keep);
  }
  rho /= norm;
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return ReducedDensityMatrix{std::vector<int>(support.begin(), support.end()),
                              std::move(rho)};
}

double expectation(const RageState& state, std::span<const int> support,
                   const Mat& observable, int s_max) {
  const int dim = 1 << support.size();
  if (observable.rows() != dim || observable.cols() != dim) {
    throw std::invalid_argument("observable dimension does not match support");
  }
  const ReducedDensityMatrix rho =
      reduced_density_matrix(state, support, s_max);
  return (rho.matrix * observable).trace().real();
}

double two_point_correlation(const RageState& state, int j, int k,
                             const Mat2& op_j, const Mat2& op_k) {
  if (j == k) throw std::invalid_argument("correlation needs two sites");
  const bool ordered = j < k;
  const std::vector<int> pair = ordered ? std::vector<int>{j, k}
                                        : std::vector<int>{k, j};
  const Mat joint = ordered ? kron(op_j, op_k) : kron(op_k, op_j);
  const ReducedDensityMatrix rho = reduced_density_matrix(state, pair);
  const Mat2 id = Mat2::Identity();
  const Mat first = ordered ? kron(op_j, id) : kron(id, op_j);
  const Mat second = ordered ? kron(id, op_k) : kron(op_k, id);
  const double both = (rho.matrix * joint).trace().real();
  const double a = (rho.matrix * first).trace().real();
  const double b = (rho.matrix * second).trace().real();
  return both - a * b;
}

double norm_sq(const RageState& state, int s_max) {
  const std::vector<int> bad = state.non_unitary_sites();
  if (bad.empty()) return mps_norm_sq(state.mps());
  if (static_cast<int>(bad.size()) > s_max) {
    throw std::invalid_argument(
        "too many non-unitary rotations for an efficient norm");
  }
  const Mat sigma = support_density(state, bad);
  std::vector<Mat2> factors;
  for (int j : bad) factors.push_back(state.rotation(j).adjoint() *
                                      state.rotation(j));
  return (sigma * tensor_product(factors)).trace().real();
}

RageState from_wgs(const WgsSuperposition& w) {
  const int n_terms = static_cast<int>(w.amplitudes.size());
  if (n_terms < 1) throw std::invalid_argument("superposition needs a term");
  if (static_cast<int>(w.deformations.size()) != n_terms) {
    throw std::invalid_argument("one deformation list per term");
  }
  const int n = w.phi.n_sites();
  for (const auto& d : w.deformations) {
    if (static_cast<int>(d.size()) != n) {
      throw std::invalid_argument("deformation list must cover every site");
    }
  }
  MpsTensorSet mps(n, n_terms, Boundary::kOpen);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < 2; ++l) {
      Mat a = Mat::Zero(mps.left_dim(k), mps.right_dim(k));
      for (int m = 0; m < n_terms; ++m) {
        const Complex eta = l == 0 ? Complex(1.0) : std::exp(w.deformations[m][k]);
        const Complex amp = (k == 0) ? w.amplitudes[m] * eta : eta;
        const int row = a.rows() == 1 ? 0 : m;
        const int col = a.cols() == 1 ? 0 : m;
        a(row, col) += amp;
      }
      mps.set_tensor(k, l, std::move(a));
    }
  }
  std::vector<Mat2> rotations = w.rotations;
  if (rotations.empty()) rotations.assign(n, Mat2::Identity());
  return RageState(std::move(mps), w.phi, std::move(rotations));
}

std::vector<double> entanglement_entropy_profile(
    const RageState& state, std::span<const int> cut_sizes) {
  const DenseState dense = expand(state);
  std::vector<double> out;
  out.reserve(cut_sizes.size());
  for (int cut : cut_sizes) out.push_back(exact_entropy(dense, cut));
  return out;
}

RageState random_state(int n_sites, int bond_dim, Boundary boundary, Rng& rng,
                       bool dense_phases, bool random_rotations) {
  MpsTensorSet mps = MpsTensorSet::random(n_sites, bond_dim, boundary, rng);
  AdjacencyPhaseMatrix phi(n_sites);
  if (dense_phases) {
    for (int j = 0; j < n_sites; ++j) {
      for (int k = j + 1; k < n_sites; ++k) phi.set(j, k, rng.uniform(0.0, kTwoPi));
    }
  }
  std::vector<Mat2> rotations(n_sites, Mat2::Identity());
  if (random_rotations) {
    for (Mat2& v : rotations) v = rng.haar_unitary2();
  }
  return RageState(std::move(mps), std::move(phi), std::move(rotations));
}

}  // namespace rage
