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

#include "rage/oracle.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace rage {

void check_oracle_size(int n, int cap) {
  if (n < 1 || n > cap) {
    throw std::invalid_argument("dense oracle limited to " +
                                std::to_string(cap) + " qubits, got " +
                                std::to_string(n));
  }
}

DenseState expand(const MpsTensorSet& mps, int cap) {
  const int n = mps.n_sites();
  check_oracle_size(n, cap);
  // Breadth-first partial products; level k holds 2^k matrices.
  std::vector<Mat> level{mps.tensor(0, 0), mps.tensor(0, 1)};
  for (int k = 1; k < n; ++k) {
    std::vector<Mat> next;
    next.reserve(level.size() * 2);
    for (const Mat& prefix : level) {
      next.push_back(prefix * mps.tensor(k, 0));
      next.push_back(prefix * mps.tensor(k, 1));
    }
    level = std::move(next);
  }
  DenseState out{n, Vec(Eigen::Index{1} << n)};
  for (std::size_t idx = 0; idx < level.size(); ++idx) {
    out.amplitudes(static_cast<Eigen::Index>(idx)) = level[idx].trace();
  }
  return out;
}

DenseState expand(const RageState& state, int cap) {
  DenseState out = expand(state.mps(), cap);
  const int n = out.n_qubits;
  const RealMat& phi = state.phi().dense();
  for (Eigen::Index idx = 0; idx < out.amplitudes.size(); ++idx) {
    double angle = 0.0;
    for (int k = 0; k < n; ++k) {
      if (!((idx >> (n - 1 - k)) & 1)) continue;
      for (int l = k + 1; l < n; ++l) {
        if ((idx >> (n - 1 - l)) & 1) angle += phi(k, l);
      }
    }
    if (angle != 0.0) out.amplitudes(idx) *= std::polar(1.0, angle);
  }
  for (int j = 0; j < n; ++j) {
    if (state.rotation(j) != Mat2::Identity()) {
      apply_one_qubit(out, j, state.rotation(j));
    }
  }
  return out;
}

void apply_one_qubit(DenseState& v, int site, const Mat2& op) {
  const Eigen::Index stride = Eigen::Index{1} << (v.n_qubits - 1 - site);
  for (Eigen::Index idx = 0; idx < v.amplitudes.size(); ++idx) {
    if (idx & stride) continue;
    const Complex a0 = v.amplitudes(idx);
    const Complex a1 = v.amplitudes(idx | stride);
    v.amplitudes(idx) = op(0, 0) * a0 + op(0, 1) * a1;
    v.amplitudes(idx | stride) = op(1, 0) * a0 + op(1, 1) * a1;
  }
}

void apply_controlled_phase(DenseState& v, int j, int k, double phi) {
  const Eigen::Index mj = Eigen::Index{1} << (v.n_qubits - 1 - j);
  const Eigen::Index mk = Eigen::Index{1} << (v.n_qubits - 1 - k);
  const Complex factor = std::polar(1.0, phi);
  for (Eigen::Index idx = 0; idx < v.amplitudes.size(); ++idx) {
    if ((idx & mj) && (idx & mk)) v.amplitudes(idx) *= factor;
  }
}

Vec apply_hamiltonian(const Hamiltonian& h, const Vec& v) {
  const int n = h.n_sites();
  Vec out = Vec::Zero(v.size());
  DenseState work{n, Vec()};
  for (const PauliTerm& t : h.terms()) {
    work.amplitudes = v;
    for (const SiteOperator& f : t.factors) apply_one_qubit(work, f.site, f.matrix);
    out += t.coefficient * work.amplitudes;
  }
  return out;
}

Mat dense_hamiltonian(const Hamiltonian& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.n_sites();
  Mat out(dim, dim);
  Vec unit = Vec::Zero(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    unit(c) = 1.0;
    out.col(c) = apply_hamiltonian(h, unit);
    unit(c) = 0.0;
  }
  return out;
}

namespace {

GroundState lanczos_ground(const Hamiltonian& h) {
  const int n = h.n_sites();
  const Eigen::Index dim = Eigen::Index{1} << n;
  const int krylov = static_cast<int>(std::min<Eigen::Index>(dim, 60));
  // Deterministic, non-symmetric start vector.
  Vec start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    start(i) = Complex(1.0 + 0.01 * std::sin(0.7 * i), 0.01 * std::cos(1.3 * i));
  }
  start.normalize();

  GroundState best;
  for (int restart = 0; restart < 200; ++restart) {
    Mat basis(dim, krylov);
    RealMat tri = RealMat::Zero(krylov, krylov);
    basis.col(0) = start;
    int used = krylov;
    for (int j = 0; j < krylov; ++j) {
      Vec w = apply_hamiltonian(h, basis.col(j));
      const double alpha = basis.col(j).dot(w).real();
      tri(j, j) = alpha;
      // Full reorthogonalization, twice.
      for (int pass = 0; pass < 2; ++pass) {
        w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
      }
      const double beta = w.norm();
      if (j + 1 == krylov) break;
      if (beta < 1e-12) {
        used = j + 1;
        break;
      }
      tri(j, j + 1) = beta;
      tri(j + 1, j) = beta;
      basis.col(j + 1) = w / beta;
    }
    Eigen::SelfAdjointEigenSolver<RealMat> eig(tri.topLeftCorner(used, used));
    Vec ritz = basis.leftCols(used) * eig.eigenvectors().col(0).cast<Complex>();
    ritz.normalize();
    const Vec hv = apply_hamiltonian(h, ritz);
    const double e = ritz.dot(hv).real();
    best.energy = e;
    best.vector = DenseState{n, ritz};
    best.residual = (hv - e * ritz).norm();
    if (best.residual <= 1e-9) break;
    start = ritz;
  }
  return best;
}

}  // namespace

GroundState exact_ground(const Hamiltonian& h, int cap, int dense_limit) {
  const int n = h.n_sites();
  check_oracle_size(n, cap);
  if (n > dense_limit) return lanczos_ground(h);
  const Mat dense = dense_hamiltonian(h);
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (dense + dense.adjoint()));
  GroundState out;
  out.energy = eig.eigenvalues()(0);
  out.vector = DenseState{n, eig.eigenvectors().col(0)};
  out.residual =
      (dense * out.vector.amplitudes - out.energy * out.vector.amplitudes).norm();
  return out;
}

double fidelity(const DenseState& a, const DenseState& b) {
  if (a.n_qubits != b.n_qubits) {
    throw std::invalid_argument("fidelity of states with different sizes");
  }
  const double na = a.amplitudes.squaredNorm();
  const double nb = b.amplitudes.squaredNorm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw DegenerateNormError("fidelity of a zero vector");
  }
  return std::norm(a.amplitudes.dot(b.amplitudes)) / (na * nb);
}

Mat exact_rdm(const DenseState& v, std::span<const int> support) {
  const int n = v.n_qubits;
  validate_support(support, n, n);
  const int n_keep = static_cast<int>(support.size());
  std::vector<int> traced;
  for (int q = 0, p = 0; q < n; ++q) {
    if (p < n_keep && support[p] == q) {
      ++p;
    } else {
      traced.push_back(q);
    }
  }
  auto scatter = [n](int bits, std::span<const int> sites) {
    Eigen::Index full = 0;
    const int m = static_cast<int>(sites.size());
    for (int p = 0; p < m; ++p) {
      if ((bits >> (m - 1 - p)) & 1) full |= Eigen::Index{1} << (n - 1 - sites[p]);
    }
    return full;
  };
  const int keep_dim = 1 << n_keep;
  const int rest_dim = 1 << traced.size();
  // Amplitude matrix psi[kept, traced]; rho = psi psi^dagger.
  Mat psi(keep_dim, rest_dim);
  for (int a = 0; a < keep_dim; ++a) {
    const Eigen::Index base = scatter(a, support);
    for (int t = 0; t < rest_dim; ++t) {
      psi(a, t) = v.amplitudes(base | scatter(t, traced));
    }
  }
  Mat rho = psi * psi.adjoint();
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw DegenerateNormError("zero state");
  return rho / tr;
}

double exact_entropy(const DenseState& v, int block) {
  if (block < 0 || block > v.n_qubits) {
    throw std::invalid_argument("block size out of range");
  }
  if (block == 0 || block == v.n_qubits) return 0.0;
  std::vector<int> sites(block);
  for (int i = 0; i < block; ++i) sites[i] = i;
  return von_neumann_entropy(exact_rdm(v, sites));
}

double exact_expectation(const DenseState& v, std::span<const int> support,
                         const Mat& observable) {
  return (exact_rdm(v, support) * observable).trace().real();
}

}  // namespace rage
