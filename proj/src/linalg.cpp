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

#include "rage/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace rage {

namespace {

struct RetainedBasis {
  Mat basis;        // columns span the retained range of N
  RealVec weights;  // corresponding eigenvalues of N
};

RetainedBasis retained_range(const Mat& n_mat, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(n_mat);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("norm matrix eigendecomposition failed");
  }
  const RealVec& lam = eig.eigenvalues();
  const double top = lam.size() > 0 ? lam.maxCoeff() : 0.0;
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw DegenerateNormError("norm matrix is numerically zero");
  }
  const double floor = cutoff * top;
  int kept = 0;
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) > floor) ++kept;
  }
  RetainedBasis out{Mat(n_mat.rows(), kept), RealVec(kept)};
  int c = 0;
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) > floor) {
      out.basis.col(c) = eig.eigenvectors().col(i);
      out.weights(c) = lam(i);
      ++c;
    }
  }
  return out;
}

void check_pencil(const HermitianPencil& p) {
  if (p.h_mat.rows() != p.h_mat.cols() || p.n_mat.rows() != p.n_mat.cols() ||
      p.h_mat.rows() != p.n_mat.rows()) {
    throw std::invalid_argument("pencil matrices must be square and equal size");
  }
  if (p.h_mat.rows() == 0) {
    throw std::invalid_argument("empty pencil");
  }
  if (hermiticity_defect(p.h_mat) > 1e-10 ||
      hermiticity_defect(p.n_mat) > 1e-10) {
    throw std::invalid_argument("pencil matrices must be Hermitian");
  }
}

}  // namespace

double hermiticity_defect(const Mat& m) {
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() / scale;
}

PencilSpectrum pencil_spectrum(const HermitianPencil& pencil, double cutoff) {
  check_pencil(pencil);
  const Mat n_herm = 0.5 * (pencil.n_mat + pencil.n_mat.adjoint());
  const Mat h_herm = 0.5 * (pencil.h_mat + pencil.h_mat.adjoint());
  const RetainedBasis range = retained_range(n_herm, cutoff);

  // Whitened basis W = U diag(lambda^-1/2): W^dagger N W = 1.
  Mat whitened = range.basis;
  for (int c = 0; c < whitened.cols(); ++c) {
    whitened.col(c) /= std::sqrt(range.weights(c));
  }
  Mat reduced = whitened.adjoint() * h_herm * whitened;
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> eig(reduced);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("reduced pencil eigendecomposition failed");
  }
  return PencilSpectrum{eig.eigenvalues(), whitened * eig.eigenvectors()};
}

PencilSolution solve_hermitian_pencil(const HermitianPencil& pencil,
                                      Extremum which, double cutoff) {
  PencilSpectrum spec = pencil_spectrum(pencil, cutoff);
  const Eigen::Index idx = which == Extremum::kMin ? 0 : spec.values.size() - 1;
  return PencilSolution{spec.values(idx), spec.vectors.col(idx)};
}

Vec solve_truncated(const Mat& n_mat, const Vec& rhs, double cutoff) {
  if (n_mat.rows() != rhs.size()) {
    throw std::invalid_argument("solve_truncated: dimension mismatch");
  }
  const Mat n_herm = 0.5 * (n_mat + n_mat.adjoint());
  const RetainedBasis range = retained_range(n_herm, cutoff);
  Vec coeff = range.basis.adjoint() * rhs;
  for (int c = 0; c < coeff.size(); ++c) coeff(c) /= range.weights(c);
  return range.basis * coeff;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
    }
  }
  return out;
}

double von_neumann_entropy(const Mat& rho) {
  const Mat herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> eig(herm, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double p = eig.eigenvalues()(i);
    if (p > 1e-12) s -= p * std::log(p);
  }
  return s;
}

}  // namespace rage
