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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rage {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr Complex kI{0.0, 1.0};

/// Raised when the norm side of a Rayleigh quotient carries no weight.
class DegenerateNormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pair (H, N) of the generalized problem H x = lambda N x.
struct HermitianPencil {
  Mat h_mat;
  Mat n_mat;
};

enum class Extremum { kMin, kMax };

struct PencilSolution {
  double eigenvalue = 0.0;
  Vec eigenvector;  // normalized so that x^dagger N x = 1
};

/// Full spectrum of a pencil restricted to the retained range of N.
/// Eigenvalues ascend; column c of `vectors` is N-normalized.
struct PencilSpectrum {
  RealVec values;
  Mat vectors;
};

/// Eigen-decomposes N, drops directions with eigenvalue below
/// `cutoff * max_eigenvalue`, and solves the reduced standard problem.
PencilSpectrum pencil_spectrum(const HermitianPencil& pencil,
                               double cutoff = 1e-10);

PencilSolution solve_hermitian_pencil(const HermitianPencil& pencil,
                                      Extremum which,
                                      double cutoff = 1e-10);

/// Minimum-norm solution of N x = rhs for Hermitian PSD N, with the same
/// eigenvalue truncation as the pencil solver.
Vec solve_truncated(const Mat& n_mat, const Vec& rhs, double cutoff = 1e-10);

/// Relative Hermiticity defect ||M - M^dagger|| / max(1, ||M||).
double hermiticity_defect(const Mat& m);

/// Kronecker product a (x) b with row index i*b.rows()+j.
Mat kron(const Mat& a, const Mat& b);

/// Von Neumann entropy (natural log) of a density matrix; eigenvalues
/// below 1e-12 are dropped.
double von_neumann_entropy(const Mat& rho);

}  // namespace rage
