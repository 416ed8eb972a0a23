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

#include "rage/hamiltonian.hpp"
#include "rage/linalg.hpp"
#include "rage/mps.hpp"
#include "rage/state.hpp"

namespace rage {

// Dense 2^N reference implementations. Basis index of |s_0 ... s_{N-1}> is
// sum_k s_k 2^{N-1-k}: site 0 is the most significant bit.

inline constexpr int kOracleMaxQubits = 16;

struct DenseState {
  int n_qubits = 0;
  Vec amplitudes;
};

/// Throws std::invalid_argument when n exceeds `cap`.
void check_oracle_size(int n, int cap = kOracleMaxQubits);

/// All 2^N amplitudes of the MPS by explicit matrix products.
DenseState expand(const MpsTensorSet& mps, int cap = kOracleMaxQubits);

/// MPS amplitudes, times exp(i sum_{k<l} Phi[k,l] s_k s_l), then (x) V_j.
DenseState expand(const RageState& state, int cap = kOracleMaxQubits);

/// Applies a 2x2 operator to one qubit in place.
void apply_one_qubit(DenseState& v, int site, const Mat2& op);

/// Multiplies amplitudes with s_j = s_k = 1 by exp(i phi).
void apply_controlled_phase(DenseState& v, int j, int k, double phi);

/// H v without forming H.
Vec apply_hamiltonian(const Hamiltonian& h, const Vec& v);

/// Dense 2^N x 2^N matrix (intended for N <= 10).
Mat dense_hamiltonian(const Hamiltonian& h);

struct GroundState {
  double energy = 0.0;
  DenseState vector;
  double residual = 0.0;  // ||H v - E v||
};

/// Lowest eigenpair. Dense eigensolver up to `dense_limit` qubits, restarted
/// Lanczos with full reorthogonalization above it.
GroundState exact_ground(const Hamiltonian& h, int cap = kOracleMaxQubits,
                         int dense_limit = 10);

/// |<a|b>|^2 / (||a||^2 ||b||^2).
double fidelity(const DenseState& a, const DenseState& b);

/// Normalized reduced density matrix on sorted `support`.
Mat exact_rdm(const DenseState& v, std::span<const int> support);

/// Von Neumann entropy of the first `block` sites.
double exact_entropy(const DenseState& v, int block);

/// <v|O|v>/<v|v> for O acting on sorted `support`.
double exact_expectation(const DenseState& v, std::span<const int> support,
                         const Mat& observable);

}  // namespace rage
