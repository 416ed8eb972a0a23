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

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rage/linalg.hpp"
#include "rage/oracle.hpp"
#include "rage/rng.hpp"
#include "rage/state.hpp"

namespace rage {

/// diag(1, 1, 1, e^{i phi}) on qubits (j, k).
struct DiagonalPhase {
  int j = 0;
  int k = 1;
  double phi = 0.0;
};

/// diag(1, e^{i alpha}) on qubit j.
struct LocalDiagonal {
  int j = 0;
  double alpha = 0.0;
};

struct SingleQubit {
  int j = 0;
  Mat2 u = Mat2::Identity();
};

using Gate = std::variant<DiagonalPhase, LocalDiagonal, SingleQubit>;

void validate_gate(const Gate& gate, int n_qubits);

/// Gates in order, grouped into blocks; fidelities are tracked per block.
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  /// Exclusive end index of every block, ascending.
  std::vector<std::size_t> block_ends;

  void add(Gate gate) { gates.push_back(std::move(gate)); }
  void end_block() { block_ends.push_back(gates.size()); }
  std::size_t n_blocks() const { return block_ends.size(); }
  void validate() const;
};

class CircuitFormatError : public std::runtime_error {
 public:
  CircuitFormatError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// One gate per line: `CP j k phi`, `LP j alpha`, `U1 j` followed by the four
/// entries of U as real/imaginary pairs in row order. Indices are 1-based;
/// `#` starts a comment. Each gate forms its own block.
Circuit parse_circuit(std::istream& in, int n_qubits);
void write_circuit(std::ostream& out, const Circuit& circuit);

enum class Ensemble { kMixed, kDiagonal };

std::string to_string(Ensemble e);
Ensemble ensemble_from_string(const std::string& s);

/// `blocks` blocks of two gates: a random single-qubit gate on a uniform
/// site (Haar unitary, or a uniform local phase for kDiagonal) followed by a
/// controlled phase, uniform in [0, 2pi), on a uniform pair.
Circuit random_circuit(int n_qubits, int blocks, Ensemble ensemble, Rng& rng);

struct FitConfig {
  int max_passes = 20;
  /// Stop once a pass improves the overlap by less than this, relative.
  double rel_tol = 1e-9;
  bool vary_phases = true;
  double cutoff = 1e-10;
};

struct FitResult {
  /// Normalized overlap |<fit|target>|^2 / (<fit|fit> <target|target>).
  double overlap = 0.0;
  double initial_overlap = 0.0;
  int passes = 0;
  bool converged = false;
  /// Overlap after every site or phase step, starting with the guess.
  std::vector<double> history;
};

/// Phi[j,k] += phi. Exact.
void apply_diagonal_two_qubit(RageState& state, int j, int k, double phi);

/// A_1^{(j)} *= e^{i alpha}. Exact.
void apply_local_diagonal(RageState& state, int j, double alpha);

/// Best approximation of U_j |state> with the phases of row j free. The
/// state is replaced by the fit, normalized.
FitResult apply_single_qubit(RageState& state, int j, const Mat2& u,
                             const FitConfig& cfg = {});

/// Plain MPS counterparts at fixed bond dimension: local gates fold into
/// the tensors, a controlled phase is compressed variationally.
void mps_apply_one_qubit(MpsTensorSet& mps, int j, const Mat2& u);
FitResult mps_apply_controlled_phase(MpsTensorSet& mps, int j, int k,
                                     double phi, const FitConfig& cfg = {});

enum class Backend { kRage, kMps };

std::string to_string(Backend b);

struct CircuitRun {
  /// Fidelity before the first gate and after every block.
  std::vector<double> fidelity;
  int fits = 0;
  int fits_below_tolerance = 0;
  double min_fit_overlap = 1.0;
};

/// Applies `circuit` to `state` with rotations fixed to identity. The MPS
/// backend requires Phi = 0 and leaves it so.
CircuitRun run_circuit(RageState& state, const Circuit& circuit,
                       bool track_fidelity, Backend backend = Backend::kRage,
                       const FitConfig& cfg = {});

/// Applies the gates of `circuit` exactly to a dense vector.
void apply_exact(DenseState& v, const Gate& gate);

}  // namespace rage
