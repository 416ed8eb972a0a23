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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rage/hamiltonian.hpp"
#include "rage/state.hpp"

namespace rage {

enum class PhasePairs { kAll, kEdgeList };

enum class GradientMethod { kSteepestDescent, kLbfgs };

std::string to_string(GradientMethod m);
GradientMethod gradient_method_from_string(const std::string& s);

struct SweepConfig {
  int max_sweeps = 20;
  /// Stop once a full sweep lowers the energy by less than this, relative.
  double energy_tol = 1e-8;
  double pencil_cutoff = 1e-10;
  bool phase_updates = true;
  PhasePairs phase_pairs = PhasePairs::kAll;
  std::vector<std::pair<int, int>> edge_list;
  bool rotation_updates = true;
  bool gradient_refine = false;
  int gradient_steps = 50;
  GradientMethod gradient_method = GradientMethod::kSteepestDescent;
  /// Also vary the rotations during refinement (unit quaternions); only
  /// honored together with rotation_updates.
  bool gradient_rotations = false;
  int lbfgs_memory = 10;
  /// Amplitude of a seeded random kick to Phi and V before refinement;
  /// the lower of the kicked and unkicked results is kept.
  double perturbation = 0.0;
  std::uint64_t seed = 0;
};

enum class UpdateKind { kMps, kPhase, kRotation, kGradient };

std::string to_string(UpdateKind kind);

struct TraceRecord {
  int sweep = 0;
  UpdateKind kind = UpdateKind::kMps;
  int site_a = -1;
  int site_b = -1;
  double energy = 0.0;
  bool skipped = false;
  /// Environment assembly and small-problem solve timings.
  double assembly_ms = 0.0;
  double solve_ms = 0.0;
};

struct EnergyTrace {
  std::vector<TraceRecord> records;
  std::vector<std::string> warnings;
  int sweeps = 0;
  bool converged = false;
  bool line_search_failed = false;
  double final_energy = 0.0;
};

struct UpdateResult {
  double energy = 0.0;
  bool applied = false;
  double assembly_ms = 0.0;
  double solve_ms = 0.0;
};

/// Pair list used for phase updates under `cfg`.
std::vector<std::pair<int, int>> phase_pair_list(int n_sites,
                                                 const SweepConfig& cfg);

/// Optimal site tensor of U(Phi)|MPS> for `h_v` (rotations ignored).
/// Degenerate norm environments leave the site unchanged.
UpdateResult local_mps_update(RageState& state, const Hamiltonian& h_v,
                              int site, double cutoff = 1e-10);

/// Energy along one phase direction: E(phi) = c0 + 2 Re(c1 e^{i phi}),
/// normalized by the state norm. Uses the state's rotations.
struct PhaseQuadratic {
  double c0 = 0.0;
  Complex c1 = 0.0;
  double value(double phi) const {
    return c0 + 2.0 * (c1 * std::polar(1.0, phi)).real();
  }
};

/// Contribution of the terms coupled to Phi[j,k]; other terms add a
/// phi-independent constant that is not included in c0.
PhaseQuadratic phase_quadratic(const RageState& state, const Hamiltonian& h,
                               int j, int k);

UpdateResult local_phase_update(RageState& state, const Hamiltonian& h, int j,
                                int k);

/// V_site <- (x1 1 + i x2 X + i x3 Y + i x4 Z) V_site with x the minimal
/// eigenvector of the 4x4 real pencil, normalized to unit length.
UpdateResult local_rotation_update(RageState& state, const Hamiltonian& h,
                                   int site, double cutoff = 1e-10);

/// Progress callback, invoked after every recorded update.
using ProgressFn = std::function<void(const TraceRecord&)>;

EnergyTrace sweep(RageState& state, const Hamiltonian& h,
                  const SweepConfig& cfg, const ProgressFn& progress = {});

/// Plain MPS ground-state sweeps (same local solver and sweep order as
/// `sweep`) on chains built directly from the Pauli terms.
EnergyTrace mps_sweep(MpsTensorSet& mps, const Hamiltonian& h,
                      const SweepConfig& cfg, const ProgressFn& progress = {});

/// Gradient of the Rayleigh quotient of U(Phi)|MPS> under h_v.
struct EnergyGradient {
  double energy = 0.0;
  /// dE/d conj(a_k) for the flattened tensors of every site.
  std::vector<Vec> tensors;
  /// dE/dPhi for every listed pair.
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> phases;

  double squared_norm() const;
};

EnergyGradient energy_gradient(const RageState& state, const Hamiltonian& h_v,
                               const std::vector<std::pair<int, int>>& pairs);

/// V = e^{i gamma} (q0 1 + i q1 X + i q2 Y + i q3 Z) with |q| = 1, q0 >= 0.
Eigen::Vector4d rotation_quaternion(const Mat2& v);
/// (q0 1 + i q1 X + i q2 Y + i q3 Z) / |q|.
Mat2 quaternion_rotation(const Eigen::Vector4d& q);

/// dE/dq for V_j = quaternion_rotation(q_j) at the current (unitary)
/// rotations, projected onto the unit sphere.
std::vector<Eigen::Vector4d> rotation_gradient(const RageState& state,
                                               const Hamiltonian& h);

/// Descent with Armijo backtracking (constant 1e-4, shrink 0.5) over all
/// tensors, the configured phases and, optionally, the rotations. Stops when
/// the gradient norm drops below 1e-6 or the step budget is spent.
EnergyTrace gradient_refine(RageState& state, const Hamiltonian& h,
                            const SweepConfig& cfg);

}  // namespace rage
