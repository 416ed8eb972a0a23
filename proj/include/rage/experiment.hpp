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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rage/circuit.hpp"
#include "rage/hamiltonian.hpp"
#include "rage/optimizer.hpp"

namespace rage {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kIsing2d, kIsing1d, kRandomCircuit, kVerify };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

/// Sweeps followed by L-BFGS refinement over tensors, phases and rotations,
/// with one perturbed restart.
inline SweepConfig default_sweep() {
  SweepConfig s;
  s.gradient_refine = true;
  s.gradient_method = GradientMethod::kLbfgs;
  s.gradient_rotations = true;
  s.gradient_steps = 500;
  s.perturbation = 0.1;
  return s;
}

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kIsing2d;

  // Lattice (ising2d) or chain (ising1d, random_circuit, verify sizes).
  int rows = 4;
  int cols = 4;
  int n_sites = 8;
  bool periodic = false;
  double coupling = 1.0;
  std::vector<double> fields{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};

  int bond_dim = 4;
  Boundary boundary = Boundary::kOpen;
  bool graph = true;
  bool rotations = true;
  bool mps_baseline = true;
  bool match_parameters = true;
  bool exact = true;
  SweepConfig sweep = default_sweep();

  int depth = 20;
  Ensemble ensemble = Ensemble::kMixed;
  FitConfig fit;

  std::vector<int> verify_sizes{4, 6, 8};
  int verify_states = 10;

  std::vector<std::uint64_t> seeds{1};
  int threads = 1;
  std::string output = "results.csv";

  void validate() const;
};

/// Reads a JSON object of flat keys and applies `key=value` overrides (the
/// value is read as JSON, falling back to a plain string).
ExperimentConfig load_config(const std::optional<std::filesystem::path>& file,
                             const std::vector<std::string>& overrides);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

struct ResultRecord {
  std::string experiment;
  std::string seed;
  std::string point;
  std::string metric;
  double value = 0.0;
  double wall_ms = 0.0;
};

inline constexpr const char* kCsvHeader =
    "experiment,seed,point,metric,value,wall_ms";

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records);

struct ExperimentOutput {
  std::vector<ResultRecord> records;
  std::vector<std::string> warnings;
  bool numerical_failure = false;
  /// RAGE state of the first seed at the first field (Ising runs).
  std::optional<RageState> sample_state;
};

using LogFn = std::function<void(const std::string&)>;

/// Real parameter counts: 4 per matrix entry pair (nominal D x D at every
/// site), one per graph phase, four per rotation.
long rage_parameter_count(int n_sites, int bond_dim, bool graph,
                          bool rotations);
long mps_parameter_count(int n_sites, int bond_dim);
/// Smallest MPS bond dimension whose count reaches the RAGE budget.
int matched_mps_bond_dim(int n_sites, int bond_dim, bool graph,
                         bool rotations);

struct GroundStateRun {
  RageState state;
  EnergyTrace trace;
  double wall_ms = 0.0;
};

/// Sweeps a seeded random initial state; graph and rotation updates follow
/// the flags.
GroundStateRun optimize_ground_state(const Hamiltonian& h, int bond_dim,
                                     Boundary boundary, bool graph,
                                     bool rotations, const SweepConfig& sweep,
                                     std::uint64_t seed);

ExperimentOutput run_ising_experiment(const ExperimentConfig& cfg,
                                      const LogFn& log = {});
ExperimentOutput run_random_circuit_experiment(const ExperimentConfig& cfg,
                                               const LogFn& log = {});
/// Reduced density matrices of random states against the dense oracle.
ExperimentOutput run_verify(const ExperimentConfig& cfg, const LogFn& log = {});

ExperimentOutput run_experiment(const ExperimentConfig& cfg,
                                const LogFn& log = {});

/// CSV at cfg.output plus the resolved config next to it (.json).
void write_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out);

}  // namespace rage
