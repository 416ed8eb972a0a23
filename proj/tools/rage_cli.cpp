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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rage/circuit.hpp"
#include "rage/experiment.hpp"
#include "rage/hamiltonian.hpp"
#include "rage/oracle.hpp"
#include "rage/serialize.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string output;
  bool quiet = false;
};

void add_common(CLI::App* app, CommonOptions& opts) {
  app->add_option("-c,--config", opts.config, "JSON config file")
      ->check(CLI::ExistingFile);
  app->add_option("--set", opts.overrides, "Override a config key (key=value)");
  app->add_option("-o,--output", opts.output, "CSV output path");
  app->add_flag("-q,--quiet", opts.quiet, "Suppress progress output");
}

rage::ExperimentConfig resolve(const CommonOptions& opts,
                               std::vector<std::string> front) {
  std::optional<std::filesystem::path> file;
  if (!opts.config.empty()) file = opts.config;
  front.insert(front.end(), opts.overrides.begin(), opts.overrides.end());
  if (!opts.output.empty()) front.push_back("output=" + opts.output);
  return rage::load_config(file, front);
}

rage::LogFn logger(bool quiet) {
  if (quiet) return {};
  return [](const std::string& line) { std::cerr << line << '\n'; };
}

int finish(const rage::ExperimentConfig& cfg,
           const rage::ExperimentOutput& out) {
  rage::write_outputs(cfg, out);
  for (const std::string& w : out.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << out.records.size() << " rows to " << cfg.output
            << '\n';
  return out.numerical_failure ? kExitNumerical : 0;
}

int run_ground_state(const CommonOptions& opts, const std::string& state_out) {
  const rage::ExperimentConfig cfg = resolve(opts, {});
  if (cfg.experiment != rage::ExperimentKind::kIsing2d &&
      cfg.experiment != rage::ExperimentKind::kIsing1d) {
    throw rage::ConfigError("ground-state needs experiment ising2d or ising1d");
  }
  const rage::ExperimentOutput out = rage::run_experiment(cfg, logger(opts.quiet));
  if (!state_out.empty() && out.sample_state) {
    rage::serialize_state(*out.sample_state, state_out);
  }
  return finish(cfg, out);
}

int run_circuit_file(const rage::ExperimentConfig& cfg,
                     const std::string& path, bool quiet) {
  std::ifstream in(path);
  if (!in) throw rage::ConfigError("cannot read circuit " + path);
  const rage::Circuit circuit = rage::parse_circuit(in, cfg.n_sites);
  rage::ExperimentOutput out;
  for (std::uint64_t seed : cfg.seeds) {
    rage::Rng rng(seed, 0);
    const rage::MpsTensorSet start = rage::MpsTensorSet::random(
        cfg.n_sites, cfg.bond_dim, cfg.boundary, rng);
    for (rage::Backend backend : {rage::Backend::kRage, rage::Backend::kMps}) {
      if (backend == rage::Backend::kMps && !cfg.mps_baseline) continue;
      rage::RageState state(start);
      const rage::CircuitRun run =
          rage::run_circuit(state, circuit, true, backend, cfg.fit);
      const std::string metric = rage::to_string(backend) + "_fidelity";
      for (std::size_t k = 0; k < run.fidelity.size(); ++k) {
        out.records.push_back({"circuit_file", std::to_string(seed),
                               "k=" + std::to_string(k), metric,
                               run.fidelity[k], 0.0});
      }
      if (!quiet) {
        std::cerr << "seed " << seed << ' ' << metric << ' '
                  << run.fidelity.back() << '\n';
      }
    }
  }
  return finish(cfg, out);
}

int show_state(const std::string& path) {
  const rage::RageState state = rage::deserialize_state(path);
  const rage::MpsTensorSet& mps = state.mps();
  std::printf("sites      %d\n", mps.n_sites());
  std::printf("bond dim   %d\n", mps.bond_dim());
  std::printf("boundary   %s\n", rage::to_string(mps.boundary()).c_str());
  std::printf("mps norm   %.12g\n", rage::mps_norm_sq(mps));
  std::printf("edges      %zu\n", state.phi().edges().size());
  std::printf("rotations  %s\n",
              state.rotations_identity() ? "identity" : "general");
  const rage::Mat2 z = rage::pauli(rage::Pauli::kZ);
  const rage::Mat2 x = rage::pauli(rage::Pauli::kX);
  std::printf("site        <X>            <Z>\n");
  for (int k = 0; k < mps.n_sites(); ++k) {
    const std::vector<int> site{k};
    std::printf("%4d  %13.9f  %13.9f\n", k + 1,
                rage::expectation(state, site, x),
                rage::expectation(state, site, z));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational RAGE state engine"};
  app.require_subcommand(1);

  CommonOptions gs_opts;
  std::string state_out;
  auto* gs = app.add_subcommand("ground-state", "Ising ground-state comparison");
  add_common(gs, gs_opts);
  gs->add_option("--save-state", state_out,
                 "Write the first optimized RAGE state to this file");

  CommonOptions circ_opts;
  std::string circuit_file;
  auto* circ = app.add_subcommand("circuit", "Random or file-based circuit run");
  add_common(circ, circ_opts);
  circ->add_option("--file", circuit_file, "Circuit file (one gate per line)")
      ->check(CLI::ExistingFile);

  CommonOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Oracle equivalence check");
  add_common(verify, verify_opts);

  std::string show_path;
  auto* show = app.add_subcommand("show", "Summarize a serialized state");
  show->add_option("state", show_path, "State file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gs) return run_ground_state(gs_opts, state_out);
    if (*circ) {
      const rage::ExperimentConfig cfg =
          resolve(circ_opts, {"experiment=random_circuit", "n_sites=10",
                              "bond_dim=2"});
      if (!circuit_file.empty()) {
        return run_circuit_file(cfg, circuit_file, circ_opts.quiet);
      }
      return finish(cfg, rage::run_experiment(cfg, logger(circ_opts.quiet)));
    }
    if (*verify) {
      const rage::ExperimentConfig cfg =
          resolve(verify_opts, {"experiment=verify"});
      return finish(cfg, rage::run_experiment(cfg, logger(verify_opts.quiet)));
    }
    if (*show) return show_state(show_path);
  } catch (const rage::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rage::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rage::UnsupportedVersionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rage::CircuitFormatError& e) {
    std::cerr << "circuit error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
