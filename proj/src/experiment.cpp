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

#include "rage/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <thread>

#include "json.hpp"
#include "rage/oracle.hpp"
#include "rage/serialize.hpp"

namespace rage {

using json = nlohmann::ordered_json;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kIsing2d:
      return "ising2d";
    case ExperimentKind::kIsing1d:
      return "ising1d";
    case ExperimentKind::kRandomCircuit:
      return "random_circuit";
    case ExperimentKind::kVerify:
      return "verify";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& s) {
  if (s == "ising2d") return ExperimentKind::kIsing2d;
  if (s == "ising1d") return ExperimentKind::kIsing1d;
  if (s == "random_circuit") return ExperimentKind::kRandomCircuit;
  if (s == "verify") return ExperimentKind::kVerify;
  throw ConfigError("unknown experiment '" + s + "'");
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(rows >= 1 && cols >= 1, "rows and cols must be positive");
  require(n_sites >= 2, "n_sites must be at least 2");
  require(!fields.empty(), "fields must not be empty");
  require(bond_dim >= 1, "bond_dim must be positive");
  require(sweep.max_sweeps >= 1, "max_sweeps must be positive");
  require(sweep.energy_tol > 0.0, "energy_tol must be positive");
  require(sweep.pencil_cutoff > 0.0, "pencil_cutoff must be positive");
  require(sweep.gradient_steps >= 0, "gradient_steps must be nonnegative");
  require(sweep.lbfgs_memory >= 1, "lbfgs_memory must be positive");
  require(sweep.perturbation >= 0.0, "perturbation must be nonnegative");
  require(depth >= 0, "depth must be nonnegative");
  require(fit.max_passes >= 1, "fit_passes must be positive");
  require(fit.rel_tol > 0.0, "fit_tol must be positive");
  require(!verify_sizes.empty(), "verify_sizes must not be empty");
  for (int n : verify_sizes) {
    require(n >= 2 && n <= kOracleMaxQubits, "verify size out of range");
  }
  require(verify_states >= 1, "verify_states must be positive");
  require(!seeds.empty(), "seeds must not be empty");
  require(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() ==
              seeds.size(),
          "seeds must be distinct");
  require(threads >= 1, "threads must be positive");
  require(!output.empty(), "output must not be empty");
  if (experiment == ExperimentKind::kIsing2d && exact) {
    require(rows * cols <= kOracleMaxQubits, "lattice exceeds the oracle cap");
  }
  if (experiment == ExperimentKind::kIsing1d && exact) {
    require(n_sites <= kOracleMaxQubits, "chain exceeds the oracle cap");
  }
  if (experiment == ExperimentKind::kRandomCircuit) {
    require(n_sites <= kOracleMaxQubits, "circuit exceeds the oracle cap");
  }
}

namespace {

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["rows"] = c.rows;
  j["cols"] = c.cols;
  j["n_sites"] = c.n_sites;
  j["periodic"] = c.periodic;
  j["coupling"] = c.coupling;
  j["fields"] = c.fields;
  j["bond_dim"] = c.bond_dim;
  j["boundary"] = to_string(c.boundary);
  j["graph"] = c.graph;
  j["rotations"] = c.rotations;
  j["mps_baseline"] = c.mps_baseline;
  j["match_parameters"] = c.match_parameters;
  j["exact"] = c.exact;
  j["max_sweeps"] = c.sweep.max_sweeps;
  j["energy_tol"] = c.sweep.energy_tol;
  j["pencil_cutoff"] = c.sweep.pencil_cutoff;
  j["gradient_refine"] = c.sweep.gradient_refine;
  j["gradient_steps"] = c.sweep.gradient_steps;
  j["gradient_method"] = to_string(c.sweep.gradient_method);
  j["gradient_rotations"] = c.sweep.gradient_rotations;
  j["lbfgs_memory"] = c.sweep.lbfgs_memory;
  j["perturbation"] = c.sweep.perturbation;
  j["depth"] = c.depth;
  j["ensemble"] = to_string(c.ensemble);
  j["fit_passes"] = c.fit.max_passes;
  j["fit_tol"] = c.fit.rel_tol;
  j["vary_phases"] = c.fit.vary_phases;
  j["verify_sizes"] = c.verify_sizes;
  j["verify_states"] = c.verify_states;
  j["seeds"] = c.seeds;
  j["threads"] = c.threads;
  j["output"] = c.output;
  return j;
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("invalid value for '") + key + "'");
  }
}

ExperimentConfig from_json(const json& j) {
  ExperimentConfig c;
  c.experiment = experiment_from_string(get_as<std::string>(j, "experiment"));
  c.rows = get_as<int>(j, "rows");
  c.cols = get_as<int>(j, "cols");
  c.n_sites = get_as<int>(j, "n_sites");
  c.periodic = get_as<bool>(j, "periodic");
  c.coupling = get_as<double>(j, "coupling");
  c.fields = get_as<std::vector<double>>(j, "fields");
  c.bond_dim = get_as<int>(j, "bond_dim");
  try {
    c.boundary = boundary_from_string(get_as<std::string>(j, "boundary"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.graph = get_as<bool>(j, "graph");
  c.rotations = get_as<bool>(j, "rotations");
  c.mps_baseline = get_as<bool>(j, "mps_baseline");
  c.match_parameters = get_as<bool>(j, "match_parameters");
  c.exact = get_as<bool>(j, "exact");
  c.sweep.max_sweeps = get_as<int>(j, "max_sweeps");
  c.sweep.energy_tol = get_as<double>(j, "energy_tol");
  c.sweep.pencil_cutoff = get_as<double>(j, "pencil_cutoff");
  c.sweep.gradient_refine = get_as<bool>(j, "gradient_refine");
  c.sweep.gradient_steps = get_as<int>(j, "gradient_steps");
  try {
    c.sweep.gradient_method =
        gradient_method_from_string(get_as<std::string>(j, "gradient_method"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.sweep.gradient_rotations = get_as<bool>(j, "gradient_rotations");
  c.sweep.lbfgs_memory = get_as<int>(j, "lbfgs_memory");
  c.sweep.perturbation = get_as<double>(j, "perturbation");
  c.depth = get_as<int>(j, "depth");
  try {
    c.ensemble = ensemble_from_string(get_as<std::string>(j, "ensemble"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.fit.max_passes = get_as<int>(j, "fit_passes");
  c.fit.rel_tol = get_as<double>(j, "fit_tol");
  c.fit.vary_phases = get_as<bool>(j, "vary_phases");
  c.verify_sizes = get_as<std::vector<int>>(j, "verify_sizes");
  c.verify_states = get_as<int>(j, "verify_states");
  const json& seeds = j.at("seeds");
  if (seeds.is_number_integer()) {
    const auto n = seeds.get<std::int64_t>();
    if (n < 1) throw ConfigError("seed count must be positive");
    c.seeds.clear();
    for (std::int64_t s = 1; s <= n; ++s) c.seeds.push_back(s);
  } else {
    c.seeds = get_as<std::vector<std::uint64_t>>(j, "seeds");
  }
  c.threads = get_as<int>(j, "threads");
  c.output = get_as<std::string>(j, "output");
  c.validate();
  return c;
}

void merge_object(json& base, const json& patch) {
  if (!patch.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : patch.items()) {
    if (!base.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    base[key] = value;
  }
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Runs tasks 0..n-1 on `threads` workers; results keep task order.
template <class Fn>
std::vector<std::vector<ResultRecord>> fan_out(std::size_t n, int threads,
                                               Fn&& task) {
  std::vector<std::vector<ResultRecord>> results(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) results[i] = task(i);
  };
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return results;
}

struct PairSpec {
  std::string name;
  int a;
  int b;
};

std::vector<PairSpec> correlator_pairs(const ExperimentConfig& cfg) {
  if (cfg.experiment == ExperimentKind::kIsing2d) {
    const LatticeMap map = LatticeMap::snake(cfg.rows, cfg.cols);
    std::vector<PairSpec> pairs;
    if (cfg.cols > 1) pairs.push_back({"zz_nn_row", map(0, 0), map(0, 1)});
    if (cfg.rows > 1) pairs.push_back({"zz_nn_col", map(0, 0), map(1, 0)});
    const int far = map(cfg.rows / 2, cfg.cols / 2);
    if (far != map(0, 0)) pairs.push_back({"zz_far", map(0, 0), far});
    return pairs;
  }
  return {{"zz_nn", 0, 1}, {"zz_far", 0, cfg.n_sites / 2}};
}

double exact_correlator(const DenseState& v, int a, int b) {
  const Mat2 z = pauli(Pauli::kZ);
  const int lo = std::min(a, b);
  const int hi = std::max(a, b);
  const std::vector<int> pair{lo, hi};
  const std::vector<int> sa{a};
  const std::vector<int> sb{b};
  const std::vector<Mat2> zz{z, z};
  return exact_expectation(v, pair, tensor_product(zz)) -
         exact_expectation(v, sa, z) * exact_expectation(v, sb, z);
}

std::string point_label(const char* name, double v) {
  return std::string(name) + "=" + format_double(v);
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json base = to_json(ExperimentConfig{});
  try {
    merge_object(base, json::parse(text));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(base);
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& file,
                             const std::vector<std::string>& overrides) {
  json base = to_json(ExperimentConfig{});
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot read config " + file->string());
    try {
      merge_object(base, json::parse(in));
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + item + "' is not key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json patch;
    patch[key] = value;
    merge_object(base, patch);
  }
  return from_json(base);
}

std::string config_to_json(const ExperimentConfig& cfg) {
  return to_json(cfg).dump(2);
}

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << kCsvHeader << '\n';
  for (const ResultRecord& r : records) {
    out << r.experiment << ',' << r.seed << ',' << r.point << ',' << r.metric
        << ',' << format_double(r.value) << ',' << format_double(r.wall_ms)
        << '\n';
  }
}

long rage_parameter_count(int n_sites, int bond_dim, bool graph,
                          bool rotations) {
  long count = mps_parameter_count(n_sites, bond_dim);
  if (graph) count += static_cast<long>(n_sites) * (n_sites - 1) / 2;
  if (rotations) count += 4L * n_sites;
  return count;
}

long mps_parameter_count(int n_sites, int bond_dim) {
  return 4L * bond_dim * bond_dim * n_sites;
}

int matched_mps_bond_dim(int n_sites, int bond_dim, bool graph,
                         bool rotations) {
  const long budget = rage_parameter_count(n_sites, bond_dim, graph, rotations);
  int d = bond_dim;
  while (mps_parameter_count(n_sites, d) < budget) ++d;
  return d;
}

GroundStateRun optimize_ground_state(const Hamiltonian& h, int bond_dim,
                                     Boundary boundary, bool graph,
                                     bool rotations, const SweepConfig& sweep,
                                     std::uint64_t seed) {
  const auto t0 = Clock::now();
  Rng rng(seed, 0);
  GroundStateRun run{
      RageState(MpsTensorSet::random(h.n_sites(), bond_dim, boundary, rng)),
      {},
      0.0};
  SweepConfig cfg = sweep;
  cfg.phase_updates = graph;
  cfg.rotation_updates = rotations;
  cfg.seed = seed;
  run.trace = rage::sweep(run.state, h, cfg);
  run.wall_ms = ms_since(t0);
  return run;
}

ExperimentOutput run_ising_experiment(const ExperimentConfig& cfg,
                                      const LogFn& log) {
  cfg.validate();
  if (cfg.experiment != ExperimentKind::kIsing2d &&
      cfg.experiment != ExperimentKind::kIsing1d) {
    throw ConfigError("not an Ising experiment");
  }
  const std::string name = to_string(cfg.experiment);
  const bool two_d = cfg.experiment == ExperimentKind::kIsing2d;
  const int n = two_d ? cfg.rows * cfg.cols : cfg.n_sites;
  const std::vector<PairSpec> pairs = correlator_pairs(cfg);
  const int mps_dim =
      cfg.match_parameters
          ? matched_mps_bond_dim(n, cfg.bond_dim, cfg.graph, cfg.rotations)
          : cfg.bond_dim;
  const Mat2 z = pauli(Pauli::kZ);

  ExperimentOutput out;
  std::optional<RageState> sample;
  for (double b : cfg.fields) {
    const Hamiltonian h =
        two_d ? build_ising_2d(cfg.rows, cfg.cols, b, cfg.coupling)
              : build_ising_1d(n, b, cfg.coupling, cfg.periodic);
    const std::string point = point_label("B", b);
    double exact_energy = std::nan("");
    if (cfg.exact) {
      const auto t0 = Clock::now();
      const GroundState g = exact_ground(h);
      exact_energy = g.energy;
      const double ms = ms_since(t0);
      out.records.push_back({name, "exact", point, "energy", g.energy, ms});
      for (const PairSpec& p : pairs) {
        out.records.push_back(
            {name, "exact", point, p.name, exact_correlator(g.vector, p.a, p.b),
             ms});
      }
      if (log) log(point + ": exact energy " + format_double(g.energy));
    }

    auto per_seed = [&](std::size_t i) {
      const std::uint64_t seed = cfg.seeds[i];
      const std::string seed_label = std::to_string(seed);
      std::vector<ResultRecord> rows;
      auto emit = [&](const std::string& prefix, const GroundStateRun& run,
                      int dim, long params) {
        const double e = run.trace.final_energy;
        rows.push_back({name, seed_label, point, prefix + "_energy", e,
                        run.wall_ms});
        if (cfg.exact) {
          rows.push_back({name, seed_label, point, prefix + "_error",
                          e - exact_energy, run.wall_ms});
        }
        rows.push_back({name, seed_label, point, prefix + "_converged",
                        run.trace.converged ? 1.0 : 0.0, run.wall_ms});
        rows.push_back({name, seed_label, point, prefix + "_sweeps",
                        static_cast<double>(run.trace.sweeps), run.wall_ms});
        rows.push_back({name, seed_label, point, prefix + "_bond_dim",
                        static_cast<double>(dim), run.wall_ms});
        rows.push_back({name, seed_label, point, prefix + "_params",
                        static_cast<double>(params), run.wall_ms});
        for (const PairSpec& p : pairs) {
          rows.push_back({name, seed_label, point, prefix + "_" + p.name,
                          two_point_correlation(run.state, p.a, p.b, z, z),
                          run.wall_ms});
        }
      };
      const GroundStateRun rage =
          optimize_ground_state(h, cfg.bond_dim, cfg.boundary, cfg.graph,
                                cfg.rotations, cfg.sweep, seed);
      if (i == 0 && b == cfg.fields.front()) sample = rage.state;
      emit("rage", rage, cfg.bond_dim,
           rage_parameter_count(n, cfg.bond_dim, cfg.graph, cfg.rotations));
      if (cfg.mps_baseline) {
        const GroundStateRun mps = optimize_ground_state(
            h, mps_dim, cfg.boundary, false, false, cfg.sweep, seed);
        emit("mps", mps, mps_dim, mps_parameter_count(n, mps_dim));
      }
      return rows;
    };
    auto results = fan_out(cfg.seeds.size(), cfg.threads, per_seed);
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (log) {
        for (const ResultRecord& r : results[i]) {
          if (r.metric == "rage_energy" || r.metric == "mps_energy") {
            log(point + " seed " + r.seed + ": " + r.metric + " " +
                format_double(r.value));
          }
        }
      }
      out.records.insert(out.records.end(), results[i].begin(),
                         results[i].end());
    }
  }
  out.sample_state = std::move(sample);
  return out;
}

ExperimentOutput run_random_circuit_experiment(const ExperimentConfig& cfg,
                                               const LogFn& log) {
  cfg.validate();
  const std::string name = to_string(ExperimentKind::kRandomCircuit);
  const int n = cfg.n_sites;
  std::vector<std::string> failures(cfg.seeds.size());

  auto per_seed = [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    const std::string seed_label = std::to_string(seed);
    std::vector<ResultRecord> rows;
    try {
      Rng init(seed, 0);
      const MpsTensorSet start =
          MpsTensorSet::random(n, cfg.bond_dim, cfg.boundary, init);
      Rng gates(seed, 1);
      const Circuit circuit = random_circuit(n, cfg.depth, cfg.ensemble, gates);
      auto run_backend = [&](Backend backend, const std::string& prefix) {
        const auto t0 = Clock::now();
        RageState state(start);
        const CircuitRun run =
            run_circuit(state, circuit, true, backend, cfg.fit);
        const double ms = ms_since(t0);
        for (std::size_t k = 0; k < run.fidelity.size(); ++k) {
          rows.push_back({name, seed_label, "k=" + std::to_string(k),
                          prefix + "_fidelity", run.fidelity[k], ms});
        }
        rows.push_back({name, seed_label, "k=" + std::to_string(cfg.depth),
                        prefix + "_fits_below_tol",
                        static_cast<double>(run.fits_below_tolerance), ms});
      };
      run_backend(cfg.graph ? Backend::kRage : Backend::kMps, "rage");
      if (cfg.mps_baseline) run_backend(Backend::kMps, "mps");
    } catch (const std::exception& e) {
      failures[i] = "seed " + seed_label + " failed: " + e.what();
      rows.push_back({name, seed_label, "k=0", "failed", 1.0, 0.0});
    }
    return rows;
  };
  auto results = fan_out(cfg.seeds.size(), cfg.threads, per_seed);

  ExperimentOutput out;
  std::vector<double> rage_sum(cfg.depth + 1, 0.0);
  std::vector<double> mps_sum(cfg.depth + 1, 0.0);
  std::vector<int> rage_count(cfg.depth + 1, 0);
  std::vector<int> mps_count(cfg.depth + 1, 0);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!failures[i].empty()) {
      out.warnings.push_back(failures[i]);
      if (log) log(failures[i]);
    }
    for (const ResultRecord& r : results[i]) {
      out.records.push_back(r);
      if (r.metric != "rage_fidelity" && r.metric != "mps_fidelity") continue;
      const int k = std::stoi(r.point.substr(2));
      if (r.metric == "rage_fidelity") {
        rage_sum[k] += r.value;
        ++rage_count[k];
      } else {
        mps_sum[k] += r.value;
        ++mps_count[k];
      }
    }
  }
  for (int k = 0; k <= cfg.depth; ++k) {
    const std::string point = "k=" + std::to_string(k);
    if (rage_count[k] > 0) {
      out.records.push_back({name, "mean", point, "rage_fidelity",
                             rage_sum[k] / rage_count[k], 0.0});
    }
    if (mps_count[k] > 0) {
      out.records.push_back({name, "mean", point, "mps_fidelity",
                             mps_sum[k] / mps_count[k], 0.0});
    }
  }
  if (log && cfg.depth >= 0 && rage_count[cfg.depth] > 0) {
    log("depth " + std::to_string(cfg.depth) + ": mean rage fidelity " +
        format_double(rage_sum[cfg.depth] / rage_count[cfg.depth]) +
        (mps_count[cfg.depth] > 0
             ? ", mean mps fidelity " +
                   format_double(mps_sum[cfg.depth] / mps_count[cfg.depth])
             : std::string()));
  }
  return out;
}

ExperimentOutput run_verify(const ExperimentConfig& cfg, const LogFn& log) {
  cfg.validate();
  const std::string name = to_string(ExperimentKind::kVerify);
  std::vector<std::pair<int, std::uint64_t>> tasks;
  for (int n : cfg.verify_sizes) {
    for (std::uint64_t seed : cfg.seeds) tasks.emplace_back(n, seed);
  }
  auto task = [&](std::size_t i) {
    const auto [n, seed] = tasks[i];
    std::vector<ResultRecord> rows;
    const auto t0 = Clock::now();
    Rng rng(seed, 2 + static_cast<std::uint64_t>(n));
    double worst = 0.0;
    for (int s = 0; s < cfg.verify_states; ++s) {
      const int d = 1 + static_cast<int>(rng.below(4));
      const RageState state =
          random_state(n, d, cfg.boundary, rng, cfg.graph, cfg.rotations);
      const DenseState dense = expand(state);
      std::vector<std::vector<int>> supports;
      for (int a = 0; a < n; ++a) {
        supports.push_back({a});
        for (int b = a + 1; b < n; ++b) supports.push_back({a, b});
      }
      for (int extra = 0; extra < 2 && n >= 3; ++extra) {
        std::set<int> picked;
        while (picked.size() < 3) picked.insert(static_cast<int>(rng.below(n)));
        supports.emplace_back(picked.begin(), picked.end());
      }
      for (const auto& support : supports) {
        const Mat approx = reduced_density_matrix(state, support).matrix;
        const Mat exact = exact_rdm(dense, support);
        worst = std::max(worst, (approx - exact).cwiseAbs().maxCoeff());
      }
    }
    rows.push_back({name, std::to_string(seed), "N=" + std::to_string(n),
                    "max_rdm_error", worst, ms_since(t0)});
    return rows;
  };
  auto results = fan_out(tasks.size(), cfg.threads, task);
  ExperimentOutput out;
  for (const auto& rows : results) {
    for (const ResultRecord& r : rows) {
      if (!(r.value <= 1e-10)) {
        out.numerical_failure = true;
        out.warnings.push_back(r.point + " seed " + r.seed +
                               ": reduced density matrix error " +
                               format_double(r.value));
      }
      if (log) log(r.point + " seed " + r.seed + ": max error " + format_double(r.value));
      out.records.push_back(r);
    }
  }
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg,
                                const LogFn& log) {
  switch (cfg.experiment) {
    case ExperimentKind::kIsing2d:
    case ExperimentKind::kIsing1d:
      return run_ising_experiment(cfg, log);
    case ExperimentKind::kRandomCircuit:
      return run_random_circuit_experiment(cfg, log);
    case ExperimentKind::kVerify:
      return run_verify(cfg, log);
  }
  throw ConfigError("unknown experiment");
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out) {
  const std::filesystem::path csv(cfg.output);
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  {
    std::ofstream f(csv);
    if (!f) throw std::runtime_error("cannot write " + csv.string());
    write_csv(f, out.records);
  }
  std::filesystem::path sidecar = csv;
  sidecar.replace_extension(".json");
  std::ofstream f(sidecar);
  if (!f) throw std::runtime_error("cannot write " + sidecar.string());
  f << config_to_json(cfg) << '\n';
}

}  // namespace rage
