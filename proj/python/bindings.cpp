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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <span>
#include <sstream>

#include "rage/circuit.hpp"
#include "rage/hamiltonian.hpp"
#include "rage/optimizer.hpp"
#include "rage/oracle.hpp"
#include "rage/serialize.hpp"
#include "rage/state.hpp"

namespace py = pybind11;
using namespace rage;

namespace {

std::span<const int> as_support(const std::vector<int>& s) { return s; }

}  // namespace

PYBIND11_MODULE(_rage, m) {
  m.doc() = "MPS states enhanced by weighted graphs and local rotations";

  py::register_exception<DegenerateNormError>(m, "DegenerateNormError",
                                              PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::enum_<Boundary>(m, "Boundary")
      .value("OPEN", Boundary::kOpen)
      .value("PERIODIC", Boundary::kPeriodic);

  py::enum_<GradientMethod>(m, "GradientMethod")
      .value("STEEPEST", GradientMethod::kSteepestDescent)
      .value("LBFGS", GradientMethod::kLbfgs);

  py::class_<MpsTensorSet>(m, "MpsTensorSet")
      .def(py::init<int, int, Boundary>(), py::arg("n_sites"),
           py::arg("bond_dim"), py::arg("boundary") = Boundary::kOpen)
      .def_static(
          "random",
          [](int n, int d, Boundary b, std::uint64_t seed) {
            Rng rng(seed);
            return MpsTensorSet::random(n, d, b, rng);
          },
          py::arg("n_sites"), py::arg("bond_dim"),
          py::arg("boundary") = Boundary::kOpen, py::arg("seed") = 0)
      .def_property_readonly("n_sites", &MpsTensorSet::n_sites)
      .def_property_readonly("bond_dim", &MpsTensorSet::bond_dim)
      .def_property_readonly("boundary", &MpsTensorSet::boundary)
      .def("tensor", &MpsTensorSet::tensor, py::arg("site"), py::arg("s"))
      .def("set_tensor", &MpsTensorSet::set_tensor, py::arg("site"),
           py::arg("s"), py::arg("value"))
      .def("norm_sq", &mps_norm_sq);

  py::class_<AdjacencyPhaseMatrix>(m, "AdjacencyPhaseMatrix")
      .def(py::init<int>(), py::arg("n_sites"))
      .def_property_readonly("n_sites", &AdjacencyPhaseMatrix::n_sites)
      .def("__getitem__",
           [](const AdjacencyPhaseMatrix& p, std::pair<int, int> kl) {
             return p(kl.first, kl.second);
           })
      .def("set", &AdjacencyPhaseMatrix::set, py::arg("k"), py::arg("l"),
           py::arg("phi"))
      .def("add", &AdjacencyPhaseMatrix::add, py::arg("k"), py::arg("l"),
           py::arg("dphi"))
      .def("dense", &AdjacencyPhaseMatrix::dense)
      .def("edges", &AdjacencyPhaseMatrix::edges);

  py::class_<RageState>(m, "RageState")
      .def(py::init<MpsTensorSet>(), py::arg("mps"))
      .def(py::init<MpsTensorSet, AdjacencyPhaseMatrix, std::vector<Mat2>>(),
           py::arg("mps"), py::arg("phi"), py::arg("rotations"))
      .def_property_readonly("n_sites", &RageState::n_sites)
      .def_property(
          "mps", [](const RageState& s) { return s.mps(); },
          [](RageState& s, const MpsTensorSet& v) { s.mps() = v; })
      .def_property(
          "phi", [](const RageState& s) { return s.phi(); },
          [](RageState& s, const AdjacencyPhaseMatrix& v) { s.phi() = v; })
      .def("rotation", &RageState::rotation, py::arg("j"))
      .def("set_rotation", &RageState::set_rotation, py::arg("j"),
           py::arg("v"))
      .def("__eq__", &RageState::operator==);

  m.def(
      "random_state",
      [](int n, int d, Boundary b, std::uint64_t seed, bool phases,
         bool rotations) {
        Rng rng(seed);
        return random_state(n, d, b, rng, phases, rotations);
      },
      py::arg("n_sites"), py::arg("bond_dim"),
      py::arg("boundary") = Boundary::kOpen, py::arg("seed") = 0,
      py::arg("dense_phases") = true, py::arg("random_rotations") = true);

  m.def(
      "reduced_density_matrix",
      [](const RageState& s, const std::vector<int>& support) {
        return reduced_density_matrix(s, as_support(support)).matrix;
      },
      py::arg("state"), py::arg("support"));
  m.def(
      "expectation",
      [](const RageState& s, const std::vector<int>& support, const Mat& op) {
        return expectation(s, as_support(support), op);
      },
      py::arg("state"), py::arg("support"), py::arg("observable"));
  m.def("two_point_correlation", &two_point_correlation, py::arg("state"),
        py::arg("j"), py::arg("k"), py::arg("op_j"), py::arg("op_k"));
  m.def(
      "norm_sq", [](const RageState& s) { return norm_sq(s); },
      py::arg("state"));
  m.def(
      "entanglement_entropy_profile",
      [](const RageState& s, const std::vector<int>& cuts) {
        return entanglement_entropy_profile(s, cuts);
      },
      py::arg("state"), py::arg("cut_sizes"));

  m.def(
      "pauli",
      [](const std::string& name) {
        if (name == "I") return pauli(Pauli::kI);
        if (name == "X") return pauli(Pauli::kX);
        if (name == "Y") return pauli(Pauli::kY);
        if (name == "Z") return pauli(Pauli::kZ);
        throw py::value_error("unknown Pauli '" + name + "'");
      },
      py::arg("name"));

  py::class_<Hamiltonian>(m, "Hamiltonian")
      .def(py::init<int>(), py::arg("n_sites"))
      .def_property_readonly("n_sites", &Hamiltonian::n_sites)
      .def(
          "add_term",
          [](Hamiltonian& h, Complex c,
             const std::vector<std::pair<int, Mat2>>& factors) {
            std::vector<SiteOperator> ops;
            for (const auto& [site, mat] : factors) ops.push_back({site, mat});
            h.add_term(c, std::move(ops));
          },
          py::arg("coefficient"), py::arg("factors"))
      .def("n_terms", [](const Hamiltonian& h) { return h.terms().size(); })
      .def("validate", &Hamiltonian::validate);

  m.def(
      "build_ising_2d",
      [](int rows, int cols, double b, double j) {
        return build_ising_2d(rows, cols, b, j);
      },
      py::arg("rows"), py::arg("cols"), py::arg("field_b"),
      py::arg("coupling") = 1.0);
  m.def("build_ising_1d", &build_ising_1d, py::arg("n_sites"),
        py::arg("field_b"), py::arg("coupling") = 1.0,
        py::arg("periodic") = false);
  m.def(
      "conjugate_by_rotations",
      [](const Hamiltonian& h, const std::vector<Mat2>& v) {
        return conjugate_by_rotations(h, v);
      },
      py::arg("h"), py::arg("rotations"));
  m.def("energy", &energy, py::arg("state"), py::arg("h"));

  py::class_<SweepConfig>(m, "SweepConfig")
      .def(py::init<>())
      .def_readwrite("max_sweeps", &SweepConfig::max_sweeps)
      .def_readwrite("energy_tol", &SweepConfig::energy_tol)
      .def_readwrite("pencil_cutoff", &SweepConfig::pencil_cutoff)
      .def_readwrite("phase_updates", &SweepConfig::phase_updates)
      .def_readwrite("rotation_updates", &SweepConfig::rotation_updates)
      .def_readwrite("gradient_refine", &SweepConfig::gradient_refine)
      .def_readwrite("gradient_steps", &SweepConfig::gradient_steps)
      .def_readwrite("gradient_method", &SweepConfig::gradient_method)
      .def_readwrite("gradient_rotations", &SweepConfig::gradient_rotations)
      .def_readwrite("lbfgs_memory", &SweepConfig::lbfgs_memory)
      .def_readwrite("perturbation", &SweepConfig::perturbation)
      .def_readwrite("seed", &SweepConfig::seed);

  py::class_<EnergyTrace>(m, "EnergyTrace")
      .def_readonly("sweeps", &EnergyTrace::sweeps)
      .def_readonly("converged", &EnergyTrace::converged)
      .def_readonly("line_search_failed", &EnergyTrace::line_search_failed)
      .def_readonly("final_energy", &EnergyTrace::final_energy)
      .def_readonly("warnings", &EnergyTrace::warnings)
      .def_property_readonly("energies", [](const EnergyTrace& t) {
        std::vector<double> e;
        for (const TraceRecord& r : t.records) e.push_back(r.energy);
        return e;
      });

  m.def(
      "sweep",
      [](RageState& s, const Hamiltonian& h, const SweepConfig& cfg) {
        py::gil_scoped_release release;
        return sweep(s, h, cfg);
      },
      py::arg("state"), py::arg("h"), py::arg("config") = SweepConfig{},
      "Optimizes the state in place and returns the energy trace.");

  py::class_<GroundState>(m, "GroundState")
      .def_readonly("energy", &GroundState::energy)
      .def_readonly("residual", &GroundState::residual)
      .def_property_readonly(
          "vector", [](const GroundState& g) { return g.vector.amplitudes; });
  m.def(
      "exact_ground", [](const Hamiltonian& h) { return exact_ground(h); },
      py::arg("h"));
  m.def(
      "expand", [](const RageState& s) { return expand(s).amplitudes; },
      py::arg("state"), "Dense amplitudes, site 0 most significant.");
  m.def(
      "fidelity",
      [](const Vec& a, const Vec& b) {
        const int n = static_cast<int>(std::log2(static_cast<double>(a.size())));
        return fidelity(DenseState{n, a}, DenseState{n, b});
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "exact_rdm",
      [](const Vec& v, const std::vector<int>& support) {
        const int n = static_cast<int>(std::log2(static_cast<double>(v.size())));
        return exact_rdm(DenseState{n, v}, as_support(support));
      },
      py::arg("amplitudes"), py::arg("support"));

  py::class_<FitConfig>(m, "FitConfig")
      .def(py::init<>())
      .def_readwrite("max_passes", &FitConfig::max_passes)
      .def_readwrite("rel_tol", &FitConfig::rel_tol)
      .def_readwrite("vary_phases", &FitConfig::vary_phases);
  py::class_<FitResult>(m, "FitResult")
      .def_readonly("overlap", &FitResult::overlap)
      .def_readonly("initial_overlap", &FitResult::initial_overlap)
      .def_readonly("passes", &FitResult::passes)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("history", &FitResult::history);
  py::class_<CircuitRun>(m, "CircuitRun")
      .def_readonly("fidelity", &CircuitRun::fidelity)
      .def_readonly("fits", &CircuitRun::fits)
      .def_readonly("min_fit_overlap", &CircuitRun::min_fit_overlap);

  m.def("apply_diagonal_two_qubit", &apply_diagonal_two_qubit,
        py::arg("state"), py::arg("j"), py::arg("k"), py::arg("phi"));
  m.def("apply_local_diagonal", &apply_local_diagonal, py::arg("state"),
        py::arg("j"), py::arg("alpha"));
  m.def("apply_single_qubit", &apply_single_qubit, py::arg("state"),
        py::arg("j"), py::arg("u"), py::arg("config") = FitConfig{});
  m.def(
      "run_random_circuit",
      [](RageState& s, int blocks, const std::string& ensemble,
         std::uint64_t seed, bool mps_backend, const FitConfig& cfg) {
        Rng rng(seed, 1);
        const Circuit c =
            random_circuit(s.n_sites(), blocks, ensemble_from_string(ensemble), rng);
        py::gil_scoped_release release;
        return run_circuit(s, c, true,
                           mps_backend ? Backend::kMps : Backend::kRage, cfg);
      },
      py::arg("state"), py::arg("blocks"), py::arg("ensemble") = "mixed",
      py::arg("seed") = 0, py::arg("mps_backend") = false,
      py::arg("config") = FitConfig{});
  m.def(
      "run_circuit_file",
      [](RageState& s, const std::string& text, bool mps_backend,
         const FitConfig& cfg) {
        std::istringstream in(text);
        const Circuit c = parse_circuit(in, s.n_sites());
        return run_circuit(s, c, true,
                           mps_backend ? Backend::kMps : Backend::kRage, cfg);
      },
      py::arg("state"), py::arg("text"), py::arg("mps_backend") = false,
      py::arg("config") = FitConfig{});

  m.def(
      "write_state",
      [](const RageState& s) {
        std::ostringstream out;
        write_state(out, s);
        return out.str();
      },
      py::arg("state"));
  m.def(
      "read_state",
      [](const std::string& text) {
        std::istringstream in(text);
        return read_state(in);
      },
      py::arg("text"));
}
