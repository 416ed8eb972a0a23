# Copyright 2026 The RAGE Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the RAGE variational state library."""

from rage._rage import (
    AdjacencyPhaseMatrix,
    Boundary,
    CircuitRun,
    DegenerateNormError,
    EnergyTrace,
    FitConfig,
    FitResult,
    GradientMethod,
    GroundState,
    Hamiltonian,
    MpsTensorSet,
    ParseError,
    RageState,
    SweepConfig,
    apply_diagonal_two_qubit,
    apply_local_diagonal,
    apply_single_qubit,
    build_ising_1d,
    build_ising_2d,
    conjugate_by_rotations,
    energy,
    entanglement_entropy_profile,
    exact_ground,
    expand,
    expectation,
    exact_rdm,
    fidelity,
    norm_sq,
    pauli,
    random_state,
    read_state,
    reduced_density_matrix,
    run_circuit_file,
    run_random_circuit,
    sweep,
    two_point_correlation,
    write_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
