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

import math

import numpy as np
import pytest

import rage


def test_ising_chain_matches_exact():
    h = rage.build_ising_1d(6, 1.0)
    exact = rage.exact_ground(h).energy
    state = rage.random_state(6, 2, rage.Boundary.OPEN, seed=3,
                              dense_phases=False, random_rotations=False)
    cfg = rage.SweepConfig()
    cfg.max_sweeps = 50
    trace = rage.sweep(state, h, cfg)
    assert trace.energies
    assert rage.energy(state, h) == pytest.approx(trace.final_energy, abs=1e-10)
    assert trace.final_energy >= exact - 1e-9
    assert abs(trace.final_energy - exact) / abs(exact) < 1e-2


def test_rdm_matches_dense_expansion():
    state = rage.random_state(5, 2, rage.Boundary.PERIODIC, seed=11)
    amps = rage.expand(state)
    amps = amps / np.linalg.norm(amps)
    for support in ([0], [1, 3], [0, 2, 4]):
        rho = rage.reduced_density_matrix(state, support)
        np.testing.assert_allclose(rho, rage.exact_rdm(amps, support),
                                   atol=1e-10)


def test_expectation_and_correlation():
    state = rage.random_state(4, 1, seed=2, dense_phases=False,
                              random_rotations=False)
    z = rage.pauli("Z")
    c = rage.two_point_correlation(state, 0, 3, z, z)
    assert abs(c) < 1e-10
    assert rage.norm_sq(state) > 0
    with pytest.raises(ValueError):
        rage.pauli("Q")


def test_diagonal_gate_is_exact():
    state = rage.random_state(4, 2, seed=5, random_rotations=False)
    before = rage.expand(state)
    rage.apply_diagonal_two_qubit(state, 0, 2, math.pi / 3)
    after = rage.expand(state)
    for idx in range(16):
        b0 = (idx >> 3) & 1
        b2 = (idx >> 1) & 1
        phase = np.exp(1j * math.pi / 3) if b0 and b2 else 1.0
        assert after[idx] == pytest.approx(phase * before[idx], abs=1e-12)


def test_random_circuit_runs():
    state = rage.random_state(6, 2, seed=1, dense_phases=False,
                              random_rotations=False)
    run = rage.run_random_circuit(state, 3, "diagonal", seed=4)
    assert len(run.fidelity) == 4
    assert min(run.fidelity) > 1 - 1e-10


def test_state_text_round_trip():
    state = rage.random_state(3, 2, seed=8)
    text = rage.write_state(state)
    assert text.startswith("RAGE1 3 2")
    assert rage.read_state(text) == state
    with pytest.raises(rage.ParseError):
        rage.read_state("RAGE1 3 2 open\nA 1 0\n")


def test_hamiltonian_builder():
    h = rage.Hamiltonian(2)
    h.add_term(1.0, [(0, rage.pauli("Z")), (1, rage.pauli("Z"))])
    h.add_term(0.5, [(0, rage.pauli("X"))])
    h.validate()
    assert h.n_terms() == 2
    assert rage.exact_ground(h).energy == pytest.approx(-math.sqrt(1.25))
