import itertools

import numpy as np
import pytest

from dimerquench.bell_basis import (
    Boundary,
    ModelParams,
    bell_amplitudes,
    build_expansion,
    config_statevector,
    psi0_statevector,
)
from dimerquench.circuits import (
    Circuit,
    apply,
    bell_prep_circuit,
    bitstring,
    estimate_coefficients,
    evolution_circuit,
    hadamard_test,
    measure_z,
    phik_prep_circuit,
    psi0_prep_circuit,
    reconstruct_state_from_estimates,
    run,
    to_qasm3,
    zero_state,
)
from dimerquench.dynamics import evolve, to_statevector
from dimerquench.oracle import DenseEvolver


def test_gates_are_unitary():
    rng = np.random.default_rng(0)
    circ = Circuit(3)
    circ.h(0).x(1).s(2).sdg(0).cx(0, 2).rz(0.7, 1)
    circ.exp_zz(0.3, 0, 1).exp_xx(-0.9, 1, 2).exp_yy(1.4, 0, 2)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    out = apply(circ, psi)
    assert np.linalg.norm(out) == pytest.approx(1.0)
    assert np.abs(apply(circ.dagger(), out) - psi).max() < 1e-13


def test_qubit_validation():
    circ = Circuit(2)
    with pytest.raises(ValueError):
        circ.cx(0, 0)
    with pytest.raises(ValueError):
        circ.h(2)
    with pytest.raises(ValueError):
        apply(Circuit(2), np.ones(8, dtype=complex))


@pytest.mark.parametrize("mu", [0, 1, 2, 3])
def test_bell_prep_exact_including_phase(mu):
    psi = run(bell_prep_circuit(mu, 0, 1, 2))
    expected = np.zeros(4, dtype=complex)
    for z0 in (0, 1):
        for z1 in (0, 1):
            expected[z0 + 2 * z1] = bell_amplitudes(mu)[2 * z0 + z1]
    assert np.abs(psi - expected).max() < 1e-15


@pytest.mark.parametrize("n", [2, 3])
def test_psi0_prep(n):
    assert np.abs(run(psi0_prep_circuit(n)) - psi0_statevector(n)).max() < 1e-14


def test_phik_prep_all_configs_n2():
    for config in itertools.product(range(4), repeat=2):
        psi = run(phik_prep_circuit(config, 2))
        assert np.abs(psi - config_statevector(config, 2)).max() < 1e-14


@pytest.mark.parametrize("boundary", [Boundary.PBC, Boundary.OBC])
def test_evolution_circuit_matches_dense_oracle(boundary):
    rng = np.random.default_rng(5)
    for n in (2, 3):
        for _ in range(3):
            params = ModelParams(n, 1.0, rng.uniform(-1.5, 1.5), boundary)
            t = rng.uniform(0.0, 8.0)
            psi = apply(evolution_circuit(params, t), psi0_statevector(n))
            ref = DenseEvolver(params).evolve(psi0_statevector(n), t)
            assert np.abs(psi - ref).max() < 1e-12


def test_evolution_bond_terms_commute():
    params = ModelParams(3, 1.0, 0.5)
    psi0 = psi0_statevector(3)
    twice = apply(evolution_circuit(params, 1.1), apply(evolution_circuit(params, 1.1), psi0))
    once = apply(evolution_circuit(params, 2.2), psi0)
    assert np.abs(twice - once).max() < 1e-13


def test_controlled_promotion():
    # controlled-H circuit leaves |0> alone and acts on |1>-ancilla branch
    inner = Circuit(1)
    inner.h(0)
    promoted = inner.controlled(1, 2)
    assert np.abs(apply(promoted, zero_state(2)) - zero_state(2)).max() < 1e-15
    one = np.zeros(4, dtype=complex)
    one[2] = 1.0  # ancilla (qubit 1) set
    out = apply(promoted, one)
    assert out[2] == pytest.approx(2**-0.5)
    assert out[3] == pytest.approx(2**-0.5)
    with pytest.raises(ValueError):
        inner.controlled(0, 2)


@pytest.mark.parametrize("n", [2, 3])
def test_hadamard_test_exact(n):
    params = ModelParams(n)
    expansion = build_expansion(params)
    estimates = estimate_coefficients(params, expansion.configs)
    assert np.abs(estimates - expansion.coefficients).max() < 1e-12


def test_hadamard_test_vanishing_and_trivial():
    prep0 = psi0_prep_circuit(2)
    assert hadamard_test(prep0, phik_prep_circuit((0, 1), 2)) == pytest.approx(0.0, abs=1e-12)
    assert hadamard_test(prep0, prep0) == pytest.approx(1.0, abs=1e-12)


def test_hadamard_test_shot_mode():
    prep0 = psi0_prep_circuit(2)
    prep_k = phik_prep_circuit((0, 0), 2)
    first = hadamard_test(prep0, prep_k, shots=8192, seed=11)
    again = hadamard_test(prep0, prep_k, shots=8192, seed=11)
    assert first == again
    assert abs(first - 0.5) < 5.0 / np.sqrt(8192)


def test_reconstruct_state_from_estimates():
    params = ModelParams(2)
    expansion = build_expansion(params)
    estimates = list(zip(expansion.configs, expansion.coefficients.tolist()))
    state = reconstruct_state_from_estimates(estimates, params, 1.3)
    exact = evolve(expansion, 1.3)
    assert np.abs(state.amplitudes - exact.amplitudes).max() < 1e-12
    assert np.abs(to_statevector(state) - to_statevector(exact)).max() < 1e-12
    with pytest.raises(ValueError):
        reconstruct_state_from_estimates(estimates[:-1], params, 1.3)


def test_measure_z():
    psi = psi0_statevector(2)
    first = measure_z(psi, 50, seed=3)
    assert np.array_equal(first, measure_z(psi, 50, seed=3))
    assert len(first) == 50
    # singlet product never yields aligned spins within a bond
    for outcome in first:
        bits = bitstring(int(outcome), 4)
        assert bits[0] != bits[1] and bits[2] != bits[3]
    assert np.all(measure_z(zero_state(3), 20, seed=0) == 0)


def test_qasm_export_structure():
    circ = evolution_circuit(ModelParams(2, 1.0, 0.5), 0.7)
    text = to_qasm3(circ)
    assert text.startswith("OPENQASM 3.0;")
    assert "qubit[4] q;" in text
    # exponentials are flattened to the primitive set
    for token in ("exp_xx", "exp_yy", "exp_zz"):
        assert token not in text
    assert "rz(" in text and "cx " in text
    controlled = to_qasm3(psi0_prep_circuit(2).controlled(4, 5))
    assert "ctrl @" in controlled


def test_qasm_flattening_identities():
    rng = np.random.default_rng(2)
    for name, theta in (("exp_zz", 0.83), ("exp_xx", -1.21), ("exp_yy", 0.46)):
        direct = Circuit(2)
        getattr(direct, name)(theta, 0, 1)
        flat = Circuit(2)
        if name == "exp_xx":
            flat.h(0).h(1)
        elif name == "exp_yy":
            flat.sdg(0).h(0).sdg(1).h(1)
        flat.cx(0, 1).rz(2 * theta, 1).cx(0, 1)
        if name == "exp_xx":
            flat.h(0).h(1)
        elif name == "exp_yy":
            flat.h(0).s(0).h(1).s(1)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        assert np.abs(apply(direct, psi) - apply(flat, psi)).max() < 1e-14
