"""Acceptance suite: one test (and one printed pass/fail line) per criterion."""

import itertools
import math
import time
from functools import lru_cache

import numpy as np

from dimerquench.bell_basis import (
    Boundary,
    ModelParams,
    brute_force_coefficient,
    build_expansion,
    obc_expansion,
    psi0_statevector,
)
from dimerquench.circuits import (
    apply,
    evolution_circuit,
    hadamard_test,
    phik_prep_circuit,
    psi0_prep_circuit,
)
from dimerquench.closed_forms import (
    appendix_entropy_n4,
    appendix_eigenvalues_n4,
    echo_closed_form,
    echo_n4_xx,
    echo_n6_xx,
    echo_n8_xx,
    entropy_closed_form,
    entropy_n2,
)
from dimerquench.dynamics import (
    check_periodicity,
    evolve,
    find_loschmidt_zeros,
    half_chain_entropies,
    half_chain_sites,
    hermitian_eigenvalues,
    loschmidt_echo,
    reduced_density_matrix,
    to_statevector,
)
from dimerquench.randomized import (
    collect,
    overlap_hamming_exact,
    purity_hamming,
    purity_hamming_exact,
    sample_unitaries,
    shadow_purity,
)


def _report(number: int, name: str, ok: bool, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] acceptance {number}: {name} {detail}".rstrip())
    assert ok, f"acceptance {number} ({name}) failed: {detail}"


@lru_cache(maxsize=None)
def _expansion(n: int, delta: float):
    return build_expansion(ModelParams(n, 1.0, delta))


def _half_chain_purity(psi: np.ndarray, subsystem: tuple[int, ...]) -> float:
    rho = reduced_density_matrix(psi, list(subsystem)).matrix
    return float(np.trace(rho @ rho).real)


def test_acceptance_01_coefficient_exactness():
    start = time.time()
    worst = 0.0
    for n in range(2, 7):
        params = ModelParams(n)
        expansion = build_expansion(params)
        assert len(expansion) == 4 ** (n - 1)
        for config, coeff in zip(expansion.configs, expansion.coefficients):
            ref = brute_force_coefficient(config, params)
            assert math.copysign(1.0, coeff) == math.copysign(1.0, ref)
            worst = max(worst, abs(abs(coeff) - abs(ref)))
    elapsed = time.time() - start
    ok = worst < 1e-12 and elapsed < 30.0
    _report(1, "loop-rule coefficients vs brute force (n=2..6)",
            ok, f"max dev {worst:.2e}, {elapsed:.1f}s")


# frozen n=6 table: (sorted dimer multiset, multiplicity, 2E = cj*J + cd*delta*J)
_N6_TABLE = {
    (0, 0, 0, 0, 0, 0): (1, -6, -3),
    (1, 1, 1, 1, 1, 1): (1, 6, -3),
    (2, 2, 2, 2, 2, 2): (1, 0, 3),
    (3, 3, 3, 3, 3, 3): (1, 0, 3),
    (0, 0, 0, 0, 1, 1): (15, -2, -3),
    (0, 0, 0, 0, 2, 2): (15, -4, -1),
    (0, 0, 0, 0, 3, 3): (15, -4, -1),
    (0, 0, 1, 1, 1, 1): (15, 2, -3),
    (0, 0, 1, 1, 2, 2): (90, 0, -1),
    (0, 0, 1, 1, 3, 3): (90, 0, -1),
    (0, 0, 2, 2, 3, 3): (90, -2, 1),
    (1, 1, 2, 2, 3, 3): (90, 2, 1),
    (0, 0, 0, 1, 2, 3): (120, -2, -1),
    (0, 1, 1, 1, 2, 3): (120, 2, -1),
    (0, 1, 2, 2, 2, 3): (120, 0, 1),
    (0, 1, 2, 3, 3, 3): (120, 0, 1),
    (1, 1, 1, 1, 2, 2): (15, 4, -1),
    (1, 1, 1, 1, 3, 3): (15, 4, -1),
    (0, 0, 2, 2, 2, 2): (15, -2, 1),
    (0, 0, 3, 3, 3, 3): (15, -2, 1),
    (1, 1, 2, 2, 2, 2): (15, 2, 1),
    (1, 1, 3, 3, 3, 3): (15, 2, 1),
    (2, 2, 3, 3, 3, 3): (15, 0, 3),
    (2, 2, 2, 2, 3, 3): (15, 0, 3),
}


def test_acceptance_02_table_n6():
    ok = True
    for delta in (0.5, 1.0):
        expansion = _expansion(6, delta)
        classes: dict[tuple, list] = {}
        for config, energy in zip(expansion.configs, expansion.energies):
            classes.setdefault(tuple(sorted(config)), []).append(float(energy))
        ok &= set(classes) == set(_N6_TABLE)
        for multiset, energies in classes.items():
            mult, cj, cd = _N6_TABLE[multiset]
            ok &= len(energies) == mult
            ok &= all(2.0 * e == cj * 1.0 + cd * delta * 1.0 for e in energies)
    _report(2, "n=6 active classes, multiplicities, energies", ok,
            f"{len(_N6_TABLE)} classes x 2 deltas, exact match" if ok else "mismatch")


def test_acceptance_03_closed_forms_grid():
    start = time.time()
    ts = np.linspace(0.0, 4.0 * math.pi, 200)
    worst = {}
    for n in (2, 4, 6):  # half-chain entropies, delta = 1/2
        params = ModelParams(n, 1.0, 0.5)
        expansion = _expansion(n, 0.5)
        dev = 0.0
        for t in ts:
            s1, s2 = half_chain_entropies(expansion, float(t))
            dev = max(dev, abs(s1 - float(entropy_closed_form(params, t, order=1))),
                      abs(s2 - float(entropy_closed_form(params, t, order=2))))
        worst[f"S_n{n}"] = dev
    for n, delta in ((2, 0.5), (3, 0.5), (4, 0.5), (6, 0.5)):
        params = ModelParams(n, 1.0, delta)
        numeric = loschmidt_echo(_expansion(n, delta), ts)
        worst[f"L_n{n}"] = float(np.abs(numeric - echo_closed_form(params, ts)).max())
    worst["L_n4_xx"] = float(np.abs(loschmidt_echo(_expansion(4, 0.0), ts) - echo_n4_xx(ts, 1.0)).max())
    worst["L_n6_xx"] = float(np.abs(loschmidt_echo(_expansion(6, 0.0), ts) - echo_n6_xx(ts, 1.0)).max())
    worst["L_n8_xx"] = float(np.abs(loschmidt_echo(_expansion(8, 0.0), ts) - echo_n8_xx(ts, 1.0)).max())
    elapsed = time.time() - start
    dev = max(worst.values())
    ok = dev < 1e-10 and elapsed < 120.0
    _report(3, "closed-form entropies and echoes on 200-point grid", ok,
            f"max dev {dev:.2e}, {elapsed:.1f}s")


def test_acceptance_04_scaling_relations():
    ts = np.linspace(0.0, 4.0 * math.pi, 50)
    worst = 0.0
    for n in (3, 4, 5, 6):
        expansion = _expansion(n, 0.5)
        for t in ts:
            s1, s2 = half_chain_entropies(expansion, float(t))
            base1 = float(entropy_n2(t / 2.0, 1.0, 0.5, order=1))
            base2 = float(entropy_n2(t / 2.0, 1.0, 0.5, order=2))
            if n % 2 == 1:
                worst = max(worst, abs(s1 - 1.0 - base1), abs(s2 - 1.0 - base2))
            else:
                worst = max(worst, abs(s1 - 2.0 * base1), abs(s2 - 2.0 * base2))
    _report(4, "entropy scaling relations n=3..6", worst < 1e-10, f"max dev {worst:.2e}")


def test_acceptance_05_appendix_n4():
    ts = np.linspace(0.0, 4.0 * math.pi, 50)
    worst = 0.0
    for model, delta in (("xx", 0.0), ("xxx", 1.0)):
        params = ModelParams(4, 1.0, delta)
        expansion = _expansion(4, delta)
        for t in ts:
            psi = to_statevector(evolve(expansion, float(t)))
            numeric = np.sort(hermitian_eigenvalues(
                reduced_density_matrix(psi, half_chain_sites(params))))
            closed = np.sort(appendix_eigenvalues_n4(t, 1.0, model))
            worst = max(worst, float(np.abs(numeric - closed).max()))
            s1 = half_chain_entropies(expansion, float(t))[0]
            worst = max(worst, abs(s1 - float(appendix_entropy_n4(t, 1.0, model))))
    _report(5, "n=4 XX/XXX spectra and entropies vs Jacobi numerics",
            worst < 1e-10, f"max dev {worst:.2e}")


def test_acceptance_06_loschmidt_zeros():
    t_max = 4.0 * math.pi
    ok = True
    details = []
    zeros = find_loschmidt_zeros(_expansion(2, 0.0), t_max)
    ok &= len(zeros) == 2 and abs(zeros[0] - math.pi) < 1e-6 and abs(zeros[1] - 3 * math.pi) < 1e-6
    details.append(f"n2-xx:{len(zeros)}")
    for n, delta in ((4, 0.5), (8, 1.75)):
        zeros = find_loschmidt_zeros(_expansion(n, delta), t_max)
        ok &= any(abs(z - math.pi) < 1e-6 for z in zeros)
        details.append(f"n{n}:pi-found")
    for n in (3, 5, 7):
        for delta in (0.0, 0.5, 1.0, 1.75):
            ok &= find_loschmidt_zeros(_expansion(n, delta), t_max) == []
    for n in (2, 4, 6, 8):
        ok &= find_loschmidt_zeros(_expansion(n, 1.0), t_max) == []
    _report(6, "Loschmidt zero sets over [0, 4pi]", ok, " ".join(details))


def test_acceptance_07_periodicity():
    worst = 0.0
    for p, q in ((0, 1), (1, 2), (1, 1), (7, 4)):
        delta = p / q
        for n in (3, 4, 5, 6):
            params = ModelParams(n, 1.0, delta)
            expansion = _expansion(n, delta)
            samples = 8 if n >= 5 else 16
            for obs in ("s1", "s2", "echo"):
                ok, dev = check_periodicity(params, obs, p, q, samples=samples,
                                            expansion=expansion)
                assert ok, f"n={n} delta={delta} {obs}: dev {dev:.2e}"
                worst = max(worst, dev)
        # halved entropy period at n=2
        params2 = ModelParams(2, 1.0, delta)
        for obs in ("s1", "s2"):
            ok, dev = check_periodicity(params2, obs, p, q, samples=16,
                                        expansion=_expansion(2, delta))
            assert ok, f"n=2 delta={delta} {obs}: dev {dev:.2e}"
            worst = max(worst, dev)
    _report(7, "periodicity 2q*pi (q*pi for n=2 entropy)", worst < 1e-9,
            f"max dev {worst:.2e}")


def test_acceptance_08_circuit_fidelity():
    rng = np.random.default_rng(42)
    worst = 1.0
    for n in range(2, 6):
        psi0 = psi0_statevector(n)
        for _ in range(20):
            delta, t = rng.uniform(-2.0, 2.0), rng.uniform(0.0, 4.0 * math.pi)
            params = ModelParams(n, 1.0, delta)
            psi_circ = apply(evolution_circuit(params, t), psi0)
            psi_bell = to_statevector(evolve(build_expansion(params), t))
            worst = min(worst, abs(np.vdot(psi_circ, psi_bell)))
    _report(8, "evolution circuit fidelity vs Bell expansion (n=2..5)",
            worst >= 1.0 - 1e-10, f"min fidelity 1-{1.0 - worst:.2e}")


def test_acceptance_09_hadamard_test():
    worst = 0.0
    for n in (2, 3, 4):
        expansion = _expansion(n, 0.0)
        prep0 = psi0_prep_circuit(n)
        for config, coeff in zip(expansion.configs, expansion.coefficients):
            est = hadamard_test(prep0, phik_prep_circuit(config, n))
            worst = max(worst, abs(est - coeff))
    exact_ok = worst < 1e-12

    n_m = 2**13
    bound = 3.0 / math.sqrt(n_m)
    hits = trials = 0
    for n in (2, 3):
        expansion = _expansion(n, 0.0)
        prep0 = psi0_prep_circuit(n)
        for k, (config, coeff) in enumerate(zip(expansion.configs, expansion.coefficients)):
            prep_k = phik_prep_circuit(config, n)
            for seed in range(20):
                sampled = hadamard_test(prep0, prep_k, shots=n_m, seed=1000 * k + seed)
                trials += 1
                hits += abs(sampled - coeff) <= bound
    shot_ok = hits / trials >= 0.95
    _report(9, "Hadamard test exact and sampled coefficients",
            exact_ok and shot_ok, f"exact dev {worst:.2e}, {hits}/{trials} within 3/sqrt(N_M)")


def test_acceptance_10_randomized_measurements():
    start = time.time()
    n_u, n_m = 2**6, 2**13
    grid = np.linspace(0.0, 4.0 * math.pi, 10)
    cases = []
    # N=4 and N=12, PBC half chain
    for n in (2, 6):
        params = ModelParams(n, 1.0, 0.5)
        cases.append((params, _expansion(n, 0.5), tuple(half_chain_sites(params))))
    # N=8, OBC bulk four qubits
    params8 = ModelParams(4, 1.0, 0.5, Boundary.OBC)
    cases.append((params8, obc_expansion(params8), (3, 4, 5, 6)))

    ok = True
    worst_z = 0.0
    for case_idx, (params, expansion, subsystem) in enumerate(cases):
        for t_idx, t in enumerate(grid):
            # fresh basis draw per (case, time) so one unlucky sample cannot
            # leak into every grid point of a case
            run = 170000 + 100 * case_idx + t_idx
            unitaries = sample_unitaries(params.n_sites, n_u, seed=run)
            psi = to_statevector(evolve(expansion, float(t)))
            exact = _half_chain_purity(psi, subsystem)
            dataset = collect(psi, unitaries, n_m, seed=run + 50)
            ham = purity_hamming(dataset, list(subsystem))
            sha = shadow_purity(dataset, list(subsystem))
            checks = (
                abs(ham.value - exact) <= 3.0 * ham.sigma,
                abs(sha.value - exact) <= 3.0 * sha.sigma,
                abs(ham.value - sha.value) <= 3.0 * math.hypot(ham.sigma, sha.sigma),
            )
            worst_z = max(worst_z,
                          abs(ham.value - exact) / max(ham.sigma, 1e-12) / 3.0,
                          abs(sha.value - exact) / max(sha.sigma, 1e-12) / 3.0)
            ok &= all(checks)
    elapsed = time.time() - start
    ok &= elapsed < 900.0
    _report(10, "randomized purity estimates within 3 sigma (N=4, 8 OBC, 12)", ok,
            f"worst |dev|/3sigma {worst_z:.2f}, {elapsed:.0f}s")


def test_acceptance_11_infinite_shot_surrogate():
    worst = 0.0
    for n in (2, 3, 4):
        params = ModelParams(n, 1.0, 0.5)
        expansion = _expansion(n, 0.5)
        subsystem = tuple(half_chain_sites(params))
        for t in np.linspace(0.0, 4.0 * math.pi, 10):
            psi = to_statevector(evolve(expansion, float(t)))
            exact = _half_chain_purity(psi, subsystem)
            worst = max(worst, abs(purity_hamming_exact(psi, list(subsystem)) - exact))
    psi0_cache = {n: psi0_statevector(n) for n in (2, 3, 4)}
    for n, points in ((2, 10), (3, 6), (4, 4)):
        expansion = _expansion(n, 0.5)
        for t in np.linspace(0.3, 4.0 * math.pi, points):
            psi_t = to_statevector(evolve(expansion, float(t)))
            exact = float(loschmidt_echo(expansion, float(t)))
            worst = max(worst, abs(overlap_hamming_exact(psi0_cache[n], psi_t) - exact))
    _report(11, "infinite-shot surrogate reproduces exact purity/overlap",
            worst < 1e-10, f"max dev {worst:.2e}")
