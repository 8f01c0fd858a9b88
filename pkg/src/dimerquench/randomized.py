"""Random Pauli measurements and the Hamming / classical-shadow estimators.

Basis codes: 0 = X, 1 = Y, 2 = Z.  Subsystems are 1-based site lists, as in
the rest of the package.  Per-unitary shot streams are independent Philox
generators keyed by (seed, unitary index), so datasets are bit-reproducible
and collection parallelizes over unitaries.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .bell_basis import Boundary, ModelParams
from .circuits import Circuit, apply

BASIS_X, BASIS_Y, BASIS_Z = 0, 1, 2
_BASIS_NAMES = "XYZ"

DEFAULT_N_U = 2**6
DEFAULT_N_M = 2**13

PURITY_CLAMP = 1e-6

# pairwise Hamming kernel, one qubit: (-2)^{-D} factorizes over sites
_HAMMING_1Q = np.array([[1.0, -0.5], [-0.5, 1.0]])

# pairwise snapshot trace, one qubit, indexed by 2*alpha + z:
# 5 (same basis, same outcome), -4 (same basis, different), 1/2 (different bases)
_SHADOW_1Q = np.full((6, 6), 0.5)
for _a in range(3):
    _SHADOW_1Q[2 * _a : 2 * _a + 2, 2 * _a : 2 * _a + 2] = [[5.0, -4.0], [-4.0, 5.0]]

_PAULI = {
    BASIS_X: np.array([[0, 1], [1, 0]], dtype=complex),
    BASIS_Y: np.array([[0, -1j], [1j, 0]]),
    BASIS_Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass
class Estimate:
    """Point estimate with a jackknife (leave-one-unitary-out) standard error."""

    value: float
    sigma: float


@dataclass
class MeasurementDataset:
    """N_U x N_M Z-basis outcomes after random local Pauli rotations."""

    params: ModelParams | None
    t: float
    unitaries: np.ndarray  # (N_U, N) int8 basis codes
    outcomes: np.ndarray  # (N_U, N_M) basis-state indices, bit i = qubit i
    seed: int

    def __post_init__(self):
        self.unitaries = np.asarray(self.unitaries, dtype=np.int8)
        self.outcomes = np.asarray(self.outcomes, dtype=np.int64)
        if self.unitaries.ndim != 2 or self.outcomes.ndim != 2:
            raise ValueError("unitaries and outcomes must be 2-d arrays")
        if self.unitaries.shape[0] != self.outcomes.shape[0]:
            raise ValueError("unitary count does not match outcome rows")
        if self.outcomes.size and self.outcomes.max() >= 2**self.n_qubits:
            raise ValueError("outcome index exceeds the register size")

    @property
    def n_qubits(self) -> int:
        return self.unitaries.shape[1]

    @property
    def n_unitaries(self) -> int:
        return self.unitaries.shape[0]

    @property
    def n_shots(self) -> int:
        return self.outcomes.shape[1]


def sample_unitaries(n_qubits: int, n_u: int, seed: int = 0) -> np.ndarray:
    """Uniform i.i.d. per-qubit basis choices, (n_u, n_qubits) int8."""
    if n_u < 2:
        raise ValueError(f"need at least 2 unitaries, got {n_u}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    return rng.integers(0, 3, size=(n_u, n_qubits), dtype=np.int8)


def _rotation_circuit(bases: np.ndarray) -> Circuit:
    """Maps the chosen local Pauli eigenbases onto the computational basis."""
    circ = Circuit(len(bases))
    for q, alpha in enumerate(bases):
        if alpha == BASIS_X:
            circ.h(q)
        elif alpha == BASIS_Y:
            circ.sdg(q)
            circ.h(q)
    return circ


def collect(
    psi_t: np.ndarray,
    unitaries: np.ndarray,
    n_shots: int,
    seed: int = 0,
    params: ModelParams | None = None,
    t: float = 0.0,
) -> MeasurementDataset:
    """Rotate, measure n_shots times per unitary, return the full dataset."""
    unitaries = np.asarray(unitaries, dtype=np.int8)
    if psi_t.shape[0] != 2 ** unitaries.shape[1]:
        raise ValueError("state dimension does not match the basis choices")
    norm = np.linalg.norm(psi_t)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state norm {norm} != 1")

    def one(u: int) -> np.ndarray:
        probs = np.abs(apply(_rotation_circuit(unitaries[u]), psi_t)) ** 2
        probs /= probs.sum()
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(u,)))
        )
        return rng.choice(len(probs), size=n_shots, p=probs)

    n_threads = int(os.environ.get("DIMERQUENCH_THREADS", "1"))
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            rows = list(pool.map(one, range(len(unitaries))))
    else:
        rows = [one(u) for u in range(len(unitaries))]
    return MeasurementDataset(params, t, unitaries, np.stack(rows), seed)


# ---------------------------------------------------------------------------
# shared helpers


def _subsystem_positions(subsystem: list[int], n_qubits: int) -> np.ndarray:
    sites = list(subsystem)
    if not sites or len(set(sites)) != len(sites):
        raise ValueError("subsystem must be a nonempty list of distinct sites")
    if any(s < 1 or s > n_qubits for s in sites):
        raise ValueError(f"subsystem sites must lie in 1..{n_qubits}")
    return np.array(sites) - 1  # qubit positions


def _sub_bits(outcomes: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Outcome bits restricted to the subsystem, shape outcomes.shape + (N_A,)."""
    return (outcomes[..., None] >> positions) & 1


def _kron_matvec(single: np.ndarray, vec: np.ndarray, n_axes: int) -> np.ndarray:
    """(single^{x n_axes}) @ vec for a d x d factor matrix."""
    d = single.shape[0]
    v = vec.reshape((d,) * n_axes)
    for axis in range(n_axes):
        v = np.moveaxis(np.tensordot(single, v, axes=([1], [axis])), 0, axis)
    return v.reshape(-1)


def _mean_estimate(per_unitary: np.ndarray) -> Estimate:
    values = np.asarray(per_unitary, dtype=float)
    mean = float(values.mean())
    sigma = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    return Estimate(mean, sigma)


# ---------------------------------------------------------------------------
# Hamming-distance estimators


def purity_hamming(dataset: MeasurementDataset, subsystem: list[int]) -> Estimate:
    """Tr[rho_A^2] from Hamming correlations; same-shot pairs are excluded
    (U-statistic over distinct shots), removing the finite-N_M bias of the
    plain probability-product form."""
    if dataset.n_shots < 2:
        raise ValueError("purity estimation needs at least 2 shots per unitary")
    positions = _subsystem_positions(subsystem, dataset.n_qubits)
    n_a = len(positions)
    bits = _sub_bits(dataset.outcomes, positions)
    keys = (bits << np.arange(n_a)).sum(axis=-1)
    n_m = dataset.n_shots
    per_u = np.empty(dataset.n_unitaries)
    for u in range(dataset.n_unitaries):
        counts = np.bincount(keys[u], minlength=2**n_a).astype(float)
        quad = counts @ _kron_matvec(_HAMMING_1Q, counts, n_a)
        per_u[u] = 2**n_a * (quad - n_m) / (n_m * (n_m - 1))
    return _mean_estimate(per_u)


def overlap_hamming(dataset1: MeasurementDataset, dataset2: MeasurementDataset) -> Estimate:
    """Tr[rho1 rho2] from two datasets sharing the same unitary list."""
    if not np.array_equal(dataset1.unitaries, dataset2.unitaries):
        raise ValueError("datasets were collected with different unitaries")
    n = dataset1.n_qubits
    per_u = np.empty(dataset1.n_unitaries)
    for u in range(dataset1.n_unitaries):
        p1 = np.bincount(dataset1.outcomes[u], minlength=2**n) / dataset1.n_shots
        p2 = np.bincount(dataset2.outcomes[u], minlength=2**n) / dataset2.n_shots
        per_u[u] = 2**n * (p1 @ _kron_matvec(_HAMMING_1Q, p2, n))
    return _mean_estimate(per_u)


# ---------------------------------------------------------------------------
# classical shadows


def local_snapshot(alpha: int, z: int) -> np.ndarray:
    """Dense 2x2 form of the descriptor (alpha, z): 3 u^dag |z><z| u - I."""
    return np.eye(2, dtype=complex) / 2.0 + 1.5 * (-1) ** z * _PAULI[alpha]


def shadow_snapshots(dataset: MeasurementDataset) -> tuple[np.ndarray, np.ndarray]:
    """All M = N_U * N_M snapshots as compact (alpha, z) descriptor arrays.

    Returns (alphas, zs), each of shape (M, N); row m describes the product
    snapshot whose qubit-i factor is local_snapshot(alphas[m, i], zs[m, i]).
    """
    n = dataset.n_qubits
    alphas = np.repeat(dataset.unitaries, dataset.n_shots, axis=0)
    zs = (dataset.outcomes.reshape(-1, 1) >> np.arange(n)) & 1
    return alphas, zs.astype(np.int8)


def _shadow_keys(dataset: MeasurementDataset, positions: np.ndarray) -> np.ndarray:
    """Base-6 pattern key (2*alpha + z per site) of every shot, shape (N_U, N_M)."""
    n_a = len(positions)
    bits = _sub_bits(dataset.outcomes, positions)
    pattern = 2 * dataset.unitaries[:, None, positions] + bits
    return (pattern * 6 ** np.arange(n_a)).sum(axis=-1)


def shadow_purity(dataset: MeasurementDataset, subsystem: list[int]) -> Estimate:
    """Tr[rho_A^2] as the mean pairwise snapshot trace over all distinct pairs.

    The pair sum is evaluated through per-unitary histograms of the 6^{N_A}
    (alpha, z) patterns and the factorized 6x6 trace kernel, so the cost is
    O(N_U * N_A * 6^{N_A}) instead of O(M^2 * N_A).
    """
    positions = _subsystem_positions(subsystem, dataset.n_qubits)
    n_a = len(positions)
    if n_a > 8:
        raise ValueError("shadow purity histogram path capped at 8 subsystem sites")
    m_total = dataset.n_unitaries * dataset.n_shots
    if m_total < 2:
        raise ValueError("need at least 2 snapshots")
    keys = _shadow_keys(dataset, positions)
    hists = np.stack(
        [np.bincount(keys[u], minlength=6**n_a).astype(float) for u in range(len(keys))]
    )
    transformed = np.stack([_kron_matvec(_SHADOW_1Q, h, n_a) for h in hists])
    total_hist = hists.sum(axis=0)
    total_tf = transformed.sum(axis=0)
    diag = 5.0**n_a  # a snapshot paired with itself
    pair_sum = total_hist @ total_tf
    value = (pair_sum - m_total * diag) / (m_total * (m_total - 1))

    # leave-one-unitary-out estimates for the jackknife error bar
    n_m = dataset.n_shots
    m_loo = m_total - n_m
    cross = hists @ total_tf  # c_u . T c_total
    self_quad = np.einsum("ui,ui->u", hists, transformed)
    if m_loo < 2:
        return Estimate(float(value), 0.0)
    loo_pairs = pair_sum - 2.0 * cross + self_quad - m_loo * diag
    loo = loo_pairs / (m_loo * (m_loo - 1))
    n_u = dataset.n_unitaries
    sigma = float(np.sqrt((n_u - 1) / n_u * np.sum((loo - loo.mean()) ** 2)))
    return Estimate(float(value), sigma)


def _singlet_snapshot_factors(dataset: MeasurementDataset) -> np.ndarray:
    """Per-shot Tr[rho0 * snapshot] for rho0 = singlets on bonds (1,2), (3,4), ...

    Each dimer contributes 1/4 - (9/4) (-1)^{z_p + z_q} delta_{alpha_p, alpha_q}.
    """
    n = dataset.n_qubits
    if n % 2 != 0:
        raise ValueError("the singlet product needs an even number of qubits")
    bits = _sub_bits(dataset.outcomes, np.arange(n))
    values = np.ones(dataset.outcomes.shape)
    for i in range(n // 2):
        p, q = 2 * i, 2 * i + 1
        same = dataset.unitaries[:, p] == dataset.unitaries[:, q]
        zsum = bits[..., p] ^ bits[..., q]
        factor = 0.25 - 2.25 * np.where(zsum == 0, 1.0, -1.0) * same[:, None]
        values *= factor
    return values


def shadow_loschmidt(dataset: MeasurementDataset, rho0: np.ndarray | None = None) -> Estimate:
    """Tr[rho0 rho(t)] with rho(t) the per-unitary snapshot average.

    rho0=None selects the closed-form singlet-product overlap (the initial
    state of the quench), which is what makes N = 12 tractable; passing a
    dense 2^N x 2^N rho0 evaluates the general product-trace directly.
    """
    if rho0 is None:
        per_shot = _singlet_snapshot_factors(dataset)
        return _mean_estimate(per_shot.mean(axis=1))
    n = dataset.n_qubits
    if rho0.shape != (2**n, 2**n):
        raise ValueError(f"rho0 must be {2**n} x {2**n}")
    if n > 8:
        raise ValueError("dense-rho0 snapshot overlap capped at 8 qubits")
    alphas, zs = shadow_snapshots(dataset)
    traces = np.empty(len(alphas))
    for m in range(len(alphas)):
        op = np.ones((1, 1), dtype=complex)
        for i in range(n - 1, -1, -1):  # qubit n-1 is the most significant bit
            op = np.kron(op, local_snapshot(int(alphas[m, i]), int(zs[m, i])))
        traces[m] = np.trace(rho0 @ op).real
    per_u = traces.reshape(dataset.n_unitaries, dataset.n_shots).mean(axis=1)
    return _mean_estimate(per_u)


def renyi_from_purity(purity: float) -> float:
    """S2 = -log2(purity), with small or negative estimates clamped at 1e-6."""
    if not math.isfinite(purity):
        raise ValueError(f"purity must be finite, got {purity}")
    return -math.log2(max(purity, PURITY_CLAMP))


# ---------------------------------------------------------------------------
# infinite-shot surrogates: exact probabilities, full local-Pauli ensemble


def _rotated_probs(psi: np.ndarray, bases: dict[int, int], n_qubits: int) -> np.ndarray:
    circ = Circuit(n_qubits)
    for q, alpha in bases.items():
        if alpha == BASIS_X:
            circ.h(q)
        elif alpha == BASIS_Y:
            circ.sdg(q)
            circ.h(q)
    return np.abs(apply(circ, psi)) ** 2


def _marginal(probs: np.ndarray, positions: np.ndarray, n_qubits: int) -> np.ndarray:
    tensor = probs.reshape([2] * n_qubits)
    axes = [n_qubits - 1 - p for p in positions]
    rest = [ax for ax in range(n_qubits) if ax not in axes]
    return np.transpose(tensor, list(axes) + rest).reshape(2 ** len(positions), -1).sum(axis=1)


def purity_hamming_exact(psi: np.ndarray, subsystem: list[int]) -> float:
    """Hamming purity with exact outcome probabilities, averaged over the
    complete 3^{N_A} local-Pauli ensemble (the infinite-shot, infinite-N_U limit)."""
    n_qubits = psi.shape[0].bit_length() - 1
    positions = _subsystem_positions(subsystem, n_qubits)
    n_a = len(positions)
    total = 0.0
    for choice in product(range(3), repeat=n_a):
        probs = _rotated_probs(psi, dict(zip(positions.tolist(), choice)), n_qubits)
        p = _marginal(probs, positions, n_qubits)
        total += 2**n_a * (p @ _kron_matvec(_HAMMING_1Q, p, n_a))
    return total / 3**n_a


def overlap_hamming_exact(psi1: np.ndarray, psi2: np.ndarray) -> float:
    """Hamming overlap Tr[rho1 rho2] with exact probabilities over all 3^N bases."""
    if psi1.shape != psi2.shape:
        raise ValueError("states must share a register")
    n = psi1.shape[0].bit_length() - 1
    total = 0.0
    for choice in product(range(3), repeat=n):
        bases = dict(enumerate(choice))
        p1 = _rotated_probs(psi1, bases, n)
        p2 = _rotated_probs(psi2, bases, n)
        total += 2**n * (p1 @ _kron_matvec(_HAMMING_1Q, p2, n))
    return total / 3**n


# ---------------------------------------------------------------------------
# serialization: binary layout plus a JSON sidecar

_MAGIC = b"DQRM"
_VERSION = 1
_HEADER = struct.Struct("<4sIqqqqdqddB")
_SIDECAR_OUTCOME_LIMIT = 4096


def save_dataset(dataset: MeasurementDataset, path: str) -> None:
    """Write header, basis bytes, and bit-packed outcomes; mirror to <path>.json."""
    params = dataset.params
    if params is None:
        raise ValueError("dataset has no model parameters to serialize")
    n = dataset.n_qubits
    header = _HEADER.pack(
        _MAGIC,
        _VERSION,
        n,
        dataset.n_unitaries,
        dataset.n_shots,
        dataset.seed,
        dataset.t,
        params.n,
        params.J,
        params.delta,
        0 if params.boundary is Boundary.PBC else 1,
    )
    bits = ((dataset.outcomes.reshape(-1, 1) >> np.arange(n)) & 1).astype(np.uint8)
    packed = np.packbits(bits, axis=1, bitorder="little")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(dataset.unitaries.astype(np.uint8).tobytes())
        fh.write(packed.tobytes())

    sidecar = {
        "n_qubits": n,
        "n_unitaries": dataset.n_unitaries,
        "n_shots": dataset.n_shots,
        "seed": dataset.seed,
        "t": dataset.t,
        "params": {
            "n": params.n,
            "J": params.J,
            "delta": params.delta,
            "boundary": params.boundary.value,
        },
        "unitaries": ["".join(_BASIS_NAMES[b] for b in row) for row in dataset.unitaries],
    }
    if dataset.outcomes.size <= _SIDECAR_OUTCOME_LIMIT:
        sidecar["outcomes"] = dataset.outcomes.tolist()
    else:
        sidecar["outcomes_sha256"] = hashlib.sha256(packed.tobytes()).hexdigest()
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=1)


def load_dataset(path: str) -> MeasurementDataset:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, n, n_u, n_m, seed, t, pn, j, delta, bnd = _HEADER.unpack_from(raw)
    if magic != _MAGIC or version != _VERSION:
        raise ValueError(f"{path} is not a recognized dataset file")
    offset = _HEADER.size
    unitaries = (
        np.frombuffer(raw, dtype=np.uint8, count=n_u * n, offset=offset)
        .reshape(n_u, n)
        .astype(np.int8)
    )
    offset += n_u * n
    row_bytes = (n + 7) // 8
    packed = np.frombuffer(raw, dtype=np.uint8, count=n_u * n_m * row_bytes, offset=offset)
    bits = np.unpackbits(packed.reshape(n_u * n_m, row_bytes), axis=1, bitorder="little")[:, :n]
    outcomes = (bits.astype(np.int64) << np.arange(n)).sum(axis=1).reshape(n_u, n_m)
    params = ModelParams(
        n=pn, J=j, delta=delta, boundary=Boundary.PBC if bnd == 0 else Boundary.OBC
    )
    return MeasurementDataset(params, t, unitaries, outcomes, seed)
