"""Brute-force references: dense Hamiltonians and spin-basis time evolution.

Everything here is independent of the Bell-basis construction and exists to
cross-check it.
"""

from __future__ import annotations

import numpy as np

from .bell_basis import Boundary, ModelParams


def postquench_bonds(params: ModelParams) -> list[tuple[int, int]]:
    """Even bonds (2i, 2i+1) as 1-based ordered site pairs; PBC adds (2n, 1)."""
    n = params.n
    bonds = [(2 * i, 2 * i + 1) for i in range(1, n)]
    if params.boundary is Boundary.PBC:
        bonds.append((2 * n, 1))
    return bonds


def dense_hamiltonian(params: ModelParams, bonds: list[tuple[int, int]] | None = None) -> np.ndarray:
    """Dense postquench Hamiltonian sum_bonds J (SxSx + SySy + delta SzSz)."""
    n_sites = params.n_sites
    if n_sites > 14:
        raise ValueError("dense Hamiltonian capped at 14 qubits")
    dim = 2**n_sites
    h = np.zeros((dim, dim))
    idx = np.arange(dim)
    for a, b in bonds if bonds is not None else postquench_bonds(params):
        za = (idx >> (a - 1)) & 1
        zb = (idx >> (b - 1)) & 1
        # SzSz: diagonal, (J delta / 4) * (-1)^(za+zb)
        h[idx, idx] += params.J * params.delta * 0.25 * np.where(za == zb, 1.0, -1.0)
        # SxSx + SySy: (J/2) flip of antiparallel pairs
        anti = idx[za != zb]
        flipped = anti ^ ((1 << (a - 1)) | (1 << (b - 1)))
        h[flipped, anti] += params.J * 0.5
    return h


def evolve_dense(hamiltonian: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) psi0 via full diagonalization."""
    evals, evecs = np.linalg.eigh(hamiltonian)
    return evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi0))


class DenseEvolver:
    """Caches the eigendecomposition of H2 so a time grid is cheap."""

    def __init__(self, params: ModelParams, bonds: list[tuple[int, int]] | None = None):
        self.params = params
        self._evals, self._evecs = np.linalg.eigh(dense_hamiltonian(params, bonds))

    def evolve(self, psi0: np.ndarray, t: float) -> np.ndarray:
        return self._evecs @ (np.exp(-1j * self._evals * t) * (self._evecs.conj().T @ psi0))
