"""Time evolution in the Bell basis: statevectors, entropies, Loschmidt echo."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import jacobi
from .bell_basis import BellExpansion, ConfigError, ModelParams, ObcExpansion, _obc_eigenstate

MAX_STATEVECTOR_QUBITS = 24
ZERO_ECHO_FLOOR = 1e-300


@dataclass
class EvolvedState:
    """Bell-basis amplitudes a_k exp(-i E_k t) of the postquench state."""

    expansion: BellExpansion | ObcExpansion
    t: float
    amplitudes: np.ndarray


@dataclass
class ReducedDensityMatrix:
    subsystem: list[int]  # 1-based site indices, first site = most significant bit
    matrix: np.ndarray


def evolve(expansion: BellExpansion | ObcExpansion, t: float) -> EvolvedState:
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    phases = np.exp(-1j * expansion.energies * t)
    return EvolvedState(expansion, t, expansion.coefficients * phases)


def _basis_matrix(expansion: BellExpansion | ObcExpansion) -> np.ndarray:
    if isinstance(expansion, BellExpansion):
        return expansion.basis_matrix()
    n = expansion.params.n
    if 2 * n > MAX_STATEVECTOR_QUBITS:
        raise ConfigError("statevector materialization capped at 24 qubits")
    if not hasattr(expansion, "_basis_cache"):
        expansion._basis_cache = np.stack(
            [_obc_eigenstate(z1, types, z2n, n) for z1, types, z2n in expansion.configs]
        )
    return expansion._basis_cache


def to_statevector(state: EvolvedState) -> np.ndarray:
    """Dense 2^N statevector of the evolved state (little-endian site order)."""
    n_sites = state.expansion.params.n_sites
    if n_sites > MAX_STATEVECTOR_QUBITS:
        raise ConfigError(f"statevector materialization capped at 24 qubits, N={n_sites}")
    return state.amplitudes @ _basis_matrix(state.expansion)


def reduced_density_matrix(psi: np.ndarray, subsystem: list[int]) -> ReducedDensityMatrix:
    """Partial trace of |psi><psi| onto the given (1-based) sites."""
    dim = psi.shape[0]
    n_sites = dim.bit_length() - 1
    sites = list(subsystem)
    if not sites or len(set(sites)) != len(sites):
        raise ValueError("subsystem must be a nonempty list of distinct sites")
    if any(s < 1 or s > n_sites for s in sites):
        raise ValueError(f"subsystem sites must lie in 1..{n_sites}")
    if len(sites) >= n_sites:
        raise ValueError("subsystem must be a proper subset of the chain")
    tensor = psi.reshape([2] * n_sites)
    # axis of site i is n_sites - i (axis 0 holds the most significant bit)
    axes = [n_sites - s for s in sites]
    rest = [ax for ax in range(n_sites) if ax not in axes]
    block = np.transpose(tensor, axes + rest).reshape(2 ** len(sites), -1)
    rho = block @ block.conj().T
    return ReducedDensityMatrix(sites, rho)


def hermitian_eigenvalues(rho: ReducedDensityMatrix | np.ndarray) -> np.ndarray:
    """Spectrum of a density matrix, clamped to [0, 1] after a small-negative check."""
    matrix = rho.matrix if isinstance(rho, ReducedDensityMatrix) else np.asarray(rho)
    eigs = jacobi.jacobi_eigenvalues(matrix)
    if eigs.min() < -1e-10:
        raise ValueError(f"density matrix has eigenvalue {eigs.min():.3e} < -1e-10")
    return np.clip(eigs, 0.0, 1.0)


def von_neumann_entropy(eigs: np.ndarray) -> float:
    """-sum(lambda log2 lambda) in bits, with 0 log 0 = 0."""
    eigs = np.asarray(eigs, dtype=float)
    _check_spectrum(eigs)
    pos = eigs[eigs > 0]
    return float(-np.sum(pos * np.log2(pos)))


def renyi2_entropy(eigs: np.ndarray) -> float:
    """-log2 sum(lambda^2) in bits."""
    eigs = np.asarray(eigs, dtype=float)
    _check_spectrum(eigs)
    return float(-np.log2(np.sum(eigs**2)))


def _check_spectrum(eigs: np.ndarray) -> None:
    if eigs.min() < -1e-10:
        raise ValueError(f"negative eigenvalue {eigs.min():.3e} below tolerance")
    if abs(eigs.sum() - 1.0) > 1e-9:
        raise ValueError(f"spectrum sums to {eigs.sum():.12f}, expected 1")


def half_chain_sites(params: ModelParams) -> list[int]:
    """Subsystem A: sites 1..n (cuts between (n, n+1) and (2n, 1))."""
    return list(range(1, params.n + 1))


def half_chain_entropies(expansion: BellExpansion | ObcExpansion, t: float) -> tuple[float, float]:
    """(S1, S2) of the half chain at time t, from the materialized statevector."""
    psi = to_statevector(evolve(expansion, t))
    rho = reduced_density_matrix(psi, half_chain_sites(expansion.params))
    eigs = hermitian_eigenvalues(rho)
    return von_neumann_entropy(eigs), renyi2_entropy(eigs)


# ---------------------------------------------------------------------------
# Loschmidt echo


def loschmidt_echo(expansion: BellExpansion | ObcExpansion, t) -> float | np.ndarray:
    """|sum_k a_k^2 exp(-i E_k t)|^2; broadcasts over an array of times."""
    t = np.asarray(t, dtype=float)
    weights = expansion.coefficients**2
    amp = np.exp(-1j * np.outer(np.atleast_1d(t), expansion.energies)) @ weights
    echo = np.abs(amp) ** 2
    return float(echo[0]) if t.ndim == 0 else echo


def return_rate(echo: float, n_sites: int) -> float:
    """-ln(L)/N; exact zeros map to the +inf sentinel."""
    if not (-1e-12 <= echo <= 1.0 + 1e-12):
        raise ValueError(f"echo {echo} outside [0, 1]")
    if echo < ZERO_ECHO_FLOOR:
        return math.inf
    return -math.log(min(echo, 1.0)) / n_sites


def _golden_minimize(f, a: float, b: float, tol: float = 1e-11) -> float:
    """Golden-section search for the minimum of a unimodal f on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def find_loschmidt_zeros(
    expansion: BellExpansion | ObcExpansion,
    t_max: float,
    grid_step: float = 0.01,
    tol: float = 1e-12,
) -> list[float]:
    """Grid-scan the echo, refine local minima by golden section, keep true zeros."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    ts = np.arange(0.0, t_max + grid_step, grid_step)
    echo = loschmidt_echo(expansion, ts)
    zeros: list[float] = []
    for i in range(1, len(ts) - 1):
        if echo[i] <= echo[i - 1] and echo[i] <= echo[i + 1]:
            t_star = _golden_minimize(lambda t: loschmidt_echo(expansion, t), ts[i - 1], ts[i + 1])
            if loschmidt_echo(expansion, t_star) < tol:
                if not zeros or abs(t_star - zeros[-1]) > 10 * grid_step:
                    zeros.append(float(t_star))
    return zeros


# ---------------------------------------------------------------------------
# periodicity


def check_periodicity(
    params: ModelParams,
    observable: str,
    p: int,
    q: int,
    samples: int = 32,
    expansion: BellExpansion | None = None,
) -> tuple[bool, float]:
    """Max |f(t) - f(t + T)| over sampled t, with T = 2 q pi / J (q pi for the
    n=2 entropies).  Requires J*delta == p/q exactly (coprime integers)."""
    if q <= 0 or math.gcd(p, q) != 1:
        raise ValueError(f"p/q must be a reduced fraction with q > 0, got {p}/{q}")
    target = Fraction(p, q)
    jd = params.J * params.delta
    if abs(jd - float(target)) > 1e-12:
        raise ValueError(
            f"J*delta = {jd} is not the rational {p}/{q}; periodicity check refused"
        )
    observable = observable.lower()
    if observable in ("s1", "s2"):
        period = (q * math.pi if params.n == 2 else 2 * q * math.pi) / params.J
    elif observable == "echo":
        period = 2 * q * math.pi / params.J
    else:
        raise ValueError(f"unknown observable {observable!r}")

    if expansion is None:
        from .bell_basis import build_expansion

        expansion = build_expansion(params)
    ts = np.linspace(0.0, period, samples, endpoint=False) + 0.05
    if observable == "echo":
        dev = np.abs(loschmidt_echo(expansion, ts) - loschmidt_echo(expansion, ts + period))
        max_dev = float(dev.max())
    else:
        order = 0 if observable == "s1" else 1
        vals = np.array([half_chain_entropies(expansion, t)[order] for t in ts])
        shifted = np.array([half_chain_entropies(expansion, t + period)[order] for t in ts])
        max_dev = float(np.abs(vals - shifted).max())
    return max_dev < 1e-9, max_dev
