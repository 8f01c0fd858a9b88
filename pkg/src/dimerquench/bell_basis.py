"""Bell-dimer eigenbasis of the postquench chain and exact expansion coefficients.

Site / qubit convention used everywhere in this package: sites are numbered
1..2n, site i lives on qubit i-1, and basis-state index bit i-1 (little
endian) stores the z-component of site i, with |0> = spin up.  The initial
state is a product of singlets on the odd bonds (1,2), (3,4), ...; the
postquench dimers sit on the even bonds (2,3), (4,5), ..., (2n,1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product

import numpy as np

SQRT_HALF = 1.0 / math.sqrt(2.0)

# Bell amplitudes over the two-site basis {|00>, |01>, |10>, |11>},
# index = 2*z_first + z_second.
_BELL_VECTORS = np.array(
    [
        [0.0, SQRT_HALF, -SQRT_HALF, 0.0],  # singlet (|01> - |10>)/sqrt2
        [0.0, SQRT_HALF, SQRT_HALF, 0.0],   # (|01> + |10>)/sqrt2
        [SQRT_HALF, 0.0, 0.0, SQRT_HALF],   # (|00> + |11>)/sqrt2
        [SQRT_HALF, 0.0, 0.0, -SQRT_HALF],  # (|00> - |11>)/sqrt2
    ]
)


class Boundary(str, Enum):
    PBC = "pbc"
    OBC = "obc"


class ConfigError(ValueError):
    """Invalid model parameters or dimer configuration."""


@dataclass(frozen=True)
class ModelParams:
    """Chain of n dimers (N = 2n qubits) with bond strength J and anisotropy delta."""

    n: int
    J: float = 1.0
    delta: float = 0.0
    boundary: Boundary = Boundary.PBC
    # Exact rational J*delta, if known; used by the periodicity checks.
    delta_fraction: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 2:
            # n = 1 with PBC makes pre- and postquench Hamiltonians identical.
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if not self.J > 0:
            raise ConfigError(f"J must be positive, got {self.J}")
        if self.delta_fraction is not None and not math.isclose(
            float(self.delta_fraction), self.delta, abs_tol=1e-15
        ):
            raise ConfigError("delta_fraction does not match delta")

    @property
    def n_sites(self) -> int:
        return 2 * self.n


def bell_amplitudes(mu: int) -> np.ndarray:
    """Amplitudes of Bell state mu over {|00>,|01>,|10>,|11>}."""
    if mu not in (0, 1, 2, 3):
        raise ConfigError(f"Bell type must be in 0..3, got {mu}")
    return _BELL_VECTORS[mu].astype(complex)


def dimer_energy(mu: int, J: float, delta: float) -> float:
    """Energy of a single Bell dimer."""
    if mu == 0:
        return -J * (2.0 + delta) / 4.0
    if mu == 1:
        return J * (2.0 - delta) / 4.0
    if mu in (2, 3):
        return J * delta / 4.0
    raise ConfigError(f"Bell type must be in 0..3, got {mu}")


def config_energy(config: tuple[int, ...], J: float, delta: float) -> float:
    """Total energy of a product of Bell dimers."""
    return sum(dimer_energy(mu, J, delta) for mu in config)


def coefficient(config: tuple[int, ...], params: ModelParams) -> float:
    """Overlap <Phi_k|Psi_0> for one PBC dimer configuration, via the transition loop.

    The singlet covering of the initial state and the dimer covering of the
    target state superimpose into a single closed loop through all 2n sites.
    Spins are propagated around the loop (types 0,1 force antiparallel
    neighbours, 2,3 parallel); the two compatible assignments are related by
    a global flip.  Each assignment contributes the product of the signed
    dimer amplitudes, giving 0 or +-2^-(n-1).
    """
    if len(config) != params.n:
        raise ConfigError(f"config length {len(config)} != n = {params.n}")
    if params.boundary is Boundary.OBC:
        raise ConfigError("loop-rule coefficients are defined for PBC only")
    n = params.n
    sign = _loop_sign(config, n)
    return sign * 2.0 ** (-(n - 1))


def _loop_sign(config: tuple[int, ...], n: int) -> int:
    """Sign of the loop overlap (0 if the coefficient vanishes)."""
    z = 0  # spin at site 1 for the first of the two compatible assignments
    parity = 0  # number of negative dimer contributions, mod 2
    negatives_on_flip = n  # singlets always flip their contribution
    for mu in config:
        # singlet of Psi_0 starting at the current odd site: negative for z=1
        parity ^= z
        z ^= 1  # singlet forces antiparallel spins
        # postquench dimer mu starting at the current even site
        if mu in (0, 3):
            parity ^= z
            negatives_on_flip += 1
        if mu in (0, 1):
            z ^= 1
    if z != 0:
        return 0  # no spin assignment closes the loop
    if negatives_on_flip % 2 != 0:
        return 0  # the two assignments cancel
    return 1 if parity == 0 else -1


def _active_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All active configs (lexicographic) with their loop signs, vectorized.

    Returns (digits, signs): digits has shape (4^(n-1), n) and dtype int8.
    """
    k = np.arange(4**n, dtype=np.int64)
    shifts = 2 * np.arange(n - 1, -1, -1, dtype=np.int64)
    digits = ((k[:, None] >> shifts[None, :]) & 3).astype(np.int8)

    unequal = (digits <= 1).astype(np.int8)  # types 0,1 force antiparallel spins
    start03 = ((digits == 0) | (digits == 3)).astype(np.int8)

    # spin at odd site i (1-based dimer index): parity of (i-1) + sum_{j<i} u_j
    cum_u = np.zeros_like(digits, dtype=np.int64)
    cum_u[:, 1:] = np.cumsum(unequal, axis=1, dtype=np.int64)[:, :-1]
    idx = np.arange(n, dtype=np.int64)
    z_odd = (idx[None, :] + cum_u) & 1
    z_even = z_odd ^ 1

    closure_ok = ((n + unequal.sum(axis=1)) & 1) == 0
    survives = ((n + start03.sum(axis=1)) & 1) == 0
    parity = (z_odd.sum(axis=1) + (z_even * start03).sum(axis=1)) & 1

    active = closure_ok & survives
    signs = np.where(parity == 0, 1, -1).astype(np.int8)
    return digits[active], signs[active]


def enumerate_active_configs(params: ModelParams) -> list[tuple[int, ...]]:
    """Dimer configurations with nonzero overlap, in lexicographic order.

    Both selection rules (even index sum, even combined count of types 2 and
    3) are applied first; survivors whose loop coefficient vanishes are then
    dropped.
    """
    if params.boundary is Boundary.OBC:
        raise ConfigError("active-config enumeration is defined for PBC only")
    digits, _ = _active_table(params.n)
    return [tuple(int(d) for d in row) for row in digits]


@dataclass
class BellExpansion:
    """Expansion of the initial singlet product over postquench eigenstates."""

    params: ModelParams
    configs: list[tuple[int, ...]]
    signs: np.ndarray  # +-1 per config
    energies: np.ndarray
    magnitude: float
    # cached configuration statevectors, built lazily (see basis_matrix)
    _basis: np.ndarray | None = field(default=None, repr=False)

    @property
    def coefficients(self) -> np.ndarray:
        return self.signs * self.magnitude

    def __len__(self) -> int:
        return len(self.configs)

    def basis_matrix(self) -> np.ndarray:
        """Dense (n_configs, 2^N) matrix of configuration statevectors."""
        if self._basis is None:
            n_sites = self.params.n_sites
            if n_sites > 24:
                raise ConfigError(f"statevector materialization capped at 24 qubits, N={n_sites}")
            self._basis = np.stack(
                [config_statevector(c, self.params.n) for c in self.configs]
            )
        return self._basis

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.params.n,
                "J": self.params.J,
                "delta": self.params.delta,
                "boundary": self.params.boundary.value,
                "entries": [
                    {"config": list(c), "sign": int(s), "energy": float(e)}
                    for c, s, e in zip(self.configs, self.signs, self.energies)
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "BellExpansion":
        data = json.loads(text)
        params = ModelParams(
            n=data["n"], J=data["J"], delta=data["delta"], boundary=Boundary(data["boundary"])
        )
        configs = [tuple(e["config"]) for e in data["entries"]]
        signs = np.array([e["sign"] for e in data["entries"]], dtype=np.int8)
        energies = np.array([e["energy"] for e in data["entries"]])
        return cls(params, configs, signs, energies, 2.0 ** (-(params.n - 1)))


def build_expansion(params: ModelParams) -> BellExpansion:
    """Pair every active configuration with its signed coefficient and energy."""
    if params.boundary is Boundary.OBC:
        raise ConfigError("use obc_expansion for open boundaries")
    if params.n > 10:
        raise ConfigError(f"expansion enumeration capped at n=10, got n={params.n}")
    digits, signs = _active_table(params.n)
    counts0 = (digits == 0).sum(axis=1)
    counts1 = (digits == 1).sum(axis=1)
    counts23 = params.n - counts0 - counts1
    energies = (
        counts0 * dimer_energy(0, params.J, params.delta)
        + counts1 * dimer_energy(1, params.J, params.delta)
        + counts23 * dimer_energy(2, params.J, params.delta)
    )
    configs = [tuple(int(d) for d in row) for row in digits]
    return BellExpansion(params, configs, signs, energies, 2.0 ** (-(params.n - 1)))


# ---------------------------------------------------------------------------
# spin-basis product states and the brute-force overlap oracle


def _dimer_factor(n_sites: int, site_a: int, site_b: int, mu: int) -> np.ndarray:
    """Per-basis-state amplitude factor of a Bell dimer on ordered sites (a, b)."""
    idx = np.arange(2**n_sites)
    za = (idx >> (site_a - 1)) & 1
    zb = (idx >> (site_b - 1)) & 1
    return bell_amplitudes(mu)[2 * za + zb]


def psi0_statevector(n: int) -> np.ndarray:
    """Initial state: singlets on bonds (1,2), (3,4), ..., (2n-1,2n)."""
    n_sites = 2 * n
    amps = np.ones(2**n_sites, dtype=complex)
    for i in range(1, n + 1):
        amps *= _dimer_factor(n_sites, 2 * i - 1, 2 * i, 0)
    return amps


def config_statevector(config: tuple[int, ...], n: int) -> np.ndarray:
    """Postquench eigenstate: Bell dimers on bonds (2,3), ..., (2n,1)."""
    n_sites = 2 * n
    amps = np.ones(2**n_sites, dtype=complex)
    for i, mu in enumerate(config, start=1):
        a = 2 * i
        b = 2 * i + 1 if i < n else 1
        amps *= _dimer_factor(n_sites, a, b, mu)
    return amps


def brute_force_coefficient(config: tuple[int, ...], params: ModelParams) -> float:
    """<Phi_k|Psi_0> evaluated in the full 2^N spin basis (oracle for the loop rule)."""
    if len(config) != params.n:
        raise ConfigError(f"config length {len(config)} != n = {params.n}")
    overlap = np.vdot(config_statevector(config, params.n), psi0_statevector(params.n))
    assert abs(overlap.imag) < 1e-14
    return float(overlap.real)


# ---------------------------------------------------------------------------
# open boundaries: no loop rule, coefficients by brute force only


@dataclass
class ObcExpansion:
    """Expansion over OBC eigenstates: free edge spins plus n-1 interior dimers."""

    params: ModelParams
    configs: list[tuple[int, tuple[int, ...], int]]  # (z_site1, dimer types, z_site2n)
    coefficients: np.ndarray
    energies: np.ndarray


def _obc_eigenstate(z1: int, types: tuple[int, ...], z2n: int, n: int) -> np.ndarray:
    n_sites = 2 * n
    amps = np.ones(2**n_sites, dtype=complex)
    idx = np.arange(2**n_sites)
    amps *= ((idx >> 0) & 1) == z1
    amps *= ((idx >> (n_sites - 1)) & 1) == z2n
    for i, mu in enumerate(types, start=1):
        amps *= _dimer_factor(n_sites, 2 * i, 2 * i + 1, mu)
    return amps


def obc_expansion(params: ModelParams) -> ObcExpansion:
    """Brute-force expansion of the singlet product over OBC eigenstates.

    The nonzero-coefficient count under OBC is reported, not asserted: the
    4^(n-1) result is a PBC statement.
    """
    n = params.n
    if 2 * n > 16:
        raise ConfigError("OBC brute-force expansion capped at 16 qubits")
    psi0 = psi0_statevector(n)
    configs, coeffs, energies = [], [], []
    for z1 in (0, 1):
        for types in product(range(4), repeat=n - 1):
            for z2n in (0, 1):
                a = np.vdot(_obc_eigenstate(z1, types, z2n, n), psi0)
                if abs(a) > 1e-12:
                    configs.append((z1, types, z2n))
                    coeffs.append(float(a.real))
                    energies.append(config_energy(types, params.J, params.delta))
    return ObcExpansion(params, configs, np.array(coeffs), np.array(energies))
