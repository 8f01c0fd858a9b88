"""Dense statevector simulator: Bell preparation, exact evolution, Hadamard test.

Statevectors are numpy complex arrays of length 2^n in little-endian bit
order (bit i of the basis index = qubit i = site i+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bell_basis import Boundary, ModelParams, build_expansion
from .dynamics import EvolvedState
from .oracle import postquench_bonds

SQRT_HALF = 1.0 / math.sqrt(2.0)

_H = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT_HALF
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
_CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)  # control = first qubit of the pair


def _rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])


def _exp_zz(theta: float) -> np.ndarray:
    # exp(-i theta Z x Z)
    e0, e1 = np.exp(-1j * theta), np.exp(1j * theta)
    return np.diag([e0, e1, e1, e0])


def _exp_xx(theta: float) -> np.ndarray:
    c, s = np.cos(theta), -1j * np.sin(theta)
    m = np.diag([c, c, c, c]).astype(complex)
    m[0, 3] = m[3, 0] = m[1, 2] = m[2, 1] = s
    return m


def _exp_yy(theta: float) -> np.ndarray:
    c, s = np.cos(theta), -1j * np.sin(theta)
    m = np.diag([c, c, c, c]).astype(complex)
    m[0, 3] = m[3, 0] = -s
    m[1, 2] = m[2, 1] = s
    return m


_MATRIX = {
    "h": lambda p: _H,
    "x": lambda p: _X,
    "s": lambda p: _S,
    "sdg": lambda p: _SDG,
    "cx": lambda p: _CX,
    "rz": _rz,
    "exp_zz": _exp_zz,
    "exp_xx": _exp_xx,
    "exp_yy": _exp_yy,
}
_SELF_INVERSE = {"h", "x", "cx"}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    param: float | None = None
    controls: tuple[int, ...] = ()

    def matrix(self) -> np.ndarray:
        return _MATRIX[self.name](self.param)

    def dagger(self) -> "Gate":
        if self.name in _SELF_INVERSE:
            return self
        if self.name == "s":
            return replace(self, name="sdg")
        if self.name == "sdg":
            return replace(self, name="s")
        return replace(self, param=-self.param)


@dataclass
class Circuit:
    n_qubits: int
    ops: list[Gate] = field(default_factory=list)

    def _add(self, name: str, qubits: tuple[int, ...], param: float | None = None) -> "Circuit":
        if len(set(qubits)) != len(qubits) or any(q < 0 or q >= self.n_qubits for q in qubits):
            raise ValueError(f"bad qubit indices {qubits} for {self.n_qubits}-qubit circuit")
        self.ops.append(Gate(name, qubits, param))
        return self

    def h(self, q):
        return self._add("h", (q,))

    def x(self, q):
        return self._add("x", (q,))

    def s(self, q):
        return self._add("s", (q,))

    def sdg(self, q):
        return self._add("sdg", (q,))

    def cx(self, control, target):
        return self._add("cx", (control, target))

    def rz(self, theta, q):
        return self._add("rz", (q,), theta)

    def exp_zz(self, theta, q1, q2):
        return self._add("exp_zz", (q1, q2), theta)

    def exp_xx(self, theta, q1, q2):
        return self._add("exp_xx", (q1, q2), theta)

    def exp_yy(self, theta, q1, q2):
        return self._add("exp_yy", (q1, q2), theta)

    def extend(self, other: "Circuit") -> "Circuit":
        self.ops.extend(other.ops)
        return self

    def dagger(self) -> "Circuit":
        return Circuit(self.n_qubits, [g.dagger() for g in reversed(self.ops)])

    def controlled(self, ancilla: int, n_qubits: int) -> "Circuit":
        """Promote every gate to its controlled version (gate-by-gate compilation)."""
        ops = []
        for g in self.ops:
            if ancilla in g.qubits or ancilla in g.controls:
                raise ValueError("ancilla overlaps the controlled sub-circuit")
            ops.append(replace(g, controls=g.controls + (ancilla,)))
        return Circuit(n_qubits, ops)


def zero_state(n_qubits: int) -> np.ndarray:
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[0] = 1.0
    return psi


def _apply_gate(psi: np.ndarray, gate: Gate) -> None:
    dim = psi.shape[0]
    idx = np.arange(dim)
    sel = np.ones(dim, dtype=bool)
    for c in gate.controls:
        sel &= ((idx >> c) & 1) == 1
    for q in gate.qubits:
        sel &= ((idx >> q) & 1) == 0
    base = idx[sel]
    k = len(gate.qubits)
    # matrix row/col r encodes bits (z_first .. z_last), first qubit most significant
    offsets = [
        sum(((r >> (k - 1 - j)) & 1) << gate.qubits[j] for j in range(k)) for r in range(2**k)
    ]
    block = np.stack([psi[base + off] for off in offsets])
    new = gate.matrix() @ block
    for off, row in zip(offsets, new):
        psi[base + off] = row


def apply(circuit: Circuit, psi: np.ndarray) -> np.ndarray:
    """Apply the circuit to a statevector (returns a new array)."""
    if psi.shape[0] != 2**circuit.n_qubits:
        raise ValueError(
            f"state dimension {psi.shape[0]} does not match {circuit.n_qubits} qubits"
        )
    out = psi.astype(complex).copy()
    for gate in circuit.ops:
        _apply_gate(out, gate)
    return out


def run(circuit: Circuit) -> np.ndarray:
    return apply(circuit, zero_state(circuit.n_qubits))


# ---------------------------------------------------------------------------
# state preparation


def bell_prep_circuit(mu: int, q1: int, q2: int, n_qubits: int | None = None) -> Circuit:
    """Circuit turning |00> on (q1, q2) into the Bell state mu, phase-exact."""
    if q1 == q2:
        raise ValueError("bell prep needs two distinct qubits")
    circ = Circuit(n_qubits if n_qubits is not None else max(q1, q2) + 1)
    if mu == 0:
        circ.x(q1).x(q2)
    elif mu == 1:
        circ.x(q2)
    elif mu == 3:
        circ.x(q1)
    elif mu != 2:
        raise ValueError(f"Bell type must be in 0..3, got {mu}")
    circ.h(q1)
    circ.cx(q1, q2)
    return circ


def psi0_prep_circuit(n: int) -> Circuit:
    """Singlets on the odd bonds: qubit pairs (0,1), (2,3), ..."""
    circ = Circuit(2 * n)
    for i in range(n):
        circ.extend(bell_prep_circuit(0, 2 * i, 2 * i + 1, 2 * n))
    return circ


def phik_prep_circuit(config: tuple[int, ...], n: int) -> Circuit:
    """Bell dimers on the even bonds: qubit pairs (1,2), (3,4), ..., (2n-1,0)."""
    if len(config) != n:
        raise ValueError(f"config length {len(config)} != n = {n}")
    circ = Circuit(2 * n)
    for i, mu in enumerate(config):
        q1 = 2 * i + 1
        q2 = (2 * i + 2) % (2 * n)
        circ.extend(bell_prep_circuit(mu, q1, q2, 2 * n))
    return circ


def evolution_circuit(params: ModelParams, t: float) -> Circuit:
    """exp(-i H2 t) as commuting two-qubit exponentials; Trotter-error-free.

    Per even bond: exp(-i(Jt/4) XX) exp(-i(Jt/4) YY) exp(-i(J delta t/4) ZZ).
    """
    circ = Circuit(params.n_sites)
    theta = params.J * t / 4.0
    theta_z = params.J * params.delta * t / 4.0
    for a, b in postquench_bonds(params):
        q1, q2 = a - 1, b - 1
        circ.exp_xx(theta, q1, q2)
        circ.exp_yy(theta, q1, q2)
        circ.exp_zz(theta_z, q1, q2)
    return circ


# ---------------------------------------------------------------------------
# Hadamard test


def hadamard_test(
    prep_psi0: Circuit,
    prep_phik: Circuit,
    shots: int | None = None,
    seed: int = 0,
) -> float:
    """Re<0|U_phik^dag U_psi0|0> = P0 - P1 from the ancilla of the test circuit.

    shots=None returns the analytic probability difference; otherwise the
    empirical difference from a binomial sample (standard error <= 1/sqrt(shots)).
    """
    if prep_psi0.n_qubits != prep_phik.n_qubits:
        raise ValueError("prep circuits must act on the same register")
    n = prep_psi0.n_qubits
    ancilla = n
    full = Circuit(n + 1)
    full.h(ancilla)
    full.extend(prep_psi0.controlled(ancilla, n + 1))
    full.extend(prep_phik.dagger().controlled(ancilla, n + 1))
    full.h(ancilla)
    psi = run(full)
    probs = np.abs(psi) ** 2
    p1 = float(probs[(np.arange(2 ** (n + 1)) >> ancilla) & 1 == 1].sum())
    if shots is None:
        return 1.0 - 2.0 * p1
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    ones = rng.binomial(shots, min(max(p1, 0.0), 1.0))
    return 1.0 - 2.0 * ones / shots


def estimate_coefficients(
    params: ModelParams,
    configs: list[tuple[int, ...]],
    shots: int | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Hadamard-test estimates of <Phi_k|Psi_0> for the given configurations."""
    prep0 = psi0_prep_circuit(params.n)
    out = np.empty(len(configs))
    for i, config in enumerate(configs):
        out[i] = hadamard_test(
            prep0, phik_prep_circuit(config, params.n), shots=shots, seed=seed + i
        )
    return out


def reconstruct_state_from_estimates(
    estimates: list[tuple[tuple[int, ...], float]],
    params: ModelParams,
    t: float,
) -> EvolvedState:
    """Renormalize estimated amplitudes and attach the exact phases exp(-i E_k t)."""
    expansion = build_expansion(params)
    table = {config: value for config, value in estimates}
    missing = [c for c in expansion.configs if c not in table]
    if missing:
        raise ValueError(f"estimates missing {len(missing)} active configs, e.g. {missing[0]}")
    raw = np.array([table[c] for c in expansion.configs])
    norm = np.sqrt(np.sum(raw**2))
    if norm == 0.0:
        raise ValueError("all estimated coefficients are zero")
    amplitudes = (raw / norm) * np.exp(-1j * expansion.energies * t)
    return EvolvedState(expansion, t, amplitudes)


# ---------------------------------------------------------------------------
# measurement and export


def measure_z(psi: np.ndarray, shots: int, seed: int = 0) -> np.ndarray:
    """Sample Z-basis outcomes; entry bit i = outcome of qubit i. Philox-seeded."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.abs(psi) ** 2
    probs = probs / probs.sum()
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    return rng.choice(len(probs), size=shots, p=probs)


def bitstring(index: int, n_qubits: int) -> str:
    """Outcome as a string in site order 1..N."""
    return "".join(str((index >> i) & 1) for i in range(n_qubits))


def _qasm_lines(gate: Gate) -> list[str]:
    prefix = "ctrl @ " * len(gate.controls)
    args = ", ".join(f"q[{c}]" for c in gate.controls)
    sep = ", " if args else ""

    def fmt(name: str, qubits: tuple[int, ...], param: float | None = None) -> str:
        call = f"{name}({param!r})" if param is not None else name
        targets = ", ".join(f"q[{q}]" for q in qubits)
        return f"{prefix}{call} {args}{sep}{targets};"

    name, q, p = gate.name, gate.qubits, gate.param
    if name in ("h", "x", "s", "sdg", "rz"):
        return [fmt(name, q, p)]
    if name == "cx":
        return [fmt("cx", q)]
    if name == "exp_zz":
        return [fmt("cx", q), fmt("rz", (q[1],), 2 * p), fmt("cx", q)]
    if name == "exp_xx":
        wrap = [fmt("h", (q[0],)), fmt("h", (q[1],))]
        return wrap + _qasm_lines(Gate("exp_zz", q, p, gate.controls)) + wrap
    if name == "exp_yy":
        pre = [fmt("sdg", (q[0],)), fmt("h", (q[0],)), fmt("sdg", (q[1],)), fmt("h", (q[1],))]
        post = [fmt("h", (q[0],)), fmt("s", (q[0],)), fmt("h", (q[1],)), fmt("s", (q[1],))]
        return pre + _qasm_lines(Gate("exp_zz", q, p, gate.controls)) + post
    raise ValueError(f"unknown gate {name}")


def to_qasm3(circuit: Circuit) -> str:
    """OpenQASM 3 text; exponential gates are flattened to {h, s, sdg, cx, rz}."""
    lines = ["OPENQASM 3.0;", 'include "stdgates.inc";', f"qubit[{circuit.n_qubits}] q;"]
    for gate in circuit.ops:
        lines.extend(_qasm_lines(gate))
    return "\n".join(lines) + "\n"
