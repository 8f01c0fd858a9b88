"""Closed-form entanglement entropies and Loschmidt echoes for the dimerized chain.

All formulas take plain floats (or numpy arrays) for the time argument and
broadcast elementwise.  Entropies are in bits.
"""

from __future__ import annotations

import numpy as np

from .bell_basis import ModelParams


class UncoveredCaseError(ValueError):
    """No closed form is available for this (n, delta) combination."""


def _xlog2x(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    mask = x > 0
    out[mask] = x[mask] * np.log2(x[mask])
    return out


def rdm_eigenvalues_n2(t, J: float, delta: float) -> np.ndarray:
    """Half-chain RDM spectrum for n=2: (sin^2/4, sin^2/4, [1+cos^2 +- 2 cc]/4)."""
    t = np.asarray(t, dtype=float)
    s2 = np.sin(J * t) ** 2
    c = np.cos(J * t)
    cd = np.cos(J * delta * t)
    lam12 = 0.25 * s2
    lam3 = 0.25 * (1.0 + c**2 + 2.0 * c * cd)
    lam4 = 0.25 * (1.0 + c**2 - 2.0 * c * cd)
    return np.stack([lam12, lam12, lam3, lam4])


def entropy_n2(t, J: float, delta: float, order: int = 1):
    """Half-chain entropy of the n=2 chain (von Neumann for order 1, Renyi-2 for 2)."""
    eigs = rdm_eigenvalues_n2(t, J, delta)
    if order == 1:
        return -np.sum(_xlog2x(eigs), axis=0)
    if order == 2:
        return -np.log2(np.sum(eigs**2, axis=0))
    raise ValueError(f"order must be 1 or 2, got {order}")


def entropy_closed_form(params: ModelParams, t, order: int = 1):
    """Half-chain entropy for PBC at any n: n=2 direct, odd n = 1 + S^{n=2}(t/2),
    even n > 2 = 2 S^{n=2}(t/2)."""
    t = np.asarray(t, dtype=float)
    if params.n == 2:
        return entropy_n2(t, params.J, params.delta, order)
    if params.n % 2 == 1:
        return 1.0 + entropy_n2(t / 2.0, params.J, params.delta, order)
    return 2.0 * entropy_n2(t / 2.0, params.J, params.delta, order)


# ---------------------------------------------------------------------------
# n=4 half-chain RDM spectra for the XX and XXX points


def appendix_eigenvalues_n4(t, J: float, model: str) -> np.ndarray:
    """Half-chain RDM spectrum (all 16 values, with degeneracies) for n=4.

    model 'xx' (delta=0): values (l1, l2) nondegenerate, (l3, l4) 4-fold,
    l5 6-fold; 'xxx' (delta=1): l1 9-fold, l2 6-fold, l3 nondegenerate.
    """
    t = np.asarray(t, dtype=float)
    c2 = np.cos(J * t / 2.0) ** 2
    s2 = np.sin(J * t / 2.0) ** 2
    if model == "xx":
        # root carries a cos^2 factor; without it the branch goes negative
        root12 = np.sqrt(c2 * (c2 + 0.25 * s2**2))
        l1 = 0.5 * (c2 + 0.125 * s2**2 + root12)
        l2 = 0.5 * (c2 + 0.125 * s2**2 - root12)
        inner = np.maximum(1.0 - 2.0 * c2**2 + c2**4 - s2**4, 0.0)
        root34 = np.sqrt(inner)
        l3 = (1.0 - c2**2 + root34) / 16.0
        l4 = (1.0 - c2**2 - root34) / 16.0
        l5 = s2**2 / 16.0
        return np.stack([l1, l2] + [l3] * 4 + [l4] * 4 + [l5] * 6)
    if model == "xxx":
        l1 = s2**2 / 16.0
        l2 = s2 * (1.0 + 3.0 * c2) / 16.0
        l3 = (1.0 + 3.0 * c2) ** 2 / 16.0
        return np.stack([l1] * 9 + [l2] * 6 + [l3])
    raise ValueError(f"model must be 'xx' or 'xxx', got {model!r}")


def appendix_entropy_n4(t, J: float, model: str):
    """Closed-form von Neumann entropy matching the n=4 spectra above."""
    t = np.asarray(t, dtype=float)
    if model == "xx":
        s2 = np.sin(J * t / 4.0) ** 2
        c2 = np.cos(J * t / 4.0) ** 2
        return -4.0 * (_xlog2x(s2) + _xlog2x(c2))
    if model == "xxx":
        s2 = np.sin(J * t / 2.0) ** 2
        c2 = np.cos(J * t / 2.0) ** 2
        return 4.0 - 1.5 * _xlog2x(s2) - 0.5 * (1.0 + 3.0 * c2) * np.log2(1.0 + 3.0 * c2)
    raise ValueError(f"model must be 'xx' or 'xxx', got {model!r}")


def closed_form_appendix_n4(t, J: float, model: str):
    """(eigenvalue multiset, S1) for the n=4 XX / XXX chains."""
    return appendix_eigenvalues_n4(t, J, model), appendix_entropy_n4(t, J, model)


# ---------------------------------------------------------------------------
# Loschmidt echoes


def echo_n2(t, J: float, delta: float):
    t = np.asarray(t, dtype=float)
    c = np.cos(J * t)
    return 0.25 * (1.0 + 2.0 * c * np.cos(delta * J * t) + c**2)


def echo_n3(t, J: float, delta: float):
    t = np.asarray(t, dtype=float)
    jt = J * t
    return (
        36.0 * np.cos(delta * jt)
        + 36.0 * np.cos((1.0 - delta) * jt)
        + 12.0 * np.cos((1.0 + delta) * jt)
        + 72.0 * np.cos(jt)
        + 6.0 * np.cos(2.0 * jt)
        + 12.0 * np.cos((2.0 + delta) * jt)
        + 82.0
    ) / 256.0


def echo_n4(t, J: float, delta: float):
    t = np.asarray(t, dtype=float)
    jt = J * t
    main = 12.0 * np.cos(jt / 2.0) ** 2 + np.cos(delta * jt) * (3.0 + np.cos(jt) ** 2)
    return (main**2 + np.sin(delta * jt) ** 2 * np.sin(jt) ** 4) / 256.0


def echo_n4_xx(t, J: float):
    t = np.asarray(t, dtype=float)
    return (0.25 * (1.0 + np.cos(J * t / 2.0) ** 2) ** 2) ** 2


def echo_n4_xxx(t, J: float):
    t = np.asarray(t, dtype=float)
    c2 = np.cos(J * t / 2.0) ** 2
    return (1.0 - 12.0 * c2 + 42.0 * c2**2 - 36.0 * c2**3 + 21.0 * c2**4) / 16.0


def echo_n6_xx(t, J: float):
    # the inner polynomial is c (c + 3)^2 / 16 with c = cos^2(Jt/2)
    t = np.asarray(t, dtype=float)
    c2 = np.cos(J * t / 2.0) ** 2
    return (c2 * (c2 + 3.0) ** 2 / 16.0) ** 2


def echo_n8_xx(t, J: float):
    t = np.asarray(t, dtype=float)
    c2 = np.cos(J * t / 2.0) ** 2
    jt = J * t
    return (
        ((1.0 + 7.0 * c2) / 8.0) ** 2
        - np.sin(2.0 * jt) ** 2 / 4096.0
        - (7.0 / 1024.0) * (5.0 * np.sin(jt) ** 2 + np.cos(jt) - np.cos(3.0 * jt))
    ) ** 2


# 12-qubit echo: multiplicities and energies 2E_k of the 24 active classes
_N6_TERMS = (
    # (multiplicity, coefficient of J in 2E, coefficient of delta*J in 2E)
    (1, -6.0, -3.0),
    (1, 6.0, -3.0),
    (1, 0.0, 3.0),
    (1, 0.0, 3.0),
    (15, -2.0, -3.0),
    (15, -4.0, -1.0),
    (15, -4.0, -1.0),
    (15, 2.0, -3.0),
    (90, 0.0, -1.0),
    (90, 0.0, -1.0),
    (90, -2.0, 1.0),
    (90, 2.0, 1.0),
    (120, -2.0, -1.0),
    (120, 2.0, -1.0),
    (120, 0.0, 1.0),
    (120, 0.0, 1.0),
    (15, 4.0, -1.0),
    (15, 4.0, -1.0),
    (15, -2.0, 1.0),
    (15, -2.0, 1.0),
    (15, 2.0, 1.0),
    (15, 2.0, 1.0),
    (15, 0.0, 3.0),
    (15, 0.0, 3.0),
)


def echo_n6(t, J: float, delta: float):
    """12-qubit echo from the tabulated active classes: |sum m_k exp(-i E_k t)|^2 / 4^10."""
    t = np.asarray(t, dtype=float)
    cs = np.zeros_like(t)
    si = np.zeros_like(t)
    for mult, cj, cd in _N6_TERMS:
        phase = (cj * J + cd * delta * J) * t / 2.0
        cs = cs + mult * np.cos(phase)
        si = si + mult * np.sin(phase)
    return (cs**2 + si**2) / 4.0**10


def echo_closed_form(params: ModelParams, t):
    """Dispatch to the covered closed forms: n=2,3,4,6 any delta; n=8 at delta=0."""
    n, J, delta = params.n, params.J, params.delta
    if n == 2:
        return echo_n2(t, J, delta)
    if n == 3:
        return echo_n3(t, J, delta)
    if n == 4:
        return echo_n4(t, J, delta)
    if n == 6:
        return echo_n6(t, J, delta)
    if n == 8 and delta == 0.0:
        return echo_n8_xx(t, J)
    raise UncoveredCaseError(f"no closed-form echo for n={n}, delta={delta}")
