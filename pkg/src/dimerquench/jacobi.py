"""Cyclic Jacobi eigensolver for dense complex Hermitian matrices."""

from __future__ import annotations

import numpy as np


class NotHermitianError(ValueError):
    pass


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigenvalues(
    matrix: np.ndarray,
    tol: float = 1e-13,
    hermitian_tol: float = 1e-9,
    max_sweeps: int = 60,
) -> np.ndarray:
    """Real spectrum of a Hermitian matrix via cyclic complex Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    tol * ||matrix||.  Eigenvalues are returned in ascending order.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    herm_defect = np.abs(a - a.conj().T).max()
    if herm_defect > hermitian_tol:
        raise NotHermitianError(f"matrix deviates from Hermitian by {herm_defect:.3e}")
    a = 0.5 * (a + a.conj().T)
    m = a.shape[0]
    if m == 1:
        return a.real.diagonal().copy()

    scale = max(float(np.linalg.norm(a)), 1e-300)
    threshold = tol * scale
    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= threshold:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                r = abs(apq)
                if r <= threshold / m:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                # smaller-magnitude root of t^2 + 2*tau*t - 1 = 0
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # unitary plane rotation zeroing a[p, q]
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    else:
        raise RuntimeError("Jacobi sweeps did not converge")
    return np.sort(a.real.diagonal())
