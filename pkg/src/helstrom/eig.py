"""Cyclic Jacobi eigenvalues for dense complex Hermitian matrices.

Each rotation first removes the phase of the pivot ``a[p, q]`` and then
applies the classical real symmetric Jacobi rotation, so the whole update is
a unitary similarity. Sweeps visit pivots in row-major order, which makes the
result reproducible bit for bit. Only eigenvalues are produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .fock import check_hermitian

DEFAULT_TOL = 1e-12
MAX_SWEEPS = 100


class ConvergenceError(RuntimeError):
    def __init__(self, residual: float, sweeps: int):
        super().__init__(
            f"Jacobi iteration did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )
        self.residual = residual
        self.sweeps = sweeps


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray  # ascending
    off_diag_residual: float
    sweeps: int

    def __len__(self) -> int:
        return self.eigenvalues.shape[0]


@njit(cache=True, nogil=True)
def _off_norm(a):
    n = a.shape[0]
    s = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            z = a[p, q]
            s += z.real * z.real + z.imag * z.imag
    return math.sqrt(2.0 * s)


@njit(cache=True, nogil=True)
def _jacobi_sweeps(a, tol, max_sweeps):
    """Diagonalize ``a`` in place; returns (residual, sweeps) or sweeps = -1 on failure."""
    n = a.shape[0]
    # Pivots this small are left for a later sweep; all of them together
    # cannot keep the off-diagonal norm above tol.
    skip = tol / (2.0 * n)
    for sweep in range(max_sweeps + 1):
        off = _off_norm(a)
        if off < tol:
            return off, sweep
        if sweep == max_sweeps:
            return off, -1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < skip:
                    continue
                phase = apq.conjugate() / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                s_ph = s * phase
                c_ph = c * phase
                for r in range(n):
                    if r == p or r == q:
                        continue
                    arp = a[r, p]
                    arq = a[r, q]
                    new_rp = c * arp - s_ph * arq
                    new_rq = s * arp + c_ph * arq
                    a[r, p] = new_rp
                    a[r, q] = new_rq
                    a[p, r] = new_rp.conjugate()
                    a[q, r] = new_rq.conjugate()
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                a[p, q] = 0.0
                a[q, p] = 0.0
    return _off_norm(a), -1


def eigenvalues_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS) -> Spectrum:
    """All eigenvalues of a Hermitian matrix, sorted ascending.

    Iterates until the off-diagonal Frobenius norm drops below ``tol``;
    raises :class:`ConvergenceError` if ``max_sweeps`` sweeps are not enough.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    m = check_hermitian(m)
    work = np.array(m, dtype=np.complex128, order="C", copy=True)
    # Diagonal of a Hermitian matrix is real; drop rounding noise in the imaginary part.
    work[np.diag_indices_from(work)] = work.diagonal().real
    residual, sweeps = _jacobi_sweeps(work, float(tol), int(max_sweeps))
    if sweeps < 0:
        raise ConvergenceError(residual, max_sweeps)
    eigs = np.sort(work.diagonal().real)
    return Spectrum(eigs, float(residual), int(sweeps))


def trace_norm(m: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """``Tr|m|``, the sum of absolute eigenvalues."""
    spec = eigenvalues_hermitian(m, tol)
    return math.fsum(np.abs(spec.eigenvalues).tolist())
