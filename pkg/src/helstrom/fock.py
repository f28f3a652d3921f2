"""Coherent states in a truncated Fock basis.

Amplitudes are generated by the multiplicative recurrence
``c[n+1] = c[n] * alpha / sqrt(n+1)`` starting from ``exp(-|alpha|^2 / 2)``,
so no factorial is ever formed and nothing overflows for large ``n``.
Density matrices are sums of weighted outer products of these vectors.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

PAPER_DIM = 50
WEIGHT_SUM_TOL = 1e-12
HERMITIAN_TOL = 1e-14

# exp(-|alpha|^2 / 2) underflows to zero beyond this.
MAX_ALPHA_SQ = 1400.0


@dataclass(frozen=True)
class Displacement:
    """Point ``(x, p)`` in quadrature phase space, i.e. the state ``|x + ip>``."""

    x: float
    p: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise ValueError(f"displacement must be finite, got ({self.x}, {self.p})")

    @property
    def alpha(self) -> complex:
        return complex(self.x, self.p)

    @property
    def mean_photons(self) -> float:
        return self.x * self.x + self.p * self.p


@dataclass(frozen=True)
class CoherentEnsemble:
    """Finite mixture ``sum_j w_j |alpha_j><alpha_j|`` of coherent states."""

    components: tuple[tuple[float, Displacement], ...]

    def __post_init__(self) -> None:
        comps = tuple((float(w), d) for w, d in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("ensemble needs at least one component")
        for w, d in comps:
            if not isinstance(d, Displacement):
                raise TypeError(f"expected Displacement, got {type(d).__name__}")
            if not (w > 0.0 and math.isfinite(w)):
                raise ValueError(f"component weights must be positive, got {w}")
        total = math.fsum(w for w, _ in comps)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {total!r}")

    @classmethod
    def pure(cls, x: float, p: float) -> "CoherentEnsemble":
        return cls(((1.0, Displacement(x, p)),))

    @classmethod
    def equal_mixture(cls, points: Sequence[tuple[float, float]]) -> "CoherentEnsemble":
        w = 1.0 / len(points)
        return cls(tuple((w, Displacement(x, p)) for x, p in points))

    def __len__(self) -> int:
        return len(self.components)

    @property
    def displacements(self) -> list[Displacement]:
        return [d for _, d in self.components]


@dataclass(frozen=True, eq=False)
class FockVector:
    amplitudes: np.ndarray
    norm_deficit: float

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


def _check_dim(dim: int) -> int:
    if isinstance(dim, bool) or int(dim) != dim or dim < 1:
        raise ValueError(f"dim must be a positive integer, got {dim!r}")
    return int(dim)


def _check_size(d: Displacement) -> None:
    if d.mean_photons > MAX_ALPHA_SQ:
        raise ValueError(
            f"|alpha|^2 = {d.mean_photons:g} exceeds {MAX_ALPHA_SQ:g}; "
            "vacuum amplitude underflows in double precision"
        )


def _tail_after(last: complex, start: int, alpha: complex) -> float:
    """Sum of ``|c[n]|^2`` for ``n > start`` continuing the recurrence from ``c[start] = last``."""
    mean = abs(alpha) ** 2
    tail = 0.0
    c = last
    n = start
    while True:
        c = c * alpha / math.sqrt(n + 1)
        n += 1
        term = c.real * c.real + c.imag * c.imag
        tail += term
        if term == 0.0 or (n > mean and term <= tail * 1e-17):
            return tail


def coherent_fock_vector(d: Displacement, dim: int) -> FockVector:
    """Fock amplitudes ``<n|x + ip>`` for ``n < dim``.

    The norm deficit ``1 - sum |c_n|^2`` is reported exactly enough to be
    meaningful far below machine epsilon: when most of the weight is kept,
    it is summed directly from the discarded tail instead of by subtraction.
    """
    dim = _check_dim(dim)
    _check_size(d)
    alpha = d.alpha
    steps = np.empty(dim, dtype=complex)
    steps[0] = math.exp(-0.5 * d.mean_photons)
    steps[1:] = alpha / np.sqrt(np.arange(1, dim, dtype=float))
    amps = np.cumprod(steps)

    kept = math.fsum((amps.real**2 + amps.imag**2).tolist())
    if kept < 0.5:
        deficit = 1.0 - kept
    else:
        deficit = _tail_after(complex(amps[-1]), dim - 1, alpha)
    return FockVector(amps, max(deficit, 0.0))


def overlap(a: Displacement, b: Displacement) -> complex:
    """Closed-form inner product ``<alpha|beta>``."""
    alpha, beta = a.alpha, b.alpha
    return cmath.exp(-0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + alpha.conjugate() * beta)


def ensemble_density_matrix(e: CoherentEnsemble, dim: int) -> np.ndarray:
    dim = _check_dim(dim)
    rho = np.zeros((dim, dim), dtype=complex)
    for w, d in e.components:
        v = coherent_fock_vector(d, dim).amplitudes
        rho += w * np.outer(v, v.conj())
    return rho


def difference_matrix(e0: CoherentEnsemble, e1: CoherentEnsemble, dim: int) -> np.ndarray:
    """``rho0 - rho1`` in the first ``dim`` Fock states; Hermitian to the last bit."""
    return ensemble_density_matrix(e0, dim) - ensemble_density_matrix(e1, dim)


def max_norm_deficit(ensembles: Iterable[CoherentEnsemble], dim: int) -> float:
    return max(
        coherent_fock_vector(d, dim).norm_deficit for e in ensembles for d in e.displacements
    )


def _dim_for(d: Displacement, tail_tol: float) -> int:
    """Smallest ``dim`` with ``norm_deficit < tail_tol`` for one coherent state."""
    mean = d.mean_photons
    # Generate |c_n|^2 past the bulk of the Poisson distribution, then read
    # the tails off a reversed cumulative sum: tails[k] is the deficit at dim k.
    n_max = int(mean + 10.0 * math.sqrt(mean + 1.0) + 20.0)
    while True:
        vec = coherent_fock_vector(d, n_max)
        if vec.norm_deficit < tail_tol:
            break
        n_max *= 2
    probs = vec.amplitudes.real**2 + vec.amplitudes.imag**2
    tails = np.cumsum(probs[::-1])[::-1] + vec.norm_deficit
    below = np.nonzero(tails < tail_tol)[0]
    return int(below[0]) if below.size else n_max


def suggest_dim(ensembles: Iterable[CoherentEnsemble], tail_tol: float, floor: int = PAPER_DIM) -> int:
    """Smallest truncation keeping every component's norm deficit below ``tail_tol``, never below ``floor``."""
    if not (0.0 < tail_tol < 1.0):
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol!r}")
    dim = floor
    for e in ensembles:
        for d in e.displacements:
            dim = max(dim, _dim_for(d, tail_tol))
    return dim


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    err = float(np.max(np.abs(m - m.conj().T)))
    if err > tol:
        raise ValueError(f"matrix is not Hermitian: max |m - m^H| = {err:.3g} > {tol:g}")
    return m
