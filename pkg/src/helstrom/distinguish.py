"""Helstrom probability of error and the information it leaves an eavesdropper.

The truncated-Fock route (:func:`probability_of_error`) is checked by two
routes that never touch a Fock basis: the closed form for two pure states
(:func:`pure_pe_analytic`) and the exact spectrum of the difference operator
restricted to the span of its coherent components (:func:`gram_subspace_pe`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eig import DEFAULT_TOL, eigenvalues_hermitian, trace_norm
from .fock import (
    PAPER_DIM,
    CoherentEnsemble,
    Displacement,
    difference_matrix,
    max_norm_deficit,
    overlap,
)

MAX_DEFICIT = 0.01
PE_SLACK = 1e-12
GRAM_MIN_EIG = 1e-10
GRAM_MAX_COMPONENTS = 16


class TruncationError(ValueError):
    """The Fock truncation discards too much of some component's norm."""


class IllConditionedError(ArithmeticError):
    """Gram matrix of the components is numerically singular."""


@dataclass(frozen=True)
class DistinguishabilityResult:
    pe: float
    trace_distance_sum: float
    shannon_bits: float
    dim_used: int
    max_norm_deficit: float


@dataclass(frozen=True)
class GainRecord:
    x: float
    p: float
    pe_pure: float
    pe_mixed: float
    i_pure: float
    i_mixed: float
    i_gain: float


def pure_pair(x: float, p: float) -> tuple[CoherentEnsemble, CoherentEnsemble]:
    """``|x+ip>`` against its mirror ``|-x+ip>``."""
    return CoherentEnsemble.pure(x, p), CoherentEnsemble.pure(-x, p)


def mixed_pair(x: float, p: float) -> tuple[CoherentEnsemble, CoherentEnsemble]:
    """Equal mixtures of ``|±x+ip>`` and ``|±x-ip>``, one per sign of ``x``."""
    return (
        CoherentEnsemble.equal_mixture([(x, p), (x, -p)]),
        CoherentEnsemble.equal_mixture([(-x, p), (-x, -p)]),
    )


def _pe_from_trace_norm(total: float) -> float:
    return min(max(0.5 - 0.25 * total, 0.0), 0.5)


def shannon_information(pe: float) -> float:
    """Information per use of a binary symmetric channel with error rate ``pe``.

    Uses ``0 * log 0 = 0``; ``pe`` outside ``[0, 1/2]`` by less than 1e-12 is
    clamped, anything further is rejected.
    """
    pe = float(pe)
    if not (-PE_SLACK <= pe <= 0.5 + PE_SLACK):
        raise ValueError(f"pe must lie in [0, 1/2], got {pe!r}")
    pe = min(max(pe, 0.0), 0.5)
    if pe == 0.0:
        return 1.0
    nats = pe * math.log(pe) + (1.0 - pe) * math.log1p(-pe)
    return min(max(1.0 + nats / math.log(2.0), 0.0), 1.0)


def probability_of_error(
    e0: CoherentEnsemble,
    e1: CoherentEnsemble,
    dim: int = PAPER_DIM,
    tol: float = DEFAULT_TOL,
) -> DistinguishabilityResult:
    """Minimum error for telling ``e0`` from ``e1`` at equal priors, in ``dim`` Fock states."""
    deficit = max_norm_deficit((e0, e1), dim)
    if deficit > MAX_DEFICIT:
        raise TruncationError(
            f"dim={dim} keeps too little of the state: max norm deficit {deficit:.3g} > {MAX_DEFICIT}"
        )
    total = trace_norm(difference_matrix(e0, e1, dim), tol)
    pe = _pe_from_trace_norm(total)
    return DistinguishabilityResult(
        pe=pe,
        trace_distance_sum=total,
        shannon_bits=shannon_information(pe),
        dim_used=int(dim),
        max_norm_deficit=deficit,
    )


def pure_pe_analytic(a: Displacement, b: Displacement) -> float:
    """Exact Helstrom error for two equiprobable coherent states, ``(1 - sqrt(1 - |<a|b>|^2)) / 2``."""
    dist_sq = (a.x - b.x) ** 2 + (a.p - b.p) ** 2
    # 1 - |<a|b>|^2 without cancellation for nearby states
    return 0.5 * (1.0 - math.sqrt(-math.expm1(-dist_sq)))


def _signed_components(e0: CoherentEnsemble, e1: CoherentEnsemble) -> list[tuple[Displacement, float]]:
    # Identical displacements are the same vector, so their weights add
    # exactly; coefficients that cancel to zero drop out of the span.
    coeffs: dict[Displacement, float] = {}
    for sign, e in ((1.0, e0), (-1.0, e1)):
        for w, d in e.components:
            coeffs[d] = coeffs.get(d, 0.0) + sign * w
    return [(d, c) for d, c in coeffs.items() if c != 0.0]


def gram_subspace_pe(e0: CoherentEnsemble, e1: CoherentEnsemble, tol: float = DEFAULT_TOL) -> float:
    """Helstrom error computed in the span of the coherent components, with no truncation.

    With ``G`` the Gram matrix of the distinct components and ``C`` their signed
    weights, ``rho0 - rho1`` has the same nonzero spectrum as ``G^(1/2) C G^(1/2)``;
    that matrix is similar to ``L^H C L`` for the Cholesky factor ``G = L L^H``,
    which is what gets diagonalized.
    """
    comps = _signed_components(e0, e1)
    if not comps:
        return 0.5
    k = len(comps)
    if k > GRAM_MAX_COMPONENTS:
        raise ValueError(f"Gram oracle supports at most {GRAM_MAX_COMPONENTS} distinct components, got {k}")

    gram = np.eye(k, dtype=complex)
    for i in range(k):
        for j in range(i + 1, k):
            gram[i, j] = overlap(comps[i][0], comps[j][0])
            gram[j, i] = gram[i, j].conjugate()
    smallest = eigenvalues_hermitian(gram, tol).eigenvalues[0]
    if smallest <= GRAM_MIN_EIG:
        raise IllConditionedError(
            f"Gram matrix is nearly singular (smallest eigenvalue {smallest:.3g}); "
            "some components nearly coincide"
        )

    chol = np.linalg.cholesky(gram)
    c = np.array([coef for _, coef in comps])
    reduced = (chol.conj().T * c) @ chol
    reduced = 0.5 * (reduced + reduced.conj().T)
    mus = eigenvalues_hermitian(reduced, tol).eigenvalues
    return _pe_from_trace_norm(math.fsum(np.abs(mus).tolist()))


def gain_record(
    x: float, p: float, pure: DistinguishabilityResult, mixed: DistinguishabilityResult
) -> GainRecord:
    return GainRecord(
        x=float(x),
        p=float(p),
        pe_pure=pure.pe,
        pe_mixed=mixed.pe,
        i_pure=pure.shannon_bits,
        i_mixed=mixed.shannon_bits,
        i_gain=pure.shannon_bits - mixed.shannon_bits,
    )


def information_gain(x: float, p: float, dim: int = PAPER_DIM, tol: float = DEFAULT_TOL) -> GainRecord:
    """How much more an eavesdropper learns from the pure pair than from the mixed pair at ``(x, p)``."""
    pure = probability_of_error(*pure_pair(x, p), dim=dim, tol=tol)
    mixed = probability_of_error(*mixed_pair(x, p), dim=dim, tol=tol)
    return gain_record(x, p, pure, mixed)
