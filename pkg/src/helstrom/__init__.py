"""Helstrom distinguishability of pure and mixed coherent-state pairs in a truncated Fock basis."""

__version__ = "0.1.0"

from .distinguish import (  # noqa: E402
    DistinguishabilityResult,
    GainRecord,
    IllConditionedError,
    TruncationError,
    gram_subspace_pe,
    information_gain,
    mixed_pair,
    probability_of_error,
    pure_pair,
    pure_pe_analytic,
    shannon_information,
)
from .eig import ConvergenceError, Spectrum, eigenvalues_hermitian, trace_norm  # noqa: E402
from .fock import (  # noqa: E402
    PAPER_DIM,
    CoherentEnsemble,
    Displacement,
    FockVector,
    coherent_fock_vector,
    difference_matrix,
    ensemble_density_matrix,
    overlap,
    suggest_dim,
)
