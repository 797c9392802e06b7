"""Base eigenfunctions of infinite-volume Fuchsian groups with flares.

Computes the base Laplacian eigenvalue lambda0 = delta(1 - delta), the
Hausdorff dimension delta of the limit set and the Fourier coefficients of
the base Maass form for infinite-volume Hecke groups and the cover of the
symmetric Schottky reflection groups.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BoundaryError,
    ConditioningError,
    ConfigurationError,
    ConvergenceError,
    CoverageError,
    DegenerateStepError,
    DomainError,
    FlareMaassError,
    NonConvergenceError,
    NonTerminationError,
    NotHyperbolicError,
    PoleError,
    RegressionFailure,
)
from .groups import hecke_new, make_group, schottky_new  # noqa: E402
from .search import (  # noqa: E402
    SearchConfig,
    SearchResult,
    SpectralProblem,
    grid_search,
    hausdorff_from_s,
    secant_search,
)

__all__ = [
    "BoundaryError", "ConditioningError", "ConfigurationError", "ConvergenceError",
    "CoverageError", "DegenerateStepError", "DomainError", "FlareMaassError",
    "NonConvergenceError", "NonTerminationError", "NotHyperbolicError", "PoleError",
    "RegressionFailure", "SearchConfig", "SearchResult", "SpectralProblem",
    "grid_search", "hausdorff_from_s", "hecke_new", "make_group", "schottky_new",
    "secant_search", "__version__",
]
