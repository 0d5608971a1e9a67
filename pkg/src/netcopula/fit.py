"""Front door for network estimation: validation, then the chosen method's path."""
from __future__ import annotations

from .em import em_fit_path
from .npn import npn_fit
from .types import FitConfig, ObservedMatrix, drop_invalid, validate


def fit_path(data: ObservedMatrix, config: FitConfig):
    """Regularization path for already-validated data."""
    if config.method == "npn":
        return npn_fit(data, config)
    return em_fit_path(data, config)


def fit_network(data: ObservedMatrix, config: FitConfig):
    """Drop unusable columns, then fit.

    Returns ``(path, reduced_data, kept, dropped)`` with column indices
    relative to ``data``.
    """
    reduced, kept, dropped = drop_invalid(data, validate(data))
    return fit_path(reduced, config), reduced, kept, dropped
