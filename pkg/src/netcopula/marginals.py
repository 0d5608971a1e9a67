"""Per-variable Gaussianization: ordinal cutpoints and continuous normal scores."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import rankdata

from .types import ORDINAL, DataError, ObservedMatrix


@dataclass(frozen=True)
class ColumnMarginal:
    kind: str
    levels: np.ndarray = None      # sorted original codes (ordinal)
    thresholds: np.ndarray = None  # length K + 1: -inf, t_1, ..., t_{K-1}, +inf
    scores: np.ndarray = None      # latent value per row, NaN where missing (continuous)

    @property
    def n_levels(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class CutpointSet:
    columns: tuple

    def __len__(self):
        return len(self.columns)

    def __getitem__(self, j) -> ColumnMarginal:
        return self.columns[j]


def _ordinal_marginal(col: np.ndarray, name: str) -> ColumnMarginal:
    obs = col[~np.isnan(col)]
    levels, counts = np.unique(obs, return_counts=True)
    cum = np.cumsum(counts)[:-1] / obs.size
    thresholds = np.concatenate(([-np.inf], ndtri(cum), [np.inf]))
    return ColumnMarginal(kind=ORDINAL, levels=levels, thresholds=thresholds)


def normal_scores(col: np.ndarray) -> np.ndarray:
    """Van der Waerden scores Phi^-1(rank / (n_obs + 1)) with average ranks; NaN kept."""
    out = np.full(col.shape, np.nan)
    ok = ~np.isnan(col)
    r = rankdata(col[ok], method="average")
    out[ok] = ndtri(r / (ok.sum() + 1.0))
    return out


def estimate_cutpoints(data: ObservedMatrix) -> CutpointSet:
    cols = []
    for j in range(data.p):
        col = data.values[:, j]
        if np.all(np.isnan(col)):
            raise DataError(f"column {data.var_names[j]!r} is entirely missing")
        if data.var_kinds[j] == ORDINAL:
            cols.append(_ordinal_marginal(col, data.var_names[j]))
        else:
            cols.append(ColumnMarginal(kind=data.var_kinds[j], scores=normal_scores(col)))
    return CutpointSet(tuple(cols))


def latent_interval(cutpoints: CutpointSet, column: int, cell) -> tuple:
    """Latent interval (lower, upper] of an ordinal cell; missing maps to the real line."""
    m = cutpoints[column]
    if m.kind != ORDINAL:
        raise DataError(f"column {column} is not ordinal")
    if cell is None or (isinstance(cell, float) and np.isnan(cell)):
        return -np.inf, np.inf
    k = np.searchsorted(m.levels, cell)
    if k >= m.n_levels or m.levels[k] != cell:
        raise DataError(f"level {cell!r} was not observed in column {column}")
    return float(m.thresholds[k]), float(m.thresholds[k + 1])


@dataclass(frozen=True)
class LatentBounds:
    """Cellwise latent constraints: lower/upper bounds, with fixed cells where lower == upper."""

    lower: np.ndarray
    upper: np.ndarray
    fixed: np.ndarray  # bool; continuous observed cells with a known latent value

    @property
    def shape(self):
        return self.lower.shape


def latent_bounds(data: ObservedMatrix, cutpoints: CutpointSet) -> LatentBounds:
    n, p = data.values.shape
    lower = np.full((n, p), -np.inf)
    upper = np.full((n, p), np.inf)
    fixed = np.zeros((n, p), dtype=bool)
    for j in range(p):
        m = cutpoints[j]
        col = data.values[:, j]
        ok = ~np.isnan(col)
        if m.kind == ORDINAL:
            k = np.searchsorted(m.levels, col[ok])
            if np.any(k >= m.n_levels) or np.any(m.levels[np.minimum(k, m.n_levels - 1)] != col[ok]):
                raise DataError(f"column {data.var_names[j]!r} has levels absent from its cutpoints")
            lower[ok, j] = m.thresholds[k]
            upper[ok, j] = m.thresholds[k + 1]
        else:
            lower[ok, j] = upper[ok, j] = m.scores[ok]
            fixed[ok, j] = True
    return LatentBounds(lower, upper, fixed)
