"""Shared data model: observed data, latent moments, precision estimates, configs."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

ORDINAL = "ordinal"
CONTINUOUS = "continuous"
_KINDS = (ORDINAL, CONTINUOUS)

# Absolute floor used in addition to the relative edge threshold.
_EDGE_RELATIVE = 1e-6


class DataError(ValueError):
    """Raised when observed data cannot be used by the estimators."""


@dataclass(frozen=True)
class ObservedMatrix:
    """n x p table of ordinal codes and/or continuous values.

    Missing cells are stored as NaN. Ordinal codes are kept as their
    original (float-typed) integer values; only their rank order is used.
    """

    values: np.ndarray
    var_kinds: tuple
    var_names: tuple

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError("values must be a 2-D array")
        n, p = values.shape
        kinds = tuple(self.var_kinds)
        names = tuple(str(s) for s in self.var_names)
        if len(kinds) != p or len(names) != p:
            raise DataError(f"expected {p} kinds and names, got {len(kinds)} and {len(names)}")
        bad = [k for k in kinds if k not in _KINDS]
        if bad:
            raise DataError(f"unknown variable kinds: {sorted(set(bad))}")
        if len(set(names)) != p:
            raise DataError("variable names must be unique")
        if n < 2 or p < 2:
            raise DataError(f"need n >= 2 and p >= 2, got n={n}, p={p}")
        for j, kind in enumerate(kinds):
            col = values[:, j]
            obs = col[~np.isnan(col)]
            if kind == ORDINAL and np.any(obs != np.round(obs)):
                raise DataError(f"ordinal column {names[j]!r} has non-integer codes")
            if np.any(np.isinf(obs)):
                raise DataError(f"column {names[j]!r} has infinite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "var_kinds", kinds)
        object.__setattr__(self, "var_names", names)

    @classmethod
    def from_array(cls, values, kinds=None, names=None) -> "ObservedMatrix":
        values = np.asarray(values, dtype=float)
        p = values.shape[1]
        if kinds is None:
            kinds = [ORDINAL] * p
        elif isinstance(kinds, str):
            kinds = [kinds] * p
        if names is None:
            names = [f"V{j + 1}" for j in range(p)]
        return cls(values, tuple(kinds), tuple(names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.values)

    def ordinal_mask(self) -> np.ndarray:
        return np.array([k == ORDINAL for k in self.var_kinds])

    def select_columns(self, cols: Sequence[int]) -> "ObservedMatrix":
        cols = list(cols)
        return ObservedMatrix(
            self.values[:, cols],
            tuple(self.var_kinds[j] for j in cols),
            tuple(self.var_names[j] for j in cols),
        )

    def __eq__(self, other):
        if not isinstance(other, ObservedMatrix):
            return NotImplemented
        return (
            self.var_kinds == other.var_kinds
            and self.var_names == other.var_names
            and self.values.shape == other.values.shape
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    __hash__ = None


@dataclass(frozen=True)
class ColumnReport:
    name: str
    kind: str
    n_observed: int
    missing_rate: float
    levels: tuple  # sorted distinct observed values (ordinal columns only)
    counts: tuple

    @property
    def n_levels(self) -> int:
        return len(self.levels) if self.kind == ORDINAL else len(self.counts)

    @property
    def droppable(self) -> bool:
        return self.n_levels < 2


@dataclass(frozen=True)
class ValidationReport:
    columns: tuple

    @property
    def droppable(self) -> list:
        """Indices of columns with fewer than two distinct observed values."""
        return [j for j, c in enumerate(self.columns) if c.droppable]

    @property
    def constant(self) -> list:
        return [j for j, c in enumerate(self.columns) if c.n_levels == 1]

    @property
    def ok(self) -> bool:
        return not self.droppable

    def summary_lines(self) -> list:
        lines = []
        for c in self.columns:
            flag = "  DROP" if c.droppable else ""
            lines.append(
                f"{c.name}\t{c.kind}\tlevels={c.n_levels}\tmissing={c.missing_rate:.3f}{flag}"
            )
        return lines


def validate(data: ObservedMatrix) -> ValidationReport:
    """Per-column level counts, missing rates and droppable (constant) columns."""
    reports = []
    for j in range(data.p):
        col = data.values[:, j]
        obs = col[~np.isnan(col)]
        levels, counts = np.unique(obs, return_counts=True)
        kind = data.var_kinds[j]
        reports.append(
            ColumnReport(
                name=data.var_names[j],
                kind=kind,
                n_observed=int(obs.size),
                missing_rate=float(1.0 - obs.size / data.n),
                levels=tuple(int(v) for v in levels) if kind == ORDINAL else (),
                counts=tuple(int(c) for c in counts),
            )
        )
    return ValidationReport(tuple(reports))


def drop_invalid(data: ObservedMatrix, report: Optional[ValidationReport] = None):
    """Remove columns with < 2 observed levels, warning about each.

    Returns ``(reduced_data, kept_indices, dropped_indices)``.
    """
    if report is None:
        report = validate(data)
    dropped = report.droppable
    if not dropped:
        return data, list(range(data.p)), []
    for j in dropped:
        warnings.warn(
            f"dropping column {data.var_names[j]!r}: fewer than 2 observed levels",
            stacklevel=2,
        )
    kept = [j for j in range(data.p) if j not in set(dropped)]
    if len(kept) < 2:
        raise DataError("fewer than 2 usable columns remain after dropping constant columns")
    return data.select_columns(kept), kept, dropped


def psd_repair(mat: np.ndarray, floor: float = 1e-8) -> np.ndarray:
    """Symmetrize, clamp eigenvalues at ``floor`` if needed, rescale to unit diagonal."""
    m = 0.5 * (np.asarray(mat, dtype=float) + np.asarray(mat, dtype=float).T)
    evals, evecs = np.linalg.eigh(m)
    if evals[0] < floor:
        evals = np.maximum(evals, floor)
        m = (evecs * evals) @ evecs.T
        m = 0.5 * (m + m.T)
    d = np.sqrt(np.diag(m))
    m = m / np.outer(d, d)
    np.fill_diagonal(m, 1.0)
    return m


@dataclass(frozen=True)
class LatentMoments:
    """Averaged conditional second-moment matrix of the latent Gaussian."""

    rbar: np.ndarray
    method_tag: str

    def __post_init__(self):
        r = np.array(self.rbar, dtype=float)
        r.setflags(write=False)
        object.__setattr__(self, "rbar", r)

    def check(self, tol: float = 1e-8) -> None:
        r = self.rbar
        assert np.allclose(r, r.T, atol=1e-12), "rbar not symmetric"
        assert np.all(np.diag(r) > 0), "rbar diagonal not positive"
        assert np.linalg.eigvalsh(r)[0] >= -tol, "rbar not PSD"


def edge_support(theta: np.ndarray, relative: float = _EDGE_RELATIVE) -> np.ndarray:
    """Boolean off-diagonal support mask: |theta_ij| > relative * max off-diag |theta|."""
    off = np.abs(theta).copy()
    np.fill_diagonal(off, 0.0)
    top = off.max() if off.size else 0.0
    if top == 0.0:
        return np.zeros_like(off, dtype=bool)
    return off > relative * top


@dataclass(frozen=True)
class PrecisionEstimate:
    theta: np.ndarray
    sigma: np.ndarray
    lam: float
    edges: frozenset = field(default_factory=frozenset)
    partial_cor: np.ndarray = None

    @classmethod
    def from_theta(cls, theta: np.ndarray, lam: float) -> "PrecisionEstimate":
        theta = 0.5 * (np.asarray(theta, dtype=float) + np.asarray(theta, dtype=float).T)
        sigma = np.linalg.inv(theta)
        sigma = 0.5 * (sigma + sigma.T)
        support = edge_support(theta)
        iu, ju = np.nonzero(np.triu(support, 1))
        edges = frozenset(zip(iu.tolist(), ju.tolist()))
        d = np.sqrt(np.diag(theta))
        pc = -theta / np.outer(d, d)
        pc[~support] = 0.0
        np.fill_diagonal(pc, 1.0)
        for a in (theta, sigma, pc):
            a.setflags(write=False)
        return cls(theta=theta, sigma=sigma, lam=float(lam), edges=edges, partial_cor=pc)

    @property
    def p(self) -> int:
        return self.theta.shape[0]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.p, self.p), dtype=bool)
        for i, j in self.edges:
            a[i, j] = a[j, i] = True
        return a

    def check(self) -> None:
        """Assert the structural invariants of a precision estimate."""
        t = self.theta
        assert np.array_equal(t, t.T), "theta not symmetric"
        assert np.linalg.eigvalsh(t)[0] > 1e-8, "theta not positive definite"
        err = np.abs(t @ self.sigma - np.eye(self.p)).max()
        assert err <= 1e-6, f"theta @ sigma deviates from identity by {err:.2e}"
        assert np.all(np.diag(self.partial_cor) == 1.0)
        support = edge_support(t)
        assert self.edges == frozenset(
            (i, j) for i, j in zip(*np.nonzero(np.triu(support, 1)))
        ), "edge set does not match theta support"


@dataclass(frozen=True)
class FitConfig:
    """Options shared by the network fitters."""

    method: str = "gibbs"
    rho_grid: Optional[tuple] = None
    n_rho: int = 10
    rho_ratio: float = 0.3
    em_iter: int = 5
    em_tol: float = 1e-3
    penalty: str = "l1"
    scad_a: float = 3.7
    gibbs_samples: int = 1000
    gibbs_burnin: int = 100
    ncores: object = "all"
    seed: int = 0
    criterion: str = "ebic"
    gamma: float = 0.5
    em_init: str = "identity"

    def __post_init__(self):
        if self.method not in ("gibbs", "approx", "npn"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.penalty not in ("l1", "scad"):
            raise ValueError(f"unknown penalty {self.penalty!r}")
        if self.rho_grid is not None:
            grid = tuple(float(r) for r in self.rho_grid)
            if not grid or any(r <= 0 for r in grid):
                raise ValueError("rho values must be positive")
            if any(b >= a for a, b in zip(grid, grid[1:])):
                raise ValueError("rho values must be strictly decreasing")
            object.__setattr__(self, "rho_grid", grid)
        if self.n_rho < 1:
            raise ValueError("n_rho must be >= 1")
        if not 0 < self.rho_ratio < 1:
            raise ValueError("rho_ratio must lie in (0, 1)")
        if self.em_iter < 1:
            raise ValueError("em_iter must be >= 1")
        if self.scad_a <= 1:
            raise ValueError("scad_a must exceed 1")
        if self.gibbs_samples < 1 or self.gibbs_burnin < 0:
            raise ValueError("invalid Gibbs sample sizes")
        if self.criterion not in ("ebic", "aic"):
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.em_init not in ("identity", "skeptic"):
            raise ValueError(f"unknown em_init {self.em_init!r}")


@dataclass(frozen=True)
class LinkageMap:
    groups: tuple  # tuple of tuples of marker indices, in map order
    dropped: tuple
    cross_kind: str

    def __post_init__(self):
        if self.cross_kind not in ("inbred", "outbred"):
            raise ValueError(f"unknown cross kind {self.cross_kind!r}")
        object.__setattr__(self, "groups", tuple(tuple(int(m) for m in g) for g in self.groups))
        object.__setattr__(self, "dropped", tuple(sorted(int(m) for m in self.dropped)))
        seen = [m for g in self.groups for m in g] + list(self.dropped)
        if len(seen) != len(set(seen)):
            raise ValueError("linkage groups and dropped markers must be disjoint")

    @property
    def n_markers(self) -> int:
        return sum(len(g) for g in self.groups)

    def marker_order(self) -> list:
        return [m for g in self.groups for m in g]
