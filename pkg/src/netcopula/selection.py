"""Penalty grids and information-criterion selection along a regularization path."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .types import LatentMoments, PrecisionEstimate


@dataclass(frozen=True)
class Score:
    loglik: float
    df: int
    aic: float
    ebic: float

    def get(self, criterion: str) -> float:
        return {"aic": self.aic, "ebic": self.ebic}[criterion]


@dataclass(frozen=True)
class PathResult:
    """Estimates along a decreasing penalty grid plus their scores.

    ``estimates[k]`` is None when the fit at ``lambdas[k]`` failed.
    """

    lambdas: tuple
    estimates: tuple
    rbars: tuple
    scores: tuple
    selected: int
    criterion: str = "ebic"
    gamma: float = 0.5
    n: int = 0
    method: str = ""
    traces: tuple = ()
    errors: tuple = ()
    metadata: dict = field(default_factory=dict)

    @property
    def selected_estimate(self) -> PrecisionEstimate:
        return self.estimates[self.selected]

    @property
    def successes(self) -> list:
        return [k for k, e in enumerate(self.estimates) if e is not None]

    def rescore(self, criterion: str = "ebic", gamma: float = 0.5) -> "PathResult":
        scores = tuple(
            None if e is None else score(e, r, self.n, gamma)
            for e, r in zip(self.estimates, self.rbars)
        )
        sel = select_index(scores, criterion)
        return replace(self, scores=scores, selected=sel, criterion=criterion, gamma=gamma)


def make_lambda_grid(initial_corr, n_rho: int = 10, rho_ratio: float = 0.3) -> np.ndarray:
    """n_rho log-spaced values from max |off-diagonal| down to rho_ratio times that."""
    if n_rho < 1:
        raise ValueError("n_rho must be >= 1")
    if not 0 < rho_ratio < 1:
        raise ValueError("rho_ratio must lie in (0, 1)")
    c = np.abs(np.asarray(initial_corr, dtype=float)).copy()
    np.fill_diagonal(c, 0.0)
    lam_max = c.max()
    if not lam_max > 0:
        raise ValueError("degenerate data: all off-diagonal correlations are zero")
    if n_rho == 1:
        return np.array([lam_max])
    return lam_max * rho_ratio ** (np.arange(n_rho) / (n_rho - 1))


def log_likelihood(estimate: PrecisionEstimate, rbar, n: int) -> float:
    """Q-surrogate (n/2)(log|theta| - tr(rbar theta))."""
    rbar = np.asarray(getattr(rbar, "rbar", rbar), dtype=float)
    sign, logdet = np.linalg.slogdet(estimate.theta)
    if sign <= 0:
        return -np.inf
    return 0.5 * n * (logdet - float(np.sum(rbar * estimate.theta)))


def score(estimate: PrecisionEstimate, rbar, n: int, gamma: float = 0.5) -> Score:
    ll = log_likelihood(estimate, rbar, n)
    p = estimate.p
    df = estimate.n_edges
    aic = -2.0 * ll + 2.0 * df
    ebic = -2.0 * ll + df * np.log(n) + 4.0 * gamma * df * np.log(p)
    return Score(float(ll), int(df), float(aic), float(ebic))


def select_index(scores, criterion: str = "ebic") -> int:
    """argmin of the criterion over successful fits; ties go to the larger penalty."""
    vals = np.array([np.inf if s is None else s.get(criterion) for s in scores])
    if not np.isfinite(vals).any():
        raise RuntimeError("no successful fit on the path")
    return int(np.argmin(vals))


def selectnet(path: PathResult, criterion: Optional[str] = None, gamma: Optional[float] = None):
    """Estimate at the information-criterion optimum of a path."""
    criterion = criterion or path.criterion
    gamma = path.gamma if gamma is None else gamma
    if not path.successes:
        raise RuntimeError("all fits on the path failed")
    if criterion != path.criterion or gamma != path.gamma:
        path = path.rescore(criterion, gamma)
    return path.estimates[path.selected]


def build_path(lambdas, estimates, rbars, n, criterion="ebic", gamma=0.5, **kwargs) -> PathResult:
    scores = tuple(
        None if e is None else score(e, r, n, gamma) for e, r in zip(estimates, rbars)
    )
    if all(s is None for s in scores):
        raise RuntimeError("all fits on the path failed")
    return PathResult(
        lambdas=tuple(float(x) for x in lambdas),
        estimates=tuple(estimates),
        rbars=tuple(rbars),
        scores=scores,
        selected=select_index(scores, criterion),
        criterion=criterion,
        gamma=gamma,
        n=int(n),
        **kwargs,
    )
