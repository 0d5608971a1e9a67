"""Ground-truth generators: copula-model ordinal genotypes and RIL populations."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .types import ORDINAL, LinkageMap, ObservedMatrix, PrecisionEstimate

_MAX_CUTOFF_RETRIES = 100


@dataclass(frozen=True)
class SimGenoSpec:
    p: int = 90
    n: int = 200
    k: int = 3
    g: int = 5
    adjacent: int = 3
    alpha: float = 0.1
    beta: float = 0.02
    con_dist: str = "mnorm"
    d: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "con_dist", self.con_dist.lower())
        if self.p < 2 or self.n < 2:
            raise ValueError("need p >= 2 and n >= 2")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if not 1 <= self.g <= self.p:
            raise ValueError("g must lie in [1, p]")
        if self.adjacent < 1:
            raise ValueError("adjacent must be >= 1")
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1):
            raise ValueError("alpha and beta must lie in [0, 1]")
        if self.con_dist not in ("mnorm", "mt"):
            raise ValueError("con_dist must be 'mnorm' or 'mt'")
        if self.con_dist == "mt" and (self.d is None or self.d <= 0):
            raise ValueError("the multivariate t needs positive degrees of freedom d")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SimRilSpec:
    g: int = 5
    d_markers: int = 25
    n: int = 200
    cM: float = 100.0
    selfing: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.g < 1 or self.d_markers < 2 or self.n < 2:
            raise ValueError("need g >= 1, d_markers >= 2, n >= 2")
        if not self.cM > 0:
            raise ValueError("cM must be positive")
        if self.selfing < 1:
            raise ValueError("selfing must be >= 1")

    def to_dict(self):
        return asdict(self)


def group_labels(p: int, g: int) -> np.ndarray:
    """Split p markers into g consecutive groups of p // g, remainder to the last."""
    size = p // g
    labels = np.minimum(np.arange(p) // size, g - 1)
    return labels


def genome_support(spec: SimGenoSpec, rng) -> np.ndarray:
    p = spec.p
    labels = group_labels(p, spec.g)
    adj = np.zeros((p, p), dtype=bool)
    iu, ju = np.triu_indices(p, 1)
    same = labels[iu] == labels[ju]
    band = same & (ju - iu <= spec.adjacent)
    u = rng.random(iu.size)
    extra_intra = same & ~band & (u < spec.alpha)
    inter = ~same & (u < spec.beta)
    keep = band | extra_intra | inter
    adj[iu[keep], ju[keep]] = True
    return adj | adj.T


def genome_precision(adj: np.ndarray, rng) -> np.ndarray:
    p = adj.shape[0]
    iu, ju = np.nonzero(np.triu(adj, 1))
    vals = rng.uniform(0.3, 0.6, size=iu.size) * rng.choice([-1.0, 1.0], size=iu.size)
    theta = np.zeros((p, p))
    theta[iu, ju] = vals
    theta[ju, iu] = vals
    np.fill_diagonal(theta, np.abs(theta).sum(axis=1) + 0.1)
    return theta


def _discretize(z: np.ndarray, k: int, rng) -> np.ndarray:
    lo, hi = np.percentile(z, [5, 95])
    for _ in range(_MAX_CUTOFF_RETRIES):
        cuts = np.sort(rng.uniform(lo, hi, size=k - 1))
        codes = np.searchsorted(cuts, z, side="left")
        if np.unique(codes).size == k:
            return codes
    raise RuntimeError("could not draw cutoffs leaving every level non-empty")


def simgeno(spec: SimGenoSpec):
    """Ordinal data from a Gaussian copula with a genome-like precision matrix.

    Returns
    -------
    data : ObservedMatrix
        n x p ordinal codes in {0, ..., k - 1}.
    truth : PrecisionEstimate
        True precision matrix (unit-variance latent scale).
    """
    rng = np.random.default_rng(spec.seed)
    adj = genome_support(spec, rng)
    theta = genome_precision(adj, rng)
    sigma = np.linalg.inv(theta)
    scale = np.sqrt(np.diag(sigma))
    sigma = sigma / np.outer(scale, scale)
    sigma = 0.5 * (sigma + sigma.T)
    theta = theta * np.outer(scale, scale)
    theta[~adj & ~np.eye(spec.p, dtype=bool)] = 0.0
    chol = np.linalg.cholesky(sigma)
    z = rng.standard_normal((spec.n, spec.p)) @ chol.T
    if spec.con_dist == "mt":
        z = z * np.sqrt(spec.d / rng.chisquare(spec.d, size=spec.n))[:, None]
    codes = np.column_stack([_discretize(z[:, j], spec.k, rng) for j in range(spec.p)])
    data = ObservedMatrix.from_array(codes, ORDINAL, [f"M{j + 1}" for j in range(spec.p)])
    return data, PrecisionEstimate.from_theta(theta, 0.0)


def haldane(distance_cm):
    """Recombination fraction from map distance in centiMorgans."""
    return 0.5 * (1.0 - np.exp(-2.0 * np.asarray(distance_cm, dtype=float) / 100.0))


def _gametes(homologs: np.ndarray, switch_prob: np.ndarray, rng) -> np.ndarray:
    n, _, m = homologs.shape
    start = rng.integers(0, 2, size=n)
    switches = rng.random((n, m - 1)) < switch_prob
    origin = (start[:, None] + np.concatenate(
        [np.zeros((n, 1), dtype=np.int64), np.cumsum(switches, axis=1)], axis=1)) % 2
    return np.take_along_axis(homologs, origin[:, None, :], axis=1)[:, 0, :]


def ril_switch_probabilities(spec: SimRilSpec) -> np.ndarray:
    """Switch probability between consecutive markers; 1/2 across chromosome ends."""
    step = spec.cM / (spec.d_markers - 1)
    within = np.full(spec.d_markers - 1, float(haldane(step)))
    parts = []
    for c in range(spec.g):
        parts.append(within)
        if c < spec.g - 1:
            parts.append(np.array([0.5]))
    return np.concatenate(parts)


def simril(spec: SimRilSpec):
    """Recombinant inbred lines by single-seed descent from an F1.

    Genotype codes count B alleles (0, 1, 2).  Residual heterozygotes keep
    code 1.

    Returns
    -------
    data : ObservedMatrix
    truth : LinkageMap
        One group per chromosome, markers in positional order.
    """
    rng = np.random.default_rng(spec.seed)
    m = spec.g * spec.d_markers
    switch = ril_switch_probabilities(spec)
    homologs = np.zeros((spec.n, 2, m), dtype=np.int8)
    homologs[:, 1, :] = 1
    for _ in range(spec.selfing):
        homologs = np.stack(
            [_gametes(homologs, switch, rng), _gametes(homologs, switch, rng)], axis=1
        )
    codes = homologs.sum(axis=1).astype(float)
    names = [f"C{c + 1}_M{i + 1}" for c in range(spec.g) for i in range(spec.d_markers)]
    data = ObservedMatrix.from_array(codes, ORDINAL, names)
    groups = [tuple(range(c * spec.d_markers, (c + 1) * spec.d_markers)) for c in range(spec.g)]
    return data, LinkageMap(tuple(groups), (), "inbred")
