"""Linkage maps from a selected network: group detection and marker ordering."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import shortest_path

from .fit import fit_network
from .selection import PathResult, selectnet
from .types import ORDINAL, FitConfig, LinkageMap, ObservedMatrix, PrecisionEstimate

DEFAULT_MIN_M = 5


class MapError(RuntimeError):
    pass


def support_graph(estimate: PrecisionEstimate) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(estimate.p))
    for i, j in sorted(estimate.edges):
        g.add_edge(i, j, weight=abs(float(estimate.partial_cor[i, j])))
    return g


def detect_groups(estimate: PrecisionEstimate, min_m: int = DEFAULT_MIN_M, use_community: bool = False):
    """Linkage groups as connected components (or modularity communities).

    Returns ``(groups, dropped)``: groups are sorted lists of marker indices
    ordered by their smallest member; groups with fewer than ``min_m``
    markers are moved to ``dropped``.
    """
    if estimate.n_edges == 0:
        raise MapError("the selected network has no edges; increase data or lower lambda")
    g = support_graph(estimate)
    if use_community:
        parts = nx.community.greedy_modularity_communities(g, weight="weight")
    else:
        parts = nx.connected_components(g)
    parts = sorted((sorted(int(m) for m in c) for c in parts), key=lambda c: c[0])
    groups = [c for c in parts if len(c) >= min_m]
    dropped = sorted(m for c in parts if len(c) < min_m for m in c)
    return groups, dropped


def bandwidth(adjacency, order=None) -> int:
    """max |pos(i) - pos(j)| over the edges of ``adjacency`` under ``order``."""
    a = np.asarray(adjacency, dtype=bool)
    p = a.shape[0]
    order = np.arange(p) if order is None else np.asarray(order)
    pos = np.empty(p, dtype=int)
    pos[order] = np.arange(p)
    i, j = np.nonzero(np.triu(a, 1))
    return int(np.abs(pos[i] - pos[j]).max()) if i.size else 0


def _bfs_levels(nbrs, start, allowed):
    level = {start: 0}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if v in allowed and v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    return level


def pseudo_peripheral_node(nbrs, component, degree):
    """George-Liu style double sweep: move to a min-degree node of the last BFS level
    until the eccentricity stops growing."""
    start = min(component, key=lambda v: (degree[v], v))
    levels = _bfs_levels(nbrs, start, component)
    ecc = max(levels.values())
    while True:
        last = [v for v, l in levels.items() if l == ecc]
        cand = min(last, key=lambda v: (degree[v], v))
        cand_levels = _bfs_levels(nbrs, cand, component)
        cand_ecc = max(cand_levels.values())
        if cand_ecc <= ecc:
            return start
        start, levels, ecc = cand, cand_levels, cand_ecc


def order_rcm(adjacency) -> list:
    """Reverse Cuthill-McKee permutation of a (group) adjacency matrix.

    The RCM order is polished by :func:`refine_bandwidth`.  Falls back to the input order when that already has a smaller bandwidth.
    """
    a = np.asarray(adjacency, dtype=bool)
    p = a.shape[0]
    a = (a | a.T) & ~np.eye(p, dtype=bool)
    degree = a.sum(axis=1)
    nbrs = [sorted(np.nonzero(a[v])[0].tolist(), key=lambda u: (degree[u], u)) for v in range(p)]
    remaining = set(range(p))
    order = []
    while remaining:
        comp = set(_bfs_levels(nbrs, min(remaining, key=lambda v: (degree[v], v)), remaining))
        start = pseudo_peripheral_node(nbrs, comp, degree)
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in nbrs[u]:
                if v in comp and v not in seen:
                    seen.add(v)
                    queue.append(v)
        remaining -= comp
    order = refine_bandwidth(a, order[::-1])
    if bandwidth(a, order) > bandwidth(a):
        return list(range(p))
    return order


def _band_key(i, j, pos):
    d = np.abs(pos[i] - pos[j])
    bw = int(d.max()) if d.size else 0
    return bw, int(np.count_nonzero(d == bw)), int(d.sum())


def refine_bandwidth(adjacency, order, max_passes=50) -> list:
    """Pairwise-swap descent on (bandwidth, edges at bandwidth, total span).

    Plain RCM leaves hubs near one end (a star keeps its centre next to
    the last leaf); swapping positions repairs that without ever making the
    ordering worse.
    """
    a = np.asarray(adjacency, dtype=bool)
    p = a.shape[0]
    i, j = np.nonzero(np.triu(a, 1))
    pos = np.empty(p, dtype=int)
    pos[np.asarray(order, dtype=int)] = np.arange(p)
    best = _band_key(i, j, pos)
    for _ in range(max_passes):
        improved = False
        for u in range(p):
            for v in range(u + 1, p):
                pos[u], pos[v] = pos[v], pos[u]
                key = _band_key(i, j, pos)
                if key < best:
                    best, improved = key, True
                else:
                    pos[u], pos[v] = pos[v], pos[u]
        if not improved:
            break
    return np.argsort(pos).tolist()


def classical_mds(dist: np.ndarray, ndim: int = 1) -> np.ndarray:
    """Torgerson scaling: coordinates from the top eigenvectors of -J D^2 J / 2."""
    n = dist.shape[0]
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ (dist ** 2) @ j
    evals, evecs = np.linalg.eigh(0.5 * (b + b.T))
    idx = np.argsort(evals)[::-1][:ndim]
    return evecs[:, idx] * np.sqrt(np.maximum(evals[idx], 0.0))


def geodesic_distances(estimate: PrecisionEstimate, members) -> np.ndarray:
    """1 - |partial correlation| on edges, completed by shortest paths."""
    members = list(members)
    pc = np.abs(estimate.partial_cor[np.ix_(members, members)])
    adj = estimate.adjacency()[np.ix_(members, members)]
    w = np.where(adj, np.maximum(1.0 - pc, 1e-12), 0.0)
    np.fill_diagonal(w, 0.0)
    d = shortest_path(w, method="D", directed=False)
    if np.isinf(d).any():
        raise MapError("marker group is not connected")
    return d


def order_mds(estimate: PrecisionEstimate, members) -> list:
    """Order a connected group by its first classical-MDS coordinate.

    The orientation is fixed so that the smallest marker index comes before
    the largest one.
    """
    members = list(members)
    if len(members) < 2:
        raise MapError("MDS ordering needs at least two markers")
    coord = classical_mds(geodesic_distances(estimate, members), 1)[:, 0]
    order = [members[k] for k in np.argsort(coord, kind="stable")]
    if order.index(min(members)) > order.index(max(members)):
        order.reverse()
    return order


def order_group(estimate: PrecisionEstimate, members, cross_kind: str) -> list:
    members = list(members)
    if cross_kind == "inbred":
        return order_mds(estimate, members)
    adj = estimate.adjacency()[np.ix_(members, members)]
    return [members[k] for k in order_rcm(adj)]


@dataclass(frozen=True)
class NetMapResult:
    map: LinkageMap
    path: PathResult
    estimate: PrecisionEstimate
    kept: tuple
    n: int
    levels: tuple
    names: tuple

    def summary_lines(self) -> list:
        sizes = " ".join(str(len(g)) for g in self.map.groups)
        levels = " ".join(str(v) for v in self.levels)
        return [
            f"Number of linkage groups: {len(self.map.groups)}",
            f"Number of markers per linkage group: {sizes}",
            f"Total number of markers in the linkage map: {self.map.n_markers}.",
            f"({len(self.map.dropped)} markers removed from the input genotype data)",
            f"Number of sample size: n = {self.n}",
            f"Number of categories in data: {len(self.levels)} ( {levels} )",
        ]

    def summary(self) -> str:
        return "\n".join(self.summary_lines())


def netmap(data: ObservedMatrix, cross_kind: str = "inbred", config: FitConfig = None,
           min_m: int = DEFAULT_MIN_M, use_community: bool = False) -> NetMapResult:
    """Fit a path, select a network, detect linkage groups and order markers."""
    if cross_kind not in ("inbred", "outbred"):
        raise ValueError("cross_kind must be 'inbred' or 'outbred'")
    if any(k != ORDINAL for k in data.var_kinds):
        raise ValueError("netmap expects ordinal genotype data")
    config = config or FitConfig(method="approx")
    path, reduced, kept, dropped = fit_network(data, config)
    estimate = selectnet(path)
    groups, small = detect_groups(estimate, min_m, use_community)
    ordered = [[kept[m] for m in order_group(estimate, g, cross_kind)] for g in groups]
    all_dropped = sorted(list(dropped) + [kept[m] for m in small])
    obs = data.values[~np.isnan(data.values)]
    levels = tuple(int(v) for v in np.unique(obs))
    lmap = LinkageMap(tuple(tuple(g) for g in ordered), tuple(all_dropped), cross_kind)
    return NetMapResult(lmap, path, estimate, tuple(kept), data.n, levels, data.var_names)


def ordered_adjacency(result: NetMapResult) -> tuple:
    """Selected adjacency (original column indices) permuted into map order."""
    order = result.map.marker_order()
    pos = {orig: k for k, orig in enumerate(result.kept)}
    local = [pos[m] for m in order]
    adj = result.estimate.adjacency()[np.ix_(local, local)].astype(int)
    return [result.names[m] for m in order], adj
