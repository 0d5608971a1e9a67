"""File exports: edge lists, GraphML/DOT graphs, path summaries and maps."""
from __future__ import annotations

import json
from pathlib import Path

import networkx as nx
import numpy as np

from .selection import PathResult, build_path
from .types import PrecisionEstimate

PATH_JSON = "path.json"
PATH_NPZ = "path.npz"


def edge_rows(estimate: PrecisionEstimate, names):
    """(source, target, theta, partial_cor) tuples, strongest |partial_cor| first."""
    rows = [
        (names[i], names[j], float(estimate.theta[i, j]), float(estimate.partial_cor[i, j]))
        for i, j in sorted(estimate.edges)
    ]
    rows.sort(key=lambda r: -abs(r[3]))
    return rows


def write_edges_tsv(estimate: PrecisionEstimate, names, path) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        fh.write("source_name\ttarget_name\ttheta\tpartial_cor\n")
        for s, t, th, pc in edge_rows(estimate, names):
            fh.write(f"{s}\t{t}\t{th!r}\t{pc!r}\n")
    return path


def read_edges_tsv(path) -> list:
    with open(path) as fh:
        next(fh)
        out = []
        for line in fh:
            s, t, th, pc = line.rstrip("\n").split("\t")
            out.append((s, t, float(th), float(pc)))
    return out


def to_networkx(estimate: PrecisionEstimate, names) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(names)
    for s, t, th, pc in edge_rows(estimate, names):
        g.add_edge(s, t, weight=pc, theta=th)
    return g


def write_graphml(estimate: PrecisionEstimate, names, path) -> Path:
    nx.write_graphml(to_networkx(estimate, names), str(path))
    return Path(path)


def _dot_id(name: str) -> str:
    return '"' + str(name).replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_dot(estimate: PrecisionEstimate, names, path) -> Path:
    lines = ["graph network {"]
    lines += [f"  {_dot_id(n)};" for n in names]
    for s, t, _, pc in edge_rows(estimate, names):
        lines.append(f"  {_dot_id(s)} -- {_dot_id(t)} [weight={pc!r}, label=\"{pc:.3f}\"];")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")
    return Path(path)


def _finite(x):
    if x is None:
        return None
    x = float(x)
    return x if np.isfinite(x) else None


def path_summary(path: PathResult, names) -> dict:
    """JSON-ready description of a path: per-lambda scores, df and KKT residuals."""
    kkt = path.metadata.get("kkt_residual") or [None] * len(path.lambdas)
    fits = []
    for k, lam in enumerate(path.lambdas):
        entry = {"index": k, "lambda": lam, "status": "ok" if path.estimates[k] is not None else "failed"}
        s = path.scores[k]
        if s is not None:
            entry.update(df=s.df, loglik=_finite(s.loglik), aic=_finite(s.aic), ebic=_finite(s.ebic),
                         kkt_residual=_finite(kkt[k]))
        else:
            entry["error"] = path.errors[k] if path.errors else None
        if path.traces and path.traces[k] is not None:
            entry["em"] = {"iterations": path.traces[k].iterations, **path.traces[k].to_dict()}
        fits.append(entry)
    meta = {k: v for k, v in path.metadata.items() if k != "kkt_residual"}
    return {
        "method": path.method,
        "criterion": path.criterion,
        "gamma": path.gamma,
        "n": path.n,
        "p": len(names),
        "names": list(names),
        "selected": path.selected,
        "selected_lambda": path.lambdas[path.selected],
        "fits": fits,
        "metadata": meta,
    }


def write_json(obj, path) -> Path:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=False) + "\n")
    return Path(path)


def save_path_arrays(path: PathResult, out) -> Path:
    """theta and rbar per lambda (NaN for failed fits) so a path can be re-scored."""
    p = next(e for e in path.estimates if e is not None).p
    thetas = np.full((len(path.lambdas), p, p), np.nan)
    rbars = np.full_like(thetas, np.nan)
    for k, (e, r) in enumerate(zip(path.estimates, path.rbars)):
        if e is not None:
            thetas[k] = e.theta
            rbars[k] = r
    np.savez(out, lambdas=np.array(path.lambdas), thetas=thetas, rbars=rbars)
    return Path(out)


def load_path(directory, criterion="ebic", gamma=0.5):
    """Rebuild a PathResult from ``path.json`` + ``path.npz`` and score it."""
    directory = Path(directory)
    summary = json.loads((directory / PATH_JSON).read_text())
    arrays = np.load(directory / PATH_NPZ)
    estimates, rbars = [], []
    for lam, theta, rbar in zip(arrays["lambdas"], arrays["thetas"], arrays["rbars"]):
        if np.isnan(theta).any():
            estimates.append(None)
            rbars.append(None)
        else:
            estimates.append(PrecisionEstimate.from_theta(theta, float(lam)))
            rbars.append(rbar)
    kkt = [f.get("kkt_residual") for f in summary["fits"]]
    errors = tuple(f.get("error") for f in summary["fits"])
    meta = dict(summary.get("metadata", {}), kkt_residual=kkt)
    path = build_path(arrays["lambdas"], estimates, rbars, summary["n"], criterion, gamma,
                      method=summary["method"], errors=errors, metadata=meta)
    return path, summary


def write_selected(path: PathResult, names, out) -> dict:
    """selected.tsv, selected.graphml and selected.dot for the selected estimate."""
    out = Path(out)
    est = path.selected_estimate
    write_edges_tsv(est, names, out / "selected.tsv")
    write_graphml(est, names, out / "selected.graphml")
    write_dot(est, names, out / "selected.dot")
    return {"selected": path.selected, "lambda": path.lambdas[path.selected], "edges": est.n_edges}


def write_path(path: PathResult, names, out, summary_extra=None) -> dict:
    """Everything a fit produces: path.json/npz, per-lambda edge lists, selected graph."""
    out = Path(out)
    (out / "edges").mkdir(parents=True, exist_ok=True)
    for k, est in enumerate(path.estimates):
        if est is not None:
            write_edges_tsv(est, names, out / "edges" / f"lambda_{k:02d}.tsv")
    summary = path_summary(path, names)
    if summary_extra:
        summary.update(summary_extra)
    write_json(summary, out / PATH_JSON)
    save_path_arrays(path, out / PATH_NPZ)
    write_selected(path, names, out)
    return summary


def write_ordered_adjacency(names, adjacency, path) -> Path:
    with open(path, "w") as fh:
        fh.write("marker\t" + "\t".join(names) + "\n")
        for name, row in zip(names, np.asarray(adjacency, dtype=int)):
            fh.write(name + "\t" + "\t".join(str(v) for v in row) + "\n")
    return Path(path)
