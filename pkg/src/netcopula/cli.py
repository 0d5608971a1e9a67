"""Command-line interface: simulate, fit, map and re-select networks."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .export import (
    edge_rows, load_path, write_json, write_ordered_adjacency, write_path, write_selected,
)
from .fit import fit_network
from .io import read_csv, write_csv
from .linkage import MapError, netmap, ordered_adjacency
from .simulate import SimGenoSpec, SimRilSpec, simgeno, simril
from .types import DataError, FitConfig, ObservedMatrix

log = logging.getLogger("netcopula")


def _ncores(value: str):
    if value.lower() == "all":
        return "all"
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("ncores must be a positive integer or 'all'") from None
    if k < 1:
        raise argparse.ArgumentTypeError("ncores must be >= 1")
    return k


def _positive_float(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _add_fit_flags(sp, method_default):
    sp.add_argument("data", type=Path, help="input CSV (header row, one row per individual)")
    sp.add_argument("--out", type=Path, required=True, help="output directory")
    sp.add_argument("--method", choices=["gibbs", "approx", "npn"], default=method_default)
    sp.add_argument("--rho", type=_positive_float, nargs="+", help="explicit decreasing lambda values")
    sp.add_argument("--n-rho", type=int, default=10)
    sp.add_argument("--rho-ratio", type=float, default=0.3)
    sp.add_argument("--penalty", choices=["l1", "scad"], default="l1")
    sp.add_argument("--scad-a", type=float, default=3.7)
    sp.add_argument("--em-iter", type=int, default=5)
    sp.add_argument("--em-tol", type=float, default=1e-3)
    sp.add_argument("--em-init", choices=["identity", "skeptic"], default="identity")
    sp.add_argument("--gibbs-samples", type=int, default=1000)
    sp.add_argument("--gibbs-burnin", type=int, default=100)
    sp.add_argument("--criterion", choices=["ebic", "aic"], default="ebic")
    sp.add_argument("--gamma", type=float, default=0.5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--ncores", type=_ncores, default=None,
                    help="worker threads or 'all' (default: $NETCOPULA_NCORES, else all)")
    sp.add_argument("--kinds", type=Path, help="JSON mapping column name -> ordinal|continuous")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netcopula", description=__doc__)
    parser.add_argument("--version", action="version", version=f"netcopula {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simgeno", help="simulate ordinal data from a genome-like copula model")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--g", type=int, default=5)
    sp.add_argument("--adjacent", type=int, default=3)
    sp.add_argument("--alpha", type=float, default=0.1)
    sp.add_argument("--beta", type=float, default=0.02)
    sp.add_argument("--con-dist", choices=["mnorm", "mt"], type=str.lower, default="mnorm")
    sp.add_argument("--d", type=float, default=None, help="t degrees of freedom (with --con-dist mt)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, required=True)

    sp = sub.add_parser("simril", help="simulate recombinant inbred line genotypes")
    sp.add_argument("--g", type=int, default=5)
    sp.add_argument("--d", type=int, default=25, dest="d_markers", help="markers per chromosome")
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--cM", type=float, default=100.0)
    sp.add_argument("--selfing", type=int, default=2)
    sp.add_argument("--shuffle", action="store_true", help="permute marker columns")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, required=True)

    _add_fit_flags(sub.add_parser("fit", help="fit a regularization path and select a network"), "gibbs")

    sp = sub.add_parser("map", help="build a linkage map from genotype data")
    _add_fit_flags(sp, "approx")
    sp.add_argument("--cross", choices=["inbred", "outbred"], required=True)
    sp.add_argument("--min-m", type=int, default=5)
    sp.add_argument("--use-community", action="store_true")

    sp = sub.add_parser("select", help="re-score an existing path without refitting")
    sp.add_argument("path", type=Path, help="directory written by 'fit' or 'map'")
    sp.add_argument("--criterion", choices=["ebic", "aic"], default="ebic")
    sp.add_argument("--gamma", type=float, default=0.5)
    return parser


def _config(args) -> FitConfig:
    return FitConfig(
        method=args.method, rho_grid=tuple(args.rho) if args.rho else None, n_rho=args.n_rho,
        rho_ratio=args.rho_ratio, em_iter=args.em_iter, em_tol=args.em_tol, penalty=args.penalty,
        scad_a=args.scad_a, gibbs_samples=args.gibbs_samples, gibbs_burnin=args.gibbs_burnin,
        ncores=args.ncores, seed=args.seed, criterion=args.criterion, gamma=args.gamma,
        em_init=args.em_init,
    )


def _run_meta(command, **extra) -> dict:
    return {"command": command, "version": __version__, "argv": sys.argv[1:], **extra}


def cmd_simgeno(args):
    spec = SimGenoSpec(args.p, args.n, args.k, args.g, args.adjacent, args.alpha, args.beta,
                       args.con_dist, args.d, args.seed)
    data, truth = simgeno(spec)
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(data, args.out / "data.csv")
    names = data.var_names
    write_json({
        "edges": [{"source": s, "target": t, "theta": th, "partial_cor": pc}
                  for s, t, th, pc in edge_rows(truth, names)],
        "theta": truth.theta.tolist(),
        "names": list(names),
    }, args.out / "truth.json")
    write_json(_run_meta("simgeno", seed=spec.seed, spec=spec.to_dict()), args.out / "metadata.json")
    return 0


def cmd_simril(args):
    spec = SimRilSpec(args.g, args.d_markers, args.n, args.cM, args.selfing, args.seed)
    data, truth = simril(spec)
    order = np.arange(data.p)
    if args.shuffle:
        order = np.random.default_rng([spec.seed, 1]).permutation(data.p)
        data = data.select_columns(order)
    names = list(data.var_names)
    original = simril_names(spec)
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(data, args.out / "data.csv")
    write_json({
        "groups": [[original[m] for m in g] for g in truth.groups],
        "positions_cM": {original[m]: float(k * spec.cM / (spec.d_markers - 1))
                         for g in truth.groups for k, m in enumerate(g)},
        "column_order": names,
    }, args.out / "truth_map.json")
    write_json(_run_meta("simril", seed=spec.seed, spec=spec.to_dict(), shuffled=args.shuffle),
               args.out / "metadata.json")
    return 0


def simril_names(spec: SimRilSpec):
    return [f"C{c + 1}_M{i + 1}" for c in range(spec.g) for i in range(spec.d_markers)]


def _load(args) -> ObservedMatrix:
    return read_csv(args.data, kinds=args.kinds)


def _fit_meta(command, args, config, data, kept, dropped, elapsed) -> dict:
    cfg = asdict(config)
    return _run_meta(
        command,
        config=cfg,
        input=str(args.data),
        n=data.n,
        p=data.p,
        var_kinds=dict(zip(data.var_names, data.var_kinds)),
        kept=[data.var_names[j] for j in kept],
        dropped=[data.var_names[j] for j in dropped],
        elapsed_seconds=round(elapsed, 3),
    )


def cmd_fit(args):
    config = _config(args)
    data = _load(args)
    t0 = time.perf_counter()
    path, reduced, kept, dropped = fit_network(data, config)
    args.out.mkdir(parents=True, exist_ok=True)
    summary = write_path(path, reduced.var_names, args.out)
    write_json(_fit_meta("fit", args, config, data, kept, dropped, time.perf_counter() - t0),
               args.out / "metadata.json")
    sel = summary["fits"][path.selected]
    print(f"selected lambda={sel['lambda']:.4g} ({sel['df']} edges) by {path.criterion}")
    return 0


def cmd_map(args):
    config = _config(args)
    data = _load(args)
    t0 = time.perf_counter()
    result = netmap(data, args.cross, config, args.min_m, args.use_community)
    args.out.mkdir(parents=True, exist_ok=True)
    reduced_names = [data.var_names[j] for j in result.kept]
    write_path(result.path, reduced_names, args.out)
    names = data.var_names
    write_json({
        "cross": args.cross,
        "groups": [[names[m] for m in g] for g in result.map.groups],
        "dropped": [names[m] for m in result.map.dropped],
        "ordering": "mds (1 dimension, geodesic 1-|partial cor|)" if args.cross == "inbred" else "rcm",
        "grouping": "greedy modularity" if args.use_community else "connected components",
        "min_m": args.min_m,
    }, args.out / "map.json")
    text = result.summary()
    (args.out / "summary.txt").write_text(text + "\n")
    order_names, adj = ordered_adjacency(result)
    write_ordered_adjacency(order_names, adj, args.out / "ordered_adjacency.tsv")
    write_json(_fit_meta("map", args, config, data, result.kept,
                         [j for j in range(data.p) if j not in result.kept],
                         time.perf_counter() - t0), args.out / "metadata.json")
    print(text)
    return 0


def cmd_select(args):
    if not (args.path / "path.json").exists() or not (args.path / "path.npz").exists():
        raise FileNotFoundError(f"{args.path}: no path.json/path.npz found")
    path, summary = load_path(args.path, args.criterion, args.gamma)
    names = summary["names"]
    write_selected(path, names, args.path)
    summary.update(criterion=args.criterion, gamma=args.gamma, selected=path.selected,
                   selected_lambda=path.lambdas[path.selected])
    for entry, s in zip(summary["fits"], path.scores):
        if s is not None:
            entry.update(aic=s.aic, ebic=s.ebic)
    write_json(summary, args.path / "path.json")
    meta_file = args.path / "metadata.json"
    meta = json.loads(meta_file.read_text()) if meta_file.exists() else {}
    meta.setdefault("reselections", []).append({"criterion": args.criterion, "gamma": args.gamma,
                                                "selected": path.selected})
    write_json(meta, meta_file)
    print(f"selected lambda={path.lambdas[path.selected]:.4g} "
          f"({path.selected_estimate.n_edges} edges) by {args.criterion}")
    return 0


COMMANDS = {"simgeno": cmd_simgeno, "simril": cmd_simril, "fit": cmd_fit, "map": cmd_map,
            "select": cmd_select}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (DataError, MapError, ValueError, RuntimeError, OSError) as exc:
        print(f"netcopula {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
