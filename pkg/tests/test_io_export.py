import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from netcopula.export import (
    edge_rows, load_path, read_edges_tsv, write_dot, write_graphml, write_path,
)
from netcopula.io import detect_kind, read_csv, write_csv
from netcopula.npn import npn_fit
from netcopula.simulate import SimGenoSpec, simgeno
from netcopula.types import CONTINUOUS, ORDINAL, DataError, FitConfig, ObservedMatrix, validate


@given(st.integers(0, 10_000), st.integers(2, 6), st.integers(2, 30))
def test_csv_round_trip(tmp_path_factory, seed, p, n):
    rng = np.random.default_rng(seed)
    kinds = [ORDINAL if rng.random() < 0.5 else CONTINUOUS for _ in range(p)]
    cols = [rng.integers(0, 4, n).astype(float) if k == ORDINAL else rng.standard_normal(n) * 1e3
            for k in kinds]
    x = np.column_stack(cols)
    x[rng.random(x.shape) < 0.1] = np.nan
    d = ObservedMatrix(x, tuple(kinds), tuple(f"var {j}" for j in range(p)))
    path = tmp_path_factory.mktemp("rt") / "d.csv"
    write_csv(d, path)
    assert read_csv(path) == d


def test_missing_tokens_and_auto_kinds(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("g,y,h\n0,1.5,2\n1,NA,3\n,2.25,2\n2,-0.5,12\n")
    d = read_csv(f)
    assert d.var_kinds == (ORDINAL, CONTINUOUS, ORDINAL)
    assert np.isnan(d.values[1, 1]) and np.isnan(d.values[2, 0])


def test_kinds_override(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("a,b\n0,1\n1,2\n2,3\n")
    k = tmp_path / "kinds.json"
    k.write_text(json.dumps({"b": "continuous"}))
    assert read_csv(f, kinds=k).var_kinds == (ORDINAL, CONTINUOUS)
    with pytest.raises(DataError):
        read_csv(f, kinds={"zzz": "ordinal"})


def test_parse_error_names_row_and_column(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("a,b\n0,1\n1,oops\n")
    with pytest.raises(DataError, match=r"row 3, column 'b'"):
        read_csv(f)
    f.write_text("a,b\n0,1,2\n")
    with pytest.raises(DataError, match="row 2"):
        read_csv(f)


def test_detect_kind_threshold():
    assert detect_kind(np.arange(10.0)) == ORDINAL
    assert detect_kind(np.arange(11.0)) == CONTINUOUS
    assert detect_kind(np.array([0.5, 1.0])) == CONTINUOUS


def test_simgeno_csv_validates(tmp_path):
    d, _ = simgeno(SimGenoSpec(p=15, n=40, g=3, seed=1))
    write_csv(d, tmp_path / "s.csv", sidecar=False)
    back = read_csv(tmp_path / "s.csv")
    assert back == d and validate(back).ok


@pytest.fixture(scope="module")
def fitted():
    d, _ = simgeno(SimGenoSpec(p=20, n=300, g=2, seed=8))
    return d, npn_fit(d, FitConfig(method="npn", rho_ratio=0.2))


def test_edge_list_sorted_and_complete(fitted, tmp_path):
    d, path = fitted
    est = path.estimates[-1]
    rows = edge_rows(est, d.var_names)
    assert len(rows) == est.n_edges
    mags = [abs(r[3]) for r in rows]
    assert mags == sorted(mags, reverse=True)


def test_graph_exports_match_support(fitted, tmp_path):
    d, path = fitted
    est = path.estimates[-1]
    write_graphml(est, d.var_names, tmp_path / "g.graphml")
    g = nx.read_graphml(tmp_path / "g.graphml")
    expected = {frozenset((d.var_names[i], d.var_names[j])) for i, j in est.edges}
    assert {frozenset(e) for e in g.edges} == expected
    for u, v, w in g.edges(data="weight"):
        i, j = d.var_names.index(u), d.var_names.index(v)
        assert w == pytest.approx(est.partial_cor[i, j])
    write_dot(est, d.var_names, tmp_path / "g.dot")
    text = (tmp_path / "g.dot").read_text()
    assert text.count(" -- ") == est.n_edges


def test_path_files_reload_and_rescore(fitted, tmp_path):
    d, path = fitted
    write_path(path, d.var_names, tmp_path)
    summary = json.loads((tmp_path / "path.json").read_text())
    assert len(summary["fits"]) == len(path.lambdas)
    assert all("kkt_residual" in f for f in summary["fits"])
    again, _ = load_path(tmp_path)
    assert again.selected == path.selected
    for a, b in zip(again.scores, path.scores):
        assert a.ebic == pytest.approx(b.ebic, rel=1e-12)
    edges = read_edges_tsv(tmp_path / "edges" / f"lambda_{len(path.lambdas) - 1:02d}.tsv")
    assert len(edges) == path.estimates[-1].n_edges
