"""Nonparanormal skeptic: Kendall tau-b plug-in estimate of the latent correlation."""
from __future__ import annotations

import numpy as np

from .types import DataError, ObservedMatrix, psd_repair

_CHUNK_PAIRS = 2_000_000


def kendall_tau_counts(values: np.ndarray):
    """Pairwise-complete concordance counts for every column pair.

    Returns ``(s, n0, t)`` where for columns (j, k): ``s[j, k]`` is
    concordant minus discordant pairs, ``n0[j, k]`` the number of
    observation pairs complete in both, and ``t[j, k]`` the number of those
    pairs tied in column j.  All entries are exact integers stored as
    float64.
    """
    x = np.asarray(values, dtype=float)
    n, p = x.shape
    s = np.zeros((p, p))
    n0 = np.zeros((p, p))
    t = np.zeros((p, p))
    rows, cols = np.triu_indices(n, 1)
    for start in range(0, rows.size, max(1, _CHUNK_PAIRS // max(p, 1))):
        stop = start + max(1, _CHUNK_PAIRS // max(p, 1))
        r, c = rows[start:stop], cols[start:stop]
        d = x[r] - x[c]
        obs = ~np.isnan(d)
        sg = np.sign(np.where(obs, d, 0.0))
        o = obs.astype(float)
        tie = (obs & (sg == 0)).astype(float)
        s += sg.T @ sg
        n0 += o.T @ o
        t += tie.T @ o
    return s, n0, t


def kendall_tau_matrix(data) -> np.ndarray:
    """Tau-b on pairwise-complete observations; diagonal 1.

    Parameters
    ----------
    data : ObservedMatrix or (n, p) array
        Missing cells are NaN.
    """
    values = data.values if isinstance(data, ObservedMatrix) else np.asarray(data, float)
    names = data.var_names if isinstance(data, ObservedMatrix) else None
    p = values.shape[1]
    ok = (~np.isnan(values)).astype(float)
    complete = ok.T @ ok
    s, n0, t = kendall_tau_counts(values)
    tau = np.zeros((p, p))
    for j in range(p):
        for k in range(j + 1, p):
            if complete[j, k] < 2:
                label = (names[j], names[k]) if names else (j, k)
                raise DataError(f"column pair {label} has fewer than 2 complete cases")
            tau[j, k] = tau[k, j] = tau_b(s[j, k], n0[j, k], t[j, k], t[k, j])
    np.fill_diagonal(tau, 1.0)
    return tau


def tau_b(s, n0, ties_x, ties_y) -> float:
    """(C - D) / sqrt((n0 - n1)(n0 - n2)); 0 when either margin is constant."""
    den = (n0 - ties_x) * (n0 - ties_y)
    if den <= 0:
        return 0.0
    return float(s / np.sqrt(den))


def skeptic_correlation(tau: np.ndarray) -> np.ndarray:
    """sin(pi/2 * tau), diagonal 1, repaired to the nearest usable correlation."""
    tau = np.asarray(tau, dtype=float)
    if np.any(np.abs(tau) > 1 + 1e-12):
        raise ValueError("tau entries must lie in [-1, 1]")
    s = np.sin(0.5 * np.pi * np.clip(tau, -1.0, 1.0))
    np.fill_diagonal(s, 1.0)
    return psd_repair(s)


def skeptic_from_data(data) -> np.ndarray:
    return skeptic_correlation(kendall_tau_matrix(data))


def npn_fit(data: ObservedMatrix, config):
    """Penalized path on the skeptic correlation, bypassing EM."""
    from .mstep import PenaltySpec, kkt_residual, solve
    from .selection import build_path, make_lambda_grid

    if config.method != "npn":
        raise ValueError("npn_fit requires config.method == 'npn'")
    S = skeptic_from_data(data)
    if config.rho_grid is not None:
        lambdas = np.array(config.rho_grid)
    else:
        lambdas = make_lambda_grid(S, config.n_rho, config.rho_ratio)
    estimates, errors, kkt = [], [], []
    theta = None
    for lam in lambdas:
        penalty = PenaltySpec(config.penalty, float(lam), config.scad_a)
        try:
            est = solve(S, penalty, theta_init=theta)
        except (RuntimeError, np.linalg.LinAlgError) as exc:
            estimates.append(None)
            errors.append(str(exc))
            kkt.append(None)
            continue
        theta = est.theta
        estimates.append(est)
        errors.append(None)
        kkt.append(kkt_residual(S, est, penalty))
    return build_path(
        lambdas, estimates, [S if e is not None else None for e in estimates], data.n,
        config.criterion, config.gamma, method="npn", errors=tuple(errors),
        metadata={
            "method": "npn",
            "penalty": config.penalty,
            "npn_statistic": "kendall_tau_b",
            "likelihood": "Gaussian log-likelihood at the skeptic correlation",
            "kkt_residual": kkt,
        },
    )
