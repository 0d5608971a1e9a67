"""Sparse conditional-independence networks for ordinal and mixed data via
penalized Gaussian copula graphical models, with linkage-map construction
and ground-truth simulators."""

__version__ = "0.1.0"

from .types import (  # noqa: E402
    CONTINUOUS, ORDINAL, DataError, FitConfig, LatentMoments, LinkageMap, ObservedMatrix,
    PrecisionEstimate, psd_repair, validate,
)
from .marginals import estimate_cutpoints, latent_bounds  # noqa: E402
from .estep import approx_expectation, gibbs_expectation, trunc_normal_moments  # noqa: E402
from .mstep import PenaltySpec, glasso, kkt_residual, scad_glasso  # noqa: E402
from .npn import kendall_tau_matrix, npn_fit, skeptic_correlation  # noqa: E402
from .em import em_fit_path, em_fit_single  # noqa: E402
from .selection import PathResult, make_lambda_grid, selectnet  # noqa: E402
from .fit import fit_network, fit_path  # noqa: E402
from .linkage import detect_groups, netmap, order_mds, order_rcm  # noqa: E402
from .simulate import SimGenoSpec, SimRilSpec, simgeno, simril  # noqa: E402
from .io import read_csv, write_csv  # noqa: E402
