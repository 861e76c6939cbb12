"""High-dimensional random walk Metropolis and its mean-field diffusion limit.

Pieces: closed-form limit coefficients (`coefficients`), 1-d potentials
with quadrature (`potentials`), the exact n-dimensional chain (`chain`),
the nonlinear-SDE particle ensemble (`mean_field`), the Gaussian moment
ODE oracle (`moment_ode`), chain-vs-limit statistics (`compare`), and the
CLI / benchmark harness (`cli`, `benchmarks`).
"""

__version__ = "0.1.0"

from .coefficients import (
    MomentPair,
    ScalingParams,
    acc_rate,
    argmax_h,
    gamma_coef,
    gamma_value,
    gaussian_exp_cross,
    gaussian_exp_first,
    gaussian_exp_second,
    gee_coef,
    gee_gaussian_smoothing,
    gee_value,
    h_of_l,
    log_normal_cdf,
    normal_cdf,
)
from .chain import (
    ChainConfig,
    ChainRun,
    InitialDistribution,
    chain_step,
    empirical_moments,
    run_chain,
    run_replicas,
)
from .compare import (
    acceptance_curve,
    build_report,
    chaos_diagnostic,
    moment_bound_check,
    wasserstein1_1d,
)
from .mean_field import EnsembleConfig, ensemble_step, martingale_defect, run_ensemble, smooth_taper_family
from .moment_ode import MomentCurve, gaussian_rhs, integrate_moment_ode
from .potentials import Potential, builtin_potential, compute_Z_and_I, parse_potential
