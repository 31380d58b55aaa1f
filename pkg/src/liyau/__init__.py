"""Gradient-inequality verification toolkit for heat semigroups.

Model geometries reduce to weighted 1-D generators; the package solves
their Neumann heat flow, evaluates a catalog of closed-form gradient
bounds (gamma X <= a Y + c for X = |grad u|^2/u^2, Y = Lu/u), and
cross-checks the probabilistic right-hand sides by simulating the
reflected diffusion with its boundary local time.
"""

__version__ = "0.1.0"

from .geometry import (CdCheckReport, ModelManifold, cd_check,
                       laplacian_comparison, make_model_manifold,
                       manifold_from_dict, with_curvature)
from .heatflow import (HeatState, InitialDatum, exact_kernel,
                       gaussian_kernel_state, harnack_quantities,
                       initial_datum, solve_heat)
from .clocks import Clock, alpha_form_integral, clock_integrals, \
    gamma_integral, make_clock
from .bounds import (BoundForm, CheckResult, NonconvexData, beta_t_alpha,
                     bound_catalog, check_inequality, eval_bound, local_betas,
                     nonconvex_bound_rhs, nonconvex_constants, phi_bbg)
from .stochastic import (Estimate, PathSample, TimeChange,
                         cutoff_growth_check, estimate_functional,
                         expected_local_time, expected_value_at,
                         local_time_moment, path_weight,
                         simulate_reflected_path, time_change)
from .harness import ExperimentConfig, Report, emit_report, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]
