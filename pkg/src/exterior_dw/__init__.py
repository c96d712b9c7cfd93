"""Radial numerics for the damped wave equation outside the unit disk.

Heat semigroup, linear damped-wave propagator, semilinear evolution with
blow-up detection, and numerical checks of the weighted functional
inequalities that control them.
"""

from .radial import (
    Measure,
    RadialField,
    RadialGrid,
    apply_laplacian,
    build_grid,
    grad_norm_sq,
    h_weight,
    int_h_power,
    integrate,
    norm,
    read_field_csv,
    write_field_csv,
)
from .heat import HeatConfig, heat_decay_report, heat_evolve, kappa_q, supersolution_phi, supersolution_residual_check
from .linear import (
    Trajectory,
    WaveConfig,
    WaveState,
    abstract_matsumura_verify,
    dw_linear_evolve,
    l1dmu_bound_check,
    log_matsumura_report,
    matsumura_diff_report,
    positivity_check,
    reduced_1d_evolve,
)
from .inequalities import InequalityReport, constant_sweep, gn_ratio, hardy_ratio, log_gn_ratio
from .semilinear import (
    EvolutionConfig,
    LifespanRecord,
    SemilinearRun,
    detect_blowup,
    duhamel_residual_check,
    global_decay_report,
    heat_supersolution_lifespan,
    lifespan_estimate,
    semilinear_evolve,
)

__version__ = "0.1.0"
