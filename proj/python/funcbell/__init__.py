"""Functional Bell inequality for the singlet over continuous measurement settings."""

from ._core import (  # noqa: F401
    COPLANAR_THRESHOLD,
    CHAINED_LIMIT,
    FULL_SPHERE_THRESHOLD,
    GISIN_THRESHOLD,
    Direction,
    QuadratureGrid,
    build_grid,
    correlation_qm,
    discrete_lhv_max,
    discrete_quantum_value,
    discrete_threshold,
    evaluate_coplanar,
    evaluate_inequality,
    lhv_bound_analytic,
    norm_sq_qm_analytic,
    norm_sq_qm_numeric,
    optimize_hemisphere_pair,
    p_qm,
    project_hemisphere,
    project_linear,
    projection_norm_bound,
    simulate,
    threshold_visibility,
)

__version__ = "0.1.0"
