"""Numerical laboratory for blow-up of critical semilinear wave equations."""

from blowuplab._core import (  # noqa: F401
    BlowupInfo,
    BoundConstants,
    EigenfunctionTable,
    HypothesisReport,
    IterationSchedule,
    LifespanBound,
    Metric,
    RunRecord,
    SeriesPoint,
    StraussExponent,
    TestFunctionEvaluator,
    bessel_i,
    bessel_i_scaled,
    blowup_trigger_logt,
    build_schedule,
    build_table,
    critical_exponent_combination,
    lifespan_bound,
    make_metric,
    phi_flat,
    phi_flat_asymptotic,
    phi_flat_scaled,
    run_blowup,
    solve_correction,
    sphere_area,
    strauss_exponent,
    strauss_gamma,
    verify_hypotheses,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
