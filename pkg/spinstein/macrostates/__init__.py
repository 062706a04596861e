from .critical import (
    CriticalTemps,
    beta_c,
    beta_s,
    critical_temps,
    solve_s_largest,
    s_star,
    fixed_point_residual,
    spinodal_function,
    has_spinodal_root,
)
from .equilibria import (
    MacrostateAnalysis,
    analyze,
    macrostate_set,
    ordered_point,
    classify_macrostate,
    symmetric_fixed_points,
    select_macrostate,
    g_potential,
    g_potential_grad,
    jacobian_A,
    jacobian_constants,
    theta,
    lambda_,
    symmetric_part_eigenvalues,
    condition_holds,
)

__all__ = [
    "CriticalTemps",
    "beta_c",
    "beta_s",
    "critical_temps",
    "solve_s_largest",
    "s_star",
    "fixed_point_residual",
    "spinodal_function",
    "has_spinodal_root",
    "MacrostateAnalysis",
    "analyze",
    "macrostate_set",
    "ordered_point",
    "classify_macrostate",
    "symmetric_fixed_points",
    "select_macrostate",
    "g_potential",
    "g_potential_grad",
    "jacobian_A",
    "jacobian_constants",
    "theta",
    "lambda_",
    "symmetric_part_eigenvalues",
    "condition_holds",
]
