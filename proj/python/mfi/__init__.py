"""Strong fractional integrals, bump characteristics and cone decay on product grids."""

from ._mfi import (
    EmptyFamily,
    Error,
    Exponents,
    Grid,
    GuardExceeded,
    InvalidArgument,
    TrivialWeight,
    Weights,
    achievable_cone_range,
    bump_characteristic,
    characteristic_decay_profile,
    check_inventory,
    cone_operator,
    cone_sum,
    fit_decay_rate,
    run_check,
    set_threads,
    strong_fractional_integral,
    weighted_norm,
)

__all__ = [
    "EmptyFamily",
    "Error",
    "Exponents",
    "Grid",
    "GuardExceeded",
    "InvalidArgument",
    "TrivialWeight",
    "Weights",
    "achievable_cone_range",
    "bump_characteristic",
    "characteristic_decay_profile",
    "check_inventory",
    "cone_operator",
    "cone_sum",
    "fit_decay_rate",
    "run_check",
    "set_threads",
    "strong_fractional_integral",
    "weighted_norm",
]
