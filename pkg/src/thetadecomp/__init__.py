"""Theta series of matrix level: evaluation, operator algebra, decomposition."""

from .algebra import (
    AlgebraElement,
    BasisSymbol,
    OperatorId,
    apply,
    apply_raising_power,
    commutator,
    evaluate_element,
    in_theta_subalgebra,
    lowering_op,
    raising_op,
    scaling_op,
)
from .decompose import (
    Decomposition,
    DerivSymbol,
    DiffPolyExpr,
    FitConfig,
    Product,
    Scale,
    Sum,
    diff_poly_decompose,
    fit_in_basis,
    fit_in_basis_sequential,
    product_expand,
    restrict_z0,
    verify_theorem3,
)
from .evaluation import (
    ThetaValue,
    TruncationConfig,
    aux_theta_series,
    choose_radius,
    quasi_period_residual,
    shift_operator_check,
    theta_series,
    wderiv_fd,
)
from .numerics import (
    Characteristic,
    LevelMatrix,
    MultiIndex,
    PeriodMatrix,
    enumerate_characteristics,
    multi_binom,
    smith_normal_form,
    validate_level,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "BasisSymbol",
    "Characteristic",
    "Decomposition",
    "DerivSymbol",
    "DiffPolyExpr",
    "FitConfig",
    "LevelMatrix",
    "MultiIndex",
    "OperatorId",
    "PeriodMatrix",
    "Product",
    "Scale",
    "Sum",
    "ThetaValue",
    "TruncationConfig",
    "apply",
    "apply_raising_power",
    "aux_theta_series",
    "choose_radius",
    "commutator",
    "diff_poly_decompose",
    "enumerate_characteristics",
    "evaluate_element",
    "fit_in_basis",
    "fit_in_basis_sequential",
    "in_theta_subalgebra",
    "lowering_op",
    "multi_binom",
    "product_expand",
    "quasi_period_residual",
    "raising_op",
    "restrict_z0",
    "scaling_op",
    "shift_operator_check",
    "smith_normal_form",
    "theta_series",
    "validate_level",
    "verify_theorem3",
    "wderiv_fd",
]
