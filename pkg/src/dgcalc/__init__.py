"""dgcalc: exact calculus for linear constant-coefficient differential operators.

Operators are matrices over Q[d1..dn].  The package computes compatibility
conditions, formal adjoints, free resolutions, parametrizability verdicts,
minimal parametrizations and Ext invariants, all with exact rational
arithmetic, plus a zoo of classical operators to exercise them on.
"""

from .poly import Poly, ParseError, parse, serialize
from .engine import (
    FreeElem,
    ModuleOrder,
    GroebnerBasis,
    BudgetExceeded,
    Resolution,
    reduced_groebner,
    normal_form,
    divide_with_cofactors,
    module_contains,
    module_equal,
    syzygies,
    minimize_generators,
    fraction_rank,
    resolve_module,
    euler_characteristic,
)
from .operators import (
    Bundle,
    LinDiffOp,
    ShapeMismatch,
    NotFactorable,
    OpFormatError,
    compose,
    adjoint,
    is_self_adjoint,
    cc,
    factor_through,
    order_profile,
    symbol_at,
    scale,
    operator_to_dict,
    operator_from_dict,
    save_operator,
    load_operator,
)
from .duality import (
    ParamReport,
    TorsionGenerator,
    TorsionWitnessError,
    ExtReport,
    SearchBudgetError,
    param_test,
    ext_module,
    minimal_parametrization,
)
from . import zoo

__version__ = "0.1.0"

__all__ = [
    "Poly",
    "ParseError",
    "parse",
    "serialize",
    "FreeElem",
    "ModuleOrder",
    "GroebnerBasis",
    "BudgetExceeded",
    "Resolution",
    "reduced_groebner",
    "normal_form",
    "divide_with_cofactors",
    "module_contains",
    "module_equal",
    "syzygies",
    "minimize_generators",
    "fraction_rank",
    "resolve_module",
    "euler_characteristic",
    "Bundle",
    "LinDiffOp",
    "ShapeMismatch",
    "NotFactorable",
    "OpFormatError",
    "compose",
    "adjoint",
    "is_self_adjoint",
    "cc",
    "factor_through",
    "order_profile",
    "symbol_at",
    "scale",
    "operator_to_dict",
    "operator_from_dict",
    "save_operator",
    "load_operator",
    "ParamReport",
    "TorsionGenerator",
    "TorsionWitnessError",
    "ExtReport",
    "SearchBudgetError",
    "param_test",
    "ext_module",
    "minimal_parametrization",
    "zoo",
    "__version__",
]
