"""Workbench for quantitative analysis of monotone and comonotone operators:
a typed combinator core with logical translations on one side, numerical
resolvent experiments on the other, glued by majorant constructions."""

from .finite_types import (
    Arrow,
    BaseType,
    FinType,
    TypeClass,
    TypeContainsX,
    X,
    ZERO,
    classify,
    degree,
    hat,
    is_admissible,
    is_small,
    parse_type,
    pure_type,
)
from .term_calculus import (
    App,
    Const,
    Term,
    Var,
    bracket_abstract,
    evaluate,
    FiniteModel,
    numeral,
    reduce_term,
    typecheck,
)
from .real_codes import (
    CompareResult,
    RatCode,
    RealCode,
    canonical_rep,
    compare_at,
    guarded_recip,
    pair_j,
    rat_value,
    real_arith,
    unpair_j,
)
from .formula_engine import (
    DeltaForm,
    DialecticaForm,
    Formula,
    check_interpretation_soundness,
    delta_recognize,
    dialectica,
    expand_defined,
    generate_corpus,
    negative_translation,
    parse_formula,
    skolemize_delta,
)
from .majorization import (
    NOT_BOUNDED,
    bobs_uniform_majorant,
    check_majorizes,
    chi_majorant,
    monotone_hull,
    resolvent_majorant,
)
from .operator_lab import (
    CATALOG,
    SetValuedOperator,
    build_catalog,
    check_operator_class,
    check_resolvent_properties,
    clamp_tilde,
    minimal_norm_selection,
    resolvent,
    resolvent_param_modulus,
    yosida,
)
from .algorithms import (
    GammaSchedule,
    IterationTrace,
    moudafi_iteration,
    parse_gamma_schedule,
    proximal_point,
    trace_report,
)

__version__ = "0.1.0"
