"""Certified evaluation of discrete Hardy-type functionals and inequalities."""

from .errors import ConsistencyError, InputError, TailNotComputable
from .functionals import (
    FunctionalReport,
    evaluate,
    f1_improved,
    f2_improved,
    fkp_improved_grad_lhs,
    fkp_improved_lhs,
    fkp_lhs,
    grad_hardy_lhs,
    hardy_classical_lhs,
    hurwitz_zeta,
    lp_norm_p,
    uncertainty_sides,
)
from .inequalities import GeneratorSpec, SuiteReport, run_suite
from .numeric import Enclosure, get_precision, working_precision
from .series import vp_coefficients
from .sharpness import adversarial_search, near_extremal, ratio_sweep
from .seqcore import Sequence, from_values, load_sequence, rearrange, save_sequence
from .weights import LINEAR, WeightSpec, vp_eval

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "InputError",
    "TailNotComputable",
    "Enclosure",
    "FunctionalReport",
    "LINEAR",
    "Sequence",
    "WeightSpec",
    "GeneratorSpec",
    "SuiteReport",
    "adversarial_search",
    "evaluate",
    "f1_improved",
    "f2_improved",
    "fkp_improved_grad_lhs",
    "fkp_improved_lhs",
    "fkp_lhs",
    "grad_hardy_lhs",
    "hardy_classical_lhs",
    "lp_norm_p",
    "near_extremal",
    "ratio_sweep",
    "run_suite",
    "uncertainty_sides",
    "vp_coefficients",
    "vp_eval",
    "from_values",
    "get_precision",
    "hurwitz_zeta",
    "load_sequence",
    "rearrange",
    "save_sequence",
    "working_precision",
]
