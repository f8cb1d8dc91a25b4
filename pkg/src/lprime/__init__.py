"""Dirichlet L-functions, the zeros of L'(s, chi), and their counting statistics."""

from .characters import (
    DirichletCharacter,
    chi_eval,
    enumerate_characters,
    gauss_sum,
    get_character,
    primitive_characters,
    root_number,
    smallest_nondividing_prime,
)
from .errors import (
    AccuracyError,
    ConfigMismatch,
    DomainError,
    LPrimeError,
    PathThroughZero,
    PoleError,
    ScanIncomplete,
    StoreCorrupted,
    StoreError,
)
from .evaluator import (
    DEFAULT_CONFIG,
    ComplexValue,
    EvalConfig,
    arg_along_path,
    f_factor,
    f_logderiv,
    g1_value,
    hurwitz_zeta,
    l_value,
    logderiv_zero_sum_residual,
)

__version__ = "0.1.0"

__all__ = [
    "DirichletCharacter", "chi_eval", "enumerate_characters", "gauss_sum", "get_character",
    "primitive_characters", "root_number", "smallest_nondividing_prime",
    "AccuracyError", "ConfigMismatch", "DomainError", "LPrimeError", "PathThroughZero",
    "PoleError", "ScanIncomplete", "StoreCorrupted", "StoreError",
    "DEFAULT_CONFIG", "ComplexValue", "EvalConfig", "arg_along_path", "f_factor", "f_logderiv",
    "g1_value", "hurwitz_zeta", "l_value", "logderiv_zero_sum_residual",
]
