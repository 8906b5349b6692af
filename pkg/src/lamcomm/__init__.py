"""Finite-dimensional verification lab for lambda-commuting matrix pairs."""

__version__ = "0.1.0"

from .classes import ClassParams, ClassReport, classify, minimal_M_constant, restrict_to_invariant
from .engines import family_psd_min, sphere_min
from .harness import THEOREMS, TheoremVerdict, verify
from .linalg import DEFAULT_TOL, Tolerances, operator_norm, spectral_radius
from .pairs import CommutationCertificate, clock_shift_pair, extract_lambda, make_instance
from .suite import SuiteConfig, SuiteReport, counterexample_search, run_suite

__all__ = [
    "ClassParams", "ClassReport", "classify", "minimal_M_constant", "restrict_to_invariant",
    "family_psd_min", "sphere_min", "THEOREMS", "TheoremVerdict", "verify",
    "DEFAULT_TOL", "Tolerances", "operator_norm", "spectral_radius",
    "CommutationCertificate", "clock_shift_pair", "extract_lambda", "make_instance",
    "SuiteConfig", "SuiteReport", "counterexample_search", "run_suite",
]
