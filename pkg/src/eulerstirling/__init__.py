"""Exact verification of Euler-Stirling statistics identities on permutations."""

__version__ = "0.1.0"

from .combinatorics import (InversionSequence, Permutation, enumerate_invseqs,
                            enumerate_perms, invseq_complement, invseq_stats,
                            perm_stats, perm_transform)
from .equidist import (CheckReport, Distribution, check_conjecture_op2,
                       check_equidistribution, joint_distribution,
                       tbij_extend_distinct, tbij_extend_repeated,
                       tbij_roundtrip_verify)
from .errors import (ContextMismatchError, DomainError, EnumerationBoundError,
                     PoleError, PrecisionError, ValuationError)
from .formulas import FORMULAS, EvalPlan, verify_formula
from .series import RationalPoint, SeriesContext, TruncatedSeries

__all__ = [
    "__version__",
    "Permutation", "InversionSequence", "perm_stats", "perm_transform",
    "invseq_stats", "invseq_complement", "enumerate_perms", "enumerate_invseqs",
    "Distribution", "CheckReport", "joint_distribution", "check_equidistribution",
    "check_conjecture_op2", "tbij_extend_distinct", "tbij_extend_repeated",
    "tbij_roundtrip_verify",
    "SeriesContext", "TruncatedSeries", "RationalPoint",
    "EvalPlan", "FORMULAS", "verify_formula",
    "DomainError", "EnumerationBoundError", "ContextMismatchError", "PoleError",
    "ValuationError", "PrecisionError",
]
