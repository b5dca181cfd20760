"""
orthoverify - Verify the geometry of square-type subspaces of orthogonal spaces.

This package builds the geometry of nondegenerate square-type subspaces of
F_q^(n+1) with the standard form, checks its counting lemmas and
connectedness claims exhaustively at desk scale, computes homotopy
invariants of its incidence complex and reproduces the sum-of-squares
search over small fields.
"""

__version__ = "0.2.0"

from orthoverify.errors import (
    BudgetExceededError,
    ConfigurationError,
    UsageError,
    VerificationError,
)
from orthoverify.geometry import build_geometry
from orthoverify.gf import make_field
from orthoverify.lemmas import joes_lemma_scan, joes_lemma_verify

__all__ = [
    "__version__",
    "build_geometry",
    "make_field",
    "joes_lemma_scan",
    "joes_lemma_verify",
    "VerificationError",
    "BudgetExceededError",
    "ConfigurationError",
    "UsageError",
]
