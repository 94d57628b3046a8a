"""Partial fraction decomposition of closed formal meromorphic 1-forms."""
from __future__ import annotations

from .algebra import Jet, LinearMapSpec, Poly
from .decompose import Decomposition, SolveReport, decompose, is_exact_form, verify_decomposition
from .forms import MeroOneForm, OneForm, PoleDivisor, TwoForm, closedness_check, synthesize_form

__version__ = "0.1.0"

__all__ = [
    "Decomposition",
    "Jet",
    "LinearMapSpec",
    "MeroOneForm",
    "OneForm",
    "PoleDivisor",
    "Poly",
    "SolveReport",
    "TwoForm",
    "closedness_check",
    "decompose",
    "is_exact_form",
    "synthesize_form",
    "verify_decomposition",
]
