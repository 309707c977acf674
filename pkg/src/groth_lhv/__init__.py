"""Grothendieck-constant bounds, local hidden variable models and Bell inequalities.

Submodules
----------
core            unit vectors, seeded random streams, small linear-algebra helpers
quantum         states, dichotomic observables and their correlations
bell_engine     exact local bounds and see-saw vector bounds of correlation inequalities
lhv             local models and seeded Monte Carlo estimation
krivine         normalization roots, feature embeddings and sign-rounding models
correspondence  observables <-> unit vectors in both directions
inn22           the I_nn22 family and its CHSH decomposition
"""
from . import bell_engine, core, correspondence, inn22, kernels, krivine, lhv, quantum
from .core import RandomSource, UnitVector, sample_sphere
from .errors import (DegenerateInequality, GrothLhvError, InconsistentCorrelation,
                     InvalidArgument, OutOfRange, ResourceLimitError, TheoremViolation)

__version__ = "0.1.0"

__all__ = [
    "bell_engine", "core", "correspondence", "inn22", "kernels", "krivine", "lhv", "quantum",
    "RandomSource", "UnitVector", "sample_sphere",
    "GrothLhvError", "InvalidArgument", "ResourceLimitError", "DegenerateInequality",
    "InconsistentCorrelation", "OutOfRange", "TheoremViolation",
]
