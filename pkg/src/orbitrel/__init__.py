"""Polynomial relations on orbits of attracting non-archimedean analytic maps.

Two coefficient fields are supported: capped-precision p-adics and Laurent
series over Q, the latter with exact rational arithmetic for zero tests.
The main entry point is :func:`orbitrel.classifier.classify`.
"""
from orbitrel.classifier import (ClassificationReport, DeformedTorusFamily, IterationalVariety,
                                 brute_force_oracle, classify, classify_ideal, verify_family)
from orbitrel.dynamics import (DynamicalSystem, boettcher, koenigs, koenigs_inverse, orbit,
                               validate)
from orbitrel.errors import (DomainViolation, OrbitRelError, PrecisionExhausted, SchemaError)
from orbitrel.kernels import BACKEND as KERNEL_BACKEND
from orbitrel.series import MultiPoly, TruncatedSeries, compose
from orbitrel.solvers import SolutionFamily, dominant_monomials, linear_solve, mann_solve
from orbitrel.valued_field import INF, FieldSpec, ValuedElement

__version__ = "0.1.0"

__all__ = [
    "ClassificationReport", "DeformedTorusFamily", "IterationalVariety", "brute_force_oracle",
    "classify", "classify_ideal", "verify_family", "DynamicalSystem", "boettcher", "koenigs",
    "koenigs_inverse", "orbit", "validate", "DomainViolation", "OrbitRelError",
    "PrecisionExhausted", "SchemaError", "KERNEL_BACKEND", "MultiPoly", "TruncatedSeries",
    "compose", "SolutionFamily", "dominant_monomials", "linear_solve", "mann_solve", "INF",
    "FieldSpec", "ValuedElement",
]
