"""Exponent arithmetic and weighted mixed norms.

The estimate-verification harness lives in bsns.analysis.verify; it is not imported here
because it depends on the evolution operators, which themselves use these norms.
"""

from bsns.analysis.exponents import (
    DiagonalTriple,
    ExponentTriple,
    Regime,
    anomalous_pair,
    critical_p,
    diagonal_triple,
    dual_exponent,
    dual_triple,
    is_admissible,
    regime_of,
    restriction_dual_exponent,
    solve_q,
    weight_k,
)
from bsns.analysis.norms import (
    MixedNormSpec,
    halfspace_norm,
    intersection_norm,
    lebesgue_x,
    mixed_norm,
    sum_norm,
    trace_norm,
)

__all__ = [
    "DiagonalTriple",
    "ExponentTriple",
    "MixedNormSpec",
    "Regime",
    "anomalous_pair",
    "critical_p",
    "diagonal_triple",
    "dual_exponent",
    "dual_triple",
    "halfspace_norm",
    "intersection_norm",
    "is_admissible",
    "lebesgue_x",
    "mixed_norm",
    "regime_of",
    "restriction_dual_exponent",
    "solve_q",
    "sum_norm",
    "trace_norm",
    "weight_k",
]
