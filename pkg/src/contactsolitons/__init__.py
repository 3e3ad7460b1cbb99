"""Chart-based symbolic/numeric tensor calculus for contact metric manifolds.

Builds metrics and almost contact structures on a coordinate chart, computes
Levi-Civita curvature exactly (symbolic differentiation, numeric evaluation),
and checks Riemann / Ricci / Yamabe soliton equations and their derived
identities at sample points.
"""

__version__ = "0.1.0"

from .expr import Chart, DomainError, EvaluationError, ExpressionError, ScalarExpr
from .checks import CheckReport, SamplePlan

__all__ = [
    "Chart",
    "CheckReport",
    "DomainError",
    "EvaluationError",
    "ExpressionError",
    "SamplePlan",
    "ScalarExpr",
    "__version__",
]
