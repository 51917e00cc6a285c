"""Quantum gradient estimation and automatic method selection.

Parameter-shift, Hadamard-test and reversed-test gradient plans for
parameterized quantum circuits, a static cost model, and QAD: per-parameter
selection of the cheapest feasible gradient method.
"""

from .circuit import PQC, Circuit, Gate, StateVector, eval_cost
from .data_types import (
    CostReport,
    DerivativeIndex,
    ErrorTable,
    GradientMethod,
    GradPlan,
    MethodAssignment,
    Metric,
    TrainingTrace,
)
from .exceptions import (
    CircuitError,
    ConfigurationError,
    CostModelError,
    DataError,
    GradientError,
    GroupingError,
    NotPSRCompatible,
    PauliError,
    QADError,
)
from .gradfirst import evaluate_plan, full_gradient, gradient
from .pauli import PauliSum, PauliWord
from .qad import build_gradient, select

__version__ = "0.1.0"

__all__ = [
    "PQC",
    "Circuit",
    "Gate",
    "StateVector",
    "eval_cost",
    "PauliSum",
    "PauliWord",
    "GradientMethod",
    "GradPlan",
    "DerivativeIndex",
    "ErrorTable",
    "CostReport",
    "MethodAssignment",
    "Metric",
    "TrainingTrace",
    "gradient",
    "full_gradient",
    "evaluate_plan",
    "select",
    "build_gradient",
    "QADError",
    "PauliError",
    "CircuitError",
    "GroupingError",
    "NotPSRCompatible",
    "GradientError",
    "CostModelError",
    "ConfigurationError",
    "DataError",
]
