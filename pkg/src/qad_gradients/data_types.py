"""Data type definitions shared by the gradient, cost and benchmark modules."""

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .circuit import Circuit
from .config import get_settings
from .exceptions import (
    ConfigurationError,
    CostModelError,
    DataError,
    GradientError,
    NotPSRCompatible,
)
from .grouping import Grouping
from .pauli import PauliSum


class GradientMethod(str, Enum):
    """First-order gradient estimators."""

    FD = "fd"
    PSR = "psr"
    HT = "ht"
    DHT = "dht"
    RHT = "rht"
    RDHT = "rdht"

    @property
    def label(self) -> str:
        return self.name


# Tie-break order used when two methods cost the same.
QUANTUM_METHODS = (
    GradientMethod.PSR,
    GradientMethod.HT,
    GradientMethod.DHT,
    GradientMethod.RHT,
    GradientMethod.RDHT,
)


class HigherOrderMethod(str, Enum):
    """k-th order derivative estimators."""

    PSR = "psr"
    HT = "ht"
    DHT = "dht"
    KFOLD = "kfold"


class Metric(str, Enum):
    """QAD selection metric."""

    COUNT = "count"
    EFR = "efr"


def parse_method(name: Union[str, GradientMethod]) -> GradientMethod:
    try:
        return GradientMethod(str(name.value if isinstance(name, Enum) else name).lower())
    except ValueError as e:
        raise GradientError(f"Unknown gradient method '{name}'") from e


@dataclass(frozen=True)
class GradTask:
    """One circuit whose grouped expectation enters a plan with `weight`."""

    circuit: Circuit
    observable: PauliSum
    grouping: Grouping
    weight: float


@dataclass
class GradPlan:
    """Weighted circuit tasks whose expectation sum is a derivative."""

    method: str
    index: Tuple[int, ...]
    tasks: List[GradTask]
    distinct_circuit_count: int
    qubits: int
    depth: int

    @property
    def task_count(self) -> int:
        return len(self.tasks)

    def summary(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "index": list(self.index),
            "tasks": self.task_count,
            "distinct_circuits": self.distinct_circuit_count,
            "qubits": self.qubits,
            "depth": self.depth,
        }


@dataclass(frozen=True)
class PSRShift:
    """Two-eigenvalue shift rule constants: c = (h2 - h1)/4, shift = pi/(4c)."""

    h1: float
    h2: float

    def __post_init__(self) -> None:
        if not self.h2 > self.h1:
            raise NotPSRCompatible(f"Eigenvalues must satisfy h2 > h1, got {self.h1}, {self.h2}")

    @property
    def c(self) -> float:
        return (self.h2 - self.h1) / 4.0

    @property
    def shift(self) -> float:
        return np.pi / (4.0 * self.c)

    @classmethod
    def from_generator(cls, generator: PauliSum) -> "PSRShift":
        spectrum = generator.eigen_spectrum()
        if len(spectrum) != 2:
            raise NotPSRCompatible(
                f"Generator has {len(spectrum)} distinct eigenvalues, shift rule needs 2"
            )
        return cls(spectrum[0], spectrum[1])


@dataclass(frozen=True)
class DerivativeIndex:
    """Sorted gate positions j_1 <= ... <= j_k (1-based) of a k-th derivative."""

    indices: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.indices:
            raise GradientError("Derivative index needs at least one gate position")
        object.__setattr__(self, "indices", tuple(sorted(int(j) for j in self.indices)))

    @property
    def order(self) -> int:
        return len(self.indices)

    def check(self, n_params: int) -> None:
        for j in self.indices:
            if not 1 <= j <= n_params:
                raise GradientError(f"Gate position {j} outside 1..{n_params}")

    @classmethod
    def parse(cls, text: str) -> "DerivativeIndex":
        try:
            return cls(tuple(int(part) for part in text.split(",") if part.strip()))
        except ValueError as e:
            raise GradientError(f"Malformed index list '{text}'") from e


@dataclass(frozen=True)
class ErrorTable:
    """Error probability per lowered gate kind ("cnot", "1q", "measure")."""

    rates: Mapping[str, float]

    def __post_init__(self) -> None:
        for kind, rate in self.rates.items():
            if not 0.0 <= float(rate) < 1.0:
                raise ConfigurationError(f"Error rate for '{kind}' must lie in [0, 1), got {rate}")

    def probability(self, kind: str) -> float:
        if kind not in self.rates:
            raise CostModelError(f"Error table has no rate for gate kind '{kind}'")
        return float(self.rates[kind])

    def scaled(self, factor: float) -> "ErrorTable":
        return ErrorTable({kind: rate * factor for kind, rate in self.rates.items()})

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "ErrorTable":
        try:
            return cls({str(kind): float(rate) for kind, rate in mapping.items()})
        except (TypeError, ValueError) as e:
            raise DataError(f"Malformed error table: {e}") from e

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ErrorTable":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise DataError(f"Cannot read error table {path}: {e}") from e
        if not isinstance(data, dict):
            raise DataError(f"Error table {path} must be a JSON object")
        return cls.from_mapping(data)

    @classmethod
    def default(cls) -> "ErrorTable":
        return cls(dict(get_settings().error_rates))


@dataclass
class CostReport:
    """Static cost of one gradient method for one parameter."""

    method: GradientMethod
    distinct_circuits: int
    qubits: int
    depth: int
    cnot_count: int
    efr: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["method"] = self.method.label
        return data


@dataclass
class MethodAssignment:
    """Chosen method per parameter with the reports it was chosen from."""

    metric: Metric
    methods: List[GradientMethod]
    reports: List[Dict[GradientMethod, CostReport]]
    param_names: List[str] = field(default_factory=list)

    @property
    def aggregate_count(self) -> int:
        """Distinct circuits per gradient evaluation."""
        return sum(
            reports[method].distinct_circuits
            for method, reports in zip(self.methods, self.reports)
        )

    def to_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for j, (method, reports) in enumerate(zip(self.methods, self.reports), start=1):
            for candidate, report in reports.items():
                row: Dict[str, Any] = {
                    "param": j,
                    "name": self.param_names[j - 1] if self.param_names else f"theta_{j}",
                    "chosen": candidate is method,
                }
                row.update(report.to_dict())
                rows.append(row)
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metric": self.metric.value,
            "methods": [m.label for m in self.methods],
            "distinct_circuits": self.aggregate_count,
            "reports": self.to_rows(),
        }


@dataclass
class TrainingTrace:
    """Loss history of a gradient-descent run."""

    method: str
    losses: List[float]
    circuits: int
    theta: np.ndarray

    @property
    def final_loss(self) -> float:
        return self.losses[-1]

    def to_rows(self) -> List[Dict[str, Any]]:
        return [
            {"iteration": i, "loss": loss, "distinct_circuits": self.circuits}
            for i, loss in enumerate(self.losses)
        ]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=["iteration", "loss", "distinct_circuits"])
        writer.writeheader()
        writer.writerows(self.to_rows())
        return buffer.getvalue()

    def summary(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "iterations": len(self.losses) - 1,
            "initial_loss": self.losses[0],
            "final_loss": self.final_loss,
            "distinct_circuits_per_iteration": self.circuits,
            "theta": [float(v) for v in self.theta],
        }


@dataclass
class Dataset:
    """Feature matrix with +/-1 labels."""

    features: np.ndarray
    labels: np.ndarray
    classes: Tuple[str, str]

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def subset(self, rows: Sequence[int]) -> "Dataset":
        rows = list(rows)
        return Dataset(self.features[rows], self.labels[rows], self.classes)
