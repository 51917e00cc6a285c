"""Benchmark problems, gradient-descent training and the DHT/RDHT ratio sweep."""

import csv
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy import linalg
from sklearn import datasets, preprocessing

from .circuit import (
    PQC,
    Circuit,
    ControlledPauli,
    DenseUnitary,
    Gate,
    GateOp,
    GeneratorRotation,
    PauliRotation,
    circuit_unitary,
    eval_cost,
)
from .config import get_settings
from .cost import first_order_count, plan_counts
from .data_types import (
    QUANTUM_METHODS,
    Dataset,
    ErrorTable,
    GradientMethod,
    Metric,
    TrainingTrace,
    parse_method,
)
from .exceptions import CircuitError, CostModelError, DataError, NotPSRCompatible
from .gradfirst import Seed, full_gradient, task_seeds
from .grouping import Criterion, group_count
from .pauli import PauliSum, PauliWord
from .qad import build_gradient, method_count, select


logger = logging.getLogger(__name__)

GradientFn = Callable[[PQC, np.ndarray, Seed], np.ndarray]

IRIS_COLUMNS = ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"]


def _word(num_qubits: int, letters: Dict[int, str]) -> PauliWord:
    return PauliWord.from_label(
        "".join(letters.get(q, "I") for q in range(num_qubits))
    )


def _edge_sum(num_qubits: int, edges: Iterable[Tuple[int, int]], coeff: float = 1.0) -> PauliSum:
    return PauliSum(
        [(coeff, _word(num_qubits, {u: "Z", v: "Z"})) for u, v in edges], num_qubits
    )


def _field_sum(num_qubits: int, letter: str, coeff: float = 1.0) -> PauliSum:
    return PauliSum(
        [(coeff, PauliWord.single(num_qubits, q, letter)) for q in range(num_qubits)], num_qubits
    )


# --- QAOA MaxCut -----------------------------------------------------------


@dataclass
class QAOAProblem:
    """MaxCut QAOA with alternating cost and mixer layers."""

    graph: nx.Graph
    layers: int
    pqc: PQC
    name: str = "qaoa"

    def initial_theta(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(0.0, np.pi / 4, self.pqc.n_params)

    def default_learning_rate(self) -> float:
        return get_settings().learning_rate

    def loss(self, theta: Sequence[float]) -> float:
        return eval_cost(self.pqc, theta)

    def loss_gradient(self, theta: np.ndarray, gradient: GradientFn, seed: Seed) -> np.ndarray:
        return gradient(self.pqc, theta, seed)


def load_graph(path: Union[str, Path]) -> nx.Graph:
    """Read an edge list with one "u v" pair per line."""
    if not Path(path).exists():
        raise FileNotFoundError(f"Graph file not found: {path}")
    try:
        graph = nx.read_edgelist(str(path), nodetype=int)
    except (TypeError, ValueError, IndexError) as e:
        raise DataError(f"Malformed edge list {path}: {e}") from e
    logger.info(f"Loaded graph {path}: {graph.number_of_nodes()} nodes, {graph.number_of_edges()} edges")
    return graph


def build_qaoa(graph: Union[nx.Graph, Iterable[Tuple[int, int]]], layers: int = 1) -> QAOAProblem:
    """QAOA PQC on |0...0> with generators sum ZZ (cost) and sum X (mixer).

    Raises:
        DataError: If the graph has no edges or is disconnected
        CircuitError: If `layers` is not positive
    """
    if not isinstance(graph, nx.Graph):
        graph = nx.Graph(list(graph))
    if graph.number_of_edges() == 0:
        raise DataError("MaxCut graph has no edges")
    if not nx.is_connected(graph):
        raise DataError("MaxCut graph must be connected")
    if layers < 1:
        raise CircuitError(f"QAOA needs at least one layer, got {layers}")

    graph = nx.convert_node_labels_to_integers(graph, ordering="sorted")
    num_qubits = graph.number_of_nodes()
    cost = _edge_sum(num_qubits, sorted(tuple(sorted(e)) for e in graph.edges()))
    mixer = _field_sum(num_qubits, "X")
    gates: List[Gate] = []
    for layer in range(layers):
        gates.append(Gate(cost, f"gamma_{layer}"))
        gates.append(Gate(mixer, f"beta_{layer}"))
    return QAOAProblem(graph, layers, PQC(num_qubits, tuple(gates), cost))


# --- QAQC with the Hilbert-Schmidt test ------------------------------------


def topology_edges(num_qubits: int, topology: str = "ring") -> List[Tuple[int, int]]:
    """Nearest-neighbour pairs; a ring closes the line when it has three or more qubits."""
    if topology not in ("ring", "line"):
        raise CircuitError(f"Unknown topology '{topology}'")
    edges = [(q, q + 1) for q in range(num_qubits - 1)]
    if topology == "ring" and num_qubits > 2:
        edges.append((0, num_qubits - 1))
    return edges


def ansatz_unitary(
    num_qubits: int, theta: Sequence[float], layers: int, topology: str = "ring"
) -> np.ndarray:
    """Dense V = prod_k exp(-i t_k1 sum ZZ) exp(-i t_k2 sum X), layer 0 applied first.

    `theta` uses the circuit order [t_02, t_01, t_12, t_11, ...].
    """
    values = np.asarray(theta, dtype=float)
    zz = _edge_sum(num_qubits, topology_edges(num_qubits, topology)).to_matrix()
    xs = _field_sum(num_qubits, "X").to_matrix()
    unitary = np.eye(1 << num_qubits, dtype=complex)
    for layer in range(layers):
        t_x, t_zz = values[2 * layer], values[2 * layer + 1]
        unitary = linalg.expm(-1j * t_zz * zz) @ linalg.expm(-1j * t_x * xs) @ unitary
    return unitary


def hst_cost_dense(target: np.ndarray, unitary: np.ndarray) -> float:
    """1 - |Tr(V^dagger U)|^2 / d^2."""
    dim = target.shape[0]
    overlap = np.trace(unitary.conj().T @ target)
    return float(1.0 - abs(overlap) ** 2 / dim ** 2)


def _qft(num_qubits: int) -> np.ndarray:
    dim = 1 << num_qubits
    rows, cols = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(2j * np.pi * rows * cols / dim) / np.sqrt(dim)


def _toffoli(num_qubits: int) -> np.ndarray:
    unitary = np.eye(8, dtype=complex)
    unitary[[6, 7]] = unitary[[7, 6]]
    return unitary


def _wstate(num_qubits: int) -> np.ndarray:
    def ry(qubit: int, angle: float) -> GateOp:
        return PauliRotation(PauliWord.single(3, qubit, "Y"), angle)

    def cnot(control: int, target: int) -> GateOp:
        return ControlledPauli(control, 1, PauliWord.single(3, target, "X"))

    phi = np.arccos(1 / np.sqrt(3))
    ops = (
        ry(0, 2 * phi),
        # controlled RY(pi/2) from qubit 0 onto qubit 1
        ry(1, np.pi / 4),
        cnot(0, 1),
        ry(1, -np.pi / 4),
        cnot(0, 1),
        cnot(1, 2),
        cnot(0, 1),
        PauliRotation(PauliWord.single(3, 0, "X"), np.pi),
    )
    return circuit_unitary(Circuit(3, ops))


def _ising(num_qubits: int, angles: Tuple[float, float] = (0.4, 0.3)) -> np.ndarray:
    t_zz, t_x = angles
    return ansatz_unitary(num_qubits, [t_x, t_zz], 1)


QAQC_TARGETS: Dict[str, Callable[[int], np.ndarray]] = {
    "qft": _qft,
    "toffoli": _toffoli,
    "wstate": _wstate,
    "ising": _ising,
}

_FIXED_WIDTH = {"toffoli": 3, "wstate": 3}


def hst_observable(num_qubits: int) -> PauliSum:
    """I - prod_i (II + XX - YY + ZZ)/4 over the pairs (i, N + i)."""
    width = 2 * num_qubits
    pair_terms = (("I", 1.0), ("X", 1.0), ("Y", -1.0), ("Z", 1.0))
    terms: List[Tuple[float, PauliWord]] = [(1.0, PauliWord.identity(width))]
    for choice in itertools.product(pair_terms, repeat=num_qubits):
        letters: Dict[int, str] = {}
        coeff = 1.0
        for q, (letter, sign) in enumerate(choice):
            letters[q] = letters[num_qubits + q] = letter
            coeff *= sign / 4.0
        terms.append((-coeff, _word(width, letters)))
    return PauliSum(terms, width)


@dataclass
class QAQCProblem:
    """Compile `target` into the Ising ansatz by minimising the HST cost."""

    target_name: str
    target: np.ndarray
    layers: int
    topology: str
    pqc: PQC
    name: str = "qaqc"

    @property
    def num_qubits(self) -> int:
        return self.pqc.qubit_count // 2

    def initial_theta(self, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(0.0, 0.05, self.pqc.n_params)

    def default_learning_rate(self) -> float:
        return get_settings().learning_rate

    def loss(self, theta: Sequence[float]) -> float:
        return eval_cost(self.pqc, theta)

    def loss_gradient(self, theta: np.ndarray, gradient: GradientFn, seed: Seed) -> np.ndarray:
        return gradient(self.pqc, theta, seed)

    def dense_cost(self, theta: Sequence[float]) -> float:
        unitary = ansatz_unitary(self.num_qubits, theta, self.layers, self.topology)
        return hst_cost_dense(self.target, unitary)


def build_qaqc(
    target: Union[str, np.ndarray],
    layers: int = 1,
    topology: str = "ring",
    num_qubits: int = 3,
) -> QAQCProblem:
    """HST PQC on 2N qubits: Bell pairs (i, N+i), U on register A, V* on register B.

    Args:
        target: Target name (qft, toffoli, wstate, ising) or a dense unitary
        layers: Trotter layers of the ansatz
        topology: "ring" or "line" coupling of the ZZ generator
        num_qubits: System size N when `target` is a name

    Returns:
        QAQCProblem whose PQC evaluates to the HST cost

    Raises:
        CircuitError: On size limits, unknown targets or a bad layer count
    """
    if isinstance(target, str):
        name = target.lower()
        if name not in QAQC_TARGETS:
            raise CircuitError(f"Unknown QAQC target '{target}'")
        if name in _FIXED_WIDTH and num_qubits != _FIXED_WIDTH[name]:
            raise CircuitError(f"Target '{name}' acts on {_FIXED_WIDTH[name]} qubits")
        unitary = QAQC_TARGETS[name](num_qubits)
    else:
        name = "custom"
        unitary = np.asarray(target, dtype=complex)
        num_qubits = int(np.log2(unitary.shape[0]))
        if unitary.shape != (1 << num_qubits, 1 << num_qubits):
            raise CircuitError(f"Target unitary has shape {unitary.shape}")
    if not 2 <= num_qubits <= 3:
        raise CircuitError(f"QAQC supports 2 or 3 system qubits, got {num_qubits}")
    if layers < 1:
        raise CircuitError(f"QAQC ansatz needs at least one layer, got {layers}")

    width = 2 * num_qubits
    register_b = list(range(num_qubits, width))
    hadamard = PauliSum(
        [(1 / np.sqrt(2), "X"), (1 / np.sqrt(2), "Z")], 1
    )
    prep: List[GateOp] = []
    for q in range(num_qubits):
        prep.append(GeneratorRotation(hadamard.embed([q], width), np.pi))
        prep.append(ControlledPauli(q, 1, PauliWord.single(width, num_qubits + q, "X")))
    prep.append(DenseUnitary(tuple(range(num_qubits)), unitary))

    zz = _edge_sum(num_qubits, topology_edges(num_qubits, topology), -2.0).embed(register_b, width)
    xs = _field_sum(num_qubits, "X", -2.0).embed(register_b, width)
    gates: List[Gate] = []
    for layer in range(layers):
        gates.append(Gate(xs, f"theta_{layer}_2"))
        gates.append(Gate(zz, f"theta_{layer}_1"))

    pqc = PQC(
        width,
        tuple(gates),
        hst_observable(num_qubits),
        Circuit(width, tuple(prep)),
        projector_readout=True,
    )
    return QAQCProblem(name, unitary, layers, topology, pqc)


# --- QNN on Iris -----------------------------------------------------------


def qnn_ansatz(alpha_seed: int = 42) -> PQC:
    """Three-gate ansatz: XXXX, a random sum over {I,Z}^4 and the sum over {I,X}^4."""
    num_qubits = 4
    rng = np.random.default_rng(alpha_seed)
    z_words = ["".join(p) for p in itertools.product("IZ", repeat=num_qubits)]
    x_words = ["".join(p) for p in itertools.product("IX", repeat=num_qubits)]
    alphas = rng.uniform(-1.0, 1.0, len(z_words))
    h1 = PauliSum([(1.0, "XXXX")])
    h2 = PauliSum(list(zip(alphas, z_words)))
    h3 = PauliSum([(1.0, label) for label in x_words])
    observable = _edge_sum(num_qubits, topology_edges(num_qubits, "ring"))
    gates = (Gate(h1, "theta_1"), Gate(h2, "theta_2"), Gate(h3, "theta_3"))
    return PQC(num_qubits, gates, observable)


def encode_features(features: Sequence[float]) -> Circuit:
    """RY(x_i) on qubit i."""
    ops = tuple(
        PauliRotation(PauliWord.single(len(features), q, "Y"), float(x))
        for q, x in enumerate(features)
    )
    return Circuit(len(features), ops)


@dataclass
class QNNProblem:
    """Binary classifier: prediction <O> / sum|coeff(O)|, mean squared error loss."""

    dataset: Dataset
    pqc: PQC
    name: str = "qnn"
    _samples: List[PQC] = field(default_factory=list, init=False, repr=False)

    def __post_init__(self) -> None:
        self._samples = [
            PQC(self.pqc.qubit_count, self.pqc.gates, self.pqc.observable, encode_features(x))
            for x in self.dataset.features
        ]

    @property
    def scale(self) -> float:
        return float(sum(abs(c) for c in self.pqc.observable.coefficients))

    @property
    def samples(self) -> List[PQC]:
        return self._samples

    def initial_theta(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-np.pi, np.pi, self.pqc.n_params)

    def default_learning_rate(self) -> float:
        return get_settings().qnn_learning_rate

    def predict(self, theta: Sequence[float]) -> np.ndarray:
        return np.array([eval_cost(pqc, theta) / self.scale for pqc in self._samples])

    def accuracy(self, theta: Sequence[float]) -> float:
        predictions = np.where(self.predict(theta) >= 0, 1.0, -1.0)
        return float(np.mean(predictions == self.dataset.labels))

    def loss(self, theta: Sequence[float]) -> float:
        return float(np.mean((self.predict(theta) - self.dataset.labels) ** 2))

    def loss_gradient(self, theta: np.ndarray, gradient: GradientFn, seed: Seed) -> np.ndarray:
        residuals = self.predict(theta) - self.dataset.labels
        seeds = task_seeds(len(self._samples), seed)
        total = np.zeros(self.pqc.n_params)
        for pqc, residual, sample_seed in zip(self._samples, residuals, seeds):
            total += residual * gradient(pqc, theta, sample_seed)
        return 2.0 * total / (self.scale * len(self._samples))


def build_qnn(dataset: Dataset, alpha_seed: int = 42) -> QNNProblem:
    return QNNProblem(dataset, qnn_ansatz(alpha_seed))


def _species(name: str) -> str:
    name = name.strip()
    return name[len("Iris-"):] if name.startswith("Iris-") else name


def _read_iris_csv(path: Union[str, Path]) -> Tuple[np.ndarray, List[str]]:
    rows: List[List[float]] = []
    names: List[str] = []
    with open(path, newline="", encoding="utf-8") as handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            if not row or not any(cell.strip() for cell in row):
                continue
            if lineno == 1 and row[0].strip().lower() == IRIS_COLUMNS[0]:
                continue
            if len(row) < len(IRIS_COLUMNS):
                raise DataError(f"Row {lineno} of {path}: expected 5 columns, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row[:4]])
            except ValueError as e:
                raise DataError(f"Row {lineno} of {path}: {e}") from e
            names.append(_species(row[4]))
    if not rows:
        raise DataError(f"No samples in {path}")
    return np.array(rows), names


def load_iris(
    path: Optional[Union[str, Path]] = None,
    classes: Tuple[str, str] = ("setosa", "versicolor"),
) -> Dataset:
    """Two-class Iris data with features scaled to [0, pi].

    Args:
        path: CSV file; the copy bundled with scikit-learn when None
        classes: Species mapped to labels -1 and +1

    Returns:
        Dataset in file order

    Raises:
        FileNotFoundError: If `path` does not exist
        DataError: On malformed rows or unknown class names
    """
    if path is None:
        bundled = datasets.load_iris()
        features = np.asarray(bundled.data, dtype=float)
        names = [str(bundled.target_names[t]) for t in bundled.target]
    else:
        if not Path(path).exists():
            raise FileNotFoundError(f"Iris file not found: {path}")
        features, names = _read_iris_csv(path)

    wanted = tuple(_species(c) for c in classes)
    for name in wanted:
        if name not in names:
            raise DataError(f"Unknown class '{name}'; available: {sorted(set(names))}")
    keep = [i for i, name in enumerate(names) if name in wanted]
    labels = np.array([-1.0 if names[i] == wanted[0] else 1.0 for i in keep])
    selected = features[keep]

    for column in np.flatnonzero(np.ptp(selected, axis=0) == 0):
        logger.warning(f"Feature column {column} is constant; scaled to 0")
    scaler = preprocessing.MinMaxScaler(feature_range=(0.0, np.pi))
    scaled = scaler.fit_transform(selected)
    logger.info(f"Loaded {len(keep)} Iris samples for classes {wanted}")
    return Dataset(scaled, labels, (wanted[0], wanted[1]))


# --- training --------------------------------------------------------------


Problem = Union[QAOAProblem, QAQCProblem, QNNProblem]


def iteration_count(pqc: PQC, method: Union[str, GradientMethod]) -> int:
    """Distinct circuits per gradient evaluation with one method for all parameters.

    PSR is counted after decomposing every generator into commuting terms and
    finite differences as two evaluations per parameter.
    """
    resolved = parse_method(method)
    if resolved is GradientMethod.FD:
        return 2 * pqc.n_params
    total = 0
    for j in range(1, pqc.n_params + 1):
        if resolved is GradientMethod.PSR:
            if not pqc.generator(j).non_identity().is_commuting():
                raise NotPSRCompatible(f"Generator of parameter {j} cannot be decomposed")
            total += first_order_count(resolved, *plan_counts(pqc, j))
        else:
            total += method_count(pqc, j, resolved)
    return total


def iteration_counts(
    pqc: PQC, metric: Union[str, Metric] = Metric.COUNT, errors: Optional[ErrorTable] = None
) -> Dict[str, int]:
    """Per-iteration circuit counts for every quantum method and for QAD."""
    counts = {}
    for method in QUANTUM_METHODS:
        try:
            counts[method.value] = iteration_count(pqc, method)
        except NotPSRCompatible:
            logger.info(f"{method.label} not applicable to every parameter")
    counts["qad"] = select(pqc, metric, errors).aggregate_count
    return counts


def gradient_function(
    pqc: PQC,
    method: str,
    metric: Union[str, Metric] = Metric.COUNT,
    errors: Optional[ErrorTable] = None,
    shots: Optional[int] = None,
    parallel: bool = False,
) -> Tuple[GradientFn, int]:
    """Gradient callable for `method` (a gradient method name or "qad") and its count."""
    if method.lower() == "qad":
        methods = select(pqc, metric, errors).methods

        def qad_gradient(target: PQC, theta: np.ndarray, seed: Seed) -> np.ndarray:
            return build_gradient(target, methods, shots, seed, parallel)(theta)

        return qad_gradient, build_gradient(pqc, methods).circuits_per_iteration

    resolved = parse_method(method)
    decompose = resolved is GradientMethod.PSR

    def method_gradient(target: PQC, theta: np.ndarray, seed: Seed) -> np.ndarray:
        return full_gradient(target, theta, resolved, shots, seed, decompose)

    return method_gradient, iteration_count(pqc, resolved)


def train(
    problem: Problem,
    method: str = "qad",
    steps: Optional[int] = None,
    learning_rate: Optional[float] = None,
    seed: Optional[int] = None,
    metric: Union[str, Metric] = Metric.COUNT,
    errors: Optional[ErrorTable] = None,
    shots: Optional[int] = None,
    theta0: Optional[Sequence[float]] = None,
    parallel: bool = False,
) -> TrainingTrace:
    """Plain gradient descent theta <- theta - eta * grad(loss).

    Args:
        problem: Benchmark problem
        method: Gradient method name or "qad"
        steps: Iterations (settings default when None)
        learning_rate: Step size (problem default when None)
        seed: Seed for the initial point and shot sampling
        metric: QAD metric
        errors: Error table for the EFR metric
        shots: Shots per measurement group, None for exact simulation
        theta0: Initial parameters; drawn from `seed` when None
        parallel: Evaluate QAD plans on the worker pool

    Returns:
        TrainingTrace with the loss before every step and after the last
    """
    settings = get_settings()
    steps = settings.training_steps if steps is None else steps
    seed = settings.seed if seed is None else seed
    eta = problem.default_learning_rate() if learning_rate is None else learning_rate
    if steps < 0:
        raise CostModelError(f"Step count must be non-negative, got {steps}")

    rng = np.random.default_rng(seed)
    theta = (
        problem.initial_theta(rng) if theta0 is None else problem.pqc.check_theta(theta0).copy()
    )
    gradient, circuits = gradient_function(
        problem.pqc, method, metric, errors, shots, parallel
    )
    step_seeds = task_seeds(steps, seed)

    losses = [problem.loss(theta)]
    logger.info(
        f"Training {problem.name} with {method}: {circuits} circuits per iteration, "
        f"eta={eta}, initial loss {losses[0]:.6f}"
    )
    for step in range(steps):
        theta = theta - eta * problem.loss_gradient(theta, gradient, step_seeds[step])
        losses.append(problem.loss(theta))
        if (step + 1) % settings.log_every == 0:
            logger.info(f"{problem.name} step {step + 1}/{steps}: loss {losses[-1]:.6f}")
    return TrainingTrace(method, losses, circuits, theta)


# --- DHT vs RDHT ratio sweep -----------------------------------------------


def _majorana_words(num_qubits: int) -> List[PauliWord]:
    words = []
    for m in range(num_qubits):
        for letter in ("X", "Y"):
            letters = {q: "Z" for q in range(m)}
            letters[m] = letter
            words.append(_word(num_qubits, letters))
    return words


def synthetic_operator(num_qubits: int, fraction: float) -> PauliSum:
    """Operator of M = min(2N+1, 2^N-1) terms, round(f*M) of them in one commuting block.

    The block holds Z^N and further Z-type words; the remaining terms are
    Majorana strings Z..ZX, Z..ZY that anticommute with Z^N and with each
    other, so each is a group of its own.
    """
    if num_qubits < 2:
        raise CostModelError("Ratio sweep needs at least two qubits")
    if not 0.0 <= fraction <= 1.0:
        raise CostModelError(f"Commuting fraction must lie in [0, 1], got {fraction}")
    size = min(2 * num_qubits + 1, (1 << num_qubits) - 1)
    block = int(round(fraction * size))
    full_z = PauliWord(num_qubits, 0, (1 << num_qubits) - 1)
    majoranas = _majorana_words(num_qubits)
    if block == 0:
        return PauliSum([(1.0, w) for w in [full_z] + majoranas[: size - 1]], num_qubits)

    others = [
        PauliWord(num_qubits, 0, mask)
        for mask in range(1, (1 << num_qubits) - 1)
    ][: block - 1]
    terms = [(2.0, w) for w in [full_z] + others]
    terms += [(1.0, w) for w in majoranas[: size - block]]
    return PauliSum(terms, num_qubits)


@dataclass
class RatioSweep:
    """DHT/RDHT circuit-count ratios; rows follow the observable fraction."""

    num_qubits: int
    terms: int
    fractions: List[float]
    matrix: np.ndarray

    def to_rows(self) -> List[Dict[str, Any]]:
        return [
            {"o_fraction": fo, "h_fraction": fh, "ratio": float(self.matrix[r, c])}
            for r, fo in enumerate(self.fractions)
            for c, fh in enumerate(self.fractions)
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "num_qubits": self.num_qubits,
            "terms": self.terms,
            "fractions": self.fractions,
            "matrix": self.matrix.tolist(),
        }


def ratio_sweep(num_qubits: int, fractions: Optional[Sequence[float]] = None) -> RatioSweep:
    """DHT count 2 N(H) N_cm(O) over RDHT count 2 N_cm(H) N(O) on synthetic operators."""
    grid = [round(0.1 * i, 10) for i in range(1, 11)] if fractions is None else list(fractions)
    for value in grid:
        if not 0.0 < value <= 1.0:
            raise CostModelError(f"Grid fractions must lie in (0, 1], got {value}")
    operators = [synthetic_operator(num_qubits, f) for f in grid]
    counts = [(op.term_count, group_count(op, Criterion.FULL)) for op in operators]

    matrix = np.zeros((len(grid), len(grid)))
    for r, (n_o, ncm_o) in enumerate(counts):
        for c, (n_h, ncm_h) in enumerate(counts):
            dht = first_order_count(GradientMethod.DHT, n_h, ncm_h, n_o, ncm_o)
            rdht = first_order_count(GradientMethod.RDHT, n_h, ncm_h, n_o, ncm_o)
            matrix[r, c] = dht / rdht
    return RatioSweep(num_qubits, counts[0][0], grid, matrix)
