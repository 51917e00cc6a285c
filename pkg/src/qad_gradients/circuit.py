"""Gate-level circuit IR, dense statevector simulator and the PQC model."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import get_settings
from .exceptions import CircuitError, DataError, GroupingError, PauliError
from .grouping import Criterion, Grouping, basis_rotation
from .pauli import PauliSum, PauliWord, pauli_action


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Dense amplitude vector of 2^Q complex numbers."""

    amplitudes: np.ndarray

    @property
    def qubit_count(self) -> int:
        return int(self.amplitudes.shape[0]).bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        return cls.basis(num_qubits, 0)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        _check_cap(num_qubits)
        amplitudes = np.zeros(1 << num_qubits, dtype=complex)
        amplitudes[index] = 1.0
        return cls(amplitudes)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "StateVector":
        vector = np.asarray(amplitudes, dtype=complex).reshape(-1)
        size = vector.shape[0]
        if size < 1 or size & (size - 1):
            raise CircuitError(f"State length {size} is not a power of two")
        norm = np.linalg.norm(vector)
        if abs(norm - 1.0) > 1e-8:
            raise CircuitError(f"State is not normalized (norm {norm:.6g})")
        return cls(vector)


# --- gate operations -------------------------------------------------------


@dataclass(frozen=True)
class PauliRotation:
    """exp(-i * angle * word / 2)."""

    word: PauliWord
    angle: float

    @property
    def qubits(self) -> List[int]:
        return self.word.support


@dataclass(frozen=True)
class GeneratorRotation:
    """exp(-i * angle * generator / 2)."""

    generator: PauliSum
    angle: float

    @property
    def qubits(self) -> List[int]:
        support = set()
        for _, word in self.generator:
            support.update(word.support)
        return sorted(support)


@dataclass(frozen=True)
class ControlledPauli:
    """Apply `word` on the branch where `control` reads `value`."""

    control: int
    value: int
    word: PauliWord

    @property
    def qubits(self) -> List[int]:
        return [self.control] + self.word.support


@dataclass(frozen=True)
class AncillaPrep:
    """Take |0> on `qubit` to (|0> + phase|1>)/sqrt(2).

    The default phase -1j prepares (|0> - i|1>)/sqrt(2); +1j gives its conjugate
    and 1 the |+> state used for real-part tests.
    """

    qubit: int
    phase: complex = -1j

    @property
    def qubits(self) -> List[int]:
        return [self.qubit]

    def matrix(self) -> np.ndarray:
        p = complex(self.phase)
        return np.array([[1.0, -np.conj(p)], [p, 1.0]], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DenseUnitary:
    """Fixed unitary on a qubit subset (qubits[0] is the most significant bit)."""

    targets: Tuple[int, ...]
    matrix: np.ndarray

    @property
    def qubits(self) -> List[int]:
        return list(self.targets)


@dataclass(frozen=True)
class InverseSegment:
    """Apply the dagger of `ops` in reverse order."""

    ops: Tuple[Any, ...]

    @property
    def qubits(self) -> List[int]:
        support = set()
        for op in self.ops:
            support.update(op.qubits)
        return sorted(support)


GateOp = Union[
    PauliRotation, GeneratorRotation, ControlledPauli, AncillaPrep, DenseUnitary, InverseSegment
]


def dagger(op: GateOp) -> GateOp:
    """Inverse of a gate operation."""
    if isinstance(op, PauliRotation):
        return PauliRotation(op.word, -op.angle)
    if isinstance(op, GeneratorRotation):
        return GeneratorRotation(op.generator, -op.angle)
    if isinstance(op, ControlledPauli):
        return op
    if isinstance(op, AncillaPrep):
        return DenseUnitary((op.qubit,), op.matrix().conj().T)
    if isinstance(op, DenseUnitary):
        return DenseUnitary(op.targets, op.matrix.conj().T)
    if isinstance(op, InverseSegment):
        return InverseSegment(tuple(dagger(inner) for inner in reversed(op.ops)))
    raise CircuitError(f"Unknown gate operation: {op!r}")


def _check_cap(num_qubits: int) -> None:
    cap = get_settings().max_qubits
    if num_qubits > cap:
        raise CircuitError(f"{num_qubits} qubits exceed the simulator cap of {cap}")


def _check_word(word: PauliWord, width: int) -> None:
    if word.num_qubits != width:
        raise CircuitError(f"Word '{word.label}' does not match register width {width}")


def _apply_word(amplitudes: np.ndarray, word: PauliWord) -> np.ndarray:
    targets, phases = pauli_action(word.num_qubits, word.x, word.z)
    out = np.empty_like(amplitudes)
    out[targets] = phases * amplitudes
    return out


def _apply_matrix(
    amplitudes: np.ndarray, num_qubits: int, targets: Sequence[int], matrix: np.ndarray
) -> np.ndarray:
    k = len(targets)
    if matrix.shape != (1 << k, 1 << k):
        raise CircuitError(f"Matrix of shape {matrix.shape} does not act on {k} qubits")
    tensor = amplitudes.reshape([2] * num_qubits)
    tensor = np.moveaxis(tensor, list(targets), list(range(k)))
    shape = tensor.shape
    tensor = (matrix @ tensor.reshape(1 << k, -1)).reshape(shape)
    tensor = np.moveaxis(tensor, list(range(k)), list(targets))
    return np.ascontiguousarray(tensor).reshape(-1)


def _local_matrix(generator: PauliSum, support: Sequence[int]) -> np.ndarray:
    local = PauliSum(
        [(c, PauliWord.from_label("".join(w.letter(q) for q in support))) for c, w in generator],
        len(support),
    )
    return local.to_matrix()


def _apply_generator(amplitudes: np.ndarray, width: int, op: GeneratorRotation) -> np.ndarray:
    generator = op.generator
    if generator.num_qubits != width:
        raise CircuitError(
            f"Generator width {generator.num_qubits} does not match register width {width}"
        )
    if op.angle == 0.0:
        return amplitudes.copy()
    if generator.is_commuting():
        out = amplitudes
        for coeff, word in generator:
            if word.is_identity:
                out = np.exp(-0.5j * coeff * op.angle) * out
            else:
                out = _rotate(out, word, coeff * op.angle)
        return out if out is not amplitudes else amplitudes.copy()

    support = op.qubits
    if len(support) > 8:
        logger.warning(f"Dense exponential on {len(support)} qubits for non-commuting generator")
    unitary = scipy.linalg.expm(-0.5j * op.angle * _local_matrix(generator, support))
    return _apply_matrix(amplitudes, width, support, unitary)


def _rotate(amplitudes: np.ndarray, word: PauliWord, angle: float) -> np.ndarray:
    return np.cos(angle / 2) * amplitudes - 1j * np.sin(angle / 2) * _apply_word(amplitudes, word)


def _check_qubits(op: GateOp, width: int) -> None:
    for qubit in op.qubits:
        if not 0 <= qubit < width:
            raise CircuitError(f"Qubit {qubit} out of range for {width}-qubit register")


def apply(state: StateVector, op: GateOp) -> StateVector:
    """Apply one gate operation, returning a new state."""
    width = state.qubit_count
    psi = state.amplitudes

    if isinstance(op, PauliRotation):
        _check_word(op.word, width)
        if not np.isfinite(op.angle):
            raise CircuitError(f"Non-finite rotation angle {op.angle}")
        return StateVector(_rotate(psi, op.word, op.angle))

    if isinstance(op, GeneratorRotation):
        if not np.isfinite(op.angle):
            raise CircuitError(f"Non-finite rotation angle {op.angle}")
        return StateVector(_apply_generator(psi, width, op))

    if isinstance(op, ControlledPauli):
        _check_word(op.word, width)
        _check_qubits(op, width)
        if op.word.letter(op.control) != "I":
            raise CircuitError(f"Controlled word '{op.word.label}' acts on its control qubit")
        bit = (np.arange(psi.shape[0]) >> (width - 1 - op.control)) & 1
        return StateVector(np.where(bit == op.value, _apply_word(psi, op.word), psi))

    if isinstance(op, AncillaPrep):
        _check_qubits(op, width)
        return StateVector(_apply_matrix(psi, width, [op.qubit], op.matrix()))

    if isinstance(op, DenseUnitary):
        _check_qubits(op, width)
        return StateVector(_apply_matrix(psi, width, op.targets, np.asarray(op.matrix, complex)))

    if isinstance(op, InverseSegment):
        for inner in reversed(op.ops):
            state = apply(state, dagger(inner))
        return state

    raise CircuitError(f"Unknown gate operation: {op!r}")


def remap_op(op: GateOp, positions: Sequence[int], width: int) -> GateOp:
    """Move qubit q of `op` onto positions[q] of a `width`-qubit register."""
    if isinstance(op, PauliRotation):
        return PauliRotation(op.word.embed(positions, width), op.angle)
    if isinstance(op, GeneratorRotation):
        return GeneratorRotation(op.generator.embed(positions, width), op.angle)
    if isinstance(op, ControlledPauli):
        return ControlledPauli(positions[op.control], op.value, op.word.embed(positions, width))
    if isinstance(op, AncillaPrep):
        return AncillaPrep(positions[op.qubit], op.phase)
    if isinstance(op, DenseUnitary):
        return DenseUnitary(tuple(positions[q] for q in op.targets), op.matrix)
    if isinstance(op, InverseSegment):
        return InverseSegment(tuple(remap_op(inner, positions, width) for inner in op.ops))
    raise CircuitError(f"Unknown gate operation: {op!r}")


@dataclass(frozen=True)
class Circuit:
    """Ordered gate operations on a fixed register."""

    qubit_count: int
    ops: Tuple[GateOp, ...] = ()
    bindings: Dict[str, float] = field(default_factory=dict, compare=False)

    def append(self, op: GateOp) -> "Circuit":
        return Circuit(self.qubit_count, self.ops + (op,), self.bindings)

    def extend(self, ops: Sequence[GateOp]) -> "Circuit":
        return Circuit(self.qubit_count, self.ops + tuple(ops), self.bindings)

    def dagger(self) -> "Circuit":
        return Circuit(
            self.qubit_count, tuple(dagger(op) for op in reversed(self.ops)), self.bindings
        )

    def remap(self, positions: Sequence[int], width: int) -> "Circuit":
        return Circuit(
            width, tuple(remap_op(op, positions, width) for op in self.ops), self.bindings
        )

    def widen(self, width: int) -> "Circuit":
        """Same circuit on a larger register; new qubits are appended at the end."""
        if width == self.qubit_count:
            return self
        return self.remap(range(self.qubit_count), width)

    def __len__(self) -> int:
        return len(self.ops)


def run(circuit: Circuit, state: Optional[StateVector] = None) -> StateVector:
    """Replay a circuit on `state` (default |0...0>)."""
    _check_cap(circuit.qubit_count)
    if state is None:
        state = StateVector.zero(circuit.qubit_count)
    elif state.qubit_count != circuit.qubit_count:
        raise CircuitError(
            f"State has {state.qubit_count} qubits, circuit has {circuit.qubit_count}"
        )
    for op in circuit.ops:
        state = apply(state, op)
    return state


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a circuit, built column by column."""
    dim = 1 << circuit.qubit_count
    columns = [run(circuit, StateVector.basis(circuit.qubit_count, i)).amplitudes for i in range(dim)]
    return np.stack(columns, axis=1)


# --- expectation values ----------------------------------------------------


def expectation(state: StateVector, obs: PauliSum) -> float:
    """Real part of <psi|O|psi>."""
    if obs.num_qubits != state.qubit_count:
        raise CircuitError(
            f"Observable width {obs.num_qubits} does not match state width {state.qubit_count}"
        )
    psi = state.amplitudes
    total = 0.0j
    for coeff, word in obs:
        total += coeff * np.vdot(psi, _apply_word(psi, word))
    if abs(total.imag) > 1e-8:
        logger.warning(f"Expectation has imaginary residue {total.imag:.3e}")
    return float(total.real)


def sample_expectation(
    state: StateVector,
    obs: PauliSum,
    grouping: Grouping,
    shots: int,
    seed: Optional[Union[int, np.random.SeedSequence]] = None,
) -> Tuple[float, float]:
    """Shot-sampled estimate of <O> with one measurement setting per group.

    Args:
        state: State to measure
        obs: Observable whose terms the grouping indexes
        grouping: QubitWise grouping of `obs`
        shots: Shots per group
        seed: PRNG seed

    Returns:
        Tuple of (estimate, standard error)

    Raises:
        GroupingError: If the grouping is not qubit-wise
    """
    if grouping.criterion is not Criterion.QUBITWISE:
        raise GroupingError("Shot sampling requires a qubit-wise grouping")
    if shots < 1:
        raise CircuitError(f"Shot count must be positive, got {shots}")
    width = state.qubit_count
    rng = np.random.Generator(np.random.Philox(seed))
    terms = obs.terms
    outcomes_index = np.arange(1 << width, dtype=np.int64)

    estimate = 0.0
    variance = 0.0
    for group in grouping.groups:
        words = [terms[i][1] for i in group]
        rotated = state
        for qubit, letter in basis_rotation(words):
            if letter == "X":
                rotated = apply(rotated, PauliRotation(PauliWord.single(width, qubit, "Y"), -np.pi / 2))
            elif letter == "Y":
                rotated = apply(rotated, PauliRotation(PauliWord.single(width, qubit, "X"), np.pi / 2))
        probabilities = np.abs(rotated.amplitudes) ** 2
        probabilities /= probabilities.sum()
        samples = rng.choice(outcomes_index, size=shots, p=probabilities)

        values = np.zeros(shots)
        for i in group:
            coeff, word = terms[i]
            mask = word.x | word.z
            parity = np.zeros(shots, dtype=np.int64)
            bits = samples & mask
            while mask:
                parity ^= bits & 1
                bits = bits >> 1
                mask >>= 1
            values += coeff * (1 - 2 * parity)
        estimate += float(values.mean())
        if shots > 1:
            variance += float(values.var(ddof=1)) / shots

    return estimate, float(np.sqrt(variance))


# --- parameterized quantum circuits ----------------------------------------


@dataclass(frozen=True)
class Gate:
    """Parameterized gate exp(-i * theta * generator / 2)."""

    generator: PauliSum
    param: str


@dataclass(frozen=True)
class PQC:
    """Input preparation, parameterized gates and an observable."""

    qubit_count: int
    gates: Tuple[Gate, ...]
    observable: PauliSum
    input_prep: Circuit = None  # type: ignore[assignment]
    projector_readout: bool = False

    def __post_init__(self) -> None:
        if self.input_prep is None:
            object.__setattr__(self, "input_prep", Circuit(self.qubit_count))
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.input_prep.qubit_count != self.qubit_count:
            raise CircuitError("Input preparation width does not match the PQC")
        if self.observable.num_qubits != self.qubit_count:
            raise CircuitError("Observable width does not match the PQC")
        names = set()
        for gate in self.gates:
            if gate.generator.num_qubits != self.qubit_count:
                raise CircuitError(f"Generator of '{gate.param}' has the wrong width")
            if gate.param in names:
                raise CircuitError(f"Duplicate parameter name '{gate.param}'")
            names.add(gate.param)

    @property
    def n_params(self) -> int:
        return len(self.gates)

    @property
    def param_names(self) -> List[str]:
        return [gate.param for gate in self.gates]

    def generator(self, j: int) -> PauliSum:
        """Generator of gate j (1-based)."""
        self.check_index(j)
        return self.gates[j - 1].generator

    def check_index(self, j: int) -> None:
        if not 1 <= j <= self.n_params:
            raise CircuitError(f"Gate index {j} outside 1..{self.n_params}")

    def check_theta(self, theta: Sequence[float]) -> np.ndarray:
        values = np.asarray(theta, dtype=float).reshape(-1)
        if values.shape[0] != self.n_params:
            raise CircuitError(f"Expected {self.n_params} parameters, got {values.shape[0]}")
        return values

    def gate_ops(self, theta: Sequence[float], start: int, stop: int) -> Tuple[GateOp, ...]:
        """GeneratorRotations for gates start..stop-1 (0-based)."""
        values = self.check_theta(theta)
        return tuple(
            GeneratorRotation(gate.generator, float(values[k]))
            for k, gate in enumerate(self.gates[start:stop], start=start)
        )

    def segment(self, start: int, stop: int, theta: Sequence[float]) -> Circuit:
        values = self.check_theta(theta)
        bindings = {self.gates[k].param: float(values[k]) for k in range(start, stop)}
        return Circuit(self.qubit_count, self.gate_ops(values, start, stop), bindings)

    def circuit(self, theta: Sequence[float]) -> Circuit:
        """Input preparation followed by every bound gate."""
        values = self.check_theta(theta)
        body = self.segment(0, self.n_params, values)
        return Circuit(self.qubit_count, self.input_prep.ops + body.ops, body.bindings)

    def state(self, theta: Sequence[float]) -> StateVector:
        return run(self.circuit(theta))

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "qubits": self.qubit_count,
            "gates": [
                {"param": gate.param, "generator": gate.generator.to_terms()} for gate in self.gates
            ],
            "observable": self.observable.to_terms(),
        }
        if self.input_prep.ops:
            data["input_prep"] = [op_to_dict(op) for op in self.input_prep.ops]
        if self.projector_readout:
            data["projector_readout"] = True
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PQC":
        try:
            qubits = int(data["qubits"])
            gates = tuple(
                Gate(PauliSum.from_terms(entry["generator"], qubits), str(entry["param"]))
                for entry in data["gates"]
            )
            observable = PauliSum.from_terms(data["observable"], qubits)
            prep = Circuit(
                qubits, tuple(op_from_dict(entry) for entry in data.get("input_prep", []))
            )
        except (KeyError, TypeError, ValueError, PauliError) as e:
            raise DataError(f"Malformed PQC description: {e}") from e
        return cls(qubits, gates, observable, prep, bool(data.get("projector_readout", False)))

    @classmethod
    def from_json(cls, text: str) -> "PQC":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DataError(f"Invalid PQC JSON: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PQC":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise DataError(f"Cannot read PQC file {path}: {e}") from e
        return cls.from_json(text)


def eval_cost(pqc: PQC, theta: Sequence[float]) -> float:
    """f(theta) = <theta|O|theta>."""
    return expectation(pqc.state(theta), pqc.observable)


# --- JSON op codec ---------------------------------------------------------

_PHASE_NAMES = {"-i": -1j, "+i": 1j, "i": 1j, "1": 1.0, "+1": 1.0}


def _phase_name(phase: complex) -> str:
    for name, value in (("-i", -1j), ("+i", 1j), ("1", 1.0)):
        if abs(complex(phase) - value) < 1e-12:
            return name
    raise CircuitError(f"Unsupported ancilla phase {phase}")


def op_to_dict(op: GateOp) -> Dict[str, Any]:
    if isinstance(op, PauliRotation):
        return {"op": "rotation", "pauli": op.word.label, "angle": op.angle}
    if isinstance(op, GeneratorRotation):
        return {"op": "generator", "generator": op.generator.to_terms(), "angle": op.angle}
    if isinstance(op, ControlledPauli):
        return {"op": "controlled", "control": op.control, "value": op.value, "pauli": op.word.label}
    if isinstance(op, AncillaPrep):
        return {"op": "ancilla", "qubit": op.qubit, "phase": _phase_name(op.phase)}
    if isinstance(op, DenseUnitary):
        matrix = np.asarray(op.matrix, dtype=complex)
        return {
            "op": "unitary",
            "qubits": list(op.targets),
            "matrix": [[[v.real, v.imag] for v in row] for row in matrix],
        }
    if isinstance(op, InverseSegment):
        return {"op": "inverse", "ops": [op_to_dict(inner) for inner in op.ops]}
    raise CircuitError(f"Unknown gate operation: {op!r}")


def op_from_dict(entry: Dict[str, Any]) -> GateOp:
    kind = entry.get("op")
    if kind == "rotation":
        return PauliRotation(PauliWord.from_label(entry["pauli"]), float(entry["angle"]))
    if kind == "generator":
        return GeneratorRotation(PauliSum.from_terms(entry["generator"]), float(entry["angle"]))
    if kind == "controlled":
        return ControlledPauli(
            int(entry["control"]), int(entry.get("value", 1)), PauliWord.from_label(entry["pauli"])
        )
    if kind == "ancilla":
        phase = str(entry.get("phase", "-i"))
        if phase not in _PHASE_NAMES:
            raise DataError(f"Unknown ancilla phase '{phase}'")
        return AncillaPrep(int(entry["qubit"]), _PHASE_NAMES[phase])
    if kind == "unitary":
        matrix = np.array([[complex(re, im) for re, im in row] for row in entry["matrix"]])
        return DenseUnitary(tuple(int(q) for q in entry["qubits"]), matrix)
    if kind == "inverse":
        return InverseSegment(tuple(op_from_dict(inner) for inner in entry["ops"]))
    raise DataError(f"Unknown op kind '{kind}'")
