"""Static cost model: distinct-circuit counts, shapes, CNOT lowering and EFR."""

import logging
from collections import Counter
from typing import Sequence, Tuple, Union

import numpy as np

from .circuit import (
    PQC,
    AncillaPrep,
    Circuit,
    ControlledPauli,
    DenseUnitary,
    GateOp,
    GeneratorRotation,
    InverseSegment,
    PauliRotation,
)
from .data_types import ErrorTable, GradientMethod, parse_method
from .exceptions import CostModelError, GradientError
from .grouping import Criterion, group_count


logger = logging.getLogger(__name__)

GATE_KINDS = ("cnot", "1q", "measure")


def _method(method: Union[str, GradientMethod]) -> GradientMethod:
    try:
        resolved = parse_method(method)
    except GradientError as e:
        raise CostModelError(str(e)) from e
    if resolved is GradientMethod.FD:
        raise CostModelError("Finite differences have no circuit cost model")
    return resolved


def first_order_count(
    method: Union[str, GradientMethod], n_h: int, ncm_h: int, n_o: int, ncm_o: int
) -> int:
    """Distinct circuits per parameter for a first-order method.

    Args:
        method: Gradient method
        n_h: Pauli terms of the generator
        ncm_h: Commuting groups of the generator
        n_o: Pauli terms of the observable
        ncm_o: Commuting groups of the observable

    Returns:
        Number of distinct circuits
    """
    if min(n_h, ncm_h, n_o, ncm_o) < 1:
        raise CostModelError("Term and group counts must be at least one")
    resolved = _method(method)
    if resolved is GradientMethod.PSR:
        return 2 * n_h * ncm_o
    if resolved is GradientMethod.HT:
        return n_h * ncm_o
    if resolved is GradientMethod.DHT:
        return 2 * n_h * ncm_o
    if resolved is GradientMethod.RHT:
        return ncm_h * n_o
    return 2 * ncm_h * n_o


def first_order_shape(
    method: Union[str, GradientMethod], num_qubits: int, n_gates: int, j: int
) -> Tuple[int, int]:
    """(qubits, logical depth) of a first-order gradient circuit for gate j (1-based)."""
    if not 1 <= j <= n_gates:
        raise CostModelError(f"Gate position {j} outside 1..{n_gates}")
    resolved = _method(method)
    shapes = {
        GradientMethod.PSR: (num_qubits, n_gates),
        GradientMethod.HT: (num_qubits + 1, n_gates + 1),
        GradientMethod.DHT: (num_qubits, n_gates + 1),
        GradientMethod.RHT: (num_qubits + 1, 2 * n_gates - j + 1),
        GradientMethod.RDHT: (num_qubits, 2 * n_gates - j + 1),
    }
    return shapes[resolved]


def plan_counts(pqc: PQC, j: int) -> Tuple[int, int, int, int]:
    """(N(H_j), N_cm(H_j), N(O), N_cm(O)) with identity terms excluded.

    Observables read out as a single projector count as one term in one group.

    Raises:
        CostModelError: If the generator or observable is a multiple of the identity
    """
    generator = pqc.generator(j).non_identity()
    n_h = generator.term_count
    if not n_h:
        raise CostModelError(f"Generator of parameter {j} is a multiple of the identity")
    ncm_h = group_count(generator, Criterion.FULL)
    if pqc.projector_readout:
        return n_h, ncm_h, 1, 1
    observable = pqc.observable.non_identity()
    n_o = observable.term_count
    if not n_o:
        raise CostModelError("Observable is a multiple of the identity")
    return n_h, ncm_h, n_o, group_count(observable, Criterion.FULL)


def _lower_op(op: GateOp, kinds: Counter) -> None:
    if isinstance(op, PauliRotation):
        weight = op.word.weight
        if weight:
            kinds["cnot"] += 2 * (weight - 1)
            kinds["1q"] += weight
    elif isinstance(op, GeneratorRotation):
        for _, word in op.generator:
            _lower_op(PauliRotation(word, op.angle), kinds)
    elif isinstance(op, ControlledPauli):
        kinds["cnot"] += op.word.weight
    elif isinstance(op, AncillaPrep):
        kinds["1q"] += 1
    elif isinstance(op, DenseUnitary):
        width = len(op.targets)
        kinds["cnot"] += width * (width - 1)
        kinds["1q"] += width
    elif isinstance(op, InverseSegment):
        for inner in op.ops:
            _lower_op(inner, kinds)
    else:
        raise CostModelError(f"Cannot lower gate operation {op!r}")


def lower(circuit: Circuit, measured_qubits: int = 0) -> Counter:
    """Lowered gate counts by kind ("cnot", "1q", "measure")."""
    kinds: Counter = Counter()
    for op in circuit.ops:
        _lower_op(op, kinds)
    if measured_qubits:
        kinds["measure"] += measured_qubits
    return kinds


def lower_and_count_cnots(circuit: Circuit) -> int:
    """CNOT estimate under the fixed lowering rules."""
    return int(lower(circuit)["cnot"])


def efr(circuit: Circuit, errors: ErrorTable, measured_qubits: int = 0) -> float:
    """Estimated failure rate 1 - prod(1 - p_i) over the lowered gates.

    Args:
        circuit: Circuit to lower
        errors: Error probability per gate kind
        measured_qubits: Number of measured qubits to include

    Returns:
        EFR in [0, 1)

    Raises:
        CostModelError: If a lowered gate kind has no rate
    """
    survival = 1.0
    for kind, count in lower(circuit, measured_qubits).items():
        if count:
            survival *= (1.0 - errors.probability(kind)) ** count
    return float(1.0 - survival)


def mean_efr(circuits: Sequence[Circuit], errors: ErrorTable) -> float:
    """Average EFR over gradient circuits, each measured on its full register."""
    if not circuits:
        return 0.0
    return float(np.mean([efr(c, errors, c.qubit_count) for c in circuits]))
