"""k-th order partial derivatives.

Four circuit families share the DerivativeIndex convention (sorted, 1-based,
j_1 is the outermost commutator):

* k-fold Hadamard test: k ancillas, one logical circuit per term product;
* DHT over sign vectors: 2^k ancilla-free circuits per term product;
* iterated shift rule: 2^k shifted evaluations for two-eigenvalue generators;
* HT expansion: the nested commutator split into operator products, paired with
  their adjoints and read out by 2^(k-1) single-ancilla flexible tests.
"""

import itertools
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .circuit import (
    PQC,
    AncillaPrep,
    Circuit,
    ControlledPauli,
    GateOp,
    GeneratorRotation,
    PauliRotation,
    eval_cost,
)
from .config import get_settings
from .cost import plan_counts
from .data_types import DerivativeIndex, GradPlan, GradTask, HigherOrderMethod, PSRShift
from .exceptions import GradientError
from .gradfirst import Seed, conjugated_generator, evaluate_plan, flexible_circuits
from .grouping import Criterion, partition
from .pauli import PauliSum


logger = logging.getLogger(__name__)

IndexLike = Union[DerivativeIndex, Sequence[int]]


def _index(pqc: PQC, idx: IndexLike) -> DerivativeIndex:
    index = idx if isinstance(idx, DerivativeIndex) else DerivativeIndex(tuple(idx))
    index.check(pqc.n_params)
    return index


def _method(method: Union[str, HigherOrderMethod]) -> HigherOrderMethod:
    try:
        return HigherOrderMethod(str(getattr(method, "value", method)).lower())
    except ValueError as e:
        raise GradientError(f"Unknown higher-order method '{method}'") from e


def korder_qubits_depth(
    method: Union[str, HigherOrderMethod], k: int, num_qubits: int, n_gates: int
) -> Tuple[int, int]:
    """(qubits, logical depth) of a k-th order derivative circuit."""
    if k < 1:
        raise GradientError(f"Derivative order must be positive, got {k}")
    resolved = _method(method)
    if resolved is HigherOrderMethod.PSR:
        return num_qubits, n_gates
    if resolved is HigherOrderMethod.HT:
        return num_qubits + 1, n_gates + k
    if resolved is HigherOrderMethod.DHT:
        return num_qubits, n_gates + k
    return num_qubits + k, n_gates + k


def korder_count(
    method: Union[str, HigherOrderMethod], k: int, term_counts: Sequence[int], ncm_o: int
) -> int:
    """Distinct circuits of a k-th order derivative.

    Args:
        method: Higher-order method
        k: Derivative order
        term_counts: N(H_{j_t}) for t = 1..k (ignored by the spectral shift rule)
        ncm_o: Commuting groups of the observable

    Returns:
        Number of distinct circuits
    """
    resolved = _method(method)
    terms = int(np.prod(term_counts)) if len(term_counts) else 1
    if resolved is HigherOrderMethod.PSR:
        return 2 ** k * ncm_o
    if resolved is HigherOrderMethod.HT:
        return 2 ** (k - 1) * terms * ncm_o
    if resolved is HigherOrderMethod.DHT:
        return 2 ** k * terms * ncm_o
    return terms * ncm_o


def _counts(pqc: PQC, index: DerivativeIndex) -> Tuple[List[int], int]:
    term_counts = [plan_counts(pqc, j)[0] for j in index.indices]
    ncm_o = plan_counts(pqc, index.indices[0])[3]
    return term_counts, ncm_o


def _plan(
    pqc: PQC, method: HigherOrderMethod, tag: str, index: DerivativeIndex, tasks: List[GradTask]
) -> GradPlan:
    term_counts, ncm_o = _counts(pqc, index)
    count = korder_count(method, index.order, term_counts, ncm_o)
    qubits, depth = korder_qubits_depth(method, index.order, pqc.qubit_count, pqc.n_params)
    logger.debug(f"{tag} plan for {index.indices}: {len(tasks)} tasks, {count} circuits")
    return GradPlan(tag, index.indices, tasks, count, qubits, depth)


def _term_products(pqc: PQC, index: DerivativeIndex):
    """Cross product of the non-identity terms of H_{j_1}..H_{j_k}."""
    return itertools.product(*(list(pqc.generator(j).non_identity()) for j in index.indices))


def _with_insertions(
    pqc: PQC,
    values: np.ndarray,
    index: DerivativeIndex,
    insert: Callable[[int], Sequence[GateOp]],
    width: int,
) -> Tuple[GateOp, ...]:
    """Gates 1..n with insert(t) placed right after gate j_t, in order of t."""
    after: Dict[int, List[int]] = {}
    for t, j in enumerate(index.indices):
        after.setdefault(j, []).append(t)
    ops: List[GateOp] = list(pqc.input_prep.widen(width).ops)
    for position, gate in enumerate(pqc.gates, start=1):
        generator = gate.generator
        if width != pqc.qubit_count:
            generator = generator.extend("I" * (width - pqc.qubit_count))
        ops.append(GeneratorRotation(generator, float(values[position - 1])))
        for t in after.get(position, []):
            ops.extend(insert(t))
    return tuple(ops)


# --- oracles ---------------------------------------------------------------


def nested_commutator_oracle(pqc: PQC, theta: Sequence[float], idx: IndexLike) -> float:
    """Dense (i/2)^k <theta|[H~_{j_1}, [..., [H~_{j_k}, O]]]|theta>."""
    index = _index(pqc, idx)
    cap = get_settings().max_oracle_qubits
    if pqc.qubit_count > cap:
        raise GradientError(f"Nested-commutator oracle limited to {cap} qubits")
    values = pqc.check_theta(theta)
    operator = pqc.observable.to_matrix()
    for j in reversed(index.indices):
        h_tilde = conjugated_generator(pqc, values, j)
        operator = 0.5j * (h_tilde @ operator - operator @ h_tilde)
    psi = pqc.state(values).amplitudes
    return float(np.vdot(psi, operator @ psi).real)


def nested_fd(
    pqc: PQC, theta: Sequence[float], idx: IndexLike, epsilon: float = 1e-3
) -> float:
    """Nested central differences over the index list."""
    index = _index(pqc, idx)
    if epsilon <= 0:
        raise GradientError(f"Finite-difference step must be positive, got {epsilon}")

    def differentiate(values: np.ndarray, remaining: Tuple[int, ...]) -> float:
        if not remaining:
            return eval_cost(pqc, values)
        j = remaining[0]
        plus = values.copy()
        minus = values.copy()
        plus[j - 1] += epsilon
        minus[j - 1] -= epsilon
        return (differentiate(plus, remaining[1:]) - differentiate(minus, remaining[1:])) / (
            2 * epsilon
        )

    return differentiate(pqc.check_theta(theta), index.indices)


# --- plans -----------------------------------------------------------------


def kfold_plan(pqc: PQC, theta: Sequence[float], idx: IndexLike) -> GradPlan:
    """k ancillas; controlled Q_t on ancilla t right after gate j_t; X^k (x) O measured."""
    index = _index(pqc, idx)
    values = pqc.check_theta(theta)
    system = pqc.qubit_count
    k = index.order
    width = system + k
    observable = pqc.observable.non_identity().extend("X" * k)
    grouping = partition(observable, Criterion.FULL)
    preps = tuple(AncillaPrep(system + t) for t in range(k))

    tasks = []
    for combo in _term_products(pqc, index):
        words = [word.extend("I" * k) for _, word in combo]
        ops = _with_insertions(
            pqc, values, index, lambda t: (ControlledPauli(system + t, 1, words[t]),), width
        )
        weight = float(np.prod([beta for beta, _ in combo]))
        tasks.append(GradTask(Circuit(width, preps + ops), observable, grouping, weight))
    return _plan(pqc, HigherOrderMethod.KFOLD, "kfold", index, tasks)


def dht_korder_plan(pqc: PQC, theta: Sequence[float], idx: IndexLike) -> GradPlan:
    """e^{s_t i pi/4 Q_t} after gate j_t for every sign vector s, weight (-1/2)^k prod(s)."""
    index = _index(pqc, idx)
    values = pqc.check_theta(theta)
    k = index.order
    observable = pqc.observable.non_identity()
    grouping = partition(observable, Criterion.FULL)

    tasks = []
    for combo in _term_products(pqc, index):
        betas = float(np.prod([beta for beta, _ in combo]))
        for signs in itertools.product((1, -1), repeat=k):
            ops = _with_insertions(
                pqc,
                values,
                index,
                lambda t: (PauliRotation(combo[t][1], -signs[t] * np.pi / 2),),
                pqc.qubit_count,
            )
            weight = (-0.5) ** k * float(np.prod(signs)) * betas
            tasks.append(GradTask(Circuit(pqc.qubit_count, ops), observable, grouping, weight))
    return _plan(pqc, HigherOrderMethod.DHT, "dhtk", index, tasks)


def psr_korder_plan(pqc: PQC, theta: Sequence[float], idx: IndexLike) -> GradPlan:
    """Iterated two-eigenvalue shift rule: 2^k shifted evaluations."""
    index = _index(pqc, idx)
    values = pqc.check_theta(theta)
    shifts = [PSRShift.from_generator(pqc.generator(j)) for j in index.indices]
    observable = pqc.observable.non_identity()
    grouping = partition(observable, Criterion.FULL)

    tasks = []
    for signs in itertools.product((1, -1), repeat=index.order):
        shifted = values.copy()
        weight = 1.0
        for sign, shift, j in zip(signs, shifts, index.indices):
            shifted[j - 1] += sign * shift.shift
            weight *= sign * shift.c
        tasks.append(GradTask(pqc.circuit(shifted), observable, grouping, weight))
    return _plan(pqc, HigherOrderMethod.PSR, "psrk", index, tasks)


def ht_korder_plan(pqc: PQC, theta: Sequence[float], idx: IndexLike) -> GradPlan:
    """Nested commutator read out by 2^(k-1) paired flexible Hadamard tests.

    Expanding the commutators gives one product per split of the indices into a
    left set L (ascending, left of O) and right set R (descending, right of O)
    with sign (-1)^|R|. A split and its mirror are adjoint, so each pair is one
    Im (odd k) or Re (even k) readout weighted 2^(1-k) (-1)^(|R| + ceil(k/2)).
    """
    index = _index(pqc, idx)
    values = pqc.check_theta(theta)
    k = index.order
    prep = pqc.circuit(values)
    part = "imag" if k % 2 else "real"
    observable = pqc.observable.non_identity()

    def factor(t: int) -> Tuple[PauliSum, Tuple[GateOp, ...]]:
        j = index.indices[t]
        return pqc.generator(j).non_identity(), pqc.gate_ops(values, j, pqc.n_params)

    tasks = []
    for rest in itertools.product((True, False), repeat=k - 1):
        left = [0] + [t for t, on_left in enumerate(rest, start=1) if on_left]
        right = sorted((t for t, on_left in enumerate(rest, start=1) if not on_left), reverse=True)
        factors = [factor(t) for t in left] + [(observable, ())] + [factor(t) for t in right]
        sign = (-1) ** (len(right) + (k + 1) // 2)
        scale = 2.0 ** (1 - k) * sign
        for weight, circuit, measured in flexible_circuits(prep, factors, len(left) + 1, part):
            grouping = partition(measured, Criterion.FULL)
            tasks.append(GradTask(circuit, measured, grouping, scale * weight))
    return _plan(pqc, HigherOrderMethod.HT, "htk", index, tasks)


# --- evaluators ------------------------------------------------------------


def _evaluate(plan: GradPlan, shots: Optional[int], seed: Seed) -> Tuple[float, GradPlan]:
    value, _ = evaluate_plan(plan, shots, seed)
    return value, plan


def kfold_ht(
    pqc: PQC, theta: Sequence[float], idx: IndexLike, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, GradPlan]:
    return _evaluate(kfold_plan(pqc, theta, idx), shots, seed)


def dht_korder(
    pqc: PQC, theta: Sequence[float], idx: IndexLike, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, GradPlan]:
    return _evaluate(dht_korder_plan(pqc, theta, idx), shots, seed)


def psr_korder(
    pqc: PQC, theta: Sequence[float], idx: IndexLike, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, GradPlan]:
    return _evaluate(psr_korder_plan(pqc, theta, idx), shots, seed)


def ht_korder(
    pqc: PQC, theta: Sequence[float], idx: IndexLike, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, GradPlan]:
    return _evaluate(ht_korder_plan(pqc, theta, idx), shots, seed)


HIGHER_ORDER_METHODS = {
    "kfold": kfold_ht,
    "dhtk": dht_korder,
    "psrk": psr_korder,
    "htk": ht_korder,
}


def higher_derivative(
    pqc: PQC,
    theta: Sequence[float],
    idx: IndexLike,
    method: str,
    shots: Optional[int] = None,
    seed: Seed = None,
) -> Tuple[float, Optional[GradPlan]]:
    """Dispatch by CLI method name; "oracle" returns no plan."""
    if method == "oracle":
        return nested_commutator_oracle(pqc, theta, idx), None
    if method not in HIGHER_ORDER_METHODS:
        raise GradientError(f"Unknown higher-order method '{method}'")
    return HIGHER_ORDER_METHODS[method](pqc, theta, idx, shots, seed)


def full_hessian(pqc: PQC, theta: Sequence[float], method: str = "kfold") -> np.ndarray:
    """Symmetric n x n matrix of second derivatives."""
    n = pqc.n_params
    hessian = np.zeros((n, n))
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            value, _ = higher_derivative(pqc, theta, (a, b), method)
            hessian[a - 1, b - 1] = hessian[b - 1, a - 1] = value
    return hessian
