"""First-order gradient plans (PSR, HT, DHT, RHT, RDHT), the flexible Hadamard
test and plan evaluation.

Every estimator builds a GradPlan: weighted circuits whose grouped expectations
sum to the derivative. Ancillas sit after the system qubits. With the ancilla in
(|0> - i|1>)/sqrt(2) and controls on value 1, the HT circuit for term Q measures
Im<theta|O Q~|theta>, which is the derivative contribution itself, while the RHT
circuit for term P measures Im<theta|H~ P|theta>, the negated contribution.
"""

import itertools
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .circuit import (
    PQC,
    AncillaPrep,
    Circuit,
    ControlledPauli,
    GateOp,
    InverseSegment,
    PauliRotation,
    circuit_unitary,
    eval_cost,
    run,
    sample_expectation,
)
from .config import get_settings
from .cost import first_order_count, first_order_shape, plan_counts
from .data_types import GradientMethod, GradPlan, GradTask, PSRShift, parse_method
from .exceptions import GradientError, NotPSRCompatible
from .grouping import Criterion, Grouping, measure_groups, partition
from .pauli import PauliSum


logger = logging.getLogger(__name__)

Seed = Optional[Union[int, np.random.SeedSequence]]

QUARTER_TURN = np.pi / 2


def _check(pqc: PQC, theta: Sequence[float], j: int) -> np.ndarray:
    if not 1 <= j <= pqc.n_params:
        raise GradientError(f"Parameter index {j} outside 1..{pqc.n_params}")
    return pqc.check_theta(theta)


def _task(
    circuit: Circuit, observable: PauliSum, weight: float, grouping: Optional[Grouping] = None
) -> GradTask:
    if grouping is None:
        grouping = partition(observable, Criterion.FULL)
    return GradTask(circuit, observable, grouping, float(weight))


def _plan(pqc: PQC, method: GradientMethod, j: int, tasks: List[GradTask], count: int) -> GradPlan:
    qubits, depth = first_order_shape(method, pqc.qubit_count, pqc.n_params, j)
    logger.debug(f"{method.label} plan for parameter {j}: {len(tasks)} tasks, {count} circuits")
    return GradPlan(method.value, (j,), tasks, count, qubits, depth)


# --- plan construction -----------------------------------------------------


def fd_gradient(
    pqc: PQC, theta: Sequence[float], j: int, epsilon: Optional[float] = None
) -> float:
    """Central finite difference [f(theta + eps e_j) - f(theta - eps e_j)] / (2 eps)."""
    values = _check(pqc, theta, j)
    epsilon = get_settings().fd_epsilon if epsilon is None else epsilon
    if epsilon <= 0:
        raise GradientError(f"Finite-difference step must be positive, got {epsilon}")
    plus = values.copy()
    minus = values.copy()
    plus[j - 1] += epsilon
    minus[j - 1] -= epsilon
    return (eval_cost(pqc, plus) - eval_cost(pqc, minus)) / (2 * epsilon)


def psr_plan(pqc: PQC, theta: Sequence[float], j: int, decompose: bool = False) -> GradPlan:
    """Parameter-shift plan.

    Without decomposition the generator must have exactly two eigenvalues and the
    plan shifts theta_j by +/- pi/(4c). With `decompose`, each term of a generator
    with pairwise-commuting terms is shifted on its own by +/- pi/2.

    Raises:
        NotPSRCompatible: If the generator does not qualify
    """
    values = _check(pqc, theta, j)
    generator = pqc.generator(j)
    observable = pqc.observable.non_identity()
    n_h, ncm_h, n_o, ncm_o = plan_counts(pqc, j)

    if decompose:
        terms = generator.non_identity()
        if not terms.is_commuting():
            raise NotPSRCompatible(
                f"Generator of parameter {j} has non-commuting terms; cannot shift term-wise"
            )
        tasks = _direct_tasks(pqc, values, j, terms, observable)
        count = first_order_count(GradientMethod.PSR, n_h, ncm_h, n_o, ncm_o)
        return _plan(pqc, GradientMethod.PSR, j, tasks, count)

    shift = PSRShift.from_generator(generator)
    tasks = []
    for sign in (1.0, -1.0):
        shifted = values.copy()
        shifted[j - 1] += sign * shift.shift
        tasks.append(_task(pqc.circuit(shifted), observable, sign * shift.c))
    count = first_order_count(GradientMethod.PSR, 1, 1, n_o, ncm_o)
    return _plan(pqc, GradientMethod.PSR, j, tasks, count)


def _direct_tasks(
    pqc: PQC, values: np.ndarray, j: int, terms: PauliSum, observable: PauliSum
) -> List[GradTask]:
    """e^{+i pi/4 Q} / e^{-i pi/4 Q} insertions after gate j, weighted -/+ beta/2."""
    prefix = pqc.input_prep.ops + pqc.gate_ops(values, 0, j)
    tail = pqc.gate_ops(values, j, pqc.n_params)
    tasks = []
    grouping = partition(observable, Criterion.FULL)
    for beta, word in terms:
        for angle, weight in ((-QUARTER_TURN, -beta / 2), (QUARTER_TURN, beta / 2)):
            ops = prefix + (PauliRotation(word, angle),) + tail
            tasks.append(_task(Circuit(pqc.qubit_count, ops), observable, weight, grouping))
    return tasks


def ht_plan(pqc: PQC, theta: Sequence[float], j: int) -> GradPlan:
    """Hadamard-test plan: one controlled-Q_k circuit per generator term."""
    values = _check(pqc, theta, j)
    width = pqc.qubit_count + 1
    ancilla = pqc.qubit_count
    prefix = Circuit(pqc.qubit_count, pqc.input_prep.ops + pqc.gate_ops(values, 0, j)).widen(width)
    tail = Circuit(pqc.qubit_count, pqc.gate_ops(values, j, pqc.n_params)).widen(width)
    observable = pqc.observable.non_identity().extend("X")
    grouping = partition(observable, Criterion.FULL)

    tasks = []
    for beta, word in pqc.generator(j).non_identity():
        ops = (
            (AncillaPrep(ancilla),)
            + prefix.ops
            + (ControlledPauli(ancilla, 1, word.extend("I")),)
            + tail.ops
        )
        tasks.append(_task(Circuit(width, ops), observable, beta, grouping))
    count = first_order_count(GradientMethod.HT, *plan_counts(pqc, j))
    return _plan(pqc, GradientMethod.HT, j, tasks, count)


def dht_plan(pqc: PQC, theta: Sequence[float], j: int) -> GradPlan:
    """Direct Hadamard-test plan: two ancilla-free circuits per generator term."""
    values = _check(pqc, theta, j)
    tasks = _direct_tasks(
        pqc, values, j, pqc.generator(j).non_identity(), pqc.observable.non_identity()
    )
    count = first_order_count(GradientMethod.DHT, *plan_counts(pqc, j))
    return _plan(pqc, GradientMethod.DHT, j, tasks, count)


def rht_plan(pqc: PQC, theta: Sequence[float], j: int) -> GradPlan:
    """Reversed Hadamard-test plan: controlled observable terms, generator measured."""
    values = _check(pqc, theta, j)
    width = pqc.qubit_count + 1
    ancilla = pqc.qubit_count
    full = pqc.circuit(values).widen(width)
    tail = Circuit(pqc.qubit_count, pqc.gate_ops(values, j, pqc.n_params)).widen(width)
    undo = (InverseSegment(tail.ops),) if tail.ops else ()
    measured = pqc.generator(j).non_identity().extend("X")
    grouping = partition(measured, Criterion.FULL)

    tasks = []
    for alpha, word in pqc.observable.non_identity():
        ops = (
            (AncillaPrep(ancilla),)
            + full.ops
            + (ControlledPauli(ancilla, 1, word.extend("I")),)
            + undo
        )
        tasks.append(_task(Circuit(width, ops), measured, -alpha, grouping))
    count = first_order_count(GradientMethod.RHT, *plan_counts(pqc, j))
    return _plan(pqc, GradientMethod.RHT, j, tasks, count)


def rdht_plan(pqc: PQC, theta: Sequence[float], j: int) -> GradPlan:
    """Reversed direct Hadamard-test plan: two ancilla-free circuits per observable term."""
    values = _check(pqc, theta, j)
    full = pqc.circuit(values).ops
    tail = pqc.gate_ops(values, j, pqc.n_params)
    undo = (InverseSegment(tail),) if tail else ()
    measured = pqc.generator(j).non_identity()
    grouping = partition(measured, Criterion.FULL)

    tasks = []
    for alpha, word in pqc.observable.non_identity():
        for angle, weight in ((-QUARTER_TURN, alpha / 2), (QUARTER_TURN, -alpha / 2)):
            ops = full + (PauliRotation(word, angle),) + undo
            tasks.append(_task(Circuit(pqc.qubit_count, ops), measured, weight, grouping))
    count = first_order_count(GradientMethod.RDHT, *plan_counts(pqc, j))
    return _plan(pqc, GradientMethod.RDHT, j, tasks, count)


_PLANNERS = {
    GradientMethod.HT: ht_plan,
    GradientMethod.DHT: dht_plan,
    GradientMethod.RHT: rht_plan,
    GradientMethod.RDHT: rdht_plan,
}


def build_plan(
    pqc: PQC,
    theta: Sequence[float],
    j: int,
    method: Union[str, GradientMethod],
    decompose: bool = False,
) -> GradPlan:
    """Plan for any quantum first-order method."""
    resolved = parse_method(method)
    if resolved is GradientMethod.FD:
        raise GradientError("Finite differences do not build circuit plans")
    if resolved is GradientMethod.PSR:
        return psr_plan(pqc, theta, j, decompose=decompose)
    return _PLANNERS[resolved](pqc, theta, j)


# --- evaluation ------------------------------------------------------------


def evaluate_task(
    task: GradTask, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, float]:
    """(expectation, stderr) of one task; exact when `shots` is None."""
    state = run(task.circuit)
    if shots is None:
        return measure_groups(state, task.observable, task.grouping), 0.0
    grouping = partition(task.observable, Criterion.QUBITWISE)
    return sample_expectation(state, task.observable, grouping, shots, seed)


def task_seeds(count: int, seed: Seed) -> List[np.random.SeedSequence]:
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return root.spawn(count)


def combine(plan: GradPlan, results: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """Weighted sum of task results with propagated standard error."""
    value = sum(task.weight * mean for task, (mean, _) in zip(plan.tasks, results))
    variance = sum((task.weight * err) ** 2 for task, (_, err) in zip(plan.tasks, results))
    return float(value), float(np.sqrt(variance))


def evaluate_plan(
    plan: GradPlan, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, float]:
    """Evaluate a plan exactly (shots=None) or by shot sampling.

    Args:
        plan: Gradient plan
        shots: Shots per measurement group, or None for exact simulation
        seed: Root seed; per-task seeds are spawned from it

    Returns:
        Tuple of (value, standard error)
    """
    if shots is None:
        results = [evaluate_task(task) for task in plan.tasks]
    else:
        seeds = task_seeds(len(plan.tasks), seed)
        results = [evaluate_task(task, shots, s) for task, s in zip(plan.tasks, seeds)]
    return combine(plan, results)


def _evaluate(plan: GradPlan, shots: Optional[int], seed: Seed) -> Tuple[float, GradPlan]:
    value, _ = evaluate_plan(plan, shots, seed)
    return value, plan


def psr_gradient(
    pqc: PQC,
    theta: Sequence[float],
    j: int,
    decompose: bool = False,
    shots: Optional[int] = None,
    seed: Seed = None,
) -> Tuple[float, GradPlan]:
    return _evaluate(psr_plan(pqc, theta, j, decompose), shots, seed)


def ht_gradient(
    pqc: PQC, theta: Sequence[float], j: int, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, GradPlan]:
    return _evaluate(ht_plan(pqc, theta, j), shots, seed)


def dht_gradient(
    pqc: PQC, theta: Sequence[float], j: int, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, GradPlan]:
    return _evaluate(dht_plan(pqc, theta, j), shots, seed)


def rht_gradient(
    pqc: PQC, theta: Sequence[float], j: int, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, GradPlan]:
    return _evaluate(rht_plan(pqc, theta, j), shots, seed)


def rdht_gradient(
    pqc: PQC, theta: Sequence[float], j: int, shots: Optional[int] = None, seed: Seed = None
) -> Tuple[float, GradPlan]:
    return _evaluate(rdht_plan(pqc, theta, j), shots, seed)


def gradient(
    pqc: PQC,
    theta: Sequence[float],
    j: int,
    method: Union[str, GradientMethod],
    shots: Optional[int] = None,
    seed: Seed = None,
    decompose: bool = False,
) -> Tuple[float, Optional[GradPlan]]:
    """Dispatch to one estimator; finite differences return no plan."""
    resolved = parse_method(method)
    if resolved is GradientMethod.FD:
        return fd_gradient(pqc, theta, j), None
    return _evaluate(build_plan(pqc, theta, j, resolved, decompose), shots, seed)


def full_gradient(
    pqc: PQC,
    theta: Sequence[float],
    method: Union[str, GradientMethod],
    shots: Optional[int] = None,
    seed: Seed = None,
    decompose: bool = False,
) -> np.ndarray:
    """Length-n gradient vector with one method for every parameter."""
    seeds = task_seeds(pqc.n_params, seed)
    return np.array(
        [
            gradient(pqc, theta, j, method, shots, seeds[j - 1], decompose)[0]
            for j in range(1, pqc.n_params + 1)
        ]
    )


# --- oracles and the flexible test -----------------------------------------


def conjugated_generator(pqc: PQC, theta: Sequence[float], j: int) -> np.ndarray:
    """Dense H~_j = V H_j V^dagger with V the gates after j."""
    values = _check(pqc, theta, j)
    tail = circuit_unitary(pqc.segment(j, pqc.n_params, values))
    return tail @ pqc.generator(j).to_matrix() @ tail.conj().T


def commutator_gradient_oracle(pqc: PQC, theta: Sequence[float], j: int) -> float:
    """Dense (i/2) <theta|[H~_j, O]|theta>."""
    if pqc.qubit_count > get_settings().max_decompose_qubits:
        raise GradientError(f"Dense oracle limited to {get_settings().max_decompose_qubits} qubits")
    h_tilde = conjugated_generator(pqc, theta, j)
    observable = pqc.observable.to_matrix()
    psi = pqc.state(theta).amplitudes
    commutator = h_tilde @ observable - observable @ h_tilde
    return float((0.5j * np.vdot(psi, commutator @ psi)).real)


Factor = Tuple[PauliSum, Tuple[GateOp, ...]]


def flexible_circuits(
    prep: Circuit,
    factors: Sequence[Factor],
    measured: int,
    part: str = "imag",
) -> List[Tuple[float, Circuit, PauliSum]]:
    """Weighted circuits of a flexible Hadamard test.

    Each factor is (operator, conjugation ops V): the applied operator is
    V^dagger-conjugated, i.e. V^dagger runs first, then the controlled Pauli,
    then V. Non-measured operators are expanded term by term.

    Args:
        prep: Circuit preparing |psi> on the system register
        factors: Operators H_1..H_m with their conjugation ops
        measured: 1-based index of the operator measured together with X
        part: "imag" for Im<H_1...H_m>, "real" for the real part

    Returns:
        List of (weight, circuit, measured observable)
    """
    m = len(factors)
    if not 1 <= measured <= m:
        raise GradientError(f"Measured index {measured} outside 1..{m}")
    if part not in ("imag", "real"):
        raise GradientError(f"Unknown part '{part}'")
    system = prep.qubit_count
    width = system + 1
    ancilla = system
    phase = -1j if part == "imag" else 1.0

    observable, _ = factors[measured - 1]
    if observable.num_qubits != system or any(f.num_qubits != system for f, _ in factors):
        raise GradientError("Operator widths must match the prepared register")
    measured_obs = observable.extend("X")

    # branch 0 carries H_{i-1}...H_1|psi>, branch 1 carries H_{i+1}...H_m|psi>
    schedule = [(t, 0) for t in range(measured - 1)]
    schedule += [(t, 1) for t in range(m - 1, measured - 1, -1)]
    expansions = [list(factors[t][0]) for t, _ in schedule]

    base = (AncillaPrep(ancilla, phase),) + prep.widen(width).ops
    circuits = []
    for combo in itertools.product(*expansions):
        weight = float(np.prod([coeff for coeff, _ in combo])) if combo else 1.0
        ops: Tuple[GateOp, ...] = base
        for (t, value), (_, word) in zip(schedule, combo):
            if word.is_identity:
                continue
            conjugation = Circuit(system, factors[t][1]).widen(width).ops
            if conjugation:
                ops += (InverseSegment(conjugation),)
            ops += (ControlledPauli(ancilla, value, word.extend("I")),)
            ops += conjugation
        circuits.append((weight, Circuit(width, ops), measured_obs))
    return circuits


def flexible_ht_plan(
    hermitians: Sequence[PauliSum], measured: int, prep: Circuit, part: str = "imag"
) -> GradPlan:
    factors = [(operator, ()) for operator in hermitians]
    circuits = flexible_circuits(prep, factors, measured, part)
    tasks = [_task(circuit, obs, weight) for weight, circuit, obs in circuits]
    count = sum(task.grouping.group_count for task in tasks)
    depth = max((len(task.circuit) for task in tasks), default=0)
    return GradPlan(f"flexible-{part}", (measured,), tasks, count, prep.qubit_count + 1, depth)


def flexible_ht(
    hermitians: Sequence[PauliSum],
    measured: int,
    prep: Optional[Circuit] = None,
    part: str = "imag",
    shots: Optional[int] = None,
    seed: Seed = None,
) -> float:
    """Im (or Re) of <psi|H_1 H_2 ... H_m|psi> with H_measured read out.

    Args:
        hermitians: Operators H_1..H_m on the system register
        measured: 1-based index of the measured operator
        prep: State preparation (default |0...0>)
        part: "imag" or "real"
        shots: Optional shot count per group
        seed: Optional seed for shot sampling

    Returns:
        Estimated value
    """
    if not hermitians:
        raise GradientError("Flexible Hadamard test needs at least one operator")
    if prep is None:
        prep = Circuit(hermitians[0].num_qubits)
    value, _ = evaluate_plan(flexible_ht_plan(hermitians, measured, prep, part), shots, seed)
    return value


def dense_product_expectation(
    hermitians: Sequence[PauliSum], prep: Optional[Circuit] = None
) -> complex:
    """Dense <psi|H_1...H_m|psi>, the oracle for the flexible test."""
    width = hermitians[0].num_qubits
    psi = run(prep if prep is not None else Circuit(width)).amplitudes
    vector = psi
    for operator in reversed(hermitians):
        vector = operator.to_matrix() @ vector
    return complex(np.vdot(psi, vector))
