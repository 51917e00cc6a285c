"""Quantum automatic differentiation: feasibility, cost scoring and method assignment."""

import logging
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .circuit import PQC
from .cost import first_order_count, first_order_shape, lower_and_count_cnots, mean_efr, plan_counts
from .data_types import (
    QUANTUM_METHODS,
    CostReport,
    ErrorTable,
    GradientMethod,
    GradPlan,
    MethodAssignment,
    Metric,
    PSRShift,
    parse_method,
)
from .exceptions import ConfigurationError, GradientError, NotPSRCompatible
from .gradfirst import Seed, build_plan, evaluate_plan, task_seeds
from .runner import PlanRunner


logger = logging.getLogger(__name__)


def psr_feasible(pqc: PQC, j: int) -> bool:
    """True iff H_j has exactly two distinct eigenvalues."""
    try:
        PSRShift.from_generator(pqc.generator(j))
    except NotPSRCompatible:
        return False
    return True


def psr_termwise(pqc: PQC, j: int) -> bool:
    """True iff H_j fails the spectral test but its terms pairwise commute.

    Such a generator is shifted term by term; the circuits are those of DHT.
    """
    if psr_feasible(pqc, j):
        return False
    terms = pqc.generator(j).non_identity()
    return terms.term_count > 0 and terms.is_commuting()


def feasible_methods(pqc: PQC, j: int, decompose: bool = False) -> List[GradientMethod]:
    """Quantum methods usable for parameter j, in tie-break order.

    PSR is included when H_j has two eigenvalues or, with `decompose`, when its
    terms commute.
    """
    pqc.check_index(j)
    with_psr = psr_feasible(pqc, j) or (decompose and psr_termwise(pqc, j))
    return [m for m in QUANTUM_METHODS if m is not GradientMethod.PSR or with_psr]


def method_count(pqc: PQC, j: int, method: Union[str, GradientMethod]) -> int:
    """Distinct circuits of one method.

    PSR is costed spectrally (2 N_cm(O)) when H_j has two eigenvalues and
    term-wise (2 N(H) N_cm(O)) otherwise.

    Raises:
        NotPSRCompatible: If PSR is requested for a generator with non-commuting terms
    """
    resolved = parse_method(method)
    n_h, ncm_h, n_o, ncm_o = plan_counts(pqc, j)
    if resolved is GradientMethod.PSR:
        if psr_feasible(pqc, j):
            return first_order_count(resolved, 1, 1, n_o, ncm_o)
        if not psr_termwise(pqc, j):
            raise NotPSRCompatible(f"Generator of parameter {j} cannot be shifted")
    return first_order_count(resolved, n_h, ncm_h, n_o, ncm_o)


def _plan_for(pqc: PQC, theta: Sequence[float], j: int, method: GradientMethod) -> GradPlan:
    decompose = method is GradientMethod.PSR and not psr_feasible(pqc, j)
    return build_plan(pqc, theta, j, method, decompose=decompose)


def cost_report(
    pqc: PQC, j: int, method: Union[str, GradientMethod], errors: Optional[ErrorTable] = None
) -> CostReport:
    """Static cost of `method` for parameter j.

    The method's plan is built at theta = 0; CNOT count and EFR are averaged over
    its circuits.

    Args:
        pqc: Parameterized circuit
        j: Parameter position (1-based)
        method: Quantum gradient method
        errors: Optional error table; without it `efr` stays None

    Returns:
        CostReport
    """
    resolved = parse_method(method)
    plan = _plan_for(pqc, np.zeros(pqc.n_params), j, resolved)
    circuits = [task.circuit for task in plan.tasks]
    cnots = [lower_and_count_cnots(c) for c in circuits]
    qubits, depth = first_order_shape(resolved, pqc.qubit_count, pqc.n_params, j)
    return CostReport(
        method=resolved,
        distinct_circuits=method_count(pqc, j, resolved),
        qubits=qubits,
        depth=depth,
        cnot_count=int(round(float(np.mean(cnots)))) if cnots else 0,
        efr=mean_efr(circuits, errors) if errors is not None else None,
    )


def cost_table(
    pqc: PQC, j: int, errors: Optional[ErrorTable] = None, decompose: bool = False
) -> Dict[GradientMethod, CostReport]:
    """CostReport for every feasible method of parameter j.

    With `decompose`, term-wise PSR is reported for generators with commuting terms.
    """
    return {
        method: cost_report(pqc, j, method, errors)
        for method in feasible_methods(pqc, j, decompose)
    }


def _score(report: CostReport, metric: Metric) -> float:
    if metric is Metric.COUNT:
        return float(report.distinct_circuits)
    return float(report.efr)  # type: ignore[arg-type]


def select(
    pqc: PQC, metric: Union[str, Metric] = Metric.COUNT, errors: Optional[ErrorTable] = None
) -> MethodAssignment:
    """Assign the cheapest feasible method to every parameter.

    Ties go to the earlier method in PSR, HT, DHT, RHT, RDHT order. Generators
    with commuting terms are also offered term-wise PSR, which shares DHT's
    circuits and so wins their ties.

    Raises:
        ConfigurationError: If the EFR metric is requested without an error table
    """
    try:
        metric = Metric(getattr(metric, "value", metric))
    except ValueError as e:
        raise ConfigurationError(f"Unknown metric '{metric}'") from e
    if metric is Metric.EFR and errors is None:
        raise ConfigurationError("The EFR metric needs an error table")

    methods = []
    reports = []
    for j in range(1, pqc.n_params + 1):
        table = cost_table(pqc, j, errors if metric is Metric.EFR else None, decompose=True)
        chosen = min(table, key=lambda m: (_score(table[m], metric), QUANTUM_METHODS.index(m)))
        methods.append(chosen)
        reports.append(table)

    assignment = MethodAssignment(metric, methods, reports, pqc.param_names)
    logger.info(
        f"QAD ({metric.value}) assigned {[m.label for m in methods]}, "
        f"{assignment.aggregate_count} circuits per gradient"
    )
    return assignment


class QADGradient:
    """Full-gradient evaluator with one method per parameter."""

    def __init__(
        self,
        pqc: PQC,
        methods: Sequence[GradientMethod],
        shots: Optional[int] = None,
        seed: Seed = None,
        parallel: bool = False,
        max_workers: Optional[int] = None,
    ):
        if len(methods) != pqc.n_params:
            raise GradientError(
                f"Assignment covers {len(methods)} of {pqc.n_params} parameters"
            )
        self.pqc = pqc
        self.methods = [parse_method(m) for m in methods]
        if GradientMethod.FD in self.methods:
            raise GradientError("Assignments must use quantum gradient methods")
        self.shots = shots
        self.seed = seed
        self.parallel = parallel
        self.max_workers = max_workers

    @property
    def circuits_per_iteration(self) -> int:
        return sum(
            method_count(self.pqc, j, method) for j, method in enumerate(self.methods, start=1)
        )

    def plans(self, theta: Sequence[float]) -> List[GradPlan]:
        return [
            _plan_for(self.pqc, theta, j, method)
            for j, method in enumerate(self.methods, start=1)
        ]

    def __call__(self, theta: Sequence[float]) -> np.ndarray:
        plans = self.plans(theta)
        if self.parallel:
            runner = PlanRunner(self.shots, self.seed, self.max_workers)
            results = runner.evaluate_sync(plans)
        else:
            seeds = task_seeds(len(plans), self.seed)
            results = [evaluate_plan(plan, self.shots, s) for plan, s in zip(plans, seeds)]
        return np.array([value for value, _ in results])


def build_gradient(
    pqc: PQC,
    assignment: Union[MethodAssignment, Sequence[GradientMethod]],
    shots: Optional[int] = None,
    seed: Seed = None,
    parallel: bool = False,
) -> QADGradient:
    """Evaluator for the gradient vector under a method assignment."""
    methods = assignment.methods if isinstance(assignment, MethodAssignment) else assignment
    return QADGradient(pqc, list(methods), shots, seed, parallel)
