"""Measurement grouping: partition Pauli terms into simultaneously measurable sets."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np

from .exceptions import GroupingError
from .pauli import PauliSum, PauliWord, commutes, pauli_action, qubitwise_commutes

if TYPE_CHECKING:
    from .circuit import StateVector


logger = logging.getLogger(__name__)


class Criterion(str, Enum):
    """Compatibility rule between two terms of one group."""

    FULL = "full"
    QUBITWISE = "qubitwise"

    def compatible(self, a: PauliWord, b: PauliWord) -> bool:
        if self is Criterion.FULL:
            return commutes(a, b)
        return qubitwise_commutes(a, b)


@dataclass(frozen=True)
class Grouping:
    """Partition of a PauliSum's term indices."""

    criterion: Criterion
    groups: Tuple[Tuple[int, ...], ...]
    operator: PauliSum = field(compare=False)

    @property
    def group_count(self) -> int:
        return len(self.groups)

    def labels(self) -> List[List[str]]:
        words = self.operator.words
        return [[words[i].label for i in group] for group in self.groups]

    def is_valid(self) -> bool:
        """Every index appears once and every intra-group pair is compatible."""
        words = self.operator.words
        seen = sorted(i for group in self.groups for i in group)
        if seen != list(range(len(words))):
            return False
        return all(
            self.criterion.compatible(words[a], words[b])
            for group in self.groups
            for pos, a in enumerate(group)
            for b in group[pos + 1 :]
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "criterion": self.criterion.value,
            "groups": self.labels(),
            "term_count": self.operator.term_count,
            "group_count": self.group_count,
        }


def _term_order(obs: PauliSum) -> List[int]:
    return sorted(
        range(len(obs)), key=lambda i: (-abs(obs.terms[i][0]), obs.terms[i][1].label)
    )


def _first_fit(obs: PauliSum, criterion: Criterion) -> Tuple[Tuple[int, ...], ...]:
    words = obs.words
    order = _term_order(obs)

    conflicts = nx.Graph()
    conflicts.add_nodes_from(order)
    for pos, a in enumerate(order):
        for b in order[pos + 1 :]:
            if not criterion.compatible(words[a], words[b]):
                conflicts.add_edge(a, b)

    colors = nx.coloring.greedy_color(conflicts, strategy=lambda graph, _: iter(order))
    members: Dict[int, List[int]] = {}
    for index in order:
        members.setdefault(colors[index], []).append(index)
    return tuple(tuple(members[color]) for color in sorted(members))


def partition(obs: PauliSum, criterion: Criterion = Criterion.FULL) -> Grouping:
    """Greedy first-fit partition of the terms of `obs`.

    Terms are visited by descending |coefficient|, then label, and each joins the
    first group whose members are all compatible with it. Under full
    commutativity the qubit-wise partition is kept instead when first-fit
    produces more groups than it, so N_cm(full) <= N_cm(qubitwise) always holds.

    Args:
        obs: Operator to partition
        criterion: Compatibility rule

    Returns:
        Deterministic Grouping
    """
    criterion = Criterion(criterion)
    groups = _first_fit(obs, criterion)
    if criterion is Criterion.FULL:
        finer = _first_fit(obs, Criterion.QUBITWISE)
        if len(finer) < len(groups):
            groups = finer

    logger.debug(f"Partitioned {len(obs.words)} terms into {len(groups)} {criterion.value} groups")
    return Grouping(criterion, groups, obs)


def group_count(obs: PauliSum, criterion: Criterion = Criterion.FULL) -> int:
    """Number of groups (N_cm) of the greedy partition."""
    return partition(obs, criterion).group_count


def measure_groups(state: "StateVector", obs: PauliSum, grouping: Grouping) -> float:
    """Exact sum of group expectations, one measurement setting per group."""
    if obs.num_qubits != state.qubit_count:
        raise GroupingError(
            f"Observable width {obs.num_qubits} does not match state width {state.qubit_count}"
        )
    psi = state.amplitudes
    total = 0.0
    for group in grouping.groups:
        group_value = 0.0j
        for i in group:
            coeff, word = obs.terms[i]
            targets, phases = pauli_action(word.num_qubits, word.x, word.z)
            moved = np.empty_like(psi)
            moved[targets] = phases * psi
            group_value += coeff * np.vdot(psi, moved)
        total += group_value.real
    return float(total)


def basis_rotation(words: Iterable[PauliWord]) -> List[Tuple[int, str]]:
    """Per-qubit measurement bases diagonalising a qubit-wise group.

    Returns:
        Sorted (qubit, letter) pairs for qubits measured in the X or Y basis

    Raises:
        GroupingError: If two words need different bases on one qubit
    """
    bases: Dict[int, str] = {}
    for word in words:
        for qubit in word.support:
            letter = word.letter(qubit)
            if bases.setdefault(qubit, letter) != letter:
                raise GroupingError(
                    f"Qubit {qubit} needs both {bases[qubit]} and {letter} bases"
                )
    return sorted((q, letter) for q, letter in bases.items() if letter != "Z")


def grouping_report(
    operators: Sequence[Tuple[str, PauliSum]], criterion: Criterion = Criterion.FULL
) -> List[Dict[str, Any]]:
    """JSON-ready report for several named operators."""
    report = []
    for name, operator in operators:
        entry: Dict[str, Any] = {"name": name}
        entry.update(partition(operator, criterion).to_dict())
        report.append(entry)
    return report
