"""Test configuration and fixtures."""

import numpy as np
import pytest

from qad_gradients.bench import qnn_ansatz
from qad_gradients.circuit import PQC, Gate
from qad_gradients.config import reset_settings
from qad_gradients.pauli import PauliSum, PauliWord


LETTERS = "IXYZ"


@pytest.fixture(autouse=True)
def default_settings():
    """Every test starts from the default settings."""
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rx_pqc():
    """Single RX gate measured in Z: f(theta) = cos(theta)."""
    return PQC(1, (Gate(PauliSum([(1.0, "X")]), "theta"),), PauliSum([(1.0, "Z")]))


def _random_word(rng, num_qubits):
    while True:
        label = "".join(rng.choice(list(LETTERS), size=num_qubits))
        if set(label) != {"I"}:
            return PauliWord.from_label(label)


def _random_sum(rng, num_qubits, max_terms):
    count = int(rng.integers(1, max_terms + 1))
    terms = [
        (float(rng.uniform(0.3, 1.5) * rng.choice([-1, 1])), _random_word(rng, num_qubits))
        for _ in range(count)
    ]
    return PauliSum(terms, num_qubits)


@pytest.fixture
def random_pqc():
    """Factory for seeded random PQCs with up to three terms per generator."""

    def build(seed, num_qubits=None, n_params=None, max_terms=3):
        rng = np.random.default_rng(seed)
        num_qubits = num_qubits or int(rng.integers(2, 4))
        n_params = n_params or int(rng.integers(2, 5))
        gates = tuple(
            Gate(_random_sum(rng, num_qubits, max_terms), f"t{j}") for j in range(1, n_params + 1)
        )
        observable = _random_sum(rng, num_qubits, max_terms)
        pqc = PQC(num_qubits, gates, observable)
        theta = rng.uniform(-np.pi, np.pi, n_params)
        return pqc, theta

    return build


@pytest.fixture
def table3_operator():
    """Z0Z1 + X0X1 + Z0X1: three terms in two commuting groups."""
    return PauliSum([(1.0, "ZZ"), (1.0, "XX"), (1.0, "ZX")])


@pytest.fixture
def qnn_pqc():
    """Three-gate classifier ansatz."""
    return qnn_ansatz()


@pytest.fixture
def pqc_file(tmp_path):
    """Two-qubit PQC written to a JSON file."""

    def write(pqc=None):
        if pqc is None:
            pqc = PQC(
                2,
                (
                    Gate(PauliSum([(1.0, "XI")]), "a"),
                    Gate(PauliSum([(0.5, "ZZ"), (0.7, "YX")]), "b"),
                ),
                PauliSum([(1.0, "ZI"), (0.5, "IZ")]),
            )
        path = tmp_path / "pqc.json"
        path.write_text(pqc.to_json(), encoding="utf-8")
        return path

    return write
