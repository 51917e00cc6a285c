"""Tests for the static cost model."""

import pytest

from qad_gradients.circuit import (
    PQC,
    AncillaPrep,
    Circuit,
    ControlledPauli,
    DenseUnitary,
    Gate,
    InverseSegment,
    PauliRotation,
)
from qad_gradients.cost import (
    efr,
    first_order_count,
    first_order_shape,
    lower,
    lower_and_count_cnots,
    mean_efr,
    plan_counts,
)
from qad_gradients.data_types import ErrorTable
from qad_gradients.exceptions import ConfigurationError, CostModelError, DataError
from qad_gradients.pauli import PauliSum, PauliWord


def _word(label):
    return PauliWord.from_label(label)


class TestCounts:
    """Test suite for distinct-circuit counts."""

    def test_hadamard_test_count(self):
        """Test HT with three generator terms and two observable groups."""
        assert first_order_count("ht", 3, 1, 4, 2) == 6
        assert first_order_count("dht", 3, 1, 4, 2) == 12
        assert first_order_count("psr", 3, 1, 4, 2) == 12

    def test_reversed_count(self):
        """Test RHT with two generator groups and five observable terms."""
        assert first_order_count("rht", 4, 2, 5, 3) == 10
        assert first_order_count("rdht", 4, 2, 5, 3) == 20

    def test_fd_has_no_cost(self):
        """Test finite differences are not costed."""
        with pytest.raises(CostModelError, match="no circuit cost"):
            first_order_count("fd", 1, 1, 1, 1)

    def test_unknown_method(self):
        """Test unknown methods raise CostModelError."""
        with pytest.raises(CostModelError):
            first_order_count("xyz", 1, 1, 1, 1)

    @pytest.mark.parametrize(
        "counts", [(-1, 1, 1, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0)]
    )
    def test_counts_below_one(self, counts):
        """Test every term and group count must be at least one."""
        with pytest.raises(CostModelError, match="at least one"):
            first_order_count("ht", *counts)

    def test_identity_generator_has_no_count(self):
        """Test identity-only generators and observables are rejected."""
        constant_gate = PQC(2, (Gate(PauliSum([(0.7, "II")]), "a"),), PauliSum([(1.0, "ZI")]))
        with pytest.raises(CostModelError, match="multiple of the identity"):
            plan_counts(constant_gate, 1)
        constant_readout = PQC(2, (Gate(PauliSum([(1.0, "XI")]), "a"),), PauliSum([(1.0, "II")]))
        with pytest.raises(CostModelError, match="Observable"):
            plan_counts(constant_readout, 1)

    def test_plan_counts(self, table3_operator):
        """Test term and group counts exclude identity terms."""
        pqc = PQC(
            2,
            (Gate(PauliSum([(1.0, "II"), (1.0, "ZZ"), (1.0, "XX"), (1.0, "ZX")]), "a"),),
            PauliSum([(0.5, "II"), (1.0, "ZI")]),
        )
        assert plan_counts(pqc, 1) == (3, 2, 1, 1)

    def test_projector_readout_counts_once(self):
        """Test projector observables count as one term in one group."""
        pqc = PQC(
            2,
            (Gate(PauliSum([(1.0, "XI")]), "a"),),
            PauliSum([(1.0, "ZI"), (1.0, "XX"), (1.0, "IY")]),
            projector_readout=True,
        )
        assert plan_counts(pqc, 1) == (1, 1, 1, 1)


class TestShapes:
    """Test suite for circuit shapes."""

    def test_reversed_shape(self):
        """Test RHT on three qubits, four gates, gate two."""
        assert first_order_shape("rht", 3, 4, 2) == (4, 7)
        assert first_order_shape("rdht", 3, 4, 2) == (3, 7)

    def test_direct_shape(self):
        """Test DHT adds depth but no qubits."""
        assert first_order_shape("dht", 4, 3, 1) == (4, 4)
        assert first_order_shape("ht", 4, 3, 1) == (5, 4)
        assert first_order_shape("psr", 4, 3, 1) == (4, 3)

    def test_gate_position(self):
        """Test positions outside 1..n."""
        with pytest.raises(CostModelError, match="outside"):
            first_order_shape("ht", 2, 3, 4)


class TestLowering:
    """Test suite for CNOT lowering and failure rates."""

    def test_two_qubit_rotation(self):
        """Test a ZZ rotation lowers to two CNOTs."""
        circuit = Circuit(2, (PauliRotation(_word("ZZ"), 0.3),))
        assert lower_and_count_cnots(circuit) == 2

    def test_controlled_word(self):
        """Test a controlled XXXX costs one CNOT per letter."""
        circuit = Circuit(5, (ControlledPauli(4, 1, _word("XXXXI")),))
        assert lower_and_count_cnots(circuit) == 4

    def test_mixed_circuit(self):
        """Test kinds are counted separately."""
        ops = (
            AncillaPrep(2),
            PauliRotation(_word("XYI"), 0.1),
            DenseUnitary((0, 1), [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
            InverseSegment((PauliRotation(_word("ZII"), 0.2),)),
        )
        kinds = lower(Circuit(3, ops), measured_qubits=3)
        assert kinds["cnot"] == 2 + 2
        assert kinds["1q"] == 1 + 2 + 2 + 1
        assert kinds["measure"] == 3

    def test_failure_rate(self):
        """Test 1 - (1 - 0.01)(1 - 0.02)."""
        circuit = Circuit(2, (ControlledPauli(0, 1, _word("IX")),))
        errors = ErrorTable({"cnot": 0.01, "measure": 0.02})
        assert efr(circuit, errors, measured_qubits=1) == pytest.approx(0.0298)

    def test_missing_rate(self):
        """Test lowered kinds need a rate."""
        circuit = Circuit(2, (PauliRotation(_word("ZZ"), 0.3),))
        with pytest.raises(CostModelError, match="no rate"):
            efr(circuit, ErrorTable({"cnot": 0.01}))

    def test_mean_efr(self):
        """Test the average over circuits measured on their full register."""
        errors = ErrorTable({"cnot": 0.0, "1q": 0.0, "measure": 0.1})
        circuits = [Circuit(1), Circuit(2)]
        assert mean_efr(circuits, errors) == pytest.approx((0.1 + 0.19) / 2)
        assert mean_efr([], errors) == 0.0


class TestErrorTable:
    """Test suite for ErrorTable."""

    def test_rate_range(self):
        """Test rates lie in [0, 1)."""
        with pytest.raises(ConfigurationError):
            ErrorTable({"cnot": 1.5})

    def test_from_json(self, tmp_path):
        """Test loading and malformed files."""
        path = tmp_path / "errors.json"
        path.write_text('{"cnot": 0.02, "1q": 0.001, "measure": 0.01}', encoding="utf-8")
        assert ErrorTable.from_json(path).probability("cnot") == pytest.approx(0.02)
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(DataError):
            ErrorTable.from_json(path)

    def test_scaled(self):
        """Test uniform scaling."""
        table = ErrorTable.default().scaled(2.0)
        assert table.probability("cnot") == pytest.approx(0.02)
