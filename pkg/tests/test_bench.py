"""Tests for benchmark problems, training and the ratio sweep."""

import json
from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from qad_gradients.bench import (
    ansatz_unitary,
    build_qaoa,
    build_qaqc,
    build_qnn,
    gradient_function,
    hst_observable,
    iteration_count,
    iteration_counts,
    load_graph,
    load_iris,
    ratio_sweep,
    synthetic_operator,
    topology_edges,
    train,
)
from qad_gradients.circuit import PQC, Gate, eval_cost
from qad_gradients.exceptions import CircuitError, CostModelError, DataError, NotPSRCompatible
from qad_gradients.grouping import group_count
from qad_gradients.pauli import PauliSum


DATA = Path(__file__).parent / "data"
TRIANGLE = [(0, 1), (1, 2), (0, 2)]


@pytest.fixture
def golden():
    return json.loads((DATA / "golden_counts.json").read_text(encoding="utf-8"))


@pytest.fixture
def small_iris():
    """Ten samples, five of each class."""
    return load_iris().subset(range(0, 100, 10))


class TestQAOA:
    """Test suite for MaxCut QAOA."""

    def test_triangle_cost_at_zero(self):
        """Test |000> gives cost 3 and a stationary point."""
        problem = build_qaoa(TRIANGLE)
        assert problem.loss([0.0, 0.0]) == pytest.approx(3.0)
        gradient, _ = gradient_function(problem.pqc, "ht")
        assert np.allclose(gradient(problem.pqc, np.zeros(2), None), 0.0, atol=1e-12)

    def test_layers(self):
        """Test two layers alternate cost and mixer."""
        problem = build_qaoa(TRIANGLE, layers=2)
        assert problem.pqc.param_names == ["gamma_0", "beta_0", "gamma_1", "beta_1"]

    def test_invalid_graphs(self):
        """Test empty and disconnected graphs."""
        with pytest.raises(DataError, match="no edges"):
            build_qaoa(nx.empty_graph(3))
        with pytest.raises(DataError, match="connected"):
            build_qaoa([(0, 1), (2, 3)])
        with pytest.raises(CircuitError):
            build_qaoa(TRIANGLE, layers=0)

    def test_load_graph(self, tmp_path):
        """Test edge-list loading."""
        graph = load_graph(DATA / "triangle.edgelist")
        assert graph.number_of_edges() == 3
        with pytest.raises(FileNotFoundError):
            load_graph(tmp_path / "none.edgelist")

    def test_training_decreases(self):
        """Test small-step descent never increases the cost."""
        trace = train(build_qaoa(TRIANGLE), "qad", steps=30, learning_rate=0.02, seed=3)
        assert len(trace.losses) == 31
        assert all(b <= a + 1e-12 for a, b in zip(trace.losses, trace.losses[1:]))
        assert trace.final_loss < trace.losses[0]
        assert trace.circuits == 5


class TestQAQC:
    """Test suite for compiling with the Hilbert-Schmidt test."""

    def test_topology(self):
        """Test ring and line couplings."""
        assert topology_edges(3, "ring") == [(0, 1), (1, 2), (0, 2)]
        assert topology_edges(2, "ring") == [(0, 1)]
        assert topology_edges(3, "line") == [(0, 1), (1, 2)]
        with pytest.raises(CircuitError):
            topology_edges(3, "star")

    def test_hst_observable_is_projector_complement(self):
        """Test O = I - P with P projecting onto the Bell pairs."""
        matrix = hst_observable(2).to_matrix()
        assert np.allclose(matrix @ matrix, matrix)
        assert np.trace(matrix).real == pytest.approx(16 - 1)

    @pytest.mark.parametrize("target", ["ising", "qft", "toffoli", "wstate"])
    def test_circuit_matches_dense_cost(self, target):
        """Test the HST circuit reproduces 1 - |Tr(V^dagger U)|^2/d^2."""
        problem = build_qaqc(target)
        theta = np.random.default_rng(1).uniform(-1.0, 1.0, problem.pqc.n_params)
        assert eval_cost(problem.pqc, theta) == pytest.approx(
            problem.dense_cost(theta), abs=1e-10
        )

    def test_two_qubit_line(self):
        """Test N = 2 with two layers."""
        problem = build_qaqc("qft", layers=2, topology="line", num_qubits=2)
        theta = [0.1, -0.2, 0.3, 0.05]
        assert problem.pqc.qubit_count == 4
        assert eval_cost(problem.pqc, theta) == pytest.approx(problem.dense_cost(theta), abs=1e-10)

    def test_ising_optimum(self):
        """Test the Ising target compiles exactly at its own angles."""
        problem = build_qaqc("ising")
        assert problem.loss([0.3, 0.4]) == pytest.approx(0.0, abs=1e-10)
        assert np.allclose(problem.target, ansatz_unitary(3, [0.3, 0.4], 1))

    def test_counts_favour_reversed_test(self):
        """Test RHT needs a third of the HT circuits."""
        pqc = build_qaqc("ising").pqc
        assert iteration_count(pqc, "ht") == 3 * iteration_count(pqc, "rht")

    def test_size_limits(self):
        """Test unsupported sizes and targets."""
        with pytest.raises(CircuitError):
            build_qaqc("toffoli", num_qubits=2)
        with pytest.raises(CircuitError):
            build_qaqc("qft", num_qubits=4)
        with pytest.raises(CircuitError, match="Unknown QAQC target"):
            build_qaqc("grover")

    def test_converges(self):
        """Test descent from near zero reaches the Ising target."""
        trace = train(build_qaqc("ising"), "qad", steps=60, learning_rate=0.05, seed=0)
        assert trace.final_loss < trace.losses[0]
        assert trace.final_loss < 1e-2


class TestQNN:
    """Test suite for the Iris classifier."""

    def test_bundled_dataset(self):
        """Test the default classes and scaling."""
        dataset = load_iris()
        assert len(dataset) == 100
        assert set(dataset.labels) == {-1.0, 1.0}
        assert dataset.features.min() == pytest.approx(0.0)
        assert dataset.features.max() == pytest.approx(np.pi)

    def test_csv_dataset(self, tmp_path):
        """Test CSV loading with a header and prefixed species names."""
        path = tmp_path / "iris.csv"
        path.write_text(
            "sepal_length,sepal_width,petal_length,petal_width,species\n"
            "5.1,3.5,1.4,0.2,Iris-setosa\n"
            "7.0,3.2,4.7,1.4,Iris-versicolor\n"
            "6.3,3.3,6.0,2.5,Iris-virginica\n",
            encoding="utf-8",
        )
        dataset = load_iris(path)
        assert list(dataset.labels) == [-1.0, 1.0]
        assert dataset.classes == ("setosa", "versicolor")

    def test_bad_rows(self, tmp_path):
        """Test malformed rows name their line."""
        path = tmp_path / "iris.csv"
        path.write_text("5.1,3.5,1.4,0.2,setosa\n5.1,x,1.4,0.2,versicolor\n", encoding="utf-8")
        with pytest.raises(DataError, match="Row 2"):
            load_iris(path)

    def test_missing_file_and_class(self, tmp_path):
        """Test missing files and unknown classes."""
        with pytest.raises(FileNotFoundError):
            load_iris(tmp_path / "nope.csv")
        with pytest.raises(DataError, match="Unknown class"):
            load_iris(classes=("setosa", "daisy"))

    def test_gradients_agree(self, small_iris):
        """Test the loss gradient is the same under every method."""
        problem = build_qnn(small_iris)
        theta = np.array([0.4, -0.3, 0.2])
        reference = problem.loss_gradient(theta, gradient_function(problem.pqc, "fd")[0], None)
        for method in ("qad", "ht", "rht", "psr"):
            gradient, _ = gradient_function(problem.pqc, method)
            assert np.allclose(problem.loss_gradient(theta, gradient, 0), reference, atol=1e-6)

    def test_training_decreases(self):
        """Test fifty steps at eta 0.05 lower the loss on every iteration."""
        trace = train(build_qnn(load_iris()), "qad", steps=50, learning_rate=0.05, seed=0)
        assert len(trace.losses) == 51
        assert all(b < a for a, b in zip(trace.losses, trace.losses[1:]))
        assert trace.circuits == 7

    @pytest.mark.parametrize("method", ["psr", "ht", "dht", "rht", "rdht"])
    def test_every_method_follows_qad(self, method):
        """Test exact training takes the same steps whatever the method."""
        problem = build_qnn(load_iris())
        reference = train(problem, "qad", steps=3, learning_rate=0.05, seed=0)
        trace = train(problem, method, steps=3, learning_rate=0.05, seed=0)
        assert np.allclose(trace.losses, reference.losses, atol=1e-8)
        assert np.allclose(trace.theta, reference.theta, atol=1e-8)

    def test_predictions_bounded(self, small_iris):
        """Test predictions lie in [-1, 1]."""
        problem = build_qnn(small_iris)
        predictions = problem.predict([1.0, 2.0, -0.5])
        assert np.all(np.abs(predictions) <= 1.0 + 1e-12)
        assert 0.0 <= problem.accuracy([1.0, 2.0, -0.5]) <= 1.0


class TestCounts:
    """Test suite for per-iteration circuit counts."""

    @pytest.mark.parametrize(
        "name, build",
        [
            ("qaoa_triangle_p1", lambda: build_qaoa(TRIANGLE).pqc),
            ("qaqc_ising_ring_n3", lambda: build_qaqc("ising").pqc),
            ("qnn_iris", lambda: build_qnn(load_iris().subset(range(4))).pqc),
        ],
    )
    def test_golden_counts(self, golden, name, build):
        """Test every method against the recorded counts."""
        assert iteration_counts(build()) == golden[name]

    def test_qnn_reduction(self, qnn_pqc):
        """Test QAD needs roughly a ninth of decomposed PSR."""
        assert iteration_count(qnn_pqc, "psr") / iteration_counts(qnn_pqc)["qad"] == pytest.approx(
            62 / 7
        )

    def test_fd_counts_two_per_parameter(self, qnn_pqc):
        """Test finite differences."""
        assert iteration_count(qnn_pqc, "fd") == 6

    def test_psr_needs_commuting_terms(self):
        """Test decomposed PSR on a non-commuting generator."""
        pqc = PQC(1, (Gate(PauliSum([(1.0, "X"), (1.0, "Z")]), "a"),), PauliSum([(1.0, "Y")]))
        with pytest.raises(NotPSRCompatible):
            iteration_count(pqc, "psr")
        assert "psr" not in iteration_counts(pqc)

    def test_negative_steps(self):
        """Test step counts are validated."""
        with pytest.raises(CostModelError):
            train(build_qaoa(TRIANGLE), "ht", steps=-1)


class TestRatioSweep:
    """Test suite for the DHT/RDHT ratio matrix."""

    def test_synthetic_operator_groups(self):
        """Test the commuting block plus one group per remaining term."""
        op = synthetic_operator(4, 0.1)
        assert op.term_count == 9
        assert group_count(op) == 9
        assert group_count(synthetic_operator(4, 1.0)) == 1

    def test_matrix(self):
        """Test diagonal, reciprocity and the extreme corner."""
        sweep = ratio_sweep(4)
        assert sweep.terms == 9
        assert np.allclose(np.diag(sweep.matrix), 1.0)
        assert np.allclose(sweep.matrix * sweep.matrix.T, 1.0)
        assert sweep.matrix[0, -1] == pytest.approx(9.0)
        assert len(sweep.to_rows()) == 100

    def test_fraction_range(self):
        """Test grid and size validation."""
        with pytest.raises(CostModelError):
            ratio_sweep(4, [0.0, 0.5])
        with pytest.raises(CostModelError):
            synthetic_operator(1, 0.5)
