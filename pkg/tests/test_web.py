"""Tests for the Flask JSON API."""

import pytest

from qad_gradients.circuit import PQC, Gate
from qad_gradients.pauli import PauliSum
from qad_gradients.web import create_app


@pytest.fixture
def client():
    app = create_app({"TESTING": True, "MAX_QUBITS": 3})
    return app.test_client()


@pytest.fixture
def pqc_dict():
    pqc = PQC(
        2,
        (Gate(PauliSum([(1.0, "XI")]), "a"), Gate(PauliSum([(1.0, "ZZ"), (0.5, "YX")]), "b")),
        PauliSum([(1.0, "ZI"), (0.5, "IZ")]),
    )
    return pqc.to_dict()


class TestWebApp:
    """Test suite for the web API."""

    def test_config(self):
        """Test defaults and overrides."""
        app = create_app({"DEFAULT_METHOD": "rht"})
        assert app.config["DEFAULT_METHOD"] == "rht"
        assert app.config["MAX_QUBITS"] == 8

    def test_health(self, client):
        """Test the liveness route."""
        response = client.get("/api/health")
        assert response.status_code == 200
        assert response.get_json() == {"status": "ok"}

    def test_grad(self, client, pqc_dict):
        """Test a derivative with the default method."""
        response = client.post(
            "/api/grad", json={"pqc": pqc_dict, "theta": [0.0, 0.0], "param": 1}
        )
        data = response.get_json()
        assert response.status_code == 200
        assert data["method"] == "ht"
        assert data["value"] == pytest.approx(0.0, abs=1e-12)

    def test_grad_fd(self, client, pqc_dict):
        """Test finite differences return no plan summary."""
        response = client.post(
            "/api/grad", json={"pqc": pqc_dict, "theta": [0.3, 0.1], "param": 2, "method": "fd"}
        )
        data = response.get_json()
        assert response.status_code == 200
        assert "tasks" not in data

    def test_cost(self, client, pqc_dict):
        """Test cost reports for one parameter."""
        response = client.post("/api/cost", json={"pqc": pqc_dict, "param": 1})
        reports = response.get_json()["reports"]
        assert response.status_code == 200
        assert reports[0]["method"] == "PSR"

    def test_qad(self, client, pqc_dict):
        """Test the method assignment."""
        response = client.post("/api/qad", json={"pqc": pqc_dict})
        data = response.get_json()
        assert response.status_code == 200
        assert data["metric"] == "count"
        assert len(data["methods"]) == 2

    def test_qad_efr_with_errors(self, client, pqc_dict):
        """Test the EFR metric with an inline error table."""
        errors = {"cnot": 0.01, "1q": 0.001, "measure": 0.02}
        response = client.post("/api/qad", json={"pqc": pqc_dict, "metric": "efr", "errors": errors})
        assert response.status_code == 200
        assert response.get_json()["metric"] == "efr"


class TestWebErrors:
    """Test suite for error responses."""

    def test_not_json(self, client):
        """Test non-object bodies."""
        response = client.post("/api/qad", data="nope", content_type="text/plain")
        assert response.status_code == 400
        assert "JSON object" in response.get_json()["error"]

    def test_missing_pqc(self, client):
        """Test requests without a circuit."""
        response = client.post("/api/cost", json={"param": 1})
        assert response.status_code == 400

    def test_qubit_limit(self, client):
        """Test the configured width limit."""
        pqc = PQC(4, (Gate(PauliSum([(1.0, "XIII")]), "a"),), PauliSum([(1.0, "ZIII")]))
        response = client.post("/api/qad", json={"pqc": pqc.to_dict()})
        assert response.status_code == 400
        assert "limit is 3" in response.get_json()["error"]

    def test_efr_without_errors(self, client, pqc_dict):
        """Test library errors map to 400."""
        response = client.post("/api/qad", json={"pqc": pqc_dict, "metric": "efr"})
        assert response.status_code == 400
        assert "error table" in response.get_json()["error"]

    def test_bad_param(self, client, pqc_dict):
        """Test non-integer parameter positions."""
        response = client.post("/api/grad", json={"pqc": pqc_dict, "param": "first"})
        assert response.status_code == 400
