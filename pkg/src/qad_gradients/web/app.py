"""Flask application factory for the qad-gradients JSON API."""

import logging
from typing import Any, Dict, Optional, Tuple

from flask import Flask, jsonify, request

from ..circuit import PQC
from ..data_types import ErrorTable
from ..exceptions import DataError, QADError
from ..gradfirst import gradient
from ..qad import cost_table, select


logger = logging.getLogger(__name__)


def create_app(config: Optional[Dict] = None) -> Flask:
    """Create Flask application with configuration.

    Args:
        config: Optional configuration dictionary

    Returns:
        Configured Flask application
    """
    app = Flask(__name__)
    app.config.from_mapping(
        MAX_QUBITS=8,
        DEFAULT_METHOD="ht",
        DEFAULT_METRIC="count",
        HOST="127.0.0.1",
        PORT=5000,
    )

    if config:
        app.config.update(config)

    register_api_routes(app)
    register_error_handlers(app)

    return app


def _payload() -> Dict[str, Any]:
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise DataError("Request body must be a JSON object")
    return data


def _pqc(app: Flask, data: Dict[str, Any]) -> PQC:
    if "pqc" not in data:
        raise DataError("Missing 'pqc'")
    pqc = PQC.from_dict(data["pqc"])
    if pqc.qubit_count > app.config["MAX_QUBITS"]:
        raise DataError(f"PQC has {pqc.qubit_count} qubits, limit is {app.config['MAX_QUBITS']}")
    return pqc


def _param(data: Dict[str, Any]) -> int:
    try:
        return int(data.get("param", 1))
    except (TypeError, ValueError) as e:
        raise DataError(f"Invalid 'param': {data.get('param')}") from e


def _errors(data: Dict[str, Any]) -> Optional[ErrorTable]:
    if data.get("errors") is None:
        return None
    return ErrorTable.from_mapping(data["errors"])


def register_api_routes(app: Flask) -> None:
    """Register JSON API routes."""

    @app.route("/api/health")
    def api_health():
        """Liveness check."""
        return jsonify({"status": "ok"})

    @app.route("/api/grad", methods=["POST"])
    def api_grad():
        """One partial derivative with the requested method."""
        data = _payload()
        pqc = _pqc(app, data)
        theta = data.get("theta", [0.0] * pqc.n_params)
        method = data.get("method", app.config["DEFAULT_METHOD"])
        value, plan = gradient(
            pqc,
            theta,
            _param(data),
            method,
            shots=data.get("shots"),
            seed=data.get("seed"),
            decompose=bool(data.get("decompose", False)),
        )
        result: Dict[str, Any] = {"value": value, "method": method}
        if plan is not None:
            result.update(plan.summary())
        return jsonify(result)

    @app.route("/api/cost", methods=["POST"])
    def api_cost():
        """CostReport for every feasible method of one parameter."""
        data = _payload()
        pqc = _pqc(app, data)
        table = cost_table(pqc, _param(data), _errors(data))
        return jsonify({"reports": [report.to_dict() for report in table.values()]})

    @app.route("/api/qad", methods=["POST"])
    def api_qad():
        """Method assignment for every parameter."""
        data = _payload()
        pqc = _pqc(app, data)
        metric = data.get("metric", app.config["DEFAULT_METRIC"])
        return jsonify(select(pqc, metric, _errors(data)).to_dict())


def register_error_handlers(app: Flask) -> None:
    """Map library errors to HTTP 400."""

    @app.errorhandler(QADError)
    def handle_qad_error(error: QADError) -> Tuple[Any, int]:
        logger.info(f"Rejected request: {error}")
        return jsonify({"error": str(error)}), 400


def main() -> None:
    """Main function to run the web application."""
    app = create_app()
    app.run(host=app.config["HOST"], port=app.config["PORT"])


if __name__ == "__main__":
    main()
