"""Runtime configuration: tolerances, simulator caps and training defaults."""

import logging
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Mapping, Optional

from .exceptions import ConfigurationError


logger = logging.getLogger(__name__)


def _default_error_rates() -> Dict[str, float]:
    return {"cnot": 0.01, "1q": 0.001, "measure": 0.02}


@dataclass(frozen=True)
class Settings:
    """Tolerances and defaults shared by every module."""

    dedup_tolerance: float = 1e-12
    eigenvalue_tolerance: float = 1e-8
    hermitian_tolerance: float = 1e-10
    max_qubits: int = 14
    max_decompose_qubits: int = 12
    max_oracle_qubits: int = 5
    fd_epsilon: float = 1e-5
    seed: int = 0
    learning_rate: float = 0.1
    qnn_learning_rate: float = 0.05
    training_steps: int = 100
    log_every: int = 10
    error_rates: Dict[str, float] = field(default_factory=_default_error_rates)

    @classmethod
    def from_mapping(cls, mapping: Optional[Mapping[str, Any]] = None, **kwargs: Any) -> "Settings":
        """Build settings from a mapping of overrides.

        Keys are matched case-insensitively so Flask-style upper-case config works too.

        Args:
            mapping: Overrides keyed by field name
            **kwargs: Additional overrides

        Returns:
            New Settings instance

        Raises:
            ConfigurationError: If a key is unknown or a value is invalid
        """
        overrides: Dict[str, Any] = {}
        for source in (mapping or {}), kwargs:
            for key, value in source.items():
                overrides[key.lower()] = value

        known = {f.name for f in fields(cls)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {', '.join(unknown)}")

        settings = replace(cls(), **overrides)
        settings.validate()
        return settings

    def validate(self) -> None:
        """Check value ranges.

        Raises:
            ConfigurationError: If a setting is out of range
        """
        if self.max_qubits < 1:
            raise ConfigurationError("max_qubits must be positive")
        if self.fd_epsilon <= 0:
            raise ConfigurationError("fd_epsilon must be positive")
        for name in ("dedup_tolerance", "eigenvalue_tolerance", "hermitian_tolerance"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be non-negative")
        for kind, rate in self.error_rates.items():
            if not 0.0 <= float(rate) < 1.0:
                raise ConfigurationError(f"Error rate for '{kind}' must lie in [0, 1), got {rate}")


_settings = Settings()


def get_settings() -> Settings:
    """Return the process-wide settings."""
    return _settings


def configure(**overrides: Any) -> Settings:
    """Replace the process-wide settings with overridden values.

    Args:
        **overrides: Field values to change

    Returns:
        The new active settings
    """
    global _settings
    _settings = Settings.from_mapping(overrides)
    logger.debug(f"Settings updated: {sorted(overrides)}")
    return _settings


def reset_settings() -> Settings:
    """Restore the default settings."""
    global _settings
    _settings = Settings()
    return _settings
