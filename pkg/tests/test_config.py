"""Tests for process-wide settings."""

import pytest

from qad_gradients.config import Settings, configure, get_settings, reset_settings
from qad_gradients.exceptions import ConfigurationError


class TestSettings:
    """Test suite for Settings."""

    def test_defaults(self):
        """Test the documented defaults."""
        settings = get_settings()
        assert settings.max_qubits == 14
        assert settings.fd_epsilon == pytest.approx(1e-5)
        assert settings.error_rates["cnot"] == pytest.approx(0.01)

    def test_configure_and_reset(self):
        """Test overrides apply until reset."""
        configure(learning_rate=0.2)
        assert get_settings().learning_rate == pytest.approx(0.2)
        reset_settings()
        assert get_settings().learning_rate == pytest.approx(0.1)

    def test_unknown_key(self):
        """Test unknown settings are rejected."""
        with pytest.raises(ConfigurationError):
            configure(colour="blue")

    @pytest.mark.parametrize(
        "overrides",
        [{"max_qubits": 0}, {"fd_epsilon": 0.0}, {"error_rates": {"cnot": 1.0}}],
    )
    def test_invalid_values(self, overrides):
        """Test range validation."""
        with pytest.raises(ConfigurationError):
            Settings.from_mapping(overrides)
