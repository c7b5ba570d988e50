"""
Unit tests for environment-driven configuration.
"""

import pytest

from src.core.config.config import Config


class TestSeedResolution:
    """Test cases for MDIICA_SEED precedence."""

    def test_requested_seed_without_override(self, monkeypatch):
        """Test that the flag value is used when MDIICA_SEED is unset."""
        monkeypatch.delenv("MDIICA_SEED", raising=False)
        monkeypatch.setattr(Config, "SEED_OVERRIDE", None)
        assert Config.seed_override() is None
        assert Config.resolve_seed(17) == 17

    def test_default_seed(self, monkeypatch):
        """Test that the default applies when nothing is requested."""
        monkeypatch.delenv("MDIICA_SEED", raising=False)
        monkeypatch.setattr(Config, "SEED_OVERRIDE", None)
        assert Config.resolve_seed(None) == Config.DEFAULT_SEED

    def test_environment_wins(self, monkeypatch):
        """Test that MDIICA_SEED overrides the requested seed."""
        monkeypatch.setenv("MDIICA_SEED", "42")
        assert Config.seed_override() == 42
        assert Config.resolve_seed(17) == 42

    def test_blank_override_is_ignored(self, monkeypatch):
        """Test that an empty MDIICA_SEED counts as unset."""
        monkeypatch.setenv("MDIICA_SEED", "  ")
        assert Config.resolve_seed(5) == 5

    @pytest.mark.parametrize("value", ["-1", "seven"])
    def test_invalid_override(self, monkeypatch, value):
        """Test that a negative or non-numeric MDIICA_SEED is rejected."""
        monkeypatch.setenv("MDIICA_SEED", value)
        with pytest.raises(ValueError):
            Config.resolve_seed(None)


class TestDefaults:
    """Test cases for the built-in defaults."""

    def test_output_names_and_formats(self):
        """Test artifact file names and float formats."""
        assert Config.SOURCES_FILENAME == "sources.csv"
        assert Config.SIDECAR_FILENAME == "separation.json"
        assert Config.TRIALS_FILENAME == "trials.csv"
        assert Config.SUMMARY_FILENAME == "summary.json"
        assert Config.SOURCES_FLOAT_FORMAT == "%.17g"
        assert Config.DEFAULT_METHOD == "mica2"
