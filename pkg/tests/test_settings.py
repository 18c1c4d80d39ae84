"""Tests for runtime settings and run records."""

from __future__ import annotations

from pathlib import Path

import pytest

from gcasim.settings import RunConfig, RuntimeSettings


def test_environment_overrides(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("GCASIM_OUTPUT_DIR", "/tmp/gca-out")
    monkeypatch.setenv("GCASIM_DEFAULT_BINS", "32")
    settings = RuntimeSettings()
    assert settings.output_dir == Path("/tmp/gca-out")
    assert settings.default_bins == 32
    assert settings.default_iterations == 5


def test_config_hash_ignores_output_dir() -> None:
    first = RunConfig(command="dist", parameters={"bins": 64}, output_dir="a")
    moved = RunConfig(command="dist", parameters={"bins": 64}, output_dir="b")
    changed = RunConfig(command="dist", parameters={"bins": 32}, output_dir="a")
    assert first.config_hash() == moved.config_hash()
    assert first.config_hash() != changed.config_hash()
    assert len(first.config_hash()) == 16
