from __future__ import annotations

from pathlib import Path

import pytest

import kit


@pytest.fixture(scope="session")
def bench_images(tmp_path_factory) -> dict:
    """Freshly rendered bench photographs shared by the CLI/service tests."""
    directory = tmp_path_factory.mktemp("bench-images")
    return kit.render_bench_images(directory)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return Path(__file__).parent / "data"
