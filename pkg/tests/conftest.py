"""Shared fixtures: tiny cameras for unit tests, session-scoped datasets."""

import sys

import numpy as np
import pytest

from hscloud.geometry import CameraModel
from hscloud.synthscene import NoiseSpec, default_scene, generate_dataset


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance criterion PASS/FAIL lines after the run."""
    module = (sys.modules.get("test_acceptance")
              or sys.modules.get("tests.test_acceptance"))
    lines = getattr(module, "PASS_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def cam_small():
    """64x48 pinhole at the origin looking +z."""
    return CameraModel(
        K=np.array([[80.0, 0, 32.0], [0, 80.0, 24.0], [0, 0, 1.0]]),
        R=np.eye(3),
        t=np.zeros(3),
        resolution=(64, 48),
    )


@pytest.fixture(scope="session")
def plain_dataset(tmp_path_factory):
    """3-frame dataset with mild noise and a trained toy model."""
    out = tmp_path_factory.mktemp("plain") / "ds"
    noise = NoiseSpec(dropout_rate=0.02, flying_point_rate=0.003,
                      flying_offset_mm=300, depth_gaussian_sigma_mm=3.0)
    spec = default_scene(seed=11, noise=noise, hs_noise_sigma_counts=2.0)
    generate_dataset(spec, out, frames=3)
    return out


@pytest.fixture(scope="session")
def grid_dataset(tmp_path_factory):
    """Single-frame 5x5 multiview dataset with dropout/flying/jitter noise."""
    out = tmp_path_factory.mktemp("grid") / "ds"
    noise = NoiseSpec(dropout_rate=0.05, flying_point_rate=0.01,
                      flying_offset_mm=300, depth_gaussian_sigma_mm=3.0)
    spec = default_scene(seed=3, noise=noise, grid=True)
    generate_dataset(spec, out, frames=1, train_model=False)
    return out
