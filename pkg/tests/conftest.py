import numpy as np
import pytest

from shtlab.space import QuasiMetricSpace, build_space


@pytest.fixture
def line4() -> QuasiMetricSpace:
    return build_space({"type": "grid", "shape": [4], "metric": "l1", "mass": "uniform"})


@pytest.fixture
def two_point() -> QuasiMetricSpace:
    return build_space({"type": "explicit", "dist": [[0, 1], [1, 0]], "mass": [1, 1]})


@pytest.fixture
def one_point() -> QuasiMetricSpace:
    return QuasiMetricSpace(np.zeros((1, 1)), np.ones(1))


def random_cloud(rng: np.random.Generator, n: int, dim: int = 1, masses: str = "random"):
    """Random metric point cloud (kappa = 1) used across property tests."""
    pts = rng.uniform(0.0, 10.0, size=(n, dim))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.abs(diff).sum(axis=2) if dim == 1 else np.linalg.norm(diff, axis=2)
    np.fill_diagonal(dist, 0.0)
    mass = np.ones(n) if masses == "uniform" else 10.0 ** rng.uniform(-1.5, 1.5, n)
    return QuasiMetricSpace(dist, mass)
