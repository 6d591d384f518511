import numpy as np
import pytest

from ghostsim import MeasurementSeries


def assert_close_rel(actual, expected, rtol, context=""):
    """Elementwise |a-e| <= rtol * max|expected| (scale-relative, not per-pixel
    relative, so pixels crossing zero do not blow up the comparison)."""
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    scale = max(float(np.max(np.abs(expected))), 1e-300)
    worst = float(np.max(np.abs(actual - expected)))
    assert worst <= rtol * scale, f"{context} max|diff|={worst:.3e} exceeds {rtol:.1e} * scale {scale:.3e}"


def synthetic_series(seed, count=50, width=8, height=8):
    """Arbitrary positive-valued series, independent of the simulator."""
    rng = np.random.Generator(np.random.PCG64(seed))
    frames = rng.exponential(scale=1.0, size=(count, height, width))
    s = rng.uniform(10.0, 100.0, size=count)
    return MeasurementSeries(s=s, frames=frames)


@pytest.fixture
def series8(tmp_path):
    return synthetic_series(1234)
