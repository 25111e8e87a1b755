import numpy as np
import pytest

from stablegap import RngStream


@pytest.fixture
def stream():
    return RngStream(20240816)


@pytest.fixture
def gen(stream):
    return stream.generator()


def z_score(samples: np.ndarray, target: float) -> float:
    """Distance of the sample mean from the target in standard-error units."""
    samples = np.asarray(samples, dtype=float)
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    return float(abs(samples.mean() - target) / se)
