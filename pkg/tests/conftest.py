import numpy as np
import pytest

from chartline.core import LineMask


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_mask(rng, width, height, density=0.3, confidence=1.0) -> LineMask:
    bits = rng.random((height, width)) < density
    return LineMask(width, height, bits, confidence)
