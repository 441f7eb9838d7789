import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from ghost.results import write_samples_csv  # noqa: E402
from ghost.scaling import ScalingSample  # noqa: E402


@pytest.fixture
def sample_csv(tmp_path):
    """Factory writing (r, t) pairs as a sweep CSV and returning its path."""

    def write(pairs, name="samples.csv", phase="quadratic", param="identity"):
        path = tmp_path / name
        with open(path, "w", newline="") as handle:
            write_samples_csv(handle, [ScalingSample(r, t) for r, t in pairs], "quadrature", phase, param)
        return path

    return write
