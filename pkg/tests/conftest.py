import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import numpy as np
import pytest

from moscolab.geomkit import build_compact_set


@pytest.fixture
def unit_segment():
    return build_compact_set(
        {"box_radius": 2.0, "cracks": [[[0.0, 0.0], [1.0, 0.0]]], "label": "unit-segment"}
    )


@pytest.fixture
def offset_segment():
    return build_compact_set(
        {"box_radius": 2.0, "cracks": [[[0.0, 1.0], [1.0, 1.0]]], "label": "offset-segment"}
    )


@pytest.fixture
def unit_square_solid():
    return build_compact_set(
        {
            "box_radius": 2.0,
            "solids": [[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]],
            "label": "unit-square",
        }
    )


def centered_crack(angle, length=1.0, box_radius=2.0, label=""):
    h = 0.5 * length
    c, s = np.cos(angle), np.sin(angle)
    return build_compact_set(
        {
            "box_radius": box_radius,
            "cracks": [[[-h * c, -h * s], [h * c, h * s]]],
            "label": label or f"crack-{angle:.3f}",
        }
    )
