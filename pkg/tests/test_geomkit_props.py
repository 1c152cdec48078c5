import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from moscolab.geomkit import build_compact_set, distance_to_set

coord = st.floats(-1.9, 1.9, allow_nan=False, allow_infinity=False)


def scene_for_props():
    return build_compact_set(
        {
            "box_radius": 2.0,
            "cracks": [[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]],
            "solids": [[[-1.5, -1.5], [-0.5, -1.5], [-0.5, -0.5], [-1.5, -0.5]]],
        }
    )


SCENE = scene_for_props()


@given(x1=coord, y1=coord, x2=coord, y2=coord)
@settings(max_examples=200, deadline=None)
def test_distance_is_one_lipschitz(x1, y1, x2, y2):
    d1 = distance_to_set((x1, y1), SCENE)
    d2 = distance_to_set((x2, y2), SCENE)
    gap = np.hypot(x2 - x1, y2 - y1)
    assert abs(d1 - d2) <= gap + 1e-9


@given(x=coord, y=coord)
@settings(max_examples=100, deadline=None)
def test_distance_nonnegative_and_zero_on_set(x, y):
    d = distance_to_set((x, y), SCENE)
    assert d >= 0.0
    if -1.5 <= x <= -0.5 and -1.5 <= y <= -0.5:
        assert d == 0.0
