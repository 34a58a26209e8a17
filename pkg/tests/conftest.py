import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

# first calls into numba-compiled kernels pay a JIT cost that trips the
# default hypothesis deadline
settings.register_profile("symrec", deadline=None)
settings.load_profile("symrec")

from symrec.recording import Recording, Stroke

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def sample_json() -> str:
    """A real two-stroke canvas capture (a drawn subset-or-equal sign)."""
    return (DATA_DIR / "sample_two_stroke.json").read_text()


@pytest.fixture(scope="session")
def sample_raw(sample_json):
    return json.loads(sample_json)


def stroke_from_xy(xy, t0=0.0, dt=10.0, **kwargs) -> Stroke:
    """Build a stroke from (x, y) pairs with evenly spaced timestamps."""
    xy = np.asarray(xy, dtype=float)
    times = t0 + dt * np.arange(len(xy))
    return Stroke(np.column_stack([xy, times]), **kwargs)


def rec_from_strokes(*stroke_point_lists, label=None) -> Recording:
    """Build a recording from lists of (x, y, t) triples."""
    return Recording([Stroke(pts) for pts in stroke_point_lists], label=label)


# hypothesis strategy for structurally valid recordings
_coord = st.one_of(
    st.integers(min_value=-1000, max_value=1000),
    st.floats(min_value=-1000, max_value=1000, allow_nan=False, allow_infinity=False),
)


@st.composite
def recordings(draw, max_strokes=4, max_points=12, monotone_time=False):
    n_strokes = draw(st.integers(min_value=1, max_value=max_strokes))
    strokes = []
    t = 0.0
    for _ in range(n_strokes):
        n_points = draw(st.integers(min_value=1, max_value=max_points))
        pts = []
        for _ in range(n_points):
            x = draw(_coord)
            y = draw(_coord)
            if monotone_time:
                t += draw(st.integers(min_value=1, max_value=50))
                pts.append([x, y, t])
            else:
                pts.append([x, y, draw(st.integers(min_value=0, max_value=10**6))])
        strokes.append(Stroke(np.asarray(pts, dtype=float)))
    return Recording(strokes)
