import math

import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from signed_dynamics import Schedule

T0 = math.log(3.0)

EXAMPLE1 = np.array([[0, -1, 0], [-1, 0, 0], [1, 1, 0]], dtype=float)
ANTAGONISTIC = np.array([[0, -1], [-1, 0]], dtype=float)
CHAIN = np.array([[0, -1, 0], [-1, 0, 1], [0, 1, 0]], dtype=float)
NEG_CYCLE = np.array([[0, 1, 0], [0, 0, 1], [-1, 0, 0]], dtype=float)
POS_CYCLE = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)


def block_diag2() -> np.ndarray:
    """Two disconnected positive digons, nodes {0,1} and {2,3}."""
    a = np.zeros((4, 4))
    a[0, 1] = a[1, 0] = 1.0
    a[2, 3] = a[3, 2] = 2.0
    return a


def example2_schedule() -> Schedule:
    a1 = [[0, -1, 0], [-1, 0, 0], [1, 0, 0]]
    a2 = [[0, -1, 0], [-1, 0, 0], [0, 1, 0]]
    return Schedule.periodic([a1, a2], [T0, T0])


@pytest.fixture
def example2():
    return example2_schedule()


def _zero_diag(a):
    a = np.array(a, dtype=float)
    np.fill_diagonal(a, 0.0)
    return a


def _digon_fix(a):
    """Zero one side of every digon whose signs disagree."""
    bad = a * a.T < 0
    return np.where(np.triu(bad), 0.0, a)


@st.composite
def signed_matrices(draw, min_n=2, max_n=6, values=None, max_abs=10.0, digon=False):
    n = draw(st.integers(min_n, max_n))
    if values is None:
        elems = st.one_of(st.just(0.0), st.floats(-max_abs, max_abs, allow_nan=False, width=32))
    else:
        elems = st.sampled_from(values)
    a = _zero_diag(draw(arrays(np.float64, (n, n), elements=elems)))
    return _digon_fix(a) if digon else a


@st.composite
def schedules(draw, min_n=2, max_n=5, max_segments=3, values=(-2.0, -1.0, -0.5, 0.0, 0.0, 0.5, 1.0, 2.0)):
    n = draw(st.integers(min_n, max_n))
    k = draw(st.integers(1, max_segments))
    mats = [
        _zero_diag(draw(arrays(np.float64, (n, n), elements=st.sampled_from(values)))) for _ in range(k)
    ]
    durs = draw(st.lists(st.sampled_from([0.25, 0.5, 1.0, 1.5]), min_size=k, max_size=k))
    if draw(st.booleans()):
        return Schedule.periodic(mats, durs)
    t, segs = 0.0, []
    for m, d in zip(mats, durs):
        segs.append((t, t + d, m))
        t += d
    return Schedule(segs)


def states(n, bound=2.0):
    return arrays(np.float64, (n,), elements=st.floats(-bound, bound, allow_nan=False, width=32))
