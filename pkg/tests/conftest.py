import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tcperc import NEVER, EdgeSet, Environment

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def naive_times(e0: np.ndarray, op: np.ndarray):
    """Round-by-round closure with dense integer matrix products."""
    n = e0.shape[0]
    occ = e0.copy()
    time = np.full((n, n), NEVER, dtype=np.int64)
    time[occ] = 0
    t = 0
    while True:
        a = occ.astype(np.int64)
        new = op & ((a @ a) > 0) & ~occ
        if not new.any():
            return time, t
        t += 1
        time[new] = t
        occ = occ | new


def bool_matrix(n, p, rng):
    m = rng.random((n, n)) < p
    np.fill_diagonal(m, False)
    return m


def random_env(n, p0, p_open, rng) -> Environment:
    e0 = bool_matrix(n, p0, rng)
    op = bool_matrix(n, p_open, rng) & ~e0
    return Environment(EdgeSet.from_dense(e0), EdgeSet.from_dense(op))


@st.composite
def environments(draw, min_n=1, max_n=20):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    p0 = draw(st.floats(0.0, 0.5))
    p_open = draw(st.floats(0.0, 1.0))
    return random_env(n, p0, p_open, np.random.default_rng(seed))


@st.composite
def dense_masks(draw, min_n=0, max_n=140):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    p = draw(st.floats(0.0, 1.0))
    return bool_matrix(n, p, np.random.default_rng(seed))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
