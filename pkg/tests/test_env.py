import numpy as np
import pytest
from hypothesis import given, strategies as st

from tcperc import EdgeSet, FamilyKind, FamilySpec, OpenModel, UniformField, make
from tcperc.env import open_from_field, pair_uniforms, sample_open, uniform_stream


def test_uniform_stream_is_reproducible_and_keyed():
    a = uniform_stream((3, 4), "field", 100)
    assert np.array_equal(a, uniform_stream((3, 4), "field", 100))
    assert not np.array_equal(a, uniform_stream((3, 5), "field", 100))
    assert not np.array_equal(a, uniform_stream((3, 4), "open", 100))
    assert ((a >= 0) & (a < 1)).all()


def test_uniform_stream_prefix_property():
    # later draws never change earlier ones
    assert np.array_equal(uniform_stream(9, "open", 10), uniform_stream(9, "open", 50)[:10])


def test_doubles_are_53_bit():
    u = uniform_stream(1, "open", 1000)
    assert np.array_equal(u * 2.0**53, np.floor(u * 2.0**53))


def test_pair_uniforms_layout():
    n = 5
    u = pair_uniforms(2, "open", n)
    assert (u.diagonal() == 1.0).all()
    flat = uniform_stream(2, "open", n * (n - 1))
    assert u[0, 1] == flat[0] and u[1, 0] == flat[n - 1] and u[n - 1, n - 2] == flat[-1]


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        uniform_stream(-1, "open", 3)


def test_sample_open_extremes():
    e0 = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, 20))
    assert len(sample_open(e0, OpenModel.uniform(0.0, seed=1))) == 0
    full = sample_open(e0, OpenModel.uniform(1.0, seed=1))
    assert full == EdgeSet.complete(20) - e0


def test_left_right_catalan_setting():
    e0 = make(FamilySpec(FamilyKind.LINEAR_ORIENTED, 30))
    op = sample_open(e0, OpenModel.left_right(0.0, 0.5, seed=4))
    assert len(op) > 0
    assert op == op.rightward()


def test_unoriented_model_is_symmetric():
    e0 = make(FamilySpec(FamilyKind.HYPERCUBE, dim=4))
    op = sample_open(e0, OpenModel.uniform(0.3, seed=2, unoriented=True))
    assert op.is_symmetric() and len(op) > 0
    with pytest.raises(ValueError):
        OpenModel(mode="left_right", p_left=0.1, p_right=0.2, unoriented=True)


def test_model_validates_probabilities():
    with pytest.raises(ValueError):
        OpenModel.uniform(1.5)
    with pytest.raises(ValueError):
        OpenModel.left_right(-0.1, 0.5)


def test_open_respects_e0():
    e0 = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, 15))
    op = sample_open(e0, OpenModel.uniform(0.9, seed=3))
    assert op.isdisjoint(e0)


def test_field_threshold_zero_is_empty():
    e0 = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, 10))
    field = UniformField.generate(10, (0, 0))
    assert len(open_from_field(e0, field, 0.0)) == 0
    assert len(open_from_field(e0, field, (0.0, 0.0))) == 0


@given(
    st.integers(2, 60),
    st.integers(0, 1000),
    st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
)
def test_field_threshold_monotonicity(n, seed, a, b, c, d):
    e0 = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, n))
    field = UniformField.generate(n, (seed, 0))
    lo, hi = sorted((a, b))
    assert open_from_field(e0, field, lo) <= open_from_field(e0, field, hi)
    lo2, hi2 = sorted((c, d))
    assert open_from_field(e0, field, (lo, lo2)) <= open_from_field(e0, field, (hi, hi2))


def test_left_right_thresholds_apply_by_direction():
    n = 40
    e0 = EdgeSet.empty(n)
    field = UniformField.generate(n, (5, 1))
    op = open_from_field(e0, field, (0.0, 1.0))
    assert op == EdgeSet.complete(n).rightward()
    op = open_from_field(e0, field, (1.0, 0.0))
    assert op == EdgeSet.complete(n).leftward()


def test_field_and_sampler_are_distinct_streams():
    e0 = EdgeSet.empty(30)
    field = UniformField.generate(30, 8)
    assert open_from_field(e0, field, 0.5) != sample_open(e0, OpenModel.uniform(0.5, seed=8))


def test_field_is_read_only():
    field = UniformField.generate(4, 0)
    with pytest.raises(ValueError):
        field.u[0, 1] = 0.0
