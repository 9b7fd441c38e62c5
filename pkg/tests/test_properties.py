"""Randomised invariants of the dynamics and the sampling layer."""

import numpy as np
from hypothesis import given, strategies as st

from tcperc import (
    NEVER,
    EdgeSet,
    Environment,
    FamilyKind,
    FamilySpec,
    UniformField,
    distances,
    make,
    open_from_field,
    run,
    run_kd_completion,
    run_slowed,
)
from tcperc.experiments import Instance, run_trials

from conftest import environments, random_env

seeds = st.integers(0, 2**32 - 1)
probs = st.floats(0.0, 1.0)


@given(environments(max_n=30), seeds)
def test_more_open_edges_occupy_more(env, seed):
    rng = np.random.default_rng(seed)
    extra = EdgeSet.from_dense(rng.random((env.n, env.n)) < 0.2) - env.e0
    bigger = Environment(env.e0, env.open | extra)
    assert run(env).final <= run(bigger).final


@given(environments(max_n=30), seeds)
def test_more_initial_edges_occupy_more(env, seed):
    rng = np.random.default_rng(seed)
    promote = EdgeSet.from_dense(rng.random((env.n, env.n)) < 0.3) & env.open
    bigger = Environment(env.e0 | promote, env.open - promote)
    assert run(env).final <= run(bigger).final


@given(st.integers(2, 50), seeds, probs, probs)
def test_coupled_fields_give_nested_final_sets(n, seed, a, b):
    e0 = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, n))
    field = UniformField.generate(n, (seed, 0))
    lo, hi = sorted((a, b))
    small = run(Environment(e0, open_from_field(e0, field, lo))).final
    large = run(Environment(e0, open_from_field(e0, field, hi))).final
    assert small <= large


@given(environments(max_n=25), seeds)
def test_slowed_equals_parallel(env, seed):
    assert run_slowed(env, seed).final == run(env).final


@given(environments(max_n=25))
def test_occupied_edges_follow_initial_paths(env):
    traj = run(env)
    dist = distances(env.e0)
    assert not ((traj.time != NEVER) & (dist < 0)).any()


@given(environments(max_n=25), st.data())
def test_induced_run_is_dominated(env, data):
    vs = data.draw(st.lists(st.integers(0, max(env.n - 1, 0)), unique=True, max_size=env.n))
    sub = run(env.induced(vs)).final
    assert sub <= run(env).final


@given(environments(max_n=25))
def test_final_set_is_transitively_closed_on_open_edges(env):
    final = run(env).final.to_dense().astype(np.int64)
    two = (final @ final) > 0
    assert not (two & env.open.to_dense() & ~final.astype(bool)).any()


@given(st.integers(2, 30), seeds, st.floats(0.0, 0.4), st.floats(0.0, 0.8))
def test_k3_equals_transitive_on_symmetric(n, seed, p0, p_open):
    env = random_env(n, p0, p_open, np.random.default_rng(seed))
    e0 = env.e0.symmetrized()
    env = Environment(e0, env.open.symmetrized() - e0)
    assert run_kd_completion(env, 3).final == run(env).final


@given(st.integers(3, 25), seeds, st.floats(0.2, 0.6), st.floats(0.0, 1.0))
def test_kd_monotone_in_d(n, seed, p0, p_open):
    env = random_env(n, p0, p_open, np.random.default_rng(seed))
    e0 = env.e0.symmetrized()
    env = Environment(e0, env.open.symmetrized() - e0)
    finals = [run_kd_completion(env, d).final for d in (3, 4, 5)]
    assert finals[2] <= finals[1] <= finals[0]
    assert all(f.is_symmetric() for f in finals)


@given(st.integers(0, 10**6), st.integers(0, 50))
def test_trial_outcomes_depend_only_on_key(base_seed, trial):
    inst = Instance.build(FamilySpec(FamilyKind.LINEAR_UNORIENTED, 20))
    batch = run_trials(inst, 0.3, trial + 1, base_seed)
    # trial i alone, computed from an offset batch, matches the full batch
    field = UniformField.generate(20, (base_seed, trial))
    env = Environment(inst.e0, open_from_field(inst.e0, field, 0.3))
    assert batch[trial].occupied_count == int((run(env).time != NEVER).sum())
