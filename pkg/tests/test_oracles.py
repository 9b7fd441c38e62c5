from itertools import combinations
from math import comb

import numpy as np
import pytest

from tcperc import NEVER, EdgeSet, Environment, FamilyKind, FamilySpec, OpenModel, make, run
from tcperc.env import sample_open
from tcperc.oracles import (
    bracketings,
    build_hat_bar,
    catalan,
    catalan_environment,
    catalan_minimal_sets,
    chain,
    check_al_property,
    connected_necessary_violations,
    edge_length_lower_bound_violations,
    has_horn,
    ie_good_violations,
    ie_lemma_violations,
    is_catalan,
    is_good_interval,
    minimal_sets_exhaustive,
    minimal_tilde_intervals,
    minimal_witness,
    oriented_site_path,
    run_tilde,
    site_reachability,
    tilde_as_environment,
    verify_trading,
    witness_table,
)
from tcperc.core import distances, horns_of

from conftest import naive_times


def linear_env(n, p_left, p_right, seed):
    e0 = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, n))
    return Environment(e0, sample_open(e0, OpenModel.left_right(p_left, p_right, seed=seed)))


def brute_witness(env, e):
    """Smallest vertex set (lexicographically first) whose induced run occupies e."""
    n = env.n
    i, j = e
    others = [v for v in range(n) if v not in (i, j)]
    e0, op = env.e0.to_dense(), env.open.to_dense()
    for size in range(0, n - 1):
        hits = []
        for extra in combinations(others, size):
            vs = sorted((i, j) + extra)
            idx = np.ix_(vs, vs)
            t, _ = naive_times(e0[idx], op[idx])
            if t[vs.index(i), vs.index(j)] != NEVER:
                hits.append(tuple(vs))
        if hits:
            return min(hits)
    return None


# -- witnesses --------------------------------------------------------------

def test_witness_of_initial_edge():
    env = linear_env(6, 0.3, 0.3, 1)
    w = minimal_witness(env, (2, 3))
    assert w.vertices == (2, 3) and w.cardinality == 2


def test_witness_catalan_three():
    env = catalan_environment(3)
    assert minimal_witness(env, (0, 2)).vertices == (0, 1, 2)


def test_witness_matches_brute_force():
    for s in range(12):
        rng = np.random.default_rng(s)
        n = int(rng.integers(3, 8))
        env = linear_env(n, *rng.uniform(0.1, 0.7, 2), seed=s)
        table = witness_table(env)
        final = run(env).time != NEVER
        assert np.array_equal(table >= 0, final)
        for i, j in np.argwhere(final):
            assert minimal_witness(env, (i, j), table=table).vertices == brute_witness(env, (i, j))


def test_witness_rejects_unoccupied_and_large():
    env = catalan_environment(4, EdgeSet.empty(4))
    with pytest.raises(ValueError):
        minimal_witness(env, (0, 3))
    with pytest.raises(ValueError):
        witness_table(linear_env(20, 0.1, 0.1, 0), n_cap=16)


def test_witness_size_exceeds_length_on_linear():
    for s in range(50):
        rng = np.random.default_rng(100 + s)
        env = linear_env(int(rng.integers(4, 13)), *rng.uniform(0.05, 0.6, 2), seed=s)
        assert edge_length_lower_bound_violations(env) == []


# -- structural lemmas -------------------------------------------------------

def test_connected_necessary_on_disconnected_graph():
    e0 = EdgeSet.from_edges(4, [(0, 1), (2, 3)])
    env = Environment(e0, EdgeSet.complete(4) - e0)
    traj = run(env)
    assert connected_necessary_violations(env, traj) == []
    assert traj.final == e0


def test_ie_lemma_small_instances():
    for s in range(20):
        rng = np.random.default_rng(200 + s)
        env = linear_env(int(rng.integers(4, 11)), *rng.uniform(0.1, 0.6, 2), seed=s)
        assert ie_lemma_violations(env) == []


def test_has_horn_agrees_with_horns_of():
    for s in range(10):
        env = linear_env(7, 0.4, 0.4, s)
        K = list(range(7))
        for v in K:
            assert has_horn(env, K, v) == bool(horns_of(env, K, v))


def test_al_vacuous_and_catalan():
    empty = catalan_environment(5, EdgeSet.empty(5))
    assert check_al_property(empty).ok
    full = catalan_environment(6)
    report = check_al_property(full)
    assert report.longest == 5 and report.ok


def test_al_random_linear():
    for s in range(50):
        rng = np.random.default_rng(300 + s)
        env = linear_env(12, *rng.uniform(0.05, 0.6, 2), seed=s)
        assert check_al_property(env).ok


# -- Catalan --------------------------------------------------------------------

def test_catalan_numbers():
    assert [catalan(k) for k in range(8)] == [comb(2 * k, k) // (k + 1) for k in range(8)]


@pytest.mark.parametrize("ell,count", [(1, 1), (2, 1), (3, 2), (4, 5), (5, 14), (6, 42)])
def test_minimal_set_counts(ell, count):
    c = catalan_minimal_sets(ell)
    assert c.count == count
    assert c.all_sizes_ell_minus_one or ell == 1
    assert minimal_sets_exhaustive(ell) == bracketings(ell)


def test_minimal_sets_are_minimal_and_sufficient():
    n = 5
    for A in minimal_sets_exhaustive(4):
        env = catalan_environment(n, EdgeSet.from_edges(n, A))
        assert run(env).time[0, 4] != NEVER
        for e in A:
            smaller = catalan_environment(n, EdgeSet.from_edges(n, set(A) - {e}))
            assert run(smaller).time[0, 4] == NEVER


def test_bracketing_counts_beyond_exhaustive():
    for ell in range(7, 11):
        assert catalan_minimal_sets(ell).count == catalan(ell - 1)
    with pytest.raises(ValueError):
        catalan_minimal_sets(11)


def test_catalan_environment_shape():
    env = catalan_environment(6)
    assert is_catalan(env)
    assert env.open == EdgeSet.complete(6).rightward() - chain(6)
    assert not is_catalan(linear_env(6, 0.5, 0.5, 0))


def test_site_path_examples():
    env = catalan_environment(4, EdgeSet.from_edges(4, [(0, 2), (0, 3)]))
    assert oriented_site_path(env, (0, 1))
    assert oriented_site_path(env, (0, 3))
    assert run(env).time[0, 3] != NEVER


def test_site_path_implies_occupied():
    for s in range(100):
        rng = np.random.default_rng(400 + s)
        n = int(rng.integers(3, 101))
        opr = sample_open(chain(n), OpenModel.left_right(0.0, rng.uniform(0.2, 0.9), seed=s))
        env = catalan_environment(n, opr)
        reach = site_reachability(env)
        assert not (reach & (run(env).time == NEVER)).any()


# -- tilde process ------------------------------------------------------------

def test_tilde_empty_is_chain():
    assert run_tilde(5, EdgeSet.empty(5)).final == chain(5)


def test_tilde_middle_rule():
    traj = run_tilde(4, EdgeSet.from_edges(4, [(0, 2)]))
    assert traj.time[0, 2] == 1


def test_tilde_example_five():
    opr = EdgeSet.from_edges(5, [(0, 4), (1, 3)])
    traj = run_tilde(5, opr)
    assert traj.time[1, 3] == 1
    cat = run(catalan_environment(5, opr)).final
    assert cat <= traj.final


def test_tilde_dominates_catalan_and_matches_environment():
    for s in range(100):
        rng = np.random.default_rng(500 + s)
        n = int(rng.integers(3, 40))
        opr = sample_open(chain(n), OpenModel.left_right(0.0, rng.uniform(0.1, 0.8), seed=s))
        til = run_tilde(n, opr)
        assert run(catalan_environment(n, opr)).final <= til.final
        assert run(tilde_as_environment(n, opr)).final.rightward() == til.final


def test_tilde_rejects_leftward():
    with pytest.raises(ValueError):
        run_tilde(3, EdgeSet.from_edges(3, [(2, 0)]))


def test_good_interval_examples():
    opr = EdgeSet.from_edges(4, [(0, 2)])
    assert is_good_interval(opr, (1, 2))
    assert is_good_interval(opr, (0, 2))
    assert not is_good_interval(EdgeSet.empty(4), (0, 2))


def test_minimal_intervals_are_good():
    for s in range(30):
        rng = np.random.default_rng(600 + s)
        n = int(rng.integers(3, 13))
        opr = sample_open(chain(n), OpenModel.left_right(0.0, rng.uniform(0.1, 0.8), seed=s))
        iv = minimal_tilde_intervals(n, opr)
        assert set(iv) == set(run_tilde(n, opr).final.edges())
        assert ie_good_violations(n, opr) == []


# -- hat and bar ----------------------------------------------------------------

def test_hat_without_left_opens():
    e0 = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, 4))
    env = Environment(e0, EdgeSet.from_edges(4, [(0, 3)]))
    hb = build_hat_bar(env)
    assert hb.hat_e0_left == chain(4).transpose()
    # 1 -> 0 and 3 -> 2 are in the hat's leftward set, so 0 -> 3 brings in 1 -> 3 and 0 -> 2
    assert sorted(hb.hat_open_r.edges()) == [(0, 2), (0, 3), (1, 3)]


def test_hat_open_contains_right_opens():
    for s in range(20):
        env = linear_env(15, 0.0, 0.4, s)
        hb = build_hat_bar(env)
        assert env.open.rightward() <= hb.hat_open_r
        assert hb.hat_e0_left == chain(15).transpose()


def test_hat_left_independent_of_right_opens():
    base = linear_env(20, 0.3, 0.0, 5)
    other = linear_env(20, 0.3, 0.6, 5)
    assert base.open.leftward() == other.open.leftward()
    assert build_hat_bar(base).hat_e0_left == build_hat_bar(other).hat_e0_left


def test_trading_trivial():
    env = linear_env(8, 0.0, 0.0, 0)
    report = verify_trading(env)
    assert report.ok and report.rounds == 0


def test_trading_base_case():
    env = linear_env(15, 0.3, 0.3, 1)
    hb = build_hat_bar(env)
    assert hb.bar_env.e0 == hb.hat_env.e0 - hb.hat_e0_left


def test_trading_random():
    for s in range(100):
        rng = np.random.default_rng(700 + s)
        env = linear_env(int(rng.integers(4, 61)), *rng.uniform(0.1, 0.5, 2), seed=s)
        hb = build_hat_bar(env)
        report = verify_trading(env, hb)
        assert report.ok, (s, report)
        times = run(env).time
        left = np.tril(times != NEVER, -1)
        assert not (left & ~hb.hat_e0_left.to_dense()).any()


def test_trading_needs_unoriented_chain():
    e0 = make(FamilySpec(FamilyKind.LINEAR_ORIENTED, 5))
    with pytest.raises(ValueError):
        build_hat_bar(Environment(e0, EdgeSet.empty(5)))


def test_distances_on_catalan_chain():
    d = distances(chain(6))
    assert d[0, 5] == 5 and d[5, 0] == -1
