import numpy as np
import pytest

from tcperc import EdgeSet, FamilyKind, FamilySpec, make, run
from tcperc.families import load_edge_list, max_degree, validate_r_unoriented, weakly_connected


def test_linear_unoriented_edges():
    e = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, 4))
    assert sorted(e.edges()) == [(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2)]


def test_linear_oriented_edges():
    e = make(FamilySpec(FamilyKind.LINEAR_ORIENTED, 4))
    assert sorted(e.edges()) == [(0, 1), (1, 2), (2, 3)]


def test_hamming_degrees():
    e = make(FamilySpec(FamilyKind.HAMMING, 3, d=2))
    assert e.n == 9
    assert (e.to_dense().sum(axis=1) == 4).all()
    assert e.is_symmetric()


def test_hypercube():
    e = make(FamilySpec(FamilyKind.HYPERCUBE, dim=5))
    assert e.n == 32 and max_degree(e) == 5
    # neighbours differ in one bit
    for i, j in e.edges():
        assert bin(i ^ j).count("1") == 1


def test_chain_left_range():
    e = make(FamilySpec(FamilyKind.CHAIN_LEFT_RANGE, 13, r=4))
    assert sorted(e.leftward().edges()) == [(4, 0), (8, 4), (12, 8)]
    assert sorted(e.rightward().edges()) == [(i, i + 1) for i in range(12)]
    with pytest.raises(ValueError):
        make(FamilySpec(FamilyKind.CHAIN_LEFT_RANGE, 13, r=5))


def test_r_pairs_structure():
    e = make(FamilySpec(FamilyKind.R_PAIRS, 10))
    assert max_degree(e) == 3
    pairs = np.arange(10) // 2
    assert validate_r_unoriented(e, pairs, 2)
    with pytest.raises(ValueError):
        make(FamilySpec(FamilyKind.R_PAIRS, 9))


def test_r_unoriented_examples():
    lin = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, 8))
    assert validate_r_unoriented(lin, np.arange(8), 1)
    ori = make(FamilySpec(FamilyKind.LINEAR_ORIENTED, 8))
    report = validate_r_unoriented(ori, np.arange(8), 1)
    assert not report and "tree" in report.reason


def test_r_unoriented_block_checks():
    e = make(FamilySpec(FamilyKind.R_PAIRS, 10))
    assert not validate_r_unoriented(e, np.arange(10) // 2, 1)
    # a block that is not strongly connected
    phi = np.array([0, 1, 0, 1, 2, 2, 3, 3, 4, 4])
    assert not validate_r_unoriented(e, phi, 2)
    assert not validate_r_unoriented(e, np.zeros(3), 2)


def test_max_degree_linear():
    for n in (3, 10, 50):
        assert max_degree(make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, n))) == 2
    assert max_degree(make(FamilySpec(FamilyKind.R_PAIRS, 10)), directed=True) == 2


def test_er_initial_reproducible_and_symmetric():
    spec = FamilySpec(FamilyKind.ER_INITIAL, 50, p_initial=0.2, seed=3)
    a, b = make(spec), make(spec)
    assert a == b and a.is_symmetric()
    assert a != make(FamilySpec(FamilyKind.ER_INITIAL, 50, p_initial=0.2, seed=4))
    assert 0.1 < len(a) / (50 * 49) < 0.3


def test_kd_band():
    e = make(FamilySpec(FamilyKind.KD_BAND, 6, d=4))
    assert sorted(e.edges()) == sorted(
        (i, j) for i in range(6) for j in range(6) if 0 < abs(i - j) <= 2
    )


def test_no_self_loops_anywhere():
    specs = [
        FamilySpec(k, 12, d=3, dim=3, p_initial=0.5, r=1)
        for k in FamilyKind
    ]
    for s in specs:
        e = make(s)
        assert not e.to_dense().diagonal().any()


def test_weak_connectivity():
    assert weakly_connected(make(FamilySpec(FamilyKind.LINEAR_ORIENTED, 10)))
    assert not weakly_connected(EdgeSet.from_edges(3, [(0, 1)]))


def test_full_open_saturates_connected_unoriented():
    e0 = make(FamilySpec(FamilyKind.HAMMING, 3, d=2))
    from tcperc import Environment

    env = Environment(e0, EdgeSet.complete(9) - e0)
    assert run(env).final == EdgeSet.complete(9)


def test_family_kind_from_string():
    assert FamilySpec("linear-oriented", 5).kind is FamilyKind.LINEAR_ORIENTED
    assert FamilySpec("hamming", 3, d=3).vertex_count == 27
    assert FamilySpec("hypercube", dim=4).vertex_count == 16


def test_load_edge_list(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# a triangle\n0 1\n1 2  # trailing\n\n2 0\n")
    e = load_edge_list(p)
    assert e.n == 3 and len(e) == 3
    assert load_edge_list(p, n=5).n == 5
