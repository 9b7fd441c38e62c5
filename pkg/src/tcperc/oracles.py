"""Exhaustive small-instance oracles for the structural lemmas.

Everything here is deliberately brute force: witness sets are found by
enumerating vertex subsets, Catalan minimal sets by enumerating open-edge
subsets, and the auxiliary processes are run as separate environments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import _kernels
from .core import NEVER, Environment, Trajectory, distances, run
from .edgeset import EdgeSet

DEFAULT_N_CAP = 16


# -- witness sets -----------------------------------------------------------

def _masks(edges: EdgeSet) -> np.ndarray:
    d = edges.to_dense()
    weights = np.int64(1) << np.arange(edges.n, dtype=np.int64)
    return (d * weights[None, :]).sum(axis=1).astype(np.int64)


def _mask_vertices(mask: int) -> tuple[int, ...]:
    return tuple(v for v in range(mask.bit_length()) if (mask >> v) & 1)


def _check_cap(env: Environment, n_cap: int) -> None:
    if env.n > n_cap:
        raise ValueError(
            f"exhaustive search is capped at n={n_cap}; instance has n={env.n}"
        )


@dataclass(frozen=True)
class WitnessSet:
    target: tuple[int, int]
    vertices: tuple[int, ...]

    @property
    def cardinality(self) -> int:
        return len(self.vertices)


def witness_table(env: Environment, n_cap: int = DEFAULT_N_CAP) -> np.ndarray:
    """Minimal witness vertex mask for every edge (``-1`` if never occupied).

    Ties among minimum-size subsets go to the lexicographically smallest
    sorted vertex tuple.
    """
    _check_cap(env, n_cap)
    return _kernels.witness_masks(_masks(env.e0), _masks(env.open), env.n)


def minimal_witness(
    env: Environment, e: tuple[int, int], n_cap: int = DEFAULT_N_CAP, table=None
) -> WitnessSet:
    """Smallest vertex set whose induced environment occupies ``e``."""
    _check_cap(env, n_cap)
    i, j = e
    if table is None:
        table = witness_table(env, n_cap)
    mask = int(table[i, j])
    if mask < 0:
        raise ValueError(f"edge {e} is never occupied")
    return WitnessSet((i, j), _mask_vertices(mask))


def witness_cardinalities(table: np.ndarray) -> np.ndarray:
    """Sizes of the witness masks in ``table``; 0 for unoccupied edges."""
    t = table.astype(np.uint64)
    out = np.bitwise_count(t).astype(np.int64)
    out[table < 0] = 0
    return out


@dataclass
class ALReport:
    longest: int
    missing_scales: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.missing_scales


def check_al_property(env: Environment, n_cap: int = DEFAULT_N_CAP, table=None) -> ALReport:
    """Every scale ``k`` up to the longest occupied length has a witness size in ``[k+1, 2k]``."""
    _check_cap(env, n_cap)
    if table is None:
        table = witness_table(env, n_cap)
    occupied = table >= 0
    if not occupied.any():
        return ALReport(0)
    dist = distances(env.e0)
    longest = int(dist[occupied].max())
    sizes = np.unique(witness_cardinalities(table)[occupied])
    missing = [
        k for k in range(1, longest + 1)
        if not ((sizes >= k + 1) & (sizes <= 2 * k)).any()
    ]
    return ALReport(longest, missing)


def has_horn(env: Environment, K: Iterable[int], v: int) -> bool:
    """Whether ``v`` is part of a horn inside ``K`` (vectorised :func:`horns_of`)."""
    K = np.array(sorted(set(int(k) for k in K) - {v}), dtype=np.intp)
    if K.size < 2:
        return False
    e0 = env.e0.to_dense()
    op = env.open.to_dense()
    either = (e0 | op)[np.ix_(K, K)]
    op_kk = op[np.ix_(K, K)]
    through = e0[K, v][:, None] & e0[v, K][None, :] & op_kk
    out = e0[v, K][:, None] & either & op[v, K][None, :]
    into = e0[K, v][:, None] & either.T & op[K, v][None, :]
    return bool(through.any() or out.any() or into.any())


def connected_necessary_violations(env: Environment, traj: Trajectory) -> list[tuple[int, int]]:
    """Occupied edges without an oriented ``e0`` path (should be empty)."""
    dist = distances(env.e0)
    bad = (traj.time != NEVER) & (dist < 0)
    np.fill_diagonal(bad, False)
    return [tuple(map(int, e)) for e in np.argwhere(bad)]


def edge_length_lower_bound_violations(env: Environment, n_cap: int = DEFAULT_N_CAP, table=None):
    """Occupied edges whose witness has at most ``edge_length`` vertices (should be empty)."""
    if table is None:
        table = witness_table(env, n_cap)
    dist = distances(env.e0)
    sizes = witness_cardinalities(table)
    occupied = table >= 0
    bad = occupied & (sizes < dist + 1)
    return [tuple(map(int, e)) for e in np.argwhere(bad)]


def ie_lemma_violations(env: Environment, n_cap: int = DEFAULT_N_CAP, table=None):
    """``(edge, vertex)`` pairs where a witness vertex has no horn in its witness set."""
    if table is None:
        table = witness_table(env, n_cap)
    e0 = env.e0.to_dense()
    bad = []
    for i, j in np.argwhere(table >= 0):
        if e0[i, j]:
            continue
        members = _mask_vertices(int(table[i, j]))
        for v in members:
            if not has_horn(env, members, v):
                bad.append(((int(i), int(j)), v))
    return bad


# -- Catalan percolation ----------------------------------------------------

def catalan(k: int) -> int:
    """Standard Catalan number ``C_k`` (``C_0 = C_1 = 1``)."""
    return math.comb(2 * k, k) // (k + 1)


def chain(n: int) -> EdgeSet:
    return EdgeSet.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def catalan_environment(n: int, open_r: EdgeSet | None = None) -> Environment:
    """Oriented chain ``0 -> 1 -> ... -> n-1``; by default every longer rightward edge is open."""
    e0 = chain(n)
    if open_r is None:
        open_r = EdgeSet.from_dense(np.triu(np.ones((n, n), dtype=bool), 2))
    return Environment(e0, open_r - e0)


def is_catalan(env: Environment) -> bool:
    op = env.open.to_dense()
    return env.e0 == chain(env.n) and not np.tril(op).any()


@dataclass(frozen=True)
class CatalanCount:
    ell: int
    count: int
    sizes: dict
    method: str

    @property
    def all_sizes_ell_minus_one(self) -> bool:
        return set(self.sizes) == {self.ell - 1}


def minimal_sets_exhaustive(ell: int) -> set[frozenset]:
    """Inclusion-minimal open sets occupying ``0 -> ell``, by subset enumeration."""
    n = ell + 1
    env = catalan_environment(n)
    edges = sorted(env.open.edges())
    if len(edges) > 21:
        raise ValueError(f"subset enumeration over {len(edges)} edges is too large")
    ei = np.array([e[0] for e in edges], dtype=np.int64)
    ej = np.array([e[1] for e in edges], dtype=np.int64)
    masks = _kernels.minimal_open_subsets(_masks(env.e0), ei, ej, 0, ell, n)
    return {
        frozenset(edges[k] for k in range(len(edges)) if (int(a) >> k) & 1)
        for a in masks
    }


def bracketings(ell: int) -> set[frozenset]:
    """Open-edge sets of all derivation trees of ``0 -> ell``.

    Each tree splits ``i -> j`` at some ``i < k < j`` into ``i -> k`` and
    ``k -> j`` down to the unit edges; its open edges are the internal nodes.
    """

    @lru_cache(maxsize=None)
    def trees(i: int, j: int) -> tuple[frozenset, ...]:
        if j == i + 1:
            return (frozenset(),)
        out = []
        for k in range(i + 1, j):
            for left in trees(i, k):
                for right in trees(k, j):
                    out.append(left | right | {(i, j)})
        return tuple(out)

    return set(trees(0, ell))


def catalan_minimal_sets(ell: int, method: str | None = None) -> CatalanCount:
    """Count the minimal open sets for an edge of length ``ell`` in Catalan percolation.

    ``method`` is ``"exhaustive"`` (subset enumeration, ``ell <= 7``) or
    ``"bracketing"`` (derivation-tree DFS); the default picks exhaustive up
    to ``ell = 6``.
    """
    if not 1 <= ell <= 10:
        raise ValueError(f"ell must be in [1, 10], got {ell}")
    if method is None:
        method = "exhaustive" if ell <= 6 else "bracketing"
    if method == "exhaustive":
        sets = minimal_sets_exhaustive(ell)
    elif method == "bracketing":
        sets = bracketings(ell)
    else:
        raise ValueError(f"unknown method {method!r}")
    sizes: dict[int, int] = {}
    for s in sets:
        sizes[len(s)] = sizes.get(len(s), 0) + 1
    return CatalanCount(ell, len(sets), dict(sorted(sizes.items())), method)


def site_reachability(env: Environment) -> np.ndarray:
    """Sites ``(i, j)``, ``i < j``, joined to the chain by an oriented site path."""
    if not is_catalan(env):
        raise ValueError("oriented site paths are defined for Catalan environments")
    n = env.n
    ok = env.e0.to_dense() | env.open.to_dense()
    reach = np.zeros((n, n), dtype=bool)
    idx = np.arange(n - 1)
    reach[idx, idx + 1] = ok[idx, idx + 1]
    for length in range(2, n):
        i = np.arange(n - length)
        j = i + length
        reach[i, j] = ok[i, j] & (reach[i, j - 1] | reach[i + 1, j])
    return reach


def oriented_site_path(env: Environment, e: tuple[int, int]) -> bool:
    i, j = e
    if not 0 <= i < j < env.n:
        return False
    return bool(site_reachability(env)[i, j])


# -- the rightward-only (tilde) process -------------------------------------

def _check_tilde_open(open_r: EdgeSet) -> None:
    d = open_r.to_dense()
    if np.tril(d).any():
        raise ValueError("tilde process opens only rightward edges")


def run_tilde(n: int, open_r: EdgeSet) -> Trajectory:
    """Rightward process started from the chain, with middle, overshoot and undershoot rules."""
    if open_r.n != n:
        raise ValueError(f"open set has n={open_r.n}, expected {n}")
    _check_tilde_open(open_r)
    open_r = open_r - chain(n)
    time, t_max = _kernels.tilde_times(open_r.bits, n)
    return Trajectory(n, time, int(t_max))


def tilde_as_environment(n: int, open_r: EdgeSet) -> Environment:
    """The equivalent ordinary environment: chain plus every leftward edge initially occupied."""
    lower = EdgeSet.from_dense(np.tril(np.ones((n, n), dtype=bool), -1))
    e0 = chain(n) | lower
    return Environment(e0, open_r - e0)


def is_good_interval(open_r: EdgeSet, interval: tuple[int, int]) -> bool:
    """Whether ``[a, b]`` is good for the rightward edges ``open_r`` plus the chain.

    Every adjacent pair ``{i, i+1}`` needs some ``j`` in the interval with
    ``j -> i`` and ``j -> i+1`` (``j < i``) or ``i -> j`` and ``i+1 -> j``
    (``j > i + 1``).
    """
    a, b = interval
    if b - a < 1:
        raise ValueError("interval needs at least two vertices")
    if b - a == 1:
        return True
    edges = (open_r | chain(open_r.n)).to_dense()
    for i in range(a, b):
        covered = any(edges[j, i] and edges[j, i + 1] for j in range(a, i)) or any(
            edges[i, j] and edges[i + 1, j] for j in range(i + 2, b + 1)
        )
        if not covered:
            return False
    return True


def minimal_tilde_intervals(n: int, open_r: EdgeSet) -> dict[tuple[int, int], tuple[int, int]]:
    """Shortest interval (leftmost on ties) whose induced tilde process occupies each edge."""
    _check_tilde_open(open_r)
    dense = open_r.to_dense()
    best: dict[tuple[int, int], tuple[int, int]] = {}
    for size in range(2, n + 1):
        for a in range(0, n - size + 1):
            b = a + size - 1
            sub = EdgeSet.from_dense(dense[a : b + 1, a : b + 1])
            traj = run_tilde(size, sub)
            for i, j in np.argwhere(traj.time != NEVER):
                key = (int(i) + a, int(j) + a)
                if key not in best:
                    best[key] = (a, b)
    return best


def ie_good_violations(n: int, open_r: EdgeSet) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    return [
        (e, iv)
        for e, iv in minimal_tilde_intervals(n, open_r).items()
        if not is_good_interval(open_r, iv)
    ]


# -- hat and bar processes --------------------------------------------------

@dataclass(frozen=True)
class HatBar:
    hat_e0_left: EdgeSet
    hat_open_r: EdgeSet
    hat_env: Environment
    bar_env: Environment


def _is_unoriented_chain(e0: EdgeSet) -> bool:
    return e0 == chain(e0.n).symmetrized()


def _close_downward(left: np.ndarray) -> np.ndarray:
    """All leftward ``b -> a`` nested inside some leftward ``j -> i`` of ``left``."""
    # outer[i, j] = left contains j -> i, for i < j
    outer = np.triu(left.T, 1).astype(np.int8)
    # any outer edge with i' <= a and j' >= b
    acc = np.maximum.accumulate(outer, axis=0)
    acc = np.maximum.accumulate(acc[:, ::-1], axis=1)[:, ::-1]
    nested = np.triu(acc.astype(bool), 1)
    return nested.T


def _augment_open(open_right: np.ndarray, hat_left: np.ndarray) -> np.ndarray:
    """Close the rightward open set under trading across ``hat_left``.

    ``i -> j`` open brings in ``w -> j`` when ``i <- w`` is in ``hat_left`` and
    ``i -> w`` when ``w <- j`` is, for ``i < w < j``.  Newly added edges are
    processed as well, until nothing changes.
    """
    opened = open_right.copy()
    stack = [tuple(e) for e in np.argwhere(opened)]
    while stack:
        i, j = stack.pop()
        ws = np.arange(i + 1, j)
        # hat_left[w, i] means i <- w
        for w in ws[hat_left[ws, i] & ~opened[ws, j]]:
            opened[w, j] = True
            stack.append((w, j))
        for w in ws[hat_left[j, ws] & ~opened[i, ws]]:
            opened[i, w] = True
            stack.append((i, w))
    return opened


def build_hat_bar(env: Environment) -> HatBar:
    """Construct the dominating hat process and its leftward-free bar twin."""
    n = env.n
    if not _is_unoriented_chain(env.e0):
        raise ValueError("hat/bar construction needs the unoriented chain as e0")
    e0_r = env.e0.rightward()
    open_left = env.open.leftward()
    open_right = env.open.rightward()

    all_right = EdgeSet.from_dense(np.triu(np.ones((n, n), dtype=bool), 1))
    boosted = run(Environment(env.e0 | all_right, open_left))
    left_final = boosted.final.leftward().to_dense()
    hat_left = _close_downward(left_final)

    hat_open_r = EdgeSet.from_dense(_augment_open(open_right.to_dense(), hat_left)) - e0_r
    hat_e0_left = EdgeSet.from_dense(hat_left)
    hat_env = Environment(hat_e0_left | e0_r, hat_open_r)
    bar_env = Environment(e0_r, hat_open_r)
    return HatBar(hat_e0_left, hat_open_r, hat_env, bar_env)


@dataclass
class TradingReport:
    rounds_equal: bool
    first_failing_round: int | None
    hat_dominates: bool
    left_contained: bool
    rounds: int

    @property
    def ok(self) -> bool:
        return self.rounds_equal and self.hat_dominates and self.left_contained


def verify_trading(env: Environment, hatbar: HatBar | None = None) -> TradingReport:
    """Run hat and bar processes side by side and compare them round by round."""
    hb = build_hat_bar(env) if hatbar is None else hatbar
    hat = run(hb.hat_env)
    bar = run(hb.bar_env)
    outside = ~hb.hat_e0_left.to_dense()
    mismatch = outside & (hat.time != bar.time)
    first = None
    if mismatch.any():
        first = int(np.minimum(hat.time, bar.time)[mismatch].min())
    final = run(env).final
    return TradingReport(
        rounds_equal=first is None,
        first_failing_round=first,
        hat_dominates=final <= hat.final,
        left_contained=final.leftward() <= hb.hat_e0_left,
        rounds=max(hat.t_max, bar.t_max),
    )
