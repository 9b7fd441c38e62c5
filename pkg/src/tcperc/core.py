"""Environments, the transitive-closure dynamics and basic predicates.

An :class:`Environment` fixes the initially occupied edges ``e0`` and the open
edges; every other off-diagonal edge is closed.  :func:`run` iterates the
parallel update

    occupied' = occupied | {i->j open : i->k and k->j occupied for some k}

to its fixpoint and records the round at which each edge first appears.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from . import _kernels
from .edgeset import EdgeSet

NEVER = int(_kernels.NEVER)
"""Occupation time of edges that are never occupied; larger than any round."""

UNREACHABLE = -1
"""Edge length of a pair with no oriented path in the initial graph."""


@dataclass(frozen=True)
class Environment:
    """One percolation instance: initially occupied and open edges."""

    e0: EdgeSet
    open: EdgeSet

    def __post_init__(self):
        if self.e0.n != self.open.n:
            raise ValueError(
                f"e0 has n={self.e0.n} but open has n={self.open.n}"
            )
        if not self.e0.isdisjoint(self.open):
            raise ValueError("open edges must be disjoint from e0")

    @property
    def n(self) -> int:
        return self.e0.n

    @property
    def closed(self) -> EdgeSet:
        return EdgeSet.complete(self.n) - self.e0 - self.open

    def induced(self, vertices) -> "Environment":
        """Environment restricted to edges inside ``vertices``."""
        return Environment(self.e0.induced(vertices), self.open.induced(vertices))


@dataclass(frozen=True)
class Trajectory:
    """Per-edge occupation times of one dynamics run.

    ``time[i, j]`` is 0 for initial edges, the round (or tick) of occupation for
    open edges that become occupied, and :data:`NEVER` otherwise.
    """

    n: int
    time: np.ndarray
    t_max: int

    def __post_init__(self):
        self.time.setflags(write=False)

    def occupied(self, t: int | None = None) -> EdgeSet:
        """Edges occupied by time ``t`` (the final set when ``t`` is None)."""
        if t is None:
            return EdgeSet.from_dense(self.time != NEVER)
        return EdgeSet.from_dense(self.time <= t)

    @property
    def final(self) -> EdgeSet:
        return self.occupied()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.time, other.time)

    __hash__ = None


class HornVariant(enum.Enum):
    THROUGH = "through"  # x->v->y initial, x->y open
    OUT = "out"  # v->x initial, x->y initial or open, v->y open
    IN = "in"  # x->v initial, y->x initial or open, y->v open


@dataclass(frozen=True)
class Horn:
    v: int
    x: int
    y: int
    variant: HornVariant

    @property
    def tip(self) -> int:
        return self.y


class LongestLengths(NamedTuple):
    right: int
    left: int

    @property
    def overall(self) -> int:
        return max(self.right, self.left)


def _check_same_n(env: Environment, edges: EdgeSet) -> None:
    if edges.n != env.n:
        raise ValueError(f"edge set has n={edges.n}, environment has n={env.n}")


def step(env: Environment, occupied: EdgeSet) -> EdgeSet:
    """One parallel round of the dynamics starting from ``occupied``."""
    _check_same_n(env, occupied)
    if not env.e0 <= occupied:
        raise ValueError("occupied set must contain e0")
    if not occupied <= (env.e0 | env.open):
        raise ValueError("occupied set must lie inside e0 | open")
    return EdgeSet(env.n, _kernels.step_bits(occupied.bits, env.open.bits, env.n))


def run(env: Environment) -> Trajectory:
    """Run the parallel dynamics to its fixpoint."""
    if env.n <= 1:
        return Trajectory(env.n, np.full((env.n, env.n), NEVER, np.int32), 0)
    time, t_max = _kernels.closure_times(env.e0.bits, env.open.bits, env.n)
    return Trajectory(env.n, time, int(t_max))


def run_slowed(
    env: Environment, order_seed: int, lexicographic: bool = False
) -> Trajectory:
    """Occupy a single occupiable open edge per tick until none is left.

    The edge is drawn uniformly from the current candidates using a generator
    keyed by ``order_seed``; ``lexicographic=True`` instead always takes the
    smallest ``(i, j)``.  Times in the result are tick numbers.
    """
    from .env import uniform_stream

    if env.n <= 1:
        return Trajectory(env.n, np.full((env.n, env.n), NEVER, np.int32), 0)
    draws = uniform_stream(order_seed, "slowed", len(env.open) + 1)
    time, ticks = _kernels.slowed_times(
        env.e0.bits, env.open.bits, env.n, draws, lexicographic
    )
    return Trajectory(env.n, time, int(ticks))


def run_kd_completion(env: Environment, d: int) -> Trajectory:
    """Occupy open unoriented edges that complete a copy of ``K_d``.

    An open pair ``u<->v`` is occupied once ``u`` and ``v`` have ``d - 2``
    common occupied neighbours that are pairwise occupied.
    """
    if d < 3:
        raise ValueError(f"K_d-completion needs d >= 3, got {d}")
    if not (env.e0.is_symmetric() and env.open.is_symmetric()):
        raise ValueError("K_d-completion requires symmetric e0 and open sets")
    if env.n <= 1:
        return Trajectory(env.n, np.full((env.n, env.n), NEVER, np.int32), 0)
    time, t_max = _kernels.kd_times(env.e0.bits, env.open.bits, env.n, d)
    return Trajectory(env.n, time, int(t_max))


def _vertices(subset, n) -> np.ndarray:
    idx = np.asarray(list(subset), dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError(f"vertex out of range for n={n}")
    return idx


def is_saturated(env: Environment, occupied: EdgeSet, subset=None) -> bool:
    """Whether every open edge inside ``subset`` (default: all) is occupied."""
    _check_same_n(env, occupied)
    missing = env.open.to_dense() & ~occupied.to_dense()
    if subset is None:
        return not missing.any()
    idx = _vertices(subset, env.n)
    return not missing[np.ix_(idx, idx)].any()


def is_abundant(edges: EdgeSet) -> bool:
    """Whether every ordered pair of distinct vertices has a two-step path."""
    if edges.n <= 1:
        return True
    a = edges.to_dense().astype(np.float32)
    two = (a @ a) > 0
    np.fill_diagonal(two, True)
    return bool(two.all())


def _graph(edges: EdgeSet) -> csr_matrix:
    return csr_matrix(edges.to_dense().astype(np.int8))


def distances(g0: EdgeSet) -> np.ndarray:
    """All-pairs oriented path lengths in ``g0``; :data:`UNREACHABLE` if none."""
    if g0.n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    dist = shortest_path(_graph(g0), method="D", directed=True, unweighted=True)
    out = np.where(np.isinf(dist), UNREACHABLE, dist).astype(np.int64)
    return out


def edge_length(g0: EdgeSet, i: int, j: int) -> int:
    """Number of edges on the shortest oriented ``g0`` path from ``i`` to ``j``."""
    if i == j:
        raise ValueError("edge length is undefined for i == j")
    if not (0 <= i < g0.n and 0 <= j < g0.n):
        raise ValueError(f"vertex out of range for n={g0.n}")
    dist = shortest_path(
        _graph(g0), method="D", directed=True, unweighted=True, indices=i
    )
    return UNREACHABLE if np.isinf(dist[j]) else int(dist[j])


def strongly_connected(edges: EdgeSet, subset: Sequence[int] | None = None) -> bool:
    """Whether the subgraph induced on ``subset`` is strongly connected."""
    idx = np.arange(edges.n) if subset is None else _vertices(subset, edges.n)
    if idx.size == 0:
        raise ValueError("subset must be nonempty")
    sub = edges.to_dense()[np.ix_(idx, idx)]
    ncomp, _ = connected_components(
        csr_matrix(sub.astype(np.int8)), directed=True, connection="strong"
    )
    return ncomp == 1


def longest_occupied_length(
    env: Environment, traj: Trajectory, g0: EdgeSet | None = None, dist=None
) -> LongestLengths:
    """Longest ``g0`` length among occupied non-initial edges, by direction.

    Rightward means ``j > i``.  ``dist`` may carry a precomputed
    :func:`distances` matrix for ``g0`` (defaults to ``env.e0``).
    """
    if dist is None:
        dist = distances(env.e0 if g0 is None else g0)
    occ = (traj.time != NEVER) & ~env.e0.to_dense()
    if not occ.any():
        return LongestLengths(0, 0)
    right = np.triu(occ, 1)
    left = np.tril(occ, -1)
    return LongestLengths(
        int(dist[right].max(initial=0)), int(dist[left].max(initial=0))
    )


def horns_of(env: Environment, K: Sequence[int], v: int) -> list[Horn]:
    """All horns at ``v`` whose other two vertices lie in ``K``."""
    K = sorted(set(int(k) for k in K))
    if v not in K:
        raise ValueError(f"vertex {v} is not in K")
    e0 = env.e0.to_dense()
    op = env.open.to_dense()
    either = e0 | op
    horns = []
    others = [k for k in K if k != v]
    for x in others:
        for y in others:
            if x == y:
                continue
            if e0[x, v] and e0[v, y] and op[x, y]:
                horns.append(Horn(v, x, y, HornVariant.THROUGH))
            if e0[v, x] and either[x, y] and op[v, y]:
                horns.append(Horn(v, x, y, HornVariant.OUT))
            if e0[x, v] and either[y, x] and op[y, v]:
                horns.append(Horn(v, x, y, HornVariant.IN))
    return horns
