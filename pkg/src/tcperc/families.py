"""Initial graph families and structural checks on them.

All families live on vertices ``0 .. N-1``.  Hamming and hypercube
coordinates are mapped to vertex indices in row-major order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import strongly_connected
from .edgeset import EdgeSet
from .env import pair_uniforms


class FamilyKind(enum.Enum):
    LINEAR_UNORIENTED = "linear-unoriented"
    LINEAR_ORIENTED = "linear-oriented"
    HAMMING = "hamming"
    HYPERCUBE = "hypercube"
    ER_INITIAL = "er-initial"
    R_PAIRS = "r-pairs"
    CHAIN_LEFT_RANGE = "chain-left-range"
    KD_BAND = "kd-band"


# families whose vertex order carries the left/right distinction
LINEAR_KINDS = frozenset(
    {
        FamilyKind.LINEAR_UNORIENTED,
        FamilyKind.LINEAR_ORIENTED,
        FamilyKind.R_PAIRS,
        FamilyKind.CHAIN_LEFT_RANGE,
        FamilyKind.KD_BAND,
    }
)


@dataclass(frozen=True)
class FamilySpec:
    """Declarative description of an initial graph.

    ``n`` is the vertex count, except for ``HAMMING`` where it is the side
    length (``n ** d`` vertices) and ``HYPERCUBE`` where the vertex count is
    ``2 ** dim``.  ``d`` doubles as the clique size of ``KD_BAND``.
    """

    kind: FamilyKind
    n: int = 0
    d: int = 2
    dim: int = 0
    p_initial: float = 0.0
    seed: int = 0
    r: int = 1

    def __post_init__(self):
        if not isinstance(self.kind, FamilyKind):
            object.__setattr__(self, "kind", FamilyKind(self.kind))

    @property
    def vertex_count(self) -> int:
        if self.kind is FamilyKind.HAMMING:
            return self.n ** self.d
        if self.kind is FamilyKind.HYPERCUBE:
            return 1 << self.dim
        return self.n

    @property
    def has_linear_order(self) -> bool:
        return self.kind in LINEAR_KINDS

    @property
    def is_random(self) -> bool:
        return self.kind is FamilyKind.ER_INITIAL


def _linear(n: int, oriented: bool) -> np.ndarray:
    a = np.zeros((n, n), dtype=bool)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = True
    if not oriented:
        a |= a.T
    return a


def _hamming(side: int, d: int) -> np.ndarray:
    coords = np.array(np.unravel_index(np.arange(side**d), (side,) * d)).T
    diff = (coords[:, None, :] != coords[None, :, :]).sum(axis=2)
    return diff == 1


def _r_pairs(n: int) -> np.ndarray:
    a = np.zeros((n, n), dtype=bool)
    for m in range(0, n, 2):
        a[m, m + 1] = a[m + 1, m] = True
    # 0->2->4->... along the first members, ...->5->3->1 along the second
    for m in range(0, n - 2, 2):
        a[m, m + 2] = True
        a[m + 3, m + 1] = True
    return a


def _chain_left_range(n: int, r: int) -> np.ndarray:
    a = _linear(n, oriented=True)
    for k in range(0, n - 1, r):
        a[k + r, k] = True
    return a


def _kd_band(n: int, d: int) -> np.ndarray:
    i, j = np.indices((n, n))
    return (np.abs(i - j) <= d - 2) & (i != j)


def make(spec: FamilySpec) -> EdgeSet:
    """Build the initial edge set described by ``spec``."""
    kind = spec.kind
    if kind is FamilyKind.HYPERCUBE:
        if spec.dim < 1:
            raise ValueError("hypercube needs dim >= 1")
        return EdgeSet.from_dense(_hamming(2, spec.dim))
    if spec.n < 1:
        raise ValueError(f"n must be positive, got {spec.n}")
    n = spec.n
    if kind is FamilyKind.LINEAR_UNORIENTED:
        a = _linear(n, oriented=False)
    elif kind is FamilyKind.LINEAR_ORIENTED:
        a = _linear(n, oriented=True)
    elif kind is FamilyKind.HAMMING:
        if spec.d < 1:
            raise ValueError("Hamming graph needs d >= 1")
        a = _hamming(n, spec.d)
    elif kind is FamilyKind.ER_INITIAL:
        if not 0.0 <= spec.p_initial <= 1.0:
            raise ValueError(f"p_initial={spec.p_initial} is not a probability")
        upper = np.triu(pair_uniforms(spec.seed, "family", n) < spec.p_initial, 1)
        a = upper | upper.T
    elif kind is FamilyKind.R_PAIRS:
        if n % 2:
            raise ValueError(f"R_PAIRS needs an even vertex count, got {n}")
        a = _r_pairs(n)
    elif kind is FamilyKind.CHAIN_LEFT_RANGE:
        if spec.r < 1 or (n - 1) % spec.r:
            raise ValueError(
                f"range r={spec.r} must be positive and divide n - 1 = {n - 1}"
            )
        a = _chain_left_range(n, spec.r)
    elif kind is FamilyKind.KD_BAND:
        if spec.d < 3:
            raise ValueError("KD_BAND needs d >= 3")
        a = _kd_band(n, spec.d)
    else:  # pragma: no cover
        raise ValueError(f"unknown family {kind}")
    return EdgeSet.from_dense(a)


def weakly_connected(e0: EdgeSet) -> bool:
    """Connectivity of ``e0`` ignoring orientation."""
    if e0.n == 0:
        return True
    d = e0.to_dense()
    ncomp, _ = connected_components(csr_matrix((d | d.T).astype(np.int8)), directed=False)
    return ncomp == 1


def max_degree(e0: EdgeSet, directed: bool = False) -> int:
    """Largest vertex degree.

    By default this counts distinct neighbours ignoring orientation, which
    equals ``max(in, out)`` on unoriented graphs.  ``directed=True`` returns
    the largest in- or out-degree instead.
    """
    if e0.n == 0:
        return 0
    d = e0.to_dense()
    if directed:
        return int(max(d.sum(axis=1).max(), d.sum(axis=0).max()))
    return int((d | d.T).sum(axis=1).max())


class RUnorientedReport(NamedTuple):
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_r_unoriented(e0: EdgeSet, phi, R: int) -> RUnorientedReport:
    """Check that ``phi`` exhibits ``e0`` as an ``R``-unoriented graph.

    Blocks ``phi^-1(y)`` must have at most ``R`` vertices and be strongly
    connected, and the graph on blocks joining ``y1, y2`` whenever ``e0`` has
    edges both ways between them must be connected (it then has a spanning
    tree with the required property).
    """
    phi = np.asarray(phi)
    if phi.shape != (e0.n,):
        return RUnorientedReport(False, "phi must assign a block to every vertex")
    labels, block = np.unique(phi, return_inverse=True)
    m = labels.size
    for b in range(m):
        members = np.flatnonzero(block == b)
        if members.size > R:
            return RUnorientedReport(
                False, f"block {labels[b]!r} has {members.size} > R={R} vertices"
            )
        if not strongly_connected(e0, members):
            return RUnorientedReport(
                False, f"block {labels[b]!r} is not strongly connected"
            )
    d = e0.to_dense()
    ii, jj = np.nonzero(d)
    between = np.zeros((m, m), dtype=bool)
    between[block[ii], block[jj]] = True
    np.fill_diagonal(between, False)
    mutual = between & between.T
    ncomp, _ = connected_components(csr_matrix(mutual.astype(np.int8)), directed=False)
    if ncomp != 1:
        return RUnorientedReport(
            False, "blocks are not linked into a tree by edges in both directions"
        )
    return RUnorientedReport(True)


def load_edge_list(path, n: int | None = None) -> EdgeSet:
    """Read whitespace-separated ``i j`` lines (0-based, ``#`` comments)."""
    pairs = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            i, j = line.split()[:2]
            pairs.append((int(i), int(j)))
    if n is None:
        n = 1 + max((max(p) for p in pairs), default=-1)
    return EdgeSet.from_edges(n, pairs)
