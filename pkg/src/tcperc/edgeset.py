"""Bit-packed directed edge sets.

Row ``i`` of an :class:`EdgeSet` is the out-neighbourhood of vertex ``i``,
stored as ``ceil(n / 64)`` little-endian ``uint64`` words: vertex ``j`` lives
in word ``j >> 6`` at bit ``j & 63``.  Vertices are ``0 .. n-1``.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

WORD_BITS = 64


def n_words(n: int) -> int:
    return (n + WORD_BITS - 1) // WORD_BITS


def pack(mask: np.ndarray) -> np.ndarray:
    """Pack an ``(n, n)`` boolean matrix into ``(n, n_words(n))`` uint64 rows."""
    mask = np.asarray(mask, dtype=bool)
    n = mask.shape[0]
    w = n_words(n)
    padded = np.zeros((n, w * WORD_BITS), dtype=bool)
    padded[:, : mask.shape[1]] = mask
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack(bits: np.ndarray, n: int) -> np.ndarray:
    raw = np.ascontiguousarray(bits.astype("<u8", copy=False)).view(np.uint8)
    return np.unpackbits(raw, axis=1, bitorder="little", count=n).astype(bool)


class EdgeSet:
    """Immutable set of directed edges on ``n`` vertices.

    The diagonal is always empty; self-loops passed to any constructor are
    dropped.
    """

    __slots__ = ("n", "bits", "_dense")

    def __init__(self, n: int, bits: np.ndarray):
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        bits = np.asarray(bits, dtype=np.uint64)
        if bits.shape != (n, n_words(n)):
            raise ValueError(
                f"bit array shape {bits.shape} does not match n={n}"
            )
        if n:
            idx = np.arange(n)
            diag = bits[idx, idx >> 6] & (np.uint64(1) << (idx & 63).astype(np.uint64))
            if diag.any():
                bits = bits.copy()
                bits[idx, idx >> 6] &= ~(np.uint64(1) << (idx & 63).astype(np.uint64))
        bits.setflags(write=False)
        self.n = n
        self.bits = bits
        self._dense = None

    # -- constructors ---------------------------------------------------
    @classmethod
    def empty(cls, n: int) -> "EdgeSet":
        return cls(n, np.zeros((n, n_words(n)), dtype=np.uint64))

    @classmethod
    def complete(cls, n: int) -> "EdgeSet":
        return cls.from_dense(~np.eye(n, dtype=bool))

    @classmethod
    def from_dense(cls, mask) -> "EdgeSet":
        mask = np.array(mask, dtype=bool)
        if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
            raise ValueError("adjacency mask must be square")
        np.fill_diagonal(mask, False)
        return cls(mask.shape[0], pack(mask))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "EdgeSet":
        mask = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            mask[i, j] = True
        return cls.from_dense(mask)

    # -- views ----------------------------------------------------------
    def to_dense(self) -> np.ndarray:
        if self._dense is None:
            dense = unpack(self.bits, self.n)
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    def transpose(self) -> "EdgeSet":
        return EdgeSet.from_dense(self.to_dense().T)

    def edges(self) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(self.to_dense())
        return list(zip(ii.tolist(), jj.tolist()))

    def out_neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.to_dense()[i])

    def in_neighbors(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.to_dense()[:, j])

    def rightward(self) -> "EdgeSet":
        return EdgeSet.from_dense(np.triu(self.to_dense(), 1))

    def leftward(self) -> "EdgeSet":
        return EdgeSet.from_dense(np.tril(self.to_dense(), -1))

    def reversed(self) -> "EdgeSet":
        return self.transpose()

    def symmetrized(self) -> "EdgeSet":
        d = self.to_dense()
        return EdgeSet.from_dense(d | d.T)

    def is_symmetric(self) -> bool:
        d = self.to_dense()
        return bool(np.array_equal(d, d.T))

    def induced(self, vertices) -> "EdgeSet":
        """Edges with both endpoints in ``vertices``, on the same vertex set."""
        keep = np.zeros(self.n, dtype=bool)
        keep[np.asarray(list(vertices), dtype=np.intp)] = True
        return EdgeSet.from_dense(self.to_dense() & keep[:, None] & keep[None, :])

    # -- set algebra ----------------------------------------------------
    def _check(self, other: "EdgeSet") -> None:
        if not isinstance(other, EdgeSet):
            raise TypeError(f"expected EdgeSet, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"vertex counts differ: {self.n} vs {other.n}")

    def __or__(self, other: "EdgeSet") -> "EdgeSet":
        self._check(other)
        return EdgeSet(self.n, self.bits | other.bits)

    def __and__(self, other: "EdgeSet") -> "EdgeSet":
        self._check(other)
        return EdgeSet(self.n, self.bits & other.bits)

    def __sub__(self, other: "EdgeSet") -> "EdgeSet":
        self._check(other)
        return EdgeSet(self.n, self.bits & ~other.bits)

    def __le__(self, other: "EdgeSet") -> bool:
        self._check(other)
        return not bool((self.bits & ~other.bits).any())

    def __ge__(self, other: "EdgeSet") -> bool:
        return other <= self

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def isdisjoint(self, other: "EdgeSet") -> bool:
        self._check(other)
        return not bool((self.bits & other.bits).any())

    def __contains__(self, edge) -> bool:
        i, j = edge
        if not (0 <= i < self.n and 0 <= j < self.n):
            return False
        return bool((int(self.bits[i, j >> 6]) >> (j & 63)) & 1)

    def __len__(self) -> int:
        return int(np.bitwise_count(self.bits).sum()) if self.n else 0

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.edges())

    def __bool__(self) -> bool:
        return bool(self.bits.any())

    def __repr__(self) -> str:
        return f"EdgeSet(n={self.n}, edges={len(self)})"
