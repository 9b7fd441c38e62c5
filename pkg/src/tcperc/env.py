"""Seeded open-edge sampling.

Random numbers come from NumPy's Philox-4x64-10 counter-based generator.
A stream is identified by an integer key (a seed, or a ``(base_seed,
trial)`` pair) plus a stream label; the key words followed by the label code
form the :class:`numpy.random.SeedSequence` entropy.  Raw 64-bit outputs
``x`` are mapped to doubles as ``(x >> 11) * 2**-53``, which is exact and
platform independent.

Uniforms for an ``n``-vertex instance are consumed row-major over ordered
pairs ``(i, j)``, skipping the diagonal, one per pair whatever ``e0`` holds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .edgeset import EdgeSet

STREAMS = {"open": 0, "field": 1, "slowed": 2, "family": 3, "order": 4}


def _entropy(key, label: str) -> list[int]:
    words = [int(k) for k in (key if isinstance(key, (tuple, list)) else (key,))]
    if any(w < 0 for w in words):
        raise ValueError(f"seeds must be non-negative, got {key!r}")
    return words + [STREAMS[label]]


def uniform_stream(key, label: str, size: int) -> np.ndarray:
    """``size`` uniforms in ``[0, 1)`` from the stream ``(key, label)``."""
    bitgen = np.random.Philox(np.random.SeedSequence(_entropy(key, label)))
    raw = bitgen.random_raw(size)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def trial_key(base_seed: int, trial: int) -> tuple[int, int]:
    return (int(base_seed), int(trial))


def pair_uniforms(key, label: str, n: int) -> np.ndarray:
    """``(n, n)`` uniforms in canonical order; the diagonal is set to 1.0."""
    u = np.ones((n, n), dtype=np.float64)
    if n > 1:
        u[~np.eye(n, dtype=bool)] = uniform_stream(key, label, n * (n - 1))
    return u


class OpenMode(enum.Enum):
    UNIFORM = "uniform"
    LEFT_RIGHT = "left_right"


@dataclass(frozen=True)
class OpenModel:
    """Independent open-edge model.

    ``UNIFORM`` opens every ordered pair with ``p_open``; ``LEFT_RIGHT`` uses
    ``p_right`` for ``j > i`` and ``p_left`` for ``j < i``.  With
    ``unoriented=True`` (uniform mode only) the pair ``i<->j`` is opened in
    both directions by the single draw of ``(min, max)``.
    """

    mode: OpenMode = OpenMode.UNIFORM
    p_open: float = 0.0
    p_left: float = 0.0
    p_right: float = 0.0
    seed: int = 0
    unoriented: bool = False

    def __post_init__(self):
        if not isinstance(self.mode, OpenMode):
            object.__setattr__(self, "mode", OpenMode(self.mode))
        for name in ("p_open", "p_left", "p_right"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")
        if self.unoriented and self.mode is not OpenMode.UNIFORM:
            raise ValueError("unoriented sampling is only defined in uniform mode")

    @classmethod
    def uniform(cls, p: float, seed: int = 0, unoriented: bool = False) -> "OpenModel":
        return cls(OpenMode.UNIFORM, p_open=p, seed=seed, unoriented=unoriented)

    @classmethod
    def left_right(cls, p_left: float, p_right: float, seed: int = 0) -> "OpenModel":
        return cls(OpenMode.LEFT_RIGHT, p_left=p_left, p_right=p_right, seed=seed)

    @property
    def thresholds(self) -> float | tuple[float, float]:
        if self.mode is OpenMode.UNIFORM:
            return self.p_open
        return (self.p_left, self.p_right)


@dataclass(frozen=True)
class UniformField:
    """Per-pair uniforms shared across thresholds (the monotone coupling)."""

    n: int
    u: np.ndarray
    key: tuple

    @classmethod
    def generate(cls, n: int, key) -> "UniformField":
        key = tuple(key) if isinstance(key, (tuple, list)) else (key,)
        u = pair_uniforms(key, "field", n)
        u.setflags(write=False)
        return cls(n, u, key)


def _threshold_mask(u: np.ndarray, thresholds, unoriented: bool) -> np.ndarray:
    n = u.shape[0]
    if unoriented:
        if not np.isscalar(thresholds):
            raise ValueError("unoriented sampling takes a single probability")
        upper = np.triu(u < thresholds, 1)
        return upper | upper.T
    if np.isscalar(thresholds):
        mask = u < thresholds
    else:
        p_left, p_right = thresholds
        right = np.triu(np.ones((n, n), dtype=bool), 1)
        mask = np.where(right, u < p_right, u < p_left)
    np.fill_diagonal(mask, False)
    return mask


def open_from_field(
    e0: EdgeSet,
    field: UniformField,
    thresholds: float | Sequence[float],
    unoriented: bool = False,
) -> EdgeSet:
    """Open an edge iff its uniform is below its direction's threshold.

    ``thresholds`` is ``p_open`` or ``(p_left, p_right)``.
    """
    if field.n != e0.n:
        raise ValueError(f"field has n={field.n}, e0 has n={e0.n}")
    if not np.isscalar(thresholds):
        thresholds = tuple(float(t) for t in thresholds)
    mask = _threshold_mask(field.u, thresholds, unoriented)
    return EdgeSet.from_dense(mask & ~e0.to_dense())


def sample_open(e0: EdgeSet, model: OpenModel) -> EdgeSet:
    """Sample the open edges of ``model`` around the initial edges ``e0``."""
    u = pair_uniforms(model.seed, "open", e0.n)
    mask = _threshold_mask(u, model.thresholds, model.unoriented)
    return EdgeSet.from_dense(mask & ~e0.to_dense())
