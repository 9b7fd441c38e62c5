"""Adjacency-matrix images of occupation times as binary PPM files.

Cell ``(i, j)`` sits at row ``i``, column ``j``.  Occupied cells are coloured
by linear interpolation from ``low`` (time 0) to ``high`` (the last round),
open cells that never fill take ``never``, and closed cells and the diagonal
take ``closed``.  Convert with e.g. ``convert out.ppm out.png``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import NEVER, Environment, Trajectory

RGB = tuple[int, int, int]


def _check_rgb(name: str, c) -> RGB:
    c = tuple(int(x) for x in c)
    if len(c) != 3 or any(not 0 <= x <= 255 for x in c):
        raise ValueError(f"{name} must be an 8-bit RGB triple, got {c!r}")
    return c


@dataclass(frozen=True)
class RenderSpec:
    low: RGB = (0, 0, 255)
    high: RGB = (255, 255, 0)
    closed: RGB = (128, 128, 128)
    never: RGB = (235, 235, 235)
    scale: int = 1

    def __post_init__(self):
        for name in ("low", "high", "closed", "never"):
            object.__setattr__(self, name, _check_rgb(name, getattr(self, name)))
        if int(self.scale) != self.scale or self.scale < 1:
            raise ValueError(f"scale must be an integer >= 1, got {self.scale!r}")


class CellStatus(enum.Enum):
    OCCUPIED = "occupied"
    NEVER = "never"
    CLOSED = "closed"


def cell_color(status: CellStatus, time: int, t_max: int, spec: RenderSpec = RenderSpec()) -> RGB:
    """Colour of a single cell; integer interpolation rounded to nearest."""
    if status is CellStatus.CLOSED:
        return spec.closed
    if status is CellStatus.NEVER:
        return spec.never
    if t_max <= 0:
        return spec.low
    t = min(max(int(time), 0), t_max)
    return tuple(
        (lo * (t_max - t) + hi * t + t_max // 2) // t_max
        for lo, hi in zip(spec.low, spec.high)
    )


def image_array(env: Environment, traj: Trajectory, spec: RenderSpec = RenderSpec()) -> np.ndarray:
    """``(n*scale, n*scale, 3)`` uint8 pixels."""
    if traj.n != env.n:
        raise ValueError(f"trajectory has n={traj.n}, environment has n={env.n}")
    n = env.n
    time = traj.time.astype(np.int64)
    occ = time != NEVER
    possible = env.e0.to_dense() | env.open.to_dense()
    if (occ & ~possible).any():
        raise ValueError("trajectory occupies edges outside e0 | open")
    t_max = int(time[occ].max(initial=0))
    img = np.empty((n, n, 3), dtype=np.uint8)
    img[...] = spec.closed
    img[possible & ~occ] = spec.never
    if t_max > 0:
        t = np.clip(time[occ], 0, t_max)[:, None]
        lo = np.array(spec.low, dtype=np.int64)
        hi = np.array(spec.high, dtype=np.int64)
        img[occ] = (lo * (t_max - t) + hi * t + t_max // 2) // t_max
    else:
        img[occ] = spec.low
    if spec.scale > 1:
        img = img.repeat(spec.scale, axis=0).repeat(spec.scale, axis=1)
    return img


def ppm_bytes(env: Environment, traj: Trajectory, spec: RenderSpec = RenderSpec()) -> bytes:
    img = image_array(env, traj, spec)
    h, w = img.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def render_matrix(env: Environment, traj: Trajectory, spec: RenderSpec, path) -> Path:
    """Write the binary PPM image of ``traj`` to ``path``."""
    path = Path(path)
    path.write_bytes(ppm_bytes(env, traj, spec))
    return path


def read_ppm(path) -> np.ndarray:
    """Parse a P6 image written by :func:`render_matrix`."""
    data = Path(path).read_bytes()
    magic, dims, maxval, body = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit P6 image")
    w, h = (int(x) for x in dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)
