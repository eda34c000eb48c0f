"""Seedable point-set generation: simple random and jittered sampling.

Random numbers come from numpy's ``Philox`` 4x64 counter-based generator.
A stream is identified by a ``(seed, stream_id)`` pair which is turned into
the 128-bit Philox key ``(mix64(seed), mix64(stream_id))``, where ``mix64``
is the SplitMix64 output function (add the golden-ratio increment, then the
xor-shift-multiply finalizer). ``mix64`` is a bijection on 64-bit words, so
distinct pairs give distinct keys. Uniform deviates are doubles in
``[0, 1)`` with 53 random bits, drawn with ``Generator.random``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .geometry import GridPartition, cell_indices

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(value: int) -> int:
    """SplitMix64 step applied to ``value`` (reduced mod 2**64)."""
    z = (int(value) + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class RandomStream:
    """Single-owner stream of uniform deviates.

    Not safe to share between threads; derive one stream per worker instead.
    """

    algorithm = "philox4x64-10/splitmix64-key"

    def __init__(self, seed: int = 0, stream_id: int = 0):
        if int(stream_id) < 0:
            raise DomainError(f"stream id must be >= 0, got {stream_id}")
        self.seed = int(seed) & MASK64
        self.stream_id = int(stream_id)
        key = np.array([mix64(self.seed), mix64(self.stream_id)], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))
        self.position = 0

    def uniform(self, size=None):
        """Deviates in ``[0, 1)``; ``size`` follows numpy conventions."""
        out = self._gen.random(size)
        self.position += int(np.size(out))
        return out

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id}, position={self.position})"


def derive_stream(master_seed: int, replication: int) -> RandomStream:
    """Stream for replication ``replication`` of an experiment seeded with ``master_seed``."""
    if int(replication) < 0:
        raise DomainError(f"replication must be >= 0, got {replication}")
    return RandomStream(master_seed, replication)


@dataclass
class PointSet:
    """``N`` points in ``[0, 1]**d`` plus how they were produced."""

    points: np.ndarray
    kind: str = "unknown"
    seed: Optional[int] = None
    stream_id: Optional[int] = None
    m: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DomainError(f"points must be a non-empty (N, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)) or np.any(pts < 0.0) or np.any(pts > 1.0):
            raise DomainError("point coordinates must lie in [0, 1]")
        self.points = pts

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def provenance(self) -> dict:
        info = {"kind": self.kind, "seed": self.seed, "stream_id": self.stream_id}
        if self.m is not None:
            info["m"] = self.m
        return info


def simple_random(N: int, d: int, stream: RandomStream) -> PointSet:
    """``N`` i.i.d. uniform points; coordinates are consumed row by row."""
    if int(N) != N or N < 1 or int(d) != d or d < 1:
        raise DomainError(f"need N >= 1 and d >= 1, got N={N}, d={d}")
    pts = stream.uniform((int(N), int(d)))
    return PointSet(pts, kind="simple", seed=stream.seed, stream_id=stream.stream_id)


def _snap_into_cells(pts: np.ndarray, k: np.ndarray, m: int) -> np.ndarray:
    # (k + u) / m can round onto a neighbouring cell; nudge by ulps until
    # floor(x * m) agrees with the intended index.
    for _ in range(8):
        got = np.minimum(np.floor(pts * m), m - 1)
        high = got > k
        low = got < k
        if not (high.any() or low.any()):
            return pts
        pts = np.where(high, np.nextafter(pts, 0.0), pts)
        pts = np.where(low, np.nextafter(pts, 1.0), pts)
    raise AssertionError("could not place jittered point inside its cell")


def jittered_points(partition: GridPartition, u: np.ndarray) -> np.ndarray:
    """Map deviates ``u`` of shape ``(..., N, d)`` into the cells, cell ``i`` at row ``i``."""
    k = partition.all_multi_indices().astype(float)
    pts = (k + u) / partition.m
    return _snap_into_cells(pts, k, partition.m)


def jittered(partition: GridPartition, stream: RandomStream) -> PointSet:
    """One uniform point per grid cell, in cell-id order."""
    u = stream.uniform((partition.N, partition.d))
    pts = jittered_points(partition, u)
    return PointSet(pts, kind="jittered", seed=stream.seed, stream_id=stream.stream_id, m=partition.m)


def is_stratified(points: PointSet, partition: GridPartition) -> bool:
    """True when every cell holds exactly one point."""
    if points.N != partition.N or points.d != partition.d:
        return False
    ids = np.sort(cell_indices(partition, points.points))
    return bool(np.array_equal(ids, np.arange(partition.N)))
