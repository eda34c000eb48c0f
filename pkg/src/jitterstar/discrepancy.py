"""Star discrepancy: exact evaluation, local discrepancy and grid delta-covers.

Both engines scan a tensor grid of candidate corners. Closed-box counts on
the grid come from a d-dimensional cumulative sum of the point histogram
(points are binned by their rank along each axis), so one scan costs
``O(N*d + K)`` where ``K`` is the number of grid corners. Large grids are
processed one slab of the first axis at a time to keep memory at
``K / K_0``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, ResourceGuardError
from .geometry import AnchoredBox
from .samplers import PointSet

DEFAULT_MAX_WORK = 10 ** 8
# grids larger than this are scanned slab by slab
SLAB_THRESHOLD = 1 << 22


@dataclass(frozen=True)
class DiscrepancyResult:
    """Supremum value, the corner attaining it and which side it comes from.

    ``side == "over"``: count of the closed box ``[0, witness]`` exceeds its
    volume. ``side == "under"``: the volume exceeds the count of the open
    box ``[0, witness)``, i.e. the sup is approached from below.
    """

    value: float
    witness: np.ndarray
    side: str
    method: str = "exact"
    delta: Optional[float] = None

    def to_dict(self) -> dict:
        out = {
            "value": float(self.value),
            "witness": [float(v) for v in self.witness],
            "side": self.side,
            "method": self.method,
        }
        if self.delta is not None:
            out["delta"] = float(self.delta)
            out["upper_bound"] = float(self.value + self.delta)
        return out


def _point_array(P) -> np.ndarray:
    if isinstance(P, PointSet):
        return P.points
    return PointSet(P).points


def local_discrepancy(P, box: AnchoredBox, convention: str = "closed") -> float:
    """Signed ``count/N - volume`` for ``[0, x]`` (closed) or ``[0, x)`` (open)."""
    pts = _point_array(P)
    if not isinstance(box, AnchoredBox):
        box = AnchoredBox(box)
    if pts.shape[1] != box.d:
        raise DomainError(f"point set has dimension {pts.shape[1]}, box has {box.d}")
    if convention == "closed":
        inside = np.all(pts <= box.corner, axis=1)
    elif convention == "open":
        inside = np.all(pts < box.corner, axis=1)
    else:
        raise DomainError(f"convention must be 'closed' or 'open', got {convention!r}")
    return float(np.count_nonzero(inside)) / pts.shape[0] - box.volume


def _outer_volume(lead, axes):
    vol = np.asarray(lead, dtype=float)
    for a in axes:
        vol = np.multiply.outer(vol, a)
    return vol


def _histogram(ranks: np.ndarray, shape) -> np.ndarray:
    flat = np.ravel_multi_index(tuple(ranks.T), shape) if len(shape) else np.zeros(ranks.shape[0], int)
    size = int(np.prod(shape)) if len(shape) else 1
    return np.bincount(flat, minlength=size).reshape(shape)


def _cumulate(h: np.ndarray) -> np.ndarray:
    for axis in range(h.ndim):
        h = np.cumsum(h, axis=axis)
    return h


def _shift_back(c: np.ndarray) -> np.ndarray:
    """``out[i] = c[i - 1]`` along every axis, zero where any index is 0.

    A 0-d array has no axes to shift and is returned unchanged.
    """
    if c.ndim == 0:
        return c.copy()
    out = np.zeros_like(c)
    out[(slice(1, None),) * c.ndim] = c[(slice(None, -1),) * c.ndim]
    return out


def _scan_grid(values, ranks: np.ndarray, n: int, use_open: bool):
    """Maximise over/under discrepancy on the tensor grid ``values``.

    ``ranks[p, j]`` is the smallest grid index along axis ``j`` whose value is
    ``>= points[p, j]``; with ``use_open`` the grid values must coincide with
    point coordinates so that ``rank < i`` means strictly below.
    Ties resolve to the first corner in lexicographic order.
    """
    shape = tuple(len(v) for v in values)
    total = int(np.prod(shape))
    if total <= SLAB_THRESHOLD:
        counts = _cumulate(_histogram(ranks, shape))
        below = _shift_back(counts) if use_open else counts
        vol = _outer_volume(values[0], values[1:])
        over = counts / n - vol
        under = vol - below / n
        score = np.maximum(over, under)
        flat = int(np.argmax(score))
        idx = np.unravel_index(flat, shape)
        return float(score[idx]), idx, "over" if over[idx] >= under[idx] else "under"

    rest_shape = shape[1:]
    order = np.argsort(ranks[:, 0], kind="stable")
    r_sorted = ranks[order]
    starts = np.searchsorted(r_sorted[:, 0], np.arange(shape[0] + 1), side="left")
    running = np.zeros(rest_shape, dtype=np.int64)
    best = (-np.inf, None, "over")
    for i in range(shape[0]):
        previous = running
        chunk = r_sorted[starts[i]:starts[i + 1], 1:]
        running = previous + _cumulate(_histogram(chunk, rest_shape))
        below = _shift_back(previous) if use_open else running
        # same association order as the full path, so both agree bitwise
        vol = _outer_volume(values[0][i], values[1:])
        over = running / n - vol
        under = vol - below / n
        score = np.maximum(over, under)
        flat = int(np.argmax(score))
        j = np.unravel_index(flat, rest_shape)
        if score[j] > best[0]:
            side = "over" if over[j] >= under[j] else "under"
            best = (float(score[j]), (i,) + tuple(j), side)
    return best


def exact_star_discrepancy(P, max_work: int = DEFAULT_MAX_WORK) -> DiscrepancyResult:
    """Exact ``sup_x |vol([0, x]) - #{p in [0, x]}/N|``.

    Candidate corners take each coordinate from the point coordinates on
    that axis or 1. Counts are piecewise constant and the volume is monotone
    between candidates, so the closed count at a candidate gives the largest
    over-discrepancy and the open count the largest under-discrepancy.
    Refuses to run when ``N**d > max_work``.
    """
    pts = _point_array(P)
    n, d = pts.shape
    if max_work is not None and n ** d > max_work:
        raise ResourceGuardError(
            f"exact discrepancy needs ~N^d = {n}^{d} corner evaluations (> {max_work}); "
            "use cover_discrepancy instead"
        )
    values, ranks = [], np.empty((n, d), dtype=np.int64)
    for j in range(d):
        axis = np.unique(np.append(pts[:, j], 1.0))
        values.append(axis)
        ranks[:, j] = np.searchsorted(axis, pts[:, j], side="left")
    value, idx, side = _scan_grid(values, ranks, n, use_open=True)
    witness = np.array([values[j][i] for j, i in enumerate(idx)])
    return DiscrepancyResult(value, witness, side, method="exact")


@dataclass(frozen=True)
class DeltaCover:
    """Grid ``{(i_1/M, ..., i_d/M) : 1 <= i_j <= M}`` with ``M = ceil(d/delta)``."""

    d: int
    delta: float
    M: int

    @property
    def size(self) -> int:
        return self.M ** self.d

    @property
    def axis_values(self) -> np.ndarray:
        return np.arange(1, self.M + 1, dtype=float) / self.M

    def corners(self) -> np.ndarray:
        """All ``M**d`` corners as an array; only sensible for small covers."""
        g = self.axis_values
        mesh = np.meshgrid(*([g] * self.d), indexing="ij")
        return np.stack([a.reshape(-1) for a in mesh], axis=1)

    def bracket(self, y):
        """Corners ``x <= y <= z`` from ``Γ ∪ {0}`` with ``vol(z) - vol(x) <= delta``."""
        y = np.asarray(y, dtype=float)
        lo = np.floor(y * self.M) / self.M
        hi = np.maximum(np.ceil(y * self.M), 1.0) / self.M
        if np.any(lo <= 0.0):
            lo = np.zeros_like(lo)
        return lo, hi


def build_delta_cover(d: int, delta: float) -> DeltaCover:
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {d}")
    if not (0.0 < delta <= 1.0):
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    # d/M <= delta guarantees 1 - (1 - 1/M)**d <= delta; Fraction keeps the
    # ceiling exact for the binary value of delta
    return DeltaCover(int(d), float(delta), math.ceil(int(d) / Fraction(float(delta))))


def cover_discrepancy_result(P, cover: DeltaCover, max_work: int = DEFAULT_MAX_WORK) -> DiscrepancyResult:
    pts = _point_array(P)
    n, d = pts.shape
    if d != cover.d:
        raise DomainError(f"point set has dimension {d}, cover has {cover.d}")
    if max_work is not None and cover.size > max_work:
        raise ResourceGuardError(f"cover has {cover.size} corners (> {max_work})")
    g = cover.axis_values
    ranks = np.searchsorted(g, pts, side="left").astype(np.int64)
    value, idx, side = _scan_grid([g] * d, ranks, n, use_open=False)
    witness = g[np.array(idx)]
    return DiscrepancyResult(value, witness, side, method="cover", delta=cover.delta)


def cover_discrepancy(P, cover: DeltaCover, max_work: int = DEFAULT_MAX_WORK) -> float:
    """``max |vol([0, x]) - #{p in [0, x]}/N|`` over the cover corners."""
    return cover_discrepancy_result(P, cover, max_work).value


def cover_cardinality_bound(d: int, delta: float) -> float:
    """Upper bound ``2^d e^d / sqrt(2 pi d) * (1/delta + 1)^d`` on the bracketing number."""
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {d}")
    if not (0.0 < delta <= 1.0):
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    return 2.0 ** d * math.e ** d / math.sqrt(2.0 * math.pi * d) * (1.0 / delta + 1.0) ** d


def cover_size_report(d: int, delta: float) -> dict:
    cover = build_delta_cover(d, delta)
    bound = cover_cardinality_bound(d, delta)
    return {"d": d, "delta": delta, "M": cover.M, "size": cover.size,
            "cardinality_bound": bound, "within_bound": cover.size <= bound}


def star_discrepancy(P, method: str = "exact", delta: Optional[float] = None,
                     max_work: int = DEFAULT_MAX_WORK) -> DiscrepancyResult:
    """Dispatch to the exact engine or to a grid cover with the given ``delta``."""
    if method == "exact":
        return exact_star_discrepancy(P, max_work=max_work)
    if method == "cover":
        if delta is None:
            raise DomainError("cover method needs delta")
        d = _point_array(P).shape[1]
        return cover_discrepancy_result(P, build_delta_cover(d, delta), max_work=max_work)
    raise DomainError(f"unknown method {method!r}")
