"""Grid partitions of the unit cube and anchored test boxes.

Cells of a :class:`GridPartition` are the half-open boxes
``prod_j [k_j/m, (k_j+1)/m)``, except that faces lying on the top of the
cube are closed, so the ``m**d`` cells tile ``[0, 1]**d`` exactly. Cells are
numbered in row-major (C) order of their per-axis indices, last axis fastest.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

VOLUME_TOL = 1e-12


def _as_unit_vector(values, name="point"):
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise DomainError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} coordinates must lie in [0, 1]: {arr.tolist()}")
    return arr


@dataclass(frozen=True)
class AnchoredBox:
    """The test box ``[0, corner)`` (or its closure, depending on the caller)."""

    corner: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "corner", _as_unit_vector(self.corner, "corner"))

    @property
    def d(self) -> int:
        return self.corner.size

    @property
    def volume(self) -> float:
        return float(np.prod(self.corner))

    def __eq__(self, other):
        if not isinstance(other, AnchoredBox):
            return NotImplemented
        return np.array_equal(self.corner, other.corner)

    def __hash__(self):
        return hash(self.corner.tobytes())


@dataclass(frozen=True)
class GridPartition:
    """Equivolume grid of ``m**d`` axis-parallel cells with side ``1/m``."""

    d: int
    m: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be an integer >= 1, got {self.d}")
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"cells per axis must be an integer >= 1, got {self.m}")

    @property
    def N(self) -> int:
        return self.m ** self.d

    @property
    def shape(self) -> tuple:
        return (self.m,) * self.d

    @property
    def cell_volume(self) -> float:
        return 1.0 / self.N

    def cell_multi_index(self, cell: int) -> tuple:
        if int(cell) != cell or not 0 <= cell < self.N:
            raise DomainError(f"cell id {cell} out of range for N={self.N}")
        return tuple(int(k) for k in np.unravel_index(int(cell), self.shape))

    def cell_bounds(self, cell: int):
        """Return ``(lower, upper)`` corner arrays of a cell."""
        k = np.array(self.cell_multi_index(cell), dtype=float)
        return k / self.m, (k + 1.0) / self.m

    def all_multi_indices(self) -> np.ndarray:
        """``(N, d)`` integer array of per-axis indices in cell-id order."""
        grids = np.indices(self.shape).reshape(self.d, -1)
        return grids.T.copy()


def cell_indices(partition: GridPartition, points) -> np.ndarray:
    """Vectorised :func:`cell_index` for an ``(n, d)`` array of points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != partition.d:
        raise DomainError(f"expected an (n, {partition.d}) array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)) or np.any(pts < 0.0) or np.any(pts > 1.0):
        raise DomainError("point coordinates must lie in [0, 1]")
    k = np.minimum(np.floor(pts * partition.m).astype(np.int64), partition.m - 1)
    return np.ravel_multi_index(tuple(k.T), partition.shape)


def cell_index(partition: GridPartition, point) -> int:
    """Id of the unique cell containing ``point``.

    Per-axis index is ``min(floor(x_j * m), m - 1)``, so a coordinate equal
    to 1 falls in the last cell.
    """
    p = _as_unit_vector(point)
    if p.size != partition.d:
        raise DomainError(f"point has dimension {p.size}, partition has {partition.d}")
    return int(cell_indices(partition, p[None, :])[0])


def _axis_overlaps(partition: GridPartition, box: AnchoredBox) -> np.ndarray:
    """``(d, m)`` array: length of ``[k/m, (k+1)/m) ∩ [0, x_j)`` per axis."""
    if box.d != partition.d:
        raise DomainError(f"box has dimension {box.d}, partition has {partition.d}")
    k = np.arange(partition.m, dtype=float)
    lower = k / partition.m
    upper = (k + 1.0) / partition.m
    x = box.corner[:, None]
    return np.maximum(0.0, np.minimum(upper[None, :], x) - lower[None, :])


def intersection_volumes(partition: GridPartition, box: AnchoredBox) -> np.ndarray:
    """Volumes ``vol(cell ∩ box)`` for every cell, indexed by cell id."""
    overlaps = _axis_overlaps(partition, box)
    vol = overlaps[0]
    for axis in overlaps[1:]:
        vol = np.multiply.outer(vol, axis)
    return np.asarray(vol, dtype=float).reshape(-1)


def cell_box_intersection_volume(partition: GridPartition, cell: int, box: AnchoredBox) -> float:
    lower, upper = partition.cell_bounds(cell)
    if box.d != partition.d:
        raise DomainError(f"box has dimension {box.d}, partition has {partition.d}")
    return float(np.prod(np.maximum(0.0, np.minimum(upper, box.corner) - lower)))


@dataclass(frozen=True)
class BoxDecomposition:
    """Cells fully inside a box (``contained``) and cells cut by it (``partial``)."""

    contained: tuple
    partial: tuple
    volumes: np.ndarray = field(repr=False, compare=False)

    @property
    def untouched(self) -> int:
        return self.volumes.size - len(self.contained) - len(self.partial)

    def covered_volume(self) -> float:
        n = self.volumes.size
        return len(self.contained) / n + float(self.volumes[list(self.partial)].sum())


def decompose_box(partition: GridPartition, box: AnchoredBox) -> BoxDecomposition:
    vols = intersection_volumes(partition, box)
    full = np.abs(vols - partition.cell_volume) <= VOLUME_TOL
    part = (vols > 0.0) & ~full
    return BoxDecomposition(
        contained=tuple(int(i) for i in np.flatnonzero(full)),
        partial=tuple(int(i) for i in np.flatnonzero(part)),
        volumes=vols,
    )


def boundary_cell_count(partition: GridPartition, box: AnchoredBox, faces: str = "full") -> int:
    """Number of cells whose closure meets the boundary of ``[0, x]``.

    ``faces="full"`` uses the whole topological boundary, including the faces
    on the coordinate hyperplanes ``y_j = 0``. ``faces="upper"`` only counts
    the faces ``{y <= x : y_j = x_j}``.
    """
    if faces not in ("full", "upper"):
        raise DomainError(f"faces must be 'full' or 'upper', got {faces!r}")
    if box.d != partition.d:
        raise DomainError(f"box has dimension {box.d}, partition has {partition.d}")
    m = partition.m
    k = partition.all_multi_indices().astype(float)
    lo = k / m
    hi = (k + 1.0) / m
    x = box.corner[None, :]
    # closure of the cell meets [0, x]
    meets_box = np.all(lo <= x, axis=1)
    on_upper = np.any((lo <= x) & (x <= hi), axis=1)
    hit = on_upper
    if faces == "full":
        hit = hit | np.any(k == 0, axis=1)
    return int(np.count_nonzero(meets_box & hit))


def boundary_count_bound(partition: GridPartition, faces: str = "full") -> float:
    """Reference bound ``d * N**(1 - 1/d)``, doubled for the full boundary."""
    base = partition.d * partition.N ** (1.0 - 1.0 / partition.d)
    return 2.0 * base if faces == "full" else base
