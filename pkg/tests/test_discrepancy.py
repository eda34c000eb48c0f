import itertools
import math

import numpy as np
import pytest

from jitterstar import (
    AnchoredBox,
    DomainError,
    GridPartition,
    RandomStream,
    ResourceGuardError,
    build_delta_cover,
    cover_cardinality_bound,
    cover_discrepancy,
    exact_star_discrepancy,
    jittered,
    local_discrepancy,
)
from jitterstar import discrepancy as disc
from jitterstar.discrepancy import cover_discrepancy_result, cover_size_report


def order_statistics_discrepancy(x):
    """Closed-form 1-d star discrepancy from the sorted sample."""
    x = sorted(x)
    n = len(x)
    return max(max((i + 1) / n - x[i], x[i] - i / n) for i in range(n))


def brute_force_discrepancy(pts, eps=1e-9):
    """Pure-python sup: closed counts at candidate corners, limits from below via x - eps."""
    n, d = len(pts), len(pts[0])
    axes = [sorted(set(p[j] for p in pts) | {1.0}) for j in range(d)]
    best = 0.0
    for corner in itertools.product(*axes):
        vol = math.prod(corner)
        closed = sum(all(p[j] <= corner[j] for j in range(d)) for p in pts)
        below = [max(c - eps, 0.0) for c in corner]
        strictly = sum(all(p[j] <= below[j] for j in range(d)) for p in pts)
        best = max(best, closed / n - vol, vol - strictly / n)
    return best


def dense_scan(pts, steps):
    """Lower bound: max |local discrepancy| on the grid {0, 1/steps, ..., 1}^d."""
    pts = np.asarray(pts)
    g = np.arange(steps + 1) / steps
    best = 0.0
    for corner in itertools.product(g, repeat=pts.shape[1]):
        c = np.array(corner)
        best = max(best, abs(np.count_nonzero(np.all(pts <= c, axis=1)) / len(pts) - np.prod(c)))
    return best


def test_local_discrepancy_examples():
    assert local_discrepancy(np.array([[0.5, 0.5]]), AnchoredBox([1.0, 1.0])) == 0.0
    assert local_discrepancy(np.array([[0.5]]), AnchoredBox([0.5]), "closed") == 0.5
    assert local_discrepancy(np.array([[0.5]]), AnchoredBox([0.5]), "open") == -0.5


def test_local_discrepancy_errors():
    with pytest.raises(DomainError):
        local_discrepancy(np.array([[0.5, 0.5]]), AnchoredBox([0.5]))
    with pytest.raises(DomainError):
        local_discrepancy(np.array([[0.5]]), AnchoredBox([0.5]), "half")


def test_exact_examples():
    assert exact_star_discrepancy(np.array([[0.25], [0.75]])).value == 0.25
    r = exact_star_discrepancy(np.array([[0.0]]))
    assert r.value == 1.0 and r.side == "over"


def test_exact_against_order_statistics():
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.random(rng.integers(1, 17))
        got = exact_star_discrepancy(x[:, None]).value
        assert abs(got - order_statistics_discrepancy(x)) <= 1e-12


@pytest.mark.parametrize("d,n", [(2, 5), (2, 9), (3, 6), (4, 4)])
def test_exact_against_brute_force(d, n):
    rng = np.random.default_rng(100 * d + n)
    for _ in range(5):
        pts = rng.random((n, d))
        assert abs(exact_star_discrepancy(pts).value - brute_force_discrepancy(pts.tolist())) <= 1e-12


def test_exact_with_repeated_and_boundary_coordinates():
    pts = np.array([[0.5, 1.0], [0.5, 0.25], [0.0, 0.25], [1.0, 1.0]])
    assert abs(exact_star_discrepancy(pts).value - brute_force_discrepancy(pts.tolist())) <= 1e-12


def test_exact_against_dense_scan_16_jittered():
    pts = jittered(GridPartition(2, 4), RandomStream(42)).points
    exact = exact_star_discrepancy(pts).value
    scan = dense_scan(pts, 200)
    # the 1/200 grid is itself a cover with delta = 1 - (1 - 1/200)^2 < 0.01
    assert scan <= exact + 1e-12
    assert exact - scan <= 0.01


def test_witness_reproduces_value():
    rng = np.random.default_rng(8)
    for d in (1, 2, 3):
        for _ in range(20):
            pts = rng.random((rng.integers(1, 12), d))
            r = exact_star_discrepancy(pts)
            conv = "closed" if r.side == "over" else "open"
            assert abs(abs(local_discrepancy(pts, AnchoredBox(r.witness), conv)) - r.value) <= 1e-12
            assert 0.0 <= r.value <= 1.0


def test_exact_guard():
    pts = np.random.default_rng(0).random((101, 4))
    with pytest.raises(ResourceGuardError):
        exact_star_discrepancy(pts)
    small = np.random.default_rng(0).random((20, 2))
    with pytest.raises(ResourceGuardError):
        exact_star_discrepancy(small, max_work=100)
    exact_star_discrepancy(small, max_work=None)


@pytest.mark.parametrize("d,n", [(1, 30), (2, 25), (3, 10)])
def test_slab_path_matches_full_path(monkeypatch, d, n):
    pts = np.random.default_rng(d).random((n, d))
    full = exact_star_discrepancy(pts)
    full_cover = cover_discrepancy_result(pts, build_delta_cover(d, 0.1))
    monkeypatch.setattr(disc, "SLAB_THRESHOLD", 1)
    slab = exact_star_discrepancy(pts)
    slab_cover = cover_discrepancy_result(pts, build_delta_cover(d, 0.1))
    for a, b in ((full, slab), (full_cover, slab_cover)):
        assert a.value == b.value and a.side == b.side
        assert np.array_equal(a.witness, b.witness)


def test_ties_pick_first_lexicographic_corner():
    # midpoint lattice: every point attains 1/(2N); the first is reported
    pts = np.array([[0.125], [0.375], [0.625], [0.875]])
    r = exact_star_discrepancy(pts)
    assert r.value == 0.125 and r.witness[0] == 0.125


def test_build_cover_examples():
    c = build_delta_cover(1, 0.5)
    assert c.M == 2 and c.size == 2 and c.corners()[:, 0].tolist() == [0.5, 1.0]
    c = build_delta_cover(2, 0.5)
    assert c.M == 4 and c.size == 16
    c = build_delta_cover(1, 1.0)
    assert c.M == 1 and c.corners().tolist() == [[1.0]]
    # binary 0.1 is slightly above 1/10, so 3/0.1 < 30
    assert build_delta_cover(3, 0.1).M == 30


@pytest.mark.parametrize("delta", [0.0, -0.1, 1.5])
def test_build_cover_rejects_delta(delta):
    with pytest.raises(DomainError):
        build_delta_cover(2, delta)


@pytest.mark.parametrize("d,delta", [(1, 0.5), (2, 0.3), (3, 0.25), (2, 1.0)])
def test_cover_brackets_every_point(d, delta):
    cover = build_delta_cover(d, delta)
    rng = np.random.default_rng(4)
    ys = np.vstack([rng.random((500, d)), np.zeros((1, d)), np.ones((1, d))])
    corners = {tuple(c) for c in cover.corners()} | {(0.0,) * d}
    for y in ys:
        lo, hi = cover.bracket(y)
        assert tuple(lo) in corners and tuple(hi) in corners
        assert np.all(lo <= y + 1e-12) and np.all(y <= hi + 1e-12)
        assert np.prod(hi) - np.prod(lo) <= delta + 1e-12


def test_cover_discrepancy_examples():
    assert cover_discrepancy(np.array([[0.5]]), build_delta_cover(1, 0.5)) == 0.5
    pts = np.random.default_rng(1).random((7, 1))
    assert cover_discrepancy(pts, build_delta_cover(1, 1.0)) == 0.0
    pts = jittered(GridPartition(2, 4), RandomStream(42)).points
    assert cover_discrepancy(pts, build_delta_cover(2, 0.05)) + 0.05 >= exact_star_discrepancy(pts).value


def test_cover_dimension_mismatch():
    with pytest.raises(DomainError):
        cover_discrepancy(np.array([[0.5, 0.5]]), build_delta_cover(1, 0.5))


def test_cover_matches_direct_evaluation():
    rng = np.random.default_rng(12)
    for d in (1, 2, 3):
        pts = rng.random((9, d))
        cover = build_delta_cover(d, 0.3)
        direct = max(abs(local_discrepancy(pts, AnchoredBox(c))) for c in cover.corners())
        assert cover_discrepancy(pts, cover) == pytest.approx(direct, abs=1e-15)


def test_monotone_refinement():
    rng = np.random.default_rng(21)
    for d in (1, 2, 3):
        for _ in range(20):
            pts = rng.random((rng.integers(1, 30), d))
            coarse = build_delta_cover(d, 0.2)
            fine = disc.DeltaCover(d, 0.1, 2 * coarse.M)
            assert cover_discrepancy(pts, fine) >= cover_discrepancy(pts, coarse)


@pytest.mark.parametrize("d,delta,expected", [
    (1, 1.0, 2 * math.e / math.sqrt(2 * math.pi) * 2),
    (1, 0.5, 2 * math.e / math.sqrt(2 * math.pi) * 3),
    (2, 0.5, 4 * math.e ** 2 / math.sqrt(4 * math.pi) * 9),
])
def test_cover_cardinality_bound(d, delta, expected):
    assert cover_cardinality_bound(d, delta) == pytest.approx(expected, rel=1e-13)


def test_cover_cardinality_bound_rounded_values():
    assert cover_cardinality_bound(1, 1.0) == pytest.approx(4.3374, abs=5e-4)
    assert cover_cardinality_bound(1, 0.5) == pytest.approx(6.5061, abs=1e-3)
    assert cover_cardinality_bound(2, 0.5) == pytest.approx(75.03, abs=0.01)


@pytest.mark.parametrize("d,deltas", [
    (1, [1.0, 0.5, 0.2, 0.1, 0.05]),
    (2, [1.0, 0.5, 0.2, 0.1, 0.05]),
    (3, [1.0, 0.5, 0.2, 0.1, 0.05]),
    (4, [1.0, 0.5, 0.2]),
    (5, [1.0, 0.5]),
])
def test_grid_cover_smaller_than_bound(d, deltas):
    for delta in deltas:
        assert cover_size_report(d, delta)["within_bound"]


def test_grid_cover_exceeds_bound_for_fine_delta_in_high_dimension():
    # reported rather than relied upon
    assert not cover_size_report(5, 0.1)["within_bound"]
