"""Count variances under stratified and simple sampling, and tail-bound formulas.

Everything here is a closed-form evaluator. Probability bounds are returned
as computed, so values above 1 (vacuous bounds) are not clamped; the
``log_*`` variants stay finite when the bound underflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import AnchoredBox, GridPartition, intersection_volumes

LN_2E = math.log(2.0 * math.e)


@dataclass(frozen=True)
class VarianceComparison:
    var_stratified: float
    var_simple: float

    @property
    def gap(self) -> float:
        return self.var_simple - self.var_stratified

    def to_dict(self) -> dict:
        return {"var_stratified": self.var_stratified, "var_simple": self.var_simple, "gap": self.gap}


def _box(box) -> AnchoredBox:
    return box if isinstance(box, AnchoredBox) else AnchoredBox(box)


def cell_hit_probabilities(partition: GridPartition, box) -> np.ndarray:
    """``p_i = N * vol(cell_i ∩ box)``: chance that the point of cell ``i`` lands in the box.

    Built from per-axis fractions ``clip(x_j m - k_j, 0, 1)`` so that fully
    covered cells get exactly 1.
    """
    box = _box(box)
    if box.d != partition.d:
        raise DomainError(f"box has dimension {box.d}, partition has {partition.d}")
    k = np.arange(partition.m, dtype=float)
    frac = np.clip(box.corner[:, None] * partition.m - k[None, :], 0.0, 1.0)
    p = frac[0]
    for axis in frac[1:]:
        p = np.multiply.outer(p, axis)
    return np.asarray(p, dtype=float).reshape(-1)


def stratified_count_variance(partition: GridPartition, box) -> float:
    """Variance of the number of jittered points inside ``box``: ``sum_i p_i (1 - p_i)``."""
    p = cell_hit_probabilities(partition, box)
    return float(np.sum(p * (1.0 - p)))


def stratified_count_variance_expanded(partition: GridPartition, box) -> float:
    """Same quantity in the form ``N vol(R) - N^2 sum_i vol(cell_i ∩ R)^2``."""
    box = _box(box)
    v = intersection_volumes(partition, box)
    n = partition.N
    return float(n * box.volume - n * n * np.sum(v * v))


def simple_count_variance(N: int, box) -> float:
    """Binomial variance ``N vol(R) (1 - vol(R))`` of the count of i.i.d. uniform points."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be an integer >= 1, got {N}")
    v = _box(box).volume
    return float(N * v * (1.0 - v))


def variance_comparison(partition: GridPartition, box) -> VarianceComparison:
    box = _box(box)
    return VarianceComparison(
        var_stratified=stratified_count_variance(partition, box),
        var_simple=simple_count_variance(partition.N, box),
    )


def variance_gap_closed_form(partition: GridPartition, box) -> float:
    """``N^2 (sum_i vol_i^2 - vol(R)^2 / N)``; non-negative by Cauchy-Schwarz."""
    box = _box(box)
    v = intersection_volumes(partition, box)
    n = partition.N
    return float(n * n * (np.sum(v * v) - box.volume ** 2 / n))


def _check_nonneg(**kwargs):
    for name, value in kwargs.items():
        if not value >= 0.0:
            raise DomainError(f"{name} must be >= 0, got {value}")


def bernstein_tail_bound(sigma_sq_sum: float, C: float, lam: float) -> float:
    """Bernstein bound ``2 exp(-lam^2 / (2 Sigma^2 + 2 C lam / 3))`` on ``P(|S| >= lam)``."""
    _check_nonneg(sigma_sq_sum=sigma_sq_sum, lam=lam)
    if not C > 0.0:
        raise DomainError(f"C must be > 0, got {C}")
    if lam == 0.0:
        return 2.0
    return 2.0 * math.exp(-lam * lam / (2.0 * sigma_sq_sum + 2.0 * C * lam / 3.0))


def _check_dn(d, N):
    if int(d) != d or d < 1:
        raise DomainError(f"d must be an integer >= 1, got {d}")
    if int(N) != N or N < 1:
        raise DomainError(f"N must be an integer >= 1, got {N}")


def log_union_tail_bound(d: int, N: int, sigma_sq_sum: float, lam: float) -> float:
    """Natural log of :func:`union_tail_bound`."""
    _check_dn(d, N)
    _check_nonneg(sigma_sq_sum=sigma_sq_sum, lam=lam)
    log_prefactor = d * LN_2E - 0.5 * math.log(2.0 * math.pi * d) + d * math.log(N + 1.0)
    if lam == 0.0:
        return log_prefactor
    return log_prefactor - lam * lam / (2.0 * sigma_sq_sum + 2.0 * lam / 3.0)


def union_tail_bound(d: int, N: int, sigma_sq_sum: float, lam: float) -> float:
    """``(2e)^d (N+1)^d / sqrt(2 pi d) * exp(-lam^2 / (2 Sigma^2 + 2 lam / 3))``.

    Union of the Bernstein bound (with ``C = 1``, indicator summands) over a
    ``1/N``-cover. Underflows to 0.0 for large ``lam``; use
    :func:`log_union_tail_bound` there.
    """
    return math.exp(log_union_tail_bound(d, N, sigma_sq_sum, lam))


def _base_exponent(d: int, N: int) -> float:
    return d * LN_2E + d * math.log(N + 1.0) - 0.5 * math.log(2.0 * math.pi * d)


def bound_exponent_A(d: int, q: float, N: int) -> float:
    """``A(d, q, N) = d ln(2e) + d ln(N+1) - ln(2 pi d)/2 - ln(1 - q)``."""
    _check_dn(d, N)
    if not (0.0 <= q < 1.0):
        raise DomainError(f"q must lie in [0, 1), got {q}")
    return _base_exponent(d, N) - math.log1p(-q)


def _check_q_open(q):
    if not (0.0 < q < 1.0):
        raise DomainError(f"q must lie in (0, 1), got {q}")


def high_prob_discrepancy_bound(d: int, q: float, N: int, sigma0: float) -> float:
    """``(sqrt(2) sigma0 + 1) A(d, q, N) / N``, holding with probability at least ``q``."""
    _check_q_open(q)
    _check_nonneg(sigma0=sigma0)
    return (math.sqrt(2.0) * sigma0 + 1.0) * bound_exponent_A(d, q, N) / N


def high_prob_discrepancy_bound_sharp(d: int, q: float, N: int, sigma0: float) -> float:
    """Form before simplification: ``sqrt(2 sigma0^2 A + A^2/9)/N + (A + 3)/(3N)``.

    Never larger than :func:`high_prob_discrepancy_bound` once ``A >= 3``.
    """
    _check_q_open(q)
    _check_nonneg(sigma0=sigma0)
    a = bound_exponent_A(d, q, N)
    return math.sqrt(2.0 * sigma0 * sigma0 * a + a * a / 9.0) / N + (a + 3.0) / (3.0 * N)


def bound_constants(d: int, N: int, sigma0: float):
    """``(C0, C1)`` with ``C0 = (sqrt(2) sigma0 + 1)/N`` and ``C1 = C0 * A(d, 0, N)``.

    The high-probability bound at level ``q`` equals ``C1 - C0 ln(1 - q)``.
    """
    _check_dn(d, N)
    _check_nonneg(sigma0=sigma0)
    c0 = (math.sqrt(2.0) * sigma0 + 1.0) / N
    c1 = c0 * _base_exponent(d, N)
    return c0, c1


def bounds_report(d: int, N: int, q: float, sigma0: float) -> dict:
    c0, c1 = bound_constants(d, N, sigma0)
    return {
        "d": d, "N": N, "q": q, "sigma0": sigma0,
        "A": bound_exponent_A(d, q, N),
        "bound": high_prob_discrepancy_bound(d, q, N, sigma0),
        "bound_sharp": high_prob_discrepancy_bound_sharp(d, q, N, sigma0),
        "C0": c0, "C1": c1,
    }
