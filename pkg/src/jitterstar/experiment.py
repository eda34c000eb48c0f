"""Replicated estimates of expected star discrepancy and sampler comparison.

Stream layout: replication ``k`` of the arm at position ``offset`` uses
``derive_stream(master_seed, k * STRIDE + offset)`` with ``STRIDE = 2``.
By default ``simple`` takes offset 0 and ``jittered`` offset 1; a
``[simple, simple]`` diagnostic run uses the list position instead.
Samples are stored by replication index, so thread scheduling never
changes the output.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .analysis import simple_count_variance, stratified_count_variance
from .discrepancy import DEFAULT_MAX_WORK, star_discrepancy
from .errors import DomainError, ResourceGuardError
from .geometry import AnchoredBox, GridPartition
from .samplers import RandomStream, derive_stream, jittered, jittered_points, simple_random

STRIDE = 2
SAMPLERS = ("simple", "jittered")
KIND_OFFSET = {"simple": 0, "jittered": 1}
METHODS = ("auto", "exact", "cover")


@dataclass
class RunConfig:
    d: int
    m: int
    samplers: list = field(default_factory=lambda: ["simple", "jittered"])
    replications: int = 2000
    master_seed: int = 0
    method: str = "auto"
    delta: Optional[float] = None
    confidence: float = 0.99
    max_work: int = DEFAULT_MAX_WORK

    def __post_init__(self):
        for name in ("d", "m", "replications", "master_seed", "max_work"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise DomainError(f"{name} must be an integer, got {value!r}")
            setattr(self, name, int(value))
        GridPartition(self.d, self.m)
        if self.replications < 2:
            raise DomainError(f"replications must be >= 2, got {self.replications}")
        self.samplers = list(self.samplers)
        if not self.samplers or any(s not in SAMPLERS for s in self.samplers):
            raise DomainError(f"samplers must be a non-empty subset of {SAMPLERS}, got {self.samplers}")
        if len(self.samplers) > 2:
            raise DomainError("at most two samplers per run")
        if not (0.0 < self.confidence < 1.0):
            raise DomainError(f"confidence must lie in (0, 1), got {self.confidence}")
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.delta is not None and not (0.0 < self.delta <= 1.0):
            raise DomainError(f"delta must lie in (0, 1], got {self.delta}")
        if self.method == "exact" and self.N ** self.d > self.max_work:
            raise ResourceGuardError(
                f"exact method needs N^d = {self.N ** self.d} > {self.max_work}; use method 'cover'"
            )

    @property
    def N(self) -> int:
        return self.m ** self.d

    @property
    def partition(self) -> GridPartition:
        return GridPartition(self.d, self.m)

    def resolved_method(self):
        """``(method, delta)`` actually used; ``auto`` picks exact when affordable, else ``delta = 1/N``."""
        if self.method == "exact":
            return "exact", None
        if self.method == "cover":
            return "cover", self.delta if self.delta is not None else 1.0 / self.N
        if self.N ** self.d <= self.max_work:
            return "exact", None
        return "cover", 1.0 / self.N

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        missing = {"d", "m"} - set(data)
        if missing:
            raise DomainError(f"missing config keys: {sorted(missing)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SamplerSummary:
    samples: np.ndarray
    mean: float
    std: float
    se: float

    @classmethod
    def from_samples(cls, samples) -> "SamplerSummary":
        s = np.asarray(samples, dtype=float)
        std = float(np.std(s, ddof=1)) if s.size > 1 else 0.0
        return cls(s, float(np.mean(s)), std, std / math.sqrt(s.size))

    def to_dict(self) -> dict:
        return {"n": int(self.samples.size), "mean": self.mean, "std": self.std, "se": self.se}


def _one_replication(config: RunConfig, sampler: str, stream_id: int, method, delta) -> float:
    stream = derive_stream(config.master_seed, stream_id)
    if sampler == "simple":
        pts = simple_random(config.N, config.d, stream)
    else:
        pts = jittered(config.partition, stream)
    return star_discrepancy(pts, method=method, delta=delta, max_work=config.max_work).value


def estimate_expected_discrepancy(config: RunConfig, sampler: str, offset: Optional[int] = None,
                                  threads: int = 1) -> SamplerSummary:
    """Monte Carlo estimate of ``E[D*]`` for one sampler over ``config.replications`` runs."""
    if sampler not in SAMPLERS:
        raise DomainError(f"unknown sampler {sampler!r}")
    if offset is None:
        offset = KIND_OFFSET[sampler]
    if not 0 <= offset < STRIDE:
        raise DomainError(f"offset must lie in [0, {STRIDE}), got {offset}")
    method, delta = config.resolved_method()
    R = config.replications
    out = np.empty(R, dtype=float)

    def work(ks):
        for k in ks:
            out[k] = _one_replication(config, sampler, k * STRIDE + offset, method, delta)

    threads = max(1, int(threads))
    if threads == 1:
        work(range(R))
    else:
        chunks = [range(i, R, threads) for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    return SamplerSummary.from_samples(out)


def tail_integral_expectation(samples) -> float:
    """``∫_0^1 P(D >= t) dt`` for the empirical distribution of ``samples``.

    The empirical survival function is a step function, so the integral is
    a finite sum over the sorted samples; it equals the sample mean.
    """
    s = np.sort(np.asarray(samples, dtype=float).reshape(-1))
    if s.size == 0:
        raise DomainError("need at least one sample")
    if s[0] < 0.0 or s[-1] > 1.0:
        raise DomainError("samples must lie in [0, 1]")
    n = s.size
    widths = np.diff(np.concatenate(([0.0], s)))
    # on (s[i-1], s[i]] exactly n - i samples are >= t
    survivors = (n - np.arange(n)) / n
    return float(np.sum(widths * survivors))


def welch_difference(a, b, confidence: float) -> dict:
    """Welch two-sample summary for ``mean(a) - mean(b)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = a.size, b.size
    va, vb = np.var(a, ddof=1), np.var(b, ddof=1)
    diff = float(np.mean(a) - np.mean(b))
    se = math.sqrt(va / na + vb / nb)
    if se == 0.0:
        return {"mean_difference": diff, "se": 0.0, "df": float("inf"), "ci_low": diff, "ci_high": diff,
                "confidence": confidence, "t_statistic": math.copysign(math.inf, diff) if diff else 0.0,
                "p_value": 0.0 if diff else 1.0}
    df = se ** 4 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    crit = float(stats.t.ppf(0.5 + confidence / 2.0, df))
    t_stat = diff / se
    return {
        "mean_difference": diff,
        "se": se,
        "df": float(df),
        "ci_low": diff - crit * se,
        "ci_high": diff + crit * se,
        "confidence": confidence,
        "t_statistic": t_stat,
        "p_value": float(2.0 * stats.t.sf(abs(t_stat), df)),
    }


def _arm_labels(samplers):
    if len(samplers) == 2 and samplers[0] == samplers[1]:
        return [samplers[0], samplers[1] + "_b"]
    return list(samplers)


def _arm_offsets(samplers):
    if len(set(samplers)) == len(samplers):
        return [KIND_OFFSET[s] for s in samplers]
    return list(range(len(samplers)))


@dataclass
class ExperimentResult:
    config: RunConfig
    arms: dict
    difference: Optional[dict]
    runtime_seconds: float

    @property
    def verdict(self) -> str:
        if self.difference is None:
            return "not_applicable"
        return "confirmed" if self.difference["ci_low"] > 0.0 else "inconclusive"

    def rows(self):
        for label, summary in self.arms.items():
            for k, value in enumerate(summary.samples):
                yield k, label, float(value)

    def summary(self) -> dict:
        method, delta = self.config.resolved_method()
        out = {
            "samplers": {label: s.to_dict() for label, s in self.arms.items()},
            "tail_integral": {label: tail_integral_expectation(s.samples) for label, s in self.arms.items()},
            "method": method,
            "difference": self.difference,
            "verdict": self.verdict,
            "config": self.config.to_dict(),
            "runtime_seconds": self.runtime_seconds,
        }
        if self.difference is not None:
            out["ci"] = [self.difference["ci_low"], self.difference["ci_high"]]
            out["p_value"] = self.difference["p_value"]
        if delta is not None:
            out["delta"] = delta
        return out


def run_experiment(config: RunConfig, threads: int = 1) -> ExperimentResult:
    """Estimate every configured arm; compare them when there are two."""
    start = time.perf_counter()
    arms = {}
    for label, sampler, offset in zip(_arm_labels(config.samplers), config.samplers, _arm_offsets(config.samplers)):
        arms[label] = estimate_expected_discrepancy(config, sampler, offset=offset, threads=threads)
    difference = None
    if len(arms) == 2:
        first, second = arms.values()
        difference = welch_difference(first.samples, second.samples, config.confidence)
    return ExperimentResult(config, arms, difference, time.perf_counter() - start)


def compare_samplers(config: RunConfig, threads: int = 1) -> ExperimentResult:
    """Two-arm run; the difference is ``mean(first arm) - mean(second arm)``.

    With the default ``[simple, jittered]`` order a ``confirmed`` verdict means
    the CI for ``E[D*(simple)] - E[D*(jittered)]`` lies above zero.
    """
    if len(config.samplers) != 2:
        raise DomainError("compare_samplers needs exactly two samplers")
    return run_experiment(config, threads=threads)


def sample_counts(partition: GridPartition, box, sampler: str, replications: int,
                  stream: RandomStream, batch: int = 10000) -> np.ndarray:
    """Number of points in ``[0, x)`` for ``replications`` independent point sets."""
    box = box if isinstance(box, AnchoredBox) else AnchoredBox(box)
    n, d = partition.N, partition.d
    counts = np.empty(replications, dtype=np.int64)
    done = 0
    while done < replications:
        b = min(batch, replications - done)
        u = stream.uniform((b, n, d))
        if sampler == "jittered":
            pts = jittered_points(partition, u)
        elif sampler == "simple":
            pts = u
        else:
            raise DomainError(f"unknown sampler {sampler!r}")
        counts[done:done + b] = np.all(pts < box.corner, axis=2).sum(axis=1)
        done += b
    return counts


def variance_standard_error(x) -> float:
    """Large-sample standard error of the unbiased sample variance."""
    x = np.asarray(x, dtype=float)
    n = x.size
    c = x - x.mean()
    s2 = np.sum(c * c) / (n - 1)
    m4 = np.mean(c ** 4)
    return float(math.sqrt(max(m4 - s2 * s2 * (n - 3) / (n - 1), 0.0) / n))


def count_variance_check(partition: GridPartition, box, sampler: str, replications: int,
                         stream: RandomStream) -> dict:
    """Empirical count variance against the closed-form value for one sampler."""
    counts = sample_counts(partition, box, sampler, replications, stream)
    if sampler == "jittered":
        analytic = stratified_count_variance(partition, box)
    else:
        analytic = simple_count_variance(partition.N, box)
    empirical = float(np.var(counts, ddof=1))
    se = variance_standard_error(counts)
    return {"sampler": sampler, "analytic": analytic, "empirical": empirical, "se": se,
            "z": (empirical - analytic) / se if se > 0 else 0.0}
