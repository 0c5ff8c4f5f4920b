"""Monte Carlo experiment runner, bootstrap stability evaluation and a
runtime benchmark.

Replications are embarrassingly parallel: replication ``r`` of a plan with
seed ``s`` always runs on the substream ``s XOR r`` and BLAS pools are pinned
to one thread inside replication work, so the recorded distances are bitwise
identical whatever the worker count.  The worker count itself defaults to
the ``SDRKIT_THREADS`` environment variable (0 or unset means all cores).
"""

from __future__ import annotations

import ctypes
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import InvalidSpec, SdrkitError, SingularCovariance, TooFewSamples
from .estimators import (
    DataSet,
    MethodSpec,
    candidate_matrix,
    center,
    estimate_subspace,
    subspace_from_candidate,
)
from .linalg import spd_inv_sqrt, subspace_distance, trace_correlation
from .simgen import SimSpec, generate, replication_spec

_worker_blas_limiter = None


def _tune_allocator() -> None:
    """Stop glibc from returning every large temporary to the kernel.

    The pairwise matrices exceed the default mmap threshold, so each
    estimator call would otherwise pay a page-fault storm that dwarfs the
    arithmetic.  No-op off glibc.
    """
    try:
        libc = ctypes.CDLL("libc.so.6")
        libc.mallopt(-3, 1 << 30)  # M_MMAP_THRESHOLD
        libc.mallopt(-1, 1 << 30)  # M_TRIM_THRESHOLD
    except (OSError, AttributeError):
        pass


def _pin_worker_blas() -> None:
    """Pool initializer: keep BLAS single-threaded inside worker processes."""
    global _worker_blas_limiter
    _worker_blas_limiter = threadpool_limits(limits=1)
    _tune_allocator()


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count from an explicit argument or the SDRKIT_THREADS variable."""
    if workers is None:
        raw = os.environ.get("SDRKIT_THREADS", "0")
        try:
            workers = int(raw)
        except ValueError:
            raise InvalidSpec(f"SDRKIT_THREADS must be an integer, got {raw!r}")
    if workers < 0:
        raise InvalidSpec("worker count must be nonnegative")
    return workers if workers > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class ExperimentPlan:
    """A simulation template, the methods to run on it, and the rep count."""

    sim: SimSpec
    methods: tuple[MethodSpec, ...]
    replications: int = 500
    d: Optional[int] = None

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise InvalidSpec("replications must be at least 1")
        if not self.methods:
            raise InvalidSpec("at least one method is required")
        object.__setattr__(self, "methods", tuple(self.methods))

    @property
    def dimension(self) -> int:
        return self.d if self.d is not None else self.sim.d


@dataclass
class MethodOutcome:
    """Replication-level results for one method."""

    label: str
    distances: np.ndarray  # NaN where the replication failed
    runtimes: np.ndarray
    failures: int

    def _ok(self) -> np.ndarray:
        return self.distances[np.isfinite(self.distances)]

    @property
    def mean_dist(self) -> float:
        ok = self._ok()
        return float(ok.mean()) if ok.size else float("nan")

    @property
    def sd_dist(self) -> float:
        ok = self._ok()
        if ok.size < 2:
            return 0.0
        return float(ok.std(ddof=1))

    @property
    def mean_runtime(self) -> float:
        ok = self.runtimes[np.isfinite(self.runtimes)]
        return float(ok.mean()) if ok.size else float("nan")


@dataclass
class SimResult:
    """Aggregated Monte Carlo output, keyed by method label."""

    plan: ExperimentPlan
    n: int
    p: int
    outcomes: dict[str, MethodOutcome] = field(default_factory=dict)


def _run_replication(plan: ExperimentPlan, r: int) -> list[tuple[float, float]]:
    """One replication: distances and runtimes per method, NaN on failure."""
    sample = generate(replication_spec(plan.sim, r))
    out = []
    for spec in plan.methods:
        start = time.perf_counter()
        try:
            est = estimate_subspace(sample.data, spec, plan.dimension)
            dist = subspace_distance(est.basis, sample.truth)
        except SdrkitError:
            out.append((float("nan"), float("nan")))
            continue
        out.append((dist, time.perf_counter() - start))
    return out


def run_monte_carlo(plan: ExperimentPlan, workers: Optional[int] = None) -> SimResult:
    """Run every method over all replications and aggregate distances.

    A replication that raises for some method is excluded from that method's
    mean/SD and counted in ``failures``.  Results do not depend on the
    worker count.
    """
    n_workers = resolve_workers(workers)
    reps = plan.replications
    task = partial(_run_replication, plan)
    if n_workers == 1 or reps == 1:
        _tune_allocator()
        with threadpool_limits(limits=1):
            rows = [task(r) for r in range(reps)]
    else:
        chunk = max(1, reps // (n_workers * 8))
        with ProcessPoolExecutor(
            max_workers=n_workers, initializer=_pin_worker_blas
        ) as pool:
            rows = list(pool.map(task, range(reps), chunksize=chunk))

    probe = generate(replication_spec(plan.sim, 0))
    result = SimResult(plan, n=plan.sim.n, p=probe.data.p)
    for j, spec in enumerate(plan.methods):
        dists = np.array([rows[r][j][0] for r in range(reps)])
        times = np.array([rows[r][j][1] for r in range(reps)])
        failures = int(np.count_nonzero(~np.isfinite(dists)))
        result.outcomes[spec.label] = MethodOutcome(spec.label, dists, times, failures)
    return result


@dataclass
class BootstrapMethodReport:
    """Stability summary for one method over ``B`` bootstrap resamples."""

    label: str
    distances: np.ndarray
    one_minus_r: np.ndarray
    failures: int

    @property
    def mean_dist(self) -> float:
        ok = self.distances[np.isfinite(self.distances)]
        return float(ok.mean()) if ok.size else float("nan")

    @property
    def sd_dist(self) -> float:
        ok = self.distances[np.isfinite(self.distances)]
        return float(ok.std(ddof=1)) if ok.size > 1 else 0.0

    @property
    def mse_dist(self) -> float:
        ok = self.distances[np.isfinite(self.distances)]
        return float(np.mean(ok**2)) if ok.size else float("nan")

    @property
    def median_one_minus_r(self) -> float:
        ok = self.one_minus_r[np.isfinite(self.one_minus_r)]
        return float(np.median(ok)) if ok.size else float("nan")

    @property
    def sd_one_minus_r(self) -> float:
        ok = self.one_minus_r[np.isfinite(self.one_minus_r)]
        return float(ok.std(ddof=1)) if ok.size > 1 else 0.0


@dataclass
class BootstrapReport:
    """Full bootstrap output: one report per method plus the full-data bases."""

    B: int
    n: int
    p: int
    d: int
    methods: dict[str, BootstrapMethodReport]
    full_bases: dict[str, np.ndarray]


Resampler = Callable[[int, np.random.Generator, int], np.ndarray]


def _default_resampler(b: int, rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, n, size=n)


def bootstrap_eval(
    data: DataSet,
    methods: Sequence[MethodSpec],
    d: int,
    B: int,
    seed: int = 0,
    resampler: Optional[Resampler] = None,
) -> BootstrapReport:
    """Compare full-data subspace estimates against ``B`` bootstrap resamples.

    For each resample ``b`` (drawn on substream ``seed XOR b``) and each
    method, records the projection distance between the full-data estimate
    and the resample estimate, plus one minus their trace correlation.  A
    resample with singular predictor covariance is redrawn up to 10 times
    before being counted as failed.
    """
    if B < 1:
        raise InvalidSpec("B must be at least 1")
    if data.n < max(10, data.p + 2):
        raise TooFewSamples(
            f"bootstrap needs at least max(10, p+2) = {max(10, data.p + 2)} rows"
        )
    draw = resampler if resampler is not None else _default_resampler

    full = {
        spec.label: estimate_subspace(data, spec, d).basis for spec in methods
    }
    dists = {spec.label: np.full(B, np.nan) for spec in methods}
    one_minus = {spec.label: np.full(B, np.nan) for spec in methods}
    failures = {spec.label: 0 for spec in methods}

    _tune_allocator()
    with threadpool_limits(limits=1):
        for b in range(B):
            rng = np.random.Generator(np.random.Philox(key=seed ^ b))
            idx = None
            for _ in range(11):
                candidate = np.asarray(draw(b, rng, data.n))
                try:
                    spd_inv_sqrt(center(data.X[candidate]).cov)
                except SingularCovariance:
                    continue
                idx = candidate
                break
            if idx is None:
                for spec in methods:
                    failures[spec.label] += 1
                continue
            boot = DataSet(data.X[idx], data.Y[idx])
            for spec in methods:
                try:
                    est = estimate_subspace(boot, spec, d)
                except SdrkitError:
                    failures[spec.label] += 1
                    continue
                dists[spec.label][b] = subspace_distance(full[spec.label], est.basis)
                one_minus[spec.label][b] = 1.0 - trace_correlation(
                    full[spec.label], est.basis
                )

    reports = {
        spec.label: BootstrapMethodReport(
            spec.label, dists[spec.label], one_minus[spec.label], failures[spec.label]
        )
        for spec in methods
    }
    return BootstrapReport(B, data.n, data.p, d, reports, full)


@dataclass
class BenchRow:
    label: str
    n: int
    seconds_estimator: float  # candidate-matrix construction only
    seconds_total: float  # construction plus whitening/eigen extraction


@dataclass
class BenchResult:
    rows: list[BenchRow]
    slopes: dict[str, float]  # log-log slope of the estimator-only timings


def runtime_bench(plan: ExperimentPlan, sizes: Sequence[int]) -> BenchResult:
    """Average wall-clock time of each method across sample sizes.

    Times the candidate-matrix call on its own (the headline number) and the
    full estimate including subspace extraction, averaged over the plan's
    replications, then fits a log-log slope per method over ``sizes``.
    """
    sizes = list(sizes)
    if sorted(sizes) != sizes:
        raise InvalidSpec("sizes must be ascending")
    rows: list[BenchRow] = []
    per_method: dict[str, list[float]] = {spec.label: [] for spec in plan.methods}
    _tune_allocator()
    with threadpool_limits(limits=1):
        for n in sizes:
            base = SimSpec(
                plan.sim.example, n, plan.sim.error, plan.sim.seed,
                plan.sim.mix_wide_variance,
            )
            samples = [
                generate(replication_spec(base, r)) for r in range(plan.replications)
            ]
            for spec in plan.methods:
                candidate_matrix(samples[0].data, spec)  # warm up
                build = 0.0
                total = 0.0
                for sample in samples:
                    t0 = time.perf_counter()
                    lam = candidate_matrix(sample.data, spec)
                    t1 = time.perf_counter()
                    subspace_from_candidate(sample.data, lam, plan.dimension)
                    t2 = time.perf_counter()
                    build += t1 - t0
                    total += t2 - t0
                build /= plan.replications
                total /= plan.replications
                rows.append(BenchRow(spec.label, n, build, total))
                per_method[spec.label].append(max(build, 1e-9))
    slopes = {
        label: float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
        if len(sizes) > 1
        else float("nan")
        for label, times in per_method.items()
    }
    return BenchResult(rows, slopes)
