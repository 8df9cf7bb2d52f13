"""Reproducible Monte Carlo estimation of expected zero counts.

Trial i draws its coefficients from a Philox stream keyed by
``mix64(base_seed, i)``, so the set of draws is a pure function of the
configuration: distributing trials over worker processes cannot change any
count, and the statistics are folded in trial-index order, making reports
bit-identical for 1 or many workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import FactorUnavailable, InvalidConfig
from .kacrice import QuadratureConfig, expected_zeros_numeric
from .kernels import asymptotic_expected_zeros
from .polyeval import series_from_coeffs
from .rootcount import count_zeros, count_zeros_factored
from .schemes import SchemeSpec, effective_basis, mix64, sample


@dataclass
class ExperimentConfig:
    spec: SchemeSpec
    trials: int
    base_seed: int
    points_per_degree: int = 32
    use_factored_counting: bool = True

    def __post_init__(self):
        if self.trials < 2:
            raise InvalidConfig(f"need at least 2 trials for a variance, got {self.trials}")
        if self.points_per_degree < 1:
            raise InvalidConfig(f"points_per_degree must be >= 1, got {self.points_per_degree}")
        if self.spec.sigma == 0.0:
            raise InvalidConfig("sigma = 0 draws the zero polynomial; zero counts are undefined")


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    mean: float
    stddev: float
    stderr: float
    ci95: tuple
    kacrice_value: float
    asymptotic_value: float
    verdict_kacrice: bool
    verdict_ratio: float
    counting: str  # "factored" | "direct"


@dataclass
class RatioFit:
    """Least-squares slope of mean ~ c*n through the origin, plus per-n ratios."""

    slope: float
    n_values: list
    ratios: list


def _counting_mode(cfg: ExperimentConfig) -> str:
    if not cfg.use_factored_counting:
        return "direct"
    try:
        effective_basis(cfg.spec, factored=True)
        return "factored"
    except FactorUnavailable:
        return "direct"


def _count_range(cfg: ExperimentConfig, mode: str, lo: int, hi: int) -> list:
    spec = cfg.spec
    key = ("mc", spec.variant, spec.ell, spec.n, spec.trig, cfg.points_per_degree, mode)
    out = []
    for i in range(lo, hi):
        coeffs = sample(spec, mix64(cfg.base_seed, i))
        if mode == "factored":
            res = count_zeros_factored(spec, coeffs, cfg.points_per_degree)
        else:
            res = count_zeros(coeffs, cfg.points_per_degree, cache_key=key)
        out.append(res.count)
    return out


def trial_counts(cfg: ExperimentConfig, workers: int = 1) -> np.ndarray:
    """Per-trial zero counts in trial-index order (worker-count independent)."""
    mode = _counting_mode(cfg)
    if workers <= 1:
        counts = _count_range(cfg, mode, 0, cfg.trials)
    else:
        chunk = -(-cfg.trials // workers)
        ranges = [(lo, min(lo + chunk, cfg.trials)) for lo in range(0, cfg.trials, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_count_range_star, [(cfg, mode, lo, hi) for lo, hi in ranges]))
        counts = [c for part in parts for c in part]
    return np.asarray(counts, dtype=float)


def _count_range_star(args):
    return _count_range(*args)


def run_experiment(
    cfg: ExperimentConfig,
    workers: int = 1,
    quad: Optional[QuadratureConfig] = None,
) -> ExperimentReport:
    """Monte Carlo mean with stderr, quadrature value and agreement verdicts."""
    counts = trial_counts(cfg, workers=workers)
    mean = float(counts.mean())
    stddev = float(counts.std(ddof=1))
    stderr = stddev / math.sqrt(cfg.trials)
    kr = expected_zeros_numeric(cfg.spec, quad).expected_zeros
    asym = asymptotic_expected_zeros(cfg.spec)
    return ExperimentReport(
        config=cfg,
        mean=mean,
        stddev=stddev,
        stderr=stderr,
        ci95=(mean - 1.96 * stderr, mean + 1.96 * stderr),
        kacrice_value=kr,
        asymptotic_value=asym,
        verdict_kacrice=bool(abs(mean - kr) <= 3.0 * stderr),
        verdict_ratio=mean / cfg.spec.n,
        counting=_counting_mode(cfg),
    )


def sweep(
    spec_template: SchemeSpec,
    n_values: Sequence[int],
    trials: int,
    base_seed: int,
    points_per_degree: int = 32,
    use_factored_counting: bool = True,
    workers: int = 1,
    quad: Optional[QuadratureConfig] = None,
) -> tuple[list, RatioFit]:
    """Run one experiment per degree and fit mean ~ c*n through the origin."""
    n_values = list(n_values)
    if len(n_values) < 1 or any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise InvalidConfig(f"n values must be strictly increasing, got {n_values}")
    reports = []
    for n in n_values:
        cfg = ExperimentConfig(
            spec=replace(spec_template, n=n),
            trials=trials,
            base_seed=base_seed,
            points_per_degree=points_per_degree,
            use_factored_counting=use_factored_counting,
        )
        reports.append(run_experiment(cfg, workers=workers, quad=quad))
    ns = np.asarray(n_values, dtype=float)
    means = np.asarray([r.mean for r in reports])
    slope = float((ns * means).sum() / (ns * ns).sum())
    fit = RatioFit(slope=slope, n_values=n_values, ratios=[r.verdict_ratio for r in reports])
    return reports, fit


def small_interval_check(
    spec: SchemeSpec,
    a: float,
    trials: int,
    base_seed: int = 0,
    points_per_degree: int = 32,
) -> float:
    """MC estimate of E[zero count on (0, n^-a)] divided by n^(1-a).

    The ratio stays bounded in n for every Gaussian coefficient scheme,
    dependent ones included; sweeping n and watching the ratio is the
    statistical check of that smallness property.
    """
    if trials < 100:
        raise InvalidConfig(f"need >= 100 trials for a stable small-interval mean, got {trials}")
    if not (0.0 < a < 0.5):
        raise ValueError(f"need a in (0, 1/2), got {a}")
    if spec.sigma == 0.0:
        raise InvalidConfig("sigma = 0 draws the zero polynomial")
    n = spec.n
    length = n ** (-a)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    step = 2.0 * math.pi / (points_per_degree * (n + 1))
    npts = max(32, int(length / step) + 1)
    h = length / npts
    xs = np.concatenate(([0.0], (np.arange(npts) + golden) * h, [length]))
    total = 0
    for i in range(trials):
        series = series_from_coeffs(sample(spec, mix64(base_seed, i)))
        vals = series.values(xs)
        signs = np.sign(vals)
        signs[signs == 0] = 1.0
        total += int(np.count_nonzero(signs[:-1] * signs[1:] < 0))
    return (total / trials) / n ** (1.0 - a)
