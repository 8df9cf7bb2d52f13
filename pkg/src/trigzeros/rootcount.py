"""Zero counting on (0, 2*pi) by dense sign scan with local refinement.

The scan grid has ``points_per_degree`` nodes per polynomial degree, offset
from 0 by a golden-ratio fraction of the step so the deterministic zeros of
structured schemes (rational multiples of pi) never land on a node.  Cells
without a sign change whose endpoint values are suspiciously small get an
extremum probe (bisection on the derivative) to catch double crossings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateInput, NotBracketed
from .polyeval import TWO_PI, TrigSeries, series_from_basis, series_from_coeffs, wave_tables
from .schemes import (
    CoefficientVector,
    SchemeSpec,
    det_factor_zero_count,
    effective_basis,
    free_values,
)

GOLDEN_FRAC = (math.sqrt(5.0) - 1.0) / 2.0
NEAR_ZERO_FRAC = 1e-8     # endpoint |V| threshold (relative to grid max) for probing
BISECT_WIDTH = 1e-12
_TABLE_CACHE: dict = {}
_TABLE_CACHE_MAX = 6
_TABLE_MAX_ENTRIES = 40_000_000  # ~320 MB of float64


@dataclass
class ZeroCountResult:
    count: int
    zeros: Optional[list] = None
    suspicious_cells: int = 0


def scan_grid(degree: int, points_per_degree: int) -> tuple[np.ndarray, float]:
    """Interior scan nodes (t + golden)*h, t = 0..P-1, with P = ppd*(degree+1)."""
    P = points_per_degree * (degree + 1)
    h = TWO_PI / P
    return (np.arange(P) + GOLDEN_FRAC) * h, h


def _grid_values(series: TrigSeries, nodes: np.ndarray, cache_key=None) -> np.ndarray:
    """Series values on the scan nodes, via a cached wave table when affordable."""
    K = series.order
    need_sin = series.sin_coef is not None
    if cache_key is None or (K + 1) * nodes.size > _TABLE_MAX_ENTRIES:
        return series.values(nodes)
    key = (cache_key, K, series.denom, need_sin)
    tabs = _TABLE_CACHE.get(key)
    if tabs is None:
        cos_t, sin_t = wave_tables(K, nodes / series.denom)
        tabs = (cos_t, sin_t if need_sin else None)
        if len(_TABLE_CACHE) >= _TABLE_CACHE_MAX:
            _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
        _TABLE_CACHE[key] = tabs
    vals = series.cos_coef @ tabs[0]
    if need_sin:
        vals = vals + series.sin_coef @ tabs[1]
    return vals


def _bisect_to_root(series: TrigSeries, lo: float, hi: float) -> float:
    f_lo = series.value(lo)
    f_hi = series.value(hi)
    if f_lo * f_hi >= 0.0:
        raise NotBracketed(f"no sign change on [{lo}, {hi}]")
    while hi - lo > BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        f_mid = series.value(mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0.0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def count_zeros_series(
    series: TrigSeries,
    degree: int,
    points_per_degree: int = 32,
    return_zeros: bool = False,
    cache_key=None,
) -> ZeroCountResult:
    """Sign-change count of a trig series on (0, 2*pi) with tangency probing."""
    if series.is_zero():
        raise DegenerateInput("all coefficients are zero; the zero set is the whole interval")
    interior, h = scan_grid(degree, points_per_degree)
    nodes = np.concatenate(([0.0], interior, [TWO_PI]))
    vals = np.concatenate(
        ([series.value(0.0)], _grid_values(series, interior, cache_key), [series.value(TWO_PI)])
    )

    count = 0
    exact = np.flatnonzero(vals == 0.0)
    if exact.size:
        # measure-zero event: count interior node hits once, take the sign
        # half a step to the right for the neighboring cells
        vals = vals.copy()
        for idx in exact:
            if 0 < idx < len(nodes) - 1:
                count += 1
            probe_x = min(nodes[idx] + 0.5 * h, TWO_PI - 1e-12)
            vals[idx] = series.value(probe_x)

    signs = np.sign(vals)
    changes = signs[:-1] * signs[1:] < 0
    count += int(np.count_nonzero(changes))

    zeros = [] if return_zeros else None
    if return_zeros:
        for idx in np.flatnonzero(changes):
            zeros.append(_bisect_to_root(series, nodes[idx], nodes[idx + 1]))

    # probe no-change cells whose endpoint values nearly vanish
    suspicious = 0
    vmax = float(np.max(np.abs(vals)))
    thr = NEAR_ZERO_FRAC * vmax
    small = np.minimum(np.abs(vals[:-1]), np.abs(vals[1:])) < thr
    cand = np.flatnonzero(small & ~changes)
    if cand.size:
        dseries = series.derivative()
        for idx in cand:
            lo, hi = nodes[idx], nodes[idx + 1]
            d_lo, d_hi = dseries.value(lo), dseries.value(hi)
            if d_lo * d_hi >= 0.0:
                continue  # no interior extremum
            suspicious += 1
            x_e = _bisect_to_root(dseries, lo, hi)
            v_e = series.value(x_e)
            if v_e != 0.0 and math.copysign(1.0, v_e) != signs[idx]:
                count += 2
                if return_zeros:
                    zeros.append(_bisect_to_root(series, lo, x_e))
                    zeros.append(_bisect_to_root(series, x_e, hi))

    if return_zeros:
        zeros.sort()
    return ZeroCountResult(count=count, zeros=zeros, suspicious_cells=suspicious)


def count_zeros(
    coeffs: CoefficientVector,
    points_per_degree: int = 32,
    return_zeros: bool = False,
    cache_key=None,
) -> ZeroCountResult:
    """Count real zeros of the sampled polynomial on (0, 2*pi)."""
    series = series_from_coeffs(coeffs)
    return count_zeros_series(
        series, coeffs.n, points_per_degree, return_zeros=return_zeros, cache_key=cache_key
    )


def refine_zero(coeffs: CoefficientVector, lo: float, hi: float) -> float:
    """Bisect a bracketed sign change down to width 1e-12; returns the midpoint."""
    return _bisect_to_root(series_from_coeffs(coeffs), lo, hi)


def det_factor_zero_locations(q) -> list:
    """Zeros of cos(q*x) on (0, 2*pi): odd multiples of pi/(2q)."""
    m = det_factor_zero_count(q)
    return [(2 * k + 1) * math.pi / (2.0 * float(q)) for k in range(m)]


def count_zeros_factored(
    spec: SchemeSpec,
    coeffs: CoefficientVector,
    points_per_degree: int = 32,
    return_zeros: bool = False,
) -> ZeroCountResult:
    """Deterministic-prefactor zeros plus a grid count of the reduced polynomial.

    This is the reference counting path for schemes with a deterministic
    factor: the factor's zeros are tangential for the full polynomial
    whenever the reduced part shares them structurally, and a plain sign
    scan would miss those.  Coincidences of random and deterministic zeros
    are measure-zero and ignored.
    """
    basis = effective_basis(spec, factored=True)
    det = det_factor_zero_count(basis.det_factor)
    reduced = series_from_basis(basis, free_values(spec, coeffs))
    res = count_zeros_series(
        reduced,
        coeffs.n,
        points_per_degree,
        return_zeros=return_zeros,
        cache_key=("factored", spec.variant, spec.ell, spec.n, spec.trig, points_per_degree),
    )
    zeros = None
    if return_zeros:
        zeros = sorted(res.zeros + det_factor_zero_locations(basis.det_factor))
    return ZeroCountResult(
        count=det + res.count, zeros=zeros, suspicious_cells=res.suspicious_cells
    )


def count_sign_changes_in_interval(
    series: TrigSeries, lo: float, hi: float, num_points: int
) -> int:
    """Plain sign-change count on [lo, hi] (used for window-local estimates)."""
    xs = np.linspace(lo, hi, max(num_points, 2))
    vals = series.values(xs)
    signs = np.sign(vals)
    signs[signs == 0] = 1.0
    return int(np.count_nonzero(signs[:-1] * signs[1:] < 0))
