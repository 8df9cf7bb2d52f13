"""Evaluation of trigonometric series and their derivatives.

Everything funnels through :class:`TrigSeries`, a dense table of cosine and
sine coefficients over frequencies g/denom, g = 0..K.  Values are computed
with the two-term angle recurrence

    cos((g+1)t) = 2 cos(t) cos(gt) - cos((g-1)t)

seeded by one cos/sin call per point, so a length-n series costs O(n)
multiplies per point and exactly one transcendental pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .schemes import CoefficientVector, EffectiveBasis

TWO_PI = 2.0 * math.pi


@dataclass
class TrigSeries:
    """f(x) = sum_g cos_coef[g] cos(g x/denom) + sin_coef[g] sin(g x/denom)."""

    denom: int
    cos_coef: np.ndarray
    sin_coef: Optional[np.ndarray] = None

    @property
    def order(self) -> int:
        return len(self.cos_coef) - 1

    def derivative(self) -> "TrigSeries":
        g = np.arange(len(self.cos_coef)) / self.denom
        new_sin = -self.cos_coef * g
        new_cos = self.sin_coef * g if self.sin_coef is not None else None
        if new_cos is None:
            new_cos = np.zeros_like(new_sin)
        return TrigSeries(denom=self.denom, cos_coef=new_cos, sin_coef=new_sin)

    def value(self, x: float) -> float:
        """Scalar evaluation; pure-float recurrence."""
        t = x / self.denom
        cc = self.cos_coef
        sc = self.sin_coef
        out = cc[0]
        K = len(cc) - 1
        if K == 0:
            return float(out)
        c1 = math.cos(t)
        s1 = math.sin(t)
        ckm1, ck = 1.0, c1
        skm1, sk = 0.0, s1
        two_c1 = 2.0 * c1
        out += cc[1] * ck
        if sc is not None:
            out += sc[1] * sk
        for g in range(2, K + 1):
            ckm1, ck = ck, two_c1 * ck - ckm1
            skm1, sk = sk, two_c1 * sk - skm1
            out += cc[g] * ck
            if sc is not None:
                out += sc[g] * sk
        return float(out)

    def values(self, x: Union[np.ndarray, Sequence[float]]) -> np.ndarray:
        """Vectorized evaluation on an array of points."""
        x = np.asarray(x, dtype=float)
        if x.size == 0:
            return np.zeros_like(x)
        t = x / self.denom if self.denom != 1 else x
        cc = self.cos_coef
        sc = self.sin_coef
        K = len(cc) - 1
        out = np.full(t.shape, cc[0])
        if K == 0:
            return out
        c1 = np.cos(t)
        s1 = np.sin(t)
        two_c1 = 2.0 * c1
        ckm1 = np.ones_like(t)
        ck = c1
        skm1 = np.zeros_like(t)
        sk = s1
        if cc[1] != 0.0:
            out += cc[1] * ck
        if sc is not None and sc[1] != 0.0:
            out += sc[1] * sk
        for g in range(2, K + 1):
            ckm1, ck = ck, two_c1 * ck - ckm1
            skm1, sk = sk, two_c1 * sk - skm1
            if cc[g] != 0.0:
                out += cc[g] * ck
            if sc is not None and sc[g] != 0.0:
                out += sc[g] * sk
        return out

    def is_zero(self) -> bool:
        if np.any(self.cos_coef):
            return False
        return self.sin_coef is None or not np.any(self.sin_coef)


def wave_tables(K: int, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dense (K+1, P) tables of cos(g*theta), sin(g*theta) built by recurrence."""
    theta = np.asarray(theta, dtype=float)
    P = theta.size
    cos_t = np.empty((K + 1, P))
    sin_t = np.empty((K + 1, P))
    cos_t[0] = 1.0
    sin_t[0] = 0.0
    if K >= 1:
        np.cos(theta, out=cos_t[1])
        np.sin(theta, out=sin_t[1])
        two_c1 = 2.0 * cos_t[1]
        for g in range(2, K + 1):
            np.multiply(two_c1, cos_t[g - 1], out=cos_t[g])
            cos_t[g] -= cos_t[g - 2]
            np.multiply(two_c1, sin_t[g - 1], out=sin_t[g])
            sin_t[g] -= sin_t[g - 2]
    return cos_t, sin_t


def series_from_coeffs(coeffs: CoefficientVector) -> TrigSeries:
    return TrigSeries(
        denom=1,
        cos_coef=np.asarray(coeffs.a, dtype=float),
        sin_coef=None if coeffs.b is None else np.asarray(coeffs.b, dtype=float),
    )


def series_from_basis(basis: EffectiveBasis, values: Sequence[float]) -> TrigSeries:
    """Collapse an effective basis with given free-variable values to one series."""
    values = np.asarray(values, dtype=float)
    if len(values) != len(basis.atoms):
        raise ValueError(
            f"expected {len(basis.atoms)} free values, got {len(values)}"
        )
    d = basis.denom
    K = int(basis.max_freq() * d)
    cos_coef = np.zeros(K + 1)
    sin_coef = np.zeros(K + 1)
    has_sin = False
    for v, atom in zip(values, basis.atoms):
        for t in atom:
            g = int(t.freq * d)
            if t.wave == "cos":
                cos_coef[g] += v * t.weight
            else:
                sin_coef[g] += v * t.weight
                has_sin = True
    return TrigSeries(denom=d, cos_coef=cos_coef, sin_coef=sin_coef if has_sin else None)


@dataclass
class EvalRequest:
    """An ordered batch of evaluation points in [0, 2*pi]."""

    points: np.ndarray
    coeffs: Optional[CoefficientVector] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1:
            raise ValueError("points must be one-dimensional")
        if pts.size:
            if not np.all(np.diff(pts) > 0):
                raise ValueError("points must be strictly increasing")
            if pts[0] < 0.0 or pts[-1] > TWO_PI:
                raise ValueError("points must lie within [0, 2*pi]")
        object.__setattr__(self, "points", pts)


def evaluate(coeffs: CoefficientVector, x: float) -> float:
    """sum_j a_j cos(jx) (+ sum_j b_j sin(jx)) by the angle recurrence."""
    if not math.isfinite(x):
        raise ValueError(f"evaluation point must be finite, got {x!r}")
    return series_from_coeffs(coeffs).value(x)


def evaluate_derivative(coeffs: CoefficientVector, x: float) -> float:
    """-sum_j j a_j sin(jx) (+ sum_j j b_j cos(jx))."""
    if not math.isfinite(x):
        raise ValueError(f"evaluation point must be finite, got {x!r}")
    return series_from_coeffs(coeffs).derivative().value(x)


def evaluate_grid(coeffs: CoefficientVector, grid) -> np.ndarray:
    """Vectorized evaluation at every grid point (same values as pointwise calls)."""
    if isinstance(grid, EvalRequest):
        pts = grid.points
    else:
        pts = EvalRequest(points=np.asarray(grid, dtype=float)).points
    return series_from_coeffs(coeffs).values(pts)
