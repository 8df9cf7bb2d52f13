"""Expected zero counts by quadrature of the Gaussian zero density.

The density sqrt(A C - B^2)/(pi A) is integrated over (0, 2*pi) with
adaptive bisection panels (Gauss-Kronrod 7/15 per panel, batched
evaluation).  Schemes whose kernel A vanishes somewhere are rewritten
through their deterministic cosine prefactor first: the prefactor
contributes its zero count exactly, and the reduced polynomial's kernel is
positive — except for the one structural crossing at x = pi that appears
when every reduced frequency is a half-odd integer.  That crossing
contributes exactly 1; a tiny window around it is excised and its density
mass restored from the closed-form limit slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import QuadratureNotConverged, VanishingA
from .kernels import KernelSeries, KernelTriple, kernel_exact, kernel_series
from .polyeval import TWO_PI, series_from_coeffs
from .rootcount import count_sign_changes_in_interval, det_factor_zero_locations
from .schemes import (
    SchemeSpec,
    Variant,
    block_layout,
    det_factor_zero_count,
    effective_basis,
    mix64,
    sample,
)

_A_FLOOR_FRAC = 1e-14

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (positive half).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_K15_NODES = np.concatenate((-_XGK[:7], [0.0], _XGK[6::-1]))
_K15_WEIGHTS = np.concatenate((_WGK[:7], [_WGK[7]], _WGK[6::-1]))
_G7_WEIGHTS = np.zeros(15)
_G7_WEIGHTS[1:14:2] = np.concatenate((_WG[:3], [_WG[3]], _WG[2::-1]))


@dataclass
class QuadratureConfig:
    """Tolerances for the zero-count integral.

    ``singular_window_radius`` (default 10/n) is the half-width of the
    excision windows used by the hybrid quadrature+MC cross-check around
    deterministic kernel zeros.
    """

    abs_tol: float = 1e-8
    max_depth: int = 40
    singular_window_radius: Optional[float] = None

    def __post_init__(self):
        if not (self.abs_tol > 0):
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if self.max_depth < 10:
            raise ValueError(f"max_depth must be >= 10, got {self.max_depth!r}")

    def window_radius(self, n: int) -> float:
        return self.singular_window_radius if self.singular_window_radius is not None else 10.0 / n


@dataclass
class KacRiceResult:
    expected_zeros: float
    deterministic_added: int
    windows_excised: int
    quadrature_error_estimate: float


# Gram determinants below the roundoff bound of their evaluation are
# indistinguishable from zero and treated as zero, which keeps the adaptive
# quadrature from chasing floating-point noise where the determinant
# cancels (single-atom bases, structural zeros of the reduced kernel).
_GRAM_KAPPA = 8.0 * np.finfo(float).eps


def _gram_noise_floor(ks: KernelSeries, A, B, C):
    return _GRAM_KAPPA * (ks.norm_a * np.abs(C) + np.abs(A) * ks.norm_c + 2.0 * np.abs(B) * ks.norm_b)


def density(t: KernelTriple) -> float:
    """Zero density sqrt(max(AC - B^2, 0)) / (pi A) of a kernel triple."""
    if t.A <= _A_FLOOR_FRAC * max(1.0, t.C):
        raise VanishingA(f"kernel A={t.A!r} vanishes (C={t.C!r}); density undefined")
    gram = t.A * t.C - t.B * t.B
    if gram <= _GRAM_KAPPA * (t.A * t.C + t.B * t.B):
        return 0.0
    return math.sqrt(gram) / (math.pi * t.A)


def _density_vec(ks: KernelSeries) -> Callable[[np.ndarray], np.ndarray]:
    def rho(xs: np.ndarray) -> np.ndarray:
        A, B, C = ks.triples(xs)
        bad = A <= _A_FLOOR_FRAC * np.maximum(1.0, C)
        if np.any(bad):
            x_bad = float(np.asarray(xs)[bad][0])
            raise VanishingA(f"kernel A vanishes near x={x_bad:.6g}; density undefined there")
        gram = A * C - B * B
        gram[gram <= _gram_noise_floor(ks, A, B, C)] = 0.0
        return np.sqrt(gram) / (np.pi * A)

    return rho


def _merge_breakpoints(edges, lo: float, hi: float) -> np.ndarray:
    pts = np.asarray(sorted({lo, hi, *edges}), dtype=float)
    pts = pts[(pts >= lo) & (pts <= hi)]
    keep = np.concatenate(([True], np.diff(pts) > 1e-12))
    return pts[keep]


def adaptive_panels(
    f: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    abs_tol: float,
    max_depth: int,
    max_panels: int = 400_000,
) -> tuple[float, float]:
    """Globally adaptive bisection with a GK15 rule per panel.

    Panels are refined in waves (all panels above the current per-panel
    error share are split at their midpoints), so the panel tree and the
    final sum are independent of evaluation order.  Returns (value,
    error_estimate); raises QuadratureNotConverged when the estimate cannot
    be pushed below ``abs_tol`` within ``max_depth`` bisections.
    """
    lows = np.asarray(edges[:-1], dtype=float)
    highs = np.asarray(edges[1:], dtype=float)
    depths = np.zeros(len(lows), dtype=int)

    def rule(lo_arr, hi_arr):
        mid = 0.5 * (lo_arr + hi_arr)
        half = 0.5 * (hi_arr - lo_arr)
        xs = mid[:, None] + half[:, None] * _K15_NODES[None, :]
        vals = f(xs.ravel()).reshape(xs.shape)
        k15 = half * (vals @ _K15_WEIGHTS)
        g7 = half * (vals @ _G7_WEIGHTS)
        return k15, np.abs(k15 - g7)

    values, errs = rule(lows, highs)
    while True:
        total_err = float(errs.sum())
        if total_err <= abs_tol:
            break
        share = abs_tol / (2.0 * len(lows))
        widths = highs - lows
        split = (errs > share) & (depths < max_depth) & (widths > 1e-13)
        if not np.any(split):
            raise QuadratureNotConverged(
                f"error estimate {total_err:.3e} > abs_tol {abs_tol:.3e} "
                f"with all panels at depth/width limits"
            )
        if len(lows) + np.count_nonzero(split) > max_panels:
            raise QuadratureNotConverged(
                f"panel budget exceeded ({len(lows)} panels, err {total_err:.3e})"
            )
        s_lo, s_hi, s_dep = lows[split], highs[split], depths[split]
        mids = 0.5 * (s_lo + s_hi)
        new_lo = np.concatenate((s_lo, mids))
        new_hi = np.concatenate((mids, s_hi))
        new_vals, new_errs = rule(new_lo, new_hi)
        lows = np.concatenate((lows[~split], new_lo))
        highs = np.concatenate((highs[~split], new_hi))
        depths = np.concatenate((depths[~split], np.repeat(s_dep + 1, 2)))
        values = np.concatenate((values[~split], new_vals))
        errs = np.concatenate((errs[~split], new_errs))

    order = np.argsort(lows, kind="stable")
    return float(values[order].sum()), float(errs.sum())


def _uniform_edges(lo: float, hi: float, max_freq: float) -> np.ndarray:
    # quarter-wavelength initial panels so the GK error estimate cannot
    # alias the kernel's fastest oscillation
    n0 = max(8, int(math.ceil(2.0 * max_freq * (hi - lo) / math.pi)) + 1)
    return np.linspace(lo, hi, n0 + 1)


def needs_factored_route(spec: SchemeSpec) -> bool:
    """True when the unfactored kernel A vanishes somewhere on (0, 2*pi)."""
    if spec.variant is Variant.PALINDROMIC:
        return True
    if spec.variant is Variant.TWO_HALF_BLOCKS:
        return spec.n % 2 == 1
    if spec.variant is Variant.BLOCK_PAIRED:
        return block_layout(spec)[1] == -1
    return False


def _scheme_breakpoints(spec: SchemeSpec) -> list:
    """Known sharp features of the direct-route density."""
    pts = [math.pi]
    if spec.variant is Variant.TWO_HALF_BLOCKS and spec.n % 2 == 0:
        n = spec.n
        k = 0
        while (4 * k + 2) * math.pi / n < TWO_PI:
            pts.append((4 * k + 2) * math.pi / n)
            k += 1
    elif spec.variant is Variant.BLOCK_PAIRED:
        pts.extend(det_factor_zero_locations(Fraction(spec.ell, 2)))
    return pts


def crossing_slope_at_pi(basis) -> float:
    """Limit of density(pi + d)/|d| for a basis vanishing identically at pi.

    With S_k = sum over atoms of weight^2 * freq^k, the Gram determinant
    expands as d^6 (S2 S6 - S4^2)/9 while A ~ d^2 S2, giving the slope
    sqrt(S2 S6 - S4^2) / (3 pi S2).
    """
    s = _freq_moments(basis)
    if s[2] == 0.0:
        return 0.0
    return math.sqrt(max(s[2] * s[6] - s[4] * s[4], 0.0)) / (3.0 * math.pi * s[2])


def _freq_moments(basis) -> dict:
    s = {k: 0.0 for k in (2, 4, 6, 8)}
    for atom in basis.atoms:
        for t in atom:
            f2 = float(t.freq) ** 2
            w2 = t.weight * t.weight
            s[2] += w2 * f2
            s[4] += w2 * f2 ** 2
            s[6] += w2 * f2 ** 3
            s[8] += w2 * f2 ** 4
    return s


@dataclass
class _PiWindow:
    """Excision half-width and analytic density mass for the structural pi crossing."""

    half_width: float
    mass: float
    mass_error: float


def _pi_window(basis, ks: KernelSeries) -> _PiWindow:
    """Size the excised window so the Gram determinant is healthy outside it.

    Near the crossing the determinant is g6 d^6 + g8 d^8 + ... with
    g6 = (S2 S6 - S4^2)/9 and g8 = (S4 S6 - S2 S8)/45, while float
    evaluation carries an absolute noise floor ~ eps * |coefs|_1 products.
    The window edge is placed where the true determinant exceeds that
    noise by a wide margin, and the excised density mass is restored from
    the expansion rho(pi + d) = slope |d| (1 + c2 d^2 + O(d^4)).
    """
    s = _freq_moments(basis)
    g6 = (s[2] * s[6] - s[4] * s[4]) / 9.0
    if g6 <= 0.0 or s[2] == 0.0:
        return _PiWindow(half_width=1e-6, mass=0.0, mass_error=0.0)
    g8 = (s[4] * s[6] - s[2] * s[8]) / 45.0
    noise = _GRAM_KAPPA * (ks.norm_a * ks.norm_c + 2.0 * ks.norm_b * ks.norm_b)
    w = max((4000.0 * noise / g6) ** (1.0 / 6.0), 1e-6)
    f_max = float(basis.max_freq())
    if f_max * w > 0.2:
        raise QuadratureNotConverged(
            f"cannot resolve the structural crossing at pi: window {w:.2e} "
            f"is not small on the kernel's oscillation scale"
        )
    slope = math.sqrt(g6) / (math.pi * s[2])
    c2 = g8 / (2.0 * g6) + s[4] / (3.0 * s[2])
    mass = slope * w * w * (1.0 + 0.5 * c2 * w * w)
    err = slope * w * w * ((f_max * w) ** 4 + abs(c2) * w * w * (f_max * w) ** 2)
    return _PiWindow(half_width=w, mass=mass, mass_error=err)


def expected_zeros_numeric(spec: SchemeSpec, q: Optional[QuadratureConfig] = None) -> KacRiceResult:
    """Expected number of zeros on (0, 2*pi) by adaptive density quadrature.

    Schemes with a deterministic prefactor switch to the reduced basis:
    the prefactor's zeros are added exactly, and when the reduced basis
    itself vanishes identically at pi (half-odd frequencies) that simple
    structural crossing adds one more, with a tiny excised window whose
    true mass is restored analytically.
    """
    q = q or QuadratureConfig()
    if needs_factored_route(spec):
        basis = effective_basis(spec, factored=True)
        det = det_factor_zero_count(basis.det_factor)
        ks = kernel_series(spec, True)
        rho = _density_vec(ks)
        max_f = float(basis.max_freq())
        crossing = basis.vanishes_identically_at_pi()
        extra = 0.0
        err_extra = 0.0
        edges = list(_uniform_edges(0.0, TWO_PI, max_f))
        edges.extend(det_factor_zero_locations(basis.det_factor))
        if crossing:
            win = _pi_window(basis, ks)
            extra = 1.0 + win.mass
            err_extra = win.mass_error
            left = _merge_breakpoints(edges, 0.0, math.pi - win.half_width)
            right = _merge_breakpoints(edges, math.pi + win.half_width, TWO_PI)
            v1, e1 = adaptive_panels(rho, left, 0.5 * q.abs_tol, q.max_depth)
            v2, e2 = adaptive_panels(rho, right, 0.5 * q.abs_tol, q.max_depth)
            integral, err = v1 + v2, e1 + e2
        else:
            integral, err = adaptive_panels(
                rho, _merge_breakpoints(edges, 0.0, TWO_PI), q.abs_tol, q.max_depth
            )
        return KacRiceResult(
            expected_zeros=det + extra + integral,
            deterministic_added=det,
            windows_excised=1 if crossing else 0,
            quadrature_error_estimate=err + err_extra,
        )

    ks = kernel_series(spec, False)
    rho = _density_vec(ks)
    max_f = ks.order / ks.denom
    edges = _merge_breakpoints(
        list(_uniform_edges(0.0, TWO_PI, max_f)) + _scheme_breakpoints(spec), 0.0, TWO_PI
    )
    integral, err = adaptive_panels(rho, edges, q.abs_tol, q.max_depth)
    return KacRiceResult(
        expected_zeros=integral,
        deterministic_added=0,
        windows_excised=0,
        quadrature_error_estimate=err,
    )


def integrate_density(
    spec: SchemeSpec, lo: float, hi: float, q: Optional[QuadratureConfig] = None
) -> tuple[float, float]:
    """Integral of the route density over [lo, hi] (reduced basis on factored routes).

    The structural pi-window, when present, is excluded without the +1
    crossing bookkeeping; useful for symmetry checks and window studies.
    """
    q = q or QuadratureConfig()
    if not (0.0 <= lo < hi <= TWO_PI):
        raise ValueError(f"need 0 <= lo < hi <= 2*pi, got ({lo}, {hi})")
    factored = needs_factored_route(spec)
    ks = kernel_series(spec, factored)
    rho = _density_vec(ks)
    max_f = ks.order / ks.denom
    edges = list(_uniform_edges(lo, hi, max_f))
    if factored:
        basis = effective_basis(spec, factored=True)
        if basis.vanishes_identically_at_pi():
            w = _pi_window(basis, ks).half_width
            total, err = 0.0, 0.0
            for a, b in ((lo, min(hi, math.pi - w)), (max(lo, math.pi + w), hi)):
                if a < b:
                    v, e = adaptive_panels(
                        rho, _merge_breakpoints(edges, a, b), 0.5 * q.abs_tol, q.max_depth
                    )
                    total += v
                    err += e
            return total, err
    v, e = adaptive_panels(rho, _merge_breakpoints(edges, lo, hi), q.abs_tol, q.max_depth)
    return v, e


def density_profile(spec: SchemeSpec, grid) -> list:
    """Pointwise (x, density) pairs from the exact kernels, for plotting."""
    return [(float(x), density(kernel_exact(spec, float(x)))) for x in np.asarray(grid, dtype=float)]


def expected_zeros_excised_mc(
    spec: SchemeSpec,
    q: Optional[QuadratureConfig] = None,
    trials: int = 200,
    base_seed: int = 0,
    points_per_degree: int = 32,
) -> KacRiceResult:
    """Hybrid estimate: direct quadrature away from the kernel's zero set,
    window mass replaced by Monte Carlo zero counts inside radius-(10/n)
    windows around the deterministic kernel zeros.

    Cross-check path for block-paired schemes with remainder -1, where the
    unfactored kernel A vanishes at the ell zeros of cos(ell x/2).
    """
    q = q or QuadratureConfig()
    if spec.variant is not Variant.BLOCK_PAIRED or block_layout(spec)[1] != -1:
        raise ValueError("hybrid excision is the cross-check for block-paired remainder -1")
    ks = kernel_series(spec, False)
    rho = _density_vec(ks)
    radius = q.window_radius(spec.n)
    centers = det_factor_zero_locations(Fraction(spec.ell, 2))
    cuts = [0.0]
    for c in centers:
        cuts.extend((max(c - radius, 0.0), min(c + radius, TWO_PI)))
    cuts.append(TWO_PI)
    outside, err = 0.0, 0.0
    max_f = ks.order / ks.denom
    for a, b in zip(cuts[0::2], cuts[1::2]):
        if a < b - 1e-12:
            v, e = adaptive_panels(
                rho, _merge_breakpoints(_uniform_edges(a, b, max_f), a, b), q.abs_tol, q.max_depth
            )
            outside += v
            err += e

    pts = max(64, int(points_per_degree * (spec.n + 1) * (2 * radius) / TWO_PI))
    window_mean = 0.0
    for i in range(trials):
        series = series_from_coeffs(sample(spec, mix64(base_seed, i)))
        hits = sum(
            count_sign_changes_in_interval(
                series, max(c - radius, 0.0), min(c + radius, TWO_PI), pts
            )
            for c in centers
        )
        window_mean += hits
    window_mean /= trials
    return KacRiceResult(
        expected_zeros=outside + window_mean,
        deterministic_added=0,
        windows_excised=len(centers),
        quadrature_error_estimate=err,
    )
