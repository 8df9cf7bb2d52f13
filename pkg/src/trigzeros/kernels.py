"""Kernel triples (A, B, C) for Gaussian zero-density computations.

For a basis ``{g_i}`` multiplying i.i.d. N(0, sigma^2) variables,

    A(x) = sum g_i(x)^2,   B(x) = sum g_i(x) g_i'(x),   C(x) = sum g_i'(x)^2

(sigma-free by convention; the zero density sqrt(AC - B^2)/(pi A) is
invariant under rescaling anyway).  Two evaluation paths exist and are
cross-checked in the tests: a literal per-atom accumulation at one point,
and an expanded trigonometric series (product-to-sum applied atom by atom)
that evaluates whole grids in one recurrence sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import EmptyInterval, NearSingularArgument, UnsupportedScheme
from .schemes import EffectiveBasis, SchemeSpec, TrigKind, Variant, effective_basis
from .polyeval import TrigSeries

SQRT3 = math.sqrt(3.0)
SQRT13 = math.sqrt(13.0)


@dataclass(frozen=True)
class KernelTriple:
    A: float
    B: float
    C: float


def kernel_exact(spec: SchemeSpec, x: float) -> KernelTriple:
    """Exact (A, B, C) at one point by direct summation over the basis atoms.

    Uses cos/sin tables built with the angle recurrence, so the cost is
    O(total term count) with a single transcendental pair.
    """
    basis = effective_basis(spec, factored=False)
    n = spec.n
    cos_t = [1.0] * (n + 1)
    sin_t = [0.0] * (n + 1)
    if n >= 1:
        c1 = math.cos(x)
        s1 = math.sin(x)
        cos_t[1] = c1
        sin_t[1] = s1
        two_c1 = 2.0 * c1
        for j in range(2, n + 1):
            cos_t[j] = two_c1 * cos_t[j - 1] - cos_t[j - 2]
            sin_t[j] = two_c1 * sin_t[j - 1] - sin_t[j - 2]
    A = B = C = 0.0
    for atom in basis.atoms:
        g = 0.0
        dg = 0.0
        for t in atom:
            j = int(t.freq)  # unfactored bases carry integer frequencies
            if t.wave == "cos":
                g += t.weight * cos_t[j]
                dg -= t.weight * j * sin_t[j]
            else:
                g += t.weight * sin_t[j]
                dg += t.weight * j * cos_t[j]
        A += g * g
        B += g * dg
        C += dg * dg
    return KernelTriple(A=A, B=B, C=C)


def _derivative_terms(atom):
    out = []
    for t in atom:
        f = float(t.freq)
        if t.wave == "cos":
            out.append((t.freq, -t.weight * f, "sin"))
        else:
            out.append((t.freq, t.weight * f, "cos"))
    return out


def _accumulate_product(table: dict, f1: Fraction, w1: float, k1: str, f2: Fraction, w2: float, k2: str):
    """Add w1*w2 * wave1(f1 x) * wave2(f2 x) to the cos/sin coefficient dicts."""
    w = w1 * w2
    if w == 0.0:
        return
    cos_d, sin_d = table
    lo, hi = f1 - f2, f1 + f2
    if k1 == "cos" and k2 == "cos":
        cos_d[abs(lo)] = cos_d.get(abs(lo), 0.0) + 0.5 * w
        cos_d[hi] = cos_d.get(hi, 0.0) + 0.5 * w
    elif k1 == "sin" and k2 == "sin":
        cos_d[abs(lo)] = cos_d.get(abs(lo), 0.0) + 0.5 * w
        cos_d[hi] = cos_d.get(hi, 0.0) - 0.5 * w
    else:
        # sin(f1)cos(f2) = [sin(f1+f2) + sin(f1-f2)]/2; swap for cos*sin
        if k1 == "cos":
            f1, f2 = f2, f1
            lo = -lo
        if hi != 0:
            sin_d[hi] = sin_d.get(hi, 0.0) + 0.5 * w
        if lo != 0:
            s = 1.0 if lo > 0 else -1.0
            sin_d[abs(lo)] = sin_d.get(abs(lo), 0.0) + 0.5 * w * s


class KernelSeries:
    """A, B, C expanded as trigonometric series over one common denominator."""

    def __init__(self, basis: EffectiveBasis):
        self.basis = basis
        a_tab: tuple[dict, dict] = ({}, {})
        b_tab: tuple[dict, dict] = ({}, {})
        c_tab: tuple[dict, dict] = ({}, {})
        for atom in basis.atoms:
            terms = [(t.freq, t.weight, t.wave) for t in atom]
            dterms = _derivative_terms(atom)
            for f1, w1, k1 in terms:
                for f2, w2, k2 in terms:
                    _accumulate_product(a_tab, f1, w1, k1, f2, w2, k2)
                for f2, w2, k2 in dterms:
                    _accumulate_product(b_tab, f1, w1, k1, f2, w2, k2)
            for f1, w1, k1 in dterms:
                for f2, w2, k2 in dterms:
                    _accumulate_product(c_tab, f1, w1, k1, f2, w2, k2)
        d = 1
        for tab in (a_tab, b_tab, c_tab):
            for dic in tab:
                for f in dic:
                    d = d * f.denominator // math.gcd(d, f.denominator)
        K = 0
        for tab in (a_tab, b_tab, c_tab):
            for dic in tab:
                for f in dic:
                    K = max(K, int(f * d))
        self.denom = d
        self.order = K

        def build(tab):
            cos_c = np.zeros(K + 1)
            sin_c = np.zeros(K + 1)
            for f, w in tab[0].items():
                cos_c[int(f * d)] += w
            for f, w in tab[1].items():
                sin_c[int(f * d)] += w
            return cos_c, sin_c

        self._a = build(a_tab)
        self._b = build(b_tab)
        self._c = build(c_tab)
        # 1-norms of the coefficient tables; they bound both the series
        # values and (up to machine epsilon) their evaluation roundoff
        self.norm_a = float(sum(np.abs(arr).sum() for arr in self._a))
        self.norm_b = float(sum(np.abs(arr).sum() for arr in self._b))
        self.norm_c = float(sum(np.abs(arr).sum() for arr in self._c))

    def series(self, which: str) -> TrigSeries:
        cos_c, sin_c = {"A": self._a, "B": self._b, "C": self._c}[which]
        return TrigSeries(denom=self.denom, cos_coef=cos_c.copy(), sin_coef=sin_c.copy())

    def triples(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Evaluate A, B, C on an array of points in one recurrence sweep."""
        x = np.asarray(x, dtype=float)
        t = x / self.denom if self.denom != 1 else x
        K = self.order
        outs = [np.full(t.shape, tab[0][0]) for tab in (self._a, self._b, self._c)]
        if K == 0:
            return tuple(outs)
        ck = np.cos(t)
        sk = np.sin(t)
        two_c1 = 2.0 * ck
        ckm1 = np.ones_like(t)
        skm1 = np.zeros_like(t)
        for g in range(1, K + 1):
            if g >= 2:
                ckm1, ck = ck, two_c1 * ck - ckm1
                skm1, sk = sk, two_c1 * sk - skm1
            for out, (cos_c, sin_c) in zip(outs, (self._a, self._b, self._c)):
                if cos_c[g] != 0.0:
                    out += cos_c[g] * ck
                if sin_c[g] != 0.0:
                    out += sin_c[g] * sk
        return tuple(outs)

    def triple(self, x: float) -> KernelTriple:
        A, B, C = self.triples(np.array([x]))
        return KernelTriple(A=float(A[0]), B=float(B[0]), C=float(C[0]))


@lru_cache(maxsize=32)
def kernel_series(spec: SchemeSpec, factored: bool = False) -> KernelSeries:
    return KernelSeries(effective_basis(spec, factored=factored))


def dirichlet_cos_sum(p: int, m: int, x: float) -> float:
    """Closed form of sum_{j=0}^{m-1} cos((2j+p)x): cos((m-1+p)x) sin(mx)/sin(x)."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    sx = math.sin(x)
    if abs(sx) <= 1e-12:
        raise NearSingularArgument(f"sin({x}) ~ 0; use direct summation near multiples of pi")
    return math.cos((m - 1 + p) * x) * math.sin(m * x) / sx


def dirichlet_sin_sum(p: int, m: int, x: float) -> float:
    """Closed form of sum_{j=0}^{m-1} sin((2j+p)x): sin((m-1+p)x) sin(mx)/sin(x)."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    sx = math.sin(x)
    if abs(sx) <= 1e-12:
        raise NearSingularArgument(f"sin({x}) ~ 0; use direct summation near multiples of pi")
    return math.sin((m - 1 + p) * x) * math.sin(m * x) / sx


@dataclass
class BoundReport:
    """Empirical sup of |weighted trig sums| / m^(lambda+a) over a probe grid."""

    lam: int
    p: int
    m: int
    a: float
    probes: int
    ratio_cos: float       # sum j^lam cos(2pj x)
    ratio_sin: float       # sum j^lam sin(2pj x)
    ratio_cos_shift: float  # sum j^lam cos((2pj+1) x)
    ratio_sin_shift: float  # sum j^lam sin((2pj+1) x)

    @property
    def max_ratio(self) -> float:
        return max(self.ratio_cos, self.ratio_sin, self.ratio_cos_shift, self.ratio_sin_shift)


def check_sum_bounds(lam: int, p: int, m: int, a: float, probes: int) -> BoundReport:
    """Probe the growth of the four oscillatory sums on [m^-a, pi/p - m^-a].

    Direct summation only; the returned ratios are empirical constants for
    the O(m^(lambda+a)) envelope, not a proof.
    """
    if lam not in (0, 1, 2):
        raise ValueError(f"lambda must be 0, 1 or 2, got {lam}")
    if probes < 1:
        raise ValueError(f"need probes >= 1, got {probes}")
    if not (0.0 < a < 0.5):
        raise ValueError(f"need a in (0, 1/2), got {a}")
    lo = m ** (-a)
    hi = math.pi / p - lo
    if lo >= hi:
        raise EmptyInterval(f"[m^-a, pi/p - m^-a] is empty for m={m}, p={p}, a={a}")
    xs = np.linspace(lo, hi, probes)
    j = np.arange(m, dtype=float)
    jl = j ** lam
    base = np.outer(2.0 * p * j, xs)          # (m, probes)
    shifted = base + xs[None, :]
    scale = m ** (lam + a)
    ratio = lambda mat: float(np.max(np.abs(jl @ mat)) / scale)
    return BoundReport(
        lam=lam, p=p, m=m, a=a, probes=probes,
        ratio_cos=ratio(np.cos(base)),
        ratio_sin=ratio(np.sin(base)),
        ratio_cos_shift=ratio(np.cos(shifted)),
        ratio_sin_shift=ratio(np.sin(shifted)),
    )


def kernel_asymptotic(spec: SchemeSpec, x: float) -> KernelTriple:
    """Leading-order kernel triple; only the schemes with a closed form."""
    if spec.trig is TrigKind.FULL_TRIG:
        raise UnsupportedScheme("no closed leading-order kernels for full-trig schemes")
    n = float(spec.n)
    if spec.variant is Variant.IID:
        return KernelTriple(A=n / 2.0, B=0.0, C=n ** 3 / 6.0)
    if spec.variant is Variant.BLOCK_PAIRED:
        c2 = math.cos(spec.ell * x / 2.0) ** 2
        return KernelTriple(A=n * c2, B=0.0, C=n ** 3 * c2 / 3.0)
    if spec.variant is Variant.TWO_HALF_BLOCKS and spec.n % 2 == 0:
        c2 = math.cos(n * x / 4.0) ** 2
        return KernelTriple(
            A=n * c2 + math.cos(n * x) ** 2,
            B=-(n ** 2) * math.sin(n * x / 2.0) / 8.0,
            C=n ** 3 / 16.0 + 5.0 * n ** 3 * c2 / 24.0,
        )
    raise UnsupportedScheme(
        f"no closed leading-order kernels for {spec.variant.value} (n={spec.n})"
    )


def asymptotic_expected_zeros(spec: SchemeSpec) -> float:
    """Leading term of E[number of zeros on (0, 2*pi)] for the scheme."""
    n = float(spec.n)
    if spec.variant in (Variant.IID, Variant.BLOCK_PAIRED):
        return 2.0 * n / SQRT3
    if spec.variant is Variant.TWO_HALF_BLOCKS:
        return n / 2.0 + SQRT13 * n / (2.0 * SQRT3)
    if spec.variant is Variant.PALINDROMIC:
        return n + n / SQRT3
    raise AssertionError(f"unhandled variant {spec.variant}")


def verify_identity_f16(n: int, x: float) -> float:
    """Residual (normalized by n^4) of the even-degree two-half-block kernel identity.

    n cos^2(nx/4) (n^3/16 + 5 n^3 cos^2(nx/4)/24) - (n^2 sin(nx/2)/8)^2
    equals 13 n^4 cos^4(nx/4)/48 identically; the float residual measures
    evaluation roundoff only.
    """
    if n % 2 != 0:
        raise ValueError(f"identity requires even n, got {n}")
    c2 = math.cos(n * x / 4.0) ** 2
    lhs = n * c2 * (n ** 3 / 16.0 + 5.0 * n ** 3 * c2 / 24.0)
    lhs -= (n ** 2 * math.sin(n * x / 2.0) / 8.0) ** 2
    rhs = 13.0 * n ** 4 * c2 * c2 / 48.0
    return abs(lhs - rhs) / float(n) ** 4
