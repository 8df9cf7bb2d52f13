"""Coefficient dependence schemes for random trigonometric polynomials.

A scheme fixes which coefficients of ``sum_j a_j cos(jx) (+ b_j sin(jx))``
are forced to be exact copies of each other.  Sampling draws one i.i.d.
N(0, sigma^2) value per equality class and copies it across the class, so
the constraints hold bit-identically.  Every scheme also has an effective
i.i.d. basis: the merged waveforms multiplying each free variable, plus
(for some schemes) a deterministic cosine prefactor shared by every
realization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import FactorUnavailable, NonIntegerZeroCount

_MASK64 = (1 << 64) - 1


class Variant(str, enum.Enum):
    IID = "iid"
    BLOCK_PAIRED = "block"
    TWO_HALF_BLOCKS = "twohalf"
    PALINDROMIC = "palindromic"


class TrigKind(str, enum.Enum):
    COSINE_ONLY = "cos"
    FULL_TRIG = "full"


@dataclass(frozen=True)
class SchemeSpec:
    """Degree, noise scale, dependence variant and cosine/full-trig choice.

    ``ell`` is the block length and is required (and only allowed) for the
    block-paired variant.
    """

    n: int
    sigma: float = 1.0
    variant: Variant = Variant.IID
    ell: Optional[int] = None
    trig: TrigKind = TrigKind.COSINE_ONLY

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"degree n must be an integer >= 1, got {self.n!r}")
        if not (self.sigma >= 0.0):
            raise ValueError(f"sigma must be >= 0, got {self.sigma!r}")
        if self.variant is Variant.BLOCK_PAIRED:
            if self.ell is None or self.ell < 1:
                raise ValueError("block-paired scheme needs a block length ell >= 1")
            m = (self.n + 1) // (2 * self.ell)
            if m < 1:
                raise ValueError(
                    f"degree n={self.n} too small for block length ell={self.ell}: "
                    "need at least one block pair"
                )
        elif self.ell is not None:
            raise ValueError("ell is only meaningful for the block-paired variant")
        if self.trig is TrigKind.FULL_TRIG and self.variant is Variant.PALINDROMIC:
            raise ValueError("the palindromic scheme is defined for cosine polynomials only")

    @property
    def full_trig(self) -> bool:
        return self.trig is TrigKind.FULL_TRIG


def block_layout(spec: SchemeSpec) -> tuple[int, int]:
    """Return (m, r) with n = 2*ell*m + r, m = floor((n+1)/(2 ell)), r in {-1..2 ell-2}."""
    if spec.variant is not Variant.BLOCK_PAIRED:
        raise ValueError("block_layout applies to block-paired schemes only")
    m = (spec.n + 1) // (2 * spec.ell)
    r = spec.n - 2 * spec.ell * m
    return m, r


def equality_classes(spec: SchemeSpec) -> list[list[int]]:
    """Index classes forced to share one value, ordered by smallest member.

    The same classes apply to the sine coefficients of a full-trig scheme;
    there the class containing index 0 is pinned to zero instead of drawn
    (it would multiply sin(0*x), so the pinned value is never observable
    except through copies forced by the class itself).
    """
    n = spec.n
    if spec.variant is Variant.IID:
        return [[j] for j in range(n + 1)]
    if spec.variant is Variant.BLOCK_PAIRED:
        ell = spec.ell
        m, _ = block_layout(spec)
        classes = [
            [2 * ell * j + k, 2 * ell * j + ell + k]
            for j in range(m)
            for k in range(ell)
        ]
        classes += [[i] for i in range(2 * ell * m, n + 1)]
        return classes
    if spec.variant is Variant.TWO_HALF_BLOCKS:
        h = -(-n // 2)  # ceil(n/2)
        classes = [[j, j + h] for j in range(h)]
        if n % 2 == 0:
            classes.append([n])
        return classes
    if spec.variant is Variant.PALINDROMIC:
        classes = []
        for j in range((n + 2) // 2):
            classes.append([j] if j == n - j else [j, n - j])
        return classes
    raise AssertionError(f"unhandled variant {spec.variant}")


def free_variable_count(spec: SchemeSpec) -> int:
    """Number of independent N(0, sigma^2) draws behind one realization."""
    n_cos = len(equality_classes(spec))
    if spec.full_trig:
        return 2 * n_cos - 1  # the sine class containing index 0 is pinned to 0
    return n_cos


@dataclass
class CoefficientVector:
    """One sampled draw; ``b`` is present only for full-trig schemes (b[0] == 0)."""

    a: np.ndarray
    b: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.a) - 1

    def abs_coeff_sum(self) -> float:
        s = float(np.abs(self.a).sum())
        if self.b is not None:
            s += float(np.abs(self.b).sum())
        return s


def mix64(base_seed: int, i: int) -> int:
    """Derive the per-trial seed: SplitMix64 finalizer of base_seed + i*gamma.

    This is the published SplitMix64 output function (Steele, Lea & Flood),
    evaluated on the i-th state of the golden-gamma Weyl sequence started
    at base_seed.  Fixed forever: golden reports depend on the stream.
    """
    z = (base_seed + i * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


def sample(spec: SchemeSpec, seed: int) -> CoefficientVector:
    """Draw one coefficient vector honoring the scheme's equality constraints.

    Stream contract (never change without a version bump): a Philox4x64
    counter-based generator keyed by ``seed``, normals via NumPy's ziggurat
    ``standard_normal``, one draw per free variable in canonical order
    (cosine classes by smallest index, then sine classes likewise).
    """
    classes = equality_classes(spec)
    rng = _generator(seed)
    z = rng.standard_normal(free_variable_count(spec)) * spec.sigma
    a = np.zeros(spec.n + 1)
    pos = 0
    for cls in classes:
        for idx in cls:
            a[idx] = z[pos]
        pos += 1
    if not spec.full_trig:
        return CoefficientVector(a=a)
    b = np.zeros(spec.n + 1)
    for cls in classes:
        if 0 in cls:
            continue  # pinned: b_0 = 0 propagates through its class
        for idx in cls:
            b[idx] = z[pos]
        pos += 1
    assert pos == len(z)
    return CoefficientVector(a=a, b=b)


def free_values(spec: SchemeSpec, coeffs: CoefficientVector) -> np.ndarray:
    """Extract the free-variable values of a conforming vector, canonical order."""
    classes = equality_classes(spec)
    vals = [coeffs.a[cls[0]] for cls in classes]
    if spec.full_trig:
        if coeffs.b is None:
            raise ValueError("full-trig scheme but coefficient vector has no sine part")
        vals += [coeffs.b[cls[0]] for cls in classes if 0 not in cls]
    return np.asarray(vals, dtype=float)


class BasisTerm(NamedTuple):
    freq: Fraction  # >= 0; half-integer frequencies occur in factored bases
    weight: float
    wave: str  # "cos" | "sin"


BasisAtom = tuple  # tuple[BasisTerm, ...]


@dataclass
class EffectiveBasis:
    """The scheme written as sum_i v_i * g_i(x) with i.i.d. free variables v_i.

    ``det_factor`` is the rational q of a deterministic prefactor 2*cos(q*x)
    (None for the unfactored form).  Atom i multiplies free variable i in
    the canonical sampling order.
    """

    atoms: list
    det_factor: Optional[Fraction] = None

    @property
    def denom(self) -> int:
        d = 1
        for atom in self.atoms:
            for t in atom:
                d = d * t.freq.denominator // math.gcd(d, t.freq.denominator)
        return d

    def max_freq(self) -> Fraction:
        return max((t.freq for atom in self.atoms for t in atom), default=Fraction(0))

    def atom_value(self, i: int, x: float) -> float:
        return sum(
            t.weight * (math.cos(float(t.freq) * x) if t.wave == "cos" else math.sin(float(t.freq) * x))
            for t in self.atoms[i]
        )

    def atom_derivative(self, i: int, x: float) -> float:
        out = 0.0
        for t in self.atoms[i]:
            f = float(t.freq)
            if t.wave == "cos":
                out += -t.weight * f * math.sin(f * x)
            else:
                out += t.weight * f * math.cos(f * x)
        return out

    def value(self, values: Sequence[float], x: float, with_det_factor: bool = True) -> float:
        s = sum(v * self.atom_value(i, x) for i, v in enumerate(values))
        if with_det_factor and self.det_factor is not None:
            s *= 2.0 * math.cos(float(self.det_factor) * x)
        return s

    def vanishes_identically_at_pi(self) -> bool:
        """True when every atom is exactly zero at x = pi.

        Decided in exact rational arithmetic: cos(f*pi) is 0 iff f is a
        half-odd integer, +-1 for integer f; sin(f*pi) is 0 iff f is an
        integer.  Schemes whose factored atoms all vanish at pi put a
        deterministic simple crossing of the reduced polynomial there.
        """
        for atom in self.atoms:
            acc = Fraction(0)
            for t in atom:
                if t.weight == 0.0:
                    continue
                f = t.freq
                if t.wave == "cos":
                    if f.denominator == 1:
                        acc += Fraction(t.weight) * (-1) ** (f.numerator % 2)
                    elif f.denominator == 2:
                        pass  # cos(odd*pi/2) == 0
                    else:
                        return False  # frequencies beyond halves: bail out conservatively
                else:
                    if f.denominator == 1:
                        pass  # sin(int*pi) == 0
                    else:
                        return False
            if acc != 0:
                return False
        return True


def _unfactored_basis(spec: SchemeSpec) -> EffectiveBasis:
    classes = equality_classes(spec)
    atoms = [
        tuple(BasisTerm(Fraction(idx), 1.0, "cos") for idx in cls) for cls in classes
    ]
    if spec.full_trig:
        atoms += [
            tuple(BasisTerm(Fraction(idx), 1.0, "sin") for idx in cls)
            for cls in classes
            if 0 not in cls
        ]
    return EffectiveBasis(atoms=atoms, det_factor=None)


def _factored_basis(spec: SchemeSpec) -> EffectiveBasis:
    n = spec.n
    if spec.variant is Variant.BLOCK_PAIRED:
        m, r = block_layout(spec)
        if r != -1:
            raise FactorUnavailable(
                f"block-paired scheme with remainder r={r} >= 0 has no deterministic factor"
            )
        q = Fraction(spec.ell, 2)
        shift = q
        atoms = [
            (BasisTerm(Fraction(2 * spec.ell * j + k) + shift, 1.0, "cos"),)
            for j in range(m)
            for k in range(spec.ell)
        ]
        if spec.full_trig:
            atoms += [
                (BasisTerm(Fraction(2 * spec.ell * j + k) + shift, 1.0, "sin"),)
                for j in range(m)
                for k in range(spec.ell)
                if (j, k) != (0, 0)
            ]
        return EffectiveBasis(atoms=atoms, det_factor=q)
    if spec.variant is Variant.TWO_HALF_BLOCKS:
        if n % 2 == 0:
            raise FactorUnavailable(
                "even-degree two-half-block scheme: the lone cos(n x) atom blocks factoring"
            )
        m = (n - 1) // 2
        q = Fraction(n + 1, 4)
        atoms = [(BasisTerm(Fraction(j) + q, 1.0, "cos"),) for j in range(m + 1)]
        if spec.full_trig:
            atoms += [(BasisTerm(Fraction(j) + q, 1.0, "sin"),) for j in range(1, m + 1)]
        return EffectiveBasis(atoms=atoms, det_factor=q)
    if spec.variant is Variant.PALINDROMIC:
        q = Fraction(n, 2)
        atoms = []
        for j in range((n + 2) // 2):
            if j == n - j:
                # middle coefficient of an even-degree palindrome: its atom
                # cos((n/2)x) is the prefactor itself, so it reduces to 1/2
                atoms.append((BasisTerm(Fraction(0), 0.5, "cos"),))
            else:
                atoms.append((BasisTerm(q - j, 1.0, "cos"),))
        return EffectiveBasis(atoms=atoms, det_factor=q)
    raise FactorUnavailable(f"{spec.variant.value} scheme has no deterministic factor")


def effective_basis(spec: SchemeSpec, factored: bool = False) -> EffectiveBasis:
    """The scheme's i.i.d. representation, optionally with the prefactor split off.

    The unfactored form always exists: one atom per equality class summing
    the paired waves.  The factored form exists for block-paired schemes
    with remainder -1 (prefactor 2cos(ell x/2)), odd-degree two-half-block
    schemes (2cos((n+1)x/4)) and palindromic schemes (2cos(n x/2); for even
    n the middle coefficient reduces to a constant half-weight atom).
    """
    if factored:
        return _factored_basis(spec)
    return _unfactored_basis(spec)


def det_factor_zero_count(det_factor: Fraction) -> int:
    """Number of zeros of cos(q*x) on (0, 2*pi); equals 2q when that is an integer."""
    q = Fraction(det_factor)
    two_q = 2 * q
    if two_q.denominator != 1 or two_q <= 0:
        raise NonIntegerZeroCount(f"cos({q}*x) does not complete half-periods on (0, 2*pi)")
    return int(two_q)
