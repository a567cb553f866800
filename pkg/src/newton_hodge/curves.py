"""The Artin-Schreier curve y^p - y = f(x): zeta numerator, point counts, p-rank."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import CyclotomicInteger, v_p
from .finite_fields import DEFAULT_ENUMERATION_CAP
from .lseries import LPolynomial, exp_sum_counts
from .polygons import INFINITY, Polygon, lower_hull, slope_segments
from .rational_functions import RationalFunction


@dataclass(frozen=True)
class ZetaNumerator:
    p: int
    a: int
    coeffs: tuple[int, ...]  # low degree first, coeffs[0] = 1

    @property
    def q(self) -> int:
        return self.p**self.a

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def genus(self) -> int:
        return self.degree // 2

    def satisfies_functional_equation(self) -> bool:
        g, c = self.genus, self.coeffs
        if self.degree % 2:
            return False
        return all(c[2 * g - i] == self.q ** (g - i) * c[i] for i in range(g + 1))


def _poly_mul(x: list[CyclotomicInteger], y: list[CyclotomicInteger]) -> list[CyclotomicInteger]:
    p = x[0].p
    out = [CyclotomicInteger.scalar(p, 0) for _ in range(len(x) + len(y) - 1)]
    for i, a in enumerate(x):
        if a.is_zero():
            continue
        for j, b in enumerate(y):
            out[i + j] = out[i + j] + a * b
    return out


def zeta_numerator(L: LPolynomial) -> ZetaNumerator:
    """Product of the Galois conjugates sigma_t(L), t = 1..p-1."""
    prod = list(L.coeffs)
    for t in range(2, L.p):
        prod = _poly_mul(prod, [b.galois(t) for b in L.coeffs])
    for n, c in enumerate(prod):
        if not c.is_rational():
            raise ArithmeticError(f"norm coefficient {n} is not rational: {c}")
    return ZetaNumerator(L.p, L.a, tuple(c.to_int() for c in prod))


def point_count_direct(f: RationalFunction, k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """#C(F_{q^k}): p points over each affine x with trace zero, plus one
    point above each pole."""
    return f.ell + f.p * exp_sum_counts(f, k, cap).counts[0]


def power_sums(coeffs, k_max: int) -> list[int]:
    """s_k = sum alpha_i^k where the polynomial is prod (1 - alpha_i T)."""
    c = list(coeffs) + [0] * max(0, k_max + 1 - len(coeffs))
    s = [0]
    for k in range(1, k_max + 1):
        s.append(-k * c[k] - sum(c[i] * s[k - i] for i in range(1, k)))
    return s


def zeta_consistency(
    f: RationalFunction, numerator: ZetaNumerator, k_max: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> bool:
    return first_zeta_mismatch(f, numerator, k_max, cap) is None


def first_zeta_mismatch(
    f: RationalFunction, numerator: ZetaNumerator, k_max: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> int | None:
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    s = power_sums(numerator.coeffs, k_max)
    for k in range(1, k_max + 1):
        if point_count_direct(f, k, cap) != 1 + numerator.q**k - s[k]:
            return k
    return None


@dataclass(frozen=True)
class CurvePolygon:
    curve_np: Polygon
    p_rank: int


def curve_np_and_prank(numerator: ZetaNumerator) -> CurvePolygon:
    pts = []
    for n, c in enumerate(numerator.coeffs):
        v = v_p(c, numerator.p)
        pts.append((n, INFINITY if v == INFINITY else Fraction(v, numerator.a)))
    P = lower_hull(pts)
    segs = slope_segments(P)
    rank = segs[0][1] if segs and segs[0][0] == 0 else 0
    return CurvePolygon(P, rank)
