"""Exponential sums, the L-polynomial and its q-adic Newton polygon."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cyclotomic import CyclotomicInteger
from .errors import EnumerationCapError
from .finite_fields import DEFAULT_ENUMERATION_CAP, build_field, embed, field_tables
from .polygons import Polygon, hodge_polygon, lies_over, lower_hull
from .rational_functions import RationalFunction

CHUNK = 1 << 18


@dataclass(frozen=True)
class CountVector:
    """N_c = #{x in F_{q^k} off the finite poles : Tr f(x) = c}."""

    p: int
    k: int
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)


def exp_sum_counts(f: RationalFunction, k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> CountVector:
    big = build_field(f.p, f.a * k)
    if big.order > cap:
        raise EnumerationCapError(f"{big!r} has {big.order} elements, cap is {cap}")
    tab = field_tables(big)
    const = embed(f.constant, k).index
    blocks = []
    for P in f.poles:
        loc = None if P.at_infinity else embed(P.location, k).index
        coeffs = [embed(c, k).index for c in P.coeffs]
        blocks.append((loc, coeffs))
    counts = np.zeros(f.p, dtype=np.int64)
    for start in range(0, tab.size, CHUNK):
        xs = np.arange(start, min(start + CHUNK, tab.size), dtype=np.int64)
        acc = np.full_like(xs, const)
        keep = np.ones(xs.shape, dtype=bool)
        for loc, coeffs in blocks:
            if loc is None:
                base, sign = xs, 1
            else:
                base, sign = tab.sub(xs, np.full_like(xs, loc)), -1
                keep &= base != 0
            for i, c in enumerate(coeffs, start=1):
                if c:
                    acc = tab.add(acc, tab.scale_power(c, base, sign * i))
        counts += np.bincount(tab.trace(acc[keep]), minlength=f.p)
    cv = CountVector(f.p, k, tuple(int(c) for c in counts))
    if cv.total != big.order - (f.ell - 1):
        raise AssertionError("count vector does not partition the domain")  # pragma: no cover
    return cv


def counts_to_sum(N: CountVector) -> CyclotomicInteger:
    return CyclotomicInteger.from_exponents(N.p, N.counts)


@dataclass(frozen=True)
class LPolynomial:
    p: int
    a: int
    coeffs: tuple[CyclotomicInteger, ...]  # b_0 = 1, ..., b_d
    counts: tuple[CountVector, ...] = ()  # counts for k = 1, 2, ...

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def galois(self, t: int) -> LPolynomial:
        return LPolynomial(self.p, self.a, tuple(b.galois(t) for b in self.coeffs), ())


def l_from_sums(p: int, sums: list[CyclotomicInteger]) -> list[CyclotomicInteger]:
    """b_0..b_m from S_1..S_m via n b_n = sum_{k=1}^{n} S_k b_{n-k}."""
    b = [CyclotomicInteger.scalar(p, 1)]
    for n in range(1, len(sums) + 1):
        acc = CyclotomicInteger.scalar(p, 0)
        for k in range(1, n + 1):
            acc = acc + sums[k - 1] * b[n - k]
        b.append(acc.exact_div(n))
    return b


def l_polynomial(
    f: RationalFunction, cap: int = DEFAULT_ENUMERATION_CAP, paranoid: bool = False
) -> LPolynomial:
    d = f.d
    extra = 2 if paranoid else 0
    counts = [exp_sum_counts(f, k, cap) for k in range(1, d + extra + 1)]
    b = l_from_sums(f.p, [counts_to_sum(c) for c in counts])
    if b[d].is_zero():
        raise ArithmeticError(f"leading coefficient b_{d} vanishes")
    for n in range(d + 1, len(b)):
        if not b[n].is_zero():
            raise ArithmeticError(f"b_{n} = {b[n]} is nonzero beyond degree {d}")
    return LPolynomial(f.p, f.a, tuple(b[: d + 1]), tuple(counts))


def newton_polygon(L: LPolynomial, a: int | None = None) -> Polygon:
    a = L.a if a is None else a
    pts = []
    for n, b in enumerate(L.coeffs):
        v = b.ord_p()
        pts.append((n, v if v is None or not isinstance(v, Fraction) else v / a))
    P = lower_hull(pts)
    d = L.degree
    if P.endpoint != (d, Fraction(d, 2)):
        raise ArithmeticError(f"Newton polygon ends at {P.endpoint}, expected ({d}, {d}/2)")
    return P


@dataclass(frozen=True)
class Verdict:
    lies_over: bool
    equals: bool
    criterion: bool
    newton: Polygon
    hodge: Polygon

    @property
    def consistent(self) -> bool:
        return self.lies_over and self.equals == self.criterion


def theorem_verdict(f: RationalFunction, L: LPolynomial | None = None, **kw) -> Verdict:
    if L is None:
        L = l_polynomial(f, **kw)
    NP = newton_polygon(L, f.a)
    HP = hodge_polygon(f.orders)
    return Verdict(
        lies_over=lies_over(NP, HP),
        equals=NP.vertices == HP.vertices,
        criterion=f.p % f.lcm_d == 1 % f.lcm_d,
        newton=NP,
        hodge=HP,
    )
