"""Exact arithmetic in Z[zeta_p] in the reduced power basis 1, zeta, ..., zeta^{p-2}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polygons import INFINITY


def v_p(n: int, p: int) -> float | int:
    if n == 0:
        return INFINITY
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class CyclotomicInteger:
    p: int
    coeffs: tuple[int, ...]  # length p - 1

    @classmethod
    def from_exponents(cls, p: int, raw: Sequence[int]) -> CyclotomicInteger:
        """Reduce sum raw[j] zeta^j (any length) to canonical form."""
        folded = [0] * p
        for j, c in enumerate(raw):
            folded[j % p] += c
        top = folded[p - 1]
        return cls(p, tuple(c - top for c in folded[: p - 1]))

    @classmethod
    def scalar(cls, p: int, n: int) -> CyclotomicInteger:
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def zeta(cls, p: int, power: int = 1) -> CyclotomicInteger:
        raw = [0] * p
        raw[power % p] = 1
        return cls.from_exponents(p, raw)

    def _check(self, other: CyclotomicInteger) -> None:
        if other.p != self.p:
            raise ValueError(f"p mismatch: {self.p} vs {other.p}")

    def _coerce(self, other) -> CyclotomicInteger:
        if isinstance(other, int):
            return CyclotomicInteger.scalar(self.p, other)
        self._check(other)
        return other

    def __add__(self, other) -> CyclotomicInteger:
        other = self._coerce(other)
        return CyclotomicInteger(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> CyclotomicInteger:
        return CyclotomicInteger(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other) -> CyclotomicInteger:
        return self + (-self._coerce(other))

    def __mul__(self, other) -> CyclotomicInteger:
        if isinstance(other, int):
            return CyclotomicInteger(self.p, tuple(a * other for a in self.coeffs))
        self._check(other)
        raw = [0] * (2 * self.p - 3)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    raw[i + j] += a * b
        return CyclotomicInteger.from_exponents(self.p, raw)

    __rmul__ = __mul__

    def exact_div(self, n: int) -> CyclotomicInteger:
        """self / n, which must lie in Z[zeta_p] (the basis is a Z-basis)."""
        if any(a % n for a in self.coeffs):
            raise ArithmeticError(f"{self} is not divisible by {n} in Z[zeta_{self.p}]")
        return CyclotomicInteger(self.p, tuple(a // n for a in self.coeffs))

    def galois(self, t: int) -> CyclotomicInteger:
        """Image under zeta -> zeta^t."""
        if t % self.p == 0:
            raise ValueError("t must be prime to p")
        raw = [0] * self.p
        for j, a in enumerate(self.coeffs):
            raw[(j * t) % self.p] += a
        return CyclotomicInteger.from_exponents(self.p, raw)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_int(self) -> int:
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational integer")
        return self.coeffs[0]

    def pi_coefficients(self) -> list[int]:
        """c_i with self = sum c_i pi^i, pi = 1 - zeta."""
        out = []
        for i in range(self.p - 1):
            s = sum(u * math.comb(j, i) for j, u in enumerate(self.coeffs) if j >= i)
            out.append(s * (-1) ** i)
        return out

    def ord_p(self):
        """p-adic valuation normalised by ord_p(p) = 1; INFINITY for zero.

        The terms c_i pi^i have valuations v_p(c_i) + i/(p-1) with
        pairwise distinct fractional parts, so the minimum is attained
        once and is the exact valuation.
        """
        if self.is_zero():
            return INFINITY
        best = None
        for i, c in enumerate(self.pi_coefficients()):
            if c:
                v = v_p(c, self.p) + Fraction(i, self.p - 1)
                best = v if best is None else min(best, v)
        return Fraction(best)

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self) -> str:
        terms = []
        for j, a in enumerate(self.coeffs):
            if a:
                terms.append(f"{a}" if j == 0 else f"{a}*z^{j}" if j > 1 else f"{a}*z")
        return "(" + (" + ".join(terms) or "0") + ")"


def cyclo_arith(x: CyclotomicInteger, y: CyclotomicInteger, op: str) -> CyclotomicInteger:
    x._check(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown operation {op!r}")
