"""Coefficients of the Artin-Hasse exponential E(x) = exp(sum_i x^{p^i}/p^i)."""

from __future__ import annotations

from fractions import Fraction

_CACHE: dict[int, list[Fraction]] = {}


def artin_hasse_coefficients(p: int, n_max: int) -> list[Fraction]:
    """e_0..e_{n_max}, from n e_n = sum_{p^i <= n} e_{n - p^i}
    (the logarithmic derivative of E is sum_i x^{p^i - 1})."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    e = _CACHE.setdefault(p, [Fraction(1)])
    while len(e) <= n_max:
        n = len(e)
        acc = Fraction(0)
        q = 1
        while q <= n:
            acc += e[n - q]
            q *= p
        c = acc / n
        if c.denominator % p == 0:
            raise ArithmeticError(f"e_{n} = {c} is not {p}-integral")
        e.append(c)
    return e[: n_max + 1]


def artin_hasse_mod(p: int, n_max: int, modulus: int) -> list[int]:
    """The same coefficients reduced into Z/modulus (modulus a power of p)."""
    return [c.numerator * pow(c.denominator, -1, modulus) % modulus
            for c in artin_hasse_coefficients(p, n_max)]
