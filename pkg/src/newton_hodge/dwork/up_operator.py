"""Coefficients C^{n,m} of U_p on pole powers:

    U_p (X - P)^{-m} = sum_{n = ceil(m/p)}^{m} C^{n,m} P^{np-m} (X - P^p)^{-n}

with C^{n,m} = m/(np) * sum over compositions (i_1..i_n) of m with parts
in [1, p] of prod binom(p, i_k).  The composition sum is the coefficient
of x^m in ((1+x)^p - 1)^n, built up by repeated polynomial multiplication.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

from ..cyclotomic import v_p


@functools.lru_cache(maxsize=None)
def _composition_sums(p: int, n: int) -> tuple[int, ...]:
    """Coefficients of ((1+x)^p - 1)^n."""
    if n == 0:
        return (1,)
    prev = _composition_sums(p, n - 1)
    base = [math.comb(p, i) for i in range(1, p + 1)]
    out = [0] * (len(prev) + p)
    for j, c in enumerate(prev):
        if c:
            for i, b in enumerate(base, start=1):
                out[j + i] += c * b
    return tuple(out)


def up_coefficient(p: int, n: int, m: int) -> Fraction:
    if n < 1 or not -(-m // p) <= n <= m:
        raise ValueError(f"need ceil(m/p) <= n <= m, got n={n}, m={m}, p={p}")
    c = Fraction(m, n * p) * _composition_sums(p, n)[m]
    if c.denominator % p == 0:
        raise ArithmeticError(f"C^{{{n},{m}}} = {c} is not {p}-integral")
    return c


@functools.lru_cache(maxsize=None)
def up_table(p: int, n_max: int, modulus: int) -> dict[tuple[int, int], int]:
    """C^{n,m} mod modulus for 1 <= n <= n_max and n <= m <= np."""
    out = {}
    for n in range(1, n_max + 1):
        for m in range(n, n * p + 1):
            c = up_coefficient(p, n, m)
            out[n, m] = c.numerator * pow(c.denominator, -1, modulus) % modulus
    return out


def check_up_coefficient(p: int, n: int, m: int) -> list[str]:
    """The valuation lower bound and the unit criterion with its residue."""
    c = up_coefficient(p, n, m)
    problems = []
    v = v_p(c.numerator, p)
    if v != math.inf and v < Fraction(n * p - m, p - 1) - 1:
        problems.append(f"ord C^{{{n},{m}}} = {v} below (np-m)/(p-1) - 1")
    unit = v == 0
    if unit != (n == -(-m // p)):
        problems.append(f"C^{{{n},{m}}} unit={unit} but n == ceil(m/p) is {n == -(-m // p)}")
    if unit:
        eps = m - (n - 1) * p
        residue = c.numerator * pow(c.denominator, -1, p) % p
        if residue != (-1) ** (eps - 1) % p:
            problems.append(f"C^{{{n},{m}}} = {residue} mod {p}, expected (-1)^{eps - 1}")
    return problems
