"""Truncated arithmetic in Z_p[gamma] / p^N, gamma a root of log E(x) with
ord_p(gamma) = 1/(p-1).

Z_p[gamma] is totally ramified of degree p-1 over Z_p with basis
1, gamma, ..., gamma^{p-2}.  Dividing log E(gamma) = 0 by gamma gives

    gamma^{p-1} = -p - sum_{i>=2} gamma^{p^i - 1} / p^{i-1},

which is solved for gamma^{p-1} as a polynomial of degree <= p-2 by
fixed-point iteration.  Bulk elements are numpy integer arrays whose last
axis (length p-1) holds the coefficients; the dtype is int64 while the
modulus is small enough that products cannot overflow, else object.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import PrecisionError

INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class PadicInt:
    """A p-adic integer known modulo p^N."""

    value: int
    p: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p**self.N)

    def _meet(self, other) -> tuple[int, int]:
        if isinstance(other, int):
            return other, self.N
        if other.p != self.p:
            raise ValueError("p mismatch")
        return other.value, min(self.N, other.N)

    def __add__(self, other) -> PadicInt:
        v, N = self._meet(other)
        return PadicInt(self.value + v, self.p, N)

    __radd__ = __add__

    def __sub__(self, other) -> PadicInt:
        v, N = self._meet(other)
        return PadicInt(self.value - v, self.p, N)

    def __neg__(self) -> PadicInt:
        return PadicInt(-self.value, self.p, self.N)

    def __mul__(self, other) -> PadicInt:
        v, N = self._meet(other)
        return PadicInt(self.value * v, self.p, N)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> PadicInt:
        return PadicInt(pow(self.value, e, self.p**self.N), self.p, self.N)

    def div_p(self) -> PadicInt:
        if self.value % self.p:
            raise PrecisionError(f"{self.value} is not divisible by {self.p}")
        return PadicInt(self.value // self.p, self.p, self.N - 1)

    def valuation(self):
        """v_p, or None when the residue is 0 (valuation >= N)."""
        if self.value == 0:
            return None
        v, x = 0, self.value
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v


def teichmuller_lift(residue: int, p: int, N: int) -> PadicInt:
    """The unique lift of residue mod p with x^p = x, to precision N."""
    x = residue % p
    mod = p**N
    for _ in range(N + 1):
        y = pow(x, p, mod)
        if y == x:
            break
        x = y
    if pow(x, p, mod) != x:  # pragma: no cover
        raise AssertionError("Teichmuller iteration did not stabilise")
    return PadicInt(x, p, N)


def _powmod_poly(base: list[int], e: int, mul) -> list[int]:
    result = None
    while e:
        if e & 1:
            result = base if result is None else mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def _solve_relation(p: int, N: int) -> tuple[int, ...]:
    """Coefficients r_0..r_{p-2} with gamma^{p-1} = sum r_k gamma^k mod p^N."""
    # terms with i >= 2 are dropped once their valuation reaches N
    imax = 1
    while (p ** (imax + 1) - 1) // (p - 1) - imax < N:
        imax += 1
    Nw = N + imax
    mod = p**Nw
    R = [(-p) % mod] + [0] * (p - 2)

    def mul(x, y):
        raw = [0] * (2 * p - 3)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    raw[i + j] += a * b
        for k in range(len(raw) - 1, p - 2, -1):
            c = raw[k] % mod
            raw[k] = 0
            if c:
                for t, r in enumerate(R):
                    raw[k - (p - 1) + t] += c * r
        return [c % mod for c in raw[: p - 1]]

    gamma = [0, 1] + [0] * (p - 3) if p > 2 else list(R)
    for _ in range(4 * Nw + 8):
        new = [(-p) % mod] + [0] * (p - 2)
        for i in range(2, imax + 1):
            term = _powmod_poly(gamma, p**i - 1, mul)
            div = p ** (i - 1)
            if any(c % div for c in term):
                raise PrecisionError("inexact division while solving the gamma relation")
            new = [(a - c // div) % mod for a, c in zip(new, term)]
        if new == R:
            break
        R = new
        if p == 2:
            gamma = list(R)
    else:  # pragma: no cover
        raise PrecisionError("gamma relation did not converge")
    return tuple(c % p**N for c in R)


class GammaRing:
    """Z_p[gamma] / p^N."""

    def __init__(self, p: int, N: int):
        if N < 1:
            raise ValueError("precision must be positive")
        self.p, self.N = p, N
        self.mod = p**N
        self.deg = p - 1
        self.relation = _solve_relation(p, N)
        self.dtype = np.int64 if (p - 1) * self.mod**2 < INT64_SAFE else object
        # rows k = 0..2p-4: gamma^k in canonical form
        table = []
        cur = [1] + [0] * (p - 2)
        for _ in range(max(2 * p - 3, 1)):
            table.append(cur)
            cur = self._times_gamma(cur)
        self._table = np.array(table, dtype=self.dtype)

    def __repr__(self) -> str:
        return f"GammaRing(p={self.p}, N={self.N})"

    def _times_gamma(self, v: list[int]) -> list[int]:
        top = v[-1]
        out = [0] + v[:-1] if self.deg > 1 else [0]
        return [(a + top * r) % self.mod for a, r in zip(out, self.relation)]

    # -- bulk arrays ---------------------------------------------------------
    def array(self, data) -> np.ndarray:
        return np.asarray(data, dtype=self.dtype) % self.mod

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.deg,), dtype=self.dtype)

    def scalars(self, values) -> np.ndarray:
        """Embed an array of integers as constants."""
        v = np.asarray(values, dtype=object if self.dtype is object else np.int64)
        out = np.zeros(v.shape + (self.deg,), dtype=self.dtype)
        out[..., 0] = v % self.mod
        return out

    def one(self) -> np.ndarray:
        return self.scalars(1)

    def gamma_powers(self, m_max: int) -> np.ndarray:
        """gamma^0..gamma^{m_max} as an (m_max+1, p-1) array."""
        return _gamma_powers(self.p, self.N, m_max)

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Elementwise product (broadcasting over leading axes)."""
        x = np.asarray(x, dtype=self.dtype)
        y = np.asarray(y, dtype=self.dtype)
        d = self.deg
        shape = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
        raw = np.zeros(shape + (2 * d - 1,), dtype=self.dtype)
        for a in range(d):
            raw[..., a:a + d] += x[..., a:a + 1] * y
            raw %= self.mod
        low = raw[..., :d]
        if d > 1:
            low = low + raw[..., d:] @ self._table[d: 2 * d - 1]
        return low % self.mod

    def scale(self, x: np.ndarray, c) -> np.ndarray:
        """Multiply by integers c (broadcast over the leading axes of x)."""
        c = np.asarray(np.asarray(c, dtype=object) % self.mod)
        if self.dtype is not object:
            c = c.astype(np.int64)
        return (x * c[..., None]) % self.mod

    def sum(self, x: np.ndarray, axis: int) -> np.ndarray:
        if axis < 0:
            axis -= 1
        return x.sum(axis=axis) % self.mod

    def series_mul(self, x: np.ndarray, y: np.ndarray, length: int) -> np.ndarray:
        """Product of power series with ring coefficients, shape (L, p-1)."""
        out = self.zeros((length,))
        for i in range(min(len(x), length)):
            if not x[i].any():
                continue
            m = min(len(y), length - i)
            out[i:i + m] += self.mul(x[i], y[:m])
        return out % self.mod

    def valuation_scaled(self, x: np.ndarray) -> np.ndarray:
        """(p-1) * valuation, elementwise; (p-1) * N marks 'at least N'."""
        d, p = self.deg, self.p
        cap = d * self.N
        x = np.asarray(x, dtype=object)
        nz = x != 0
        cur = np.where(nz, x, 1)
        v = np.zeros(x.shape, dtype=object)
        for _ in range(self.N):
            div = (cur % p == 0) & nz
            if not div.any():
                break
            cur = np.where(div, cur // p, cur)
            v = v + div
        vp = np.where(nz, d * v + np.arange(d), cap)
        return np.minimum(vp.min(axis=-1), cap).astype(np.int64)

    def element(self, coeffs) -> GammaElement:
        return GammaElement(self, tuple(int(c) % self.mod for c in coeffs))


@functools.lru_cache(maxsize=None)
def gamma_ring(p: int, N: int) -> GammaRing:
    return GammaRing(p, N)


@functools.lru_cache(maxsize=64)
def _gamma_powers(p: int, N: int, m_max: int) -> np.ndarray:
    ring = gamma_ring(p, N)
    out = [[1] + [0] * (p - 2)]
    for _ in range(m_max):
        out.append(ring._times_gamma(out[-1]))
    arr = np.array(out, dtype=ring.dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AtLeast:
    """A valuation known only to be at least ``bound``."""

    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"


@dataclass(frozen=True)
class GammaElement:
    ring: GammaRing
    coeffs: tuple[int, ...]

    def _arr(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=self.ring.dtype)

    def __add__(self, other: GammaElement) -> GammaElement:
        return self.ring.element(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other: GammaElement) -> GammaElement:
        return self.ring.element(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> GammaElement:
        return self.ring.element(-a for a in self.coeffs)

    def __mul__(self, other) -> GammaElement:
        if isinstance(other, int):
            return self.ring.element(a * other for a in self.coeffs)
        return self.ring.element(self.ring.mul(self._arr(), other._arr()).tolist())

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self):
        return gamma_valuation(self)


def gamma_reduce(raw: dict[int, int], ring: GammaRing) -> GammaElement:
    """Canonical form of sum raw[k] gamma^k."""
    if not raw:
        return ring.element([0] * ring.deg)
    if min(raw) < 0:
        raise ValueError("negative gamma exponent")
    pw = ring.gamma_powers(max(raw))
    acc = np.zeros(ring.deg, dtype=object)
    for k, c in raw.items():
        acc = acc + pw[k].astype(object) * (int(c) % ring.mod)
    return ring.element(acc.tolist())


def gamma_valuation(x: GammaElement):
    """Exact valuation as a Fraction when below N, else AtLeast(N)."""
    s = int(x.ring.valuation_scaled(np.array(x.coeffs, dtype=object)))
    if s >= x.ring.deg * x.ring.N:
        return AtLeast(x.ring.N)
    return Fraction(s, x.ring.deg)


def matmul_mod(A, B, mod: int, out_dtype=None) -> np.ndarray:
    """(A @ B) mod ``mod`` for integer matrices with entries in [0, mod),
    splitting into int64 limbs when a direct product could overflow."""
    A = np.asarray(A)
    B = np.asarray(B)
    inner = A.shape[-1]
    if out_dtype is None:
        out_dtype = np.int64 if inner * mod**2 < INT64_SAFE and mod**2 < INT64_SAFE else object
    if inner * (mod - 1) ** 2 < INT64_SAFE:
        res = (A.astype(np.int64) @ B.astype(np.int64)) % mod
        return res.astype(out_dtype)
    bits = max(1, (61 - max(inner, 1).bit_length()) // 2)
    base = 1 << bits
    nl = -(-max(mod - 1, 1).bit_length() // bits)

    def limbs(X):
        X = np.asarray(X, dtype=object)
        return [((X // base**k) % base).astype(np.int64) for k in range(nl)]

    Al, Bl = limbs(A), limbs(B)
    acc = 0
    for i, a in enumerate(Al):
        for j, b in enumerate(Bl):
            prod = a @ b
            if mod < INT64_SAFE:
                prod = prod % mod
            acc = acc + prod.astype(object) * (base ** (i + j) % mod)
    return (np.asarray(acc, dtype=object) % mod).astype(out_dtype)
