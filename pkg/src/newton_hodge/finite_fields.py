"""Finite fields F_{p^n} with deterministic models.

Elements are coefficient vectors over F_p, constant term first, reduced
modulo the lexicographically smallest monic irreducible polynomial of
degree n.  The scalar API (``FieldElement``) is plain Python; bulk work
over a whole field goes through ``FieldTables``, which keeps discrete
log/antilog tables as numpy arrays.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import EnumerationCapError

DEFAULT_ENUMERATION_CAP = 2**26


# -- polynomials over F_p, coefficient lists with constant term first --------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of a modulo m over F_p (m need not be monic)."""
    a = _trim([c % p for c in a])
    m = _trim([c % p for c in m])
    if not m:
        raise ZeroDivisionError("polynomial modulus is zero")
    inv_lead = pow(m[-1], -1, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        shift = len(a) - 1 - dm
        factor = (a[-1] * inv_lead) % p
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        a, b = b, poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def poly_powmod(a: Sequence[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = poly_mod(a, m, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), m, p)
        base = poly_mod(poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Ben-Or test: gcd(x^{p^i} - x, f) = 1 for every i <= deg(f)/2."""
    f = _trim([c % p for c in poly])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    xp = [0, 1]
    for _ in range(n // 2):
        xp = poly_powmod(xp, p, f, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(poly_gcd(f, diff, p)) > 1:
            return False
    return True


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# -- fields and elements -----------------------------------------------------

@dataclass(frozen=True)
class FieldDescriptor:
    """F_{p^n} = F_p[t]/(defining_poly)."""

    p: int
    n: int
    defining_poly: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.p**self.n

    def element(self, coeffs: Sequence[int]) -> FieldElement:
        coeffs = [int(c) % self.p for c in coeffs]
        if len(coeffs) > self.n:
            coeffs = poly_mod(coeffs, self.defining_poly, self.p)
        coeffs = list(coeffs) + [0] * (self.n - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def scalar(self, c: int) -> FieldElement:
        return self.element([c])

    def zero(self) -> FieldElement:
        return self.scalar(0)

    def one(self) -> FieldElement:
        return self.scalar(1)

    def gen(self) -> FieldElement:
        """The class of t (equal to a scalar when n = 1)."""
        return self.element([0, 1])

    def from_index(self, idx: int) -> FieldElement:
        coeffs = []
        for _ in range(self.n):
            idx, c = divmod(idx, self.p)
            coeffs.append(c)
        return FieldElement(self, tuple(coeffs))

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.n})"


@dataclass(frozen=True)
class FieldElement:
    field: FieldDescriptor
    coeffs: tuple[int, ...]

    def _check(self, other: FieldElement) -> None:
        if other.field != self.field:
            raise ValueError(f"parent mismatch: {self.field} vs {other.field}")

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, int):
            return self.field.scalar(other)
        self._check(other)
        return other

    def __add__(self, other) -> FieldElement:
        other = self._coerce(other)
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> FieldElement:
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other) -> FieldElement:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> FieldElement:
        return self._coerce(other) - self

    def __mul__(self, other) -> FieldElement:
        other = self._coerce(other)
        prod = poly_mul(self.coeffs, other.coeffs, self.field.p)
        return self.field.element(poly_mod(prod, self.field.defining_poly, self.field.p))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> FieldElement:
        if e < 0:
            return self.inverse() ** (-e)
        r = poly_powmod(self.coeffs, e, self.field.defining_poly, self.field.p)
        return self.field.element(r)

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in " + repr(self.field))
        return self ** (self.field.order - 2)

    def __truediv__(self, other) -> FieldElement:
        return self * self._coerce(other).inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def frobenius(self, times: int = 1) -> FieldElement:
        return self ** (self.field.p**times)

    @property
    def index(self) -> int:
        """Integer encoding sum c_i p^i used by the bulk tables."""
        idx = 0
        for c in reversed(self.coeffs):
            idx = idx * self.field.p + c
        return idx

    def sort_key(self) -> tuple[int, ...]:
        return self.coeffs

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self) -> str:
        return f"{list(self.coeffs)}@{self.field!r}"


def arith(x: FieldElement, y: FieldElement, op: str) -> FieldElement:
    ops = {
        "add": lambda: x + y,
        "sub": lambda: x - y,
        "mul": lambda: x * y,
        "div": lambda: x / y,
    }
    x._check(y)
    try:
        return ops[op]()
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None


@functools.lru_cache(maxsize=None)
def build_field(p: int, n: int) -> FieldDescriptor:
    """Field of p^n elements modelled by the lexicographically smallest
    monic irreducible polynomial (coefficient vectors compared constant
    term first)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("extension degree must be positive")
    if n == 1:
        return FieldDescriptor(p, 1, (0, 1))
    for low in itertools.product(range(p), repeat=n):
        poly = low + (1,)
        if low[0] != 0 and is_irreducible(poly, p):
            return FieldDescriptor(p, n, poly)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def absolute_trace(x: FieldElement) -> int:
    acc = x
    y = x
    for _ in range(x.field.n - 1):
        y = y.frobenius()
        acc = acc + y
    if any(acc.coeffs[1:]):
        raise AssertionError("trace left F_p")  # pragma: no cover
    return acc.coeffs[0]


@functools.lru_cache(maxsize=None)
def primitive_element(field: FieldDescriptor) -> FieldElement:
    """First generator of the multiplicative group in enumeration order."""
    order = field.order - 1
    factors = prime_factors(order)
    for coeffs in itertools.product(range(field.p), repeat=field.n):
        g = FieldElement(field, coeffs)
        if g.is_zero():
            continue
        if all((g ** (order // r)).coeffs != field.one().coeffs for r in factors):
            return g
    raise AssertionError("no primitive element")  # pragma: no cover


@functools.lru_cache(maxsize=None)
def embedding_root(small: FieldDescriptor, k: int) -> FieldElement:
    """Image of the generator t of ``small`` inside the degree-k extension:
    the lexicographically smallest root of its defining polynomial."""
    big = build_field(small.p, small.n * k)
    if k == 1:
        return big.gen()
    q = small.order
    g = primitive_element(big)
    h = g ** ((big.order - 1) // (q - 1))
    roots = [big.zero()] if small.defining_poly[0] == 0 else []
    y = big.one()
    for _ in range(q - 1):
        val = big.zero()
        for c in reversed(small.defining_poly):
            val = val * y + c
        if val.is_zero():
            roots.append(y)
        y = y * h
    if len(roots) != small.n:
        raise AssertionError("defining polynomial does not split in the subfield")  # pragma: no cover
    return min(roots, key=FieldElement.sort_key)


def embed(x: FieldElement, k: int) -> FieldElement:
    """Ring embedding F_q -> F_{q^k}, q = p^n of x's parent."""
    if k < 1:
        raise ValueError("k must be positive")
    small = x.field
    big = build_field(small.p, small.n * k)
    if k == 1:
        return x
    beta = embedding_root(small, k)
    acc = big.zero()
    for c in reversed(x.coeffs):
        acc = acc * beta + c
    return acc


def enumerate_field(
    descriptor: FieldDescriptor, k: int = 1, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[FieldElement]:
    """All elements of the degree-k extension, lexicographic order."""
    big = build_field(descriptor.p, descriptor.n * k)
    if big.order > cap:
        raise EnumerationCapError(f"{big!r} has {big.order} elements, cap is {cap}")
    for coeffs in itertools.product(range(big.p), repeat=big.n):
        yield FieldElement(big, coeffs)


# -- bulk tables -------------------------------------------------------------

class FieldTables:
    """Log/antilog tables over F_{p^n}; elements are int64 indices.

    Index of sum c_i t^i is sum c_i p^i.  Zero has no logarithm; the
    element-wise helpers below treat it explicitly.
    """

    def __init__(self, field: FieldDescriptor):
        self.field = field
        p, n = field.p, field.n
        self.p = p
        self.size = field.order
        self.units = self.size - 1
        self.weights = p ** np.arange(n, dtype=np.int64)
        g = primitive_element(field)
        # rows of vectors for g^0 .. g^(units-1), by repeated doubling
        vecs = np.zeros((1, n), dtype=np.int64)
        vecs[0, 0] = 1
        power = g
        while len(vecs) < self.units:
            mat = np.array([(field.gen() ** i * power).coeffs for i in range(n)], dtype=np.int64)
            vecs = np.vstack([vecs, (vecs @ mat) % p])
            power = power * power
        vecs = vecs[: self.units]
        self.exp = vecs @ self.weights
        self.log = np.full(self.size, -1, dtype=np.int64)
        self.log[self.exp] = np.arange(self.units, dtype=np.int64)
        if (self.log[1:] < 0).any():
            raise AssertionError("antilog table is not a bijection")  # pragma: no cover
        self.trace_basis = np.array(
            [absolute_trace(field.gen() ** i) for i in range(n)], dtype=np.int64
        )

    def digits(self, a: np.ndarray) -> np.ndarray:
        return (a[..., None] // self.weights) % self.p

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return ((self.digits(a) + self.digits(b)) % self.p) @ self.weights

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return ((self.digits(a) - self.digits(b)) % self.p) @ self.weights

    def scale_power(self, c: int, x: np.ndarray, e: int) -> np.ndarray:
        """c * x^e element-wise (x must be nonzero where e < 0)."""
        if c == 0:
            return np.zeros_like(x)
        out = np.zeros_like(x)
        nz = x != 0
        lg = (self.log[x[nz]] * e + self.log[c]) % self.units
        out[nz] = self.exp[lg]
        if e == 0:
            out[~nz] = c
        return out

    def trace(self, a: np.ndarray) -> np.ndarray:
        return (self.digits(a) @ self.trace_basis) % self.p


@functools.lru_cache(maxsize=8)
def field_tables(field: FieldDescriptor) -> FieldTables:
    return FieldTables(field)
