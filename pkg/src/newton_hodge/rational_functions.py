"""Rational functions in partial-fraction form over F_q.

    f(x) = c_0 + sum_j sum_{i=1}^{d_j} a_{j,i} (x - P_j)^{-i},

with (x - inf)^{-i} read as x^i.  The constant c_0 is not part of the
pole data; it is zero for validated input and only appears after a shift,
where keeping it makes L(f(x+c)) = L(f(x)) hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Optional, Sequence

from .errors import TrivialCaseError, ValidationError
from .finite_fields import FieldDescriptor, FieldElement, embed


@dataclass(frozen=True)
class Pole:
    location: Optional[FieldElement]  # None is the point at infinity
    coeffs: tuple[FieldElement, ...]  # coeffs[i-1] multiplies (x - P)^{-i}

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def at_infinity(self) -> bool:
        return self.location is None

    def location_key(self):
        return (0,) if self.location is None else (1,) + self.location.coeffs


@dataclass(frozen=True)
class RationalFunction:
    field: FieldDescriptor
    poles: tuple[Pole, ...]
    constant: FieldElement
    shift: FieldElement = dc_field(default=None, compare=False)

    def __post_init__(self):
        if self.shift is None:
            object.__setattr__(self, "shift", self.field.zero())

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def a(self) -> int:
        return self.field.n

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def ell(self) -> int:
        return len(self.poles)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(P.order for P in self.poles)

    @property
    def d(self) -> int:
        return sum(self.orders) + self.ell - 2

    @property
    def lcm_d(self) -> int:
        return math.lcm(*self.orders)

    @property
    def finite_poles(self) -> tuple[FieldElement, ...]:
        return tuple(P.location for P in self.poles if P.location is not None)

    def is_normalized(self) -> bool:
        if self.ell == 1:
            return True
        loc = self.poles[1].location
        return loc is not None and loc.is_zero()


def _as_element(field: FieldDescriptor, value) -> FieldElement:
    if isinstance(value, FieldElement):
        if value.field != field:
            raise ValidationError(f"element of {value.field!r} given where {field!r} expected")
        return value
    if isinstance(value, int):
        return field.scalar(value)
    coeffs = list(value)
    if len(coeffs) > field.n or any(not 0 <= int(c) < field.p for c in coeffs):
        raise ValidationError(f"bad field element encoding {coeffs!r} for {field!r}")
    return field.element(coeffs)


def validate(field: FieldDescriptor, raw_poles: Sequence, constant=0) -> RationalFunction:
    """Check the raw pole data and build a RationalFunction.

    ``raw_poles`` is a sequence of ``(location, coeffs)`` pairs where
    location is ``"inf"``/``None`` or an element (or its coefficient list)
    and coeffs lists a_{j,1}, ..., a_{j,d_j}.  The pole at infinity is
    moved to the front; the others keep their input order.
    """
    poles = []
    for location, coeffs in raw_poles:
        if location is None or location == "inf":
            loc = None
        else:
            loc = _as_element(field, location)
        cs = tuple(_as_element(field, c) for c in coeffs)
        if not cs:
            raise ValidationError("pole of order zero")
        poles.append(Pole(loc, cs))
    if not poles:
        raise ValidationError("no poles")
    keys = [P.location_key() for P in poles]
    if len(set(keys)) != len(keys):
        raise ValidationError("duplicate pole locations")
    infinite = [P for P in poles if P.at_infinity]
    if not infinite:
        raise ValidationError("the pole set must contain infinity")
    poles = infinite + [P for P in poles if not P.at_infinity]
    for j, P in enumerate(poles, start=1):
        if P.coeffs[-1].is_zero():
            raise ValidationError(f"leading coefficient of pole {j} is zero")
        if P.order % field.p == 0:
            raise ValidationError(f"p = {field.p} divides the pole order d_{j} = {P.order}")
    if len(poles) == 1 and poles[0].order == 1:
        raise TrivialCaseError("d_1 = l = 1: the L-function is 1")
    const = _as_element(field, constant)
    return RationalFunction(field, tuple(poles), const, field.zero())


def shift(f: RationalFunction, c: FieldElement) -> RationalFunction:
    """f(x + c).  Finite poles move to P - c with unchanged coefficients;
    the infinite block is re-expanded binomially and its constant term is
    folded into ``constant``."""
    p = f.p
    new_poles = []
    const = f.constant
    for P in f.poles:
        if P.at_infinity:
            d = P.order
            new = [f.field.zero() for _ in range(d + 1)]
            cpow = [f.field.one()]
            for _ in range(d):
                cpow.append(cpow[-1] * c)
            for i in range(1, d + 1):
                for j in range(i + 1):
                    new[j] = new[j] + P.coeffs[i - 1] * cpow[i - j] * (math.comb(i, j) % p)
            const = const + new[0]
            new_poles.append(Pole(None, tuple(new[1:])))
        else:
            new_poles.append(Pole(P.location - c, P.coeffs))
    return RationalFunction(f.field, tuple(new_poles), const, f.shift + c)


def drop_constant(f: RationalFunction) -> RationalFunction:
    return replace(f, constant=f.field.zero())


def normalize(f: RationalFunction) -> RationalFunction:
    """Put a pole at 0 when l > 1 (shifting by the smallest finite pole),
    and order poles as infinity, 0, then the rest lexicographically."""
    if not f.poles or not f.poles[0].at_infinity:
        raise ValidationError("the first pole must be at infinity")
    if f.ell == 1:
        return f
    finite = [P.location for P in f.poles[1:]]
    if not any(loc.is_zero() for loc in finite):
        f = shift(f, min(finite, key=FieldElement.sort_key))
    inf = f.poles[0]
    rest = sorted(f.poles[1:], key=lambda P: (not P.location.is_zero(), P.location.coeffs))
    return replace(f, poles=(inf, *rest))


def evaluate(f: RationalFunction, x: FieldElement) -> FieldElement:
    """f(x) for x in an extension F_{q^k} of the base field."""
    big = x.field
    if big.p != f.p or big.n % f.a:
        raise ValueError(f"{big!r} is not an extension of {f.field!r}")
    k = big.n // f.a
    acc = embed(f.constant, k)
    for P in f.poles:
        if P.at_infinity:
            base = x
        else:
            base = x - embed(P.location, k)
            if base.is_zero():
                raise ZeroDivisionError("evaluation at a pole")
            base = base.inverse()
        power = big.one()
        for c in P.coeffs:
            power = power * base
            acc = acc + embed(c, k) * power
    return acc
