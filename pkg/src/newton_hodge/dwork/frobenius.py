"""The matrix of U_p o F(X) on the pole-indexed monomial basis (a = 1).

Poles are numbered J = 1 (infinity), 2 (zero), 3.. (other finite points),
with local parameters X_1 = x and X_J = 1/(x - P_J).  The basis is
X_1^i (i >= 0) and X_J^i (i >= 1) for J >= 2.  Column (J, i) holds the
image of X_J^i; row (J1, n) its coefficient on X_{J1}^n.

All arithmetic is exact in Z_p[gamma] / p^N: every series is cut where
the tail valuation provably reaches N, so no entry carries hidden error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import ValidationError
from ..rational_functions import RationalFunction, normalize
from .artin_hasse import artin_hasse_mod
from .gamma_ring import GammaRing, gamma_ring, matmul_mod, teichmuller_lift
from .up_operator import up_table


def _binom_mod(n: int, k: int, mod: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k) % mod


@dataclass
class DworkSetup:
    """A normalized a = 1 instance with Teichmuller data at precision N."""

    f: RationalFunction
    ring: GammaRing
    orders: tuple[int, ...]
    coeff_lifts: tuple[tuple[int, ...], ...]
    pole_lifts: tuple[int, ...]  # 0 for poles 1 and 2 (unused for J = 1)
    constant_lift: int
    t_max: tuple[int, ...]
    splitting: list[np.ndarray] = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def N(self) -> int:
        return self.ring.N

    @property
    def ell(self) -> int:
        return len(self.orders)

    def rows(self, J: int) -> range:
        """Exponents n indexing block J."""
        return range(0 if J == 1 else 1, self.t_max[J - 1] + 1)

    def index(self) -> list[tuple[int, int]]:
        return [(J, n) for J in range(1, self.ell + 1) for n in self.rows(J)]


def splitting_length(d: int, p: int, N: int) -> int:
    """Smallest K with ord F_{j,n} >= N for all n >= K, from ceil(n/d) >= N(p-1)."""
    return d * (N * (p - 1) - 1) + 1


def prepare(f: RationalFunction, N: int, t_max=None) -> DworkSetup:
    if f.a != 1:
        raise ValidationError("the p-adic engine handles a = 1 only")
    f = normalize(f)
    p = f.p
    ring = gamma_ring(p, N)
    lifts = tuple(tuple(teichmuller_lift(c.coeffs[0], p, N).value for c in P.coeffs) for P in f.poles)
    poles = tuple(0 if P.location is None else teichmuller_lift(P.location.coeffs[0], p, N).value
                  for P in f.poles)
    if t_max is None:
        t_max = tuple(d * (N + 1) + 1 for d in f.orders)
    elif isinstance(t_max, int):
        t_max = (t_max,) * f.ell
    setup = DworkSetup(f, ring, f.orders, lifts, poles,
                       teichmuller_lift(f.constant.coeffs[0], p, N).value, tuple(t_max))
    setup.splitting = [splitting_coefficients(setup, j, splitting_length(d, p, N))
                       for j, d in enumerate(f.orders, start=1)]
    return setup


def splitting_coefficients(setup: DworkSetup, j: int, n_max: int) -> np.ndarray:
    """F_{j,0..n_max} of F_j(Y) = prod_i E(gamma a_{j,i} Y^i), shape (n_max+1, p-1)."""
    ring = setup.ring
    mod = ring.mod
    e = artin_hasse_mod(ring.p, n_max, mod)
    pw = ring.gamma_powers(n_max)
    out = ring.zeros((n_max + 1,))
    out[0] = ring.one()
    for i, a in enumerate(setup.coeff_lifts[j - 1], start=1):
        if a == 0:
            continue
        factor = ring.zeros((n_max + 1,))
        for m in range(n_max // i + 1):
            factor[i * m] = ring.scale(pw[m], e[m] * pow(a, m, mod))
        out = ring.series_mul(out, factor, n_max + 1)
    return out


def _contract(M, X: np.ndarray, ring: GammaRing) -> np.ndarray:
    """Integer matrix M (a, b) applied to ring vectors X (b, ..., p-1)."""
    b = X.shape[0]
    flat = X.reshape(b, -1)
    res = matmul_mod(M, flat, ring.mod, out_dtype=ring.dtype)
    return res.reshape((M.shape[0],) + X.shape[1:])


def _factor_series(setup: DworkSetup, j: int, J1: int, length: int) -> np.ndarray:
    """F_j(X_j) expanded in w = 1/X_{J1} (a power series), first ``length`` terms."""
    ring, mod = setup.ring, setup.ring.mod
    F = setup.splitting[j - 1]
    K = len(F)
    if J1 == 1:
        if j == 2:
            return _pad(F, length, ring)
        # X_j = w / (1 - P_j w): [w^t] = sum_m F_m C(t-1, m-1) P^{t-m}
        P = setup.pole_lifts[j - 1]
        M = np.zeros((length, K), dtype=object)
        for t in range(length):
            for m in range(min(t, K - 1) + 1):
                M[t, m] = 1 if t == m == 0 else _binom_mod(t - 1, m - 1, mod) * pow(P, t - m, mod) % mod
        return _contract(M, F, ring)
    P = setup.pole_lifts[J1 - 1]
    if j == 1:
        # x = P + w: [w^s] = sum_{m >= s} F_m C(m, s) P^{m-s}
        if P == 0:
            return _pad(F, length, ring)
        M = np.zeros((length, K), dtype=object)
        for s in range(min(length, K)):
            for m in range(s, K):
                M[s, m] = _binom_mod(m, s, mod) * pow(P, m - s, mod) % mod
        return _contract(M, F, ring)
    # X_j = 1/(w + D), D = P_{J1} - P_j a unit
    D = (P - setup.pole_lifts[j - 1]) % mod
    if D % ring.p == 0:
        raise ArithmeticError("distinct poles with equal residues")
    Dinv = pow(D, -1, mod)
    M = np.zeros((length, K), dtype=object)
    M[0, 0] = 1
    for s in range(length):
        sign = -1 if s % 2 else 1
        for m in range(1, K):
            M[s, m] = sign * _binom_mod(m + s - 1, s, mod) * pow(Dinv, m + s, mod) % mod
    return _contract(M, F, ring)


def _pad(F: np.ndarray, length: int, ring: GammaRing) -> np.ndarray:
    out = ring.zeros((length,))
    k = min(length, len(F))
    out[:k] = F[:k]
    return out


def _column_weights(setup: DworkSetup, J1: int, J: int, i: int, t_lo: int, t_hi: int) -> np.ndarray:
    """Integer coefficients Y_t (t in [t_lo, t_hi]) of X_J^i in w = 1/X_{J1}."""
    mod = setup.ring.mod
    Y = np.zeros(t_hi - t_lo + 1, dtype=object)

    def put(t, v):
        if t_lo <= t <= t_hi:
            Y[t - t_lo] = v % mod

    if J == J1:
        put(-i, 1)
    elif J1 == 1:
        P = setup.pole_lifts[J - 1]
        for s in range(t_hi - i + 1):
            put(i + s, _binom_mod(i + s - 1, s, mod) * pow(P, s, mod))
    elif J == 1:
        P = setup.pole_lifts[J1 - 1]
        for s in range(i + 1):
            put(s, _binom_mod(i, s, mod) * pow(P, i - s, mod))
    else:
        D = (setup.pole_lifts[J1 - 1] - setup.pole_lifts[J - 1]) % mod
        Dinv = pow(D, -1, mod)
        for s in range(t_hi + 1):
            put(s, (-1) ** s * _binom_mod(i + s - 1, s, mod) * pow(Dinv, i + s, mod))
    return Y


def local_block(setup: DworkSetup, J1: int, m_max: int) -> dict[int, np.ndarray]:
    """H^{m,i}_{J1,J} for m = 0..m_max and every basis column (J, i).

    Returns {J: array (m_max+1, ncols_J, p-1)} with column k holding i = rows(J)[k].
    The pole-J1 component of F(X) X_J^i is sum_m H^{m,i} X_{J1}^m; with
    u = X_{J1}, w = 1/u and R(w) the product of the other splitting factors,
    H^{m,i} = sum_t Y_t V_{m+t} where V_k = sum_u F_{J1,k+u} R_u.
    """
    ring = setup.ring
    FJ = setup.splitting[J1 - 1]
    K = len(FJ) - 1
    shift = max(setup.t_max)
    kmin = -shift
    R_len = K - kmin + 1
    R = _pad(ring.one()[None, :], R_len, ring)
    for j in range(1, setup.ell + 1):
        if j != J1:
            R = ring.series_mul(R, _factor_series(setup, j, J1, R_len), R_len)
    # V_k for k in [kmin, K]: Hankel contraction of F_{J1} against R
    ks = np.arange(kmin, K + 1)
    us = np.arange(R_len)
    idx = ks[:, None] + us[None, :]
    valid = (idx >= 0) & (idx <= K)
    Fg = np.where(valid[..., None], FJ[np.clip(idx, 0, K)], 0).astype(ring.dtype)
    V = ring.sum(ring.mul(Fg, R[None, :, :]), axis=1)
    out = {}
    ms = np.arange(m_max + 1)
    for J in range(1, setup.ell + 1):
        cols = list(setup.rows(J))
        t_lo, t_hi = (-max(cols), K) if J == J1 else (0, K)
        Y = np.stack([_column_weights(setup, J1, J, i, t_lo, t_hi) for i in cols], axis=1)
        # gather V_{m+t}; indices beyond K are negligible
        tt = np.arange(t_lo, t_hi + 1)
        gi = ms[:, None] + tt[None, :] - kmin
        ok = (gi >= 0) & (gi <= K - kmin)
        Vg = np.where(ok[..., None], V[np.clip(gi, 0, K - kmin)], 0).astype(ring.dtype)
        # (m, t, c) x (t, i) -> (m, i, c)
        Vt = np.moveaxis(Vg, 1, 2).reshape(-1, len(tt))
        H = matmul_mod(Vt, Y, ring.mod, out_dtype=ring.dtype)
        out[J] = np.moveaxis(H.reshape(len(ms), ring.deg, len(cols)), 1, 2)
    return out


def local_expansion(setup: DworkSetup, J1: int, J: int, i: int, n_max: int) -> np.ndarray:
    """H^{n,i}_{J1,J} for n = 0..n_max, shape (n_max+1, p-1)."""
    cols = list(setup.rows(J))
    if i not in cols:
        raise ValueError(f"column exponent {i} outside block {J}")
    return local_block(setup, J1, n_max)[J][:, cols.index(i)]


@dataclass
class FrobeniusMatrix:
    setup: DworkSetup
    index: list[tuple[int, int]]
    entries: np.ndarray  # (size, size, p-1)
    local: dict[int, dict[int, np.ndarray]]  # J1 -> J -> H array

    @property
    def size(self) -> int:
        return len(self.index)


def frobenius_matrix(setup: DworkSetup) -> FrobeniusMatrix:
    ring, p, mod = setup.ring, setup.p, setup.ring.mod
    index = setup.index()
    pos = {key: k for k, key in enumerate(index)}
    A = ring.zeros((len(index), len(index)))
    local = {}
    for J1 in range(1, setup.ell + 1):
        rows = list(setup.rows(J1))
        H = local_block(setup, J1, p * max(rows))
        local[J1] = H
        for J, HJ in H.items():
            cols = [pos[J, i] for i in setup.rows(J)]
            if J1 <= 2:
                block = HJ[[p * n for n in rows]]
            else:
                P = setup.pole_lifts[J1 - 1]
                table = up_table(p, max(rows), mod)
                M = np.zeros((len(rows), HJ.shape[0]), dtype=object)
                for a, n in enumerate(rows):
                    for m in range(n, n * p + 1):
                        M[a, m] = table[n, m] * pow(P, n * p - m, mod) % mod
                block = _contract(M, HJ, ring)
            r0 = pos[J1, rows[0]]
            A[r0:r0 + len(rows), cols[0]:cols[0] + len(cols)] = block
    if setup.constant_lift:
        # a = 1: E(gamma c) is the character value at the constant term
        n_max = ring.deg * ring.N
        e = artin_hasse_mod(p, n_max, mod)
        pw = ring.gamma_powers(n_max)
        c = ring.sum(ring.scale(pw, [e[m] * pow(setup.constant_lift, m, mod) for m in range(n_max + 1)]), axis=0)
        A = ring.mul(A, c)
    return FrobeniusMatrix(setup, index, A, local)


# -- valuation bounds ----------------------------------------------------------

def condition_C(s: int, t: int, p: int) -> bool:
    """t | s and 0 <= s/t <= p-1."""
    return s >= 0 and s % t == 0 and s // t <= p - 1


@dataclass
class BoundReport:
    checked: int = 0
    violations: list[str] = field(default_factory=list)
    equality_misses: list[str] = field(default_factory=list)  # sufficient condition held, equality did not
    extra_equalities: list[str] = field(default_factory=list)  # equality outside the stated condition

    def merge(self, other: BoundReport) -> None:
        self.checked += other.checked
        self.violations += other.violations
        self.equality_misses += other.equality_misses
        self.extra_equalities += other.extra_equalities


def _judge(rep: BoundReport, label: str, scaled: int, cap: int, bound: Fraction,
           deg: int, cond: bool | None, iff: bool) -> None:
    """scaled = (p-1) * ord, with cap meaning 'at least N'."""
    target = bound * deg
    rep.checked += 1
    known = scaled < cap
    if known and scaled < target:
        rep.violations.append(f"{label}: ord {Fraction(scaled, deg)} < bound {bound}")
        return
    if cond is None or target >= cap:
        return
    if cond and scaled != target:
        rep.equality_misses.append(f"{label}: expected equality at {bound}, got "
                                   f"{Fraction(scaled, deg) if known else '>=N'}")
    elif not cond and known and scaled == target:
        (rep.violations if iff else rep.extra_equalities).append(
            f"{label}: equality at {bound} without the stated condition")


def check_splitting_bounds(setup: DworkSetup) -> BoundReport:
    """ord F_{j,n} >= ceil(n/d_j)/(p-1), equality if d_j | n and n/d_j <= p-1."""
    rep = BoundReport()
    ring, p = setup.ring, setup.p
    cap = ring.deg * ring.N
    for j, (d, F) in enumerate(zip(setup.orders, setup.splitting), start=1):
        vals = ring.valuation_scaled(F)
        for n, v in enumerate(vals):
            _judge(rep, f"F_{j},{n}", int(v), cap, Fraction(-(-n // d), p - 1), ring.deg,
                   condition_C(n, d, p), iff=False)
    return rep


def h_bound(setup: DworkSetup, J1: int, J: int, n: int, i: int) -> tuple[Fraction, bool | None]:
    p, d = setup.p, setup.orders[J1 - 1]
    if J1 == J:
        s = n - i
    elif J1 == 1:
        s = n + i
    else:
        s = n
    cond = condition_C(s, d, p) if J1 <= 2 or J1 == J else None
    return Fraction(s, d * (p - 1)), cond


def check_local_bounds(M: FrobeniusMatrix) -> BoundReport:
    setup = M.setup
    ring, p = setup.ring, setup.p
    cap = ring.deg * ring.N
    rep = BoundReport()
    for J1, blocks in M.local.items():
        rows = list(setup.rows(J1))
        ms = [p * n for n in rows] if J1 <= 2 else range(1, p * max(rows) + 1)
        for J, H in blocks.items():
            vals = ring.valuation_scaled(H)
            for k, i in enumerate(setup.rows(J)):
                for m in ms:
                    bound, cond = h_bound(setup, J1, J, m, i)
                    _judge(rep, f"H^{m},{i}_{J1},{J}", int(vals[m, k]), cap, bound, ring.deg,
                           cond, iff=False)
    return rep


def b_bound(setup: DworkSetup, J1: int, J: int, n: int, i: int) -> tuple[Fraction, bool | None]:
    p, d = setup.p, setup.orders[J1 - 1]
    if J1 <= 2:
        s = n * p - i if J1 == J else (n * p + i if J1 == 1 else n * p)
        return Fraction(s, d * (p - 1)), condition_C(s, d, p)
    s = (n - 1) * p - (i - 1) if J1 == J else (n - 1) * p + 1
    return Fraction(s, d * (p - 1)), (condition_C(s, d, p) or None) if d >= 2 else None


def weighted_bound(setup: DworkSetup, J1: int, J: int, n: int, i: int) -> Fraction:
    p = setup.p
    dJ1, dJ = setup.orders[J1 - 1], setup.orders[J - 1]
    if J1 <= 2:
        base = Fraction(n, dJ1)
        if J1 == J:
            return base
        if J1 == 1:
            return base + Fraction(i, p - 1) * (Fraction(1, dJ1) + Fraction(1, dJ))
        return base + Fraction(i, (p - 1) * dJ)
    base = Fraction(n - 1, dJ1)
    return base if J1 == J else base + Fraction(i, (p - 1) * dJ)


def weight_shift(setup: DworkSetup, J1: int, J: int, n: int, i: int) -> Fraction:
    """ord of gamma^{i/d_J - n/d_{J1}}."""
    return (Fraction(i, setup.orders[J - 1]) - Fraction(n, setup.orders[J1 - 1])) / (setup.p - 1)


def check_matrix_bounds(M: FrobeniusMatrix) -> tuple[BoundReport, BoundReport]:
    """Unweighted bounds on B and weighted bounds on B gamma^{i/d_J - n/d_J1}."""
    setup = M.setup
    ring = setup.ring
    cap = ring.deg * ring.N
    vals = ring.valuation_scaled(M.entries)
    unw, wt = BoundReport(), BoundReport()
    for r, (J1, n) in enumerate(M.index):
        for c, (J, i) in enumerate(M.index):
            v = int(vals[r, c])
            bound, cond = b_bound(setup, J1, J, n, i)
            _judge(unw, f"B^{n},{i}_{J1},{J}", v, cap, bound, ring.deg, cond, iff=False)
            wt.checked += 1
            if v < cap:
                w = Fraction(v, ring.deg) + weight_shift(setup, J1, J, n, i)
                wb = weighted_bound(setup, J1, J, n, i)
                if w < wb:
                    wt.violations.append(f"C^{n},{i}_{J1},{J}: weighted ord {w} < {wb}")
    return unw, wt
