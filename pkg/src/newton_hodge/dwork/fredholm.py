"""det(1 - T M) over Z_p[gamma]/p^N and the resulting Newton polygon."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import PrecisionError, ValidationError
from ..polygons import Polygon, extend_by_slope, hodge_slopes, lower_hull
from ..rational_functions import RationalFunction
from .frobenius import (
    BoundReport,
    FrobeniusMatrix,
    check_local_bounds,
    check_matrix_bounds,
    check_splitting_bounds,
    frobenius_matrix,
    prepare,
    weight_shift,
)
from .gamma_ring import INT64_SAFE, GammaRing, matmul_mod


def _multiplication_matrix(ring: GammaRing, A: np.ndarray) -> np.ndarray:
    """Integer matrix of v -> A v on coefficient vectors, shape (n(p-1), n(p-1))."""
    n, d = A.shape[0], ring.deg
    pw = ring.gamma_powers(d - 1)
    cols = [ring.mul(A, pw[b]) for b in range(d)]  # each (n, n, d): A_rs gamma^b
    big = np.stack(cols, axis=-1)  # (r, s, a, b)
    return np.transpose(big, (0, 2, 1, 3)).reshape(n * d, n * d)


class _LimbMatrix:
    """A fixed integer matrix whose trailing principal submatrices are
    applied to vectors modulo ``mod`` without int64 overflow."""

    def __init__(self, big: np.ndarray, mod: int):
        self.mod = mod
        size = big.shape[0]
        if size * (mod - 1) ** 2 < INT64_SAFE:
            self.base, self.limbs = None, [big.astype(np.int64)]
        else:
            bits = max(1, (61 - max(size, 1).bit_length()) // 2)
            self.base = 1 << bits
            nl = -(-max(mod - 1, 1).bit_length() // bits)
            obj = big.astype(object)
            self.limbs = [((obj // self.base**k) % self.base).astype(np.int64) for k in range(nl)]

    def apply(self, start: int, v: np.ndarray) -> np.ndarray:
        if self.base is None:
            return (self.limbs[0][start:, start:] @ v.astype(np.int64)) % self.mod
        return matmul_mod(self._sub(start), v, self.mod, out_dtype=object)

    def _sub(self, start: int) -> np.ndarray:
        acc = np.zeros(self.limbs[0][start:, start:].shape, dtype=object)
        for k, L in enumerate(self.limbs):
            acc = acc + L[start:, start:].astype(object) * self.base**k
        return acc


def fredholm_char_series(ring: GammaRing, A: np.ndarray, t_len: int) -> np.ndarray:
    """C_0 = 1, C_1..C_{t_len} of det(1 - T A) for a ring matrix A (n, n, p-1).

    Division-free: peeling off the first row and column,
    det(1 - TA) = det(1 - TA') (1 - a T - sum_s (R A'^s C) T^{s+2}),
    processed from the bottom-right corner upwards.
    """
    n, d = A.shape[0], ring.deg
    mod = ring.mod
    K = t_len
    poly = ring.zeros((K + 1,))
    poly[0] = ring.one()
    if n == 0:
        return poly
    big = _multiplication_matrix(ring, A)
    op = _LimbMatrix(big, mod)
    for i in range(n - 1, -1, -1):
        V = ring.zeros((K + 1,))
        V[0] = ring.one()
        if K >= 1:
            V[1] = (-A[i, i]) % mod
        row = A[i, i + 1:]
        vec = A[i + 1:, i]
        if len(vec) and K >= 2:
            start = (i + 1) * d
            v = vec.reshape(-1).astype(object)
            for s in range(K - 1):
                cur = v.reshape(-1, d).astype(ring.dtype)
                V[s + 2] = (-ring.sum(ring.mul(row, cur), axis=0)) % mod
                if s < K - 2:
                    v = op.apply(start, v).astype(object)
        poly = ring.series_mul(V, poly, K + 1)
    return poly


@dataclass
class DworkResult:
    polygon: Polygon | None
    slope_lt1: Polygon | None
    precision_used: int
    t_max_used: tuple[int, ...]
    valuations: list  # (k, Fraction or None for >= N)
    stabilized: bool
    bounds: dict[str, BoundReport] = field(default_factory=dict)
    history: list = field(default_factory=list)
    matrix: FrobeniusMatrix | None = None

    @property
    def bound_violations(self) -> list[str]:
        out = []
        for name, rep in self.bounds.items():
            out += [f"{name}: {v}" for v in rep.violations + rep.equality_misses]
        return out


def _polygon_from(ring: GammaRing, C: np.ndarray, length: int, ell: int):
    cap = ring.deg * ring.N
    vals = ring.valuation_scaled(C[: length + 1])
    pts = []
    for k, v in enumerate(vals):
        pts.append((k, Fraction(int(v), ring.deg) if v < cap else None))
    if pts[length][1] is None:
        raise PrecisionError(f"C_{length} is zero to precision {ring.N}")
    hull = lower_hull(pts)
    for k, y in pts:
        if y is None and hull(k) > ring.N:
            raise PrecisionError(f"unknown C_{k} could lie below the hull")
    if any(y >= ring.N for _, y in hull.vertices):
        raise PrecisionError("a vertex reaches the precision threshold")
    return pts, hull


def dwork_attempt(f: RationalFunction, N: int, t_max=None, check_bounds: bool = True) -> DworkResult:
    setup = prepare(f, N, t_max)
    ring = setup.ring
    ell, d = setup.ell, setup.f.d
    length = d - ell + 1
    M = frobenius_matrix(setup)
    C = fredholm_char_series(ring, M.entries, length)
    if ell == 1:
        # with no pole at 0 the trace formula sees x = 0 as well: divide by (1 - T)
        C = np.cumsum(C.astype(object), axis=0) % ring.mod
    pts, hull = _polygon_from(ring, C, length, ell)
    full = extend_by_slope(hull, Fraction(1), ell - 1) if ell > 1 else hull
    res = DworkResult(full, hull, N, setup.t_max, pts, False, matrix=M)
    if check_bounds:
        res.bounds["splitting"] = check_splitting_bounds(setup)
        res.bounds["local"] = check_local_bounds(M)
        res.bounds["unweighted"], res.bounds["weighted"] = check_matrix_bounds(M)
    return res


def dwork_newton_polygon(
    f: RationalFunction,
    precision: int | None = None,
    t_max=None,
    max_rounds: int = 3,
    check_bounds: bool = True,
) -> DworkResult:
    """Newton polygon of L via the Fredholm determinant; the computation is
    repeated with doubled precision and truncation until it repeats."""
    if f.a != 1:
        raise ValidationError("the p-adic engine handles a = 1 only")
    N = precision or f.d + 4
    T = tuple(t_max) if t_max is not None else tuple(d * (N + 1) + 1 for d in f.orders)
    history = []
    prev = None
    for _ in range(max_rounds + 1):
        try:
            res = dwork_attempt(f, N, T, check_bounds=check_bounds and prev is None)
        except PrecisionError as exc:
            history.append((N, T, str(exc)))
            res = None
        if res is not None:
            history.append((N, T, res.polygon))
            if prev is not None and prev.polygon == res.polygon:
                prev.stabilized = True
                prev.history = history
                return prev
            prev = res
        N, T = 2 * N, tuple(2 * t for t in T)
    if prev is None:
        raise PrecisionError(f"no usable precision up to N = {N // 2}: {history}")
    prev.history = history
    return prev


def row_minima(orders, count: int | None = None) -> list[Fraction]:
    """Lower bounds on weighted row valuations: n/d_J for J = 1, 2 and
    (n-1)/d_J for J >= 3; the constant row is omitted when l = 1."""
    ell = len(orders)
    out = []
    for J, dJ in enumerate(orders, start=1):
        lo = 0 if (J == 1 and ell > 1) else 1
        for n in range(lo, dJ + 2):
            out.append(Fraction(n, dJ) if J <= 2 else Fraction(n - 1, dJ))
    return sorted(out)


@dataclass(frozen=True)
class RowMinimaComparison:
    prefix: tuple[Fraction, ...]
    hodge_lt1: tuple[Fraction, ...]

    @property
    def matches(self) -> bool:
        return self.prefix == self.hodge_lt1


def hodge_bound_from_row_minima(orders, p: int | None = None) -> RowMinimaComparison:
    orders = tuple(orders)
    d = sum(orders) + len(orders) - 2
    length = d - len(orders) + 1
    hodge = tuple(s for s in hodge_slopes(orders) if s < 1)
    return RowMinimaComparison(tuple(row_minima(orders)[:length]), hodge)


@dataclass
class RowDiagnostic:
    block: int
    n: int
    minimum: Fraction | None
    argmin: list[tuple[int, int]]
    diagonal_attains: bool
    unique: bool


@dataclass
class EqualityDiagnostics:
    predicted_equality: bool
    rows: list[RowDiagnostic]
    offending_blocks: list[int]
    witnesses: dict[int, list[tuple[int, int]]]  # block -> (n, i_n) with i_n != n

    @property
    def diagonal_unique(self) -> bool:
        return all(r.diagonal_attains and r.unique for r in self.rows if r.minimum)


def m_lt1_rows(orders) -> list[tuple[int, int]]:
    out = []
    for J, d in enumerate(orders, start=1):
        rng = range(0, d) if J == 1 else range(1, d) if J == 2 else range(1, d + 1)
        out += [(J, n) for n in rng]
    return out


def equality_criterion_diagnostics(M: FrobeniusMatrix, orders=None) -> EqualityDiagnostics:
    setup = M.setup
    orders = tuple(orders or setup.orders)
    p, ring = setup.p, setup.ring
    cap = ring.deg * ring.N
    keys = m_lt1_rows(orders)
    pos = {k: M.index.index(k) for k in keys}
    vals = ring.valuation_scaled(M.entries)
    rows = []
    for J1, n in keys:
        weighted = {}
        for J, i in keys:
            v = int(vals[pos[J1, n], pos[J, i]])
            if v < cap:
                weighted[J, i] = Fraction(v, ring.deg) + weight_shift(setup, J1, J, n, i)
        if not weighted:
            rows.append(RowDiagnostic(J1, n, None, [], False, False))
            continue
        mn = min(weighted.values())
        arg = [k for k, w in weighted.items() if w == mn]
        rows.append(RowDiagnostic(J1, n, mn, arg, (J1, n) in arg, len(arg) == 1))
    offending = [J for J, d in enumerate(orders, start=1) if (p - 1) % d]
    witnesses = {}
    for J in offending:
        d = orders[J - 1]
        ws = []
        for J1, n in keys:
            if J1 != J:
                continue
            target = n * p if J <= 2 else (n - 1) * p + 1
            i_n = target % d or d
            if J <= 2 and i_n == d:
                continue
            if i_n != n:
                ws.append((n, i_n))
        witnesses[J] = ws
    pred = all((p - 1) % d == 0 for d in orders)
    return EqualityDiagnostics(pred, rows, offending, witnesses)
