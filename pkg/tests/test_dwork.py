import itertools
import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make
from newton_hodge.dwork.artin_hasse import artin_hasse_coefficients, artin_hasse_mod
from newton_hodge.dwork.fredholm import (
    dwork_newton_polygon,
    equality_criterion_diagnostics,
    fredholm_char_series,
    hodge_bound_from_row_minima,
    row_minima,
)
from newton_hodge.dwork.frobenius import (
    condition_C,
    frobenius_matrix,
    local_expansion,
    prepare,
    splitting_coefficients,
)
from newton_hodge.dwork.gamma_ring import (
    AtLeast,
    PadicInt,
    gamma_reduce,
    gamma_ring,
    gamma_valuation,
    matmul_mod,
    teichmuller_lift,
)
from newton_hodge.dwork.up_operator import check_up_coefficient, up_coefficient, up_table
from newton_hodge.errors import ValidationError
from newton_hodge.lseries import theorem_verdict


# -- Artin-Hasse -----------------------------------------------------------------

def exp_series_oracle(p, n_max):
    """exp(g) for g = sum x^{p^i}/p^i, summing g^k/k! as Fraction series."""
    g = [Fr(0)] * (n_max + 1)
    q = 1
    while q <= n_max:
        g[q] = Fr(1, q)
        q *= p
    out = [Fr(0)] * (n_max + 1)
    term = [Fr(1)] + [Fr(0)] * n_max
    for k in range(n_max + 1):
        out = [a + b for a, b in zip(out, term)]
        nxt = [Fr(0)] * (n_max + 1)
        for i, a in enumerate(term):
            if a:
                for j in range(1, n_max + 1 - i):
                    nxt[i + j] += a * g[j]
        term = [c / (k + 1) for c in nxt]
    return out


def test_artin_hasse_examples():
    e3 = artin_hasse_coefficients(3, 3)
    assert e3 == [1, 1, Fr(1, 2), Fr(1, 2)]
    assert artin_hasse_coefficients(2, 2)[2] == 1
    with pytest.raises(ValueError):
        artin_hasse_coefficients(3, -1)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_artin_hasse_matches_exp_oracle(p):
    e = artin_hasse_coefficients(p, 30)
    assert e == exp_series_oracle(p, 30)
    assert all(c.denominator % p for c in e)
    mod = p**6
    assert artin_hasse_mod(p, 30, mod) == [c.numerator * pow(c.denominator, -1, mod) % mod for c in e]


# -- p-adic scalars and the gamma ring ------------------------------------------------

def test_teichmuller():
    assert teichmuller_lift(0, 5, 3).value == 0
    assert teichmuller_lift(1, 5, 3).value == 1
    assert teichmuller_lift(2, 5, 2).value == 7
    for p, N in [(3, 5), (5, 4), (7, 3), (2, 6)]:
        for a in range(1, p):
            x = teichmuller_lift(a, p, N).value
            assert pow(x, p - 1, p**N) == 1 and x % p == a
            assert x == pow(a, p ** (N - 1), p**N)


def test_padic_int():
    x = PadicInt(18, 3, 4)
    assert x.valuation() == 2
    assert x.div_p().value == 6
    assert (x * PadicInt(2, 3, 4)).value == 36
    assert (x + PadicInt(70, 3, 4)).value == 88 % 81
    assert (x ** 2).value == 324 % 81


def test_relation_example():
    R = gamma_ring(3, 2)
    assert R.relation == (6, 0)
    g2 = gamma_reduce({2: 1}, R)
    assert g2.coeffs == (6, 0)
    assert gamma_valuation(g2) == 1
    assert gamma_reduce({1: 1}, R).coeffs == (0, 1)


@pytest.mark.parametrize("p,N", [(2, 3), (2, 12), (3, 3), (3, 10), (5, 4), (5, 9), (7, 3), (7, 7)])
def test_e_gamma_is_a_primitive_root_of_unity(p, N):
    """E(gamma) must be a primitive p-th root of unity: 1 + z + ... + z^{p-1} = 0."""
    R = gamma_ring(p, N)
    n_max = (p - 1) * N + p
    e = artin_hasse_mod(p, n_max, R.mod)
    z = gamma_reduce({m: e[m] for m in range(n_max + 1)}, R)
    acc, pw = R.element([0] * R.deg), R.element([1] + [0] * (R.deg - 1))
    for _ in range(p):
        acc, pw = acc + pw, pw * z
    assert acc.is_zero()
    assert pw == R.element([1] + [0] * (R.deg - 1))


def test_gamma_valuations():
    for p in (2, 3, 5, 7):
        R = gamma_ring(p, 4)
        one = gamma_reduce({0: 1}, R)
        g = gamma_reduce({1: 1}, R)
        assert gamma_valuation(one) == 0
        assert gamma_valuation(g) == Fr(1, p - 1)
        if p > 2:
            assert gamma_valuation(gamma_reduce({0: p, 1: 1}, R)) == Fr(1, p - 1)
        else:
            # ord p = ord gamma = 1 and 2 + gamma = -gamma^3/2 - ... cancels
            assert gamma_valuation(gamma_reduce({0: 2, 1: 1}, R)) == 2
        assert gamma_valuation(gamma_reduce({p - 1: 1}, R)) == 1
        assert gamma_valuation(gamma_reduce({}, R)) == AtLeast(4)
        for k in range(1, 3 * (p - 1)):
            assert gamma_valuation(gamma_reduce({k: 1}, R)) == Fr(k, p - 1)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(3, 6), (5, 5), (7, 4)]), st.data())
def test_gamma_multiplication_adds_valuations(pn, data):
    p, N = pn
    R = gamma_ring(p, N)
    draw = lambda: R.element([data.draw(st.integers(0, R.mod - 1)) for _ in range(R.deg)])
    x, y = draw(), draw()
    vx, vy, vxy = gamma_valuation(x), gamma_valuation(y), gamma_valuation(x * y)
    if isinstance(vx, Fr) and isinstance(vy, Fr) and vx + vy < N:
        assert vxy == vx + vy
    assert x * y == y * x


@pytest.mark.parametrize("mod", [7**5, 3**40, 5**30])
def test_matmul_mod_against_object_arithmetic(mod):
    rng = np.random.default_rng(mod % 1000)
    A = np.array([[int(v) % mod * 7919 % mod for v in row] for row in rng.integers(0, 2**62, (5, 7))], dtype=object)
    B = np.array([[int(v) % mod for v in row] for row in rng.integers(0, 2**62, (7, 3))], dtype=object)
    want = (A.dot(B)) % mod
    got = matmul_mod(A, B, mod, out_dtype=object)
    assert (got == want).all()


# -- U_p coefficients -----------------------------------------------------------------

def composition_oracle(p, n, m):
    total = 0
    for parts in itertools.product(range(1, p + 1), repeat=n):
        if sum(parts) == m:
            total += math.prod(math.comb(p, i) for i in parts)
    return Fr(m, n * p) * total


def test_up_examples():
    for p in (2, 3, 5):
        for n in range(1, 5):
            assert up_coefficient(p, n, n * p) == 1
            assert up_coefficient(p, n, n) == p ** (n - 1)
    assert up_coefficient(3, 1, 2) == 2
    assert check_up_coefficient(3, 1, 2) == []
    with pytest.raises(ValueError):
        up_coefficient(3, 1, 4)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_up_against_compositions(p):
    for n in range(1, 5):
        for m in range(n, n * p + 1):
            assert up_coefficient(p, n, m) == composition_oracle(p, n, m)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_up_triangular_identity(p):
    # U_p applied to X^{-m} expansions: binom(kp-1, kp-m) = sum_n C^{n,m} binom(k-1, k-n)
    for m in range(1, 9):
        for k in range(1, 9):
            lhs = math.comb(k * p - 1, k * p - m) if k * p >= m else 0
            rhs = sum(up_coefficient(p, n, m) * math.comb(k - 1, k - n)
                      for n in range(-(-m // p), min(m, k) + 1))
            assert lhs == rhs


def test_up_table_residues():
    t = up_table(3, 3, 27)
    assert t[1, 2] == 2 and t[2, 6] == 1


# -- splitting, local expansion, Frobenius ---------------------------------------------

def series_oracle(setup, j, n_max):
    """prod_i E(gamma a_i Y^i) multiplied out term by term with GammaElement."""
    R = setup.ring
    e = artin_hasse_mod(setup.p, n_max, R.mod)
    zero = R.element([0] * R.deg)
    acc = [R.element([1] + [0] * (R.deg - 1))] + [zero] * n_max
    for i, a in enumerate(setup.coeff_lifts[j - 1], start=1):
        fac = [zero] * (n_max + 1)
        for m in range(n_max // i + 1):
            fac[i * m] = gamma_reduce({m: e[m] * pow(a, m, R.mod)}, R)
        acc = [sum((acc[u] * fac[n - u] for u in range(n + 1)), zero) for n in range(n_max + 1)]
    return acc


def test_splitting_examples():
    s = prepare(make(3, [("inf", [0, 1])]), 4)
    F = splitting_coefficients(s, 1, 6)
    R = s.ring
    assert F[0].tolist() == [1, 0]
    assert F[1].tolist() == [0, 0]
    assert F[2].tolist() == [0, 1]
    assert gamma_valuation(R.element(F[2])) == Fr(1, 2)
    s5 = prepare(make(5, [("inf", [2]), ([0], [1])]), 3)
    F5 = splitting_coefficients(s5, 1, 3)
    lift = teichmuller_lift(2, 5, 3).value
    assert s5.ring.element(F5[1]) == gamma_reduce({1: lift}, s5.ring)
    assert gamma_valuation(s5.ring.element(F5[1])) == Fr(1, 4)


@pytest.mark.parametrize("case", [
    (3, [("inf", [1, 2])]),
    (5, [("inf", [0, 3, 1])]),
    (2, [("inf", [1, 0, 1])]),
    (7, [("inf", [1, 1])]),
])
def test_splitting_against_oracle(case):
    s = prepare(make(*case), 3)
    n_max = 10
    F = splitting_coefficients(s, 1, n_max)
    assert [s.ring.element(c) for c in F] == series_oracle(s, 1, n_max)


def test_single_pole_local_expansion():
    s = prepare(make(3, [("inf", [0, 1])]), 4)
    F = s.splitting[0]
    for i in (0, 1, 3):
        H = local_expansion(s, 1, 1, i, 12)
        for n in range(13):
            want = F[n - i] if n >= i else np.zeros(2, dtype=F.dtype)
            assert H[n].tolist() == want.tolist()


def laurent_oracle(setup, J1, J, m, i):
    """Coefficient of X^{+-m} in F_1(X) F_2(1/X) X^{+-i}."""
    F1, F2 = setup.splitting
    R = setup.ring
    e = m if J1 == 1 else -m
    s = i if J == 1 else -i
    acc = R.element([0] * R.deg)
    for u in range(len(F2)):
        k = e - s + u
        if 0 <= k < len(F1):
            acc = acc + R.element(F1[k]) * R.element(F2[u])
    return acc


@pytest.mark.parametrize("case", [
    (3, [("inf", [0, 1]), ([0], [0, 1])]),
    (5, [("inf", [1, 0, 2]), ([0], [3, 1])]),
])
def test_two_pole_local_expansion_against_laurent_product(case):
    s = prepare(make(*case), 3)
    for J1 in (1, 2):
        for J in (1, 2):
            for i in list(s.rows(J))[:4]:
                H = local_expansion(s, J1, J, i, 10)
                for m in range(0 if J1 == 1 else 1, 11):
                    assert s.ring.element(H[m]) == laurent_oracle(s, J1, J, m, i), (J1, J, m, i)


def test_frobenius_single_pole():
    s = prepare(make(3, [("inf", [0, 1])]), 4)
    M = frobenius_matrix(s)
    F = s.splitting[0]
    for r, (_, n) in enumerate(M.index):
        for c, (_, i) in enumerate(M.index):
            k = 3 * n - i
            want = F[k] if 0 <= k < len(F) else np.zeros(2, dtype=F.dtype)
            assert M.entries[r, c].tolist() == want.tolist()
    # diagonal valuations n/2 where the splitting equality applies
    R = s.ring
    for n in (1, 2):
        assert gamma_valuation(R.element(M.entries[n, n])) == Fr(n, 2)


@pytest.mark.parametrize("case", [
    (3, [("inf", [0, 1]), ([0], [0, 1])]),
    (5, [("inf", [1]), ([0], [1]), ([2], [1])]),
])
def test_constant_row(case):
    s = prepare(make(*case), 3)
    M = frobenius_matrix(s)
    row = M.entries[M.index.index((1, 0))]
    one = s.ring.element([1] + [0] * (s.ring.deg - 1))
    # B^{0,0} = 1 + sum_u F_{1,u} F_{2,u} + ..., so 1 up to positive valuation
    assert gamma_valuation(s.ring.element(row[0]) - one) > 0
    assert all(gamma_valuation(s.ring.element(x)) != 0 for x in row[1:])


def test_condition_c():
    assert condition_C(4, 2, 3) and not condition_C(6, 2, 3) and not condition_C(3, 2, 3)
    assert condition_C(0, 5, 2)


# -- Fredholm determinant -----------------------------------------------------------------

def minors_oracle(R, A, t_len):
    """C_k = (-1)^k * sum of k x k principal minors, via the Leibniz formula."""
    n = A.shape[0]
    el = lambda x: R.element(x)
    zero = R.element([0] * R.deg)
    out = [R.element([1] + [0] * (R.deg - 1))]
    for k in range(1, t_len + 1):
        tot = zero
        for S in itertools.combinations(range(n), k):
            for perm in itertools.permutations(range(k)):
                sign = 1
                for a in range(k):
                    for b in range(a + 1, k):
                        if perm[a] > perm[b]:
                            sign = -sign
                term = R.element([1] + [0] * (R.deg - 1))
                for a in range(k):
                    term = term * el(A[S[a], S[perm[a]]])
                tot = tot + term * ((-1) ** k * sign)
        out.append(tot)
    return out


def test_fredholm_small_cases():
    R = gamma_ring(5, 3)
    b = R.array([[[7, 3, 0, 1]]])
    C = fredholm_char_series(R, b, 2)
    assert R.element(C[1]) == -R.element(b[0, 0])
    assert R.element(C[2]).is_zero()
    D = R.zeros((2, 2))
    D[0, 0], D[1, 1] = R.array([1, 2, 0, 0]), R.array([0, 5, 1, 0])
    C = fredholm_char_series(R, D, 3)
    b1, b2 = R.element(D[0, 0]), R.element(D[1, 1])
    assert R.element(C[1]) == -(b1 + b2)
    assert R.element(C[2]) == b1 * b2
    assert R.element(C[3]).is_zero()


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(3, 4), (5, 3), (2, 8), (7, 40)]), st.integers(1, 4), st.data())
def test_fredholm_against_minors(pn, n, data):
    p, N = pn
    R = gamma_ring(p, N)
    vals = data.draw(st.lists(st.integers(0, R.mod - 1), min_size=n * n * R.deg, max_size=n * n * R.deg))
    A = R.array(np.array(vals, dtype=object).reshape(n, n, R.deg))
    C = fredholm_char_series(R, A, n + 1)
    want = minors_oracle(R, A, n + 1)
    assert [R.element(c) for c in C] == want


def test_fredholm_block_diagonal_is_product():
    R = gamma_ring(3, 5)
    rng = np.random.default_rng(3)
    A1 = R.array(rng.integers(0, R.mod, (2, 2, 2)))
    A2 = R.array(rng.integers(0, R.mod, (3, 3, 2)))
    A = R.zeros((5, 5))
    A[:2, :2], A[2:, 2:] = A1, A2
    full = fredholm_char_series(R, A, 5)
    prod = R.series_mul(fredholm_char_series(R, A1, 5), fredholm_char_series(R, A2, 5), 6)
    assert full.tolist() == prod.tolist()


# -- full pipeline ------------------------------------------------------------------------

@pytest.mark.parametrize("case", [
    (3, [("inf", [0, 1])]),
    (3, [("inf", [0, 1]), ([0], [0, 1])]),
    (3, [("inf", [0, 0, 0, 1])]),
    (5, [("inf", [1, 2]), ([1], [1])]),
])
def test_dwork_matches_direct(case):
    f = make(*case)
    res = dwork_newton_polygon(f)
    v = theorem_verdict(f)
    assert res.stabilized and res.polygon == v.newton
    assert not res.bound_violations


def test_dwork_rejects_extension_fields():
    with pytest.raises(ValidationError):
        dwork_newton_polygon(make(3, [("inf", [0, 1])], a=2))


def test_row_minima_examples():
    assert hodge_bound_from_row_minima([2]).prefix == (Fr(1, 2),)
    r = hodge_bound_from_row_minima([2, 2])
    assert r.prefix == (0, Fr(1, 2), Fr(1, 2)) and r.matches
    assert hodge_bound_from_row_minima([3]).prefix == (Fr(1, 3), Fr(2, 3))
    assert row_minima([2])[:3] == [Fr(1, 2), 1, Fr(3, 2)]


def test_equality_diagnostics():
    def diag(p, poles):
        f = make(p, poles)
        return equality_criterion_diagnostics(frobenius_matrix(prepare(f, 4)))

    d = diag(3, [("inf", [0, 1])])
    assert d.predicted_equality and d.diagonal_unique and not d.offending_blocks
    d = diag(3, [("inf", [0, 0, 0, 1])])
    assert not d.predicted_equality and d.offending_blocks == [1]
    assert (1, 3) in d.witnesses[1]
    d = diag(5, [("inf", [0, 0, 0, 1])])
    assert d.predicted_equality and d.diagonal_unique


def test_row_minima_reproduce_hodge_exhaustively():
    for ell in range(1, 5):
        for orders in itertools.product(range(1, 7), repeat=ell):
            if orders != (1,):
                assert hodge_bound_from_row_minima(orders).matches, orders


def test_diagonal_attains_row_minima_with_third_pole():
    f = make(5, [("inf", [1]), ([0], [1]), ([2], [0, 1])])
    d = equality_criterion_diagnostics(frobenius_matrix(prepare(f, 6)))
    assert d.predicted_equality
    assert all(r.diagonal_attains for r in d.rows if r.minimum)
    v = theorem_verdict(f)
    assert v.equals and dwork_newton_polygon(f).polygon == v.newton
