import pytest
from hypothesis import given, settings, strategies as st

from conftest import make
from oracles import scalar_counts
from newton_hodge.errors import TrivialCaseError, ValidationError
from newton_hodge.finite_fields import build_field
from newton_hodge.lseries import exp_sum_counts
from newton_hodge.rational_functions import drop_constant, evaluate, normalize, shift, validate


def test_single_pole(x2_f3):
    assert (x2_f3.d, x2_f3.lcm_d, x2_f3.ell) == (1, 2, 1)


def test_two_poles(x2_xinv2):
    assert x2_xinv2.d == 4 and x2_xinv2.orders == (2, 2)


def test_rejections():
    with pytest.raises(ValidationError, match="divides"):
        make(2, [("inf", [1, 1])])
    with pytest.raises(ValidationError):
        make(3, [([0], [1])])  # no pole at infinity
    with pytest.raises(ValidationError):
        make(3, [("inf", [1, 0])])  # zero leading coefficient
    with pytest.raises(ValidationError):
        make(3, [("inf", [1]), ([1], [1]), ([1], [2])])
    with pytest.raises(ValidationError):
        make(3, [("inf", [[1, 1]])])  # too many coordinates for F_3
    with pytest.raises(ValidationError):
        make(3, [])
    with pytest.raises(TrivialCaseError):
        make(5, [("inf", [3])])


def test_infinity_moved_first():
    f = make(5, [([2], [1]), ("inf", [0, 1])])
    assert f.poles[0].at_infinity and f.poles[1].location.coeffs == (2,)


def test_shift_identity(x2_xinv2):
    F = x2_xinv2.field
    assert shift(x2_xinv2, F.zero()) == x2_xinv2


def test_shift_binomial(x2_f3):
    F = x2_f3.field
    g = shift(x2_f3, F.one())
    # (x+1)^2 = x^2 + 2x + 1
    assert [c.coeffs[0] for c in g.poles[0].coeffs] == [2, 1]
    assert g.constant == F.one()
    assert drop_constant(g).constant.is_zero()


def test_shift_keeps_sums_and_dropping_constant_twists_them(x2_f3):
    g = shift(x2_f3, x2_f3.field.one())
    assert exp_sum_counts(g, 1).counts == exp_sum_counts(x2_f3, 1).counts == (1, 2, 0)
    # dropping the constant 1 lowers every trace by Tr(1) = k mod 3
    for k in (1, 2):
        a, b = exp_sum_counts(x2_f3, k).counts, exp_sum_counts(drop_constant(g), k).counts
        assert b == tuple(a[(c + k) % 3] for c in range(3))
    assert exp_sum_counts(drop_constant(g), 1).counts == (2, 0, 1)


def test_normalize():
    f = make(3, [("inf", [1]), ([0], [1])])
    assert normalize(f) == f
    g = make(3, [("inf", [0, 1]), ([1], [0, 1])])
    n = normalize(g)
    assert n.poles[1].location.is_zero() and n.shift == g.field.one()
    assert n.is_normalized()
    h = make(3, [("inf", [0, 1])])
    assert normalize(h) is h


def test_normalize_orders_zero_first():
    f = make(5, [("inf", [1]), ([3], [1]), ([0], [2]), ([1], [1])])
    locs = [P.location.coeffs[0] for P in normalize(f).poles[1:]]
    assert locs == [0, 1, 3]


def test_evaluate(x2_f3, x2_xinv2):
    F = x2_f3.field
    assert evaluate(x2_f3, F.scalar(2)) == F.one()
    assert evaluate(x2_xinv2, F.scalar(1)) == F.scalar(2)
    assert evaluate(x2_xinv2, F.scalar(2)) == F.scalar(2)
    with pytest.raises(ZeroDivisionError):
        evaluate(x2_xinv2, F.zero())
    with pytest.raises(ValueError):
        evaluate(x2_xinv2, build_field(5, 1).one())


@st.composite
def rational_functions(draw, p=None, a=1):
    p = p or draw(st.sampled_from([2, 3, 5]))
    F = build_field(p, a)
    coeff = st.integers(0, F.order - 1)
    poles = []
    locs = draw(st.lists(st.integers(0, F.order - 1), max_size=2, unique=True))
    for loc in [None] + locs:
        d = draw(st.integers(1, 3).filter(lambda d: d % p))
        cs = [F.from_index(draw(coeff)) for _ in range(d - 1)] + [F.from_index(draw(st.integers(1, F.order - 1)))]
        poles.append(("inf" if loc is None else F.from_index(loc), cs))
    if len(poles) == 1 and len(poles[0][1]) == 1:
        poles[0] = ("inf", [F.zero(), F.one()] if p != 2 else [F.zero(), F.zero(), F.one()])
    return validate(F, poles)


@settings(max_examples=25, deadline=None)
@given(rational_functions(), st.data())
def test_shift_invariance_of_counts(f, data):
    c = f.field.from_index(data.draw(st.integers(0, f.q - 1)))
    g = shift(f, c)
    for k in (1, 2):
        assert exp_sum_counts(g, k).counts == exp_sum_counts(f, k).counts


@settings(max_examples=25, deadline=None)
@given(rational_functions())
def test_vectorized_counts_match_scalar_oracle(f):
    for k in (1, 2):
        assert exp_sum_counts(f, k).counts == scalar_counts(f, k)


@pytest.mark.parametrize("p,a,k", [(3, 1, 4), (3, 2, 2), (5, 1, 2), (2, 2, 2)])
def test_shift_commutes_with_evaluation(p, a, k):
    from newton_hodge.finite_fields import embed, enumerate_field

    F = build_field(p, a)
    g = F.from_index(F.order - 1)
    d = 3 if p == 2 else 2
    f = validate(F, [("inf", [F.one()] * (d - 1) + [g]), (F.one(), [g] * d)])
    for c in enumerate_field(F):
        g = shift(f, c)
        ce = embed(c, k)
        for x in enumerate_field(F, k):
            try:
                want = evaluate(f, x + ce)
            except ZeroDivisionError:
                with pytest.raises(ZeroDivisionError):
                    evaluate(g, x)
                continue
            assert evaluate(g, x) == want
