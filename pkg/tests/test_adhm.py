import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from kmcrystal import adhm
from kmcrystal.adhm import ADHMDatum, z0

R = sp.Rational


def scalar(b1, b2, i, j):
    return ADHMDatum(sp.Matrix([[b1]]), sp.Matrix([[b2]]), sp.Matrix([[i]]), sp.Matrix([[j]]))


def test_residual_examples():
    x = scalar(3, 5, 2, R(1, 2))
    assert adhm.moment_residual(x) == sp.Matrix([[1]])
    rng = random.Random(3)
    y = adhm.random_datum(rng, 3, 2)
    y = ADHMDatum(y.B1, sp.eye(3), y.i, y.j)
    assert adhm.moment_residual(y) == y.i * y.j
    z = adhm.random_datum(rng, 3, 2)
    z = ADHMDatum(z.B1, z.B2, z.i, sp.zeros(2, 3))
    assert adhm.moment_residual(z) == z.B1 * z.B2 - z.B2 * z.B1


def test_stability_examples():
    assert adhm.is_stable(scalar(0, 0, 1, 0))
    x = adhm.random_datum(random.Random(1), 3, 2)
    assert not adhm.is_stable(ADHMDatum(x.B1, x.B2, sp.zeros(3, 2), x.j))
    jordan = ADHMDatum(sp.Matrix([[0, 1], [0, 0]]), sp.zeros(2, 2), sp.Matrix([[0], [1]]), sp.zeros(1, 2))
    assert adhm.is_stable(jordan)
    assert not adhm.is_costable(jordan)


def test_costability_is_transpose_stability():
    rng = random.Random(7)
    for _ in range(10):
        x = adhm.random_datum(rng, 3, 1)
        t = ADHMDatum(x.B1.T, x.B2.T, x.j.T, x.i.T)
        assert adhm.is_costable(x) == adhm.is_stable(t)


def test_direct_sum_with_unframed_summand_unstable():
    rng = random.Random(5)
    x = adhm.random_datum(rng, 2, 1)
    y = adhm.random_datum(rng, 2, 1)
    y = ADHMDatum(y.B1, y.B2, sp.zeros(2, 1), y.j)
    assert adhm.is_stable(x)
    assert not adhm.is_stable(x.direct_sum(y))


def test_monad_examples():
    x = adhm.random_moment_solution(random.Random(2), 3)
    lhs, _, ok = adhm.monad_identity_check(x)
    assert ok and lhs.is_zero_matrix
    lhs, _, ok = adhm.monad_identity_check(scalar(1, 2, 3, R(1, 3)))
    assert ok and lhs == sp.Matrix([[z0**2]])
    lhs, _, ok = adhm.monad_identity_check(scalar(4, 7, 0, 0))
    assert ok and lhs.is_zero_matrix


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=4).map(lambda f: R(f.numerator, f.denominator))


@st.composite
def data(draw):
    a = draw(st.integers(0, 4))
    n = draw(st.integers(0, 4))

    def mat(r, c):
        vals = draw(st.lists(rationals, min_size=r * c, max_size=r * c))
        return sp.Matrix(r, c, vals) if r * c else sp.zeros(r, c)

    return ADHMDatum(mat(a, a), mat(a, a), mat(a, n), mat(n, a))


@settings(max_examples=40, deadline=None)
@given(data())
def test_monad_identity_property(x):
    lhs, rhs, ok = adhm.monad_identity_check(x)
    assert ok
    assert lhs.shape == (x.a, x.a)


def test_charpoly_examples():
    p1, p2 = adhm.charpoly_projections(scalar(3, R(1, 2), 1, 1))
    assert p1.as_expr() == adhm.X - 3 and p2.as_expr() == adhm.X - R(1, 2)
    rng = random.Random(4)
    x, y = adhm.random_datum(rng, 2, 1), adhm.random_datum(rng, 1, 1)
    s = x.direct_sum(y)
    assert adhm.charpoly_projections(s)[0] == adhm.charpoly_projections(x)[0] * adhm.charpoly_projections(y)[0]
    nil = ADHMDatum(sp.Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]]), sp.zeros(3, 3), sp.zeros(3, 1), sp.zeros(1, 3))
    assert adhm.charpoly_projections(nil)[0].as_expr() == adhm.X**3


def test_invariant_examples():
    x = adhm.random_datum(random.Random(6), 2, 2)
    x = ADHMDatum(x.B1, x.B2, x.i, sp.zeros(2, 2))
    inv = adhm.invariants(x, 2)
    assert all(v == 0 for k, v in inv.items() if k.startswith("T_W"))
    c = R(3, 2)
    inv = adhm.invariants(scalar(c, 1, 1, 0), 4)
    for k in range(1, 5):
        assert inv[f"tr[{'1' * k}]"] == c**k


def test_trace_identity_on_moment_solutions():
    x = adhm.random_moment_solution(random.Random(9), 3, 2)
    comm = x.B1 * x.B2 - x.B2 * x.B1
    ij = x.i * x.j
    for w in ("", "1", "12", "p2", "211"):
        m = adhm._eval_word(w, {"1": x.B1, "2": x.B2, "p": ij}, x.a)
        assert (comm * m).trace() == -(ij * m).trace()


def test_invariants_are_gl_invariant():
    rng = random.Random(11)
    for _ in range(5):
        x = adhm.random_datum(rng, 3, 2)
        y = x.conjugate(adhm.random_invertible(rng, 3))
        assert adhm.charpoly_projections(x) == adhm.charpoly_projections(y)
        assert adhm.invariants(x, 3) == adhm.invariants(y, 3)


def test_trace_reordering():
    rng = random.Random(12)
    for a in (2, 3, 4):
        x = adhm.random_moment_solution(rng, a, 2)
        assert all(v == 0 for k, v in adhm.invariants(x, 3).items() if k.startswith("T_W"))
        assert adhm.trace_reordering_report(x, 4) == []
    nc = adhm.noncommuting_solution()
    assert nc.B1 * nc.B2 != nc.B2 * nc.B1
    assert adhm.moment_residual(nc).is_zero_matrix
    assert adhm.trace_reordering_report(nc, 4) == []


def test_trace_reordering_detects_generic_data():
    x = adhm.random_datum(random.Random(13), 3, 1)
    assert adhm.trace_reordering_report(x, 4)


def test_json_round_trip_and_errors():
    x = adhm.random_datum(random.Random(14), 2, 1)
    assert ADHMDatum.from_json(x.to_json()) == x
    bad = x.to_json()
    bad["B1"] = [["1"]]
    with pytest.raises(adhm.ADHMError):
        ADHMDatum.from_json(bad)
    with pytest.raises(adhm.ADHMError):
        ADHMDatum.from_json({"a": 1})
