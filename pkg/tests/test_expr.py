import math
import random
from fractions import Fraction

import pytest

from vlasovsym.expr import (Expr, R, T, V, lit, mono, mono_pow, par,
                            subst_z)
from vlasovsym.params import (DivisionByZero, DomainError, PoleError, ZPole)

from conftest import random_expr


def test_exponent_addition():
    e = mono(et=Fraction(1, 2)) * mono(et=Fraction(3, 2))
    assert e == T ** 2


def test_binomial_identity():
    mu = par("mu")
    lhs = (T + mu * R) ** 2
    rhs = T ** 2 + 2 * mu * T * R + mu ** 2 * R ** 2
    assert (lhs - rhs).is_zero


def test_parameter_fraction_coefficient():
    mu, k = par("mu"), par("k")
    c = (k - mu ** 2) / mu
    assert (c * mu - (k - mu ** 2)).is_zero
    assert c.as_param_const() is not None


def test_division_by_zero_expr():
    with pytest.raises(DivisionByZero):
        T / (V - V)


def test_diff_power_rule():
    assert mono(ev=-2).diff("v") == -2 * mono(ev=-3)
    assert (T ** 2 * R).diff("t") == 2 * T * R
    assert mono(ev=Fraction(1, 2)).diff("v") == mono(
        ev=Fraction(-1, 2), coeff=Fraction(1, 2))


def test_diff_quotient_rule_closed_form():
    phi0 = par("phi0")
    e = R * V / (R ** 2 * V ** 2 + phi0)
    expect = V * (phi0 - R ** 2 * V ** 2) / (R ** 2 * V ** 2 + phi0) ** 2
    assert (e.diff("r") - expect).is_zero


def test_diff_matches_finite_difference():
    phi0 = par("phi0")
    e = R * V / (R ** 2 * V ** 2 + phi0)
    de = e.diff("r")
    params = {"phi0": 1.0}
    for (rr, vv) in ((1.0, 1.0), (1.3, 0.7)):
        h = 1e-6
        fd = (e.evaluate(0, rr + h, vv, params)
              - e.evaluate(0, rr - h, vv, params)) / (2 * h)
        assert de.evaluate(0, rr, vv, params) == pytest.approx(fd, abs=1e-8)


def test_subst_z_templates():
    tpl = lambda z: mono(ev=z / (1 - z))
    assert subst_z(tpl, 2) == mono(ev=-2)
    tpl2 = lambda z: mono(ev=(2 * z - 1) / (1 - z))
    assert subst_z(tpl2, 2) == mono(ev=-3)
    tpl3 = lambda z: lit((z - 2) / z)
    assert subst_z(tpl3, 2).is_zero


def test_subst_z_pole():
    tpl = lambda z: mono(ev=z / (1 - z))
    with pytest.raises(ZPole):
        subst_z(tpl, 1)


def test_is_zero_examples():
    assert (T * V - V * T).is_zero
    assert lit(0).is_zero
    mu, k = par("mu"), par("k")
    assert not ((k - mu ** 2) / mu).is_zero


def test_is_zero_soundness_random(rng):
    for _ in range(100):
        e = random_expr(rng)
        assert not e.is_zero  # generator never produces the zero function
        assert (e - e).is_zero


def test_evaluate():
    assert (T ** 2).evaluate(3.0, 0.0, 0.0) == 9.0
    k = par("k")
    e = (k / 2) * mono(er=-1, ev=-1)
    assert e.evaluate(0.0, 2.0, 1.0, {"k": 1.0}) == pytest.approx(0.25)


def test_evaluate_branch_restriction():
    with pytest.raises(DomainError):
        mono(ev=Fraction(1, 2)).evaluate(0.0, 0.0, -1.0)
    with pytest.raises(PoleError):
        mono(ev=-1).evaluate(0.0, 0.0, 0.0)
    with pytest.raises(PoleError):
        (lit(1) / (T - lit(1))).evaluate(1.0, 0.0, 0.0)


def test_eval_subst_consistency():
    # float evaluation of an instantiated template must match evaluating
    # the same formula directly in floating point
    cases = [Fraction(2), Fraction(3), Fraction(-1), Fraction(1, 2)]
    point = (0.7, 1.3, 1.9)
    for z in cases:
        tpl = lambda zz: mono(ev=zz / (1 - zz)) * lit(2 / zz)
        e = subst_z(tpl, z)
        got = e.evaluate(*point)
        zf = float(z)
        want = point[2] ** (zf / (1 - zf)) * (2 / zf)
        assert got == pytest.approx(want, rel=1e-12)


def test_ring_axioms_random(rng):
    for _ in range(25):
        a = random_expr(rng)
        b = random_expr(rng)
        c = random_expr(rng)
        assert ((a + b) + c - (a + (b + c))).is_zero
        assert (a * (b + c) - (a * b + a * c)).is_zero
        assert (a * b - b * a).is_zero


def test_leibniz_random(rng):
    for _ in range(12):
        a = random_expr(rng)
        b = random_expr(rng, with_denominator=False)
        for var in ("t", "r", "v"):
            lhs = (a * b).diff(var)
            rhs = a.diff(var) * b + a * b.diff(var)
            assert (lhs - rhs).is_zero


def test_as_param_const():
    mu = par("mu")
    assert ((T + R) * mu / (T + R)).as_param_const() is not None
    assert (T * mu).as_param_const() is None
    assert lit(0).as_param_const().is_zero


def test_mono_pow():
    assert mono_pow(R * V, Fraction(1, 2)) == mono(er=Fraction(1, 2),
                                                   ev=Fraction(1, 2))
    with pytest.raises(Exception):
        mono_pow(T + R, Fraction(1, 2))


def test_compiled_matches_evaluate(rng):
    params = {"mu": 1.5, "x": 0.5, "gamma": -2.0, "k": 3.0, "phi0": 1.0}
    for _ in range(10):
        e = random_expr(rng)
        fn = e.compiled(params)
        for pt in ((0.5, 1.0, 2.0), (1.1, 0.7, 1.3)):
            try:
                want = e.evaluate(*pt, params)
            except (PoleError, DomainError):
                continue
            assert fn(*pt) == pytest.approx(want, rel=1e-12)
