import random
from fractions import Fraction

import pytest

from vlasovsym.expr import Expr, GPoly, mono, par, lit
from vlasovsym.params import ParamPoly, ParamRat

_PARAM_POOL = ("mu", "x", "gamma", "k", "phi0")


def random_param_rat(rng: random.Random, allow_fraction=True) -> ParamRat:
    num = _random_param_poly(rng)
    while num.is_zero:
        num = _random_param_poly(rng)
    if allow_fraction and rng.random() < 0.3:
        den = _random_param_poly(rng)
        while den.is_zero:
            den = _random_param_poly(rng)
        return ParamRat(num, den)
    return ParamRat(num)


def _random_param_poly(rng: random.Random) -> ParamPoly:
    poly = ParamPoly.const(0)
    for _ in range(rng.randint(1, 2)):
        coeff = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        term = ParamPoly.const(coeff)
        if rng.random() < 0.5:
            term = term * ParamPoly.var(rng.choice(_PARAM_POOL))
        poly = poly + term
    return poly


def random_gpoly(rng: random.Random, laurent=True, max_terms=2) -> GPoly:
    exps = (Fraction(-2), Fraction(-1), Fraction(0), Fraction(1),
            Fraction(2), Fraction(1, 2), Fraction(-3, 2))
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        if laurent:
            m = (rng.choice(exps), rng.choice(exps), rng.choice(exps))
        else:
            m = (Fraction(rng.randint(0, 2)), Fraction(rng.randint(0, 2)),
                 Fraction(rng.randint(0, 2)))
        terms[m] = random_param_rat(rng, allow_fraction=False)
    return GPoly(terms)


def random_expr(rng: random.Random, with_denominator=True) -> Expr:
    num = random_gpoly(rng)
    if with_denominator and rng.random() < 0.3:
        den = random_gpoly(rng, max_terms=2)
        while den.is_zero:
            den = random_gpoly(rng, max_terms=2)
        return Expr(num, den)
    return Expr(num)


def random_polynomial_expr(rng: random.Random) -> Expr:
    """Low-degree polynomial expressions, safe for Jacobi-style products."""
    return Expr(random_gpoly(rng, laurent=False))


@pytest.fixture
def rng():
    return random.Random(20260809)
