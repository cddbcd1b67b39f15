import random
from fractions import Fraction

import pytest

from vlasovsym.catalog import (make_case_a, make_case_b1, make_case_b2,
                               make_example1, make_example2_z2, make_standard)
from vlasovsym.expr import mono, par, T, R, V
from vlasovsym.fields import VectorField
from vlasovsym.grammar import (ParseError, format_expr, format_vfield,
                               parse_expr, parse_vfield, tokenize)

from conftest import random_expr


def test_parse_simple_polynomial():
    e = parse_expr("-t^2 - (2/1)*t*r")
    assert e == -(T ** 2) - 2 * T * R


def test_parse_z_exponent():
    assert parse_expr("v^(z/(1-z))", z=2) == mono(ev=-2)
    assert parse_expr("v^((2*z-1)/(1-z))", z=2) == mono(ev=-3)


def test_parse_z_in_coefficient():
    e = parse_expr("(z-2)/z * t", z=2)
    assert e.is_zero
    e = parse_expr("(2/z)*x*t", z=4)
    assert e == Fraction(1, 2) * par("x") * T


def test_parse_requires_z_value():
    with pytest.raises(ParseError):
        parse_expr("v^(z/(1-z))")


def test_parse_z_pole_is_reported():
    with pytest.raises(ParseError) as err:
        parse_expr("v^(z/(1-z))", z=1)
    assert "z-pole" in str(err.value)


def test_syntax_error_location():
    with pytest.raises(ParseError) as err:
        parse_expr("t^^2")
    assert err.value.col == 3
    assert err.value.line == 1


def test_unknown_identifier():
    with pytest.raises(ParseError):
        parse_expr("nonsense + t")


def test_marker_in_exponent_rejected():
    with pytest.raises(ParseError):
        parse_vfield("t^Dt")


def test_marker_products_rejected():
    with pytest.raises(ParseError):
        parse_vfield("Dt*Dr")
    with pytest.raises(ParseError):
        parse_vfield("t/(Dr)")


def test_marker_in_expr_context_rejected():
    with pytest.raises(ParseError):
        parse_expr("-Dt")


def test_parse_vfield_examples():
    assert parse_vfield("-Dt") == VectorField(at=-1)
    assert parse_vfield("-v*Dr") == VectorField(ar=-V)
    x1 = parse_vfield("-(t^2)*Dt - 2*t*r*Dr - mu*r^2*Dr - 2*x*t - 2*gamma*r")
    assert x1 == make_standard().basis[2]
    y_m1 = parse_vfield("-v*Dr - r^(1-2*z)*phi0*Dv", z=2)
    assert y_m1 == VectorField(ar=-V, av=-par("phi0") * mono(er=-3))


def test_print_canonical_order():
    assert format_expr(parse_expr("r*t")) == "t*r"
    assert format_expr(parse_expr("0")) == "0"
    assert format_vfield(VectorField()) == "0"


def test_roundtrip_catalog_generators():
    reps = (make_standard(), make_case_a(2), make_case_b1(2),
            make_case_b2(2), make_example1(2), make_example2_z2())
    for rep in reps:
        for gen in rep.basis + (rep.boltzmann,):
            text = format_vfield(gen)
            again = parse_vfield(text)
            assert again == gen, (rep.name, text)
        force_text = format_expr(rep.force)
        assert parse_expr(force_text) == rep.force


def test_roundtrip_random_exprs(rng):
    for _ in range(200):
        e = random_expr(rng)
        text = format_expr(e)
        assert parse_expr(text) == e, text


def test_fuzz_small():
    rng = random.Random(1234)
    pool = ["t", "r", "v", "z", "mu", "x", "gamma", "Dt", "Dr", "Dv", "(",
            ")", "+", "-", "*", "/", "^", "0", "1", "2", "17", "3", "foo",
            "_a", "#c"]
    crashes = 0
    for _ in range(5000):
        text = " ".join(rng.choice(pool)
                        for _ in range(rng.randint(1, 10)))
        try:
            parse_vfield(text, z=2 if rng.random() < 0.7 else None)
        except ParseError:
            pass
        except Exception:
            crashes += 1
    assert crashes == 0


def test_tokenizer_tracks_lines():
    tokens = tokenize("t +\n  r # comment\n+ v")
    lines = [tok.line for tok in tokens if tok.kind != "end"]
    assert lines == [1, 1, 2, 3, 3]


def test_whitespace_insensitive():
    a = parse_expr("t^2+mu*r")
    b = parse_expr("  t ^ 2   + mu * r ")
    assert a == b
