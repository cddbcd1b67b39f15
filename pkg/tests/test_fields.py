import pytest

from vlasovsym.expr import Expr, R, T, V, lit, par
from vlasovsym.fields import (DegenerateBasisError, VectorField, bracket,
                              expand_in_basis, symmetry_multiplier)
from vlasovsym.catalog import make_standard, make_case_b2
from vlasovsym.params import KernelError

from conftest import random_polynomial_expr


def _random_field(rng):
    return VectorField(random_polynomial_expr(rng),
                       random_polynomial_expr(rng),
                       random_polynomial_expr(rng),
                       random_polynomial_expr(rng))


def test_apply_examples():
    mu, x = par("mu"), par("x")
    d_t = VectorField(at=lit(-1))
    assert d_t.apply(T ** 2) == -2 * T

    transport = VectorField(at=mu, ar=V)
    assert transport.apply(R - V * T / mu).is_zero

    scaling = VectorField(at=-T, ar=-R, a0=-x)
    assert scaling.apply(lit(1)) == -x


def test_bracket_lowering():
    x0 = VectorField(at=-T, ar=-R, a0=-par("x"))
    x_m1 = VectorField(at=lit(-1))
    assert bracket(x0, x_m1) == x_m1


def test_bracket_standard_y_family():
    rep = make_standard()
    mu = rep.coeffs["mu"]
    y0, y_m1 = rep.basis[4], rep.basis[3]
    assert bracket(y0, y_m1) == y_m1.scale(mu)


def test_bracket_antisymmetry_random(rng):
    for _ in range(10):
        x = _random_field(rng)
        y = _random_field(rng)
        assert (bracket(x, y) + bracket(y, x)).is_zero
    x = _random_field(rng)
    assert bracket(x, x).is_zero


def test_jacobi_random(rng):
    for _ in range(5):
        x = _random_field(rng)
        y = _random_field(rng)
        z = _random_field(rng)
        total = (bracket(bracket(x, y), z) + bracket(bracket(y, z), x)
                 + bracket(bracket(z, x), y))
        assert total.is_zero


def test_bracket_is_commutator_of_actions(rng):
    for _ in range(5):
        x = _random_field(rng)
        y = _random_field(rng)
        f = random_polynomial_expr(rng)
        lhs = bracket(x, y).apply(f)
        rhs = x.apply(y.apply(f)) - y.apply(x.apply(f))
        assert (lhs - rhs).is_zero


def test_symmetry_multiplier_affine_remainder():
    rep = make_standard()
    mu, x, gamma = (rep.coeffs[n] for n in ("mu", "x", "gamma"))
    report = symmetry_multiplier(rep.boltzmann, rep.basis[2])
    assert report.ok
    assert report.multiplier == -2 * T
    assert report.remainder == (2 * (mu * x - gamma)).as_param_const()
    assert not report.strict


def test_symmetry_multiplier_reconstruction():
    # whenever ok, multiplier * op + remainder reproduces the commutator
    rep = make_case_b2(2)
    op = rep.boltzmann
    for gen in rep.basis:
        rpt = symmetry_multiplier(op, gen)
        assert rpt.ok
        comm = bracket(op, gen)
        rebuilt = op.scale(rpt.multiplier)
        rebuilt = VectorField(rebuilt.at, rebuilt.ar, rebuilt.av,
                              rebuilt.a0 + Expr.of(rpt.remainder))
        assert comm == rebuilt


def test_symmetry_multiplier_requires_constant_pivot():
    bad = VectorField(at=T, ar=V)
    with pytest.raises(KernelError):
        symmetry_multiplier(bad, VectorField(at=lit(-1)))
    with pytest.raises(KernelError):
        symmetry_multiplier(VectorField(at=lit(0), ar=V),
                            VectorField(at=lit(-1)))


def test_expand_in_basis_member():
    rep = make_standard()
    expansion = expand_in_basis(rep.basis[0], rep.basis)
    assert expansion.exact
    assert expansion.coefficients[0].is_one
    assert all(c.is_zero for c in expansion.coefficients[1:])


def test_expand_in_basis_outside_span():
    rep = make_standard()
    w = VectorField(at=T ** 3)
    expansion = expand_in_basis(w, rep.basis)
    assert not expansion.exact


def test_expand_in_basis_case_b2_bracket():
    rep = make_case_b2(3)
    mu = rep.coeffs["mu"].as_param_const()
    comm = bracket(rep.basis[4], rep.basis[3])
    expansion = expand_in_basis(comm, rep.basis)
    assert expansion.exact
    assert expansion.coefficients[0] == mu
    from vlasovsym.params import PR_ONE
    assert expansion.coefficients[3] == PR_ONE - mu


def test_expand_in_basis_degenerate():
    rep = make_standard()
    basis = list(rep.basis)
    basis[1] = basis[0]
    with pytest.raises(DegenerateBasisError):
        expand_in_basis(rep.basis[2], tuple(basis))
