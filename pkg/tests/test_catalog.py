from fractions import Fraction

import pytest

from vlasovsym.catalog import (DegenerateSplitError, GEN_NAMES,
                               NoRationalWitness, Representation,
                               expected_multipliers, expected_remainder,
                               expected_structure_constants,
                               infer_structure_constants, load_representation,
                               make_case_a, make_case_b1, make_case_b2,
                               make_example1, make_example2_z2,
                               make_representation, make_standard,
                               make_standard_n, nogo_obstruction,
                               save_representation, split_isomorphism,
                               verify_example1_system,
                               verify_example2_closed_forms, verify_table,
                               with_generator_scaled)
from vlasovsym.expr import R, T, V, lit, mono, par
from vlasovsym.fields import VectorField, bracket, symmetry_multiplier
from vlasovsym.params import KernelError, ParamRat, PR_ZERO, ZPole


def test_standard_bracket_samples():
    rep = make_standard()
    x0, x1, y_m1, y0 = rep.basis[1], rep.basis[2], rep.basis[3], rep.basis[4]
    assert bracket(x0, y0).is_zero
    assert bracket(x1, y_m1) == y0.scale(lit(2))


def test_standard_transport_commutes_with_y():
    rep = make_standard()
    for idx in (3, 4, 5):
        rpt = symmetry_multiplier(rep.boltzmann, rep.basis[idx])
        assert rpt.ok and rpt.multiplier.is_zero and rpt.remainder.is_zero


def test_standard_requires_nonzero_mu():
    with pytest.raises(KernelError):
        make_standard(mu=0)


def test_standard_n_matches_low_levels():
    rep = make_standard()
    for n in (-1, 0, 1):
        xn, yn = make_standard_n(n=n)
        assert xn == rep.basis[n + 1]
        assert yn == rep.basis[n + 4]


def test_standard_n_level2_lowering():
    x2, _ = make_standard_n(n=2)
    x_m1 = make_standard().basis[0]
    x1 = make_standard().basis[2]
    assert bracket(x2, x_m1) == x1.scale(lit(3))


def test_standard_n_rejects_deep_negative():
    with pytest.raises(KernelError):
        make_standard_n(n=-2)


def test_standard_level2_affine_remainder():
    # [S, X2] = -3t^2 S + 6t(mu x - gamma): t-dependent scalar residue is
    # rejected by the affine contract at generic gamma
    x2, _ = make_standard_n(n=2)
    rep = make_standard()
    rpt = symmetry_multiplier(rep.boltzmann, x2)
    assert rpt.multiplier == -3 * T ** 2
    assert not rpt.ok
    mu, x = par("mu"), par("x")
    rep2 = make_standard(gamma=mu * x)
    x2b, _ = make_standard_n(gamma=mu * x, n=2)
    rpt2 = symmetry_multiplier(rep2.boltzmann, x2b)
    assert rpt2.ok and rpt2.remainder.is_zero
    assert rpt2.multiplier == -3 * T ** 2


def test_case_a_multiplier_and_table():
    rep = make_case_a(3)
    rpt = symmetry_multiplier(rep.boltzmann, rep.basis[2])
    assert rpt.ok and rpt.multiplier == -2 * T
    k, q, _ = infer_structure_constants(rep)
    assert k.is_zero
    assert q == -rep.coeffs["mu"].as_param_const()
    assert verify_table(rep).ok


def test_case_a_rejects_z0():
    with pytest.raises(ZPole):
        make_case_a(0)


def test_case_a_allows_z1():
    assert verify_table(make_case_a(1)).ok


def test_case_b1_zero_tail_is_case_a():
    rep_b1 = make_case_b1(2, a110=0)
    rep_a = make_case_a(2)
    assert rep_b1 == rep_a


def test_case_b1_multiplier():
    rep = make_case_b1(2)
    a, mu = rep.coeffs["A110"], rep.coeffs["mu"]
    rpt = symmetry_multiplier(rep.boltzmann, rep.basis[2])
    assert rpt.ok
    assert rpt.multiplier == -(2 * T + (a / mu) * mono(ev=-2))


def test_case_b1_rejects_z1():
    with pytest.raises(ZPole):
        make_case_b1(1)


def test_case_b2_structure():
    rep = make_case_b2(2)
    k, q, _ = infer_structure_constants(rep)
    mu = rep.coeffs["mu"].as_param_const()
    assert k == mu
    assert q == ParamRat.const(1) - mu
    assert bracket(rep.basis[4], rep.basis[3]) == (
        rep.basis[0].scale(rep.coeffs["mu"])
        + rep.basis[3].scale(1 - rep.coeffs["mu"]))


def test_example1_multipliers():
    rep = make_example1(2)
    mu, k = rep.coeffs["mu"], rep.coeffs["k"]
    y0 = symmetry_multiplier(rep.boltzmann, rep.basis[4])
    assert y0.ok and y0.multiplier == -(k / mu)
    x1 = symmetry_multiplier(rep.boltzmann, rep.basis[2])
    assert x1.ok
    assert x1.multiplier == -2 * (T + (k / (2 * mu)) * R * mono(ev=-1))
    kq = expected_structure_constants(rep)
    tab = verify_table(rep)
    assert tab.ok and tab.k == kq[0] and tab.q == kq[1]


def test_example2_z2_components():
    rep = make_example2_z2()
    mu, x, phi0 = (rep.coeffs[n] for n in ("mu", "x", "phi0"))
    # force is phi0 / r^3 and the space-translation analogue matches it
    assert rep.force == phi0 * mono(er=-3)
    assert rep.basis[3] == VectorField(ar=-V, av=-phi0 * mono(er=-3))
    # with both profile constants zero, d12(1) at mu = x = phi0 = 1 is -1/2
    plain = make_example2_z2(mu=1, x=1, phi0=1, b120=0, b121=0)
    x1 = plain.basis[2]
    val = x1.a0.evaluate(0.0, 1.0, 1.0, {})
    # scalar part of X1 is -(2/z) x t - r^z d12(u): at t=0, r=v=1 it is -d12(1)
    assert val == pytest.approx(0.5)


def test_example2_z2_symmetries():
    rep = make_example2_z2()
    for name, gen in zip(GEN_NAMES, rep.basis):
        rpt = symmetry_multiplier(rep.boltzmann, gen)
        assert rpt.ok and rpt.remainder.is_zero, name
        want = expected_multipliers(rep)[name]
        assert (rpt.multiplier - want).is_zero


def test_example2_closed_forms_exact():
    for res in verify_example2_closed_forms():
        assert res.ok, res.name


def test_verify_table_detects_corruption():
    rep = make_standard()
    bad = with_generator_scaled(rep, "X1")
    table = verify_table(bad)
    assert not table.ok
    failing = [p for p in table.pairs if not p.ok]
    assert failing
    assert any(p.computed is not None and not p.computed.exact
               or p.computed is not None for p in failing)


def test_expected_multipliers_and_remainders():
    reps = (make_standard(), make_case_a(2), make_case_b1(3),
            make_case_b2(2), make_example1(3))
    for rep in reps:
        mults = expected_multipliers(rep)
        for name, gen in zip(GEN_NAMES, rep.basis):
            rpt = symmetry_multiplier(rep.boltzmann, gen)
            assert rpt.ok, (rep.name, name)
            assert (rpt.multiplier - mults[name]).is_zero, (rep.name, name)
            assert rpt.remainder == expected_remainder(rep, name)


def test_split_case_b2_constants():
    mu = ParamRat.var("mu")
    witness = split_isomorphism(mu, ParamRat.const(1) - mu,
                                basis=make_case_b2(2).basis)
    assert witness.exact
    assert witness.alpha == ParamRat.const(1)
    assert witness.beta == mu
    assert witness.ok and witness.fields_ok


def test_split_k_zero():
    mu = ParamRat.var("mu")
    witness = split_isomorphism(PR_ZERO, -mu)
    assert witness.exact
    assert witness.alpha.is_zero
    assert witness.beta == mu
    assert witness.ok


def test_split_rational_pair():
    witness = split_isomorphism(Fraction(4), Fraction(0))
    assert witness.exact
    assert witness.alpha == ParamRat.const(2)
    assert witness.beta == ParamRat.const(2)
    assert witness.ok


def test_split_no_rational_witness_then_numeric():
    mu = ParamRat.var("mu")
    with pytest.raises(NoRationalWitness):
        split_isomorphism(mu, PR_ZERO)
    witness = split_isomorphism(mu, PR_ZERO, param_values={"mu": 4.0})
    assert not witness.exact
    assert witness.ok
    assert witness.max_residual <= 1e-12


def test_split_degenerate():
    with pytest.raises(DegenerateSplitError):
        split_isomorphism(Fraction(-1, 4), Fraction(1))


def test_nogo_zero_only_at_z1():
    assert nogo_obstruction(1).is_zero
    for z in (2, 3, -1, Fraction(1, 2)):
        field = nogo_obstruction(z)
        assert not field.is_zero
        value = max(abs(c.evaluate(1.0, 1.0, 1.0, {"mu": 1.0, "x": 1.0}))
                    for c in field.components())
        assert value > 1e-6


def test_nogo_z2_has_t2v_dr_term():
    field = nogo_obstruction(2)
    coeff = field.ar.num.terms.get((Fraction(2), Fraction(0), Fraction(1)))
    assert coeff is not None
    assert coeff.as_fraction() == Fraction(3, 4)


def test_example1_system_all_zero():
    for z in (2, 3):
        residuals = verify_example1_system(z)
        assert all(r.ok for r in residuals), [
            r.name for r in residuals if not r.ok]
        names = {r.name for r in residuals}
        assert {"eq1", "eq7", "eq16bis", "eq24", "eq3bis"} <= names


def test_example1_system_rejects_z1():
    with pytest.raises(ZPole):
        verify_example1_system(1)


def test_serialization_roundtrip(tmp_path):
    reps = (make_standard(), make_case_a(2), make_case_b2(3),
            make_example1(2, k=Fraction(1, 2)))
    for rep in reps:
        path = tmp_path / f"{rep.name}.rep"
        save_representation(rep, path)
        loaded = load_representation(path)
        assert loaded == rep, rep.name
        assert loaded.name == rep.name


def test_make_representation_dispatch():
    rep = make_representation("caseA", 2, mu=Fraction(1))
    assert rep.name == "caseA"
    with pytest.raises(KernelError):
        make_representation("nonsense", 2)
    with pytest.raises(KernelError):
        make_representation("caseA")
    with pytest.raises(KernelError):
        make_representation("example2_z2", 3)
