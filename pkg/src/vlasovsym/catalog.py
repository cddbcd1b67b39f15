"""Catalog of conformal-algebra representations acting on (t, r, v).

Each entry bundles six generators ordered (X-1, X0, X1, Y-1, Y0, Y1), the
transport operator they are dynamical symmetries of, and the force term.
Structure verification infers the Y-Y bracket constants (k, q) from
[Y0, Y-1] and then checks all fifteen unordered bracket pairs against the
(n-m)-weighted expansions, so the sign convention of each family is
self-calibrating.  All checks are exact; the pair checks are independent
pure computations and may run in any order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import E_ZERO, Expr, GPoly, R, T, V, lit, mono, par
from .fields import (BasisExpansion, VectorField, bracket, expand_in_basis,
                     symmetry_multiplier)
from .params import KernelError, ParamRat, PR_ONE, PR_ZERO, ZPole

GEN_NAMES = ("X-1", "X0", "X1", "Y-1", "Y0", "Y1")
GEN_LABELS = ("X[-1]", "X[0]", "X[1]", "Y[-1]", "Y[0]", "Y[1]")
_FAMILY = (("X", -1), ("X", 0), ("X", 1), ("Y", -1), ("Y", 0), ("Y", 1))
_SLOT = {fam: i for i, fam in enumerate(_FAMILY)}

REPRESENTATIONS = ("standard", "caseA", "caseB1", "caseB2", "example1",
                   "example2_z2")


class DegenerateSplitError(KernelError):
    """q^2 + 4k vanishes; the two commuting families coincide."""


class NoRationalWitness(KernelError):
    """q^2 + 4k is not a perfect square in the parameter field."""


@dataclass(frozen=True, eq=False)
class Representation:
    name: str
    z: Fraction | None
    coeffs: dict[str, Expr]
    params: dict[str, str]
    basis: tuple[VectorField, ...]
    boltzmann: VectorField
    force: Expr

    def generator(self, label: str) -> VectorField:
        label = label.strip()
        if label in GEN_NAMES:
            return self.basis[GEN_NAMES.index(label)]
        if label in GEN_LABELS:
            return self.basis[GEN_LABELS.index(label)]
        raise KernelError(f"unknown generator {label!r}; "
                          f"expected one of {', '.join(GEN_NAMES)}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Representation):
            return NotImplemented
        return (all(a == b for a, b in zip(self.basis, other.basis))
                and self.boltzmann == other.boltzmann
                and self.force == other.force)


def _coeff(name: str, value) -> Expr:
    if value is None:
        return par(name)
    if isinstance(value, Expr):
        return value
    return lit(Fraction(value))


def _display(value) -> str:
    if value is None:
        return "symbolic"
    if isinstance(value, Expr):
        from .grammar import format_expr
        return format_expr(value)
    return str(Fraction(value))


def _require_nonzero(name: str, e: Expr):
    if e.is_zero:
        raise KernelError(f"{name} must be nonzero for this representation")


# ---------------------------------------------------------------------------
# velocity-free family (acts on (t, r) only)
# ---------------------------------------------------------------------------

def make_standard(mu=None, x=None, gamma=None) -> Representation:
    """Six generators with z = 1 acting on (t, r); operator -mu*Dt + Dr."""
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    g = _coeff("gamma", gamma)
    _require_nonzero("mu", m)
    basis = tuple(_standard_pair_fields(m, xx, g, n) for n in (-1, 0, 1))
    xs = tuple(b[0] for b in basis)
    ys = tuple(b[1] for b in basis)
    op = VectorField(at=-m, ar=lit(1))
    return Representation(
        "standard", None, {"mu": m, "x": xx, "gamma": g},
        {"mu": _display(mu), "x": _display(x), "gamma": _display(gamma)},
        xs + ys, op, E_ZERO)


def _standard_pair_fields(m: Expr, xx: Expr, g: Expr, n: int):
    tmr = T + m * R
    x_n = VectorField(
        at=-T ** (n + 1),
        ar=-(tmr ** (n + 1) - T ** (n + 1)) / m,
        a0=(-(n + 1) * xx * T ** n - (n + 1) * (g / m) * (tmr ** n - T ** n)
            if n >= 0 else E_ZERO),
    )
    y_n = VectorField(
        ar=-tmr ** (n + 1),
        a0=-(n + 1) * g * tmr ** n if n >= 0 else E_ZERO,
    )
    return x_n, y_n


def make_standard_n(mu=None, x=None, gamma=None, n: int = 1
                    ) -> tuple[VectorField, VectorField]:
    """The (X_n, Y_n) pair of the velocity-free family for any n >= -1.

    For n <= -2 the generators involve negative powers of (t + mu*r),
    which are not representable as finite monomial sums.
    """
    if n < -1:
        raise KernelError("n <= -2 needs negative powers of (t + mu*r); "
                          "unsupported")
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    g = _coeff("gamma", gamma)
    _require_nonzero("mu", m)
    return _standard_pair_fields(m, xx, g, n)


# ---------------------------------------------------------------------------
# velocity-extended families (force-free transport mu*Dt + v*Dr)
# ---------------------------------------------------------------------------

def _x_minus1() -> VectorField:
    return VectorField(at=lit(-1))

def _x0(zq: Fraction, xx: Expr) -> VectorField:
    return VectorField(at=-T, ar=-R / zq, av=-((1 - zq) / zq) * V,
                       a0=-xx / zq)


def make_case_a(z, mu=None, x=None) -> Representation:
    """Force-free representation with all free constants set to zero."""
    zq = Fraction(z)
    if zq == 0:
        raise ZPole("z = 0 is not admissible (1/z coefficients)")
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    _require_nonzero("mu", m)
    iv = mono(ev=-1)
    x1 = VectorField(
        at=-T ** 2,
        ar=-((2 / zq) * T * R + ((zq - 2) / zq) * m * R ** 2 * iv),
        av=-(2 * (1 - zq) / zq) * (V * T - m * R),
        a0=-(2 / zq) * xx * T + (2 / zq) * m * xx * R * iv,
    )
    y_m1 = VectorField(ar=-V)
    y0 = VectorField(ar=-(T * V - (m / zq) * R),
                     av=-((zq - 1) / zq) * m * V,
                     a0=m * xx / zq)
    y1 = VectorField(
        ar=-(T ** 2 * V - (2 / zq) * m * T * R
             - ((zq - 2) / zq) * m ** 2 * R ** 2 * iv),
        av=-(2 / zq) * (zq - 1) * m * (V * T - m * R),
        a0=(2 / zq) * m * xx * T - (2 / zq) * m ** 2 * xx * R * iv,
    )
    op = VectorField(at=m, ar=V)
    return Representation(
        "caseA", zq, {"mu": m, "x": xx},
        {"z": str(zq), "mu": _display(mu), "x": _display(x)},
        (_x_minus1(), _x0(zq, xx), x1, y_m1, y0, y1), op, E_ZERO)


def make_case_b1(z, mu=None, x=None, a110=None) -> Representation:
    """Force-free representation keeping the one-parameter tail A110.

    Requires z != 1: the tail exponents carry 1/(1-z) poles, so A110 must
    be set to zero before taking z -> 1.
    """
    zq = Fraction(z)
    if zq == 0:
        raise ZPole("z = 0 is not admissible (1/z coefficients)")
    if zq == 1:
        raise ZPole("z = 1 hits the exponent pole 1/(1-z); "
                    "set A110 = 0 before z -> 1")
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    a = _coeff("A110", a110)
    _require_nonzero("mu", m)
    # exponents built from z; all poles excluded above
    ez = zq / (1 - zq)
    e2z1 = (2 * zq - 1) / (1 - zq)
    e2z = 2 * zq / (1 - zq)
    ez1 = (zq + 1) / (1 - zq)
    e1z = 1 / (1 - zq)
    iv = mono(ev=-1)
    vez, ve2z1, ve2z, vez1, ve1z = (mono(ev=e) for e in
                                    (ez, e2z1, e2z, ez1, e1z))
    x1 = VectorField(
        at=-(T ** 2 + a * R * ve2z1 + (a ** 2 / (4 * m ** 2)) * ve2z),
        ar=-((2 / zq) * T * R + ((zq - 2) / zq) * m * R ** 2 * iv
             + (a / m) * R * vez + (a ** 2 / (4 * m ** 3)) * vez1),
        av=-(2 * (1 - zq) / zq) * (V * T - m * R),
        a0=-(2 / zq) * xx * T + (2 / zq) * m * xx * R * iv,
    )
    y_m1 = VectorField(ar=-V)
    y0 = VectorField(
        at=-(a / 2) * vez,
        ar=-(T * V - (m / zq) * R + (a / (2 * m)) * ve1z),
        av=-((zq - 1) / zq) * m * V,
        a0=m * xx / zq,
    )
    y1 = VectorField(
        at=-a * (T * vez - m * R * ve2z1),
        ar=-(T ** 2 * V - (2 / zq) * m * T * R
             - ((zq - 2) / zq) * m ** 2 * R ** 2 * iv
             + (a / m) * (T * ve1z - m * R * vez)),
        av=-(2 / zq) * (zq - 1) * m * (V * T - m * R),
        a0=(2 / zq) * m * xx * T - (2 / zq) * m ** 2 * xx * R * iv,
    )
    op = VectorField(at=m, ar=V)
    return Representation(
        "caseB1", zq, {"mu": m, "x": xx, "A110": a},
        {"z": str(zq), "mu": _display(mu), "x": _display(x),
         "A110": _display(a110)},
        (_x_minus1(), _x0(zq, xx), x1, y_m1, y0, y1), op, E_ZERO)


def make_case_b2(z, mu=None, x=None) -> Representation:
    """Force-free representation with the A12 = mu tail; (k, q) = (mu, 1-mu)."""
    zq = Fraction(z)
    if zq == 0:
        raise ZPole("z = 0 is not admissible (1/z coefficients)")
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    _require_nonzero("mu", m)
    iv = mono(ev=-1)
    iv2 = mono(ev=-2)
    x1 = VectorField(
        at=-(T ** 2 + m * R ** 2 * iv2),
        ar=-((2 / zq) * T * R + ((zq + m * (zq - 2)) / zq) * R ** 2 * iv),
        av=-(2 * (1 - zq) / zq) * (V * T - m * R),
        a0=-(2 / zq) * xx * T + (2 / zq) * m * xx * R * iv,
    )
    y_m1 = VectorField(ar=-V)
    y0 = VectorField(
        at=-m * R * iv,
        ar=-(T * V - (m / zq - 1) * R),
        av=-((zq - 1) / zq) * m * V,
        a0=m * xx / zq,
    )
    # Y1 via the raising relation [X1, Y0] = Y1; the closed form is then
    # -mu*(2trv^-1 + (1-mu)r^2v^-2)*Dt
    # - (t^2 v - (2/z)(mu-z)tr + ((z(1-mu)-(z-2)mu^2)/z) r^2 v^-1)*Dr
    # - (2/z)(z-1)mu(vt - mu r)*Dv + (2/z)mu x t - (2/z)mu^2 x r v^-1
    y1 = bracket(x1, y0)
    op = VectorField(at=m, ar=V)
    return Representation(
        "caseB2", zq, {"mu": m, "x": xx},
        {"z": str(zq), "mu": _display(mu), "x": _display(x)},
        (_x_minus1(), _x0(zq, xx), x1, y_m1, y0, y1), op, E_ZERO)


# ---------------------------------------------------------------------------
# forced families, built in the (t, r, u) chart and pushed to (t, r, v)
# ---------------------------------------------------------------------------

def as_u_function(e: Expr, z) -> Expr:
    """Rewrite a function of the scaling variable (written in v) in (r, v).

    The scaling variable is u = r^(z-1) * v; a power u^n becomes the
    monomial r^(n(z-1)) v^n, so rational functions of u embed exactly.
    """
    s = Fraction(z) - 1
    for gp in (e.num, e.den):
        for m in gp.terms:
            if m[0] or m[1]:
                raise KernelError("u-functions may only involve the "
                                  "u placeholder variable")
    return e.map_monomials(lambda m: (m[0], m[1] + m[2] * s, m[2]))


def _forced_representation(name: str, zq: Fraction, m: Expr, xx: Expr,
                           phi_u: Expr, fns: dict[str, Expr],
                           params: dict[str, str],
                           coeffs: dict[str, Expr]) -> Representation:
    """Assemble the six generators from their u-profile functions.

    fns holds the u-dependent profiles (as expressions in the u
    placeholder): a0 b0 c0 d0 for the Galilei pair, a12 b12 c12 d12 for
    the special conformal generator, and the derived A B C D for Y1.
    """
    phi_big_u = (zq - 1) * mono(ev=2) + phi_u
    emb = {k: as_u_function(e, zq) for k, e in fns.items()}
    phi_hat = as_u_function(phi_big_u, zq)
    little_phi_hat = as_u_function(phi_u, zq)

    rz = mono(er=zq)
    r2z = mono(er=2 * zq)
    rz1 = mono(er=zq + 1)
    rm1 = mono(er=-1)
    r1m2z = mono(er=1 - 2 * zq)
    r1mz = mono(er=1 - zq)

    x1 = VectorField(
        at=-(T ** 2 + r2z * emb["a12"]),
        ar=-((2 / zq) * T * R + rz1 * emb["b12"]),
        av=(-(1 - zq) * ((2 / zq) * T * V + rz * V * emb["b12"])
            - R * emb["c12"]),
        a0=-(2 / zq) * xx * T - rz * emb["d12"],
    )
    y_m1 = VectorField(
        ar=-V,
        av=-(1 - zq) * rm1 * V ** 2 - r1m2z * phi_hat,
    )
    y0 = VectorField(
        at=-rz * emb["a0"],
        ar=-(T * V + R * emb["b0"]),
        av=(-(1 - zq) * (T * rm1 * V ** 2 + emb["b0"] * V)
            - T * r1m2z * phi_hat - r1mz * emb["c0"]),
        a0=-emb["d0"],
    )
    y1 = VectorField(
        at=-(2 * T * rz * emb["a0"] + r2z * emb["A"]),
        ar=-(T ** 2 * V + 2 * T * R * emb["b0"] + rz1 * emb["B"]),
        av=(-(1 - zq) * (T ** 2 * rm1 * V ** 2 + 2 * T * emb["b0"] * V
                         + rz * V * emb["B"])
            - T ** 2 * r1m2z * phi_hat - 2 * T * r1mz * emb["c0"]
            - R * emb["C"]),
        a0=(2 / zq) * m * xx * T - rz * emb["D"],
    )
    force = r1m2z * little_phi_hat
    op = VectorField(at=m, ar=V, av=force)
    return Representation(
        name, zq, coeffs, params,
        (_x_minus1(), _x0(zq, xx), x1, y_m1, y0, y1), op, force)


def _example1_profiles(zq: Fraction, m: Expr, xx: Expr, kk: Expr
                       ) -> tuple[Expr, dict[str, Expr]]:
    """Laurent-monomial solution profiles of the forced constraint system."""
    u1 = mono(ev=-1)
    u2 = mono(ev=-2)
    km = kk - m ** 2
    phi_u = (1 - zq) * mono(ev=2)
    fns = {
        "a0": (kk / zq) * u1,
        "b0": kk / (zq * m) - m / zq,
        "c0": E_ZERO,
        "d0": -m * xx / zq,
        "a12": (kk / zq ** 2) * u2,
        "b12": (km / (zq ** 2 * m)) * u1,
        "c12": E_ZERO,
        "d12": -(2 * m * xx / zq ** 2) * u1,
        "A": (kk * km / (zq ** 2 * m)) * u2,
        "B": ((kk * km + m ** 4) / (zq ** 2 * m ** 2)) * u1,
        "C": E_ZERO,
        "D": (2 * m ** 2 * xx / zq ** 2) * u1,
    }
    return phi_u, fns


def make_example1(z, mu=None, x=None, k=None) -> Representation:
    """Representation with force (1-z) v^2 / r; (k, q) = (k, (k-mu^2)/mu)."""
    zq = Fraction(z)
    if zq == 0:
        raise ZPole("z = 0 is not admissible (1/z coefficients)")
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    kk = _coeff("k", k)
    _require_nonzero("mu", m)
    phi_u, fns = _example1_profiles(zq, m, xx, kk)
    return _forced_representation(
        "example1", zq, m, xx, phi_u, fns,
        {"z": str(zq), "mu": _display(mu), "x": _display(x),
         "k": _display(k)},
        {"mu": m, "x": xx, "k": kk})


def example2_closed_b12(mu=None, x=None, phi0=None, b120=None, b121=None
                        ) -> tuple[Expr, Expr, Expr]:
    """Closed-form (b12, c12, d12) profiles at z = 2, constant force shape.

    Expressed in the u placeholder; c12 follows from the first-order
    compatibility relation c12 = 2z u b12 + Phi b12' + 2 mu / z.
    """
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    p0 = _coeff("phi0", phi0)
    c0 = _coeff("b120", b120)
    c1 = _coeff("b121", b121)
    phi_big = V ** 2 + p0
    b12 = c0 * V / phi_big ** 2 + c1 * (V ** 2 - p0) / phi_big ** 2
    d12 = -m * xx * V / phi_big
    c12 = 4 * V * b12 + phi_big * b12.diff("v") + m
    return b12, c12, d12


def make_example2_z2(mu=None, x=None, phi0=None, b120=None, b121=None
                     ) -> Representation:
    """z = 2 representation with force phi0 * r^(-3); (k, q) = (0, -mu)."""
    zq = Fraction(2)
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    p0 = _coeff("phi0", phi0)
    _require_nonzero("mu", m)
    b12, c12, d12 = example2_closed_b12(mu, x, phi0, b120, b121)
    phi_u = p0 + E_ZERO
    fns = {
        "a0": E_ZERO,
        "b0": -m / 2,
        "c0": E_ZERO,
        "d0": -m * xx / 2,
        "a12": E_ZERO,
        "b12": b12,
        "c12": c12,
        "d12": d12,
        "A": E_ZERO,
        "B": -m * b12,
        "C": -m * c12,
        "D": -m * d12,
    }
    return _forced_representation(
        "example2_z2", zq, m, xx, phi_u, fns,
        {"z": "2", "mu": _display(mu), "x": _display(x),
         "phi0": _display(phi0), "b120": _display(b120),
         "b121": _display(b121)},
        {"mu": m, "x": xx, "phi0": p0})


_MAKERS = {
    "standard": make_standard,
    "caseA": make_case_a,
    "caseB1": make_case_b1,
    "caseB2": make_case_b2,
    "example1": make_example1,
    "example2_z2": make_example2_z2,
}


def make_representation(name: str, z=None, **overrides) -> Representation:
    """Dispatch a representation by catalog name.

    standard ignores z; example2_z2 is pinned at z = 2; the others require
    a rational z.
    """
    if name not in _MAKERS:
        raise KernelError(f"unknown representation {name!r}; expected one "
                          f"of {', '.join(REPRESENTATIONS)}")
    maker = _MAKERS[name]
    if name == "standard":
        return maker(**{k: v for k, v in overrides.items()
                        if k in ("mu", "x", "gamma")})
    if name == "example2_z2":
        if z is not None and Fraction(z) != 2:
            raise KernelError("example2_z2 is only available at z = 2")
        return maker(**{k: v for k, v in overrides.items()
                        if k in ("mu", "x", "phi0", "b120", "b121")})
    if z is None:
        raise KernelError(f"representation {name!r} needs a z value")
    keys = {"caseA": ("mu", "x"), "caseB1": ("mu", "x", "a110"),
            "caseB2": ("mu", "x"), "example1": ("mu", "x", "k")}[name]
    return maker(z, **{k: v for k, v in overrides.items() if k in keys})


# ---------------------------------------------------------------------------
# structure tables
# ---------------------------------------------------------------------------

@dataclass
class PairRecord:
    left: str
    right: str
    expected: tuple[tuple[str, ParamRat], ...]
    computed: BasisExpansion | None
    ok: bool


@dataclass
class StructureTable:
    k: ParamRat | None
    q: ParamRat | None
    pairs: list[PairRecord] = field(default_factory=list)
    ok: bool = False
    note: str = ""


def _expected_combination(i: int, j: int, k: ParamRat, q: ParamRat
                          ) -> list[tuple[int, ParamRat]]:
    (fi, n), (fj, m) = _FAMILY[i], _FAMILY[j]
    w = Fraction(n - m)
    if w == 0 or abs(n + m) > 1:
        return []
    s = n + m
    if fi == "X" and fj == "X":
        return [(_SLOT[("X", s)], ParamRat.const(w))]
    if fi == "Y" and fj == "Y":
        out = []
        kw = k.scale(w)
        qw = q.scale(w)
        if not kw.is_zero:
            out.append((_SLOT[("X", s)], kw))
        if not qw.is_zero:
            out.append((_SLOT[("Y", s)], qw))
        return out
    # mixed pair: [X_n, Y_m] = (n-m) Y_{n+m} and [Y_n, X_m] = (n-m) Y_{n+m}
    return [(_SLOT[("Y", s)], ParamRat.const(w))]


def infer_structure_constants(rep: Representation
                              ) -> tuple[ParamRat, ParamRat, BasisExpansion]:
    """(k, q) read off the expansion of [Y0, Y-1] = k X-1 + q Y-1."""
    comm = bracket(rep.basis[4], rep.basis[3])
    expansion = expand_in_basis(comm, rep.basis)
    return expansion.coefficients[0], expansion.coefficients[3], expansion


def verify_table(rep: Representation) -> StructureTable:
    """Check all fifteen unordered bracket pairs against the inferred (k, q)."""
    try:
        k, q, expansion = infer_structure_constants(rep)
    except KernelError as exc:
        return StructureTable(None, None, [], False,
                              f"inference failed: {exc}")
    if not expansion.exact:
        return StructureTable(None, None, [], False,
                              "[Y0, Y-1] does not lie in the basis span")
    stray = [GEN_NAMES[i] for i in (1, 2, 4, 5)
             if not expansion.coefficients[i].is_zero]
    if stray:
        return StructureTable(k, q, [], False,
                              f"[Y0, Y-1] has components on {stray}")
    table = StructureTable(k, q)
    all_ok = True
    for i in range(6):
        for j in range(i + 1, 6):
            combo = _expected_combination(i, j, k, q)
            expected_field = VectorField()
            for slot, c in combo:
                expected_field = expected_field + rep.basis[slot].scale(
                    Expr.of(c))
            comm = bracket(rep.basis[i], rep.basis[j])
            ok = (comm - expected_field).is_zero
            computed = None
            if not ok:
                try:
                    computed = expand_in_basis(comm, rep.basis)
                except KernelError:
                    computed = None
            record = PairRecord(
                GEN_NAMES[i], GEN_NAMES[j],
                tuple((GEN_NAMES[slot], c) for slot, c in combo),
                computed, ok)
            table.pairs.append(record)
            all_ok = all_ok and ok
    table.ok = all_ok
    return table


def expected_structure_constants(rep: Representation
                                 ) -> tuple[ParamRat, ParamRat] | None:
    """The (k, q) pair each catalog family is known to realize."""
    mu = rep.coeffs.get("mu")
    mu_c = mu.as_param_const() if mu is not None else None
    if rep.name == "standard":
        return PR_ZERO, mu_c
    if rep.name in ("caseA", "caseB1", "example2_z2"):
        return PR_ZERO, -mu_c
    if rep.name == "caseB2":
        return mu_c, PR_ONE - mu_c
    if rep.name == "example1":
        k_c = rep.coeffs["k"].as_param_const()
        return k_c, (k_c - mu_c * mu_c) / mu_c
    return None


def expected_multipliers(rep: Representation) -> dict[str, Expr]:
    """Known multiplier expressions for [op, generator] = multiplier * op."""
    zq = rep.z
    mu = rep.coeffs["mu"]
    riv = R * mono(ev=-1)
    out = {name: E_ZERO for name in GEN_NAMES}
    out["X0"] = lit(-1)
    if rep.name == "standard":
        out["X1"] = -2 * T
    elif rep.name == "caseA":
        out["X1"] = -2 * T
    elif rep.name == "caseB1":
        a = rep.coeffs["A110"]
        out["X1"] = -(2 * T + (a / mu) * mono(ev=zq / (1 - zq)))
    elif rep.name == "caseB2":
        # both multipliers are z-independent: the Dt profile mu*u^-2 makes
        # the scaling-variable combination collapse to 2*mu/u
        out["X1"] = -2 * (T + riv)
        out["Y0"] = lit(-1)
        out["Y1"] = -2 * (T + riv)
    elif rep.name == "example1":
        k = rep.coeffs["k"]
        out["X1"] = -2 * (T + (k / (zq * mu)) * riv)
        out["Y0"] = -(k / mu)
        out["Y1"] = -2 * ((k / mu) * T + (k ** 2 / (zq * mu ** 2)) * riv)
    elif rep.name == "example2_z2":
        out["X1"] = -2 * T
    return out


def expected_remainder(rep: Representation, gen: str) -> ParamRat:
    """Known affine remainder of [op, generator]; zero except standard X1."""
    if rep.name == "standard" and gen == "X1":
        mu = rep.coeffs["mu"].as_param_const()
        xx = rep.coeffs["x"].as_param_const()
        g = rep.coeffs["gamma"].as_param_const()
        return (mu * xx - g).scale(2)
    return PR_ZERO


def with_generator_scaled(rep: Representation, gen: str, factor=2
                          ) -> Representation:
    """Corrupt one generator by scaling its first nonzero component."""
    idx = GEN_NAMES.index(gen) if gen in GEN_NAMES else GEN_LABELS.index(gen)
    old = rep.basis[idx]
    comps = list(old.components())
    for i, c in enumerate(comps):
        if not c.is_zero:
            comps[i] = c * factor
            break
    new_basis = list(rep.basis)
    new_basis[idx] = VectorField(*comps)
    return Representation(rep.name + "-corrupt", rep.z, rep.coeffs,
                          rep.params, tuple(new_basis), rep.boltzmann,
                          rep.force)


# ---------------------------------------------------------------------------
# pair-of-Witt-families split
# ---------------------------------------------------------------------------

@dataclass
class SplitWitness:
    alpha: ParamRat | float
    beta: ParamRat | float
    exact: bool
    commuting_ok: bool
    left_witt_ok: bool
    right_witt_ok: bool
    fields_ok: bool | None
    ell: tuple[VectorField, ...] | None
    ellbar: tuple[VectorField, ...] | None
    max_residual: float

    @property
    def ok(self) -> bool:
        return (self.commuting_ok and self.left_witt_ok
                and self.right_witt_ok and self.fields_ok is not False)


def _abstract_bracket(a: list, b: list, k, q, zero, is_zero):
    out = [zero] * 6
    for i, ai in enumerate(a):
        if is_zero(ai):
            continue
        for j, bj in enumerate(b):
            if is_zero(bj):
                continue
            (fi, n), (fj, m) = _FAMILY[i], _FAMILY[j]
            w = n - m
            if w == 0 or abs(n + m) > 1:
                continue
            s = n + m
            c = ai * bj
            if fi == "X" and fj == "X":
                out[_SLOT[("X", s)]] = out[_SLOT[("X", s)]] + c * w
            elif fi == "Y" and fj == "Y":
                out[_SLOT[("X", s)]] = out[_SLOT[("X", s)]] + c * k * w
                out[_SLOT[("Y", s)]] = out[_SLOT[("Y", s)]] + c * q * w
            else:
                out[_SLOT[("Y", s)]] = out[_SLOT[("Y", s)]] + c * w
    return out


def _split_vectors(alpha, beta, zero, one):
    denom = alpha + beta
    ell = []
    ellbar = []
    for n in (-1, 0, 1):
        vec = [zero] * 6
        vec[_SLOT[("X", n)]] = beta / denom
        vec[_SLOT[("Y", n)]] = one / denom
        ell.append(vec)
        vec = [zero] * 6
        vec[_SLOT[("X", n)]] = alpha / denom
        vec[_SLOT[("Y", n)]] = -(one / denom)
        ellbar.append(vec)
    return ell, ellbar


def _check_split_abstract(alpha, beta, k, q, zero, one, is_zero):
    """Verify the Witt relations of both families at the structure level."""
    ell, ellbar = _split_vectors(alpha, beta, zero, one)
    residuals = []

    def expect(vecs, n, m, target_family):
        got = _abstract_bracket(vecs[n + 1], vecs[m + 1], k, q, zero, is_zero)
        want = [zero] * 6
        w = n - m
        if w != 0:
            target = target_family[n + m + 1]
            want = [c * w for c in target]
        return [g - wv for g, wv in zip(got, want)]

    cross_ok = True
    for n in (-1, 0, 1):
        for m in (-1, 0, 1):
            got = _abstract_bracket(ell[n + 1], ellbar[m + 1], k, q, zero,
                                    is_zero)
            residuals.extend(got)
            cross_ok = cross_ok and all(is_zero(c) for c in got)
    left_ok = True
    right_ok = True
    for n, m in ((-1, 0), (-1, 1), (0, 1)):
        res = expect(ell, n, m, ell)
        residuals.extend(res)
        left_ok = left_ok and all(is_zero(c) for c in res)
        res = expect(ellbar, n, m, ellbar)
        residuals.extend(res)
        right_ok = right_ok and all(is_zero(c) for c in res)
    return cross_ok, left_ok, right_ok, residuals


def split_isomorphism(k, q, basis: tuple[VectorField, ...] | None = None,
                      param_values: dict[str, float] | None = None
                      ) -> SplitWitness:
    """Solve alpha*beta = k, alpha - beta = q and verify the split.

    With a rational (or parameter-polynomial-square) discriminant the
    witness is exact and, when a basis is supplied, the commuting families
    are materialized as vector fields and re-verified by actual brackets.
    Otherwise numeric parameter values are required and the structure
    constants are verified in floating point to 1e-12.
    """
    kp = ParamRat.of(k) if not isinstance(k, float) else None
    qp = ParamRat.of(q) if not isinstance(q, float) else None
    if kp is not None and qp is not None:
        disc = qp * qp + kp.scale(4)
        if disc.is_zero:
            raise DegenerateSplitError("q^2 + 4k = 0: the split degenerates")
        root = disc.sqrt()
        if root is not None:
            alpha = (qp + root).scale(Fraction(1, 2))
            beta = (root - qp).scale(Fraction(1, 2))
            cross, left, right, _ = _check_split_abstract(
                alpha, beta, kp, qp, PR_ZERO, PR_ONE,
                lambda c: ParamRat.of(c).is_zero)
            fields_ok = None
            ell = ellbar = None
            if basis is not None:
                denom = Expr.of(alpha + beta)
                ell = tuple(
                    (basis[_SLOT[("X", n)]].scale(Expr.of(beta))
                     + basis[_SLOT[("Y", n)]]).scale(1 / denom)
                    for n in (-1, 0, 1))
                ellbar = tuple(
                    (basis[_SLOT[("X", n)]].scale(Expr.of(alpha))
                     - basis[_SLOT[("Y", n)]]).scale(1 / denom)
                    for n in (-1, 0, 1))
                fields_ok = _check_split_fields(ell, ellbar)
            return SplitWitness(alpha, beta, True, cross, left, right,
                                fields_ok, ell, ellbar, 0.0)
        if param_values is None:
            raise NoRationalWitness(
                "q^2 + 4k is not a perfect square over the parameters; "
                "supply numeric parameter values for a numeric witness")
        kv = kp.evaluate(param_values)
        qv = qp.evaluate(param_values)
    else:
        if param_values is None:
            param_values = {}
        kv = float(k) if isinstance(k, float) else ParamRat.of(k).evaluate(param_values)
        qv = float(q) if isinstance(q, float) else ParamRat.of(q).evaluate(param_values)
    disc_v = qv * qv + 4.0 * kv
    if disc_v <= 0:
        raise DegenerateSplitError(
            f"q^2 + 4k = {disc_v} admits no real nondegenerate witness")
    root_v = disc_v ** 0.5
    alpha_v = (qv + root_v) / 2.0
    beta_v = (root_v - qv) / 2.0
    cross, left, right, residuals = _check_split_abstract(
        alpha_v, beta_v, kv, qv, 0.0, 1.0, lambda c: abs(c) <= 1e-12)
    max_res = max((abs(c) for c in residuals), default=0.0)
    return SplitWitness(alpha_v, beta_v, False, cross, left, right, None,
                        None, None, max_res)


def _check_split_fields(ell, ellbar) -> bool:
    for a in ell:
        for b in ellbar:
            if not bracket(a, b).is_zero:
                return False
    for family in (ell, ellbar):
        for n, m in ((-1, 0), (-1, 1), (0, 1)):
            want = family[n + m + 1].scale(lit(n - m))
            if not (bracket(family[n + 1], family[m + 1]) - want).is_zero:
                return False
    return True


# ---------------------------------------------------------------------------
# the finite-dimensional obstruction
# ---------------------------------------------------------------------------

def _t_projection(e: Expr) -> Expr:
    if not e.den.is_one:
        raise KernelError("t-projection requires a Laurent expression")
    kept = {m: c for m, c in e.num.terms.items() if m[0] >= 1}
    return Expr(GPoly(kept))


def nogo_obstruction(z, mu=None, x=None) -> VectorField:
    """Obstruction to extending the finite family by a level-2 generator.

    Builds the candidate X2 whose t-dependence is forced by the lowering
    relation [X2, X-1] = 3 X1 (all t-independent tails set to zero),
    computes [X2, Y-1] - 3 Y1 over the zero-force family, and keeps only
    the monomials with t-exponent >= 1.  Those cannot be cancelled by any
    choice of tails, since Y-1 = -v*Dr introduces no t; a nonzero result
    therefore rules out the extension.
    """
    zq = Fraction(z)
    if zq == 0:
        raise ZPole("z = 0 is not admissible")
    rep = make_case_a(zq, mu, x)
    m = rep.coeffs["mu"]
    xx = rep.coeffs["x"]
    iv = mono(ev=-1)
    a2 = T ** 3
    b2 = (3 / zq) * T ** 2 * R + 3 * ((zq - 2) / zq) * m * T * R ** 2 * iv
    c2 = 3 * ((1 - zq) / zq) * (V * T ** 2 / 2 - m * R * T)
    d2 = (3 / zq) * xx * T ** 2 - (6 / zq) * m * xx * T * R * iv
    x2 = VectorField(-a2, -b2, -c2, -d2)
    rem = bracket(x2, rep.basis[3]) - rep.basis[5].scale(lit(3))
    return VectorField(*(_t_projection(c) for c in rem.components()))


# ---------------------------------------------------------------------------
# constraint-system verification for the Laurent-profile solution
# ---------------------------------------------------------------------------

@dataclass
class EquationResidual:
    name: str
    residual: Expr | VectorField

    @property
    def ok(self) -> bool:
        return self.residual.is_zero


def verify_example1_system(z, mu=None, x=None, k=None
                           ) -> list[EquationResidual]:
    """Substitute the Laurent profiles into the full constraint system.

    All equations are expressed in the scaling variable (the u
    placeholder); every residual must vanish identically in the symbolic
    parameters.  The final entry re-checks the bracket relation
    [Y1, Y0] = k X1 + q Y1 on the assembled fields.
    """
    zq = Fraction(z)
    if zq in (0, 1):
        raise ZPole("the constraint check needs z not in {0, 1}")
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    kk = _coeff("k", k)
    _require_nonzero("mu", m)
    qe = (kk - m ** 2) / m
    u = V
    phi = E_ZERO  # vanishing drift profile branch
    _, f = _example1_profiles(zq, m, xx, kk)

    def d(e: Expr) -> Expr:
        return e.diff("v")

    a0, b0, c0, d0 = f["a0"], f["b0"], f["c0"], f["d0"]
    a12, b12, c12, d12 = f["a12"], f["b12"], f["c12"], f["d12"]
    big_a, big_b, big_c, big_d = f["A"], f["B"], f["C"], f["D"]
    dphi = d(phi)

    eqs = [
        ("eq1", zq * u * a0 + phi * d(a0) - kk),
        ("eq2", zq * u * b0 + phi * d(b0) - c0 - qe * u),
        ("eq3", dphi * c0 - phi * d(c0) + (qe - zq * b0) * phi),
        ("eq3bis", phi * d(d0)),
        ("eq4", c12 - ((2 / zq) * m
                       - (u / m) * (2 * zq * u * a12 + phi * d(a12))
                       + (2 * zq * u * b12 + phi * d(b12)))),
        ("eq5", zq * u * c12 + phi * d(c12) - c12 * dphi
         + zq * b12 * phi - 2 * c0),
        ("eq6", zq * u * d12 + phi * d(d12) + (2 / zq) * m * xx),
        ("eq7", phi ** 2 * d(d(b12)) + 3 * zq * u * phi * d(b12)
         + zq * (2 * zq * u ** 2 + 3 * phi - 2 * u * dphi) * b12
         - (u / m) * phi ** 2 * d(d(a12))
         - (3 * zq * u ** 2 + 2 * phi) * (phi / m) * d(a12)
         - (zq * u ** 2 + 3 * phi - u * dphi) * (2 * zq * u / m) * a12
         + (2 * m / zq) * (zq * u - dphi)),
        ("eq8", 2 * zq * u * a12 + phi * d(a12) - 2 * a0),
        ("eq9", 2 * zq * u * b12 + phi * d(b12) - c12 - 2 * b0),
        ("eq10", b0 - ((u / m) * a0 - m / zq)),
        ("eq11", c0 - (phi / m) * a0),
        ("eq12", d0 + m * xx / zq),
        ("eq13", 2 * zq * u * big_a + phi * d(big_a) - 2 * qe * a0),
        ("eq14", 2 * zq * u * big_b + phi * d(big_b) - big_c
         - 2 * (kk / zq + qe * b0)),
        ("eq15", zq * u * big_c + phi * d(big_c) - dphi * big_c
         + zq * phi * big_b - 2 * qe * c0),
        ("eq16", zq * u * big_d + phi * d(big_d)
         - (2 * xx / zq) * (kk - m * qe)),
        ("eq17", (qe - 2 * zq * b0) * big_a - c0 * d(big_a)
         + zq * a0 * big_b + d(a0) * big_c + kk * a12 - 2 * a0 ** 2),
        ("eq18", (qe - zq * b0) * big_b - c0 * d(big_b) + u * big_a
         + d(b0) * big_c + kk * b12 - 2 * a0 * b0),
        ("eq19", (qe - zq * b0 + d(c0)) * big_c - c0 * d(big_c)
         + phi * big_a + kk * c12 - 2 * a0 * c0),
        ("eq20", (qe - zq * b0) * big_d - c0 * d(big_d) + kk * d12
         + 2 * a0 * m * xx / zq),
        ("eq21", 2 * zq * (b12 * big_a - a12 * big_b) + c12 * d(big_a)
         - d(a12) * big_c + 2 * a0 * a12),
        ("eq22", (2 / zq) * big_a - c12 * d(big_b) + d(b12) * big_c
         - 2 * b0 * a12),
        ("eq23", (zq * b12 - d(c12)) * big_c + c12 * d(big_c)
         - zq * c12 * big_b + 2 * c0 * a12),
        ("eq24", (2 * xx / zq) * (m * a12 + big_a) + zq * d12 * big_b
         + d(d12) * big_c - zq * b12 * big_d - c12 * d(big_d)),
    ]
    out = [EquationResidual(name, res) for name, res in eqs]

    rep = make_example1(zq, mu, x, k)
    want = (rep.basis[2].scale(kk) + rep.basis[5].scale(Expr.of(qe)))
    out.append(EquationResidual(
        "eq16bis", bracket(rep.basis[5], rep.basis[4]) - want))
    return out


def verify_example2_closed_forms(mu=None, x=None, phi0=None, b120=None,
                                 b121=None) -> list[EquationResidual]:
    """Exact residuals of the z = 2 closed-form profiles in their ODEs."""
    m = _coeff("mu", mu)
    xx = _coeff("x", x)
    p0 = _coeff("phi0", phi0)
    b12, c12, d12 = example2_closed_b12(mu, x, phi0, b120, b121)
    u = V
    phi_big = u ** 2 + p0

    def d(e: Expr) -> Expr:
        return e.diff("v")

    # constant-shape second-order profile equation at z = 2 (source term
    # proportional to (2 - z) drops out)
    res_b = (phi_big ** 2 * d(d(b12)) + 6 * u * phi_big * d(b12)
             + 2 * (3 * u ** 2 + 3 * p0) * b12)
    # first-order profile equation at z = 2
    res_d = 2 * u * d12 + phi_big * d(d12) + m * xx
    # compatibility relation defining c12
    res_c = c12 - (4 * u * b12 + phi_big * d(b12) + m)
    return [EquationResidual("b12-profile-ode", res_b),
            EquationResidual("d12-profile-ode", res_d),
            EquationResidual("c12-relation", res_c)]


# ---------------------------------------------------------------------------
# text serialization
# ---------------------------------------------------------------------------

def save_representation(rep: Representation, path) -> None:
    """Write a representation file in the expression grammar."""
    from .grammar import format_expr, format_vfield
    lines = [f"name = {rep.name}"]
    lines.append(f"z = {rep.z if rep.z is not None else 'none'}")
    for pname, pval in rep.params.items():
        if pname == "z":
            continue
        lines.append(f"param {pname} = {pval}")
    for label, gen in zip(GEN_LABELS, rep.basis):
        lines.append(f"{label} = {format_vfield(gen)}")
    lines.append(f"B = {format_vfield(rep.boltzmann)}")
    lines.append(f"F = {format_expr(rep.force)}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def load_representation(path) -> Representation:
    from .grammar import ParseError, parse_expr, parse_vfield
    name = "unnamed"
    z: Fraction | None = None
    params: dict[str, str] = {}
    gens: dict[str, VectorField] = {}
    op = None
    force = E_ZERO
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected 'key = value'", lineno, 1)
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "name":
                name = value
            elif key == "z":
                z = None if value == "none" else Fraction(value)
            elif key.startswith("param "):
                params[key[6:].strip()] = value
            elif key in GEN_LABELS:
                gens[key] = parse_vfield(value, z=z)
            elif key == "B":
                op = parse_vfield(value, z=z)
            elif key == "F":
                force = parse_expr(value, z=z)
            else:
                raise ParseError(f"unknown key {key!r}", lineno, 1)
    missing = [label for label in GEN_LABELS if label not in gens]
    if missing or op is None:
        raise ParseError(
            f"representation file incomplete; missing {missing or ['B']}", 0, 0)
    return Representation(name, z, {}, params,
                          tuple(gens[label] for label in GEN_LABELS),
                          op, force)
