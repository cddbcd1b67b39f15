"""First-order differential operators and their Lie brackets.

A VectorField is X = at*Dt + ar*Dr + av*Dv + a0 where the components are
exact Exprs and a0 acts by multiplication.  The classical convention
X = -a*Dt - b*Dr - c*Dv - d is recovered with at = -a and so on.

The bracket of two such operators is again first order: the second-order
and product terms cancel, leaving [X,Y]_i = Xvec(Y_i) - Yvec(X_i) for the
three directions and the same formula for the scalar parts, where Xvec is
the derivation part of X alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import E_ZERO, Expr
from .params import KernelError, ParamRat, PR_ZERO


class DegenerateBasisError(KernelError):
    """The supplied basis fields are linearly dependent."""


class VectorField:
    __slots__ = ("at", "ar", "av", "a0")

    def __init__(self, at=0, ar=0, av=0, a0=0):
        self.at = Expr.of(at)
        self.ar = Expr.of(ar)
        self.av = Expr.of(av)
        self.a0 = Expr.of(a0)

    def components(self) -> tuple[Expr, Expr, Expr, Expr]:
        return (self.at, self.ar, self.av, self.a0)

    @property
    def is_zero(self) -> bool:
        return (self.at.is_zero and self.ar.is_zero and self.av.is_zero
                and self.a0.is_zero)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.at + other.at, self.ar + other.ar,
                           self.av + other.av, self.a0 + other.a0)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.at - other.at, self.ar - other.ar,
                           self.av - other.av, self.a0 - other.a0)

    def __neg__(self) -> "VectorField":
        return VectorField(-self.at, -self.ar, -self.av, -self.a0)

    def scale(self, factor) -> "VectorField":
        f = factor if isinstance(factor, Expr) else Expr.of(factor)
        return VectorField(self.at * f, self.ar * f, self.av * f,
                           self.a0 * f)

    def derive(self, f: Expr) -> Expr:
        """Action of the derivation part only: at*df/dt + ar*df/dr + av*df/dv."""
        return (self.at * f.diff(0) + self.ar * f.diff(1)
                + self.av * f.diff(2))

    def apply(self, f: Expr) -> Expr:
        """Full operator action, including the multiplication part."""
        return self.derive(f) + self.a0 * f

    def __repr__(self) -> str:
        from .grammar import format_vfield
        return f"VectorField({format_vfield(self)})"


def bracket(x: VectorField, y: VectorField) -> VectorField:
    """Commutator [X, Y] of two first-order operators."""
    return VectorField(
        x.derive(y.at) - y.derive(x.at),
        x.derive(y.ar) - y.derive(x.ar),
        x.derive(y.av) - y.derive(x.av),
        x.derive(y.a0) - y.derive(x.a0),
    )


@dataclass
class SymmetryReport:
    """Result of checking [L, X] = multiplier * L + remainder.

    ok means both directional residuals vanish identically and the scalar
    residual is a pure parameter constant (the remainder); representations
    acting as strict dynamical symmetries have remainder 0 on top of that.
    """

    multiplier: Expr
    remainder: ParamRat | None
    residual_r: Expr
    residual_v: Expr
    residual_scalar: Expr
    ok: bool

    @property
    def strict(self) -> bool:
        return self.ok and self.remainder is not None and self.remainder.is_zero


def symmetry_multiplier(op: VectorField, gen: VectorField) -> SymmetryReport:
    """Extract the multiplier of a candidate dynamical symmetry.

    op must be a transport operator with constant nonzero Dt coefficient
    and no multiplication part; the multiplier is then read off the Dt
    component of the commutator and the remaining components are checked
    against it.
    """
    pivot = op.at.as_param_const()
    if pivot is None or pivot.is_zero:
        raise KernelError("transport operator needs a constant nonzero "
                          "Dt coefficient")
    if not op.a0.is_zero:
        raise KernelError("transport operator must have no scalar part")
    comm = bracket(op, gen)
    lam = comm.at / op.at
    residual_r = comm.ar - lam * op.ar
    residual_v = comm.av - lam * op.av
    residual_scalar = comm.a0
    remainder = residual_scalar.as_param_const()
    ok = residual_r.is_zero and residual_v.is_zero and remainder is not None
    return SymmetryReport(lam, remainder, residual_r, residual_v,
                          residual_scalar, ok)


@dataclass
class BasisExpansion:
    coefficients: tuple[ParamRat, ...]
    remainder: VectorField

    @property
    def exact(self) -> bool:
        return self.remainder.is_zero


def _component_rows(w: VectorField, basis: tuple[VectorField, ...], comp: int):
    """Linear equations from one component after clearing denominators."""
    exprs = [b.components()[comp] for b in basis]
    target = w.components()[comp]
    cleared = []
    for i, e in enumerate(exprs):
        num = e.num
        for j, other in enumerate(exprs):
            if j != i:
                num = num * other.den
        num = num * target.den
        cleared.append(num)
    tnum = target.num
    for e in exprs:
        tnum = tnum * e.den
    monos = set(tnum.terms)
    for num in cleared:
        monos.update(num.terms)
    for m in sorted(monos, reverse=True):
        row = [num.terms.get(m, PR_ZERO) for num in cleared]
        rhs = tnum.terms.get(m, PR_ZERO)
        yield row, rhs


def expand_in_basis(w: VectorField, basis: tuple[VectorField, ...]
                    ) -> BasisExpansion:
    """Express w as an exact linear combination of the basis fields.

    Coefficients live in the parameter fraction field; they are solved by
    Gaussian elimination on the monomial-matching equations (denominators
    cleared per component).  The remainder is w minus the combination and
    is zero exactly when w lies in the span.  Raises DegenerateBasisError
    when the basis is linearly dependent.
    """
    n = len(basis)
    rows: list[tuple[list[ParamRat], ParamRat]] = []
    for comp in range(4):
        rows.extend(_component_rows(w, basis, comp))

    pivots: list[tuple[int, list[ParamRat], ParamRat]] = []
    for col in range(n):
        hit = None
        for idx, (row, rhs) in enumerate(rows):
            if not row[col].is_zero:
                hit = idx
                break
        if hit is None:
            raise DegenerateBasisError(
                f"basis field {col} is a combination of the others")
        row, rhs = rows.pop(hit)
        inv = row[col].inverse()
        row = [c * inv for c in row]
        rhs = rhs * inv
        reduced = []
        for orow, orhs in rows:
            f = orow[col]
            if f.is_zero:
                reduced.append((orow, orhs))
            else:
                reduced.append((
                    [oc - f * rc for oc, rc in zip(orow, row)],
                    orhs - f * rhs))
        rows = reduced
        pivots.append((col, row, rhs))

    coeffs = [PR_ZERO] * n
    for col, row, rhs in reversed(pivots):
        acc = rhs
        for j in range(col + 1, n):
            if not row[j].is_zero:
                acc = acc - row[j] * coeffs[j]
        coeffs[col] = acc

    combo = VectorField()
    for c, b in zip(coeffs, basis):
        if not c.is_zero:
            combo = combo + b.scale(Expr.of(c))
    return BasisExpansion(tuple(coeffs), w - combo)
