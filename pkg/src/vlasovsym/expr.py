"""Generalized-monomial expressions in the base variables (t, r, v).

A base monomial is t^a r^b v^c with exact rational exponents a, b, c, so
factors such as v^(z/(1-z)) become ordinary monomials once the scaling
exponent z is fixed to a rational number.  GPoly is a sparse sum of base
monomials with ParamRat coefficients; Expr is a quotient of two GPoly
values.  The exponent group is totally ordered, hence the ring has no zero
divisors: an Expr is zero exactly when its normalized numerator is empty,
and equality of two Exprs reduces to a zero test of their difference.

Normal form of a quotient: the denominator's monomial content is moved
into the numerator (pure Laurent expressions therefore have denominator 1)
and the denominator is rescaled to have leading coefficient 1.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterator, Mapping

from .params import (DivisionByZero, DomainError, EvalError, KernelError,
                     ParamPoly, ParamRat, PoleError, PR_ONE, PR_ZERO, ZPole)

F0 = Fraction(0)
F1 = Fraction(1)

#: exponent triple (e_t, e_r, e_v)
Mono = tuple[Fraction, Fraction, Fraction]

M_ONE: Mono = (F0, F0, F0)

VAR_NAMES = ("t", "r", "v")
_VAR_INDEX = {"t": 0, "r": 1, "v": 2}


def _mono(et=0, er=0, ev=0) -> Mono:
    return (Fraction(et), Fraction(er), Fraction(ev))


def _madd(a: Mono, b: Mono) -> Mono:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def powq(base: float, exp: Fraction) -> float:
    """base**exp on the positive real branch, with explicit failures."""
    if exp == 0:
        return 1.0
    if base == 0.0:
        if exp < 0:
            raise PoleError("zero base with negative exponent")
        return 0.0
    if exp.denominator == 1:
        return base ** int(exp)
    if base < 0.0:
        raise DomainError(
            f"negative base {base!r} with non-integer exponent {exp}")
    return base ** float(exp)


class GPoly:
    """Sparse sum of base monomials with ParamRat coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, ParamRat] | None = None):
        self.terms = {}
        if terms:
            for m, c in terms.items():
                c = ParamRat.of(c)
                if not c.is_zero:
                    self.terms[m] = c

    @classmethod
    def _raw(cls, terms: dict) -> "GPoly":
        obj = object.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, coeff) -> "GPoly":
        coeff = ParamRat.of(coeff)
        return cls._raw({} if coeff.is_zero else {M_ONE: coeff})

    @classmethod
    def monomial(cls, mono: Mono, coeff=1) -> "GPoly":
        coeff = ParamRat.of(coeff)
        return cls._raw({} if coeff.is_zero else {mono: coeff})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_one(self) -> bool:
        return (len(self.terms) == 1 and M_ONE in self.terms
                and self.terms[M_ONE].is_one)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GPoly):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(c == other.terms[m] for m, c in self.terms.items())

    __hash__ = None

    def __add__(self, other: "GPoly") -> "GPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            if m in out:
                s = out[m] + c
                if s.is_zero:
                    del out[m]
                else:
                    out[m] = s
            else:
                out[m] = c
        return GPoly._raw(out)

    def __neg__(self) -> "GPoly":
        return GPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "GPoly") -> "GPoly":
        return self + (-other)

    def __mul__(self, other: "GPoly") -> "GPoly":
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _madd(m1, m2)
                c = c1 * c2
                if m in out:
                    s = out[m] + c
                    if s.is_zero:
                        del out[m]
                    else:
                        out[m] = s
                elif not c.is_zero:
                    out[m] = c
        return GPoly._raw(out)

    def scale(self, coeff: ParamRat) -> "GPoly":
        coeff = ParamRat.of(coeff)
        if coeff.is_zero:
            return GP_ZERO
        return GPoly._raw({m: c * coeff for m, c in self.terms.items()})

    def shift(self, delta: Mono) -> "GPoly":
        return GPoly._raw({_madd(m, delta): c for m, c in self.terms.items()})

    def content(self) -> Mono:
        it = iter(self.terms)
        mins = list(next(it))
        for m in it:
            for i, x in enumerate(m):
                if x < mins[i]:
                    mins[i] = x
        return tuple(mins)

    def leading(self) -> tuple[Mono, ParamRat]:
        m = max(self.terms)
        return m, self.terms[m]

    def sorted_terms(self) -> Iterator[tuple[Mono, ParamRat]]:
        for m in sorted(self.terms, reverse=True):
            yield m, self.terms[m]

    def diff(self, var: int) -> "GPoly":
        out: dict = {}
        for m, c in self.terms.items():
            e = m[var]
            if e == 0:
                continue
            lowered = list(m)
            lowered[var] = e - 1
            out[tuple(lowered)] = c.scale(e)
        return GPoly._raw(out)

    def map_monomials(self, fn: Callable[[Mono], Mono]) -> "GPoly":
        out: dict = {}
        for m, c in self.terms.items():
            m2 = fn(m)
            if m2 in out:
                s = out[m2] + c
                if s.is_zero:
                    del out[m2]
                else:
                    out[m2] = s
            else:
                out[m2] = c
        return GPoly._raw(out)

    def evaluate(self, t: float, r: float, v: float,
                 values: Mapping[str, float]) -> float:
        total = 0.0
        for (a, b, g), c in self.terms.items():
            total += (c.evaluate(values) * powq(t, a) * powq(r, b)
                      * powq(v, g))
        return total

    def subst_ones(self) -> ParamRat:
        """Value at t = r = v = 1 (always exact: 1^q = 1)."""
        out = PR_ZERO
        for c in self.terms.values():
            out = out + c
        return out

    def __repr__(self) -> str:
        from .grammar import format_expr
        return f"GPoly({format_expr(Expr(self))})"


GP_ZERO = GPoly._raw({})
GP_ONE = GPoly._raw({M_ONE: PR_ONE})


class Expr:
    """Quotient of two GPoly values; the kernel's symbolic function type."""

    __slots__ = ("num", "den")

    def __init__(self, num: GPoly, den: GPoly = GP_ONE):
        if den.is_zero:
            raise DivisionByZero("zero denominator expression")
        if num.is_zero:
            self.num, self.den = GP_ZERO, GP_ONE
            return
        c = den.content()
        if any(c):
            back = (-c[0], -c[1], -c[2])
            num = num.shift(back)
            den = den.shift(back)
        _, lc = den.leading()
        if not lc.is_one:
            inv = lc.inverse()
            num = num.scale(inv)
            den = den.scale(inv)
        self.num, self.den = num, den

    # -- coercion ---------------------------------------------------------

    @staticmethod
    def of(value) -> "Expr":
        if isinstance(value, Expr):
            return value
        if isinstance(value, (int, Fraction)):
            return Expr(GPoly.const(ParamRat.const(value)))
        if isinstance(value, (ParamRat, ParamPoly)):
            return Expr(GPoly.const(ParamRat.of(value)))
        raise KernelError(f"cannot coerce {value!r} to Expr")

    # -- predicates --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_one(self) -> bool:
        return self.num == self.den

    def __eq__(self, other) -> bool:
        try:
            other = Expr.of(other)
        except KernelError:
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None

    # -- field arithmetic ---------------------------------------------------

    def __add__(self, other) -> "Expr":
        other = Expr.of(other)
        if self.den is other.den or self.den == other.den:
            return Expr(self.num + other.num, self.den)
        return Expr(self.num * other.den + other.num * self.den,
                    self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(-self.num, self.den)

    def __sub__(self, other) -> "Expr":
        return self + (-Expr.of(other))

    def __rsub__(self, other) -> "Expr":
        return Expr.of(other) - self

    def __mul__(self, other) -> "Expr":
        other = Expr.of(other)
        return Expr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Expr":
        other = Expr.of(other)
        if other.is_zero:
            raise DivisionByZero("division by zero expression")
        return Expr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "Expr":
        return Expr.of(other) / self

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int):
            raise KernelError("Expr ** exponent must be an integer; "
                              "use mono() for fractional powers")
        if n < 0:
            return (Expr(self.den, self.num)) ** (-n)
        out = E_ONE
        for _ in range(n):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------------

    def diff(self, var: str | int) -> "Expr":
        i = _VAR_INDEX[var] if isinstance(var, str) else var
        if self.den.is_one:
            return Expr(self.num.diff(i))
        return Expr(self.num.diff(i) * self.den - self.num * self.den.diff(i),
                    self.den * self.den)

    # -- structure ----------------------------------------------------------

    def as_param_const(self) -> ParamRat | None:
        """The ParamRat value if this Expr does not depend on (t, r, v)."""
        if self.num.is_zero:
            return PR_ZERO
        nc = self.num.terms.get(M_ONE)
        if len(self.num.terms) == 1 and nc is not None and self.den.is_one:
            return nc
        for i in range(3):
            if not self.diff(i).is_zero:
                return None
        dv = self.den.subst_ones()
        if dv.is_zero:
            raise KernelError("cannot extract constant value: denominator "
                              "vanishes at t=r=v=1")
        return self.num.subst_ones() / dv

    def map_monomials(self, fn: Callable[[Mono], Mono]) -> "Expr":
        return Expr(self.num.map_monomials(fn), self.den.map_monomials(fn))

    # -- numerics -----------------------------------------------------------

    def evaluate(self, t: float, r: float, v: float,
                 values: Mapping[str, float] | None = None) -> float:
        values = values or {}
        d = self.den.evaluate(t, r, v, values)
        if d == 0.0:
            raise PoleError(f"denominator vanishes at (t,r,v)=({t},{r},{v})")
        return self.num.evaluate(t, r, v, values) / d

    def compiled(self, values: Mapping[str, float] | None = None
                 ) -> Callable[[float, float, float], float]:
        """Bind parameter values once and return a fast point evaluator."""
        values = values or {}
        num = [(c.evaluate(values), m) for m, c in self.num.terms.items()]
        den = [(c.evaluate(values), m) for m, c in self.den.terms.items()]

        def fn(t: float, r: float, v: float) -> float:
            acc_n = 0.0
            for c, (a, b, g) in num:
                acc_n += c * powq(t, a) * powq(r, b) * powq(v, g)
            acc_d = 0.0
            for c, (a, b, g) in den:
                acc_d += c * powq(t, a) * powq(r, b) * powq(v, g)
            if acc_d == 0.0:
                raise PoleError(
                    f"denominator vanishes at (t,r,v)=({t},{r},{v})")
            return acc_n / acc_d

        return fn

    def __repr__(self) -> str:
        from .grammar import format_expr
        return f"Expr({format_expr(self)})"


E_ZERO = Expr(GP_ZERO)
E_ONE = Expr(GP_ONE)

#: the base variables as expressions
T = Expr(GPoly.monomial(_mono(et=1)))
R = Expr(GPoly.monomial(_mono(er=1)))
V = Expr(GPoly.monomial(_mono(ev=1)))


def mono(et=0, er=0, ev=0, coeff=1) -> Expr:
    """Single base monomial coeff * t^et * r^er * v^ev with rational exponents."""
    return Expr(GPoly.monomial(_mono(et, er, ev), ParamRat.of(coeff)))


def par(name: str) -> Expr:
    """A symbolic parameter as an Expr."""
    return Expr(GPoly.const(ParamRat.var(name)))


def lit(value) -> Expr:
    """An exact rational constant as an Expr."""
    return Expr.of(Fraction(value))


def mono_pow(e: Expr, exp: Fraction) -> Expr:
    """Raise a coefficient-one monomial to a rational power.

    Needed by the grammar for inputs like (r*v)^(1/2); general expressions
    only support integer powers.
    """
    if exp.denominator == 1:
        return e ** int(exp)
    if len(e.num.terms) != 1 or not e.den.is_one:
        raise KernelError("fractional power of a non-monomial expression")
    m, c = next(iter(e.num.terms.items()))
    if not c.is_one:
        raise KernelError("fractional power requires coefficient 1")
    return Expr(GPoly.monomial((m[0] * exp, m[1] * exp, m[2] * exp)))


def subst_z(template: Callable[[Fraction], Expr], z) -> Expr:
    """Instantiate a z-dependent template at an exact rational z.

    A template is any callable building an Expr from a Fraction z; the
    catalog constructors and parsed grammar texts are the two producers.
    Division by zero inside (an exponent such as z/(1-z) at z = 1)
    surfaces as ZPole.
    """
    z = Fraction(z)
    try:
        return template(z)
    except ZeroDivisionError as exc:
        raise ZPole(f"substitution z = {z} hits a pole: {exc}") from None


def zfrac(num, den, what: str = "") -> Fraction:
    """Fraction division for templates, naming the offending exponent."""
    den = Fraction(den)
    if den == 0:
        label = what or f"{num}/{den}"
        raise ZPole(f"exponent {label} is undefined (zero denominator)")
    return Fraction(num) / den
