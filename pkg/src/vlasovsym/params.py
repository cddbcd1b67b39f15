"""Exact arithmetic in the fixed parameter field.

Every structure constant of the catalog (mu, x, gamma, k, ...) stays
symbolic inside the kernel: coefficients live in the field of rational
functions of a fixed parameter tuple with Fraction coefficients.
ParamPoly is a sparse multivariate polynomial keyed by exponent tuples;
ParamRat is a quotient of two such polynomials kept in a deterministic
normal form (common monomial content removed, denominator monic under the
lexicographic order).  Equality of quotients is decided by
cross-multiplication, which is exact because the polynomial ring has no
zero divisors.

All values are immutable after construction; operations are pure
functions, so sharing across threads is safe.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Mapping

PARAMS = ("mu", "x", "gamma", "k", "q", "A12", "A110", "A100", "B110",
          "B100", "D0", "phi0", "b120", "b121", "delta0", "alpha", "beta",
          "eps")

_INDEX = {name: i for i, name in enumerate(PARAMS)}
_NP = len(PARAMS)
_E0 = (0,) * _NP


class KernelError(Exception):
    """Base error for the symbolic kernel."""


class DivisionByZero(KernelError):
    """Division by an exactly-zero value."""


class EvalError(KernelError):
    """Numeric evaluation failed (missing parameter, pole, branch cut)."""


class PoleError(EvalError):
    pass


class DomainError(EvalError):
    pass


class ZPole(KernelError):
    """A z substitution hit a forbidden value (e.g. an exponent pole at z=1)."""


def _frac_sqrt(value: Fraction) -> Fraction | None:
    """Exact square root of a Fraction, or None if it is not a square."""
    if value < 0:
        return None
    ns = math.isqrt(value.numerator)
    ds = math.isqrt(value.denominator)
    if ns * ns != value.numerator or ds * ds != value.denominator:
        return None
    return Fraction(ns, ds)


class ParamPoly:
    """Sparse polynomial in the fixed parameter set with Fraction coefficients.

    terms maps exponent tuples (one slot per name in PARAMS, non-negative
    integers) to nonzero Fractions.  The zero polynomial is the empty map.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Fraction | int] | None = None):
        self.terms = {}
        if terms:
            for exps, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[tuple(exps)] = c

    @classmethod
    def _raw(cls, terms: dict) -> "ParamPoly":
        obj = object.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, value) -> "ParamPoly":
        value = Fraction(value)
        return cls._raw({} if value == 0 else {_E0: value})

    @classmethod
    def var(cls, name: str) -> "ParamPoly":
        if name not in _INDEX:
            raise KernelError(f"unknown parameter {name!r}")
        exps = [0] * _NP
        exps[_INDEX[name]] = 1
        return cls._raw({tuple(exps): Fraction(1)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _E0 in self.terms)

    def const_value(self) -> Fraction | None:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and _E0 in self.terms:
            return self.terms[_E0]
        return None

    def __eq__(self, other) -> bool:
        return isinstance(other, ParamPoly) and self.terms == other.terms

    __hash__ = None

    def __add__(self, other: "ParamPoly") -> "ParamPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return ParamPoly._raw(out)

    def __neg__(self) -> "ParamPoly":
        return ParamPoly._raw({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "ParamPoly") -> "ParamPoly":
        return self + (-other)

    def __mul__(self, other: "ParamPoly") -> "ParamPoly":
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return ParamPoly._raw(out)

    def scale(self, factor: Fraction) -> "ParamPoly":
        factor = Fraction(factor)
        if factor == 0:
            return PP_ZERO
        return ParamPoly._raw({e: c * factor for e, c in self.terms.items()})

    def __pow__(self, n: int) -> "ParamPoly":
        if n < 0:
            raise KernelError("negative power of a ParamPoly; use ParamRat")
        out = PP_ONE
        for _ in range(n):
            out = out * self
        return out

    def content(self) -> tuple:
        """Componentwise minimum exponent over all terms."""
        it = iter(self.terms)
        mins = list(next(it))
        for e in it:
            for i, x in enumerate(e):
                if x < mins[i]:
                    mins[i] = x
        return tuple(mins)

    def shift(self, delta: tuple) -> "ParamPoly":
        """Multiply by the monomial with exponent vector delta."""
        return ParamPoly._raw(
            {tuple(a + b for a, b in zip(e, delta)): c
             for e, c in self.terms.items()})

    def leading(self) -> tuple[tuple, Fraction]:
        e = max(self.terms)
        return e, self.terms[e]

    def sorted_terms(self) -> Iterator[tuple[tuple, Fraction]]:
        for e in sorted(self.terms, reverse=True):
            yield e, self.terms[e]

    def evaluate(self, values: Mapping[str, float]) -> float:
        total = 0.0
        for e, c in self.terms.items():
            prod = float(c)
            for i, p in enumerate(e):
                if p:
                    name = PARAMS[i]
                    if name not in values:
                        raise EvalError(f"parameter {name!r} has no value")
                    prod *= values[name] ** p
            total += prod
        return total

    def sqrt(self) -> "ParamPoly | None":
        """Exact polynomial square root, or None.

        Greedy leading-term extraction under the lexicographic order; an
        iteration cap turns pathological non-squares into None instead of
        looping.
        """
        if self.is_zero:
            return PP_ZERO
        le, lc = self.leading()
        if any(x % 2 for x in le):
            return None
        lc_sqrt = _frac_sqrt(lc)
        if lc_sqrt is None:
            return None
        se = tuple(x // 2 for x in le)
        root = ParamPoly._raw({se: lc_sqrt})
        for _ in range(4 * len(self.terms) + 8):
            rem = self - root * root
            if rem.is_zero:
                return root
            re, rc = rem.leading()
            te = tuple(a - b for a, b in zip(re, se))
            if any(x < 0 for x in te):
                return None
            root = root + ParamPoly._raw({te: rc / (2 * lc_sqrt)})
        return None

    def __repr__(self) -> str:
        if not self.terms:
            return "ParamPoly(0)"
        bits = []
        for e, c in self.sorted_terms():
            names = "*".join(
                f"{PARAMS[i]}^{p}" if p != 1 else PARAMS[i]
                for i, p in enumerate(e) if p)
            bits.append(f"{c}" + (f"*{names}" if names else ""))
        return "ParamPoly(" + " + ".join(bits) + ")"


PP_ZERO = ParamPoly._raw({})
PP_ONE = ParamPoly._raw({_E0: Fraction(1)})


class ParamRat:
    """Quotient of two ParamPoly values in normal form.

    Normal form: zero is 0/1; otherwise the common monomial content of
    numerator and denominator is cancelled and both are rescaled so the
    denominator's leading coefficient is 1 (hence positive).  Construction
    is deterministic, so identical inputs produce identical dictionaries.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: ParamPoly, den: ParamPoly = PP_ONE):
        if den.is_zero:
            raise DivisionByZero("zero denominator in parameter fraction")
        if num.is_zero:
            self.num, self.den = PP_ZERO, PP_ONE
            return
        cn = num.content()
        cd = den.content()
        common = tuple(min(a, b) for a, b in zip(cn, cd))
        if any(common):
            back = tuple(-x for x in common)
            num = num.shift(back)
            den = den.shift(back)
        _, lc = den.leading()
        if lc != 1:
            inv = 1 / lc
            num = num.scale(inv)
            den = den.scale(inv)
        self.num, self.den = num, den

    @classmethod
    def const(cls, value) -> "ParamRat":
        return cls(ParamPoly.const(value))

    @classmethod
    def var(cls, name: str) -> "ParamRat":
        return cls(ParamPoly.var(name))

    @classmethod
    def of(cls, value) -> "ParamRat":
        if isinstance(value, ParamRat):
            return value
        if isinstance(value, ParamPoly):
            return cls(value)
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        raise KernelError(f"cannot coerce {value!r} to ParamRat")

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_one(self) -> bool:
        return self.num == self.den

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamRat):
            try:
                other = ParamRat.of(other)
            except KernelError:
                return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def __add__(self, other: "ParamRat") -> "ParamRat":
        other = ParamRat.of(other)
        return ParamRat(self.num * other.den + other.num * self.den,
                        self.den * other.den)

    def __neg__(self) -> "ParamRat":
        return ParamRat(-self.num, self.den)

    def __sub__(self, other: "ParamRat") -> "ParamRat":
        return self + (-ParamRat.of(other))

    def __mul__(self, other: "ParamRat") -> "ParamRat":
        other = ParamRat.of(other)
        return ParamRat(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "ParamRat") -> "ParamRat":
        other = ParamRat.of(other)
        if other.is_zero:
            raise DivisionByZero("division by zero parameter fraction")
        return ParamRat(self.num * other.den, self.den * other.num)

    def inverse(self) -> "ParamRat":
        if self.is_zero:
            raise DivisionByZero("inverse of zero parameter fraction")
        return ParamRat(self.den, self.num)

    def __pow__(self, n: int) -> "ParamRat":
        if n < 0:
            return self.inverse() ** (-n)
        out = PR_ONE
        for _ in range(n):
            out = out * self
        return out

    def scale(self, factor: Fraction) -> "ParamRat":
        return ParamRat(self.num.scale(factor), self.den)

    def as_fraction(self) -> Fraction | None:
        cn = self.num.const_value()
        cd = self.den.const_value()
        if cn is None or cd is None:
            return None
        return cn / cd

    def evaluate(self, values: Mapping[str, float]) -> float:
        d = self.den.evaluate(values)
        if d == 0.0:
            raise PoleError("parameter denominator vanishes at the given values")
        return self.num.evaluate(values) / d

    def sqrt(self) -> "ParamRat | None":
        ns = self.num.sqrt()
        if ns is None:
            return None
        ds = self.den.sqrt()
        if ds is None:
            return None
        return ParamRat(ns, ds)

    def __repr__(self) -> str:
        if self.den == PP_ONE:
            return f"ParamRat({self.num!r})"
        return f"ParamRat({self.num!r} / {self.den!r})"


PR_ZERO = ParamRat(PP_ZERO)
PR_ONE = ParamRat(PP_ONE)
