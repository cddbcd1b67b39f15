"""Textual grammar for expressions and operator fields.

Atoms are the base variables t r v, the derivative markers Dt Dr Dv,
parameter identifiers, integer literals and the symbol z (resolved against
a supplied rational at parse time).  Operators: + - * / ^ and parentheses;
^ is right-associative and binds tighter than unary minus, which binds
tighter than * and /.  Exponents are rational expressions over integers
and z only.  Line comments start with #.

The printer emits a canonical form (monomials in descending lexicographic
order, fixed t,r,v variable order) and parse(format(x)) reproduces x
exactly.  Any malformed input raises ParseError with a line/column
position; no input may raise anything else.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .expr import Expr, M_ONE, Mono, mono_pow, par, T, R, V
from .fields import VectorField
from .params import KernelError, PARAMS, ParamRat

_MARKERS = ("Dt", "Dr", "Dv")
_BASE = {"t": T, "r": R, "v": V}
_PARAM_SET = set(PARAMS)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"\d+|[A-Za-z_][A-Za-z0-9_]*|[-+*/^()]|#[^\n]*|\s+|.")


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    for match in _TOKEN_RE.finditer(text):
        chunk = match.group(0)
        if chunk.isspace():
            nl = chunk.count("\n")
            if nl:
                line += nl
                col = len(chunk) - chunk.rfind("\n")
            else:
                col += len(chunk)
            continue
        if chunk.startswith("#"):
            col += len(chunk)
            continue
        if chunk[0].isdigit():
            kind = "num"
        elif chunk[0].isalpha() or chunk[0] == "_":
            kind = "ident"
        elif chunk in "+-*/^()":
            kind = "op"
        else:
            raise ParseError(f"unexpected character {chunk!r}", line, col)
        tokens.append(Token(kind, chunk, line, col))
        col += len(chunk)
    tokens.append(Token("end", "", line, col))
    return tokens


# -- AST -----------------------------------------------------------------

# nodes: ("num", Fraction, tok) | ("sym", name, tok)
#        | ("neg", node, tok) | ("bin", op, left, right, tok)

_LBP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_UNARY_BP = 25  # between mul and pow


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str):
        tok = self.advance()
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)

    def parse(self, rbp: int = 0):
        tok = self.advance()
        left = self._nud(tok)
        while True:
            nxt = self.peek()
            if nxt.kind != "op" or nxt.text not in _LBP:
                break
            if _LBP[nxt.text] <= rbp:
                break
            self.advance()
            left = self._led(nxt, left)
        return left

    def _nud(self, tok: Token):
        if tok.kind == "num":
            return ("num", Fraction(int(tok.text)), tok)
        if tok.kind == "ident":
            return ("sym", tok.text, tok)
        if tok.kind == "op":
            if tok.text == "-":
                return ("neg", self.parse(_UNARY_BP), tok)
            if tok.text == "+":
                return self.parse(_UNARY_BP)
            if tok.text == "(":
                inner = self.parse(0)
                self.expect_op(")")
                return inner
        raise ParseError(f"unexpected token {tok.text or 'end of input'!r}",
                         tok.line, tok.col)

    def _led(self, tok: Token, left):
        if tok.text == "^":
            right = self.parse(_LBP["^"] - 1)  # right-associative
            return ("bin", "^", left, right, tok)
        right = self.parse(_LBP[tok.text])
        return ("bin", tok.text, left, right, tok)


# -- elaboration ----------------------------------------------------------

class _Elab:
    """Turn an AST into marker-graded Exprs.

    A value is a dict mapping None/'t'/'r'/'v' to Exprs: the None slot is
    the scalar part, the others are the coefficients of Dt, Dr, Dv.
    """

    def __init__(self, z: Fraction | None):
        self.z = z

    def scalar(self, node) -> Fraction:
        kind = node[0]
        tok = node[-1]
        if kind == "num":
            return node[1]
        if kind == "sym":
            name = node[1]
            if name == "z":
                if self.z is None:
                    raise ParseError("z used but no z value supplied",
                                     tok.line, tok.col)
                return self.z
            if name in _MARKERS:
                raise ParseError("derivative marker inside an exponent",
                                 tok.line, tok.col)
            raise ParseError(f"only integers and z may appear in exponents, "
                             f"not {name!r}", tok.line, tok.col)
        if kind == "neg":
            return -self.scalar(node[1])
        op, left, right = node[1], node[2], node[3]
        a = self.scalar(left)
        b = self.scalar(right)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0:
                raise ParseError(
                    f"z-pole: exponent division by zero at z = {self.z}",
                    tok.line, tok.col)
            return a / b
        if op == "^":
            if b.denominator != 1:
                raise ParseError("non-integer power inside an exponent",
                                 tok.line, tok.col)
            if abs(b) > 10000:
                raise ParseError("exponent power out of range",
                                 tok.line, tok.col)
            return a ** int(b)
        raise ParseError(f"operator {op!r} not allowed in exponents",
                         tok.line, tok.col)

    def value(self, node) -> dict:
        kind = node[0]
        tok = node[-1]
        if kind == "num":
            return {None: Expr.of(node[1])}
        if kind == "sym":
            name = node[1]
            if name in _BASE:
                return {None: _BASE[name]}
            if name in _MARKERS:
                return {name[1]: Expr.of(1)}
            if name == "z":
                if self.z is None:
                    raise ParseError("z used but no z value supplied",
                                     tok.line, tok.col)
                return {None: Expr.of(self.z)}
            if name in _PARAM_SET:
                return {None: par(name)}
            raise ParseError(f"unknown identifier {name!r}", tok.line, tok.col)
        if kind == "neg":
            return {k: -e for k, e in self.value(node[1]).items()}
        op, left, right = node[1], node[2], node[3]
        if op == "^":
            exponent = self.scalar(right)
            base = self.value(left)
            if set(base) - {None}:
                raise ParseError("derivative marker under a power",
                                 tok.line, tok.col)
            if exponent.denominator == 1 and abs(exponent) > 512:
                raise ParseError("integer power out of range",
                                 tok.line, tok.col)
            try:
                return {None: mono_pow(base.get(None, Expr.of(0)), exponent)}
            except KernelError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from None
        a = self.value(left)
        b = self.value(right)
        if op == "+":
            out = dict(a)
            for mk, e in b.items():
                out[mk] = out.get(mk, Expr.of(0)) + e
            return out
        if op == "-":
            out = dict(a)
            for mk, e in b.items():
                out[mk] = out.get(mk, Expr.of(0)) - e
            return out
        if op == "*":
            out: dict = {}
            for mk1, e1 in a.items():
                for mk2, e2 in b.items():
                    if mk1 is not None and mk2 is not None:
                        raise ParseError("product of two derivative markers",
                                         tok.line, tok.col)
                    mk = mk1 if mk1 is not None else mk2
                    prod = e1 * e2
                    out[mk] = out.get(mk, Expr.of(0)) + prod
            return out
        if op == "/":
            if set(b) - {None}:
                raise ParseError("derivative marker in a denominator",
                                 tok.line, tok.col)
            divisor = b.get(None, Expr.of(0))
            if divisor.is_zero:
                raise ParseError("division by zero expression",
                                 tok.line, tok.col)
            return {mk: e / divisor for mk, e in a.items()}
        raise ParseError(f"unknown operator {op!r}", tok.line, tok.col)


def _elaborate(text: str, z) -> dict:
    zf = Fraction(z) if z is not None else None
    tokens = tokenize(text)
    parser = _Parser(tokens)
    try:
        ast = parser.parse(0)
        tail = parser.peek()
        if tail.kind != "end":
            raise ParseError(f"trailing input {tail.text!r}",
                             tail.line, tail.col)
        return _Elab(zf).value(ast)
    except ParseError:
        raise
    except (KernelError, ZeroDivisionError, OverflowError,
            RecursionError) as exc:
        raise ParseError(str(exc), tokens[0].line, tokens[0].col) from None


def parse_expr(text: str, z=None) -> Expr:
    """Parse a scalar expression; derivative markers are rejected."""
    graded = _elaborate(text, z)
    for mk, e in graded.items():
        if mk is not None and not e.is_zero:
            tok = tokenize(text)[0]
            raise ParseError(f"derivative marker D{mk} in a scalar expression",
                             tok.line, tok.col)
    return graded.get(None, Expr.of(0))


def parse_vfield(text: str, z=None) -> VectorField:
    """Parse an operator: terms with Dt/Dr/Dv markers plus a scalar part."""
    graded = _elaborate(text, z)
    zero = Expr.of(0)
    return VectorField(graded.get("t", zero), graded.get("r", zero),
                       graded.get("v", zero), graded.get(None, zero))


# -- printing --------------------------------------------------------------

def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _param_term(exps: tuple, coeff: Fraction) -> tuple[bool, str]:
    """(negative, body) for one ParamPoly term, sign folded out."""
    neg = coeff < 0
    coeff = abs(coeff)
    factors = []
    for i, p in enumerate(exps):
        if p == 0:
            continue
        factors.append(PARAMS[i] if p == 1 else f"{PARAMS[i]}^{p}")
    if not factors:
        return neg, _frac_str(coeff)
    body = "*".join(factors)
    if coeff != 1:
        body = f"{_frac_str(coeff)}*{body}"
    return neg, body


def _join_signed(parts: list[tuple[bool, str]]) -> str:
    out = []
    for i, (neg, body) in enumerate(parts):
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _poly_str(poly) -> str:
    if poly.is_zero:
        return "0"
    return _join_signed([_param_term(e, c) for e, c in poly.sorted_terms()])


def _pr_parts(coeff: ParamRat) -> tuple[bool, str, bool]:
    """(negative, body, atomic) for a ParamRat coefficient.

    atomic means the body needs no parentheses when multiplied.
    """
    _, lead = coeff.num.leading()
    neg = lead < 0
    num = coeff.num.scale(Fraction(-1)) if neg else coeff.num
    if coeff.den.is_const:
        body = _poly_str(num)
        return neg, body, len(num.terms) == 1
    return neg, f"({_poly_str(num)})/({_poly_str(coeff.den)})", True


def _mono_str(m: Mono) -> str:
    names = ("t", "r", "v")
    factors = []
    for name, e in zip(names, m):
        if e == 0:
            continue
        if e == 1:
            factors.append(name)
        elif e.denominator == 1 and e > 0:
            factors.append(f"{name}^{e}")
        else:
            factors.append(f"{name}^({_frac_str(e)})")
    return "*".join(factors)


def _gpoly_parts(gp) -> list[tuple[bool, str]]:
    parts = []
    for m, coeff in gp.sorted_terms():
        neg, cbody, atomic = _pr_parts(coeff)
        mbody = _mono_str(m)
        if not mbody:
            body = cbody if atomic else f"({cbody})"
        elif coeff.is_one:
            body = mbody
        elif (-coeff).is_one:
            neg, body = True, mbody
        else:
            body = f"{cbody}*{mbody}" if atomic else f"({cbody})*{mbody}"
        parts.append((neg, body))
    return parts


def format_expr(e: Expr) -> str:
    """Canonical text form; format_expr and parse_expr are inverse."""
    if e.is_zero:
        return "0"
    num = _join_signed(_gpoly_parts(e.num))
    if e.den.is_one:
        return num
    return f"({num})/({_poly_den_str(e)})"


def _poly_den_str(e: Expr) -> str:
    return _join_signed(_gpoly_parts(e.den))


def format_vfield(f: VectorField) -> str:
    pieces = []
    for comp, marker in ((f.at, "Dt"), (f.ar, "Dr"), (f.av, "Dv"),
                         (f.a0, None)):
        if comp.is_zero:
            continue
        if marker is None:
            text = format_expr(comp)
            neg = text.startswith("-")
            pieces.append((neg, text[1:] if neg else text))
            continue
        if comp.is_one:
            pieces.append((False, marker))
        elif (-comp).is_one:
            pieces.append((True, marker))
        elif comp.den.is_one and len(comp.num.terms) == 1:
            parts = _gpoly_parts(comp.num)
            neg, body = parts[0]
            pieces.append((neg, f"{body}*{marker}"))
        else:
            pieces.append((False, f"({format_expr(comp)})*{marker}"))
    if not pieces:
        return "0"
    return _join_signed(pieces)
