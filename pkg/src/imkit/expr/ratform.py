"""Canonical multivariate rational normal form.

Every expression expands to a quotient P/Q of multivariate polynomials with
exact rational coefficients over "atoms": state variables, parameters, and
transcendental subexpressions treated as opaque symbols (their arguments
canonicalized recursively). On the polynomial/rational fragment this decides
identical vanishing exactly; for transcendental content it is sound but not
complete (e.g. trig identities are out of scope and fall back to sampling).

Monomials are sparse tuples of (atom_index, exponent) pairs; polynomials are
dicts mapping monomials to nonzero Fractions.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import ExprDomainError
from .nodes import Add, Const, Expr, Func, Mul, Param, Pow, Var
from .normalize import normalize

Monomial = tuple[tuple[int, int], ...]
PolyDict = dict[Monomial, Fraction]

_ONE_MONO: Monomial = ()


def _poly_const(c: Fraction) -> PolyDict:
    return {} if c == 0 else {_ONE_MONO: c}


def _poly_add(p: PolyDict, q: PolyDict) -> PolyDict:
    out = dict(p)
    for mono, c in q.items():
        s = out.get(mono, Fraction(0)) + c
        if s:
            out[mono] = s
        else:
            out.pop(mono, None)
    return out


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps = dict(a)
    for idx, k in b:
        e = exps.get(idx, 0) + k
        if e:
            exps[idx] = e
        else:
            del exps[idx]
    return tuple(sorted(exps.items()))


def _poly_mul(p: PolyDict, q: PolyDict) -> PolyDict:
    out: PolyDict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            mono = _mono_mul(m1, m2)
            s = out.get(mono, Fraction(0)) + c1 * c2
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
    return out


def _poly_pow(p: PolyDict, k: int) -> PolyDict:
    result = _poly_const(Fraction(1))
    base = p
    e = k
    while e:
        if e & 1:
            result = _poly_mul(result, base)
        base = _poly_mul(base, base)
        e >>= 1
    return result


class _Context:
    """Registry assigning indices to atoms discovered during expansion."""

    def __init__(self):
        self.atoms: list[Expr] = []
        self.index: dict[Expr, int] = {}

    def atom(self, e: Expr) -> int:
        idx = self.index.get(e)
        if idx is None:
            idx = len(self.atoms)
            self.atoms.append(e)
            self.index[e] = idx
        return idx


_CONST_FOLDS = {
    ("exp", Fraction(0)): Fraction(1),
    ("ln", Fraction(1)): Fraction(0),
    ("sin", Fraction(0)): Fraction(0),
    ("cos", Fraction(0)): Fraction(1),
}


def _expand(e: Expr, ctx: _Context) -> tuple[PolyDict, PolyDict]:
    if isinstance(e, Const):
        value = e.value
        if isinstance(value, float):
            value = Fraction(value)  # exact binary-rational conversion
        return _poly_const(value), _poly_const(Fraction(1))
    if isinstance(e, (Var, Param)):
        idx = ctx.atom(e)
        return {((idx, 1),): Fraction(1)}, _poly_const(Fraction(1))
    if isinstance(e, Func):
        num, den = _expand(e.arg, ctx)
        arg = rational_to_expr(num, den, ctx)
        if isinstance(arg, Const) and isinstance(arg.value, Fraction):
            folded = _CONST_FOLDS.get((e.name, arg.value))
            if folded is not None:
                return _poly_const(folded), _poly_const(Fraction(1))
        idx = ctx.atom(Func(e.name, arg))
        return {((idx, 1),): Fraction(1)}, _poly_const(Fraction(1))
    if isinstance(e, Add):
        num, den = _poly_const(Fraction(0)), _poly_const(Fraction(1))
        for t in e.terms:
            tn, td = _expand(t, ctx)
            num = _poly_add(_poly_mul(num, td), _poly_mul(tn, den))
            den = _poly_mul(den, td)
        return num, den
    if isinstance(e, Mul):
        num, den = _poly_const(Fraction(1)), _poly_const(Fraction(1))
        for f in e.factors:
            fn, fd = _expand(f, ctx)
            num = _poly_mul(num, fn)
            den = _poly_mul(den, fd)
        return num, den
    if isinstance(e, Pow):
        num, den = _expand(e.base, ctx)
        k = e.exponent
        if k < 0:
            if not num:
                raise ExprDomainError("division by an identically zero expression")
            num, den = den, num
            k = -k
        return _poly_pow(num, k), _poly_pow(den, k)
    raise TypeError(f"not an expression: {e!r}")


def rational_form(e: Expr) -> tuple[PolyDict, PolyDict, _Context]:
    """Expand to (numerator, denominator, atom registry)."""
    ctx = _Context()
    num, den = _expand(e, ctx)
    if not den:
        raise ExprDomainError("division by an identically zero expression")
    return num, den, ctx


def proportionality_constant(p: PolyDict, q: PolyDict) -> Fraction | None:
    """Return c with p == c*q, or None if the quotient is not constant."""
    if not p:
        return Fraction(0)
    if not q or len(p) != len(q):
        return None
    mono, cq = next(iter(q.items()))
    cp = p.get(mono)
    if cp is None:
        return None
    ratio = cp / cq
    for mono, cq in q.items():
        cp = p.get(mono)
        if cp is None or cp != ratio * cq:
            return None
    return ratio


def rational_to_expr(num: PolyDict, den: PolyDict, ctx: _Context) -> Expr:
    """Rebuild a normalized expression from a rational normal form."""
    ratio = proportionality_constant(num, den)
    if ratio is not None:
        return normalize(Const(ratio))

    def poly_expr(p: PolyDict) -> Expr:
        terms = []
        for mono, c in p.items():
            factors: list[Expr] = [Const(c)]
            for idx, k in mono:
                factors.append(Pow(ctx.atoms[idx], k) if k != 1 else ctx.atoms[idx])
            terms.append(Mul(tuple(factors)))
        return Add(tuple(terms))

    num_e = poly_expr(num)
    cden = proportionality_constant(den, _poly_const(Fraction(1)))
    if cden is not None:
        return normalize(Mul((num_e, Const(1 / cden)))) if cden != 1 else normalize(num_e)
    return normalize(Mul((num_e, Pow(poly_expr(den), -1))))


def expand_simplify(e: Expr) -> Expr:
    """Full expansion to the canonical quotient, rendered back as an Expr.

    Heavier than normalize(); used where structural cancellation matters
    (normalized direction fields, coefficient extraction).
    """
    num, den, ctx = rational_form(e)
    return rational_to_expr(num, den, ctx)


def is_provably_zero(e: Expr) -> bool:
    num, _den, _ctx = rational_form(e)
    return not num
