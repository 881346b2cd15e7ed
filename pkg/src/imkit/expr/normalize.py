"""Structural normalization of expression trees.

The normal form is a light canonical shape (not a full expansion):

* constants folded exactly, rational arithmetic preserved;
* Add/Mul flattened, arguments in canonical order, like terms/factors merged;
* powers of products distributed, nested powers collapsed;
* common rational content and common monomial factors pulled out of sums,
  so quotients like (c*x)/(d*x) cancel structurally.

normalize is idempotent: normalize(normalize(e)) == normalize(e).
Deciding whether an expression is identically zero needs the full expansion
in ratform.py; this module only guarantees a stable shape.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ..errors import ExprDomainError
from .nodes import (
    Add,
    Const,
    Expr,
    Func,
    MINUS_ONE,
    Mul,
    ONE,
    Param,
    Pow,
    Var,
    ZERO,
    sort_key,
)


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(
        math.gcd(a.numerator, b.numerator),
        math.lcm(a.denominator, b.denominator),
    )


def _pow_number(base, k: int):
    if base == 0 and k < 0:
        raise ExprDomainError("zero raised to a negative power", str(base))
    if isinstance(base, Fraction):
        return base**k
    return float(base) ** k if k >= 0 else 1.0 / (float(base) ** (-k))


def normalize(e: Expr) -> Expr:
    if isinstance(e, (Var, Param)):
        return e
    if isinstance(e, Const):
        return e
    if isinstance(e, Func):
        return _norm_func(e.name, normalize(e.arg))
    if isinstance(e, Pow):
        return _norm_pow(normalize(e.base), e.exponent)
    if isinstance(e, Mul):
        return _norm_mul([normalize(f) for f in e.factors])
    if isinstance(e, Add):
        return _norm_add([normalize(t) for t in e.terms])
    raise TypeError(f"not an expression: {e!r}")


_EXACT_FUNC_FOLDS = {
    ("exp", Fraction(0)): ONE,
    ("ln", Fraction(1)): ZERO,
    ("sin", Fraction(0)): ZERO,
    ("cos", Fraction(0)): ONE,
}


def _norm_func(name: str, arg: Expr) -> Expr:
    if isinstance(arg, Const):
        folded = _EXACT_FUNC_FOLDS.get((name, arg.value))
        if folded is not None:
            return folded
        if name == "ln" and arg.value <= 0:
            raise ExprDomainError("ln of a nonpositive constant", str(arg.value))
    return Func(name, arg)


def _norm_pow(base: Expr, k: int) -> Expr:
    if k == 0:
        return ONE
    if k == 1:
        return base
    if isinstance(base, Const):
        return Const(_pow_number(base.value, k))
    if isinstance(base, Pow):
        return _norm_pow(base.base, base.exponent * k)
    if isinstance(base, Mul):
        return _norm_mul([_norm_pow(f, k) for f in base.factors])
    return Pow(base, k)


def _norm_mul(factors: list[Expr]) -> Expr:
    coeff = Fraction(1)
    exponents: dict[Expr, int] = {}

    def feed(f: Expr):
        nonlocal coeff
        if isinstance(f, Const):
            if isinstance(coeff, Fraction) and isinstance(f.value, Fraction):
                coeff = coeff * f.value
            else:
                coeff = float(coeff) * float(f.value)
        elif isinstance(f, Mul):
            for g in f.factors:
                feed(g)
        elif isinstance(f, Pow):
            exponents[f.base] = exponents.get(f.base, 0) + f.exponent
        else:
            exponents[f] = exponents.get(f, 0) + 1

    for f in factors:
        feed(f)

    if coeff == 0:
        return ZERO

    parts: list[Expr] = []
    for base in sorted(exponents, key=sort_key):
        k = exponents[base]
        if k == 0:
            continue
        if isinstance(base, Const):  # can appear via raw Pow(Const, k) input
            part = _pow_number(base.value, k)
            if isinstance(coeff, Fraction) and isinstance(part, Fraction):
                coeff = coeff * part
            else:
                coeff = float(coeff) * float(part)
            continue
        parts.append(base if k == 1 else Pow(base, k))

    if not parts:
        return Const(coeff)
    if coeff != 1:
        parts.insert(0, Const(coeff))
    if len(parts) == 1:
        return parts[0]
    return Mul(tuple(parts))


def _split_coeff(term: Expr):
    """Split a normalized term into (numeric coefficient, symbolic part|None)."""
    if isinstance(term, Const):
        return term.value, None
    if isinstance(term, Mul) and isinstance(term.factors[0], Const):
        rest = term.factors[1:]
        return term.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), term


def _term_exponents(part: Expr | None) -> dict[Expr, int]:
    """Exponent multiset of the symbolic part of a term (for content extraction)."""
    if part is None:
        return {}
    if isinstance(part, Mul):
        factors = part.factors
    else:
        factors = (part,)
    out: dict[Expr, int] = {}
    for f in factors:
        if isinstance(f, Pow):
            out[f.base] = out.get(f.base, 0) + f.exponent
        else:
            out[f] = out.get(f, 0) + 1
    return out


def _rebuild_term(coeff, exponents: dict[Expr, int]) -> Expr:
    parts: list[Expr] = []
    for base in sorted(exponents, key=sort_key):
        k = exponents[base]
        if k:
            parts.append(base if k == 1 else Pow(base, k))
    if not parts:
        return Const(coeff)
    if coeff != 1:
        parts.insert(0, Const(coeff))
    return parts[0] if len(parts) == 1 else Mul(tuple(parts))


def _norm_add(terms_in: list[Expr]) -> Expr:
    const_sum = Fraction(0)
    buckets: dict[Expr, object] = {}

    def feed(t: Expr):
        nonlocal const_sum
        if isinstance(t, Add):
            for s in t.terms:
                feed(s)
            return
        coeff, part = _split_coeff(t)
        if part is None:
            if isinstance(const_sum, Fraction) and isinstance(coeff, Fraction):
                const_sum = const_sum + coeff
            else:
                const_sum = float(const_sum) + float(coeff)
            return
        prev = buckets.get(part)
        if prev is None:
            buckets[part] = coeff
        elif isinstance(prev, Fraction) and isinstance(coeff, Fraction):
            buckets[part] = prev + coeff
        else:
            buckets[part] = float(prev) + float(coeff)

    for t in terms_in:
        feed(t)

    terms: list[tuple[object, Expr]] = []  # (coeff, part)
    for part in sorted(buckets, key=sort_key):
        coeff = buckets[part]
        if coeff != 0:
            terms.append((coeff, part))

    if not terms:
        return Const(const_sum)
    if const_sum == 0 and len(terms) == 1:
        coeff, part = terms[0]
        return part if coeff == 1 else _rebuild_term(coeff, _term_exponents(part))

    has_const = const_sum != 0
    n_terms = len(terms) + (1 if has_const else 0)
    if n_terms >= 2:
        extracted = _extract_content(terms, const_sum if has_const else None)
        if extracted is not None:
            return extracted

    out = [_rebuild_term(c, _term_exponents(p)) for c, p in terms]
    if has_const:
        out.append(Const(const_sum))
    out.sort(key=sort_key)
    return Add(tuple(out))


def _extract_content(terms, const_term):
    """Factor the common rational content and common monomial out of a sum.

    Returns the replacement Mul node, or None when the content is trivial.
    """
    coeffs = [c for c, _ in terms]
    if const_term is not None:
        coeffs.append(const_term)

    exact = all(isinstance(c, Fraction) for c in coeffs)
    if exact:
        content = Fraction(0)
        for c in coeffs:
            content = _frac_gcd(content, abs(c))
        if coeffs[0] < 0:
            content = -content
    else:
        content = Fraction(1)

    common: dict[Expr, int] | None = None
    if const_term is None:
        for _, part in terms:
            exps = _term_exponents(part)
            if common is None:
                common = dict(exps)
            else:
                for base in list(common):
                    if base in exps:
                        common[base] = min(common[base], exps[base])
                    else:
                        del common[base]
            if not common:
                break
    common = common or {}

    if content == 1 and not common:
        return None

    reduced: list[Expr] = []
    for c, part in terms:
        exps = _term_exponents(part)
        for base, k in common.items():
            exps[base] -= k
        new_coeff = c / content if isinstance(c, Fraction) and isinstance(content, Fraction) else float(c) / float(content)
        reduced.append(_rebuild_term(new_coeff, exps))
    if const_term is not None:
        reduced.append(Const(const_term / content))

    inner = _norm_add(reduced)
    outer: list[Expr] = [Const(content)]
    for base in sorted(common, key=sort_key):
        k = common[base]
        if k:
            outer.append(base if k == 1 else Pow(base, k))
    outer.append(inner)
    return _norm_mul(outer)
