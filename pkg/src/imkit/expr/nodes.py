"""Expression tree nodes for the symbolic kernel.

Constants are kept exact (`Fraction`) whenever the source data is rational;
floats only enter through programmatic construction from numeric matrices.
Nodes are immutable; every operation builds new trees.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[Fraction, float]

FUNCTION_NAMES = ("exp", "ln", "sin", "cos")


def as_number(value) -> Number:
    """Coerce a Python number to the internal constant representation."""
    if isinstance(value, bool):
        raise TypeError("booleans are not expression constants")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (Fraction, float)):
        return value
    raise TypeError(f"not a number: {value!r}")


class Expr:
    """Base class; subclasses are Const, Var, Param, Add, Mul, Pow, Func."""

    __slots__ = ("_hash",)

    # Operator overloads build raw (unnormalized) trees; call normalize()
    # when a canonical form is needed.
    def __add__(self, other):
        return Add((self, coerce(other)))

    def __radd__(self, other):
        return Add((coerce(other), self))

    def __sub__(self, other):
        return Add((self, neg(coerce(other))))

    def __rsub__(self, other):
        return Add((coerce(other), neg(self)))

    def __mul__(self, other):
        return Mul((self, coerce(other)))

    def __rmul__(self, other):
        return Mul((coerce(other), self))

    def __truediv__(self, other):
        return Mul((self, Pow(coerce(other), -1)))

    def __rtruediv__(self, other):
        return Mul((coerce(other), Pow(self, -1)))

    def __pow__(self, k):
        return Pow(self, k)

    def __neg__(self):
        return neg(self)

    def __repr__(self):
        from .printing import to_string

        return f"<Expr {to_string(self)}>"


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = as_number(value)
        self._hash = hash(("const", self.value))

    def __eq__(self, other):
        return isinstance(other, Const) and self.value == other.value

    def __hash__(self):
        return self._hash


class Var(Expr):
    """State variable x_i, 1-based index."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        if not isinstance(index, int) or index < 1:
            raise ValueError(f"variable index must be a positive integer, got {index!r}")
        self.index = index
        self._hash = hash(("var", index))

    def __eq__(self, other):
        return isinstance(other, Var) and self.index == other.index

    def __hash__(self):
        return self._hash


class Param(Expr):
    """Named symbolic parameter."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("param", name))

    def __eq__(self, other):
        return isinstance(other, Param) and self.name == other.name

    def __hash__(self):
        return self._hash


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Expr]):
        self.terms = tuple(terms)
        self._hash = hash(("add", self.terms))

    def __eq__(self, other):
        return isinstance(other, Add) and self.terms == other.terms

    def __hash__(self):
        return self._hash


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: Iterable[Expr]):
        self.factors = tuple(factors)
        self._hash = hash(("mul", self.factors))

    def __eq__(self, other):
        return isinstance(other, Mul) and self.factors == other.factors

    def __hash__(self):
        return self._hash


class Pow(Expr):
    """Integer power; negative exponents encode division."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: int):
        if isinstance(exponent, Fraction):
            if exponent.denominator != 1:
                raise ValueError("only integer exponents are supported")
            exponent = int(exponent)
        if not isinstance(exponent, int):
            raise ValueError(f"exponent must be an integer, got {exponent!r}")
        self.base = base
        self.exponent = exponent
        self._hash = hash(("pow", base, exponent))

    def __eq__(self, other):
        return isinstance(other, Pow) and self.exponent == other.exponent and self.base == other.base

    def __hash__(self):
        return self._hash


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        if name not in FUNCTION_NAMES:
            raise ValueError(f"unknown function {name!r}")
        self.name = name
        self.arg = arg
        self._hash = hash(("func", name, arg))

    def __eq__(self, other):
        return isinstance(other, Func) and self.name == other.name and self.arg == other.arg

    def __hash__(self):
        return self._hash


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)


def coerce(value) -> Expr:
    return value if isinstance(value, Expr) else Const(value)


def const(value) -> Const:
    return Const(value)


def var(index: int) -> Var:
    return Var(index)


def param(name: str) -> Param:
    return Param(name)


def add(*terms) -> Expr:
    return Add(tuple(coerce(t) for t in terms))


def mul(*factors) -> Expr:
    return Mul(tuple(coerce(f) for f in factors))


def sub(a, b) -> Expr:
    return Add((coerce(a), neg(coerce(b))))


def div(a, b) -> Expr:
    return Mul((coerce(a), Pow(coerce(b), -1)))


def powi(base, exponent: int) -> Expr:
    return Pow(coerce(base), exponent)


def neg(e) -> Expr:
    return Mul((MINUS_ONE, coerce(e)))


def exp(e) -> Expr:
    return Func("exp", coerce(e))


def ln(e) -> Expr:
    return Func("ln", coerce(e))


def sin(e) -> Expr:
    return Func("sin", coerce(e))


def cos(e) -> Expr:
    return Func("cos", coerce(e))


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, Func):
        return (e.arg,)
    return ()


def walk(e: Expr):
    """Yield every node of the tree, root first."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(children(node))


def walk_exprs(exprs: Iterable[Expr]):
    """Walk several trees in sequence, preserving expression order."""
    for e in exprs:
        yield from walk(e)


def variables_in(e: Expr) -> set[int]:
    return {node.index for node in walk(e) if isinstance(node, Var)}


def params_in(e: Expr) -> set[str]:
    return {node.name for node in walk(e) if isinstance(node, Param)}


def max_var_index(e: Expr) -> int:
    indices = variables_in(e)
    return max(indices) if indices else 0


def contains_state(e: Expr) -> bool:
    return any(isinstance(node, Var) for node in walk(e))


def subst_vars(e: Expr, mapping: Mapping[int, Expr]) -> Expr:
    """Replace state variables by expressions. Raw result; normalize after."""
    if isinstance(e, Var):
        return mapping.get(e.index, e)
    if isinstance(e, (Const, Param)):
        return e
    if isinstance(e, Add):
        return Add(tuple(subst_vars(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return Mul(tuple(subst_vars(f, mapping) for f in e.factors))
    if isinstance(e, Pow):
        return Pow(subst_vars(e.base, mapping), e.exponent)
    return Func(e.name, subst_vars(e.arg, mapping))


def subst_params(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace named parameters by expressions (or numbers via coerce)."""
    if isinstance(e, Param):
        repl = mapping.get(e.name)
        return e if repl is None else coerce(repl)
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Add):
        return Add(tuple(subst_params(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return Mul(tuple(subst_params(f, mapping) for f in e.factors))
    if isinstance(e, Pow):
        return Pow(subst_params(e.base, mapping), e.exponent)
    return Func(e.name, subst_params(e.arg, mapping))


def shift_vars(e: Expr, offset: int) -> Expr:
    """Renumber x_i -> x_{i+offset}; used when embedding systems in cascades."""
    if offset == 0:
        return e
    if isinstance(e, Var):
        return Var(e.index + offset)
    if isinstance(e, (Const, Param)):
        return e
    if isinstance(e, Add):
        return Add(tuple(shift_vars(t, offset) for t in e.terms))
    if isinstance(e, Mul):
        return Mul(tuple(shift_vars(f, offset) for f in e.factors))
    if isinstance(e, Pow):
        return Pow(shift_vars(e.base, offset), e.exponent)
    return Func(e.name, shift_vars(e.arg, offset))


def sort_key(e: Expr):
    """Total order on normalized nodes, used for canonical argument ordering."""
    if isinstance(e, Const):
        return (0, float(e.value))
    if isinstance(e, Var):
        return (1, e.index)
    if isinstance(e, Param):
        return (2, e.name)
    if isinstance(e, Func):
        return (3, e.name, sort_key(e.arg))
    if isinstance(e, Pow):
        return (4, sort_key(e.base), e.exponent)
    if isinstance(e, Mul):
        return (5, tuple(sort_key(f) for f in e.factors))
    return (6, tuple(sort_key(t) for t in e.terms))
