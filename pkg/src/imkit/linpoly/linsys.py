"""Linear state-space triples and transfer functions.

The resolvent is built by the Leverrier adjugate recurrence, which stays in
exact rational arithmetic whenever the matrices do, so zero/pole data of
rational fixtures is exact.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import DimensionError, InputError
from .poly import Poly
from .ratfn import RationalFn


def _coerce_entry(u):
    if isinstance(u, bool):
        raise InputError("boolean matrix entry")
    if isinstance(u, int):
        return Fraction(u)
    if isinstance(u, Fraction):
        return u
    if isinstance(u, float):
        return u
    if isinstance(u, str):
        return Fraction(u)
    raise InputError(f"bad matrix entry: {u!r}")


def _coerce_matrix(rows):
    out = tuple(tuple(_coerce_entry(u) for u in row) for row in rows)
    if not out or any(len(r) != len(out[0]) for r in out):
        raise DimensionError("matrix rows must be nonempty and of equal length")
    return out


class LinSys:
    """SISO linear system (A, b, c): xdot = A x + u b, y = c x."""

    __slots__ = ("A", "b", "c", "n", "exact")

    def __init__(self, A, b, c):
        self.A = _coerce_matrix(A)
        self.n = len(self.A)
        if len(self.A[0]) != self.n:
            raise DimensionError("A must be square")
        bvec = [_coerce_entry(u) for u in (list(b) if not hasattr(b, "tolist") else list(np.asarray(b).ravel()))]
        cvec = [_coerce_entry(u) for u in (list(c) if not hasattr(c, "tolist") else list(np.asarray(c).ravel()))]
        if len(bvec) != self.n or len(cvec) != self.n:
            raise DimensionError("b and c must have length n")
        self.b = tuple(bvec)
        self.c = tuple(cvec)
        self.exact = (
            all(isinstance(u, Fraction) for row in self.A for u in row)
            and all(isinstance(u, Fraction) for u in self.b)
            and all(isinstance(u, Fraction) for u in self.c)
        )

    def A_float(self) -> np.ndarray:
        return np.array([[float(u) for u in row] for row in self.A], dtype=float)

    def b_float(self) -> np.ndarray:
        return np.array([float(u) for u in self.b], dtype=float)

    def c_float(self) -> np.ndarray:
        return np.array([float(u) for u in self.c], dtype=float)


def _mat_mul(X, Y):
    n = len(X)
    return tuple(
        tuple(sum(X[i][k] * Y[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _mat_add_diag(X, s):
    return tuple(
        tuple(X[i][j] + (s if i == j else 0) for j in range(len(X))) for i in range(len(X))
    )


def _trace(X):
    return sum(X[i][i] for i in range(len(X)))


def leverrier(A) -> tuple[Poly, list]:
    """Characteristic polynomial and adjugate chain of (sI - A).

    Returns (q, [B_0..B_{n-1}]) with (sI - A)^{-1} = sum_k s^{n-1-k} B_k / q(s).
    Exact over Fractions.
    """
    A = _coerce_matrix(A)
    n = len(A)
    exact = all(isinstance(u, Fraction) for row in A for u in row)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    if not exact:
        A = tuple(tuple(float(u) for u in row) for row in A)
    ident = tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))
    coeffs = [one]  # leading coefficient of s^n
    B = ident
    chain = [B]
    for k in range(1, n + 1):
        AB = _mat_mul(A, B)
        ak = -_trace(AB) / k
        coeffs.append(ak)
        if k < n:
            B = _mat_add_diag(AB, ak)
            chain.append(B)
    q = Poly(list(reversed(coeffs)))
    return q, chain


def char_poly(A) -> Poly:
    return leverrier(A)[0]


def transfer_function(sys: LinSys) -> RationalFn:
    """Reduced strictly proper transfer function c (sI - A)^{-1} b."""
    q, chain = leverrier(sys.A)
    n = sys.n
    p_coeffs = []
    for k, B in enumerate(chain):
        # B contributes at power s^{n-1-k}
        val = sum(sys.c[i] * sum(B[i][j] * sys.b[j] for j in range(n)) for i in range(n))
        p_coeffs.append(val)
    p = Poly(list(reversed(p_coeffs)))
    return RationalFn(p, q).reduce()


def realize_controller_form(num: Poly, den: Poly) -> LinSys:
    """Controller-canonical realization of a strictly proper num/den."""
    if den.degree < 1:
        raise InputError("denominator must have degree >= 1")
    if num.degree >= den.degree:
        raise InputError("realization requires a strictly proper quotient")
    den = den.monic() if den.exact else Poly([c / den.lead for c in den.coeffs])
    n = den.degree
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n - 1):
        A[i][i + 1] = Fraction(1)
    for j in range(n):
        A[n - 1][j] = -den.coeffs[j]
    b = [Fraction(0)] * n
    b[n - 1] = Fraction(1)
    c = list(num.coeffs) + [Fraction(0) if num.exact else 0.0] * (n - len(num.coeffs))
    return LinSys(A, b, c)


def markov_relative_degree(sys: LinSys, tol: float = 1e-12) -> int | None:
    """Smallest r with c A^{r-1} b != 0, or None when all Markov parameters
    vanish (zero transfer function). Float systems compare against tol."""
    v = list(sys.b)
    for r in range(1, sys.n + 1):
        val = sum(ci * vi for ci, vi in zip(sys.c, v))
        nonzero = val != 0 if sys.exact else abs(float(val)) > tol
        if nonzero:
            return r
        v = [sum(sys.A[i][j] * v[j] for j in range(sys.n)) for i in range(sys.n)]
    return None
