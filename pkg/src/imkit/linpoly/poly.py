"""Univariate polynomials with dual exact/float arithmetic.

Coefficients are ascending. A polynomial constructed from ints/Fractions
stays exact through ring operations and division; float input switches the
whole polynomial to double arithmetic. The zero polynomial has an empty
coefficient list and degree -1.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import InputError, NumericalError


def _coerce_coeff(u):
    if isinstance(u, bool):
        raise InputError("boolean polynomial coefficient")
    if isinstance(u, int):
        return Fraction(u)
    if isinstance(u, Fraction):
        return u
    if isinstance(u, float):
        return u
    if isinstance(u, str):
        return Fraction(u)
    raise InputError(f"bad polynomial coefficient: {u!r}")


class Poly:
    """Real polynomial, ascending coefficients."""

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs):
        cs = [_coerce_coeff(c) for c in coeffs]
        exact = all(isinstance(c, Fraction) for c in cs)
        if not exact:
            cs = [float(c) for c in cs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.exact = exact

    @staticmethod
    def zero() -> "Poly":
        return Poly([])

    @staticmethod
    def monomial(k: int, coeff=1) -> "Poly":
        return Poly([0] * k + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        if self.is_zero:
            raise InputError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return Poly([x + y for x, y in zip(a, b)])

    def __sub__(self, other):
        other = other if isinstance(other, Poly) else Poly([other])
        return self + (other * -1)

    def __mul__(self, other):
        if isinstance(other, Poly):
            if self.is_zero or other.is_zero:
                return Poly.zero()
            out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return Poly(out)
        return Poly([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __call__(self, s):
        """Horner evaluation; accepts real, complex, or Fraction points."""
        if isinstance(s, int):
            s = Fraction(s)
        exact_point = isinstance(s, Fraction) and self.exact
        out = Fraction(0) if exact_point else 0.0 * s
        for c in reversed(self.coeffs):
            out = out * s + (c if exact_point else float(c))
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Quotient and remainder: self = q*other + r, deg r < deg other.

        Exact when both operands are exact.
        """
        if other.is_zero:
            raise InputError("polynomial division by the zero polynomial")
        if self.degree < other.degree:
            return Poly.zero(), self
        exact = self.exact and other.exact
        rem = list(self.coeffs) if exact else [float(c) for c in self.coeffs]
        den = list(other.coeffs) if exact else [float(c) for c in other.coeffs]
        dq = self.degree - other.degree
        quot = [0] * (dq + 1)
        lead = den[-1]
        for k in range(dq, -1, -1):
            q = rem[other.degree + k] / lead
            quot[k] = q
            if q != 0:
                for j, d in enumerate(den):
                    rem[j + k] -= q * d
        return Poly(quot), Poly(rem[: other.degree])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Poly":
        if self.is_zero:
            raise InputError("cannot normalize the zero polynomial")
        lead = self.lead
        return Poly([c / lead for c in self.coeffs])

    def is_monic(self, tol: float = 0.0) -> bool:
        if self.is_zero:
            return False
        return self.lead == 1 if self.exact else abs(float(self.lead) - 1.0) <= tol

    def to_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)

    def companion(self) -> np.ndarray:
        """Companion matrix of the monic normalization (bottom-row form)."""
        if self.degree < 1:
            raise InputError("companion matrix requires degree >= 1")
        m = self.monic()
        n = m.degree
        C = np.zeros((n, n))
        C[: n - 1, 1:] = np.eye(n - 1)
        C[n - 1, :] = [-float(c) for c in m.coeffs[:-1]]
        return C

    def roots(self) -> list[complex]:
        """Eigenvalues of the balanced companion matrix, sorted by (Re, Im)."""
        if self.is_zero:
            raise InputError("zero polynomial has no well-defined roots")
        if self.degree == 0:
            return []
        try:
            vals = np.linalg.eigvals(self.companion())
        except np.linalg.LinAlgError as err:
            raise NumericalError(f"root finding did not converge: {err}") from err
        return sorted((complex(v) for v in vals), key=lambda z: (z.real, z.imag))

    @staticmethod
    def from_roots(roots, lead=1.0) -> "Poly":
        coeffs = np.array([1.0 + 0.0j])
        for r in roots:
            coeffs = np.convolve(coeffs, np.array([-r, 1.0 + 0.0j]))
        if np.max(np.abs(coeffs.imag)) > 1e-9 * max(1.0, np.max(np.abs(coeffs))):
            raise NumericalError("root set is not conjugate-symmetric")
        return Poly([float(lead) * float(c.real) for c in coeffs])

    def pretty(self, symbol: str = "s") -> str:
        if self.is_zero:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if isinstance(c, Fraction) and c.denominator == 1:
                cs = str(c.numerator)
            else:
                cs = str(c) if isinstance(c, Fraction) else repr(float(c))
            if k == 0:
                term = cs
            else:
                base = symbol if k == 1 else f"{symbol}^{k}"
                term = base if cs == "1" else (f"-{base}" if cs == "-1" else f"{cs}*{base}")
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return out

    def __repr__(self):
        return f"Poly({self.pretty()})"


def poly_divmod(q: Poly, p: Poly) -> tuple[Poly, Poly]:
    """Divide q by p: q = a*p + b with deg b < deg p."""
    return q.divmod(p)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm; exact arithmetic only."""
    if not (a.exact and b.exact):
        raise InputError("exact gcd requires rational polynomials")
    while not b.is_zero:
        a, b = b, a % b
    return a.monic() if not a.is_zero else a


def poly_roots(p: Poly) -> list[complex]:
    return p.roots()
