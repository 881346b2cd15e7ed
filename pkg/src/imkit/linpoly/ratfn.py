"""Rational functions with exact reduction or tolerance-based root pairing."""

from __future__ import annotations

import numpy as np

from ..errors import InputError
from .poly import Poly, poly_gcd

PAIRING_TOL = 1e-6


def pair_roots(xs: list[complex], ys: list[complex], tol: float = PAIRING_TOL):
    """Greedy nearest-distance pairing between two root multisets.

    Returns (pairs, xs_unpaired, ys_unpaired); a pair is accepted only when
    the distance is below tol * local scale.
    """
    xs_left = list(enumerate(xs))
    ys_left = list(enumerate(ys))
    pairs = []
    while xs_left and ys_left:
        best = None
        for ix, (i, x) in enumerate(xs_left):
            for iy, (j, y) in enumerate(ys_left):
                d = abs(x - y)
                if best is None or d < best[0]:
                    best = (d, ix, iy)
        d, ix, iy = best
        scale = max(1.0, abs(xs_left[ix][1]), abs(ys_left[iy][1]))
        if d > tol * scale:
            break
        pairs.append((xs_left[ix][1], ys_left[iy][1]))
        xs_left.pop(ix)
        ys_left.pop(iy)
    return pairs, [x for _, x in xs_left], [y for _, y in ys_left]


class RationalFn:
    """Quotient of two real polynomials, reducible to coprime form."""

    __slots__ = ("num", "den", "reduced")

    def __init__(self, num: Poly, den: Poly, reduced: bool = False):
        if den.is_zero:
            raise InputError("rational function with zero denominator")
        self.num = num
        self.den = den
        self.reduced = reduced

    @property
    def exact(self) -> bool:
        return self.num.exact and self.den.exact

    def reduce(self, tol: float = PAIRING_TOL) -> "RationalFn":
        """Cancel common factors and make the denominator monic.

        Exact gcd cancellation for rational coefficients; otherwise roots of
        numerator and denominator are paired greedily within `tol` and the
        surviving roots are re-expanded.
        """
        if self.reduced:
            return self
        if self.num.is_zero:
            return RationalFn(Poly.zero(), self.den.monic(), reduced=True)
        if self.exact:
            g = poly_gcd(self.num, self.den)
            num = self.num // g if g.degree > 0 else self.num
            den = self.den // g if g.degree > 0 else self.den
            lead = den.lead
            return RationalFn(num * (1 / lead), den.monic(), reduced=True)
        nr = self.num.roots()
        dr = self.den.roots()
        _pairs, nr_left, dr_left = pair_roots(nr, dr, tol)
        scale = float(self.num.lead) / float(self.den.lead)
        num = Poly.from_roots(nr_left, lead=scale)
        den = Poly.from_roots(dr_left, lead=1.0)
        return RationalFn(num, den, reduced=True)

    def __mul__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.num * other.num, self.den * other.den)

    def __add__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def __call__(self, s):
        return self.num(s) / self.den(s)

    def equals(self, other: "RationalFn") -> bool:
        """Exact equality as rational functions (cross multiplication)."""
        diff = self.num * other.den - other.num * self.den
        return diff.is_zero

    def __repr__(self):
        return f"RationalFn(({self.num.pretty()}) / ({self.den.pretty()}))"
