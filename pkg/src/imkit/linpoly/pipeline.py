"""The linear internal-model pipeline.

Given a strictly proper transfer function S = p/q, the closed-loop zeros of S
become feedback poles through the division q = a*p + b; when the cascade with
an exosystem transfer function G = 1/pi is stable, pi must divide p, and the
feedback block b/p factors through a controller-form realization of b2/pi
whose state equations match the exosystem companion form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DecompositionError, InputError, NoInternalModelError
from .poly import Poly, poly_divmod
from .ratfn import PAIRING_TOL, RationalFn, pair_roots
from .linsys import LinSys, realize_controller_form

EPS_STAB = 1e-9


@dataclass(frozen=True)
class FeedbackDecomposition:
    """S rewritten as y = (1/a)(u - (b/p) y)."""

    a: Poly
    feedback: RationalFn
    b: Poly
    b_is_zero: bool


def feedback_decomposition(S: RationalFn) -> FeedbackDecomposition:
    """Divide the denominator by the numerator: q = a*p + b, feedback b/p."""
    S = S.reduce()
    if S.num.is_zero:
        raise DecompositionError(
            "decomposition requires a nonzero numerator (zeros polynomial must not vanish identically)"
        )
    if S.num.degree >= S.den.degree:
        raise InputError("decomposition requires a strictly proper transfer function")
    a, b = poly_divmod(S.den, S.num)
    return FeedbackDecomposition(a, RationalFn(b, S.num), b, b.is_zero)


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    poles: tuple[complex, ...]
    cancelled: tuple[tuple[complex, complex], ...]
    eps_stab: float
    pairing_tol: float


def check_linear_adaptation(
    S: RationalFn, G: RationalFn, eps_stab: float = EPS_STAB, pairing_tol: float = PAIRING_TOL
) -> StabilityVerdict:
    """Stability of the product G*S after pole/zero cancellation.

    Exact inputs cancel by polynomial gcd; floats pair roots within
    pairing_tol. Stable means every surviving pole has real part < -eps_stab.
    """
    S = S.reduce()
    G = G.reduce()
    prod = S * G
    if prod.num.is_zero:
        return StabilityVerdict(True, (), (), eps_stab, pairing_tol)
    if prod.exact:
        reduced = prod.reduce()
        zeros_before = prod.num.monic()
        cancelled_poly = zeros_before // reduced.num.monic() if reduced.num.degree < prod.num.degree else Poly([1])
        cancelled = tuple((z, z) for z in cancelled_poly.roots()) if cancelled_poly.degree > 0 else ()
        poles = tuple(reduced.den.roots())
    else:
        nr = prod.num.roots()
        dr = prod.den.roots()
        pairs, _nleft, dleft = pair_roots(nr, dr, pairing_tol)
        cancelled = tuple(pairs)
        poles = tuple(dleft)
    stable = all(z.real < -eps_stab for z in poles)
    return StabilityVerdict(stable, poles, cancelled, eps_stab, pairing_tol)


@dataclass(frozen=True)
class LinearIMResult:
    """Constructive internal model extracted from the linear pipeline."""

    pi: Poly
    p0: Poly
    a: Poly
    b: Poly
    b1: Poly
    b2: Poly
    realization: LinSys  # controller form of b2/pi; state equations match the exosystem

    @property
    def companion(self) -> np.ndarray:
        return self.realization.A_float()

    @property
    def output_row(self) -> np.ndarray:
        return self.realization.c_float()


def extract_internal_model_linear(
    S: RationalFn, pi: Poly, eps_stab: float = EPS_STAB, pairing_tol: float = PAIRING_TOL
) -> LinearIMResult:
    """Verify pi | p and build the internal model b/p = (b1/p0) * (b2/pi).

    The factor choice is b2 = 1, b1 = b: any b2 sharing a root with pi would
    make the controller-form pair unobservable and generate only a subspace
    of the exosystem's outputs.
    """
    S = S.reduce()
    if S.num.is_zero:
        raise DecompositionError("degenerate transfer function: numerator is identically zero")
    if pi.degree < 1:
        raise InputError("exosystem polynomial must have degree >= 1")
    if not pi.is_monic(tol=1e-9):
        raise InputError("exosystem polynomial must be monic")
    if any(z.real < -eps_stab for z in pi.roots()):
        raise InputError(
            "exosystem polynomial has a stable root; persistent signal classes have none"
        )
    p, q = S.num, S.den
    if S.exact and pi.exact:
        p0, rem = poly_divmod(p, pi)
        if not rem.is_zero:
            raise NoInternalModelError(
                f"{pi.pretty()} does not divide the zeros polynomial {p.pretty()}"
            )
    else:
        pr = p.roots()
        pir = pi.roots()
        pairs, pi_left, _ = pair_roots(pir, pr, pairing_tol)
        if pi_left:
            raise NoInternalModelError(
                f"unmatched exosystem pole(s) {pi_left} among the zeros of S"
            )
        p0, _rem = poly_divmod(p, pi)
    a, b = poly_divmod(q, p)
    b2 = Poly([1])
    b1 = b
    realization = realize_controller_form(b2, pi)
    return LinearIMResult(pi, p0, a, b, b1, b2, realization)
