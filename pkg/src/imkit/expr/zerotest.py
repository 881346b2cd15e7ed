"""Graded zero-testing.

The exact decision runs on the canonical rational normal form and is complete
for polynomial/rational expressions with rational coefficients. Anything with
transcendental content that does not cancel rationally falls back to
deterministic seeded sampling. Verdicts that needed numeric parameter
substitution are never Proven.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import ExprDomainError, InconclusiveError
from ..grading import Grade
from .nodes import Expr, max_var_index, params_in
from .evaluate import eval_expr
from .ratform import proportionality_constant, rational_form

WITNESS_THRESHOLD = 1e-8
DEFAULT_SAMPLES = 32
DEFAULT_BOX = (-3.0, 3.0)
PARAM_RANGE = (0.0, 3.0)  # open at 0: parameters are sampled in (0, 3]

PROVEN_ZERO = "proven_zero"
PROVEN_NONZERO_CONSTANT = "proven_nonzero_constant"
SAMPLED_ZERO = "sampled_zero"
SAMPLED_NONZERO = "sampled_nonzero"


@dataclass(frozen=True)
class ZeroStatus:
    kind: str
    constant: Fraction | float | None = None
    samples: int = 0
    max_abs: float = 0.0
    witness: tuple | None = None
    witness_params: dict | None = None
    witness_value: float = 0.0

    @property
    def is_zero(self) -> bool:
        return self.kind in (PROVEN_ZERO, SAMPLED_ZERO)

    @property
    def grade(self) -> Grade:
        if self.kind in (PROVEN_ZERO, PROVEN_NONZERO_CONSTANT):
            return Grade.PROVEN
        return Grade.SAMPLED

    def __str__(self):
        if self.kind == PROVEN_ZERO:
            return "ProvenZero"
        if self.kind == PROVEN_NONZERO_CONSTANT:
            return f"ProvenNonzeroConstant({self.constant})"
        if self.kind == SAMPLED_ZERO:
            return f"SampledZero(samples={self.samples}, max_abs={self.max_abs:.3g})"
        return f"SampledNonzero(witness={self.witness}, value={self.witness_value:.6g})"


def sample_point(rng: random.Random, n: int, box: Sequence[tuple[float, float]] | None):
    if box is None:
        return tuple(rng.uniform(*DEFAULT_BOX) for _ in range(n))
    return tuple(rng.uniform(lo, hi) for lo, hi in box)


def sample_params(rng: random.Random, names: Sequence[str]) -> dict[str, float]:
    lo, hi = PARAM_RANGE
    out = {}
    for name in sorted(names):
        u = rng.uniform(lo, hi)
        out[name] = u if u > lo else hi
    return out


def sample_values(
    e: Expr,
    seed: int = 0,
    n: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
    params: dict[str, float] | None = None,
    count: int = DEFAULT_SAMPLES,
):
    """Evaluate at deterministically sampled points.

    Returns a list of (point, param_values, value). Points where evaluation
    fails (domain errors) are discarded and resampled within a bounded
    budget; InconclusiveError is raised when no point evaluates at all.
    """
    rng = random.Random(seed)
    dim = max_var_index(e) if n is None else n
    free_params = sorted(params_in(e) - set(params or {}))
    results = []
    attempts = 0
    budget = 8 * count
    while len(results) < count and attempts < budget:
        attempts += 1
        point = sample_point(rng, dim, box)
        pvals = dict(params or {})
        pvals.update(sample_params(rng, free_params))
        try:
            value = eval_expr(e, point, pvals)
        except ExprDomainError:
            continue
        results.append((point, pvals, value))
    if not results:
        raise InconclusiveError(
            f"all {attempts} sample points failed to evaluate (status Unknown)"
        )
    return results


def is_zero(
    e: Expr,
    seed: int = 0,
    n: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
    params: dict[str, float] | None = None,
    min_samples: int = DEFAULT_SAMPLES,
) -> ZeroStatus:
    """Decide whether an expression vanishes identically.

    Exact on the polynomial/rational fragment; sampled verdicts elsewhere.
    `box` confines state sampling to a domain; `params` pins parameter values
    (anything unpinned is sampled in (0, 3], making the verdict Sampled).
    """
    try:
        num, den, _ctx = rational_form(e)
        if not num:
            return ZeroStatus(PROVEN_ZERO)
        ratio = proportionality_constant(num, den)
        if ratio is not None and ratio != 0:
            return ZeroStatus(PROVEN_NONZERO_CONSTANT, constant=ratio)
    except ExprDomainError:
        pass  # ill-defined rational structure; let sampling judge the values

    samples = sample_values(e, seed=seed, n=n, box=box, params=params, count=min_samples)
    max_abs = 0.0
    for point, pvals, value in samples:
        if abs(value) > WITNESS_THRESHOLD:
            return ZeroStatus(
                SAMPLED_NONZERO,
                samples=len(samples),
                witness=point,
                witness_params=pvals,
                witness_value=value,
            )
        max_abs = max(max_abs, abs(value))
    return ZeroStatus(SAMPLED_ZERO, samples=len(samples), max_abs=max_abs)
