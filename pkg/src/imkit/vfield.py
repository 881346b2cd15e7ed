"""Vector fields, Lie calculus, and verification of the structural hypotheses
(uniform relative degree, completeness and pairwise commutation of the
normalized direction fields) for input-affine systems."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import AssumptionViolationError, DimensionError, ExprDomainError, InconclusiveError
from .grading import Grade, weakest
from .expr import (
    Expr,
    ZeroStatus,
    const,
    differentiate,
    eval_expr,
    expand_simplify,
    is_zero,
    max_var_index,
    mul,
    normalize,
    params_in,
    pow_expr,
    sample_params,
    sample_point,
    to_string,
    var,
)
from .expr.zerotest import WITNESS_THRESHOLD

Box = Sequence[tuple[float, float]]


@dataclass(frozen=True)
class VectorField:
    """Vector of expressions, one component per state coordinate."""

    components: tuple[Expr, ...]
    n: int

    def __post_init__(self):
        if len(self.components) != self.n:
            raise DimensionError(f"expected {self.n} components, got {len(self.components)}")
        for c in self.components:
            if max_var_index(c) > self.n:
                raise DimensionError(
                    f"component {to_string(c)} references x{max_var_index(c)} beyond dimension {self.n}"
                )

    @staticmethod
    def of(components: Sequence[Expr], n: int | None = None) -> "VectorField":
        comps = tuple(normalize(c) for c in components)
        return VectorField(comps, len(comps) if n is None else n)

    def jacobian(self) -> list[list[Expr]]:
        return [[differentiate(c, j + 1) for j in range(self.n)] for c in self.components]

    def eval(self, point, params=None):
        return [eval_expr(c, point, params) for c in self.components]

    def is_constant(self) -> bool:
        """No state dependence (parameters still allowed)."""
        from .expr import contains_state

        return not any(contains_state(c) for c in self.components)

    def is_linear_affine(self) -> bool:
        """Every component is affine in the state: M(params)*x + v(params)."""
        from .expr import contains_state

        for c in self.components:
            for j in range(1, self.n + 1):
                if contains_state(differentiate(c, j)):
                    return False
        return True

    def __str__(self):
        return "(" + ", ".join(to_string(c) for c in self.components) + ")"


@dataclass(frozen=True)
class AffineSystem:
    """Input-affine SISO system: xdot = f(x) + u*g(x), y = h(x).

    The zero-equilibrium conventions f(0)=0, h(0)=0 are checked exactly when
    the parameters permit; violations are recorded as warnings (they are
    removable by a coordinate shift) rather than rejected.
    """

    f: VectorField
    g: VectorField
    h: Expr
    n: int
    params: tuple[str, ...] = ()
    domain: tuple[tuple[float, float], ...] | None = None
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @staticmethod
    def build(f, g, h, n=None, params=(), domain=None) -> "AffineSystem":
        fv = f if isinstance(f, VectorField) else VectorField.of(f, n)
        gv = g if isinstance(g, VectorField) else VectorField.of(g, n)
        dim = n if n is not None else fv.n
        if fv.n != dim or gv.n != dim:
            raise DimensionError("f and g must have the state dimension")
        h_n = normalize(h)
        if max_var_index(h_n) > dim:
            raise DimensionError("h references a variable beyond the state dimension")
        dom = tuple((float(lo), float(hi)) for lo, hi in domain) if domain is not None else None
        if dom is not None and len(dom) != dim:
            raise DimensionError("domain box must have one interval per coordinate")
        warnings = []
        origin = {j: const(0) for j in range(1, dim + 1)}
        from .expr import subst_vars, Const

        for label, e in [("f", None), ("h", h_n)]:
            exprs = fv.components if label == "f" else (e,)
            for comp in exprs:
                at0 = normalize(subst_vars(comp, origin))
                if not (isinstance(at0, Const) and at0.value == 0):
                    warnings.append(
                        f"{label}(0) = 0 not verified ({label} at origin: {to_string(at0)}); "
                        "recorded as user-asserted"
                    )
                    break
        return AffineSystem(fv, gv, h_n, dim, tuple(params), dom, tuple(warnings))

    def sampling_box(self) -> Box | None:
        return self.domain


def lie_derivative(h: Expr, x_field: VectorField) -> Expr:
    """Directional derivative of a scalar along a vector field, normalized."""
    if max_var_index(h) > x_field.n:
        raise DimensionError("scalar references a variable beyond the field dimension")
    total = const(0)
    for j, comp in enumerate(x_field.components, start=1):
        total = total + differentiate(h, j) * comp
    return normalize(total)


def lie_bracket(x_field: VectorField, y_field: VectorField) -> VectorField:
    """Commutator [X, Y] = (DY)X - (DX)Y.

    For linear fields X = Ax, Y = Bx the convention yields (BA - AB)x.
    """
    if x_field.n != y_field.n:
        raise DimensionError("bracket requires fields of equal dimension")
    n = x_field.n
    jx = x_field.jacobian()
    jy = y_field.jacobian()
    comps = []
    for i in range(n):
        total = const(0)
        for j in range(n):
            total = total + jy[i][j] * x_field.components[j] - jx[i][j] * y_field.components[j]
        comps.append(normalize(total))
    return VectorField(tuple(comps), n)


def iterated_lie(h: Expr, f_field: VectorField, k: int) -> Expr:
    out = normalize(h)
    for _ in range(k):
        out = lie_derivative(out, f_field)
    return out


@dataclass(frozen=True)
class RelDegree:
    """Outcome of the uniform relative degree search.

    r is None when no uniform degree exists; `chain` holds the output and its
    drift derivatives up to order r-1, `decisive` the first input coefficient
    that must vanish nowhere.
    """

    r: int | None
    chain: tuple[Expr, ...]
    decisive: Expr | None
    quality: Grade
    reason: str = ""
    witness: tuple | None = None
    witness_params: dict | None = None

    @property
    def found(self) -> bool:
        return self.r is not None


def _nowhere_zero_by_sampling(
    e: Expr,
    seed: int,
    n: int,
    box: Box | None,
    param_names: Sequence[str],
    scenarios: int = 12,
    points_per_scenario: int = 24,
):
    """Sampled 'vanishes nowhere' check.

    Parameters are held fixed within a scenario and the state is swept; a sign
    change within one scenario certifies a zero crossing (witness bisected),
    while near-zero samples make the scenario inconclusive. Relative degree
    quantifies over states for fixed parameter values, so sign differences
    across scenarios carry no information.
    """
    rng = random.Random(seed)
    names = sorted(param_names)
    n_scen = scenarios if names else 1
    for _ in range(n_scen):
        pvals = sample_params(rng, names)
        samples = []
        attempts = 0
        while len(samples) < points_per_scenario and attempts < 8 * points_per_scenario:
            attempts += 1
            point = sample_point(rng, n, box)
            try:
                value = eval_expr(e, point, pvals)
            except ExprDomainError:
                continue
            samples.append((point, value))
        if not samples:
            raise InconclusiveError("no sample point evaluated in a parameter scenario")
        if any(abs(v) <= WITNESS_THRESHOLD for _, v in samples):
            raise InconclusiveError(
                f"near-zero samples (|value| <= {WITNESS_THRESHOLD:g}) make the "
                "nonvanishing check inconclusive"
            )
        signs = {v > 0 for _, v in samples}
        if len(signs) > 1:
            pos = next(s for s in samples if s[1] > 0)
            neg = next(s for s in samples if s[1] < 0)
            root = _bisect_root(e, pos[0], neg[0], pvals)
            return False, root, pvals
    return True, None, None


def _bisect_root(e: Expr, p_pos, p_neg, pvals, iters: int = 60):
    lo = list(p_pos)
    hi = list(p_neg)
    for _ in range(iters):
        mid = [(a + b) / 2.0 for a, b in zip(lo, hi)]
        try:
            v = eval_expr(e, mid, pvals)
        except ExprDomainError:
            break
        if v > 0:
            lo = mid
        else:
            hi = mid
    return tuple((a + b) / 2.0 for a, b in zip(lo, hi))


def relative_degree(sys: AffineSystem, seed: int = 0) -> RelDegree:
    """Smallest r with L_g L_f^k h == 0 for k < r-1 and L_g L_f^{r-1} h
    vanishing nowhere on the working domain. Verdict quality is Proven only
    when every zero test was exact and the decisive coefficient is a nonzero
    constant."""
    chain: list[Expr] = []
    grades: list[Grade] = []
    lfk = normalize(sys.h)
    box = sys.sampling_box()
    for k in range(sys.n):
        chain.append(lfk)
        coeff = lie_derivative(lfk, sys.g)
        status = is_zero(coeff, seed=seed, n=sys.n, box=box)
        if status.is_zero:
            grades.append(status.grade)
            lfk = lie_derivative(lfk, sys.f)
            continue
        # candidate relative degree k+1; the coefficient must vanish nowhere
        if status.kind == "proven_nonzero_constant":
            quality = weakest(grades + [Grade.PROVEN])
            return RelDegree(k + 1, tuple(chain), coeff, quality)
        ok, root, pvals = _nowhere_zero_by_sampling(
            coeff, seed, sys.n, box, params_in(coeff)
        )
        if not ok:
            return RelDegree(
                None,
                tuple(chain),
                coeff,
                Grade.FAILED,
                reason=f"input coefficient at order {k} vanishes near the witness point",
                witness=root,
                witness_params=pvals,
            )
        return RelDegree(k + 1, tuple(chain), coeff, Grade.SAMPLED)
    return RelDegree(
        None,
        tuple(chain),
        None,
        Grade.FAILED,
        reason=f"input never appears in the first {sys.n} output derivatives",
    )


@dataclass(frozen=True)
class TauFields:
    g_tilde: VectorField
    f_tilde: VectorField
    taus: tuple[VectorField, ...]


def tau_fields(sys: AffineSystem, r: int, seed: int = 0) -> TauFields:
    """Normalized input field, modified drift, and the iterated brackets
    tau_i = ad_{f~}^{i-1} g~ (i = 1..r)."""
    if r < 1 or r > sys.n:
        raise AssumptionViolationError(f"invalid relative degree {r}")
    lfr1 = iterated_lie(sys.h, sys.f, r - 1)
    a = lie_derivative(lfr1, sys.g)
    status = is_zero(a, seed=seed, n=sys.n, box=sys.sampling_box())
    if status.is_zero:
        raise AssumptionViolationError(
            f"L_g L_f^{r-1} h is identically zero ({status}); "
            "a uniform relative degree requires it to vanish nowhere"
        )
    inv_a = pow_expr(a, -1)
    g_tilde = VectorField.of([expand_simplify(mul(c, inv_a)) for c in sys.g.components], sys.n)
    lfr = lie_derivative(lfr1, sys.f)
    f_tilde = VectorField.of(
        [expand_simplify(fc - lfr * gc) for fc, gc in zip(sys.f.components, g_tilde.components)],
        sys.n,
    )
    taus = [g_tilde]
    for _ in range(r - 1):
        nxt = lie_bracket(f_tilde, taus[-1])
        taus.append(VectorField.of([expand_simplify(c) for c in nxt.components], sys.n))
    return TauFields(g_tilde, f_tilde, tuple(taus))


@dataclass(frozen=True)
class CommutativityResult:
    status: Grade
    witness_pair: tuple[int, int] | None = None
    witness_component: Expr | None = None
    witness_status: ZeroStatus | None = None


def check_commutativity(fields: Sequence[VectorField], seed: int = 0, box: Box | None = None) -> CommutativityResult:
    """Zero-test all pairwise brackets; Failed carries the first nonzero pair."""
    grades = [Grade.PROVEN]
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            bracket = lie_bracket(fields[i], fields[j])
            for comp in bracket.components:
                status = is_zero(comp, seed=seed, n=fields[i].n, box=box)
                if not status.is_zero:
                    return CommutativityResult(Grade.FAILED, (i + 1, j + 1), comp, status)
                grades.append(status.grade)
    return CommutativityResult(weakest(grades))


def completeness_status(field_: VectorField) -> Grade:
    """Proven for constant and linear-affine fields (global flows exist);
    Unknown otherwise, since general completeness is undecidable."""
    if field_.is_constant() or field_.is_linear_affine():
        return Grade.PROVEN
    return Grade.UNKNOWN


@dataclass(frozen=True)
class AssumptionReport:
    rel: RelDegree
    taus: TauFields | None
    completeness: tuple[Grade, ...]
    commutativity: CommutativityResult | None

    @property
    def all_hold(self) -> bool:
        if not self.rel.found:
            return False
        if self.commutativity is not None and self.commutativity.status is Grade.FAILED:
            return False
        return True

    @property
    def overall_grade(self) -> Grade:
        grades = [self.rel.quality]
        grades.extend(self.completeness)
        if self.commutativity is not None:
            grades.append(self.commutativity.status)
        return weakest(grades)


def check_assumptions(sys: AffineSystem, seed: int = 0) -> AssumptionReport:
    """Run the full hypothesis battery: relative degree, completeness of each
    tau field, pairwise commutation."""
    rel = relative_degree(sys, seed=seed)
    if not rel.found:
        return AssumptionReport(rel, None, (), None)
    taus = tau_fields(sys, rel.r, seed=seed)
    completeness = tuple(completeness_status(t) for t in taus.taus)
    comm = check_commutativity(taus.taus, seed=seed, box=sys.sampling_box())
    return AssumptionReport(rel, taus, completeness, comm)
