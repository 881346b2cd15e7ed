"""Normal-form coordinates and the output-driven internal-model form.

Construction is supported when the normalized direction fields are constant
vectors with rational mutual ratios: the complement map is then linear
(z2 = W x with W annihilating the directions) and the full coordinate change
is affine, invertible by exact elimination. Anything outside this fragment is
handled in verification-only mode against user-supplied coordinates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import AssumptionViolationError, DimensionError, ExprDomainError, InputError, NonConstantTauError
from .grading import Grade, weakest
from .expr import (
    Const,
    Expr,
    add,
    const,
    contains_state,
    differentiate,
    div,
    eval_expr,
    expand_simplify,
    is_zero,
    mul,
    normalize,
    sample_params,
    sample_point,
    subst_vars,
    to_string,
    var,
)
from .vfield import (
    AffineSystem,
    TauFields,
    VectorField,
    iterated_lie,
    lie_derivative,
    relative_degree,
    tau_fields,
)


def zeta_coordinates(sys: AffineSystem, r: int) -> list[Expr]:
    """Output chain [h, L_f h, ..., L_f^{r-1} h]."""
    if r < 1 or r > sys.n:
        raise InputError(f"invalid relative degree {r}")
    out = [normalize(sys.h)]
    for _ in range(r - 1):
        out.append(lie_derivative(out[-1], sys.f))
    return out


def affine_from_linear(A, b, c) -> AffineSystem:
    """Wrap a linear triple as an input-affine symbolic system."""
    A = [list(row) for row in A]
    n = len(A)
    f_comps = []
    for i in range(n):
        total = const(0)
        for j in range(n):
            total = total + const(_as_const(A[i][j])) * var(j + 1)
        f_comps.append(normalize(total))
    g_comps = [normalize(const(_as_const(v))) for v in b]
    h = const(0)
    for j in range(n):
        h = h + const(_as_const(list(c)[j])) * var(j + 1)
    return AffineSystem.build(f_comps, g_comps, normalize(h), n)


def _as_const(v):
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    return float(v)


def _constant_direction(tau: VectorField, seed: int, box) -> tuple[list | None, Grade, str]:
    """Extract a state-free direction with rational mutual ratios.

    Returns (direction, grade, reason); direction None when the field is not
    constant or its component ratios are not constant numbers.
    """
    comps = [expand_simplify(c) for c in tau.components]
    if any(contains_state(c) for c in comps):
        return None, Grade.UNKNOWN, "field depends on the state"
    statuses = [is_zero(c, seed=seed, n=tau.n, box=box) for c in comps]
    grade = weakest(s.grade for s in statuses)
    pivot = next((i for i, s in enumerate(statuses) if not s.is_zero), None)
    if pivot is None:
        return None, grade, "field is identically zero"
    direction: list = []
    for i, comp in enumerate(comps):
        if statuses[i].is_zero:
            direction.append(Fraction(0))
            continue
        ratio = expand_simplify(div(comp, comps[pivot]))
        if not isinstance(ratio, Const):
            return None, grade, (
                f"component ratio {to_string(ratio)} is parameter-dependent; "
                "the annihilator would not be a constant matrix"
            )
        direction.append(ratio.value)
    return direction, grade, ""


def _rational_nullspace(rows: list[list[Fraction]], n: int) -> list[list[Fraction]]:
    """Basis of { w : row . w = 0 } by exact reduced row echelon form,
    normalized to coprime integers with positive leading entry."""
    mat = [list(map(Fraction, row)) for row in rows]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        sel = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if sel is None:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                factor = mat[i][col]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for j in free:
        v = [Fraction(0)] * n
        v[j] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][j]
        basis.append(_integerize(v))
    return basis


def _integerize(v: list[Fraction]) -> list[Fraction]:
    from math import gcd, lcm

    den = lcm(*(f.denominator for f in v)) if v else 1
    ints = [int(f * den) for f in v]
    g = 0
    for u in ints:
        g = gcd(g, abs(u))
    if g > 1:
        ints = [u // g for u in ints]
    lead = next((u for u in ints if u != 0), 1)
    if lead < 0:
        ints = [-u for u in ints]
    return [Fraction(u) for u in ints]


def _float_nullspace(rows: list[list[float]], n: int) -> list[list]:
    mat = np.array([[float(v) for v in row] for row in rows], dtype=float)
    _u, s, vt = np.linalg.svd(mat)
    tol = 1e-10 * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    basis = []
    for row in vt[rank:]:
        snapped = _snap_rational(row)
        basis.append(snapped if snapped is not None else [float(v) for v in row])
    return basis


def _snap_rational(row: np.ndarray) -> list[Fraction] | None:
    lead = next((v for v in row if abs(v) > 1e-9), None)
    if lead is None:
        return None
    scaled = row / lead
    fracs = []
    for v in scaled:
        f = Fraction(float(v)).limit_denominator(1_000_000)
        if abs(float(f) - float(v)) > 1e-9:
            return None
        fracs.append(f)
    return _integerize(fracs)


@dataclass(frozen=True)
class CheckOutcome:
    grade: Grade
    detail: str = ""


@dataclass(frozen=True)
class NormalForm:
    """Coordinates z = (zeta(x), W x) with the partitioned dynamics blocks.

    z-space expressions index z1..zr as x1..xr and the complement as
    x{r+1}..xn. `f1` is the drift of the chain block (its last entry is b),
    `g1` its input column (last entry a), `f2` the complement drift.
    """

    r: int
    n: int
    zeta: tuple[Expr, ...]
    W: tuple[tuple, ...]
    z2: tuple[Expr, ...]
    x_of_z: tuple[Expr, ...]
    a_z: Expr
    b_z: Expr
    f1: tuple[Expr, ...]
    g1: tuple[Expr, ...]
    f2: tuple[Expr, ...]
    kappa: Expr
    mode: str  # "constructed" | "verified"
    output_driven: bool
    checks: tuple[tuple[str, CheckOutcome], ...]
    grade: Grade

    @property
    def m_complement(self) -> int:
        return self.n - self.r

    def f2_internal(self) -> list[Expr]:
        """f2 with the chain coordinates zeroed, remapped to x1..x{n-r}."""
        zero_chain = {j: const(0) for j in range(1, self.r + 1)}
        remap = {self.r + j: var(j) for j in range(1, self.m_complement + 1)}
        out = []
        for comp in self.f2:
            e = normalize(subst_vars(comp, zero_chain))
            out.append(normalize(subst_vars(e, remap)))
        return out


@dataclass(frozen=True)
class IMOutput:
    """Internal-model output map phi(z2) = -b(0, z2) / a(0, z2), remapped to
    x1..x{n-r}."""

    phi: Expr
    a0: Expr
    b0: Expr
    grade: Grade


def _symbolic_solve(J: list[list[Expr]], rhs: list[Expr], seed: int) -> tuple[list[Expr], Grade]:
    """Solve J x = rhs by elimination over expressions; J entries state-free."""
    n = len(J)
    mat = [[expand_simplify(J[i][j]) for j in range(n)] + [expand_simplify(rhs[i])] for i in range(n)]
    grade = Grade.PROVEN
    for col in range(n):
        pivot = None
        for i in range(col, n):
            status = is_zero(mat[i][col], seed=seed)
            if not status.is_zero:
                pivot = i
                if status.kind != "proven_nonzero_constant":
                    grade = weakest([grade, Grade.SAMPLED])
                break
        if pivot is None:
            raise AssumptionViolationError(
                "coordinate-change Jacobian is singular; the candidate map is not invertible"
            )
        mat[col], mat[pivot] = mat[pivot], mat[col]
        inv = expand_simplify(div(const(1), mat[col][col]))
        mat[col] = [expand_simplify(mul(v, inv)) for v in mat[col]]
        for i in range(n):
            if i != col:
                factor = mat[i][col]
                if isinstance(factor, Const) and factor.value == 0:
                    continue
                mat[i] = [
                    expand_simplify(a - mul(factor, b)) for a, b in zip(mat[i], mat[col])
                ]
    return [row[n] for row in mat], grade


def build_normal_form(
    sys: AffineSystem, r: int | None = None, taus: TauFields | None = None, seed: int = 0
) -> NormalForm:
    """Construct the normal form for the constant-direction fragment.

    Raises NonConstantTauError when a direction field is state-dependent or
    has parameter-dependent ratios (use verify_coordinate_change with your
    own candidate coordinates in that case), and AssumptionViolationError
    when the combined coordinate map fails to be affine or invertible.
    """
    if r is None:
        rel = relative_degree(sys, seed=seed)
        if not rel.found:
            raise AssumptionViolationError(f"no uniform relative degree: {rel.reason}")
        r = rel.r
    if taus is None:
        taus = tau_fields(sys, r, seed=seed)
    box = sys.sampling_box()

    directions = []
    dir_grade = Grade.PROVEN
    for i, tau in enumerate(taus.taus, start=1):
        direction, grade, reason = _constant_direction(tau, seed, box)
        if direction is None:
            raise NonConstantTauError(
                f"direction field {i} is outside the constructible fragment: {reason}"
            )
        directions.append(direction)
        dir_grade = weakest([dir_grade, grade])

    n = sys.n
    exact = all(isinstance(v, Fraction) for d in directions for v in d)
    if exact:
        w_rows = _rational_nullspace(directions, n)
    else:
        w_rows = _float_nullspace(directions, n)
    if len(w_rows) != n - r:
        raise AssumptionViolationError(
            f"direction fields span rank {n - len(w_rows)}, expected {r}; "
            "cannot build an (n-r)-dimensional complement"
        )
    W = tuple(tuple(row) for row in w_rows)

    zeta = zeta_coordinates(sys, r)
    z2 = []
    for row in W:
        total = const(0)
        for j, wj in enumerate(row):
            if wj != 0:
                total = total + const(wj) * var(j + 1)
        z2.append(normalize(total))
    coords = list(zeta) + z2

    # the combined map must be affine: state-free Jacobian
    J = [[differentiate(comp, j + 1) for j in range(n)] for comp in coords]
    for row in J:
        for entry in row:
            if contains_state(entry):
                raise AssumptionViolationError(
                    f"coordinate map is not affine (Jacobian entry {to_string(entry)} "
                    "depends on the state); construction supports the affine fragment only"
                )
    origin = {j: const(0) for j in range(1, n + 1)}
    offsets = [normalize(subst_vars(comp, origin)) for comp in coords]
    rhs = [normalize(var(i + 1) - offsets[i]) for i in range(n)]
    x_of_z, solve_grade = _symbolic_solve(J, rhs, seed)

    mapping = {i + 1: x_of_z[i] for i in range(n)}
    a_x = lie_derivative(iterated_lie(sys.h, sys.f, r - 1), sys.g)
    b_x = iterated_lie(sys.h, sys.f, r)
    a_z = expand_simplify(subst_vars(a_x, mapping))
    b_z = expand_simplify(subst_vars(b_x, mapping))
    f2_x = [lie_derivative(comp, sys.f) for comp in z2]
    f2_z = [expand_simplify(subst_vars(comp, mapping)) for comp in f2_x]

    checks: list[tuple[str, CheckOutcome]] = []
    grades = [dir_grade, solve_grade]

    for k in range(r - 1):
        status = is_zero(lie_derivative(zeta[k], sys.g), seed=seed, n=n, box=box)
        checks.append((f"chain_input_free_{k + 1}", CheckOutcome(status.grade, str(status))))
        grades.append(status.grade if status.is_zero else Grade.FAILED)

    g2_ok = True
    for i, comp in enumerate(z2):
        status = is_zero(lie_derivative(comp, sys.g), seed=seed, n=n, box=box)
        checks.append((f"complement_input_free_{i + 1}", CheckOutcome(status.grade, str(status))))
        if not status.is_zero:
            g2_ok = False
            grades.append(Grade.FAILED)
        else:
            grades.append(status.grade)
    if not g2_ok:
        raise AssumptionViolationError(
            "complement coordinates are not input-decoupled (W g != 0); "
            "the partitioned form does not exist for this W"
        )

    output_driven = True
    for i, comp in enumerate(f2_z):
        for j in range(2, r + 1):
            status = is_zero(differentiate(comp, j), seed=seed, n=n)
            checks.append(
                (f"f2_{i + 1}_independent_of_chain_{j}", CheckOutcome(status.grade, str(status)))
            )
            if not status.is_zero:
                output_driven = False
                grades.append(Grade.SAMPLED)
            else:
                grades.append(status.grade)

    f1 = tuple(var(k + 1) for k in range(1, r)) + (b_z,)
    g1 = tuple(const(0) for _ in range(r - 1)) + (a_z,)
    return NormalForm(
        r=r,
        n=n,
        zeta=tuple(zeta),
        W=W,
        z2=tuple(z2),
        x_of_z=tuple(x_of_z),
        a_z=a_z,
        b_z=b_z,
        f1=f1,
        g1=g1,
        f2=tuple(f2_z),
        kappa=var(1),
        mode="constructed",
        output_driven=output_driven,
        checks=tuple(checks),
        grade=weakest(grades),
    )


@dataclass(frozen=True)
class CoordChangeReport:
    checks: tuple[tuple[str, CheckOutcome], ...]
    grade: Grade
    passed: bool


def verify_coordinate_change(
    sys: AffineSystem, zeta: Sequence[Expr], z2: Sequence[Expr], seed: int = 0
) -> CoordChangeReport:
    """Grade a user-supplied candidate coordinate change.

    Checks: the output chain structure (each zeta advances by L_f and is
    input-free below the top), input decoupling of the complement, local
    invertibility of the combined Jacobian at sampled points, and
    independence of the complement drift from the chain coordinates above
    the output.
    """
    n = sys.n
    zeta = [normalize(e) for e in zeta]
    z2 = [normalize(e) for e in z2]
    r = len(zeta)
    if r + len(z2) != n:
        raise DimensionError("candidate coordinates must total the state dimension")
    box = sys.sampling_box()
    checks: list[tuple[str, CheckOutcome]] = []
    grades: list[Grade] = []
    failed = False

    status = is_zero(normalize(zeta[0] - sys.h), seed=seed, n=n, box=box)
    ok = status.is_zero
    checks.append(("zeta1_is_output", CheckOutcome(status.grade if ok else Grade.FAILED, str(status))))
    grades.append(status.grade if ok else Grade.FAILED)
    failed |= not ok

    for k in range(r - 1):
        chain = is_zero(normalize(lie_derivative(zeta[k], sys.f) - zeta[k + 1]), seed=seed, n=n, box=box)
        gfree = is_zero(lie_derivative(zeta[k], sys.g), seed=seed, n=n, box=box)
        ok = chain.is_zero and gfree.is_zero
        detail = f"drift: {chain}; input: {gfree}"
        checks.append((f"chain_{k + 1}", CheckOutcome(weakest([chain.grade, gfree.grade]) if ok else Grade.FAILED, detail)))
        grades.append(weakest([chain.grade, gfree.grade]) if ok else Grade.FAILED)
        failed |= not ok

    for i, comp in enumerate(z2):
        status = is_zero(lie_derivative(comp, sys.g), seed=seed, n=n, box=box)
        ok = status.is_zero
        checks.append((f"complement_input_free_{i + 1}", CheckOutcome(status.grade if ok else Grade.FAILED, str(status))))
        grades.append(status.grade if ok else Grade.FAILED)
        failed |= not ok

    jac_grade, jac_detail = _sampled_jacobian_check(sys, list(zeta) + list(z2), seed, box)
    checks.append(("jacobian_invertible", CheckOutcome(jac_grade, jac_detail)))
    grades.append(jac_grade)
    failed |= jac_grade is Grade.FAILED

    od_grade, od_detail = _output_driven_check(sys, zeta, z2, seed, box)
    checks.append(("output_driven", CheckOutcome(od_grade, od_detail)))
    grades.append(od_grade)
    failed |= od_grade is Grade.FAILED

    return CoordChangeReport(tuple(checks), weakest(grades), not failed)


def _sampled_jacobian_check(sys: AffineSystem, coords, seed, box, n_points: int = 20):
    n = sys.n
    J = [[differentiate(comp, j + 1) for j in range(n)] for comp in coords]
    rng = random.Random(seed + 1)
    names = sorted(sys.params)
    min_abs = float("inf")
    tested = 0
    attempts = 0
    while tested < n_points and attempts < 8 * n_points:
        attempts += 1
        point = sample_point(rng, n, box)
        pvals = sample_params(rng, names)
        try:
            Jnum = np.array([[eval_expr(e, point, pvals) for e in row] for row in J])
        except ExprDomainError:
            continue
        det = abs(float(np.linalg.det(Jnum)))
        min_abs = min(min_abs, det)
        tested += 1
        if det <= 1e-8:
            return Grade.FAILED, f"|det J| = {det:.3g} at {point}"
    if tested == 0:
        return Grade.UNKNOWN, "no sample point evaluated"
    return Grade.SAMPLED, f"min |det J| = {min_abs:.3g} over {tested} points"


def _output_driven_check(sys: AffineSystem, zeta, z2, seed, box, n_points: int = 20):
    """Partials of the complement drift with respect to chain coordinates
    above the output, via the chain rule through the Jacobian at samples."""
    r = len(zeta)
    if r <= 1 or not z2:
        return Grade.PROVEN, "vacuous (no chain coordinates above the output)"
    n = sys.n
    coords = list(zeta) + list(z2)
    J = [[differentiate(comp, j + 1) for j in range(n)] for comp in coords]
    w_rhs = [lie_derivative(comp, sys.f) for comp in z2]
    grads = [[differentiate(comp, j + 1) for j in range(n)] for comp in w_rhs]
    rng = random.Random(seed + 2)
    names = sorted(sys.params)
    worst = 0.0
    tested = 0
    attempts = 0
    while tested < n_points and attempts < 8 * n_points:
        attempts += 1
        point = sample_point(rng, n, box)
        pvals = sample_params(rng, names)
        try:
            Jnum = np.array([[eval_expr(e, point, pvals) for e in row] for row in J])
            Gnum = np.array([[eval_expr(e, point, pvals) for e in row] for row in grads])
        except ExprDomainError:
            continue
        try:
            dz = np.linalg.solve(Jnum.T, Gnum.T).T  # rows: dw_i/dz
        except np.linalg.LinAlgError:
            continue
        worst = max(worst, float(np.max(np.abs(dz[:, 1:r]))))
        tested += 1
    if tested == 0:
        return Grade.UNKNOWN, "no sample point evaluated"
    if worst > 1e-7:
        return Grade.FAILED, f"complement drift depends on a chain coordinate (max |d| = {worst:.3g})"
    return Grade.SAMPLED, f"max |d f2/d chain| = {worst:.3g} over {tested} points"


def internal_model_output(nf: NormalForm, seed: int = 0) -> IMOutput:
    """Output map of the internal-model block: phi = -b(0, z2)/a(0, z2).

    The denominator is zero-checked on the complement coordinates; a proven
    zero is an error (the chain's input coefficient must vanish nowhere).
    """
    zero_chain = {j: const(0) for j in range(1, nf.r + 1)}
    remap = {nf.r + j: var(j) for j in range(1, nf.m_complement + 1)}

    def to_complement(e: Expr) -> Expr:
        return normalize(subst_vars(normalize(subst_vars(e, zero_chain)), remap))

    a0 = expand_simplify(to_complement(nf.a_z))
    b0 = expand_simplify(to_complement(nf.b_z))
    status = is_zero(a0, seed=seed, n=max(1, nf.m_complement))
    if status.is_zero:
        raise AssumptionViolationError(
            f"a(0, z2) is zero ({status}); the normal form requires a(z) != 0 everywhere"
        )
    phi = expand_simplify(div(mul(const(-1), b0), a0))
    grade = status.grade
    return IMOutput(phi=phi, a0=a0, b0=b0, grade=grade)
