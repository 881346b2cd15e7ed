"""Exosystems: autonomous signal generators wdot = Q(w), u = theta(w).

Linear exosystems carry exact matrices when built from rational data;
a symbolic exosystem whose right-hand side turns out to be linear with
constant coefficients is converted to the linear representation, where the
spectral tests are decisive.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import DimensionError, InputError
from .grading import Grade
from .expr import (
    Const,
    Expr,
    contains_state,
    differentiate,
    eval_expr,
    max_var_index,
    normalize,
    subst_vars,
    to_string,
    var,
)
from .vfield import VectorField
from .linpoly import Poly, char_poly

EPS_IMAG = 1e-9


@dataclass(frozen=True)
class Exosystem:
    """Either a linear pair (Q, theta) or a symbolic field with output map.

    For symbolic exosystems the expressions use x1..xm for the exosystem
    coordinates (the shared grammar has no separate w symbols).
    """

    kind: str  # "linear" | "symbolic"
    m: int
    Q: tuple[tuple[Fraction | float, ...], ...] | None = None
    theta: tuple[Fraction | float, ...] | None = None
    field: VectorField | None = None
    theta_expr: Expr | None = None
    label: str = ""
    initial_box: tuple[tuple[float, float], ...] | None = None

    @property
    def is_linear(self) -> bool:
        return self.kind == "linear"

    def Q_float(self) -> np.ndarray:
        return np.array([[float(u) for u in row] for row in self.Q], dtype=float)

    def theta_float(self) -> np.ndarray:
        return np.array([float(u) for u in self.theta], dtype=float)

    def field_exprs(self) -> tuple[Expr, ...]:
        """Right-hand side as expressions over x1..xm (both kinds)."""
        if self.kind == "symbolic":
            return self.field.components
        comps = []
        for row in self.Q:
            total = Const(0)
            for j, qij in enumerate(row):
                total = total + Const(qij) * var(j + 1)
            comps.append(normalize(total))
        return tuple(comps)

    def output_expr(self) -> Expr:
        if self.kind == "symbolic":
            return self.theta_expr
        total = Const(0)
        for j, tj in enumerate(self.theta):
            total = total + Const(tj) * var(j + 1)
        return normalize(total)

    def output_at(self, w) -> float:
        if self.kind == "linear":
            return float(np.dot(self.theta_float(), np.asarray(w, dtype=float)))
        return eval_expr(self.theta_expr, list(w))


def _coerce_number(u):
    if isinstance(u, bool):
        raise InputError("boolean coefficient")
    if isinstance(u, int):
        return Fraction(u)
    if isinstance(u, (Fraction, float)):
        return u
    if isinstance(u, str):
        return Fraction(u)
    raise InputError(f"bad coefficient: {u!r}")


def linear_exosystem(Q, theta, label: str = "", initial_box=None) -> Exosystem:
    Qt = tuple(tuple(_coerce_number(u) for u in row) for row in Q)
    m = len(Qt)
    if any(len(r) != m for r in Qt):
        raise DimensionError("Q must be square")
    th = tuple(_coerce_number(u) for u in theta)
    if len(th) != m:
        raise DimensionError("theta must have length m")
    box = tuple((float(lo), float(hi)) for lo, hi in initial_box) if initial_box else None
    if box and len(box) != m:
        raise DimensionError("initial box must have one interval per coordinate")
    return Exosystem("linear", m, Q=Qt, theta=th, label=label, initial_box=box)


def symbolic_exosystem(components, theta_expr, label: str = "", initial_box=None) -> Exosystem:
    fieldv = VectorField.of(components)
    m = fieldv.n
    theta_n = normalize(theta_expr)
    if max_var_index(theta_n) > m:
        raise DimensionError("output map references a coordinate beyond the exosystem dimension")
    linear = _try_linearize(fieldv, theta_n)
    if linear is not None:
        Q, th = linear
        return linear_exosystem(Q, th, label=label, initial_box=initial_box)
    box = tuple((float(lo), float(hi)) for lo, hi in initial_box) if initial_box else None
    return Exosystem(
        "symbolic", m, field=fieldv, theta_expr=theta_n, label=label, initial_box=box
    )


def _try_linearize(fieldv: VectorField, theta_expr: Expr):
    """Detect wdot = Q w, u = theta w with constant rational/float entries."""
    m = fieldv.n
    rows = []
    origin = {j: Const(0) for j in range(1, m + 1)}
    for comp in list(fieldv.components) + [theta_expr]:
        at0 = normalize(subst_vars(comp, origin))
        if not (isinstance(at0, Const) and at0.value == 0):
            return None
        row = []
        for j in range(1, m + 1):
            d = differentiate(comp, j)
            if contains_state(d) or not isinstance(d, Const):
                return None
            row.append(d.value)
        rows.append(row)
    return rows[:-1], rows[-1]


def from_ode_coeffs(coeffs, label: str = "", initial_box=None) -> Exosystem:
    """Companion-form exosystem for u^(l) + b1 u^(l-1) + ... + bl u = 0.

    The first coordinate is the output; the characteristic polynomial equals
    s^l + b1 s^(l-1) + ... + bl exactly.
    """
    bs = [_coerce_number(u) for u in coeffs]
    ell = len(bs)
    if ell < 1:
        raise InputError("need at least one coefficient")
    Q = [[Fraction(0)] * ell for _ in range(ell)]
    for i in range(ell - 1):
        Q[i][i + 1] = Fraction(1)
    for j in range(ell):
        Q[ell - 1][j] = -bs[ell - 1 - j]
    theta = [Fraction(0)] * ell
    theta[0] = Fraction(1)
    return linear_exosystem(Q, theta, label=label, initial_box=initial_box)


def constants_exosystem(label: str = "constants", initial_box=None) -> Exosystem:
    return from_ode_coeffs([0], label=label, initial_box=initial_box)


def harmonic_exosystem(omega, label: str = "harmonic", initial_box=None) -> Exosystem:
    w = _coerce_number(omega)
    return from_ode_coeffs([0, w * w], label=label, initial_box=initial_box)


def exo_char_poly(exo: Exosystem) -> Poly:
    if not exo.is_linear:
        raise InputError("characteristic polynomial requires a linear exosystem")
    return char_poly(exo.Q)


def check_no_stable_modes(exo: Exosystem, eps: float = EPS_IMAG):
    """True iff every eigenvalue of Q has real part >= -eps."""
    if not exo.is_linear:
        raise InputError("no-stable-modes check requires a linear exosystem")
    eigs = sorted(np.linalg.eigvals(exo.Q_float()), key=lambda z: (z.real, z.imag))
    ok = all(z.real >= -eps for z in eigs)
    return ok, [complex(z) for z in eigs]


@dataclass(frozen=True)
class PoissonVerdict:
    status: Grade  # PROVEN / FAILED (proven not) / SAMPLED / UNKNOWN
    proven_not: bool
    eigenvalues: tuple[complex, ...] = ()
    return_distances: tuple[float, ...] = ()
    detail: str = ""

    @property
    def label(self) -> str:
        if self.proven_not:
            return "ProvenNot"
        if self.status is Grade.PROVEN:
            return "Proven"
        if self.status is Grade.SAMPLED:
            return "Sampled"
        return "Unknown"


def _semisimple(Q: np.ndarray, eigs: np.ndarray) -> bool:
    """Each eigenvalue's geometric multiplicity equals its algebraic one."""
    m = Q.shape[0]
    scale = max(1.0, float(np.linalg.norm(Q)))
    used = np.zeros(len(eigs), dtype=bool)
    for i, lam in enumerate(eigs):
        if used[i]:
            continue
        cluster = [j for j in range(len(eigs)) if abs(eigs[j] - lam) <= 1e-6 * scale]
        for j in cluster:
            used[j] = True
        mult = len(cluster)
        center = np.mean([eigs[j] for j in cluster])
        svals = np.linalg.svd(Q - center * np.eye(m), compute_uv=False)
        rank = int(np.sum(svals > 1e-8 * scale))
        if rank != m - mult:
            return False
    return True


def check_poisson_stable(
    exo: Exosystem,
    horizon: float = 50.0,
    delta: float = 1e-3,
    seed: int = 0,
    eps: float = EPS_IMAG,
) -> PoissonVerdict:
    """Poisson stability: every trajectory returns arbitrarily close to its
    start along unbounded time sequences.

    Linear: proven iff the spectrum is purely imaginary and semisimple
    (almost-periodic flow); proven not otherwise. Symbolic: sampled
    recurrence test on integrated trajectories, never Proven.
    """
    if exo.is_linear:
        Q = exo.Q_float()
        eigs = np.linalg.eigvals(Q)
        eig_list = tuple(sorted((complex(z) for z in eigs), key=lambda z: (z.real, z.imag)))
        if any(abs(z.real) > eps for z in eigs):
            return PoissonVerdict(
                Grade.FAILED, True, eig_list, detail="spectrum is not purely imaginary"
            )
        if not _semisimple(Q, eigs):
            return PoissonVerdict(
                Grade.FAILED,
                True,
                eig_list,
                detail="defective imaginary eigenvalue gives polynomial growth",
            )
        return PoissonVerdict(Grade.PROVEN, False, eig_list, detail="imaginary semisimple spectrum")

    from .sim.integrate import integrate_autonomous, IntegratorControls
    import random

    rng = random.Random(seed)
    box = exo.initial_box or tuple((-2.0, 2.0) for _ in range(exo.m))
    distances = []
    recurrent = True
    for _ in range(5):
        w0 = [rng.uniform(lo, hi) for lo, hi in box]
        try:
            trace = integrate_autonomous(
                exo.field_exprs(), w0, horizon, IntegratorControls(grid_points=1001)
            )
        except Exception as err:
            return PoissonVerdict(Grade.UNKNOWN, False, detail=f"integration failed: {err}")
        late = trace.states[trace.states.shape[0] // 2 :]
        d = float(np.min(np.linalg.norm(late - np.asarray(w0), axis=1)))
        distances.append(d)
        if d >= delta:
            recurrent = False
    status = Grade.SAMPLED if recurrent else Grade.UNKNOWN
    detail = "trajectories return within delta" if recurrent else "no return within delta by the horizon"
    return PoissonVerdict(status, False, return_distances=tuple(distances), detail=detail)


@dataclass(frozen=True)
class InputSignal:
    t: np.ndarray
    u: np.ndarray
    w: np.ndarray


def generate_input(exo: Exosystem, w0, horizon: float, step: float) -> InputSignal:
    """Sample u(t) = theta(w(t)) on a uniform grid.

    Linear exosystems propagate by the matrix exponential of one step;
    symbolic ones integrate numerically.
    """
    if step <= 0 or horizon <= 0:
        raise InputError("horizon and step must be positive")
    w0 = np.asarray(w0, dtype=float).reshape(-1)
    if w0.shape[0] != exo.m:
        raise DimensionError(f"w0 must have length {exo.m}")
    n_steps = int(round(horizon / step))
    t = np.arange(n_steps + 1) * step
    if exo.is_linear:
        E = scipy.linalg.expm(exo.Q_float() * step)
        W = np.empty((n_steps + 1, exo.m))
        W[0] = w0
        for k in range(n_steps):
            W[k + 1] = E @ W[k]
        u = W @ exo.theta_float()
        return InputSignal(t, u, W)
    from .sim.integrate import integrate_autonomous, IntegratorControls

    trace = integrate_autonomous(
        exo.field_exprs(), list(w0), float(t[-1]), IntegratorControls(grid=t)
    )
    u = np.array([eval_expr(exo.theta_expr, list(row)) for row in trace.states])
    return InputSignal(trace.t, u, trace.states)


def _exact(v):
    """JSON numbers are rational; load them exactly (floats are binary
    rationals, so the conversion is lossless)."""
    if isinstance(v, bool) or v is None:
        raise InputError(f"bad numeric value {v!r}")
    if isinstance(v, (int, float)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise InputError(f"bad numeric value {v!r}")


def load_exosystem(data: dict) -> Exosystem:
    """Build an exosystem from its file schema (see docs/README)."""
    if not isinstance(data, dict):
        raise InputError("exosystem file must contain a JSON object")
    kind = data.get("kind")
    label = data.get("label", "")
    box = data.get("initial_box")
    if kind == "constant":
        return constants_exosystem(label=label or "constants", initial_box=box)
    if kind == "harmonic":
        if "omega" not in data:
            raise InputError("harmonic exosystem needs 'omega'")
        return harmonic_exosystem(_exact(data["omega"]), label=label or "harmonic", initial_box=box)
    if kind == "ode_coeffs":
        if not data.get("coeffs"):
            raise InputError("ode_coeffs exosystem needs a nonempty 'coeffs' list")
        return from_ode_coeffs([_exact(v) for v in data["coeffs"]], label=label, initial_box=box)
    if kind == "linear":
        if "Q" not in data or "theta" not in data:
            raise InputError("linear exosystem needs 'Q' and 'theta'")
        Q = [[_exact(v) for v in row] for row in data["Q"]]
        theta = [_exact(v) for v in data["theta"]]
        return linear_exosystem(Q, theta, label=label, initial_box=box)
    if kind == "symbolic":
        from .expr import parse

        if "q" not in data or "theta" not in data:
            raise InputError("symbolic exosystem needs 'q' (expressions) and 'theta'")
        comps = data["q"]
        m = len(comps)
        params = sorted((data.get("params") or {}))
        if params:
            raise InputError("parametric exosystems are not supported; bind values first")
        exprs = [parse(text, m) for text in comps]
        theta = parse(data["theta"], m)
        return symbolic_exosystem(exprs, theta, label=label, initial_box=box)
    raise InputError(f"unknown exosystem kind {kind!r}")


def exosystem_to_dict(exo: Exosystem) -> dict:
    out = {"schema": "imk.exosystem/1", "kind": exo.kind, "label": exo.label}
    if exo.is_linear:
        out["Q"] = [[_num_json(u) for u in row] for row in exo.Q]
        out["theta"] = [_num_json(u) for u in exo.theta]
    else:
        out["q"] = [to_string(c) for c in exo.field.components]
        out["theta"] = to_string(exo.theta_expr)
    if exo.initial_box:
        out["initial_box"] = [[lo, hi] for lo, hi in exo.initial_box]
    return out


def _num_json(u):
    if isinstance(u, Fraction):
        return int(u) if u.denominator == 1 else str(u)
    return float(u)
