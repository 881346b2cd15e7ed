"""Adaptation trials, omega-limit sampling, and reproduction checks.

These operations turn the asymptotic statements (output converges to zero,
limit points lie over the output-zeroing set, the internal-model subsystem
regenerates the input) into falsifiable windowed criteria. Verdicts from
this module are always Sampled: numerics cannot certify limits.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DivergenceError, NumericalError
from ..exo import Exosystem
from ..expr import Expr, normalize
from ..vfield import AffineSystem
from .integrate import IntegratorControls, Trace, integrate_cascade
from .tape import compile_exprs

DEFAULT_TOL_Y = 1e-6
DEFAULT_BOUND = 1e6
FINAL_WINDOW = 0.2
MAX_EXTENSIONS = 3


def _max_final_output(trace: Trace, window: float = FINAL_WINDOW) -> float:
    n = trace.y.shape[0]
    start = int((1.0 - window) * (n - 1))
    return float(np.max(np.abs(trace.y[start:])))


def _window_pair(trace: Trace, window: float = FINAL_WINDOW) -> tuple[float, float]:
    n = trace.y.shape[0]
    w = max(1, int(window * (n - 1)))
    last = float(np.max(np.abs(trace.y[n - w :])))
    prev = float(np.max(np.abs(trace.y[max(0, n - 2 * w) : n - w])))
    return prev, last


@dataclass(frozen=True)
class AdaptationTrial:
    x0: tuple[float, ...]
    w0: tuple[float, ...]
    passed: bool
    max_final_y: float
    max_state_norm: float
    horizon_used: float
    extensions: int
    failure: str = ""


@dataclass(frozen=True)
class AdaptationReport:
    trials: tuple[AdaptationTrial, ...]
    tol_y: float
    bound: float
    horizon: float

    @property
    def passed(self) -> bool:
        return bool(self.trials) and all(t.passed for t in self.trials)


def _worker_count(n_trials: int) -> int:
    cap = os.environ.get("IMK_THREADS")
    if cap:
        try:
            return max(1, min(n_trials, int(cap)))
        except ValueError:
            pass
    return max(1, min(n_trials, os.cpu_count() or 1))


def check_adaptation(
    sys: AffineSystem,
    exo: Exosystem,
    x0_set: Sequence[Sequence[float]],
    w0_set: Sequence[Sequence[float]],
    horizon: float = 50.0,
    tol_y: float = DEFAULT_TOL_Y,
    bound: float = DEFAULT_BOUND,
    controls: IntegratorControls = IntegratorControls(),
    params: dict | None = None,
    pairs: Sequence[tuple] | None = None,
) -> AdaptationReport:
    """Simulate every (x0, w0) pair and test the windowed convergence
    criterion max |y| over the final fifth of the horizon < tol_y.

    Trials are the cartesian product of x0_set and w0_set unless an explicit
    list of pairs is given. When the output is still shrinking by more than
    a factor of two per window, the horizon doubles (up to three times)
    before judging. A diverging trial fails with its reason instead of
    raising. Trials run concurrently (IMK_THREADS caps the pool) and are
    reported in input order.
    """
    if pairs is not None:
        pairs = [(tuple(map(float, x0)), tuple(map(float, w0))) for x0, w0 in pairs]
    else:
        if not x0_set or not w0_set:
            raise NumericalError("adaptation check needs nonempty trial sets")
        pairs = [(tuple(map(float, x0)), tuple(map(float, w0))) for x0 in x0_set for w0 in w0_set]
    if not pairs:
        raise NumericalError("adaptation check needs nonempty trial sets")

    def run(pair) -> AdaptationTrial:
        x0, w0 = pair
        t_end = horizon
        extensions = 0
        while True:
            try:
                trace = integrate_cascade(sys, exo, x0, w0, t_end, controls, params)
            except DivergenceError as err:
                return AdaptationTrial(
                    x0, w0, False, float("inf"), float("inf"), t_end, extensions,
                    failure=f"divergence: {err}",
                )
            norm = trace.max_state_norm
            if norm > bound:
                return AdaptationTrial(
                    x0, w0, False, _max_final_output(trace), norm, t_end, extensions,
                    failure=f"state norm {norm:.3g} exceeded bound {bound:.3g}",
                )
            prev, last = _window_pair(trace)
            if last < tol_y:
                return AdaptationTrial(x0, w0, True, last, norm, t_end, extensions)
            if extensions < MAX_EXTENSIONS and last < 0.5 * prev:
                extensions += 1
                t_end *= 2.0
                continue
            return AdaptationTrial(
                x0, w0, False, last, norm, t_end, extensions,
                failure=f"max final |y| = {last:.3g} >= tol {tol_y:.3g}",
            )

    with ThreadPoolExecutor(max_workers=_worker_count(len(pairs))) as pool:
        trials = tuple(pool.map(run, pairs))
    return AdaptationReport(trials, tol_y, bound, horizon)


@dataclass(frozen=True)
class OmegaSample:
    """Recurrent late-trajectory cluster representatives of a cascade."""

    candidates: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...]  # (w, x)
    visit_counts: tuple[int, ...]
    near_w0: tuple[int, ...]  # indices of candidates whose w is near w(0)
    transient_fraction: float
    radius_factor: float
    diagnostic: str = ""

    @property
    def found(self) -> bool:
        return bool(self.candidates)


def _cluster(states: np.ndarray, radius_factor: float):
    reps: list[np.ndarray] = []
    counts: list[int] = []
    for row in states:
        placed = False
        for j, rep in enumerate(reps):
            radius = radius_factor * (1.0 + float(np.linalg.norm(rep)))
            if float(np.linalg.norm(row - rep)) <= radius:
                counts[j] += 1
                placed = True
                break
        if not placed:
            reps.append(row.copy())
            counts.append(1)
    return reps, counts


def omega_limit_sample(
    sys: AffineSystem,
    exo: Exosystem,
    x0,
    w0,
    horizon: float = 200.0,
    transient_fraction: float = 0.5,
    radius_factor: float = 1e-4,
    min_visits: int = 3,
    max_radius_doublings: int = 12,
    controls: IntegratorControls = IntegratorControls(),
    params: dict | None = None,
) -> OmegaSample:
    """Cluster the post-transient cascade samples by an adaptive radius.

    A cluster becomes a limit-point candidate after min_visits distinct
    hits. Point attractors recur at the base radius; closed orbits only show
    recurrence at the grid's sampling density, so the radius doubles (up to
    max_radius_doublings) until some cluster is revisited. The effective
    radius factor is reported in the result. Candidates whose exosystem
    component returns near w(0) mirror the recurrence selection used to seed
    trajectories inside the limit set.
    """
    trace = integrate_cascade(sys, exo, x0, w0, horizon, controls, params)
    n_pts = trace.t.shape[0]
    start = int(transient_fraction * (n_pts - 1))
    states = trace.states[start:]
    factor = radius_factor
    reps, counts = _cluster(states, factor)
    doublings = 0
    while max(counts) < min_visits and doublings < max_radius_doublings:
        factor *= 2.0
        doublings += 1
        reps, counts = _cluster(states, factor)
    m = exo.m
    keep = [j for j in range(len(reps)) if counts[j] >= min_visits]
    candidates = tuple(
        (tuple(float(v) for v in reps[j][:m]), tuple(float(v) for v in reps[j][m:])) for j in keep
    )
    kept_counts = tuple(counts[j] for j in keep)
    w0_arr = np.asarray(w0, dtype=float)
    near = tuple(
        i
        for i, j in enumerate(keep)
        if np.linalg.norm(reps[j][:m] - w0_arr)
        <= factor * (1.0 + float(np.linalg.norm(w0_arr)))
    )
    diagnostic = "" if keep else (
        f"no cluster reached {min_visits} visits within the horizon even after "
        f"{doublings} radius doublings; trajectory shows no recurrence"
    )
    return OmegaSample(candidates, kept_counts, near, transient_fraction, factor, diagnostic)


@dataclass(frozen=True)
class ZeroingCheck:
    w: tuple[float, ...]
    x: tuple[float, ...]
    h_value: float
    max_h_along: float
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ZeroingVerdict:
    checks: tuple[ZeroingCheck, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)


def verify_output_zeroing(
    sys: AffineSystem,
    exo: Exosystem,
    points: OmegaSample,
    tol: float = 1e-6,
    horizon: float = 20.0,
    controls: IntegratorControls = IntegratorControls(),
    params: dict | None = None,
) -> ZeroingVerdict:
    """Check |h| < tol at each candidate and that re-integrating the cascade
    from the candidate keeps |h| < 10 tol (limit sets are invariant, so a
    true limit point must stay over the output-zeroing set)."""
    if not points.found:
        return ZeroingVerdict((), tol)
    h_prog = compile_exprs([sys.h], sys.n, params)
    checks = []
    for w, x in points.candidates:
        h_val = float(h_prog.eval_batch(np.asarray(x))[0, 0])
        if abs(h_val) >= tol:
            checks.append(
                ZeroingCheck(w, x, h_val, float("nan"), False, f"|h(x)| = {abs(h_val):.3g} >= {tol:g}")
            )
            continue
        try:
            trace = integrate_cascade(sys, exo, x, w, horizon, controls, params)
        except DivergenceError as err:
            checks.append(ZeroingCheck(w, x, h_val, float("inf"), False, f"divergence: {err}"))
            continue
        max_h = float(np.max(np.abs(trace.y)))
        ok = max_h < 10.0 * tol
        checks.append(
            ZeroingCheck(
                w, x, h_val, max_h, ok, "" if ok else f"|h| reached {max_h:.3g} along the flow"
            )
        )
    return ZeroingVerdict(tuple(checks), tol)


@dataclass(frozen=True)
class ReproductionVerdict:
    passed: bool
    max_deviation: float
    tol: float
    detail: str = ""


def verify_im_reproduction(
    im_rhs: Sequence[Expr],
    phi: Expr,
    exo: Exosystem,
    w0,
    z2_0,
    horizon: float = 50.0,
    tol: float = 1e-6,
    controls: IntegratorControls = IntegratorControls(),
    params: dict | None = None,
) -> ReproductionVerdict:
    """Integrate the output-stripped internal model z2dot = f2(0, z2) beside
    the exosystem and compare phi(z2(t)) against u(t) on a shared grid.

    im_rhs and phi are expressions over x1..x{dim z2} (already remapped).
    """
    from .integrate import integrate_autonomous

    z2_0 = np.asarray(z2_0, dtype=float).reshape(-1)
    grid = np.linspace(0.0, horizon, controls.grid_points)
    shared = IntegratorControls(
        rtol=controls.rtol, atol=controls.atol, max_steps=controls.max_steps, grid=grid
    )
    try:
        if z2_0.size:
            im_rhs_n = [normalize(c) for c in im_rhs]
            im_trace = integrate_autonomous(im_rhs_n, z2_0, horizon, shared, params)
            phi_prog = compile_exprs([normalize(phi)], z2_0.size, params)
            phi_vals = phi_prog.eval_batch(im_trace.states)[:, 0]
        else:
            phi_prog = compile_exprs([normalize(phi)], 0, params)
            phi_vals = np.full(grid.shape[0], float(phi_prog.eval_batch(np.zeros((1, 0)))[0, 0]))
        exo_trace_states = _exo_states(exo, w0, grid, shared)
        u_prog = compile_exprs([exo.output_expr()], exo.m, params)
        u_vals = u_prog.eval_batch(exo_trace_states)[:, 0]
    except DivergenceError as err:
        return ReproductionVerdict(False, float("inf"), tol, f"divergence: {err}")
    dev = float(np.max(np.abs(phi_vals - u_vals)))
    return ReproductionVerdict(dev < tol, dev, tol, "" if dev < tol else "phi(z2(t)) != u(t)")


def _exo_states(exo: Exosystem, w0, grid: np.ndarray, controls: IntegratorControls) -> np.ndarray:
    from .integrate import integrate_autonomous

    trace = integrate_autonomous(list(exo.field_exprs()), w0, float(grid[-1]), controls)
    return trace.states
