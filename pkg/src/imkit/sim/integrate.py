"""Trajectory integration for systems, exosystems, and cascades.

Cascade state order is (w, x): the exosystem runs autonomously and drives
the system input through u = theta(w). Traces carry the grid, states, input,
output, and integrator metadata; CSV export follows the header
t,x1..xn[,w1..wm],u,y.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DimensionError, DivergenceError, InputError, NumericalError
from ..expr import Expr, normalize, shift_vars
from ..exo import Exosystem
from ..vfield import AffineSystem
from .backend import BACKEND, integrate_tape_kernel
from .tape import TapeProgram, compile_exprs

_STATUS_MESSAGES = {
    1: "step size underflow (stiff dynamics or finite-time blow-up)",
    2: "right-hand side not finite at the initial state",
    3: "step budget exhausted",
}


@dataclass(frozen=True)
class IntegratorControls:
    rtol: float = 1e-8
    atol: float = 1e-10
    max_steps: int = 10_000_000
    method: str = "rk45"  # "rk45" adaptive | "rk4" fixed step
    fixed_step: float = 0.0
    grid_points: int = 1001
    grid: Sequence[float] | None = None

    def resolve_grid(self, t0: float, t1: float) -> np.ndarray:
        if self.grid is not None:
            g = np.asarray(self.grid, dtype=float)
            if g.ndim != 1 or g.size == 0 or np.any(np.diff(g) < 0):
                raise InputError("grid must be a nondecreasing 1-d array")
            if g[0] < t0 - 1e-12 or g[-1] > t1 + 1e-12:
                raise InputError("grid must lie within the integration window")
            return g
        return np.linspace(t0, t1, self.grid_points)

    def method_flag(self) -> int:
        if self.method == "rk45":
            return 0
        if self.method == "rk4":
            if self.fixed_step <= 0:
                raise InputError("rk4 mode requires a positive fixed_step")
            return 1
        raise InputError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class Trace:
    """Sampled trajectory of a system or cascade."""

    t: np.ndarray
    states: np.ndarray  # full integrated state, cascade order (w, x)
    x: np.ndarray
    w: np.ndarray | None
    u: np.ndarray | None
    y: np.ndarray | None
    meta: dict = field(compare=False)

    def to_csv(self, path: str):
        n = self.x.shape[1]
        cols = [self.t] + [self.x[:, i] for i in range(n)]
        header = ["t"] + [f"x{i + 1}" for i in range(n)]
        if self.w is not None:
            for j in range(self.w.shape[1]):
                cols.append(self.w[:, j])
                header.append(f"w{j + 1}")
        if self.u is not None:
            cols.append(self.u)
            header.append("u")
        if self.y is not None:
            cols.append(self.y)
            header.append("y")
        tmp = f"{path}.tmp{os.getpid()}"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for row in zip(*cols):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        os.replace(tmp, path)

    @property
    def max_state_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.x, axis=1)))


def _run_kernel(program: TapeProgram, y0, t0, t1, controls: IntegratorControls) -> tuple[np.ndarray, np.ndarray, dict]:
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    if y0.shape[0] != program.n_inputs:
        raise DimensionError(f"initial state must have length {program.n_inputs}")
    if program.n_outputs != program.n_inputs:
        raise DimensionError("right-hand side dimension must match the state dimension")
    if t1 <= t0:
        raise InputError("horizon must be positive")
    grid = controls.resolve_grid(t0, t1)
    Y, n_steps, n_rejected, status, last_t, last_y = integrate_tape_kernel(
        program.code,
        program.consts,
        program.n_inputs,
        program.n_regs,
        program.out_regs,
        y0,
        float(t0),
        float(t1),
        grid,
        controls.rtol,
        controls.atol,
        controls.max_steps,
        controls.method_flag(),
        controls.fixed_step,
    )
    if status == 2:
        raise NumericalError(_STATUS_MESSAGES[2])
    if status in (1, 3):
        raise DivergenceError(_STATUS_MESSAGES[status], last_t, last_y)
    meta = {
        "method": controls.method,
        "rtol": controls.rtol,
        "atol": controls.atol,
        "fixed_step": controls.fixed_step,
        "steps": int(n_steps),
        "rejected_steps": int(n_rejected),
        "backend": BACKEND,
    }
    return grid, Y, meta


def integrate_autonomous(
    components: Sequence[Expr],
    x0,
    horizon: float,
    controls: IntegratorControls = IntegratorControls(),
    params: dict | None = None,
) -> Trace:
    """Integrate xdot = F(x) with no input."""
    comps = [normalize(c) for c in components]
    n = len(comps)
    program = compile_exprs(comps, n, params)
    grid, Y, meta = _run_kernel(program, x0, 0.0, horizon, controls)
    return Trace(grid, Y, Y, None, None, None, meta)


def cascade_exprs(sys: AffineSystem, exo: Exosystem) -> tuple[list[Expr], Expr, Expr, int]:
    """Right-hand side of the cascade in (w, x) order plus the input and
    output maps as expressions over the cascade state."""
    m = exo.m
    theta = exo.output_expr()
    w_rhs = list(exo.field_exprs())
    x_rhs = []
    for f_i, g_i in zip(sys.f.components, sys.g.components):
        fx = shift_vars(f_i, m)
        gx = shift_vars(g_i, m)
        x_rhs.append(normalize(fx + theta * gx))
    y_expr = normalize(shift_vars(sys.h, m))
    return w_rhs + x_rhs, normalize(theta), y_expr, m


def integrate_cascade(
    sys: AffineSystem,
    exo: Exosystem,
    x0,
    w0,
    horizon: float,
    controls: IntegratorControls = IntegratorControls(),
    params: dict | None = None,
) -> Trace:
    """Integrate the closed cascade wdot = Q(w), xdot = f(x) + theta(w) g(x)."""
    rhs, theta, y_expr, m = cascade_exprs(sys, exo)
    n = sys.n
    w0 = np.asarray(w0, dtype=float).reshape(-1)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if w0.shape[0] != m:
        raise DimensionError(f"w0 must have length {m}")
    if x0.shape[0] != n:
        raise DimensionError(f"x0 must have length {n}")
    program = compile_exprs(rhs, m + n, params)
    y0 = np.concatenate([w0, x0])
    grid, Y, meta = _run_kernel(program, y0, 0.0, horizon, controls)
    W = Y[:, :m]
    X = Y[:, m:]
    u_prog = compile_exprs([theta], m + n, params)
    y_prog = compile_exprs([y_expr], m + n, params)
    u = u_prog.eval_batch(Y)[:, 0]
    y = y_prog.eval_batch(Y)[:, 0]
    return Trace(grid, Y, X, W, u, y, meta)


def integrate(
    sys: AffineSystem,
    exo: Exosystem | None,
    x0,
    w0,
    horizon: float,
    controls: IntegratorControls = IntegratorControls(),
    params: dict | None = None,
    u_const: float | None = None,
) -> Trace:
    """Front door: cascade when an exosystem is given; otherwise a constant
    input (default 0) closes the system."""
    if exo is not None:
        return integrate_cascade(sys, exo, x0, w0, horizon, controls, params)
    u_val = 0.0 if u_const is None else float(u_const)
    comps = [
        normalize(f_i + u_val * g_i) for f_i, g_i in zip(sys.f.components, sys.g.components)
    ]
    program = compile_exprs(comps, sys.n, params)
    grid, Y, meta = _run_kernel(program, x0, 0.0, horizon, controls)
    y_prog = compile_exprs([sys.h], sys.n, params)
    y = y_prog.eval_batch(Y)[:, 0]
    u = np.full(len(grid), u_val)
    return Trace(grid, Y, Y, None, u, y, meta)
