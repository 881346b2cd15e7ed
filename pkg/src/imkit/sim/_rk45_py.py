"""Pure-Python integrator kernel (fallback for the compiled core).

Adaptive Dormand-Prince 5(4) with the quartic dense-output interpolant, plus
a fixed-step classic RK4 mode with cubic Hermite grid fill. The compiled
extension implements the identical algorithm; arithmetic order is kept the
same so the two backends agree to the last few ulps.

Status codes: 0 ok, 1 step-size underflow, 2 right-hand side not finite at
the initial state, 3 step budget exhausted.
"""

from __future__ import annotations

import math

import numpy as np

from .tape import OP_ADD, OP_COS, OP_EXP, OP_LN, OP_MUL, OP_POWI, OP_SIN

KERNEL_NAME = "python"

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5, C6 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)
# dense-output polynomial: y(t0 + x h) = y0 + h * sum_i k_i * (P[i] . [x, x^2, x^3, x^4])
P1 = (1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0)
P3 = (0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0)
P4 = (0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0)
P5 = (0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0)
P6 = (0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0)
P7 = (0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0)

MAX_FACTOR = 10.0
MIN_FACTOR = 0.2
SAFETY = 0.9
UNDERFLOW = 1e-15


def _powi(base: float, k: int) -> float:
    if k < 0:
        return 1.0 / _powi(base, -k)
    result = 1.0
    b = base
    e = k
    while e:
        if e & 1:
            result *= b
        b *= b
        e >>= 1
    return result


def _eval_tape(code, ncode, consts, n_inputs, regs, state, out_regs, out) -> bool:
    """Evaluate the tape at `state`; returns False when any output is nonfinite."""
    for i in range(n_inputs):
        regs[i] = state[i]
    try:
        k = 0
        while k < ncode:
            op = code[k]
            dst = code[k + 1]
            a = code[k + 2]
            b = code[k + 3]
            if op == OP_ADD:
                regs[dst] = regs[a] + regs[b]
            elif op == OP_MUL:
                regs[dst] = regs[a] * regs[b]
            elif op == OP_POWI:
                regs[dst] = _powi(regs[a], b)
            elif op == OP_EXP:
                regs[dst] = math.exp(regs[a]) if regs[a] < 709.0 else math.inf
            elif op == OP_LN:
                if regs[a] <= 0.0:
                    return False
                regs[dst] = math.log(regs[a])
            elif op == OP_SIN:
                regs[dst] = math.sin(regs[a])
            else:
                regs[dst] = math.cos(regs[a])
            k += 4
    except (ZeroDivisionError, OverflowError, ValueError):
        return False
    ok = True
    for i in range(len(out_regs)):
        v = regs[out_regs[i]]
        out[i] = v
        if not math.isfinite(v):
            ok = False
    return ok


def _rms(vec, scale, dim) -> float:
    s = 0.0
    for i in range(dim):
        r = vec[i] / scale[i]
        s += r * r
    return math.sqrt(s / dim)


def integrate_tape(
    code,
    consts,
    n_inputs,
    n_regs,
    out_regs,
    y0,
    t0: float,
    t1: float,
    t_eval,
    rtol: float,
    atol: float,
    max_steps: int,
    method: int,
    fixed_step: float,
):
    """Integrate ydot = tape(y) from t0 to t1 with dense output on t_eval.

    method 0 = adaptive Dormand-Prince 5(4), 1 = fixed-step classic RK4.
    Returns (Y, n_steps, n_rejected, status, last_t, last_y).
    """
    code = [int(v) for v in code]
    consts_l = [float(v) for v in consts]
    out_regs_l = [int(v) for v in out_regs]
    dim = len(out_regs_l)
    ncode = len(code)
    regs = [0.0] * n_regs
    for i, c in enumerate(consts_l):
        regs[n_inputs + i] = c

    grid = [float(v) for v in t_eval]
    n_grid = len(grid)
    Y = np.empty((n_grid, dim), dtype=np.float64)

    y = [float(v) for v in y0]
    t = t0
    idx = 0
    while idx < n_grid and grid[idx] <= t0:
        for i in range(dim):
            Y[idx, i] = y[i]
        idx += 1

    f0 = [0.0] * dim
    if not _eval_tape(code, ncode, consts_l, n_inputs, regs, y, out_regs_l, f0):
        return Y, 0, 0, 2, t, np.array(y)

    if method == 1:
        return _run_rk4(
            code, ncode, consts_l, n_inputs, regs, out_regs_l, y, f0, t0, t1, grid, idx, Y,
            fixed_step, max_steps,
        )

    scale = [atol + rtol * abs(y[i]) for i in range(dim)]
    d0 = _rms(y, scale, dim)
    d1 = _rms(f0, scale, dim)
    h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h = min(h, t1 - t0)
    y_probe = [y[i] + h * f0[i] for i in range(dim)]
    f_probe = [0.0] * dim
    if _eval_tape(code, ncode, consts_l, n_inputs, regs, y_probe, out_regs_l, f_probe):
        d2 = _rms([f_probe[i] - f0[i] for i in range(dim)], scale, dim) / h
        dmax = max(d1, d2)
        h1 = (0.01 / dmax) ** 0.2 if dmax > 1e-15 else max(1e-6, h * 1e-3)
        h = min(100.0 * h, h1, t1 - t0)

    k1 = list(f0)
    k2 = [0.0] * dim
    k3 = [0.0] * dim
    k4 = [0.0] * dim
    k5 = [0.0] * dim
    k6 = [0.0] * dim
    k7 = [0.0] * dim
    ys = [0.0] * dim
    y_new = [0.0] * dim
    err = [0.0] * dim

    n_steps = 0
    n_rejected = 0
    just_rejected = False
    status = 0

    while t < t1:
        if n_steps >= max_steps:
            status = 3
            break
        if h < UNDERFLOW * max(1.0, abs(t)):
            status = 1
            break
        if t + h > t1:
            h = t1 - t

        for i in range(dim):
            ys[i] = y[i] + h * (A21 * k1[i])
        ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, ys, out_regs_l, k2)
        if ok:
            for i in range(dim):
                ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
            ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, ys, out_regs_l, k3)
        if ok:
            for i in range(dim):
                ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, ys, out_regs_l, k4)
        if ok:
            for i in range(dim):
                ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, ys, out_regs_l, k5)
        if ok:
            for i in range(dim):
                ys[i] = y[i] + h * (
                    A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]
                )
            ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, ys, out_regs_l, k6)
        if ok:
            for i in range(dim):
                y_new[i] = y[i] + h * (
                    B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]
                )
            ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, y_new, out_regs_l, k7)

        if not ok:
            n_rejected += 1
            just_rejected = True
            h *= 0.5
            continue

        for i in range(dim):
            err[i] = h * (
                E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]
            )
            scale_i = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            err[i] = err[i] / scale_i
        errsum = 0.0
        for i in range(dim):
            errsum += err[i] * err[i]
        err_norm = math.sqrt(errsum / dim)

        if err_norm <= 1.0:
            t_new = t + h
            # dense output on grid points inside (t, t_new]
            while idx < n_grid and grid[idx] <= t_new:
                x = (grid[idx] - t) / h
                x = 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)
                x2 = x * x
                x3 = x2 * x
                x4 = x3 * x
                w1 = P1[0] * x + P1[1] * x2 + P1[2] * x3 + P1[3] * x4
                w3 = P3[1] * x2 + P3[2] * x3 + P3[3] * x4
                w4 = P4[1] * x2 + P4[2] * x3 + P4[3] * x4
                w5 = P5[1] * x2 + P5[2] * x3 + P5[3] * x4
                w6 = P6[1] * x2 + P6[2] * x3 + P6[3] * x4
                w7 = P7[1] * x2 + P7[2] * x3 + P7[3] * x4
                for i in range(dim):
                    Y[idx, i] = y[i] + h * (
                        w1 * k1[i]
                        + w3 * k3[i]
                        + w4 * k4[i]
                        + w5 * k5[i]
                        + w6 * k6[i]
                        + w7 * k7[i]
                    )
                idx += 1
            for i in range(dim):
                y[i] = y_new[i]
                k1[i] = k7[i]  # FSAL
            t = t_new
            n_steps += 1
            if err_norm == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err_norm ** -0.2
                if factor > MAX_FACTOR:
                    factor = MAX_FACTOR
                elif factor < MIN_FACTOR:
                    factor = MIN_FACTOR
            if just_rejected and factor > 1.0:
                factor = 1.0
            just_rejected = False
            h *= factor
        else:
            n_rejected += 1
            just_rejected = True
            factor = SAFETY * err_norm ** -0.2
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            elif factor > 1.0:
                factor = 1.0
            h *= factor

    if status == 0:
        while idx < n_grid:
            for i in range(dim):
                Y[idx, i] = y[i]
            idx += 1
    return Y, n_steps, n_rejected, status, t, np.array(y)


def _run_rk4(
    code, ncode, consts_l, n_inputs, regs, out_regs_l, y, f0, t0, t1, grid, idx, Y,
    fixed_step, max_steps,
):
    dim = len(out_regs_l)
    n_grid = len(grid)
    k1 = list(f0)
    k2 = [0.0] * dim
    k3 = [0.0] * dim
    k4 = [0.0] * dim
    ys = [0.0] * dim
    y_new = [0.0] * dim
    f_new = [0.0] * dim
    t = t0
    n_steps = 0
    status = 0
    h_nom = fixed_step
    while t < t1:
        if n_steps >= max_steps:
            status = 3
            break
        h = h_nom if t + h_nom <= t1 else t1 - t
        if h < UNDERFLOW * max(1.0, abs(t)):
            break
        for i in range(dim):
            ys[i] = y[i] + 0.5 * h * k1[i]
        ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, ys, out_regs_l, k2)
        if ok:
            for i in range(dim):
                ys[i] = y[i] + 0.5 * h * k2[i]
            ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, ys, out_regs_l, k3)
        if ok:
            for i in range(dim):
                ys[i] = y[i] + h * k3[i]
            ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, ys, out_regs_l, k4)
        if ok:
            for i in range(dim):
                y_new[i] = y[i] + h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0
            ok = _eval_tape(code, ncode, consts_l, n_inputs, regs, y_new, out_regs_l, f_new)
        if not ok:
            status = 1
            break
        t_new = t + h
        while idx < n_grid and grid[idx] <= t_new:
            x = (grid[idx] - t) / h
            x = 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)
            x2 = x * x
            x3 = x2 * x
            h00 = 2.0 * x3 - 3.0 * x2 + 1.0
            h10 = x3 - 2.0 * x2 + x
            h01 = -2.0 * x3 + 3.0 * x2
            h11 = x3 - x2
            for i in range(dim):
                Y[idx, i] = h00 * y[i] + h10 * h * k1[i] + h01 * y_new[i] + h11 * h * f_new[i]
            idx += 1
        for i in range(dim):
            y[i] = y_new[i]
            k1[i] = f_new[i]
        t = t_new
        n_steps += 1
    if status == 0:
        while idx < n_grid:
            for i in range(dim):
                Y[idx, i] = y[i]
            idx += 1
    return Y, n_steps, 0, status, t, np.array(y)
