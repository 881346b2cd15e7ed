# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integrator kernel.

Mirrors sim/_rk45_py.py instruction for instruction: adaptive Dormand-Prince
5(4) with quartic dense output and fixed-step RK4 with Hermite fill, over the
same tape opcodes. The main loop runs without the GIL so adaptation trials
can be integrated concurrently.
"""

import numpy as np

from libc.math cimport cos, exp, fabs, fmax, fmin, isfinite, log, pow, sin, sqrt

KERNEL_NAME = "compiled"

cdef enum:
    OP_ADD = 0
    OP_MUL = 1
    OP_POWI = 2
    OP_EXP = 3
    OP_LN = 4
    OP_SIN = 5
    OP_COS = 6

cdef double C2 = 1.0 / 5.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double P1_1 = 1.0
cdef double P1_2 = -8048581381.0 / 2820520608.0
cdef double P1_3 = 8663915743.0 / 2820520608.0
cdef double P1_4 = -12715105075.0 / 11282082432.0
cdef double P3_2 = 131558114200.0 / 32700410799.0
cdef double P3_3 = -68118460800.0 / 10900136933.0
cdef double P3_4 = 87487479700.0 / 32700410799.0
cdef double P4_2 = -1754552775.0 / 470086768.0
cdef double P4_3 = 14199869525.0 / 1410260304.0
cdef double P4_4 = -10690763975.0 / 1880347072.0
cdef double P5_2 = 127303824393.0 / 49829197408.0
cdef double P5_3 = -318862633887.0 / 49829197408.0
cdef double P5_4 = 701980252875.0 / 199316789632.0
cdef double P6_2 = -282668133.0 / 205662961.0
cdef double P6_3 = 2019193451.0 / 616988883.0
cdef double P6_4 = -1453857185.0 / 822651844.0
cdef double P7_2 = 40617522.0 / 29380423.0
cdef double P7_3 = -110615467.0 / 29380423.0
cdef double P7_4 = 69997945.0 / 29380423.0

cdef double MAX_FACTOR = 10.0
cdef double MIN_FACTOR = 0.2
cdef double SAFETY = 0.9
cdef double UNDERFLOW = 1e-15


cdef inline double _powi(double base, int k) nogil:
    cdef double result = 1.0
    cdef double b = base
    cdef int e = k
    if k < 0:
        return 1.0 / _powi(base, -k)
    while e:
        if e & 1:
            result *= b
        b *= b
        e >>= 1
    return result


cdef inline int _eval_tape(
    const int* code, int ncode, int n_inputs, double* regs,
    const double* state, const int* out_regs, int dim, double* out,
) nogil:
    cdef int i, k, op, dst, a, b
    cdef double v
    for i in range(n_inputs):
        regs[i] = state[i]
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
            regs[dst] = exp(regs[a])
        elif op == OP_LN:
            if regs[a] <= 0.0:
                return 0
            regs[dst] = log(regs[a])
        elif op == OP_SIN:
            regs[dst] = sin(regs[a])
        else:
            regs[dst] = cos(regs[a])
        k += 4
    cdef int ok = 1
    for i in range(dim):
        v = regs[out_regs[i]]
        out[i] = v
        if not isfinite(v):
            ok = 0
    return ok


cdef inline double _rms(const double* vec, const double* scale, int dim) nogil:
    cdef double s = 0.0
    cdef double r
    cdef int i
    for i in range(dim):
        r = vec[i] / scale[i]
        s += r * r
    return sqrt(s / dim)


def integrate_tape(
    code_in,
    consts_in,
    int n_inputs,
    int n_regs,
    out_regs_in,
    y0_in,
    double t0,
    double t1,
    t_eval_in,
    double rtol,
    double atol,
    long max_steps,
    int method,
    double fixed_step,
):
    """Same contract as the pure-Python kernel (see sim/_rk45_py.py)."""
    cdef int[::1] code = np.ascontiguousarray(code_in, dtype=np.int32)
    cdef double[::1] consts = np.ascontiguousarray(consts_in, dtype=np.float64)
    cdef int[::1] out_regs = np.ascontiguousarray(out_regs_in, dtype=np.int32)
    cdef double[::1] y0 = np.ascontiguousarray(y0_in, dtype=np.float64)
    cdef double[::1] grid = np.ascontiguousarray(t_eval_in, dtype=np.float64)

    cdef int dim = out_regs.shape[0]
    cdef int ncode = code.shape[0]
    cdef Py_ssize_t n_grid = grid.shape[0]

    Y_arr = np.empty((n_grid, dim), dtype=np.float64)
    cdef double[:, ::1] Y = Y_arr
    work_arr = np.zeros(n_regs + 12 * dim, dtype=np.float64)
    cdef double[::1] work = work_arr

    cdef double* regs = &work[0]
    cdef double* y = regs + n_regs
    cdef double* k1 = y + dim
    cdef double* k2 = k1 + dim
    cdef double* k3 = k2 + dim
    cdef double* k4 = k3 + dim
    cdef double* k5 = k4 + dim
    cdef double* k6 = k5 + dim
    cdef double* k7 = k6 + dim
    cdef double* ys = k7 + dim
    cdef double* y_new = ys + dim

    cdef int i
    for i in range(consts.shape[0]):
        regs[n_inputs + i] = consts[i]
    for i in range(dim):
        y[i] = y0[i]

    cdef int dummy_code[4]
    dummy_code[0] = 0; dummy_code[1] = 0; dummy_code[2] = 0; dummy_code[3] = 0
    cdef const int* code_ptr = &code[0] if ncode > 0 else <const int*>dummy_code
    cdef const int* out_ptr = &out_regs[0]

    cdef double t = t0
    cdef Py_ssize_t idx = 0
    while idx < n_grid and grid[idx] <= t0:
        for i in range(dim):
            Y[idx, i] = y[i]
        idx += 1

    cdef int status = 0
    cdef long n_steps = 0
    cdef long n_rejected = 0
    cdef int ok
    cdef double h, d0, d1, d2, dmax, h1
    cdef double err_norm, errsum, r, scale_i, factor, t_new
    cdef double x, x2, x3, x4, w1, w3, w4, w5, w6, w7
    cdef double h00, h10, h01, h11, h_nom
    cdef int just_rejected = 0
    cdef double* scale = y_new + dim  # reuse tail of the work buffer (dim slots + spare)

    with nogil:
        ok = _eval_tape(code_ptr, ncode, n_inputs, regs, y, out_ptr, dim, k1)
        if not ok:
            status = 2
        elif method == 1:
            h_nom = fixed_step
            while t < t1:
                if n_steps >= max_steps:
                    status = 3
                    break
                h = h_nom if t + h_nom <= t1 else t1 - t
                if h < UNDERFLOW * fmax(1.0, fabs(t)):
                    break
                for i in range(dim):
                    ys[i] = y[i] + 0.5 * h * k1[i]
                ok = _eval_tape(code_ptr, ncode, n_inputs, regs, ys, out_ptr, dim, k2)
                if ok:
                    for i in range(dim):
                        ys[i] = y[i] + 0.5 * h * k2[i]
                    ok = _eval_tape(code_ptr, ncode, n_inputs, regs, ys, out_ptr, dim, k3)
                if ok:
                    for i in range(dim):
                        ys[i] = y[i] + h * k3[i]
                    ok = _eval_tape(code_ptr, ncode, n_inputs, regs, ys, out_ptr, dim, k4)
                if ok:
                    for i in range(dim):
                        y_new[i] = y[i] + h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0
                    ok = _eval_tape(code_ptr, ncode, n_inputs, regs, y_new, out_ptr, dim, k5)
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
                        Y[idx, i] = h00 * y[i] + h10 * h * k1[i] + h01 * y_new[i] + h11 * h * k5[i]
                    idx += 1
                for i in range(dim):
                    y[i] = y_new[i]
                    k1[i] = k5[i]
                t = t_new
                n_steps += 1
        else:
            for i in range(dim):
                scale[i] = atol + rtol * fabs(y[i])
            d0 = _rms(y, scale, dim)
            d1 = _rms(k1, scale, dim)
            h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
            h = fmin(h, t1 - t0)
            for i in range(dim):
                ys[i] = y[i] + h * k1[i]
            ok = _eval_tape(code_ptr, ncode, n_inputs, regs, ys, out_ptr, dim, k2)
            if ok:
                for i in range(dim):
                    k3[i] = k2[i] - k1[i]
                d2 = _rms(k3, scale, dim) / h
                dmax = fmax(d1, d2)
                h1 = pow(0.01 / dmax, 0.2) if dmax > 1e-15 else fmax(1e-6, h * 1e-3)
                h = fmin(100.0 * h, h1)
                h = fmin(h, t1 - t0)

            while t < t1:
                if n_steps >= max_steps:
                    status = 3
                    break
                if h < UNDERFLOW * fmax(1.0, fabs(t)):
                    status = 1
                    break
                if t + h > t1:
                    h = t1 - t

                for i in range(dim):
                    ys[i] = y[i] + h * (A21 * k1[i])
                ok = _eval_tape(code_ptr, ncode, n_inputs, regs, ys, out_ptr, dim, k2)
                if ok:
                    for i in range(dim):
                        ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
                    ok = _eval_tape(code_ptr, ncode, n_inputs, regs, ys, out_ptr, dim, k3)
                if ok:
                    for i in range(dim):
                        ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
                    ok = _eval_tape(code_ptr, ncode, n_inputs, regs, ys, out_ptr, dim, k4)
                if ok:
                    for i in range(dim):
                        ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
                    ok = _eval_tape(code_ptr, ncode, n_inputs, regs, ys, out_ptr, dim, k5)
                if ok:
                    for i in range(dim):
                        ys[i] = y[i] + h * (
                            A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]
                        )
                    ok = _eval_tape(code_ptr, ncode, n_inputs, regs, ys, out_ptr, dim, k6)
                if ok:
                    for i in range(dim):
                        y_new[i] = y[i] + h * (
                            B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]
                        )
                    ok = _eval_tape(code_ptr, ncode, n_inputs, regs, y_new, out_ptr, dim, k7)

                if not ok:
                    n_rejected += 1
                    just_rejected = 1
                    h *= 0.5
                    continue

                errsum = 0.0
                for i in range(dim):
                    r = h * (
                        E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]
                    )
                    scale_i = atol + rtol * fmax(fabs(y[i]), fabs(y_new[i]))
                    r = r / scale_i
                    errsum += r * r
                err_norm = sqrt(errsum / dim)

                if err_norm <= 1.0:
                    t_new = t + h
                    while idx < n_grid and grid[idx] <= t_new:
                        x = (grid[idx] - t) / h
                        x = 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)
                        x2 = x * x
                        x3 = x2 * x
                        x4 = x3 * x
                        w1 = P1_1 * x + P1_2 * x2 + P1_3 * x3 + P1_4 * x4
                        w3 = P3_2 * x2 + P3_3 * x3 + P3_4 * x4
                        w4 = P4_2 * x2 + P4_3 * x3 + P4_4 * x4
                        w5 = P5_2 * x2 + P5_3 * x3 + P5_4 * x4
                        w6 = P6_2 * x2 + P6_3 * x3 + P6_4 * x4
                        w7 = P7_2 * x2 + P7_3 * x3 + P7_4 * x4
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
                        k1[i] = k7[i]
                    t = t_new
                    n_steps += 1
                    if err_norm == 0.0:
                        factor = MAX_FACTOR
                    else:
                        factor = SAFETY * pow(err_norm, -0.2)
                        if factor > MAX_FACTOR:
                            factor = MAX_FACTOR
                        elif factor < MIN_FACTOR:
                            factor = MIN_FACTOR
                    if just_rejected and factor > 1.0:
                        factor = 1.0
                    just_rejected = 0
                    h *= factor
                else:
                    n_rejected += 1
                    just_rejected = 1
                    factor = SAFETY * pow(err_norm, -0.2)
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

    last = np.empty(dim, dtype=np.float64)
    for i in range(dim):
        last[i] = y[i]
    return Y_arr, int(n_steps), int(n_rejected), int(status), float(t), last
