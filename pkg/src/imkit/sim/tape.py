"""Compile expression lists into flat register programs.

The integrator kernels (compiled and pure-Python) evaluate the same tape:
a three-address instruction stream over a register file laid out as
[state inputs | preloaded constants | temporaries]. Parameters are bound at
compile time, so the hot loop touches only doubles.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..errors import DimensionError, InputError
from ..expr import Add, Const, Expr, Func, Mul, Param, Pow, Var, walk_exprs

OP_ADD = 0
OP_MUL = 1
OP_POWI = 2
OP_EXP = 3
OP_LN = 4
OP_SIN = 5
OP_COS = 6

MAX_REGS = 1 << 20


class TapeProgram:
    """Flat evaluation program for a vector of expressions."""

    __slots__ = ("n_inputs", "n_consts", "n_regs", "consts", "code", "out_regs", "n_outputs")

    def __init__(self, n_inputs, consts, code, out_regs, n_regs):
        self.n_inputs = n_inputs
        self.n_consts = len(consts)
        self.consts = np.asarray(consts, dtype=np.float64)
        self.code = np.asarray(code, dtype=np.int32).reshape(-1)
        self.out_regs = np.asarray(out_regs, dtype=np.int32)
        self.n_regs = n_regs
        self.n_outputs = len(out_regs)

    def eval_batch(self, states: np.ndarray) -> np.ndarray:
        """Vectorized interpretation over rows of states (post-processing path,
        not the integration hot loop)."""
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        if states.shape[1] != self.n_inputs:
            raise DimensionError(
                f"expected {self.n_inputs} input columns, got {states.shape[1]}"
            )
        rows = states.shape[0]
        regs = np.empty((self.n_regs, rows), dtype=np.float64)
        regs[: self.n_inputs] = states.T
        for i, c in enumerate(self.consts):
            regs[self.n_inputs + i] = c
        code = self.code
        with np.errstate(all="ignore"):
            for k in range(0, len(code), 4):
                op, dst, a, b = code[k], code[k + 1], code[k + 2], code[k + 3]
                if op == OP_ADD:
                    np.add(regs[a], regs[b], out=regs[dst])
                elif op == OP_MUL:
                    np.multiply(regs[a], regs[b], out=regs[dst])
                elif op == OP_POWI:
                    regs[dst] = _powi_batch(regs[a], int(b))
                elif op == OP_EXP:
                    np.exp(regs[a], out=regs[dst])
                elif op == OP_LN:
                    np.log(regs[a], out=regs[dst])
                elif op == OP_SIN:
                    np.sin(regs[a], out=regs[dst])
                else:
                    np.cos(regs[a], out=regs[dst])
        return regs[self.out_regs].T.copy()


def _powi_batch(base: np.ndarray, k: int) -> np.ndarray:
    if k < 0:
        return 1.0 / _powi_batch(base, -k)
    result = np.ones_like(base)
    b = base.copy()
    e = k
    while e:
        if e & 1:
            result = result * b
        b = b * b
        e >>= 1
    return result


def compile_exprs(
    exprs: Sequence[Expr], n_inputs: int, params: Mapping[str, float] | None = None
) -> TapeProgram:
    """Compile expressions over x1..x{n_inputs} with all parameters bound."""
    params = dict(params or {})

    # first pass: constant pool in deterministic first-encounter order
    consts: list[float] = []
    const_index: dict[float, int] = {}

    def pool(value: float) -> int:
        idx = const_index.get(value)
        if idx is None:
            idx = len(consts)
            consts.append(value)
            const_index[value] = idx
        return idx

    for node in walk_exprs(exprs):
        if isinstance(node, Const):
            pool(float(node.value))
        elif isinstance(node, Param):
            if node.name not in params:
                raise InputError(f"unbound parameter {node.name!r} at compile time")
            pool(float(params[node.name]))
        elif isinstance(node, Var) and node.index > n_inputs:
            raise DimensionError(f"x{node.index} exceeds the input dimension {n_inputs}")

    base = n_inputs + len(consts)
    code: list[int] = []
    next_temp = base

    def temp() -> int:
        nonlocal next_temp
        reg = next_temp
        next_temp += 1
        if reg > MAX_REGS:
            raise InputError("expression too large to compile")
        return reg

    def emit(op: int, dst: int, a: int, b: int = 0):
        code.extend((op, dst, a, b))

    def compile_node(e: Expr) -> int:
        if isinstance(e, Const):
            return n_inputs + const_index[float(e.value)]
        if isinstance(e, Var):
            return e.index - 1
        if isinstance(e, Param):
            return n_inputs + const_index[float(params[e.name])]
        if isinstance(e, Add):
            reg = compile_node(e.terms[0])
            for t in e.terms[1:]:
                rhs = compile_node(t)
                dst = temp()
                emit(OP_ADD, dst, reg, rhs)
                reg = dst
            return reg
        if isinstance(e, Mul):
            reg = compile_node(e.factors[0])
            for f in e.factors[1:]:
                rhs = compile_node(f)
                dst = temp()
                emit(OP_MUL, dst, reg, rhs)
                reg = dst
            return reg
        if isinstance(e, Pow):
            a = compile_node(e.base)
            dst = temp()
            emit(OP_POWI, dst, a, e.exponent)
            return dst
        if isinstance(e, Func):
            a = compile_node(e.arg)
            dst = temp()
            emit({"exp": OP_EXP, "ln": OP_LN, "sin": OP_SIN, "cos": OP_COS}[e.name], dst, a)
            return dst
        raise TypeError(f"not an expression: {e!r}")

    out_regs = [compile_node(e) for e in exprs]
    return TapeProgram(n_inputs, consts, code, out_regs, next_temp)
