"""Embedding an observable exosystem into a linear internal model.

Solves for T with F T = T Q and phi T = theta by matching output derivatives
to the combined recurrence depth, then verifies the algebraic identities and
exhibits the similarity that makes F block-triangular with Q as a diagonal
block. Unobservable pairs are reduced to their observable core first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, NoEmbeddingError

DEFAULT_TOL = 1e-8


def observability_matrix(A: np.ndarray, c: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    rows = [c]
    for _ in range(n - 1):
        rows.append(rows[-1] @ A)
    return np.vstack(rows)


def observable_split(A: np.ndarray, c: np.ndarray, rtol: float = 1e-10):
    """Orthonormal basis [Z1 | Z2] with Z1 spanning the observable complement.

    Returns (Z1, Z2); ker(obs matrix) is A-invariant, so Z1' A Z2 = 0 and the
    pair (Z1' A Z1, c Z1) is the observable core.
    """
    obs = observability_matrix(A, c)
    u, s, vt = np.linalg.svd(obs)
    tol = rtol * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    z1 = vt[:rank].T
    z2 = vt[rank:].T
    return z1, z2


@dataclass(frozen=True)
class EmbeddingResult:
    """Certified solution of the derivative-matching system.

    T maps exosystem states into the (observable core of the) internal model;
    P is the basis completion making the core upper block-triangular with the
    exosystem matrix as the leading diagonal block. When an observability
    reduction was applied, `block_form`/`full_basis` refer to the original F
    with the unobservable block ordered first (the exosystem block starts at
    `q_block_offset`).
    """

    T: np.ndarray
    P: np.ndarray
    block_form: np.ndarray
    q_block_offset: int
    residual_sylvester: float
    residual_output: float
    min_singular_value: float
    f_reduced: bool
    exo_reduced: bool
    full_basis: np.ndarray

    @property
    def q_block(self) -> np.ndarray:
        m = self.T.shape[1]
        k = self.q_block_offset
        return self.block_form[k : k + m, k : k + m]


def _as_matrix(M, name: str) -> np.ndarray:
    out = np.atleast_2d(np.asarray(M, dtype=float))
    if out.shape[0] != out.shape[1]:
        raise DimensionError(f"{name} must be square, got {out.shape}")
    return out


def _as_row(v, n: int, name: str) -> np.ndarray:
    out = np.asarray(v, dtype=float).reshape(-1)
    if out.shape[0] != n:
        raise DimensionError(f"{name} must have length {n}")
    return out


def solve_embedding(Q, theta, F, phi, tol: float = DEFAULT_TOL) -> EmbeddingResult:
    """Find T with F T = T Q and phi T = theta, plus the block-triangular
    similarity exposing Q inside F.

    Raises NoEmbeddingError when the derivative-matching system has no
    solution within tol (the internal model cannot reproduce the exosystem
    outputs) or when T is rank-deficient.
    """
    Q = _as_matrix(Q, "Q")
    F = _as_matrix(F, "F")
    m = Q.shape[0]
    nf = F.shape[0]
    theta = _as_row(theta, m, "theta")
    phi = _as_row(phi, nf, "phi")

    exo_reduced = False
    z1q, _z2q = observable_split(Q, theta)
    if z1q.shape[1] < m:
        # reduce the exosystem to an observable equivalent first
        Q = z1q.T @ Q @ z1q
        theta = theta @ z1q
        m = Q.shape[0]
        exo_reduced = True

    f_reduced = False
    z1 = np.eye(nf)
    z2 = np.zeros((nf, 0))
    Fo, phio = F, phi
    z1f, z2f = observable_split(F, phi)
    if z1f.shape[1] < nf:
        z1, z2 = z1f, z2f
        Fo = z1.T @ F @ z1
        phio = phi @ z1
        f_reduced = True
    no = Fo.shape[0]

    depth = no + m - 1
    rows_f = [phio]
    rows_q = [theta]
    for _ in range(depth):
        rows_f.append(rows_f[-1] @ Fo)
        rows_q.append(rows_q[-1] @ Q)
    M = np.vstack(rows_f)
    B = np.vstack(rows_q)
    T, *_ = np.linalg.lstsq(M, B, rcond=None)
    match_residual = float(np.max(np.abs(M @ T - B))) if M.size else 0.0
    if match_residual > tol:
        raise NoEmbeddingError(
            f"derivative matching residual {match_residual:.3e} exceeds tol {tol:.1e}; "
            "the internal model cannot reproduce the exosystem outputs",
            residual=match_residual,
        )

    res_syl = float(np.max(np.abs(Fo @ T - T @ Q)))
    res_out = float(np.max(np.abs(phio @ T - theta)))
    if res_syl > tol or res_out > tol:
        raise NoEmbeddingError(
            f"verification failed: |FT-TQ|={res_syl:.3e}, |phiT-theta|={res_out:.3e} (tol {tol:.1e})",
            residual=max(res_syl, res_out),
        )
    svals = np.linalg.svd(T, compute_uv=False)
    smin = float(svals[-1]) if svals.size else 0.0
    if smin <= tol:
        raise NoEmbeddingError(
            f"embedding map is rank deficient (smallest singular value {smin:.3e})",
            residual=smin,
        )

    # complete T to a basis of the observable core
    comp = _complete_columns(T, no)
    P = np.hstack([T, comp])
    # basis of the original space: unobservable part first, then T, then rest
    full_basis = np.hstack([z2, z1 @ T, z1 @ comp])
    block_form = np.linalg.solve(full_basis, F @ full_basis)
    q_offset = z2.shape[1]
    return EmbeddingResult(
        T=T,
        P=P,
        block_form=block_form,
        q_block_offset=q_offset,
        residual_sylvester=res_syl,
        residual_output=res_out,
        min_singular_value=smin,
        f_reduced=f_reduced,
        exo_reduced=exo_reduced,
        full_basis=full_basis,
    )


def _complete_columns(T: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal complement of the column space of T."""
    if T.shape[1] >= n:
        return np.zeros((n, 0))
    u, s, _vt = np.linalg.svd(T, full_matrices=True)
    return u[:, T.shape[1] :]
