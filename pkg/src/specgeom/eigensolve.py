"""Smallest eigenpairs of the generalized problem L v = lambda M v.

Sparse path: shift-inverted Lanczos seeded deterministically, with the
shift placed just below zero so the kernel (constant functions on a closed
surface) is resolved reliably.  Dense path: a full LAPACK solve used as an
independent oracle on small meshes.  Both return the same container and
obey the same normalization and sign conventions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as dla
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh, splu

from .errors import SolverConvergenceError, UsageError
from .mesh import SparseOperatorPair

TOL_RANGE = (1e-14, 1e-2)
MAX_RESTARTS = 500
MAX_POLISH_STEPS = 40
GRAM_TOL = 1e-8


@dataclass(frozen=True)
class EigenBasis:
    """Ascending eigenvalues with M-orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    mass_gram_error: float

    @property
    def size(self) -> int:
        return len(self.values)

    def to_json_dict(self, include_vectors: bool = False) -> dict:
        out = {
            "values": list(self.values),
            "residuals": list(self.residuals),
            "mass_gram_error": self.mass_gram_error,
            "size": self.size,
        }
        if include_vectors:
            out["vectors_shape"] = list(self.vectors.shape)
        return out


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the first significantly-nonzero entry of each column positive."""
    out = np.array(vectors, copy=True)
    for col in range(out.shape[1]):
        v = out[:, col]
        peak = np.max(np.abs(v))
        if peak == 0.0:
            continue
        lead = int(np.argmax(np.abs(v) > 1e-6 * peak))
        if v[lead] < 0.0:
            out[:, col] = -v
    return out


def _mass_orthonormalize(vectors, mass_diag):
    gram = vectors.T @ (vectors * mass_diag[:, None])
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise SolverConvergenceError(
            "returned basis is numerically mass-degenerate",
            gram_error=float(np.max(np.abs(gram - np.eye(vectors.shape[1])))),
        )
    return dla.solve_triangular(chol, vectors.T, lower=True).T


def _ritz_extract(ops, vectors):
    """M-orthonormalize the block and rediagonalize the projected operator.

    Raw Krylov vectors inside a degenerate cluster carry arbitrary mixing;
    the Rayleigh-Ritz rotation resolves it and returns ascending values.
    """
    vectors = _mass_orthonormalize(vectors, ops.mass_diag)
    projected = vectors.T @ (ops.stiffness @ vectors)
    values, rotation = dla.eigh(0.5 * (projected + projected.T))
    return values, vectors @ rotation


def _residual_norms(ops, values, vectors):
    lv = ops.stiffness @ vectors
    resid_vec = lv - vectors * (ops.mass_diag[:, None] * values[None, :])
    residuals = np.linalg.norm(resid_vec, axis=0)
    return residuals, np.maximum(1.0, np.linalg.norm(lv, axis=0))


def _finalize(values, vectors, ops, tol, keep=None):
    order = np.argsort(values, kind="stable")
    values = np.asarray(values)[order]
    vectors = np.asarray(vectors)[:, order]
    vectors = _mass_orthonormalize(vectors, ops.mass_diag)
    if keep is not None:
        values = values[:keep]
        vectors = vectors[:, :keep]
    vectors = _fix_signs(vectors)
    mass_diag = ops.mass_diag
    gram = vectors.T @ (vectors * mass_diag[:, None])
    gram_error = float(np.max(np.abs(gram - np.eye(len(values)))))
    residuals, lv_scale = _residual_norms(ops, values, vectors)
    bounds = tol * lv_scale
    if gram_error > GRAM_TOL or np.any(residuals > bounds):
        raise SolverConvergenceError(
            "eigenpairs failed the residual or orthonormality check",
            worst_residual=float(residuals.max()),
            bound=float(bounds.min()),
            gram_error=gram_error,
        )
    return EigenBasis(
        values=values,
        vectors=vectors,
        residuals=residuals,
        mass_gram_error=gram_error,
    )


def solve_smallest(
    ops: SparseOperatorPair, k: int, tol: float = 1e-9, seed: int = 0
) -> EigenBasis:
    """The k smallest eigenpairs of (L, M), deterministic for a fixed seed.

    The kernel of L appears as eigenvalues below the zero threshold (they
    may round to tiny negatives).  Raises a convergence error with the best
    residuals attached if the iteration stalls.
    """
    n = ops.stiffness.shape[0]
    if k < 1 or k >= n:
        raise UsageError("k must satisfy 1 <= k < %d, got %d" % (n, k), k=k)
    if not (TOL_RANGE[0] <= tol <= TOL_RANGE[1]):
        raise UsageError("tol %g outside [%g, %g]" % (tol, *TOL_RANGE), tol=tol)

    # shift slightly below the spectrum so the kernel maps to the largest
    # transformed eigenvalues and is found first
    eps = 1e-8 * ops.stiffness.diagonal().sum() / max(ops.stiffness.nnz, 1)
    v0 = np.random.default_rng(seed).standard_normal(n)
    # pad the request so a multiplicity cluster cut at index k still lies
    # inside the converged subspace; the smallest k survive the polish
    k_solve = min(n - 1, k + max(8, k // 4))
    ncv = min(n, max(2 * k_solve + 1, 20))
    try:
        values, vectors = eigsh(
            ops.stiffness.tocsc(),
            k=k_solve,
            M=ops.mass.tocsc(),
            sigma=-eps,
            which="LM",
            v0=v0,
            ncv=ncv,
            maxiter=MAX_RESTARTS,
            tol=0.0,
        )
    except ArpackNoConvergence as exc:
        raise SolverConvergenceError(
            "Lanczos iteration did not converge within %d restarts" % MAX_RESTARTS,
            converged=len(getattr(exc, "eigenvalues", [])),
            requested=k_solve,
        )

    # ARPACK converges the shift-inverted operator to machine precision,
    # but the kernel's huge transformed eigenvalue leaves the remaining
    # pairs with residuals near 1e-7 in the original pencil.  Polish by
    # block inverse iteration with the same shifted operator (full
    # reorthogonalization plus Ritz re-extraction each sweep) until every
    # kept pair meets the residual bound.
    mass_diag = ops.mass_diag
    lu = None
    converged = False
    for _ in range(MAX_POLISH_STEPS):
        values, vectors = _ritz_extract(ops, vectors)
        residuals, lv_scale = _residual_norms(ops, values[:k], vectors[:, :k])
        if np.all(residuals <= 0.5 * tol * lv_scale):
            converged = True
            break
        if lu is None:
            shifted = ops.stiffness + eps * ops.mass
            lu = splu(shifted.tocsc())
        vectors = lu.solve(mass_diag[:, None] * vectors)
    if not converged:
        values, vectors = _ritz_extract(ops, vectors)
    return _finalize(values, vectors, ops, tol, keep=k)


def dense_eigenbasis(ops: SparseOperatorPair, k: int | None = None) -> EigenBasis:
    """Full dense generalized eigensolve, the oracle path for small meshes."""
    n = ops.stiffness.shape[0]
    if n > 3000:
        raise UsageError("dense path refused for %d vertices" % n, n=n)
    lmat = ops.stiffness.toarray()
    lmat = 0.5 * (lmat + lmat.T)
    values, vectors = dla.eigh(lmat, ops.mass.toarray())
    if k is not None:
        if k < 1 or k > n:
            raise UsageError("k must satisfy 1 <= k <= %d, got %d" % (n, k), k=k)
        values, vectors = values[:k], vectors[:, :k]
    return _finalize(values, vectors, ops, tol=1e-8)


def zero_mode_count(basis: EigenBasis, scale: float, rel_zero_tol: float = 1e-8) -> int:
    """Number of eigenvalues below ``rel_zero_tol * scale``."""
    if scale <= 0.0:
        raise UsageError("zero-mode scale must be positive, got %g" % scale)
    return int(np.count_nonzero(basis.values < rel_zero_tol * scale))


def kernel_scale(basis: EigenBasis) -> float:
    """Default scale for zero-mode detection: the largest resolved value."""
    peak = float(np.max(np.abs(basis.values))) if basis.size else 0.0
    return peak if peak > 0.0 else 1.0


def basis_zero_dim(basis: EigenBasis) -> int:
    return zero_mode_count(basis, kernel_scale(basis))


def clustered_entries(basis: EigenBasis) -> list[tuple[float, int]]:
    """Group computed values into multiplicity clusters.

    Gap threshold 1e-6 times the largest returned value; raw values stay
    available on the basis, this is for reporting only.
    """
    gap = 1e-6 * kernel_scale(basis)
    clusters: list[list[float]] = []
    for v in basis.values:
        if clusters and v - clusters[-1][-1] <= gap:
            clusters[-1].append(float(v))
        else:
            clusters.append([float(v)])
    return [(float(np.mean(c)), len(c)) for c in clusters]


def diagonal_operator_pair(stiff_diag, mass_diag) -> SparseOperatorPair:
    """Operator pair from explicit diagonals; synthetic-problem helper."""
    return SparseOperatorPair(
        stiffness=sparse.csr_matrix(sparse.diags(np.asarray(stiff_diag, dtype=float))),
        mass=sparse.csr_matrix(sparse.diags(np.asarray(mass_diag, dtype=float))),
        clamp_count=0,
    )
