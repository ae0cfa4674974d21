"""Finite dimensional Hilbert space primitives.

Vectors and operators are plain numpy arrays (real or complex). A Subspace
wraps a matrix with orthonormal columns and owns projection onto its range.
Everything here is deterministic for a fixed input.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotPositiveDefiniteError,
    NotSelfAdjointError,
)

# Rank decisions in orthonormalization: singular values below
# RANK_TOL * sigma_max are treated as zero.
RANK_TOL = 1e-12


def as_vector(f) -> np.ndarray:
    f = np.asarray(f)
    if f.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-d vector, got shape {f.shape}")
    return f


def inner(f, g):
    """Inner product, linear in the first argument."""
    f, g = as_vector(f), as_vector(g)
    if f.shape != g.shape:
        raise DimensionMismatchError(f"shapes {f.shape} and {g.shape} differ")
    return np.vdot(g, f)


def norm(f) -> float:
    return float(np.linalg.norm(as_vector(f)))


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(a), 2))


def is_self_adjoint(a: np.ndarray, rtol: float = 1e-12) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    return float(np.abs(a - adjoint(a)).max(initial=0.0)) <= rtol * scale


@dataclass(frozen=True)
class Subspace:
    """A subspace of C^d or R^d given by a matrix with orthonormal columns.

    ``basis`` has shape (ambient_dim, rank); rank 0 (the zero subspace) is a
    legal value with an empty second axis.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.ndim != 2:
            raise DimensionMismatchError(f"basis must be 2-d, got shape {b.shape}")
        object.__setattr__(self, "basis", b)
        r = b.shape[1]
        if r:
            gram = adjoint(b) @ b
            dev = float(np.abs(gram - np.eye(r)).max())
            if dev > 1e-10:
                raise ValueError(f"basis columns not orthonormal (deviation {dev:.3e})")

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ adjoint(self.basis)

    def project(self, f) -> np.ndarray:
        f = as_vector(f)
        if f.shape[0] != self.ambient_dim:
            raise DimensionMismatchError(
                f"vector of dim {f.shape[0]} vs ambient dim {self.ambient_dim}"
            )
        if not self.rank:
            return np.zeros_like(f)
        return self.basis @ (adjoint(self.basis) @ f)

    def contains(self, f, tol: float = 1e-10) -> bool:
        f = as_vector(f)
        return float(np.linalg.norm(f - self.project(f))) <= tol * max(
            1.0, float(np.linalg.norm(f))
        )


def orthonormal_basis(vectors, tol: float = RANK_TOL, ambient_dim: int | None = None) -> Subspace:
    """Orthonormal basis of the span of ``vectors`` via SVD rank truncation.

    ``vectors`` is an iterable of 1-d arrays (or a 2-d array whose rows span
    the subspace). An empty collection yields the zero subspace, which needs
    ``ambient_dim`` to fix the ambient space.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        rows = list(vectors)
    else:
        rows = [as_vector(v) for v in vectors]
    if not rows:
        if ambient_dim is None:
            raise ValueError("empty span needs an explicit ambient_dim")
        return Subspace(np.zeros((ambient_dim, 0)))
    dims = {r.shape[0] for r in rows}
    if len(dims) != 1:
        raise DimensionMismatchError(f"mixed vector dimensions {sorted(dims)}")
    a = np.stack(rows, axis=1)  # columns span the subspace
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Subspace(np.zeros((a.shape[0], 0), dtype=a.dtype))
    r = int(np.count_nonzero(s > tol * s[0]))
    return Subspace(u[:, :r])


def column_space(a: np.ndarray, tol: float = RANK_TOL) -> Subspace:
    """Orthonormal basis of the range of a matrix."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got shape {a.shape}")
    return orthonormal_basis(list(a.T), tol=tol, ambient_dim=a.shape[0])


def project(w: Subspace, f) -> np.ndarray:
    """Orthogonal projection of f onto the subspace w."""
    return w.project(f)


def self_adjoint_eigh(a: np.ndarray, rtol: float = 1e-12):
    """Eigendecomposition of a self-adjoint matrix, eigenvalues ascending.

    Raises NotSelfAdjointError when the input is not self-adjoint within
    ``rtol`` relative to its largest entry.
    """
    a = np.asarray(a)
    if not is_self_adjoint(a, rtol=rtol):
        raise NotSelfAdjointError("matrix is not self-adjoint within tolerance")
    w, v = np.linalg.eigh(a)
    return w, v


def self_adjoint_spectrum(a: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Real spectrum of a self-adjoint matrix, ascending."""
    w, _ = self_adjoint_eigh(a, rtol=rtol)
    return w


def unit_probes(dim: int, count: int, rng=None) -> np.ndarray:
    """Columns are random unit vectors from a seeded generator (seed 0 default)."""
    rng = np.random.default_rng(0) if rng is None else rng
    p = rng.standard_normal((dim, count))
    p /= np.linalg.norm(p, axis=0)
    return p


def solve_positive(a: np.ndarray, f, tol: float = RANK_TOL) -> np.ndarray:
    """Solve A x = f for self-adjoint positive definite A.

    Uses an eigendecomposition plus one step of iterative refinement, which
    keeps the relative residual near machine precision for condition numbers
    up to about 1e6. Raises NotPositiveDefiniteError (carrying lambda_min)
    when the smallest eigenvalue does not clear ``tol`` times the largest.
    """
    f = as_vector(f)
    w, v = self_adjoint_eigh(a)
    if f.shape[0] != w.shape[0]:
        raise DimensionMismatchError(
            f"matrix of size {w.shape[0]} vs vector of dim {f.shape[0]}"
        )
    lam_min = float(w[0])
    lam_max = float(w[-1])
    if lam_min <= tol * max(lam_max, 0.0) or lam_max <= 0.0:
        raise NotPositiveDefiniteError(
            f"matrix is singular or indefinite (lambda_min={lam_min:.6e})",
            lambda_min=lam_min,
        )
    def apply_inverse(y):
        return v @ ((adjoint(v) @ y) / w)

    x = apply_inverse(f)
    x = x + apply_inverse(f - a @ x)
    return x
