"""Weighted families of subspaces with atomic measures: frames of subspaces.

A family assigns each atom i a subspace W_i, a weight omega_i > 0 and a mass
mu_i > 0. The frame sum of a vector f is

    sum_i omega_i^2 * mu_i * ||P_i f||^2,

and the family is a frame when that sum is sandwiched between A ||f||^2 and
B ||f||^2 with A > 0. The representation space for coefficients is the
direct sum of the W_i with the mass weighted inner product
<phi, psi> = sum_i <phi_i, psi_i> mu_i.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hilbert
from .errors import (
    AtomMismatchError,
    CoefficientError,
    DimensionMismatchError,
    NotAFrameError,
)
from .hilbert import Subspace, adjoint, as_vector
from .reports import VerificationReport


@dataclass(frozen=True)
class WeightedSubspaceFamily:
    """Finitely many weighted subspaces over an atomic measure."""

    subspaces: tuple
    weights: np.ndarray
    masses: np.ndarray
    points: tuple = ()

    def __post_init__(self):
        subs = tuple(self.subspaces)
        w = np.asarray(self.weights, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        if not subs:
            raise ValueError("a family needs at least one atom")
        if w.shape != (len(subs),) or m.shape != (len(subs),):
            raise AtomMismatchError(
                f"{len(subs)} subspaces vs weights {w.shape} and masses {m.shape}"
            )
        dims = {s.ambient_dim for s in subs}
        if len(dims) != 1:
            raise DimensionMismatchError(f"mixed ambient dimensions {sorted(dims)}")
        if not np.all(w > 0):
            raise ValueError("weights must be strictly positive (zero-weight atoms are excluded upstream)")
        if not np.all(m > 0):
            raise ValueError("masses must be strictly positive")
        if max(s.rank for s in subs) < 1:
            raise ValueError("at least one subspace must have rank >= 1")
        pts = tuple(self.points) if self.points else tuple(range(len(subs)))
        if len(pts) != len(subs):
            raise AtomMismatchError(f"{len(pts)} points for {len(subs)} atoms")
        object.__setattr__(self, "subspaces", subs)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "points", pts)

    @property
    def ambient_dim(self) -> int:
        return self.subspaces[0].ambient_dim

    @property
    def natoms(self) -> int:
        return len(self.subspaces)

    @property
    def ranks(self) -> tuple:
        return tuple(s.rank for s in self.subspaces)

    @classmethod
    def from_atoms(cls, subspaces, weights, masses, points=None):
        """Build a family, silently excluding atoms whose weight is zero."""
        weights = np.asarray(weights, dtype=float)
        masses = np.asarray(masses, dtype=float)
        subspaces = tuple(subspaces)
        points = tuple(points) if points is not None else tuple(range(len(subspaces)))
        keep = [i for i, w in enumerate(weights) if w != 0.0]
        if len(keep) != len(subspaces):
            subspaces = tuple(subspaces[i] for i in keep)
            points = tuple(points[i] for i in keep)
            weights = weights[keep]
            masses = masses[keep]
        return cls(subspaces=subspaces, weights=weights, masses=masses, points=points)


@dataclass(frozen=True)
class Coefficients:
    """Blocks phi_i in W_i under the mass weighted inner product."""

    blocks: tuple
    masses: np.ndarray

    def __post_init__(self):
        blocks = tuple(np.asarray(b) for b in self.blocks)
        m = np.asarray(self.masses, dtype=float)
        if len(blocks) != m.shape[0]:
            raise AtomMismatchError(f"{len(blocks)} blocks vs {m.shape[0]} masses")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "masses", m)

    def norm2(self) -> float:
        return float(
            sum(mu * float(np.vdot(b, b).real) for b, mu in zip(self.blocks, self.masses))
        )

    def inner(self, other: "Coefficients"):
        if len(self.blocks) != len(other.blocks):
            raise AtomMismatchError("coefficient families have different atom counts")
        return sum(
            mu * np.vdot(g, f)
            for f, g, mu in zip(self.blocks, other.blocks, self.masses)
        )


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float

    def is_frame(self, rel_tol: float = 1e-10) -> bool:
        return self.lower > rel_tol * max(self.upper, 0.0)

    def condition(self) -> float:
        if self.lower <= 0:
            return float("inf")
        return self.upper / self.lower


def analysis(family: WeightedSubspaceFamily, f) -> Coefficients:
    """Analysis map: f -> (omega_i * P_i f)_i."""
    f = as_vector(f)
    if f.shape[0] != family.ambient_dim:
        raise DimensionMismatchError(
            f"vector of dim {f.shape[0]} vs ambient dim {family.ambient_dim}"
        )
    blocks = tuple(
        w * s.project(f) for s, w in zip(family.subspaces, family.weights)
    )
    return Coefficients(blocks=blocks, masses=family.masses)


def synthesis(
    family: WeightedSubspaceFamily, coeffs: Coefficients, membership_tol: float = 1e-10
) -> np.ndarray:
    """Synthesis map, the adjoint of analysis: (phi_i) -> sum omega_i mu_i phi_i.

    Each block must lie in its subspace; a block sticking out beyond
    ``membership_tol`` (relative to its size) raises CoefficientError.
    """
    if len(coeffs.blocks) != family.natoms:
        raise AtomMismatchError(
            f"{len(coeffs.blocks)} blocks for {family.natoms} atoms"
        )
    out = np.zeros(family.ambient_dim, dtype=np.result_type(
        float, *(b.dtype for b in coeffs.blocks)
    ))
    for i, (s, w, mu, b) in enumerate(
        zip(family.subspaces, family.weights, family.masses, coeffs.blocks)
    ):
        b = as_vector(b)
        if b.shape[0] != family.ambient_dim:
            raise DimensionMismatchError(
                f"block {i} has dim {b.shape[0]} vs ambient {family.ambient_dim}"
            )
        stickout = float(np.linalg.norm(b - s.project(b)))
        if stickout > membership_tol * max(1.0, float(np.linalg.norm(b))):
            raise CoefficientError(
                f"block {i} lies outside its subspace (deviation {stickout:.3e})"
            )
        out = out + w * mu * b
    return out


def frame_operator(family: WeightedSubspaceFamily) -> np.ndarray:
    """Assembled operator S = sum omega_i^2 mu_i P_i."""
    d = family.ambient_dim
    s_mat = np.zeros((d, d))
    for s, w, mu in zip(family.subspaces, family.weights, family.masses):
        if s.rank:
            s_mat = s_mat + (w * w * mu) * s.projector()
    return s_mat


def apply_frame_operator(family: WeightedSubspaceFamily, f) -> np.ndarray:
    """S f computed by block summation, without assembling S."""
    f = as_vector(f)
    out = np.zeros_like(f, dtype=np.result_type(float, f.dtype))
    for s, w, mu in zip(family.subspaces, family.weights, family.masses):
        out = out + (w * w * mu) * s.project(f)
    return out


def frame_sum(family: WeightedSubspaceFamily, f) -> float:
    """Direct quadratic form sum omega_i^2 mu_i ||P_i f||^2."""
    f = as_vector(f)
    total = 0.0
    for s, w, mu in zip(family.subspaces, family.weights, family.masses):
        p = s.project(f)
        total += (w * w * mu) * float(np.vdot(p, p).real)
    return total


def frame_bounds(family: WeightedSubspaceFamily) -> FrameBounds:
    """Optimal bounds: extreme eigenvalues of the frame operator."""
    spec = hilbert.self_adjoint_spectrum(frame_operator(family))
    return FrameBounds(lower=float(spec[0]), upper=float(spec[-1]))


def synthesis_matrix(family: WeightedSubspaceFamily) -> np.ndarray:
    """Dense synthesis map from mass-weighted block coordinates to vectors.

    Stacking the blocks [omega_i sqrt(mu_i) U_i] makes the weighted
    coefficient space isometric to plain euclidean coordinates, so the
    largest singular value of this matrix is the synthesis operator norm.
    """
    cols = []
    for s, w, mu in zip(family.subspaces, family.weights, family.masses):
        if s.rank:
            cols.append(w * np.sqrt(mu) * s.basis)
    if not cols:
        raise ValueError("family has no nonzero subspace")
    return np.concatenate(cols, axis=1)


def verify_characterization(
    family: WeightedSubspaceFamily, tol: float = 1e-9
) -> VerificationReport:
    """Check the operator characterization of the frame property.

    The synthesis norm must equal sqrt(B); analysis is injective and
    synthesis surjective exactly when the lower bound A is positive.
    """
    report = VerificationReport(check_id="synthesis_characterization")
    report.tolerances = {"norm_match": tol}
    bounds = frame_bounds(family)
    t_mat = synthesis_matrix(family)
    svals = np.linalg.svd(t_mat, compute_uv=False)
    t_norm = float(svals[0])
    rank = int(np.count_nonzero(svals > 1e-12 * svals[0])) if svals.size else 0
    d = family.ambient_dim

    norm_gap = abs(t_norm - np.sqrt(max(bounds.upper, 0.0)))
    report.add_hypothesis(
        "synthesis_norm_equals_sqrt_upper", norm_gap <= tol, residual=norm_gap
    )

    lower_positive = bounds.is_frame()
    surjective = rank == d
    # injectivity of analysis is equivalent to positivity of the frame operator
    injective = lower_positive
    report.add_hypothesis(
        "analysis_injective_iff_lower_positive",
        injective == lower_positive,
        detail=f"injective={injective}, lower_positive={lower_positive}",
    )
    report.add_hypothesis(
        "synthesis_surjective_iff_lower_positive",
        surjective == lower_positive,
        detail=f"rank={rank}, ambient_dim={d}",
    )
    report.constants = {
        "lower": bounds.lower,
        "upper": bounds.upper,
        "synthesis_norm": t_norm,
        "synthesis_rank": float(rank),
    }
    if not lower_positive:
        report.notes.append("lower bound vanishes: family is not a frame")
    report.conclude(True)
    return report


@dataclass(frozen=True)
class Reconstruction:
    vector: np.ndarray
    residual: float
    bounds: FrameBounds


def reconstruct(family: WeightedSubspaceFamily, f, rel_tol: float = 1e-10) -> Reconstruction:
    """Invert the frame operator: f ~ sum omega_i^2 mu_i S^{-1} P_i f.

    The square weight omega^2 mu comes from folding the measure into the
    normalization of each subspace atom. Raises NotAFrameError when the
    lower bound is zero within rel_tol of the upper bound.
    """
    f = as_vector(f)
    bounds = frame_bounds(family)
    if not bounds.is_frame(rel_tol):
        raise NotAFrameError(
            f"family is not a frame (bounds {bounds.lower:.3e}, {bounds.upper:.3e})",
            lower=bounds.lower,
            upper=bounds.upper,
        )
    s_mat = frame_operator(family)
    y = apply_frame_operator(family, f)
    fhat = hilbert.solve_positive(s_mat, y)
    residual = float(np.linalg.norm(fhat - f)) / max(float(np.linalg.norm(f)), 1e-300)
    if float(np.linalg.norm(f)) == 0.0:
        residual = float(np.linalg.norm(fhat))
    return Reconstruction(vector=fhat, residual=residual, bounds=bounds)
