"""Linearization and spectral stability of phase-locked states.

At a fixed point of the Hebbian model (with mu = 1) the Jacobian has the
symmetric block form

    J = [ A  B ]      A: phase-phase block (N x N, zero row sums)
        [ B' C ]      B: phase-coupling block (N x E weighted incidence)
                      C = -alpha * I (E x E)

Because C is negative definite, the inertia (counts of positive, zero,
negative eigenvalues) of J splits as inertia(J) = inertia(C) +
inertia(A - B C^-1 B'), and the Schur complement works out analytically to
the Laplacian-like matrix with edge weights cos(2 * (theta_i - theta_j))
scaled by 1/alpha and negated. Stability classification therefore needs
only an N x N eigendecomposition, with the full (N+E) decomposition kept as
a cross-check.

The same reduced matrix, evaluated at doubled angles, is twice the Jacobian
of the fixed-coupling model with strength K = 1/(2 alpha); both index
computations are carried in StabilityReport so the correspondence can be
verified case by case.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, incidence_matrix, laplacian_from_weights
from .model import Generalized, phase_differences

DEFAULT_ZERO_TOL = 1e-9
_SYMMETRY_TOL = 1e-12


class InternalConsistencyError(RuntimeError):
    """The two stability routes disagreed; indicates a numerical breakdown."""


@dataclass(frozen=True)
class Inertia:
    """Eigenvalue sign counts of a symmetric matrix."""

    n_plus: int
    n_zero: int
    n_minus: int
    zero_tol: float = DEFAULT_ZERO_TOL

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_plus, self.n_zero, self.n_minus)

    @property
    def dimension(self) -> int:
        return self.n_plus + self.n_zero + self.n_minus


@dataclass(frozen=True, eq=False)
class BlockJacobian:
    """Symmetric Jacobian blocks of the adaptive model at a fixed point."""

    theta_theta: np.ndarray
    theta_gamma: np.ndarray
    gamma_gamma: np.ndarray

    def __post_init__(self):
        n, e = self.theta_gamma.shape
        if self.theta_theta.shape != (n, n):
            raise ValueError("phase block shape mismatch")
        if self.gamma_gamma.shape != (e, e):
            raise ValueError("coupling block shape mismatch")

    def full(self) -> np.ndarray:
        return np.block([[self.theta_theta, self.theta_gamma],
                         [self.theta_gamma.T, self.gamma_gamma]])


def assemble_jacobian(g: Graph, alpha: float, theta, gamma) -> BlockJacobian:
    """Jacobian blocks at an arbitrary state (mu = 1).

    theta_theta: off-diagonal gamma_k cos(theta_i - theta_j) on edges, with
    diagonal the negated row sums. theta_gamma: incidence columns weighted
    by sin(theta_i - theta_j). gamma_gamma: -alpha * I.
    """
    if not (float(alpha) > 0.0):
        raise ValueError("alpha must be positive")
    theta = np.asarray(theta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if theta.shape != (g.n_vertices,) or gamma.shape != (g.n_edges,):
        raise ValueError("state shape mismatch")
    delta = phase_differences(g, theta)
    a_block = -laplacian_from_weights(g, gamma * np.cos(delta))
    b_block = incidence_matrix(g, np.sin(delta))
    c_block = -float(alpha) * np.eye(g.n_edges)
    return BlockJacobian(a_block, b_block, c_block)


def schur_reduced(g: Graph, alpha: float, theta) -> np.ndarray:
    """Analytic Schur complement A - B C^-1 B' at a fixed point.

    Equals the Laplacian with edge weights cos(2 (theta_i - theta_j)),
    negated and scaled by 1/alpha. Uses C = -alpha I analytically, so no
    linear solve is involved.
    """
    if not (float(alpha) > 0.0):
        raise ValueError("alpha must be positive")
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (g.n_vertices,):
        raise ValueError("phase shape mismatch")
    delta = phase_differences(g, theta)
    return -laplacian_from_weights(g, np.cos(2.0 * delta)) / float(alpha)


def classical_jacobian(g: Graph, coupling_strength: float, theta) -> np.ndarray:
    """Jacobian of the fixed-coupling model: negated Laplacian with edge
    weights K cos(theta_i - theta_j)."""
    if not (float(coupling_strength) > 0.0):
        raise ValueError("coupling strength must be positive")
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (g.n_vertices,):
        raise ValueError("phase shape mismatch")
    delta = phase_differences(g, theta)
    return -laplacian_from_weights(g, float(coupling_strength) * np.cos(delta))


def generalized_reduced_jacobian(g: Graph, alpha: float, theta,
                                 coupling: Generalized) -> np.ndarray:
    """Reduced stability matrix for a generalized potential.

    At the fixed point gamma = -(1/alpha) F(delta) the Schur complement has
    edge weights f(delta)^2 + F(delta) f'(delta); the result is that
    Laplacian scaled by 1/alpha (off-diagonal entries
    -(1/alpha)(f^2 + F f'), diagonal the negated row sums). With F = -cos
    this reproduces schur_reduced.
    """
    if not isinstance(coupling, Generalized):
        raise ValueError("needs a Generalized coupling")
    if not (float(alpha) > 0.0):
        raise ValueError("alpha must be positive")
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (g.n_vertices,):
        raise ValueError("phase shape mismatch")
    delta = phase_differences(g, theta)
    weights = (coupling.force(delta) ** 2
               + coupling.potential(delta) * coupling.force_deriv(delta))
    return laplacian_from_weights(g, weights) / float(alpha)


def _symmetrize_checked(m: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
    if float(np.max(np.abs(m - m.T))) > _SYMMETRY_TOL * scale:
        raise ValueError(f"{what} is not symmetric")
    return 0.5 * (m + m.T)


def inertia_direct(m, zero_tol: float = DEFAULT_ZERO_TOL) -> Inertia:
    """Inertia by full symmetric eigendecomposition.

    Eigenvalues with |lambda| <= zero_tol * max(1, spectral radius) count
    as zero. The input must be symmetric to relative 1e-12; it is
    symmetrized before the decomposition.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not (float(zero_tol) > 0.0):
        raise ValueError("zero_tol must be positive")
    vals = np.linalg.eigvalsh(_symmetrize_checked(m, "matrix"))
    cut = zero_tol * max(1.0, float(np.max(np.abs(vals))) if vals.size else 0.0)
    n_zero = int(np.sum(np.abs(vals) <= cut))
    n_plus = int(np.sum(vals > cut))
    n_minus = int(np.sum(vals < -cut))
    return Inertia(n_plus, n_zero, n_minus, zero_tol)


def inertia_haynsworth(a, b, c, zero_tol: float = DEFAULT_ZERO_TOL) -> Inertia:
    """Inertia of the partitioned symmetric matrix [[A, B], [B', C]] via
    inertia(C) + inertia(A - B C^-1 B').

    C must be numerically invertible: its smallest eigenvalue magnitude has
    to exceed zero_tol * max(1, spectral radius of C).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("A must be square")
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("C must be square")
    if b.shape != (a.shape[0], c.shape[0]):
        raise ValueError("B shape must bridge A and C")
    c_sym = _symmetrize_checked(c, "C block")
    c_vals = np.linalg.eigvalsh(c_sym)
    c_scale = max(1.0, float(np.max(np.abs(c_vals))))
    if float(np.min(np.abs(c_vals))) <= zero_tol * c_scale:
        raise ValueError("C block is numerically singular")
    schur = a - b @ np.linalg.solve(c_sym, b.T)
    schur = 0.5 * (schur + schur.T)
    ic = inertia_direct(c_sym, zero_tol)
    is_ = inertia_direct(schur, zero_tol)
    return Inertia(ic.n_plus + is_.n_plus, ic.n_zero + is_.n_zero,
                   ic.n_minus + is_.n_minus, zero_tol)


@dataclass(frozen=True)
class StabilityReport:
    """Inertia of the reduced and full linearizations at a locked state,
    plus the fixed-coupling comparison at doubled angles."""

    reduced: Inertia
    full: Inertia
    classical: Inertia
    classification: str
    zero_tol: float

    @property
    def unstable_dimension(self) -> int:
        return self.reduced.n_plus


def reduced_residual_check(g: Graph, alpha: float, theta, omega) -> float:
    """Max-norm of the phase equation with couplings eliminated."""
    delta = phase_differences(g, theta)
    r = omega + (np.sin(2.0 * delta) @ g.incidence_pattern.T) / (2.0 * alpha)
    return float(np.max(np.abs(r)))


def classify_stability(g: Graph, alpha: float, theta, omega=None,
                       zero_tol: float = DEFAULT_ZERO_TOL) -> StabilityReport:
    """Classify a locked state from its phases.

    theta must be a fixed point of the reduced phase equation; when omega is
    supplied this is verified (max residual below 1e-8). Classification:
    "stable" for inertia (0, 1, N-1) of the reduced matrix, "degenerate"
    when the kernel is larger than the rotation mode, otherwise "unstable".

    Both the reduced route and the full (N+E) route are computed and their
    inertia must agree through the Schur split; disagreement raises
    InternalConsistencyError.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (g.n_vertices,):
        raise ValueError("phase shape mismatch")
    if omega is not None:
        res = reduced_residual_check(g, alpha, theta, np.asarray(omega, float))
        if res >= 1e-8:
            raise ValueError(
                f"theta is not a fixed point (residual {res:.3e})")
    reduced = inertia_direct(schur_reduced(g, alpha, theta), zero_tol)
    delta = phase_differences(g, theta)
    gamma_star = np.cos(delta) / float(alpha)
    full = inertia_direct(assemble_jacobian(g, alpha, theta, gamma_star).full(),
                          zero_tol)
    e = g.n_edges
    if (full.n_plus != reduced.n_plus or full.n_zero != reduced.n_zero
            or full.n_minus != reduced.n_minus + e):
        raise InternalConsistencyError(
            f"inertia mismatch: full {full.as_tuple()} vs reduced "
            f"{reduced.as_tuple()} + {e} negative")
    classical = inertia_direct(
        classical_jacobian(g, 1.0 / (2.0 * float(alpha)), 2.0 * theta),
        zero_tol)
    if reduced.n_zero > 1:
        classification = "degenerate"
    elif reduced.n_plus >= 1:
        classification = "unstable"
    else:
        classification = "stable"
    return StabilityReport(reduced, full, classical, classification, zero_tol)


def index_equivalence_case(g: Graph, alpha: float, theta,
                           zero_tol: float = DEFAULT_ZERO_TOL) -> dict:
    """Compare the adaptive model's full index with the fixed-coupling index.

    Any phase vector is a locked state for the frequencies it induces, so
    this needs no omega. The expected relations are: equal positive counts,
    equal zero counts, and the full negative count exceeding the
    fixed-coupling one by exactly the number of edges.
    """
    report = classify_stability(g, alpha, theta, zero_tol=zero_tol)
    full = report.full
    classical = report.classical
    ok = (full.n_plus == classical.n_plus
          and full.n_zero == classical.n_zero
          and full.n_minus == classical.n_minus + g.n_edges)
    return {
        "full": full,
        "classical": classical,
        "reduced": report.reduced,
        "classification": report.classification,
        "ok": ok,
    }


STABILITY_CSV_HEADER = ("n_plus_reduced,n_zero_reduced,n_minus_reduced,"
                        "n_plus_full,n_zero_full,n_minus_full,classification")


def stability_csv_row(report: StabilityReport) -> str:
    r, f = report.reduced, report.full
    return (f"{r.n_plus},{r.n_zero},{r.n_minus},"
            f"{f.n_plus},{f.n_zero},{f.n_minus},{report.classification}")
