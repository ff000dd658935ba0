"""Phase-locked states: reduced equation, Newton solver, the half-angle
correspondence with the fixed-coupling model, and plane sweeps.

At a fixed point the couplings are slaved to the phases,
gamma_ij = cos(theta_i - theta_j) / alpha, which eliminates them from the
phase equation:

    r_i(theta) = omega_i + (1/(2 alpha)) sum_{j in N(i)} sin(2 (theta_j - theta_i)) = 0

This is the fixed-point equation of the classical model with coupling
strength K = 1/(2 alpha) evaluated at doubled angles. Consequently
theta* solving the classical model corresponds to the adaptive locked state
with phases theta*/2 and gamma_ij = cos((theta*_i - theta*_j)/2)/alpha, and
the two models admit exactly the same frequency vectors.

All solvers work in the gauge sum(theta) = 0; the free global rotation is
removed by a bordered Newton system rather than by pinning one phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import model, spectral
from .graph import Graph


@dataclass(frozen=True)
class PlanePoint:
    """Coordinates in the mean-zero frequency plane of a 3-oscillator system."""

    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("plane coordinates must be finite")


PLANE_BASIS_A = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
PLANE_BASIS_B = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)


def frequency_from_plane(point: PlanePoint) -> np.ndarray:
    """Frequencies a * (1,-1,0)/sqrt(2) + b * (1,1,-2)/sqrt(6); mean zero."""
    return point.a * PLANE_BASIS_A + point.b * PLANE_BASIS_B


def plane_from_frequency(omega) -> PlanePoint:
    """Orthogonal projection of a mean-zero 3-vector onto the plane basis."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (3,):
        raise ValueError("plane coordinates need a 3-vector")
    return PlanePoint(float(omega @ PLANE_BASIS_A), float(omega @ PLANE_BASIS_B))


def reduced_residual(theta, omega, alpha: float, g: Graph) -> np.ndarray:
    """Residual of the phase equation with couplings eliminated.

    Components always sum to zero, so the residual lives in the mean-zero
    subspace whenever omega does.
    """
    if not (float(alpha) > 0.0):
        raise ValueError("alpha must be positive")
    theta = np.asarray(theta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if theta.shape[-1] != g.n_vertices or omega.shape[-1] != g.n_vertices:
        raise ValueError("shape mismatch with graph")
    delta = model.phase_differences(g, theta)
    return omega + (np.sin(2.0 * delta) @ g.incidence_pattern.T) / (2.0 * alpha)


def gamma_at_fixed_point(theta, alpha: float, g: Graph) -> np.ndarray:
    """Couplings slaved to the phases: cos(theta_i - theta_j) / alpha."""
    if not (float(alpha) > 0.0):
        raise ValueError("alpha must be positive")
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != g.n_vertices:
        raise ValueError("shape mismatch with graph")
    return np.cos(model.phase_differences(g, theta)) / float(alpha)


def induced_frequencies(theta, alpha: float, g: Graph) -> np.ndarray:
    """The frequency vector for which theta is a locked state (mean zero)."""
    theta = np.asarray(theta, dtype=float)
    delta = model.phase_differences(g, theta)
    return -(np.sin(2.0 * delta) @ g.incidence_pattern.T) / (2.0 * float(alpha))


def frequency_within_degree_bound(omega, alpha: float, g: Graph) -> bool:
    """Necessary feasibility condition |omega_i| <= deg(i) / (2 alpha)."""
    omega = np.asarray(omega, dtype=float)
    bound = g.degrees / (2.0 * float(alpha))
    return bool(np.all(np.abs(omega) <= bound * (1.0 + 1e-9) + 1e-30))


@dataclass(frozen=True, eq=False)
class FixedPoint:
    """A verified locked state of the adaptive model.

    Invariants enforced here: phases sum to zero (gauge), couplings lie in
    [-1/alpha, 1/alpha], and the full-state residual is below 1e-10.
    """

    theta: np.ndarray
    gamma: np.ndarray
    omega: np.ndarray
    alpha: float
    residual: float

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        gamma = np.asarray(self.gamma, dtype=float)
        omega = np.asarray(self.omega, dtype=float)
        scale = max(1.0, float(np.max(np.abs(theta))))
        if abs(float(theta.sum())) > 1e-9 * scale * theta.size:
            raise ValueError("phases must sum to zero")
        bound = (1.0 + 1e-12) / float(self.alpha)
        if float(np.max(np.abs(gamma))) > bound:
            raise ValueError("couplings exceed 1/alpha")
        if not (float(self.residual) < 1e-10):
            raise ValueError("residual too large for a fixed point")
        for name, arr in (("theta", theta), ("gamma", gamma), ("omega", omega)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def as_state(self) -> model.HebbState:
        return model.HebbState(self.theta, self.gamma)


@dataclass(frozen=True, eq=False)
class NewtonResult:
    """Outcome of a gauge-fixed Newton solve.

    status is "converged", "no-convergence", or "degenerate" (the bordered
    system lost rank beyond the rotation gauge). theta is the final iterate
    and residual its max-norm reduced residual. fixed_point is populated
    only on convergence of the adaptive solve.
    """

    status: str
    theta: np.ndarray
    residual: float
    iterations: int
    fixed_point: FixedPoint | None = None

    @property
    def converged(self) -> bool:
        return self.status == "converged"


MAX_NEWTON_ITER = 50
NEWTON_TOL = 1e-12
_STEP_CAP = math.pi


def _check_mean_zero(omega: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(omega))))
    if abs(float(omega.sum())) > 1e-10 * scale * omega.size:
        raise ValueError("omega must have zero mean")


def _newton_gauge(residual_fn, jacobian_fn, guess: np.ndarray,
                  max_iter: int, tol: float):
    """Newton iteration on the mean-zero gauge slice.

    The linear update solves the bordered system [[J, 1], [1', 0]] so steps
    stay mean-zero while the rotation direction is pinned. Steps are capped
    at pi in max-norm to keep infeasible problems from running away.
    """
    n = guess.size
    theta = guess - guess.mean()
    bordered = np.zeros((n + 1, n + 1))
    bordered[:n, n] = 1.0
    bordered[n, :n] = 1.0
    rhs = np.zeros(n + 1)
    for iteration in range(max_iter + 1):
        r = residual_fn(theta)
        res_norm = float(np.max(np.abs(r)))
        if res_norm < tol:
            return "converged", theta, res_norm, iteration
        if iteration == max_iter:
            break
        bordered[:n, :n] = jacobian_fn(theta)
        rhs[:n] = -r
        try:
            sol = np.linalg.solve(bordered, rhs)
        except np.linalg.LinAlgError:
            return "degenerate", theta, res_norm, iteration
        step = sol[:n]
        if not np.all(np.isfinite(step)) or float(np.max(np.abs(step))) > 1e8:
            return "degenerate", theta, res_norm, iteration
        cap = float(np.max(np.abs(step)))
        if cap > _STEP_CAP:
            step = step * (_STEP_CAP / cap)
        theta = theta + step
        theta = theta - theta.mean()
    return "no-convergence", theta, res_norm, max_iter


def _build_fixed_point(theta: np.ndarray, omega: np.ndarray,
                       alpha: float, g: Graph) -> FixedPoint:
    theta = theta - theta.mean()
    gamma = gamma_at_fixed_point(theta, alpha, g)
    full_residual = float(model.residual_arrays(
        g, model.Sine(), omega, alpha, 1.0, theta, gamma))
    return FixedPoint(theta, gamma, omega, alpha, full_residual)


def solve_fixed_point(omega, alpha: float, g: Graph, initial_guess=None,
                      max_iter: int = MAX_NEWTON_ITER,
                      tol: float = NEWTON_TOL) -> NewtonResult:
    """Newton solve of the reduced phase equation for the adaptive model.

    The Jacobian of the reduced residual is exactly the reduced stability
    matrix, so each iteration reuses spectral.schur_reduced. The graph must
    be connected and omega mean-zero.
    """
    if not (float(alpha) > 0.0):
        raise ValueError("alpha must be positive")
    if not g.is_connected():
        raise ValueError("graph must be connected")
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (g.n_vertices,):
        raise ValueError("omega shape mismatch with graph")
    if not np.all(np.isfinite(omega)):
        raise ValueError("omega must be finite")
    _check_mean_zero(omega)
    guess = (np.zeros(g.n_vertices) if initial_guess is None
             else np.asarray(initial_guess, dtype=float).copy())
    if guess.shape != (g.n_vertices,):
        raise ValueError("initial guess shape mismatch")
    status, theta, res_norm, iters = _newton_gauge(
        lambda th: reduced_residual(th, omega, alpha, g),
        lambda th: spectral.schur_reduced(g, alpha, th),
        guess, max_iter, tol)
    fp = None
    if status == "converged":
        fp = _build_fixed_point(theta, omega, alpha, g)
    return NewtonResult(status, theta, res_norm, iters, fp)


def classical_residual(theta, omega, coupling_strength: float,
                       g: Graph) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    delta = model.phase_differences(g, theta)
    return omega + coupling_strength * (np.sin(delta) @ g.incidence_pattern.T)


def solve_classical_fixed_point(omega, coupling_strength: float, g: Graph,
                                initial_guess=None,
                                max_iter: int = MAX_NEWTON_ITER,
                                tol: float = NEWTON_TOL) -> NewtonResult:
    """Newton solve of the fixed-coupling model in the same gauge."""
    if not (float(coupling_strength) > 0.0):
        raise ValueError("coupling strength must be positive")
    if not g.is_connected():
        raise ValueError("graph must be connected")
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (g.n_vertices,):
        raise ValueError("omega shape mismatch with graph")
    _check_mean_zero(omega)
    guess = (np.zeros(g.n_vertices) if initial_guess is None
             else np.asarray(initial_guess, dtype=float).copy())
    if guess.shape != (g.n_vertices,):
        raise ValueError("initial guess shape mismatch")
    status, theta, res_norm, iters = _newton_gauge(
        lambda th: classical_residual(th, omega, coupling_strength, g),
        lambda th: spectral.classical_jacobian(g, coupling_strength, th),
        guess, max_iter, tol)
    return NewtonResult(status, theta, res_norm, iters, None)


def lift_to_hebbian(theta_classical, alpha: float, g: Graph,
                    omega=None) -> FixedPoint:
    """Half-angle correspondence: classical fixed point to adaptive one.

    The adaptive locked state has phases theta*/2 (gauge-normalized) and
    couplings cos((theta*_i - theta*_j)/2) / alpha. When omega is supplied,
    theta_classical is verified to solve the fixed-coupling model with
    K = 1/(2 alpha) for that omega; otherwise the induced frequency vector
    is used, for which the premise holds identically.
    """
    if not (float(alpha) > 0.0):
        raise ValueError("alpha must be positive")
    theta_classical = np.asarray(theta_classical, dtype=float)
    if theta_classical.shape != (g.n_vertices,):
        raise ValueError("phase shape mismatch with graph")
    if not np.all(np.isfinite(theta_classical)):
        raise ValueError("phases must be finite")
    k = 1.0 / (2.0 * float(alpha))
    delta = model.phase_differences(g, theta_classical)
    induced = -(k * (np.sin(delta) @ g.incidence_pattern.T))
    if omega is None:
        omega_used = induced
    else:
        omega_used = np.asarray(omega, dtype=float)
        res = float(np.max(np.abs(classical_residual(
            theta_classical, omega_used, k, g))))
        if res >= 1e-10:
            raise ValueError(
                f"not a classical fixed point (residual {res:.3e})")
    phases = 0.5 * theta_classical
    phases = phases - phases.mean()
    gamma = np.cos(0.5 * delta) / float(alpha)
    full_residual = float(model.residual_arrays(
        g, model.Sine(), omega_used, alpha, 1.0, phases, gamma))
    return FixedPoint(phases, gamma, omega_used, alpha, full_residual)


def phase_orbit_distance(theta_a, theta_b) -> float:
    """Max-norm distance between phase vectors modulo a global rotation.

    The aligning constant is the circular mean of the componentwise
    difference; residual differences are wrapped to (-pi, pi].
    """
    a = np.asarray(theta_a, dtype=float)
    b = np.asarray(theta_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("phase vectors must have equal shape")
    z = b - a
    shift = math.atan2(float(np.mean(np.sin(z))), float(np.mean(np.cos(z))))
    wrapped = np.mod(z - shift + math.pi, 2.0 * math.pi) - math.pi
    return float(np.max(np.abs(wrapped)))


@dataclass(frozen=True)
class PlaneGrid:
    """Rectangular lattice of PlanePoints."""

    a_values: tuple[float, ...]
    b_values: tuple[float, ...]

    @classmethod
    def from_ranges(cls, a_lo: float, a_hi: float, na: int,
                    b_lo: float, b_hi: float, nb: int) -> "PlaneGrid":
        if na < 1 or nb < 1:
            raise ValueError("grid needs at least one point per axis")
        return cls(tuple(float(v) for v in np.linspace(a_lo, a_hi, na)),
                   tuple(float(v) for v in np.linspace(b_lo, b_hi, nb)))

    @cached_property
    def shape(self) -> tuple[int, int]:
        return (len(self.a_values), len(self.b_values))

    def points(self):
        """Output order: b outer, a inner."""
        for b in self.b_values:
            for a in self.a_values:
                yield PlanePoint(a, b)


@dataclass(frozen=True, eq=False)
class SweepRecord:
    """One grid point of a feasibility sweep.

    Inertia counts are -1 and newton_residual is NaN when no locked state
    was found. branches_found counts distinct solutions: at most 1 under
    continuation, the census size under multi-start.
    """

    point: PlanePoint
    feasible: bool
    stable: bool
    n_plus: int
    n_zero: int
    n_minus: int
    branches_found: int
    newton_residual: float


SWEEP_CSV_HEADER = ("a,b,feasible,stable,n_plus,n_zero,n_minus,"
                    "branches_found,newton_residual")


def sweep_csv_row(rec: SweepRecord) -> str:
    return (f"{float(rec.point.a)!r},{float(rec.point.b)!r},{int(rec.feasible)},"
            f"{int(rec.stable)},{rec.n_plus},{rec.n_zero},{rec.n_minus},"
            f"{rec.branches_found},{float(rec.newton_residual)!r}")


def write_sweep_csv(records, path) -> None:
    lines = [SWEEP_CSV_HEADER]
    lines += [sweep_csv_row(rec) for rec in records]
    from pathlib import Path
    Path(path).write_text("\n".join(lines) + "\n")


def _spiral_order(grid: PlaneGrid):
    """Grid indices ordered by rings around the point nearest the origin."""
    a_vals = np.array(grid.a_values)
    b_vals = np.array(grid.b_values)
    ic = int(np.argmin(np.abs(a_vals)))
    jc = int(np.argmin(np.abs(b_vals)))
    indices = [(ia, ib) for ia in range(len(a_vals)) for ib in range(len(b_vals))]

    def key(idx):
        ia, ib = idx
        ring = max(abs(ia - ic), abs(ib - jc))
        angle = math.atan2(ib - jc, ia - ic) % (2.0 * math.pi)
        return (ring, angle, ia, ib)

    return sorted(indices, key=key), (ic, jc)


def _neighbor_seeds(ia, ib, center, solved):
    """Already-solved neighbors, nearest to the center first."""
    ic, jc = center
    towards = (ia - (1 if ia > ic else -1 if ia < ic else 0),
               ib - (1 if ib > jc else -1 if ib < jc else 0))
    candidates = [towards]
    for da in (-1, 0, 1):
        for db in (-1, 0, 1):
            if (da, db) != (0, 0):
                candidates.append((ia + da, ib + db))
    seeds = []
    for cand in candidates:
        if cand in solved and solved[cand] is not None:
            seeds.append(solved[cand])
    return seeds


def feasibility_sweep(grid: PlaneGrid, alpha: float, g: Graph,
                      strategy: str = "continuation", n_starts: int = 32,
                      distinct_tol: float = 1e-6, seed: int = 0):
    """Locked-state existence and stability over a frequency-plane lattice.

    Points are processed in a spiral from the origin outward so each Newton
    solve can be seeded from a solved neighbor; rows are returned in grid
    order (b outer, a inner) regardless. Points violating the per-vertex
    frequency bound are marked infeasible without running Newton.

    strategy "continuation" reports at most one branch per point;
    "multi-start" additionally runs n_starts random seeds per point and
    reports the number of distinct solutions (per-point seeded, so the
    census does not depend on evaluation order).
    """
    if strategy not in ("continuation", "multi-start"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if g.n_vertices != 3:
        raise ValueError("plane sweeps are defined for 3-oscillator systems")
    order, center = _spiral_order(grid)
    solved: dict[tuple[int, int], np.ndarray | None] = {}
    records: dict[tuple[int, int], SweepRecord] = {}
    origin_solution: np.ndarray | None = None
    for ia, ib in order:
        point = PlanePoint(grid.a_values[ia], grid.b_values[ib])
        omega = frequency_from_plane(point)
        if not frequency_within_degree_bound(omega, alpha, g):
            solved[(ia, ib)] = None
            records[(ia, ib)] = SweepRecord(point, False, False, -1, -1, -1,
                                            0, float("nan"))
            continue
        seeds = _neighbor_seeds(ia, ib, center, solved)
        if origin_solution is not None:
            seeds.append(origin_solution)
        seeds.append(np.zeros(3))
        result = None
        for seed_theta in seeds:
            result = solve_fixed_point(omega, alpha, g, seed_theta)
            if result.converged:
                break
        if result is not None and result.converged:
            theta = result.fixed_point.theta
            solved[(ia, ib)] = theta
            if (ia, ib) == center:
                origin_solution = theta
            report = spectral.classify_stability(g, alpha, theta, omega)
            records[(ia, ib)] = SweepRecord(
                point, True, report.classification == "stable",
                report.reduced.n_plus, report.reduced.n_zero,
                report.reduced.n_minus, 1, result.fixed_point.residual)
        else:
            solved[(ia, ib)] = None
            records[(ia, ib)] = SweepRecord(point, False, False, -1, -1, -1,
                                            0, float("nan"))
    if strategy == "multi-start":
        records = {idx: _with_branch_census(rec, idx, alpha, g, n_starts,
                                            distinct_tol, seed)
                   for idx, rec in records.items()}
    return [records[(ia, ib)] for ib in range(len(grid.b_values))
            for ia in range(len(grid.a_values))]


def _with_branch_census(rec: SweepRecord, idx, alpha: float, g: Graph,
                        n_starts: int, distinct_tol: float,
                        seed: int) -> SweepRecord:
    omega = frequency_from_plane(rec.point)
    if not frequency_within_degree_bound(omega, alpha, g):
        return rec
    rng = np.random.default_rng((seed, idx[0], idx[1]))
    found: list[np.ndarray] = []
    for _ in range(n_starts):
        guess = rng.uniform(-math.pi, math.pi, g.n_vertices)
        result = solve_fixed_point(omega, alpha, g, guess - guess.mean())
        if result.converged:
            theta = result.fixed_point.theta
            if all(phase_orbit_distance(theta, other) > distinct_tol
                   for other in found):
                found.append(theta)
    return SweepRecord(rec.point, rec.feasible, rec.stable, rec.n_plus,
                       rec.n_zero, rec.n_minus, len(found),
                       rec.newton_residual)


def _stable_here(omega, alpha: float, g: Graph, seed_theta, kind: str):
    """Predicate for boundary bisection: a stable locked state exists."""
    if kind == "hebbian":
        result = solve_fixed_point(omega, alpha, g, seed_theta)
        if not result.converged:
            return False, None
        report = spectral.classify_stability(g, alpha,
                                             result.fixed_point.theta, omega)
        return report.classification == "stable", result.fixed_point.theta
    k = 1.0 / (2.0 * float(alpha))
    result = solve_classical_fixed_point(omega, k, g, seed_theta)
    if not result.converged:
        return False, None
    jac = spectral.classical_jacobian(g, k, result.theta)
    inertia = spectral.inertia_direct(jac)
    return (inertia.n_plus == 0 and inertia.n_zero == 1), result.theta


def critical_radius(direction: PlanePoint, alpha: float, g: Graph,
                    kind: str = "hebbian", coarse_step: float = 0.1,
                    tol: float = 1e-4) -> float:
    """Distance along a plane ray to the edge of the stable locked region.

    Walks outward in coarse steps with Newton continuation until the stable
    state disappears, then bisects the bracket to the requested tolerance.
    kind selects the adaptive model or the fixed-coupling comparison with
    K = 1/(2 alpha).
    """
    if kind not in ("hebbian", "classical"):
        raise ValueError(f"unknown kind {kind!r}")
    if not (tol > 0.0 and coarse_step > 0.0):
        raise ValueError("tolerances must be positive")
    norm = math.hypot(direction.a, direction.b)
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    unit = PlanePoint(direction.a / norm, direction.b / norm)
    omega_hat = frequency_from_plane(unit)
    bound = g.degrees / (2.0 * float(alpha))
    with np.errstate(divide="ignore"):
        caps = np.where(np.abs(omega_hat) > 1e-15,
                        bound / np.maximum(np.abs(omega_hat), 1e-300),
                        np.inf)
    r_cert = float(np.min(caps))
    ok, theta = _stable_here(np.zeros(g.n_vertices), alpha, g,
                             np.zeros(g.n_vertices), kind)
    if not ok:
        raise RuntimeError("no stable state at the origin")
    lo, seed_theta = 0.0, theta
    hi = None
    r = coarse_step
    while hi is None:
        if r > r_cert * (1.0 + 1e-9) + coarse_step:
            hi = r
            break
        omega = r * np.asarray(frequency_from_plane(unit))
        ok, theta = _stable_here(omega, alpha, g, seed_theta, kind)
        if ok:
            lo, seed_theta = r, theta
            r += coarse_step
        else:
            hi = r
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        omega = mid * np.asarray(frequency_from_plane(unit))
        ok, theta = _stable_here(omega, alpha, g, seed_theta, kind)
        if ok:
            lo, seed_theta = mid, theta
        else:
            hi = mid
    return 0.5 * (lo + hi)
