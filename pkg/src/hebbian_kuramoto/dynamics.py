"""Deterministic time integration and phase-lock diagnostics.

The default integrator is classic fixed-step RK4, which makes runs
bit-reproducible: identical inputs give identical trajectories. An adaptive
RK45 (Dormand-Prince via scipy) is available for accuracy checks; it is
deterministic as well but its sample times depend on the step controller.

Trajectories record sampled states together with three per-sample
diagnostics: phase diameter, max-norm residual of the vector field, and the
gradient-flow energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .graph import Graph
from .model import (
    Coupling,
    HebbState,
    Sine,
    SystemParams,
    check_state,
    diameter_arrays,
    energy_arrays,
    field_arrays,
    residual_arrays,
)

DEFAULT_STEP = 1e-2
DEFAULT_T_END = 75.0
DEFAULT_LOCK_THRESHOLD = 1e-4


class IntegrationDivergedError(RuntimeError):
    """Raised when a state stops being finite; carries the last good sample."""

    def __init__(self, time: float, theta: np.ndarray, gamma: np.ndarray):
        super().__init__(f"integration diverged at t = {time:.6g}")
        self.time = time
        self.theta = theta
        self.gamma = gamma


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration settings.

    method "rk4" is fixed-step with the given step; "rk45" is adaptive with
    tolerances atol and rtol. sample_every records every k-th step (the
    initial and final states are always recorded). t_end = 0 is allowed and
    produces a single-sample trajectory.
    """

    t_end: float
    method: str = "rk4"
    step: float = DEFAULT_STEP
    sample_every: int = 1
    atol: float = 1e-9
    rtol: float = 1e-7

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown method {self.method!r}")
        if not (float(self.t_end) >= 0.0):
            raise ValueError("t_end must be nonnegative")
        if not (float(self.step) > 0.0):
            raise ValueError("step must be positive")
        if int(self.sample_every) < 1:
            raise ValueError("sample_every must be a positive integer")
        if not (float(self.atol) > 0.0 and float(self.rtol) > 0.0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled run: times (S,), thetas (S, N), gammas (S, E), diagnostics (S,)."""

    times: np.ndarray
    thetas: np.ndarray
    gammas: np.ndarray
    diameters: np.ndarray
    residuals: np.ndarray
    energies: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("times must be a nonempty 1-D array")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        s = times.size
        for name in ("thetas", "gammas", "diameters", "residuals", "energies"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape[0] != s:
                raise ValueError(f"{name} must have {s} samples")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "times", times)

    @property
    def n_samples(self) -> int:
        return self.times.size

    def state_at(self, k: int) -> HebbState:
        return HebbState(self.thetas[k], self.gammas[k])


def _rk4_path(g: Graph, coupling: Coupling, omega, alpha: float, mu: float,
              theta0, gamma0, t_end: float, step: float, sample_every: int,
              raise_on_nonfinite: bool = True):
    """Fixed-step RK4 with periodic sampling; supports batched states.

    Returns (times, thetas, gammas) with a leading sample axis. The final
    step is shortened so the last sample lands exactly on t_end.
    """
    theta = np.array(theta0, dtype=float)
    gamma = np.array(gamma0, dtype=float)
    n_steps = 0 if t_end <= 0.0 else int(math.ceil(t_end / step - 1e-12))
    times = [0.0]
    thetas = [theta.copy()]
    gammas = [gamma.copy()]
    with np.errstate(invalid="ignore", over="ignore"):
        for s in range(1, n_steps + 1):
            t_prev = (s - 1) * step
            h = step if s < n_steps else t_end - t_prev
            k1t, k1g = field_arrays(g, coupling, omega, alpha, mu, theta, gamma)
            k2t, k2g = field_arrays(g, coupling, omega, alpha, mu,
                                    theta + 0.5 * h * k1t, gamma + 0.5 * h * k1g)
            k3t, k3g = field_arrays(g, coupling, omega, alpha, mu,
                                    theta + 0.5 * h * k2t, gamma + 0.5 * h * k2g)
            k4t, k4g = field_arrays(g, coupling, omega, alpha, mu,
                                    theta + h * k3t, gamma + h * k3g)
            new_theta = theta + (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
            new_gamma = gamma + (h / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
            if raise_on_nonfinite and not (
                    np.all(np.isfinite(new_theta))
                    and np.all(np.isfinite(new_gamma))):
                raise IntegrationDivergedError(t_prev, theta, gamma)
            theta, gamma = new_theta, new_gamma
            if s % sample_every == 0 or s == n_steps:
                times.append(t_end if s == n_steps else s * step)
                thetas.append(theta.copy())
                gammas.append(gamma.copy())
    return np.array(times), np.stack(thetas), np.stack(gammas)


def _rk45_path(g: Graph, params: SystemParams, state0: HebbState,
               cfg: IntegratorConfig):
    from scipy.integrate import RK45

    n = g.n_vertices

    def rhs(_t, y):
        dtheta, dgamma = field_arrays(
            g, params.coupling, params.omega, params.alpha, params.mu,
            y[:n], y[n:])
        return np.concatenate([dtheta, dgamma])

    y0 = state0.as_vector()
    times = [0.0]
    samples = [y0.copy()]
    if cfg.t_end > 0.0:
        solver = RK45(rhs, 0.0, y0, cfg.t_end, rtol=cfg.rtol, atol=cfg.atol)
        accepted = 0
        while solver.status == "running":
            prev_t, prev_y = solver.t, solver.y.copy()
            solver.step()
            if solver.status == "failed" or not np.all(np.isfinite(solver.y)):
                raise IntegrationDivergedError(prev_t, prev_y[:n], prev_y[n:])
            accepted += 1
            if accepted % cfg.sample_every == 0 or solver.status == "finished":
                times.append(solver.t)
                samples.append(solver.y.copy())
    times = np.array(times)
    samples = np.stack(samples)
    return times, samples[:, :n], samples[:, n:]


def integrate(g: Graph, params: SystemParams, state0: HebbState,
              cfg: IntegratorConfig) -> Trajectory:
    """Integrate the adaptive model matching params.coupling from state0."""
    check_state(g, state0)
    if params.n_vertices != g.n_vertices:
        raise ValueError("params and graph disagree on vertex count")
    if cfg.method == "rk4":
        times, thetas, gammas = _rk4_path(
            g, params.coupling, params.omega, params.alpha, params.mu,
            state0.theta, state0.gamma, cfg.t_end, cfg.step, cfg.sample_every)
    else:
        times, thetas, gammas = _rk45_path(g, params, state0, cfg)
    residuals = residual_arrays(g, params.coupling, params.omega, params.alpha,
                                params.mu, thetas, gammas)
    energies = energy_arrays(g, params.coupling, params.omega, params.alpha,
                             params.mu, thetas, gammas)
    return Trajectory(times, thetas, gammas, diameter_arrays(thetas),
                      residuals, energies)


def rk4_terminal(g: Graph, omega, alpha: float, mu: float, theta0, gamma0,
                 t_end: float, step: float = DEFAULT_STEP,
                 coupling: Coupling = Sine()):
    """Terminal state only, batched over any leading axes of theta0/gamma0.

    Non-finite values are not raised here; they propagate as NaN so that a
    scan over many initial conditions can record per-point failures.
    """
    times, thetas, gammas = _rk4_path(
        g, coupling, omega, alpha, mu, theta0, gamma0, t_end, step,
        sample_every=1 << 62, raise_on_nonfinite=False)
    return thetas[-1], gammas[-1]


@dataclass(frozen=True, eq=False)
class LockReport:
    locked: bool
    terminal_residual: float
    terminal_state: HebbState
    threshold: float


def detect_phase_lock(g: Graph, params: SystemParams, state0: HebbState,
                      t_end: float = DEFAULT_T_END,
                      threshold: float = DEFAULT_LOCK_THRESHOLD,
                      cfg: IntegratorConfig | None = None) -> LockReport:
    """Integrate to t_end and test the terminal residual against threshold."""
    if not (threshold > 0.0):
        raise ValueError("threshold must be positive")
    if cfg is None:
        cfg = IntegratorConfig(t_end=t_end, sample_every=1 << 62)
    traj = integrate(g, params, state0, cfg)
    terminal = traj.state_at(traj.n_samples - 1)
    residual = float(traj.residuals[-1])
    return LockReport(locked=bool(residual < threshold),
                      terminal_residual=residual,
                      terminal_state=terminal,
                      threshold=threshold)


@dataclass(frozen=True, eq=False)
class SynchronyReport:
    """Tail-window statistics: per-pair phase difference variation and
    per-edge coupling peak-to-peak amplitude and mean."""

    pairs: tuple[tuple[int, int], ...]
    pair_variation: np.ndarray
    edge_peak_to_peak: np.ndarray
    edge_mean: np.ndarray


def synchrony_report(traj: Trajectory,
                     tail_fraction: float = 1.0 / 3.0) -> SynchronyReport:
    """Summarize the trailing window of a trajectory.

    For every vertex pair, the peak-to-peak variation of theta_i - theta_j
    over the window; for every edge, the peak-to-peak amplitude and mean of
    gamma. The window covers the final tail_fraction of the time span but
    always includes at least two samples.
    """
    if traj.n_samples < 2:
        raise ValueError("trajectory must have at least 2 samples")
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError("tail_fraction must lie in (0, 1]")
    span = traj.times[-1] - traj.times[0]
    t_cut = traj.times[-1] - tail_fraction * span
    start = int(np.searchsorted(traj.times, t_cut, side="left"))
    start = min(start, traj.n_samples - 2)
    thetas = traj.thetas[start:]
    gammas = traj.gammas[start:]
    n = thetas.shape[1]
    pairs = tuple(combinations(range(n), 2))
    variation = np.empty(len(pairs))
    for k, (i, j) in enumerate(pairs):
        diff = thetas[:, i] - thetas[:, j]
        variation[k] = diff.max() - diff.min()
    return SynchronyReport(
        pairs=pairs,
        pair_variation=variation,
        edge_peak_to_peak=gammas.max(axis=0) - gammas.min(axis=0),
        edge_mean=gammas.mean(axis=0),
    )


def trajectory_header(n_vertices: int, n_edges: int) -> str:
    cols = ["t"]
    cols += [f"theta_{i}" for i in range(n_vertices)]
    cols += [f"gamma_{k}" for k in range(n_edges)]
    cols += ["diameter", "residual", "energy"]
    return ",".join(cols)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Trajectory CSV: t, theta_*, gamma_*, diameter, residual, energy.

    Values are written with round-trip precision so a read back is exact.
    """
    n = traj.thetas.shape[1]
    e = traj.gammas.shape[1]
    lines = [trajectory_header(n, e)]
    for k in range(traj.n_samples):
        row = [traj.times[k], *traj.thetas[k], *traj.gammas[k],
               traj.diameters[k], traj.residuals[k], traj.energies[k]]
        lines.append(",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trajectory_csv(path) -> Trajectory:
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    n = sum(1 for c in header if c.startswith("theta_"))
    e = sum(1 for c in header if c.startswith("gamma_"))
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError("malformed trajectory CSV")
    return Trajectory(
        times=data[:, 0],
        thetas=data[:, 1:1 + n],
        gammas=data[:, 1 + n:1 + n + e],
        diameters=data[:, 1 + n + e],
        residuals=data[:, 2 + n + e],
        energies=data[:, 3 + n + e],
    )
