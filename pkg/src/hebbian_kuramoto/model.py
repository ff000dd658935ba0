"""Oscillator models: fixed coupling, Hebbian adaptive coupling, and a
generalized adaptive coupling built from an interaction potential.

Classical model (fixed coupling strength K on a graph):

    dtheta_i/dt = omega_i + K * sum_{j in N(i)} sin(theta_j - theta_i)

Hebbian adaptive model (one coupling variable gamma_ij per edge):

    dtheta_i/dt = omega_i + sum_{j in N(i)} gamma_ij * sin(theta_j - theta_i)
    dgamma_ij/dt = mu * cos(theta_i - theta_j) - alpha * gamma_ij

Generalized adaptive model, for an even 2*pi-periodic potential F with
f = F' and f' its derivative:

    dtheta_i/dt = omega_i - sum_{j in N(i)} gamma_ij * f(theta_i - theta_j)
    dgamma_ij/dt = -mu * F(theta_i - theta_j) - alpha * gamma_ij

F = -cos reproduces the Hebbian model exactly.

The adaptive models are gradient flows: with

    H = -sum_i theta_i omega_i + sum_edges gamma_ij F(theta_i - theta_j)
        + (alpha / (2 mu)) sum_edges gamma_ij^2

(F = -cos in the Hebbian case) the dynamics are dtheta/dt = -dH/dtheta and
dgamma/dt = -mu * dH/dgamma, so H is non-increasing along trajectories.

Array-level helpers (suffix `_arrays`) accept batched states: theta with
shape (..., n_vertices) and gamma with shape (..., n_edges), with omega
broadcastable against theta. The dataclass wrappers take single states.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .graph import Graph


@dataclass(frozen=True)
class Sine:
    """Standard sine interaction; selects the Hebbian adaptive model."""


@dataclass(frozen=True, eq=False)
class Generalized:
    """Interaction potential triple (F, f, f') for the generalized model.

    potential: even, 2*pi-periodic F.
    force: f = F'.
    force_deriv: derivative of f.

    Consistency of the triple is spot-checked numerically when the coupling
    is attached to SystemParams.
    """

    potential: Callable[[np.ndarray], np.ndarray]
    force: Callable[[np.ndarray], np.ndarray]
    force_deriv: Callable[[np.ndarray], np.ndarray]


Coupling = Union[Sine, Generalized]

_DERIV_GRID_SIZE = 32
_DERIV_STEP = 1e-6
_DERIV_TOL = 1e-6


def _check_derivative(fn, claimed_deriv, label: str) -> None:
    # Central differences on a fixed grid; tolerance is relative to the
    # function scale so large-amplitude potentials are not rejected for
    # roundoff alone.
    x = np.linspace(0.0, 2.0 * np.pi, _DERIV_GRID_SIZE, endpoint=False) + 0.1
    numeric = (fn(x + _DERIV_STEP) - fn(x - _DERIV_STEP)) / (2.0 * _DERIV_STEP)
    claimed = claimed_deriv(x)
    scale = max(1.0, float(np.max(np.abs(claimed))))
    if not np.all(np.abs(numeric - claimed) <= _DERIV_TOL * scale):
        raise ValueError(f"coupling triple inconsistent: {label}")


@dataclass(frozen=True, eq=False)
class SystemParams:
    """Natural frequencies and model constants.

    omega is shifted into the co-rotating frame (mean removed) by the
    constructor; the removed mean is kept in omega_mean. alpha and mu must
    be positive. A Generalized coupling is validated here: f must match F'
    and force_deriv must match f' by central differences.
    """

    omega: np.ndarray
    alpha: float
    mu: float = 1.0
    coupling: Coupling = Sine()
    omega_mean: float = field(init=False, default=0.0)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        if omega.ndim != 1 or omega.size < 1:
            raise ValueError("omega must be a nonempty 1-D vector")
        if not np.all(np.isfinite(omega)):
            raise ValueError("omega must be finite")
        if not (float(self.alpha) > 0.0):
            raise ValueError("alpha must be positive")
        if not (float(self.mu) > 0.0):
            raise ValueError("mu must be positive")
        mean = float(omega.mean())
        shifted = omega - mean
        shifted.flags.writeable = False
        object.__setattr__(self, "omega", shifted)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "omega_mean", mean)
        if isinstance(self.coupling, Generalized):
            _check_derivative(self.coupling.potential, self.coupling.force,
                              "force must be the derivative of potential")
            _check_derivative(self.coupling.force, self.coupling.force_deriv,
                              "force_deriv must be the derivative of force")
        elif not isinstance(self.coupling, Sine):
            raise ValueError("coupling must be Sine or Generalized")

    @property
    def n_vertices(self) -> int:
        return self.omega.size


@dataclass(frozen=True, eq=False)
class HebbState:
    """Phases (per vertex) and coupling strengths (per edge, canonical order)."""

    theta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        gamma = np.asarray(self.gamma, dtype=float)
        if theta.ndim != 1 or gamma.ndim != 1:
            raise ValueError("state arrays must be 1-D")
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(gamma))):
            raise ValueError("state must be finite")
        theta = theta.copy()
        gamma = gamma.copy()
        theta.flags.writeable = False
        gamma.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "gamma", gamma)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.theta, self.gamma])

    @classmethod
    def from_vector(cls, vec, n_vertices: int) -> "HebbState":
        vec = np.asarray(vec, dtype=float)
        return cls(vec[:n_vertices], vec[n_vertices:])


def check_state(g: Graph, state: HebbState) -> None:
    if state.theta.shape != (g.n_vertices,):
        raise ValueError(
            f"expected {g.n_vertices} phases, got {state.theta.shape}"
        )
    if state.gamma.shape != (g.n_edges,):
        raise ValueError(
            f"expected {g.n_edges} couplings, got {state.gamma.shape}"
        )


def phase_differences(g: Graph, theta) -> np.ndarray:
    """Per-edge differences theta_i - theta_j in canonical edge order."""
    theta = np.asarray(theta, dtype=float)
    return theta[..., g.edge_i] - theta[..., g.edge_j]


def hebbian_field_arrays(g: Graph, omega, alpha: float, mu: float,
                         theta, gamma):
    delta = phase_differences(g, theta)
    flux = gamma * np.sin(delta)
    dtheta = omega + flux @ g.incidence_pattern.T
    dgamma = mu * np.cos(delta) - alpha * gamma
    return dtheta, dgamma


def generalized_field_arrays(g: Graph, coupling: Generalized, omega,
                             alpha: float, mu: float, theta, gamma):
    delta = phase_differences(g, theta)
    flux = gamma * coupling.force(delta)
    dtheta = omega + flux @ g.incidence_pattern.T
    dgamma = -mu * coupling.potential(delta) - alpha * gamma
    return dtheta, dgamma


def field_arrays(g: Graph, coupling: Coupling, omega, alpha: float,
                 mu: float, theta, gamma):
    if isinstance(coupling, Generalized):
        return generalized_field_arrays(g, coupling, omega, alpha, mu,
                                        theta, gamma)
    return hebbian_field_arrays(g, omega, alpha, mu, theta, gamma)


def hebbian_vector_field(g: Graph, params: SystemParams,
                         state: HebbState) -> HebbState:
    """Time derivative of the Hebbian adaptive model at the given state."""
    check_state(g, state)
    dtheta, dgamma = hebbian_field_arrays(
        g, params.omega, params.alpha, params.mu, state.theta, state.gamma)
    return HebbState(dtheta, dgamma)


def generalized_vector_field(g: Graph, params: SystemParams,
                             state: HebbState) -> HebbState:
    """Time derivative of the generalized adaptive model.

    Requires a Generalized coupling; for Sine use hebbian_vector_field.
    """
    if not isinstance(params.coupling, Generalized):
        raise ValueError(
            "generalized_vector_field needs a Generalized coupling; "
            "use hebbian_vector_field for the sine model")
    check_state(g, state)
    dtheta, dgamma = generalized_field_arrays(
        g, params.coupling, params.omega, params.alpha, params.mu,
        state.theta, state.gamma)
    return HebbState(dtheta, dgamma)


def vector_field(g: Graph, params: SystemParams, state: HebbState) -> HebbState:
    """Dispatch on the coupling kind carried by params."""
    if isinstance(params.coupling, Generalized):
        return generalized_vector_field(g, params, state)
    return hebbian_vector_field(g, params, state)


def classical_vector_field(g: Graph, omega, coupling_strength: float,
                           theta) -> np.ndarray:
    """Time derivative of the fixed-coupling model."""
    if not (float(coupling_strength) > 0.0):
        raise ValueError("coupling strength must be positive")
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != g.n_vertices:
        raise ValueError(
            f"expected {g.n_vertices} phases, got {theta.shape}")
    delta = phase_differences(g, theta)
    return omega + coupling_strength * (np.sin(delta) @ g.incidence_pattern.T)


def energy_arrays(g: Graph, coupling: Coupling, omega, alpha: float,
                  mu: float, theta, gamma):
    delta = phase_differences(g, theta)
    if isinstance(coupling, Generalized):
        interaction = np.sum(gamma * coupling.potential(delta), axis=-1)
    else:
        interaction = -np.sum(gamma * np.cos(delta), axis=-1)
    drive = np.sum(np.asarray(theta, dtype=float) * omega, axis=-1)
    quad = (alpha / (2.0 * mu)) * np.sum(np.asarray(gamma, dtype=float) ** 2,
                                         axis=-1)
    return -drive + interaction + quad


def lyapunov_energy(g: Graph, params: SystemParams, state: HebbState) -> float:
    """Energy whose gradient flow generates the adaptive dynamics.

    Non-increasing along trajectories of the matching vector field since
    dH/dt = -|dtheta/dt|^2 - (1/mu) |dgamma/dt|^2.
    """
    check_state(g, state)
    return float(energy_arrays(g, params.coupling, params.omega, params.alpha,
                               params.mu, state.theta, state.gamma))


def phase_diameter(theta) -> float:
    """Spread max_i theta_i - min_i theta_i of raw (unwrapped) phases."""
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise ValueError("phase vector must be nonempty")
    return float(np.max(theta) - np.min(theta))


def diameter_arrays(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return theta.max(axis=-1) - theta.min(axis=-1)


def residual_arrays(g: Graph, coupling: Coupling, omega, alpha: float,
                    mu: float, theta, gamma):
    dtheta, dgamma = field_arrays(g, coupling, omega, alpha, mu, theta, gamma)
    return np.maximum(np.max(np.abs(dtheta), axis=-1),
                      np.max(np.abs(dgamma), axis=-1))


def residual_norm(g: Graph, params: SystemParams, state: HebbState) -> float:
    """Max-norm of the full time derivative; zero exactly at fixed points."""
    check_state(g, state)
    return float(residual_arrays(g, params.coupling, params.omega,
                                 params.alpha, params.mu,
                                 state.theta, state.gamma))
