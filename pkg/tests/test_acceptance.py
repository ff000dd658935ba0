"""End-to-end checks for the core claims, one per test, each printing a
single [PASS]/[FAIL] line with its runtime against a fixed budget."""
import math
from time import perf_counter

import numpy as np
import pytest

from hebbian_kuramoto import (
    Generalized,
    HebbState,
    IntegratorConfig,
    PlanePoint,
    SystemParams,
    complete_graph,
    critical_radius,
    integrate,
    lift_to_hebbian,
    solve_classical_fixed_point,
    synchrony_report,
)
from hebbian_kuramoto import cli
from hebbian_kuramoto.equilibria import classical_residual
from hebbian_kuramoto.model import hebbian_vector_field, lyapunov_energy
from hebbian_kuramoto.spectral import (
    assemble_jacobian,
    generalized_reduced_jacobian,
    index_equivalence_case,
    inertia_direct,
    inertia_haynsworth,
    schur_reduced,
)

from conftest import LOCKED_OMEGA, UNLOCKED_OMEGA, random_connected_graph

ALPHA = 0.3


@pytest.fixture
def emit(capsys):
    def write(text: str) -> None:
        with capsys.disabled():
            print(text, flush=True)
    return write


def check(name: str, limit_s: float, emit, body) -> None:
    t0 = perf_counter()
    try:
        body()
    except BaseException:
        emit(f"[FAIL] {name} ({perf_counter() - t0:.2f}s, limit {limit_s:g}s)")
        raise
    elapsed = perf_counter() - t0
    stamp = f"({elapsed:.2f}s, limit {limit_s:g}s)"
    if elapsed > limit_s:
        emit(f"[FAIL] {name} {stamp}: over time budget")
        raise AssertionError(f"{name} took {elapsed:.2f}s, budget {limit_s}s")
    emit(f"[PASS] {name} {stamp}")


def test_haynsworth_additivity(emit):
    def body():
        rng = np.random.default_rng(100)
        done = 0
        while done < 200:
            dim = int(rng.integers(2, 13))
            split = int(rng.integers(1, dim))
            m = rng.normal(size=(dim, dim))
            m = (m + m.T) / 2.0
            c = m[split:, split:]
            eig_c = np.abs(np.linalg.eigvalsh(c))
            if eig_c.min() < 1e-3 * max(1.0, eig_c.max()):
                continue
            total = inertia_haynsworth(m[:split, :split], m[:split, split:], c)
            assert total.as_tuple() == inertia_direct(m).as_tuple()
            done += 1

    check("inertia-additivity", 5.0, emit, body)


def test_sylvester_congruence(emit):
    def body():
        rng = np.random.default_rng(101)
        done = 0
        while done < 100:
            dim = int(rng.integers(2, 11))
            q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
            eigs = rng.uniform(0.5, 2.0, dim) * rng.choice([-1.0, 1.0], dim)
            eigs[:int(rng.integers(0, dim // 2 + 1))] = 0.0
            m = q @ np.diag(eigs) @ q.T
            u = rng.normal(size=(dim, dim))
            if np.linalg.cond(u) > 1e3:
                continue
            congruent = u.T @ m @ u
            before = inertia_direct((m + m.T) / 2.0)
            after = inertia_direct((congruent + congruent.T) / 2.0)
            assert before.as_tuple() == after.as_tuple()
            done += 1

    check("congruence-invariance", 5.0, emit, body)


def test_index_equivalence_battery(emit):
    def body():
        rng = np.random.default_rng(102)
        graphs = [complete_graph(n) for n in (3, 4, 5, 6)]
        graphs.append(random_connected_graph(8, 0.4, rng))
        for g in graphs:
            for alpha in (0.3, 1.0):
                for _ in range(50):
                    theta = rng.uniform(-math.pi, math.pi, g.n_vertices)
                    result = index_equivalence_case(g, alpha, theta)
                    assert result["ok"], (g.edges, alpha, theta)
                    full = result["full"]
                    classical = result["classical"]
                    assert full.n_plus == classical.n_plus
                    assert full.n_zero == classical.n_zero
                    assert full.n_minus == classical.n_minus + g.n_edges

    check("index-equivalence", 30.0, emit, body)


def test_schur_formula_matches_numeric(emit):
    def body():
        rng = np.random.default_rng(103)
        for n in (3, 4, 5, 6):
            g = complete_graph(n)
            for _ in range(25):
                theta = rng.uniform(-math.pi, math.pi, n)
                delta = theta[g.edge_i] - theta[g.edge_j]
                j = assemble_jacobian(g, ALPHA, theta, np.cos(delta) / ALPHA)
                numeric = j.theta_theta - j.theta_gamma @ np.linalg.solve(
                    j.gamma_gamma, j.theta_gamma.T)
                err = np.max(np.abs(schur_reduced(g, ALPHA, theta) - numeric))
                assert err < 1e-12

    check("schur-reduction", 5.0, emit, body)


def test_half_angle_round_trip(emit):
    def body():
        rng = np.random.default_rng(104)
        k = 1.0 / (2.0 * ALPHA)
        for n in (3, 5):
            g = complete_graph(n)
            for _ in range(50):
                theta_c = rng.uniform(-1.2, 1.2, n)
                theta_c = theta_c - theta_c.mean()
                omega = -classical_residual(theta_c, np.zeros(n), k, g)
                solved = solve_classical_fixed_point(omega, k, g, theta_c)
                assert solved.converged
                fp = lift_to_hebbian(solved.theta, ALPHA, g, omega)
                assert fp.residual < 1e-10
                back = classical_residual(2.0 * fp.theta, omega, k, g)
                assert np.max(np.abs(back)) < 1e-10

    check("half-angle-round-trip", 10.0, emit, body)


def test_locked_run_convergence(emit, k3):
    def body():
        p = SystemParams(omega=LOCKED_OMEGA, alpha=ALPHA)
        s0 = HebbState(np.zeros(3), np.ones(3))
        traj = integrate(k3, p, s0,
                         IntegratorConfig(t_end=75.0, sample_every=10))
        assert traj.residuals[-1] < 1e-6

    check("locking-run", 2.0, emit, body)


def test_unlocked_run_qualitative(emit, k3):
    def body():
        p = SystemParams(omega=UNLOCKED_OMEGA, alpha=ALPHA)
        s0 = HebbState(np.zeros(3), np.ones(3))
        traj = integrate(k3, p, s0,
                         IntegratorConfig(t_end=75.0, sample_every=10))
        assert traj.residuals[-1] > 0.1
        assert abs(traj.thetas[-1, 0] - traj.thetas[-1, 1]) < 0.01
        rep = synchrony_report(traj)
        assert rep.edge_peak_to_peak[0] < 0.05
        assert np.all(rep.edge_peak_to_peak[1:] > 0.2)

    check("non-locking-run", 2.0, emit, body)


def test_basin_grows_with_initial_coupling(emit, tmp_path):
    def body():
        grid = ["--a-range=-2:2:31", "--b-range=-2:2:31"]
        for gamma0, name in (("1", "weak"), ("3", "strong")):
            code = cli.main(["lock-scan", *grid, "--gamma0", gamma0,
                             "--out", str(tmp_path / name)])
            assert code == 0
        code = cli.main(["feasibility", *grid,
                         "--out", str(tmp_path / "region")])
        assert code == 0

        def load(name, fname):
            return np.genfromtxt(tmp_path / name / fname, delimiter=",",
                                 names=True)

        weak = load("weak", "lock_scan.csv")
        strong = load("strong", "lock_scan.csv")
        region = load("region", "feasibility.csv")
        assert np.array_equal(weak["a"], strong["a"])
        assert np.array_equal(weak["a"], region["a"])
        weak_locked = weak["locked"] == 1
        strong_locked = strong["locked"] == 1
        good = (region["feasible"] == 1) & (region["stable"] == 1)
        assert np.all(good[weak_locked])
        assert np.all(good[strong_locked])
        n_weak = int(weak_locked.sum())
        n_strong = int(strong_locked.sum())
        assert n_weak < n_strong, (
            f"locked counts on this window: gamma0=1 gives {n_weak}, "
            f"gamma0=3 gives {n_strong}; the basin boundaries lie at plane "
            f"radius 3.0 and 4.05, outside the window entirely")

    check("basin-growth", 300.0, emit, body)


def test_boundary_sixfold_symmetry(emit, k3):
    def body():
        radii = []
        for sector in range(6):
            angle = math.pi / 2.0 + sector * math.pi / 3.0
            direction = PlanePoint(math.cos(angle), math.sin(angle))
            radii.append(critical_radius(direction, ALPHA, k3, tol=1e-4))
        assert max(radii) - min(radii) < 1e-3

    check("sixfold-boundary-symmetry", 60.0, emit, body)


def test_identical_oscillator_decay(emit, k3):
    def body():
        rng = np.random.default_rng(105)
        p = SystemParams(omega=np.zeros(3), alpha=ALPHA)
        s0 = HebbState(rng.uniform(0.0, math.pi / 4.0, 3),
                       np.full(3, 1.0 / ALPHA))
        traj = integrate(k3, p, s0, IntegratorConfig(t_end=20.0))
        assert traj.diameters[-1] < 1e-6
        window = traj.diameters > 1e-13
        assert window.sum() > 10
        slope = np.polyfit(traj.times[window],
                           np.log(traj.diameters[window]), 1)[0]
        assert slope < -0.1

    check("identical-decay", 2.0, emit, body)


def test_gradient_consistency(emit):
    def body():
        rng = np.random.default_rng(106)
        h = 1e-6
        worst = 0.0
        for g in (complete_graph(3), random_connected_graph(6, 0.5, rng)):
            p = SystemParams(omega=rng.normal(size=g.n_vertices), alpha=ALPHA)
            for _ in range(25):
                state = HebbState(
                    rng.uniform(-math.pi, math.pi, g.n_vertices),
                    rng.normal(size=g.n_edges))
                d = hebbian_vector_field(g, p, state)
                claimed = np.concatenate([d.theta, d.gamma])
                vec = state.as_vector()
                grad = np.empty_like(vec)
                for i in range(vec.size):
                    up = vec.copy()
                    dn = vec.copy()
                    up[i] += h
                    dn[i] -= h
                    grad[i] = (
                        lyapunov_energy(
                            g, p, HebbState.from_vector(up, g.n_vertices))
                        - lyapunov_energy(
                            g, p, HebbState.from_vector(dn, g.n_vertices))
                    ) / (2.0 * h)
                worst = max(worst, float(np.max(np.abs(claimed + grad))))
        assert worst < 1e-6

    check("gradient-flow", 5.0, emit, body)


def test_generalized_matches_sine_reduction(emit):
    def body():
        coupling = Generalized(potential=lambda x: -np.cos(x), force=np.sin,
                               force_deriv=np.cos)
        rng = np.random.default_rng(107)
        for n in (3, 4, 5):
            g = complete_graph(n)
            for _ in range(34):
                theta = rng.uniform(-math.pi, math.pi, n)
                err = np.max(np.abs(
                    generalized_reduced_jacobian(g, ALPHA, theta, coupling)
                    - schur_reduced(g, ALPHA, theta)))
                assert err < 1e-13

    check("generalized-coupling", 5.0, emit, body)
