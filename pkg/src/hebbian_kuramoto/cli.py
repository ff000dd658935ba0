"""Command-line front end.

Subcommands:

    simulate       integrate one run, write trajectory.csv plus a summary
    lock-scan      terminal residual over a frequency-plane grid
    feasibility    locked-state existence and stability over a grid
    stability      solve one frequency vector and classify it
    theorem-check  random-state index equivalence battery

Every option can also come from a flat "key = value" config file given with
--config; command-line flags override file values, which override built-in
defaults. Each run writes a manifest.txt echoing the fully resolved
configuration (plus the package version and seed), which is sufficient to
reproduce the run bit for bit since all computation is deterministic.

Exit codes: 0 success, 2 configuration error, 3 integration divergence,
4 verification failure in theorem-check.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, dynamics, equilibria, model, spectral
from .graph import Graph, parse_graph_spec


class ConfigError(ValueError):
    """Bad configuration file or flag value; maps to exit code 2."""


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_VERIFY = 4

_COMMANDS = ("simulate", "lock-scan", "feasibility", "stability",
             "theorem-check")

# Defaults mirror the reference experiments: complete triangle, alpha = 0.3,
# phases started at zero, run to t = 75 with RK4 step 0.01.
_DEFAULTS = {
    "graph": "complete:3",
    "alpha": "0.3",
    "mu": "1",
    "seed": "0",
    "theta0": "0",
    "gamma0": "1",
    "t_end": "75",
    "step": "0.01",
    "method": "rk4",
    "sample_every": "10",
    "threshold": "1e-4",
    "a_range": "-3:3:61",
    "b_range": "-3:3:61",
    "strategy": "continuation",
    "starts": "32",
    "count": "50",
}

_KNOWN_KEYS = set(_DEFAULTS) | {"experiment", "out", "omega", "plane"}


def _parse_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _resolve(args: argparse.Namespace) -> dict[str, str]:
    cfg = dict(_DEFAULTS)
    if args.config:
        file_values = _parse_config_file(args.config)
        experiment = file_values.pop("experiment", None)
        if experiment is not None and experiment != args.command:
            raise ConfigError(
                f"config file is for {experiment!r}, not {args.command!r}")
        cfg.update(file_values)
    for key in _KNOWN_KEYS - {"experiment"}:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = str(flag)
    cfg["experiment"] = args.command
    cfg.setdefault("out", f"runs/{args.command}")
    return cfg


def _get_float(cfg, key) -> float:
    try:
        return float(cfg[key])
    except (ValueError, KeyError):
        raise ConfigError(f"bad numeric value for {key!r}: {cfg.get(key)!r}")


def _get_int(cfg, key) -> int:
    try:
        return int(cfg[key])
    except (ValueError, KeyError):
        raise ConfigError(f"bad integer value for {key!r}: {cfg.get(key)!r}")


def _parse_vector(text: str, what: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise ConfigError(f"bad {what}: {text!r}")


def _parse_broadcast(text: str, n: int, what: str) -> np.ndarray:
    vec = _parse_vector(text, what)
    if vec.size == 1:
        return np.full(n, vec[0])
    if vec.size != n:
        raise ConfigError(f"{what} needs 1 or {n} values, got {vec.size}")
    return vec


def _parse_range(text: str, what: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"bad {what}: {text!r} (expected lo:hi:n)")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"bad {what}: {text!r}")
    if n < 1:
        raise ConfigError(f"{what} needs at least one point")
    return lo, hi, n


def _load_graph(cfg) -> Graph:
    try:
        return parse_graph_spec(cfg["graph"])
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad graph {cfg['graph']!r}: {exc}")


def _resolve_omega(cfg, g: Graph) -> np.ndarray:
    if cfg.get("omega"):
        omega = _parse_vector(cfg["omega"], "omega")
        if omega.size != g.n_vertices:
            raise ConfigError(
                f"omega needs {g.n_vertices} entries, got {omega.size}")
        return omega
    if cfg.get("plane"):
        if g.n_vertices != 3:
            raise ConfigError("plane coordinates need a 3-vertex graph")
        ab = _parse_vector(cfg["plane"], "plane")
        if ab.size != 2:
            raise ConfigError("plane needs exactly 'a,b'")
        return equilibria.frequency_from_plane(
            equilibria.PlanePoint(ab[0], ab[1]))
    raise ConfigError("either omega or plane must be given")


def _out_dir(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, cfg: dict[str, str], g: Graph) -> None:
    lines = [f"version = {__version__}"]
    for key in sorted(cfg):
        lines.append(f"{key} = {cfg[key]}")
    lines.append(f"graph_n = {g.n_vertices}")
    lines.append("graph_edges = " + ",".join(f"{i}-{j}" for i, j in g.edges))
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def _integrator_config(cfg) -> dynamics.IntegratorConfig:
    try:
        return dynamics.IntegratorConfig(
            t_end=_get_float(cfg, "t_end"),
            method=cfg["method"],
            step=_get_float(cfg, "step"),
            sample_every=_get_int(cfg, "sample_every"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


def cmd_simulate(cfg: dict[str, str]) -> int:
    g = _load_graph(cfg)
    omega = _resolve_omega(cfg, g)
    alpha = _get_float(cfg, "alpha")
    mu = _get_float(cfg, "mu")
    threshold = _get_float(cfg, "threshold")
    if threshold <= 0.0:
        raise ConfigError("threshold must be positive")
    theta0 = _parse_broadcast(cfg["theta0"], g.n_vertices, "theta0")
    gamma0 = _parse_broadcast(cfg["gamma0"], g.n_edges, "gamma0")
    icfg = _integrator_config(cfg)
    try:
        params = model.SystemParams(omega=omega, alpha=alpha, mu=mu)
        state0 = model.HebbState(theta0, gamma0)
    except ValueError as exc:
        raise ConfigError(str(exc))
    traj = dynamics.integrate(g, params, state0, icfg)
    out = _out_dir(cfg)
    _write_manifest(out, cfg, g)
    dynamics.write_trajectory_csv(traj, out / "trajectory.csv")
    terminal_residual = float(traj.residuals[-1])
    lines = [
        f"locked = {int(terminal_residual < threshold)}",
        f"terminal_residual = {terminal_residual!r}",
        f"threshold = {threshold!r}",
        f"n_samples = {traj.n_samples}",
    ]
    if traj.n_samples >= 2:
        rep = dynamics.synchrony_report(traj)
        for (i, j), var in zip(rep.pairs, rep.pair_variation):
            lines.append(f"pair_variation_{i}_{j} = {float(var)!r}")
        for (i, j), p2p, mean in zip(g.edges, rep.edge_peak_to_peak,
                                     rep.edge_mean):
            lines.append(f"edge_gamma_p2p_{i}_{j} = {float(p2p)!r}")
            lines.append(f"edge_gamma_mean_{i}_{j} = {float(mean)!r}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    return EXIT_OK


LOCK_SCAN_CSV_HEADER = "a,b,residual,locked"


def cmd_lock_scan(cfg: dict[str, str]) -> int:
    g = _load_graph(cfg)
    if g.n_vertices != 3:
        raise ConfigError("lock-scan needs a 3-vertex graph")
    alpha = _get_float(cfg, "alpha")
    mu = _get_float(cfg, "mu")
    if alpha <= 0.0 or mu <= 0.0:
        raise ConfigError("alpha and mu must be positive")
    threshold = _get_float(cfg, "threshold")
    t_end = _get_float(cfg, "t_end")
    step = _get_float(cfg, "step")
    if threshold <= 0.0 or t_end < 0.0 or step <= 0.0:
        raise ConfigError("threshold, t_end and step must be positive")
    theta0 = _parse_broadcast(cfg["theta0"], g.n_vertices, "theta0")
    gamma0 = _parse_broadcast(cfg["gamma0"], g.n_edges, "gamma0")
    a_lo, a_hi, na = _parse_range(cfg["a_range"], "a_range")
    b_lo, b_hi, nb = _parse_range(cfg["b_range"], "b_range")
    grid = equilibria.PlaneGrid.from_ranges(a_lo, a_hi, na, b_lo, b_hi, nb)
    points = list(grid.points())
    omegas = np.stack([equilibria.frequency_from_plane(p) for p in points])
    n_points = omegas.shape[0]
    thetas = np.tile(theta0, (n_points, 1))
    gammas = np.tile(gamma0, (n_points, 1))
    theta_t, gamma_t = dynamics.rk4_terminal(
        g, omegas, alpha, mu, thetas, gammas, t_end, step)
    with np.errstate(invalid="ignore"):
        residuals = model.residual_arrays(
            g, model.Sine(), omegas, alpha, mu, theta_t, gamma_t)
        locked = residuals < threshold
    out = _out_dir(cfg)
    _write_manifest(out, cfg, g)
    lines = [LOCK_SCAN_CSV_HEADER]
    for point, res, lock in zip(points, residuals, locked):
        lines.append(f"{point.a!r},{point.b!r},{float(res)!r},{int(lock)}")
    (out / "lock_scan.csv").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_feasibility(cfg: dict[str, str]) -> int:
    g = _load_graph(cfg)
    alpha = _get_float(cfg, "alpha")
    if alpha <= 0.0:
        raise ConfigError("alpha must be positive")
    strategy = cfg["strategy"]
    if strategy not in ("continuation", "multi-start"):
        raise ConfigError(f"unknown strategy {strategy!r}")
    a_lo, a_hi, na = _parse_range(cfg["a_range"], "a_range")
    b_lo, b_hi, nb = _parse_range(cfg["b_range"], "b_range")
    grid = equilibria.PlaneGrid.from_ranges(a_lo, a_hi, na, b_lo, b_hi, nb)
    try:
        records = equilibria.feasibility_sweep(
            grid, alpha, g, strategy=strategy,
            n_starts=_get_int(cfg, "starts"), seed=_get_int(cfg, "seed"))
    except ValueError as exc:
        raise ConfigError(str(exc))
    out = _out_dir(cfg)
    _write_manifest(out, cfg, g)
    equilibria.write_sweep_csv(records, out / "feasibility.csv")
    return EXIT_OK


def cmd_stability(cfg: dict[str, str]) -> int:
    g = _load_graph(cfg)
    alpha = _get_float(cfg, "alpha")
    if alpha <= 0.0:
        raise ConfigError("alpha must be positive")
    omega = _resolve_omega(cfg, g)
    omega = omega - omega.mean()
    result = equilibria.solve_fixed_point(omega, alpha, g)
    out = _out_dir(cfg)
    _write_manifest(out, cfg, g)
    lines = [f"status = {result.status}",
             f"newton_residual = {result.residual!r}",
             f"iterations = {result.iterations}"]
    csv_lines = [spectral.STABILITY_CSV_HEADER]
    if result.converged:
        fp = result.fixed_point
        report = spectral.classify_stability(g, alpha, fp.theta, omega)
        csv_lines.append(spectral.stability_csv_row(report))
        lines.append(f"classification = {report.classification}")
        lines.append(f"unstable_dimension = {report.unstable_dimension}")
        lines.append("theta = " + ",".join(repr(float(v)) for v in fp.theta))
        lines.append("gamma = " + ",".join(repr(float(v)) for v in fp.gamma))
    (out / "stability.csv").write_text("\n".join(csv_lines) + "\n")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_theorem_check(cfg: dict[str, str]) -> int:
    g = _load_graph(cfg)
    if not g.is_connected():
        raise ConfigError("theorem-check needs a connected graph")
    alpha = _get_float(cfg, "alpha")
    if alpha <= 0.0:
        raise ConfigError("alpha must be positive")
    count = _get_int(cfg, "count")
    if count < 0:
        raise ConfigError("count must be nonnegative")
    seed = _get_int(cfg, "seed")
    rng = np.random.default_rng(seed)
    out = _out_dir(cfg)
    _write_manifest(out, cfg, g)
    lines = []
    failures = 0
    for case in range(count):
        theta = rng.uniform(-math.pi, math.pi, g.n_vertices)
        result = spectral.index_equivalence_case(g, alpha, theta)
        ok = result["ok"]
        full = result["full"].as_tuple()
        classical = result["classical"].as_tuple()
        lines.append(f"case_{case} = {'ok' if ok else 'MISMATCH'} "
                     f"full={full} classical={classical}")
        if not ok:
            failures += 1
            lines.append("theta_" + str(case) + " = "
                         + ",".join(repr(float(v)) for v in theta))
    lines.append(f"matches = {count - failures}/{count}")
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    if failures:
        print(f"theorem-check: {failures}/{count} mismatches "
              f"(see {out / 'report.txt'})", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


_HANDLERS = {
    "simulate": cmd_simulate,
    "lock-scan": cmd_lock_scan,
    "feasibility": cmd_feasibility,
    "stability": cmd_stability,
    "theorem-check": cmd_theorem_check,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hebbian-kuramoto",
        description="Kuramoto oscillators with Hebbian adaptive coupling")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--alpha", type=float, help="coupling decay rate")
        p.add_argument("--mu", type=float, help="plasticity rate")
        p.add_argument("--graph",
                       help="'complete:<N>' or an edge-list file path")
        p.add_argument("--seed", type=int, help="random seed")

    p = sub.add_parser("simulate", help="integrate one run")
    common(p)
    p.add_argument("--omega", help="comma-separated frequencies")
    p.add_argument("--plane", help="frequency-plane point 'a,b'")
    p.add_argument("--theta0", help="initial phases (scalar or vector)")
    p.add_argument("--gamma0", help="initial couplings (scalar or vector)")
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--method", choices=["rk4", "rk45"])
    p.add_argument("--sample-every", dest="sample_every", type=int)
    p.add_argument("--threshold", type=float, help="lock threshold")

    p = sub.add_parser("lock-scan", help="terminal residual over a grid")
    common(p)
    p.add_argument("--a-range", dest="a_range", help="lo:hi:n")
    p.add_argument("--b-range", dest="b_range", help="lo:hi:n")
    p.add_argument("--theta0")
    p.add_argument("--gamma0")
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--threshold", type=float)

    p = sub.add_parser("feasibility", help="locked-state sweep over a grid")
    common(p)
    p.add_argument("--a-range", dest="a_range")
    p.add_argument("--b-range", dest="b_range")
    p.add_argument("--strategy", choices=["continuation", "multi-start"])
    p.add_argument("--starts", type=int, help="multi-start seeds per point")

    p = sub.add_parser("stability", help="solve and classify one point")
    common(p)
    p.add_argument("--omega")
    p.add_argument("--plane")

    p = sub.add_parser("theorem-check",
                       help="index equivalence on random locked states")
    common(p)
    p.add_argument("--count", type=int, help="number of random cases")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        cfg = _resolve(args)
        return _HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except dynamics.IntegrationDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


def entry() -> None:
    sys.exit(main())
