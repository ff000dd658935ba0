"""Figure construction from CSV files.

Input schemas are validated before anything is written, so a failed render
leaves no output file. All rendering is deterministic: fixed figure size,
dpi, color map, and no timestamp or software metadata in the PNG.
"""
import io
from dataclasses import dataclass
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

KINDS = ("region", "density", "density-overlay", "trajectory")

# log10 color floor; residuals below this are fully dark
RESIDUAL_FLOOR = 1e-8

LOCK_SCAN_COLUMNS = ("a", "b", "residual", "locked")
SWEEP_COLUMNS = ("a", "b", "feasible", "stable", "n_plus", "n_zero",
                 "n_minus", "branches_found", "newton_residual")

_MAP_SIZE = (4.8, 4.2)
_PANEL_SIZE = (9.6, 4.2)
_DPI = 150


class SchemaError(ValueError):
    """Input file does not match the expected CSV schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[Path, ...]
    output: Path
    xlabel: str | None = None
    ylabel: str | None = None
    vmin: float | None = None
    vmax: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        need = 2 if self.kind == "density-overlay" else 1
        if len(self.inputs) != need:
            raise ValueError(
                f"{self.kind} takes {need} input file(s), got {len(self.inputs)}")


def _read_csv(path: Path):
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        tokens = ln.split(",")
        if len(tokens) != len(header):
            raise SchemaError(f"{path}: row has {len(tokens)} fields, "
                              f"header has {len(header)}")
        try:
            rows.append([float(tok) for tok in tokens])
        except ValueError as exc:
            raise SchemaError(f"{path}: {exc}") from None
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    return header, data


def _load_grid(path: Path, columns):
    header, data = _read_csv(path)
    if header != list(columns):
        raise SchemaError(f"{path}: expected columns {','.join(columns)}, "
                          f"got {','.join(header)}")
    if data.shape[0] == 0:
        raise SchemaError(f"{path}: empty grid")
    a, b = data[:, 0], data[:, 1]
    a_vals, b_vals = np.unique(a), np.unique(b)
    na, nb = a_vals.size, b_vals.size
    if na * nb != data.shape[0] or not (
            np.array_equal(a, np.tile(a_vals, nb))
            and np.array_equal(b, np.repeat(b_vals, na))):
        raise SchemaError(f"{path}: rows do not form a grid in scan order")
    fields = {name: data[:, k].reshape(nb, na)
              for k, name in enumerate(columns)}
    return a_vals, b_vals, fields


def _extent(a_vals, b_vals):
    da = a_vals[1] - a_vals[0] if a_vals.size > 1 else 1.0
    db = b_vals[1] - b_vals[0] if b_vals.size > 1 else 1.0
    return (a_vals[0] - da / 2.0, a_vals[-1] + da / 2.0,
            b_vals[0] - db / 2.0, b_vals[-1] + db / 2.0)


def _map_axes(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=_MAP_SIZE, dpi=_DPI)
    ax.set_xlabel(spec.xlabel or "a")
    ax.set_ylabel(spec.ylabel or "b")
    ax.set_aspect("equal")
    return fig, ax


def _stable_mask(fields):
    return (fields["feasible"] == 1.0) & (fields["stable"] == 1.0)


def _fig_region(spec: FigureSpec):
    a_vals, b_vals, fields = _load_grid(spec.inputs[0], SWEEP_COLUMNS)
    fig, ax = _map_axes(spec)
    # dark where a stable locked state exists
    img = 1.0 - _stable_mask(fields).astype(float)
    ax.imshow(img, origin="lower", extent=_extent(a_vals, b_vals),
              cmap="gray", vmin=0.0, vmax=1.0, interpolation="nearest")
    return fig


def _draw_density(spec: FigureSpec, fig, ax, a_vals, b_vals, fields):
    logres = np.log10(np.maximum(fields["residual"], RESIDUAL_FLOOR))
    vmin = spec.vmin if spec.vmin is not None else np.log10(RESIDUAL_FLOOR)
    vmax = spec.vmax if spec.vmax is not None else 1.0
    img = ax.imshow(logres, origin="lower", extent=_extent(a_vals, b_vals),
                    cmap="gray", vmin=vmin, vmax=vmax,
                    interpolation="nearest")
    fig.colorbar(img, ax=ax, label="log10 terminal residual")
    return img


def _fig_density(spec: FigureSpec):
    a_vals, b_vals, fields = _load_grid(spec.inputs[0], LOCK_SCAN_COLUMNS)
    fig, ax = _map_axes(spec)
    _draw_density(spec, fig, ax, a_vals, b_vals, fields)
    return fig


def _fig_density_overlay(spec: FigureSpec):
    a_vals, b_vals, fields = _load_grid(spec.inputs[0], LOCK_SCAN_COLUMNS)
    a2, b2, sweep = _load_grid(spec.inputs[1], SWEEP_COLUMNS)
    if not (np.array_equal(a_vals, a2) and np.array_equal(b_vals, b2)):
        raise SchemaError(f"{spec.inputs[1]}: grid differs from "
                          f"{spec.inputs[0]}")
    fig, ax = _map_axes(spec)
    _draw_density(spec, fig, ax, a_vals, b_vals, fields)
    mask = _stable_mask(sweep).astype(float)
    if min(mask.shape) >= 2 and mask.min() != mask.max():
        ax.contour(a_vals, b_vals, mask, levels=[0.5], colors="red",
                   linewidths=1.0)
    return fig


def _fig_trajectory(spec: FigureSpec):
    header, data = _read_csv(spec.inputs[0])
    n = sum(1 for c in header if c.startswith("theta_"))
    e = sum(1 for c in header if c.startswith("gamma_"))
    expected = (["t"] + [f"theta_{i}" for i in range(n)]
                + [f"gamma_{k}" for k in range(e)]
                + ["diameter", "residual", "energy"])
    if n == 0 or e == 0 or header != expected:
        raise SchemaError(f"{spec.inputs[0]}: not a trajectory file")
    if data.shape[0] == 0:
        raise SchemaError(f"{spec.inputs[0]}: no samples")
    t = data[:, 0]
    fig, (left, right) = plt.subplots(
        1, 2, figsize=_PANEL_SIZE, dpi=_DPI, sharex=True)
    for i in range(n):
        left.plot(t, data[:, 1 + i], label=f"theta_{i}", linewidth=1.2)
    for k in range(e):
        right.plot(t, data[:, 1 + n + k], label=f"gamma_{k}", linewidth=1.2)
    left.set_xlabel(spec.xlabel or "t")
    right.set_xlabel(spec.xlabel or "t")
    left.set_ylabel("phase")
    right.set_ylabel("coupling strength")
    if n <= 8:
        left.legend(loc="best", fontsize="small")
    if e <= 8:
        right.legend(loc="best", fontsize="small")
    return fig


_BUILDERS = {
    "region": _fig_region,
    "density": _fig_density,
    "density-overlay": _fig_density_overlay,
    "trajectory": _fig_trajectory,
}


def render(spec: FigureSpec) -> Path:
    """Build the figure for spec and write it as PNG.

    Validation happens before the figure is created; on any SchemaError no
    output file appears. The PNG bytes are assembled in memory and written
    in one step, so a partial file never exists on disk.
    """
    fig = _BUILDERS[spec.kind](spec)
    try:
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="png", dpi=_DPI,
                    metadata={"Software": None})
    finally:
        plt.close(fig)
    out = Path(spec.output)
    out.write_bytes(buf.getvalue())
    return out
