import numpy as np
import pytest

from kuramoto_plots import FigureSpec, SchemaError, render
from kuramoto_plots import cli, figures

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def run(*argv):
    return cli.main(list(argv))


class TestRendering:
    def test_all_kinds_render_deterministically(
            self, tmp_path, trajectory_csv, lock_scan_csv, sweep_csv):
        cases = {
            "region": str(sweep_csv),
            "density": str(lock_scan_csv),
            "density-overlay": f"{lock_scan_csv},{sweep_csv}",
            "trajectory": str(trajectory_csv),
        }
        for kind, inputs in cases.items():
            first = tmp_path / f"{kind}-1.png"
            second = tmp_path / f"{kind}-2.png"
            for out in (first, second):
                assert run("--kind", kind, "--in", inputs,
                           "--out", str(out)) == 0
            blob = first.read_bytes()
            assert blob.startswith(PNG_MAGIC)
            assert blob == second.read_bytes(), kind
            assert b"Matplotlib" not in blob

    def test_trajectory_two_panels(self, trajectory_csv, tmp_path):
        spec = FigureSpec("trajectory", (trajectory_csv,),
                          tmp_path / "t.png")
        fig = figures._fig_trajectory(spec)
        try:
            assert len(fig.axes) == 2
            assert fig.axes[0].get_ylabel() == "phase"
            assert fig.axes[1].get_ylabel() == "coupling strength"
            # one curve per oscillator on the left, per edge on the right
            assert len(fig.axes[0].lines) == 3
            assert len(fig.axes[1].lines) == 3
        finally:
            figures.plt.close(fig)

    def test_density_uses_log_floor(self, lock_scan_csv, tmp_path):
        spec = FigureSpec("density", (lock_scan_csv,), tmp_path / "d.png")
        fig = figures._fig_density(spec)
        try:
            img = fig.axes[0].images[0]
            assert float(img.get_array().min()) >= np.log10(
                figures.RESIDUAL_FLOOR)
            assert img.get_clim() == (-8.0, 1.0)
        finally:
            figures.plt.close(fig)

    def test_color_bounds_flag(self, lock_scan_csv, tmp_path):
        spec = FigureSpec("density", (lock_scan_csv,), tmp_path / "d.png",
                          vmin=-6.0, vmax=0.0)
        fig = figures._fig_density(spec)
        try:
            assert fig.axes[0].images[0].get_clim() == (-6.0, 0.0)
        finally:
            figures.plt.close(fig)

    def test_api_returns_written_path(self, sweep_csv, tmp_path):
        out = render(FigureSpec("region", (sweep_csv,), tmp_path / "r.png"))
        assert out.read_bytes().startswith(PNG_MAGIC)


class TestSweepData:
    def test_region_mask_mirror_symmetric(self, sweep_csv):
        # frequency sign structure makes the stable region symmetric
        # under a -> -a on a symmetric grid
        a_vals, b_vals, fields = figures._load_grid(
            sweep_csv, figures.SWEEP_COLUMNS)
        assert np.allclose(a_vals, -a_vals[::-1])
        mask = figures._stable_mask(fields)
        assert np.array_equal(mask, mask[:, ::-1])
        assert mask.any()


class TestErrors:
    def test_wrong_header_rejected(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,res,locked\n0.0,0.0,1.0,0\n")
        out = tmp_path / "x.png"
        assert run("--kind", "density", "--in", str(bad),
                   "--out", str(out)) == 2
        assert "expected columns" in capsys.readouterr().err
        assert not out.exists()

    def test_empty_grid_rejected(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("a,b,residual,locked\n")
        out = tmp_path / "x.png"
        assert run("--kind", "density", "--in", str(empty),
                   "--out", str(out)) == 2
        assert "empty grid" in capsys.readouterr().err
        assert not out.exists()

    def test_duplicate_points_rejected(self, tmp_path):
        dup = tmp_path / "dup.csv"
        dup.write_text("a,b,residual,locked\n"
                       "0.0,0.0,1.0,0\n0.0,0.0,1.0,0\n")
        assert run("--kind", "density", "--in", str(dup),
                   "--out", str(tmp_path / "x.png")) == 2

    def test_ragged_row_rejected(self, tmp_path):
        ragged = tmp_path / "ragged.csv"
        ragged.write_text("a,b,residual,locked\n0.0,0.0,1.0\n")
        assert run("--kind", "density", "--in", str(ragged),
                   "--out", str(tmp_path / "x.png")) == 2

    def test_non_numeric_rejected(self, tmp_path):
        alpha = tmp_path / "alpha.csv"
        alpha.write_text("a,b,residual,locked\n0.0,zero,1.0,0\n")
        assert run("--kind", "density", "--in", str(alpha),
                   "--out", str(tmp_path / "x.png")) == 2

    def test_overlay_grid_mismatch(self, lock_scan_csv, tmp_path, capsys):
        tiny = tmp_path / "tiny.csv"
        tiny.write_text(f"{','.join(figures.SWEEP_COLUMNS)}\n"
                        "0.0,0.0,1,1,0,1,2,1,0.0\n")
        out = tmp_path / "x.png"
        assert run("--kind", "density-overlay",
                   "--in", f"{lock_scan_csv},{tiny}",
                   "--out", str(out)) == 2
        assert "grid differs" in capsys.readouterr().err
        assert not out.exists()

    def test_overlay_needs_two_inputs(self, lock_scan_csv, tmp_path):
        assert run("--kind", "density-overlay", "--in", str(lock_scan_csv),
                   "--out", str(tmp_path / "x.png")) == 2

    def test_missing_file(self, tmp_path):
        assert run("--kind", "density", "--in", str(tmp_path / "no.csv"),
                   "--out", str(tmp_path / "x.png")) == 2

    def test_trajectory_kind_on_scan_csv(self, lock_scan_csv, tmp_path):
        out = tmp_path / "x.png"
        assert run("--kind", "trajectory", "--in", str(lock_scan_csv),
                   "--out", str(out)) == 2
        assert not out.exists()

    def test_unknown_kind_via_api(self, tmp_path):
        with pytest.raises(ValueError):
            FigureSpec("pie", (tmp_path / "a.csv",), tmp_path / "x.png")

    def test_unknown_kind_via_cli(self, tmp_path):
        assert run("--kind", "pie", "--in", "a.csv", "--out", "x.png") == 2

    def test_help_exits_zero(self):
        assert run("--help") == 0
