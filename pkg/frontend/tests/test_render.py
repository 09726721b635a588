"""Renderer contract tests and the rendering acceptance check."""

import hashlib
import os

import pytest

figrender = pytest.importorskip("figrender")

from figrender import ContractError, PlotSpec, read_table, render  # noqa: E402
from figrender.cli import main  # noqa: E402

from conftest import write_table  # noqa: E402

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def file_digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def assert_png(path, min_bytes=2000):
    assert os.path.exists(path)
    with open(path, "rb") as fh:
        blob = fh.read()
    assert blob.startswith(PNG_MAGIC)
    assert len(blob) > min_bytes


class TestReadTable:
    def test_parses_contract(self, table_dir):
        _, paths = table_dir
        t = read_table(paths["fig2a"])
        assert t.name == "fig2a"
        assert t.columns == ["r", "enhancement"]
        assert t.units["enhancement"] == "lambda_eff/lambda"
        assert t.data["enhancement"][0] == 1.0
        assert t.metadata["constants_sha256"] == "f" * 64

    def test_rejects_missing_metadata(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("x (m)\n1.0\n")
        with pytest.raises(ContractError):
            read_table(str(bad))

    def test_rejects_corrupted_metadata(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("# {not json]\nx (m)\n1.0\n")
        with pytest.raises(ContractError):
            read_table(str(bad))

    def test_rejects_ragged_rows(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text('# {"table": "t"}\nx (m),y (m)\n1.0\n')
        with pytest.raises(ContractError):
            read_table(str(bad))


class TestRenderFigures:
    @pytest.mark.parametrize("figure", ["fig2a", "fig2b", "fig2c", "fig4a", "fig4b"])
    def test_line_figures(self, table_dir, figure):
        tmp, paths = table_dir
        out = str(tmp / f"{figure}.png")
        report = render(PlotSpec(figure=figure, inputs=[paths[figure]], output=out))
        assert report.output == out
        assert_png(out)

    @pytest.mark.parametrize("figure,level", [("fig2d", 1.0e6), ("fig2e", 1.0)])
    def test_maps_draw_dashed_threshold(self, table_dir, figure, level):
        tmp, paths = table_dir
        out = str(tmp / f"{figure}.png")
        report = render(PlotSpec(figure=figure, inputs=[paths[figure]], output=out))
        assert_png(out)
        assert report.contour_levels == [level]
        assert report.contour_segments > 0   # the level set exists in the data

    def test_fig3_single_and_multi_panel(self, table_dir):
        tmp, paths = table_dir
        out1 = str(tmp / "fig3_single.png")
        render(PlotSpec(figure="fig3", inputs=[paths["fig3a"]], output=out1))
        assert_png(out1)
        out2 = str(tmp / "fig3_multi.png")
        render(PlotSpec(figure="fig3", inputs=[paths["fig3a"], paths["fig3d"]], output=out2))
        assert_png(out2)

    def test_inputs_never_mutated_and_rerun_ok(self, table_dir):
        tmp, paths = table_dir
        before = file_digest(paths["fig2d"])
        out = str(tmp / "twice.png")
        render(PlotSpec(figure="fig2d", inputs=[paths["fig2d"]], output=out))
        render(PlotSpec(figure="fig2d", inputs=[paths["fig2d"]], output=out))
        assert_png(out)
        assert file_digest(paths["fig2d"]) == before

    def test_missing_column_gives_diff_report(self, table_dir, tmp_path):
        broken = write_table(
            tmp_path / "broken.csv", "fig4b",
            [("lambda_t", "1/lambda"), ("three_tangle", "dimensionless")],
            [(0.0, 0.0), (0.1, 0.5)],
        )
        out = str(tmp_path / "broken.png")
        with pytest.raises(ContractError) as err:
            render(PlotSpec(figure="fig4b", inputs=[broken], output=out))
        assert "missing" in str(err.value)
        assert "min_residual_contangle" in str(err.value)
        assert not os.path.exists(out)

    def test_grid_shape_required_for_maps(self, tmp_path):
        broken = write_table(
            tmp_path / "flat.csv", "fig2d",
            [("R", "nm"), ("r", "dimensionless"), ("lambda_eff_over_2pi", "Hz")],
            [(20.0, 0.0, 1e5), (50.0, 1.0, 2e5)],
            run={"figure": "fig2d"},
        )
        with pytest.raises(ContractError):
            render(PlotSpec(figure="fig2d", inputs=[broken], output=str(tmp_path / "x.png")))


class TestCli:
    def test_usage_error(self):
        assert main(["render", "--figure", "fig2a"]) == 1
        assert main(["nope"]) == 1

    def test_render_ok(self, table_dir):
        tmp, paths = table_dir
        out = str(tmp / "cli.png")
        assert main(["render", "--figure", "fig2a", "--in", paths["fig2a"],
                     "--out", out]) == 0
        assert_png(out)

    def test_corrupted_header_exit_nonzero_no_partial(self, table_dir, capsys):
        tmp, paths = table_dir
        corrupted = tmp / "corrupted.csv"
        blob = open(paths["fig2e"], "r", encoding="utf-8").read()
        corrupted.write_text(blob.replace('"table"', '"tab', 1))  # break the JSON
        out = str(tmp / "corrupted.png")
        code = main(["render", "--figure", "fig2e", "--in", str(corrupted), "--out", out])
        assert code != 0
        assert not os.path.exists(out)
        assert not os.path.exists(out + ".tmp")
        assert "contract violation" in capsys.readouterr().err


def test_acceptance_rendering(table_dir, capsys):
    """Rendering gate: a nonempty PNG per emitted table kind, dashed
    threshold contours on both maps, nonzero exit on a corrupted header."""
    tmp, paths = table_dir
    outputs = {}
    for figure, key in (
        ("fig2a", "fig2a"), ("fig2b", "fig2b"), ("fig2c", "fig2c"),
        ("fig2d", "fig2d"), ("fig2e", "fig2e"), ("fig3", "fig3a"),
        ("fig3", "fig3d"), ("fig4a", "fig4a"), ("fig4b", "fig4b"),
    ):
        out = str(tmp / f"acc_{key}.png")
        report = render(PlotSpec(figure=figure, inputs=[paths[key]], output=out))
        assert_png(out)
        outputs[key] = report
    assert outputs["fig2d"].contour_levels == [1.0e6]
    assert outputs["fig2d"].contour_segments > 0
    assert outputs["fig2e"].contour_levels == [1.0]
    assert outputs["fig2e"].contour_segments > 0

    corrupted = tmp / "acc_corrupted.csv"
    corrupted.write_text("# {broken\n" + "lambda_t (1/lambda)\n0.0\n")
    code = main(["render", "--figure", "fig4a", "--in", str(corrupted),
                 "--out", str(tmp / "acc_bad.png")])
    assert code != 0
    assert not os.path.exists(str(tmp / "acc_bad.png"))
    print("\nACCEPTANCE 8 (rendering): PASS -- nonempty PNGs for every table kind, "
          "dashed 1 MHz and unity contours drawn, corrupted header rejected "
          f"(exit {code})")
