"""Fixture tables written directly against the CSV contract.

The renderer is exercised purely through files; nothing here imports the
simulator package.
"""

import json
import math

import pytest


def write_table(path, name, columns, rows, run=None, extra_meta=None):
    """Write a contract-conform table: JSON metadata line, header row, data."""
    meta = {
        "table": name,
        "version": "0.1.0",
        "constants_sha256": "f" * 64,
        "physical_params": {"R": 5e-8, "R_s": 1e-8, "d": 5e-9},
        "run": run or {"figure": name},
        "columns": [{"name": n, "unit": u} for n, u in columns],
    }
    if extra_meta:
        meta.update(extra_meta)
    lines = ["# " + json.dumps(meta, sort_keys=True, separators=(",", ":"))]
    lines.append(",".join(f"{n} ({u})" for n, u in columns))
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def table_dir(tmp_path):
    """One valid fixture table per figure id, keyed by figure id."""
    paths = {}

    rs = [0.5 * k for k in range(11)]
    paths["fig2a"] = write_table(
        tmp_path / "fig2a.csv", "fig2a",
        [("r", "dimensionless"), ("enhancement", "lambda_eff/lambda")],
        [(r, math.exp(r)) for r in rs],
    )
    paths["fig2b"] = write_table(
        tmp_path / "fig2b.csv", "fig2b",
        [("r", "dimensionless"), ("ratio_R50nm", "lambda_eff/g0"),
         ("ratio_R100nm", "lambda_eff/g0")],
        [(r, 0.03 * math.exp(r), 0.02 * math.exp(r)) for r in rs],
    )
    radii = [20.0 * 1.6**k for k in range(8)]
    paths["fig2c"] = write_table(
        tmp_path / "fig2c.csv", "fig2c",
        [("R", "nm"), ("ratio_r2", "lambda_eff/g0"), ("ratio_r3", "lambda_eff/g0")],
        [(R, 40.0 / R, 110.0 / R) for R in radii],
    )

    grid_R = [20.0, 50.0, 100.0, 200.0]
    grid_r = [0.0, 2.5, 5.0]
    rows_d, rows_e = [], []
    for R in grid_R:
        for r in grid_r:
            lam = 3.0e4 * math.exp(r) * (50.0 / R) ** 2.5   # straddles 1 MHz
            rows_d.append((R, r, lam))
            rows_e.append((R, r, 1e-2 * math.exp(2 * r) * (50.0 / R) ** 4))
    paths["fig2d"] = write_table(
        tmp_path / "fig2d.csv", "fig2d",
        [("R", "nm"), ("r", "dimensionless"), ("lambda_eff_over_2pi", "Hz")],
        rows_d,
        run={"figure": "fig2d", "grid_shape": [4, 3], "contour_level_Hz": 1.0e6},
    )
    paths["fig2e"] = write_table(
        tmp_path / "fig2e.csv", "fig2e",
        [("R", "nm"), ("r", "dimensionless"), ("cooperativity", "dimensionless")],
        rows_e,
        run={"figure": "fig2e", "grid_shape": [4, 3], "contour_level": 1.0},
    )

    ts = [0.05 * k for k in range(41)]
    for panel, r_val, gk in (("a", 0.0, 5.0), ("d", 4.5, 50.0)):
        paths[f"fig3{panel}"] = write_table(
            tmp_path / f"fig3{panel}.csv", f"fig3{panel}",
            [("lambda_t", "1/lambda"), ("spin_excitation", "dimensionless"),
             ("magnon_number", "dimensionless"), ("phonon_number", "dimensionless")],
            [(t, 0.5 + 0.5 * math.cos(6 * t) * math.exp(-t),
              0.5 - 0.5 * math.cos(6 * t) * math.exp(-t),
              0.2 * (1 - math.exp(-3 * t))) for t in ts],
            run={"figure": f"fig3{panel}", "r": r_val,
                 "rates_lambda_units": {"gamma_K": gk, "gamma_s": 0.05, "Gamma_m": 1.1}},
        )

    paths["fig4a"] = write_table(
        tmp_path / "fig4a.csv", "fig4a",
        [("lambda_t", "1/lambda"), ("contangle_r0p0", "dimensionless"),
         ("contangle_r1p5", "dimensionless"), ("contangle_r3p0", "dimensionless"),
         ("contangle_r4p5", "dimensionless")],
        [(t, 0.001, 0.1 * abs(math.sin(3 * t)), 0.9 * abs(math.sin(10 * t)),
          abs(math.sin(30 * t))) for t in ts],
        run={"figure": "fig4a", "decay_free": True},
    )
    paths["fig4b"] = write_table(
        tmp_path / "fig4b.csv", "fig4b",
        [("lambda_t", "1/lambda"), ("min_residual_contangle", "dimensionless"),
         ("three_tangle", "dimensionless"), ("leaked_weight", "dimensionless")],
        [(t, abs(math.sin(30 * t)), math.sin(30 * t) ** 2, 0.01) for t in ts],
        run={"figure": "fig4b", "r": 4.5, "decay_free": True},
    )
    return tmp_path, paths
