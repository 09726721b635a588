"""Figure pipelines and the deterministic parallel grid runner.

All trajectory pipelines work in coupling-normalized units: every rate is a
multiple of the bare tripartite coupling and time grids are in units of its
inverse.  The caption rate set (magnon decay 5 or 50, spin dephasing 0.05,
effective mechanical decay 1.1) is applied on top of the physically derived
coupling ratio ``g0 / lambda``.

Detuning presets (resolved choice, see the run metadata): every trajectory
uses the red detuning ``delta_K = delta_NV - Delta_m`` with ``delta_NV = 0``.
The squeezed-frame mechanical detuning is ``max(16, 2 e^r)`` for the
population-dynamics runs (floor keeps the exchange line within the resonance
acceptance band at r = 0 while bounding the drive-induced phonon response)
and ``max(40, 7 e^r)`` for the decay-free entanglement runs (floor keeps
the unamplified run essentially unentangled; the growth keeps the amplified
dynamics in the few-excitation subspace so the three-qubit projection stays
faithful).
"""

from __future__ import annotations

import math
import multiprocessing
import os
from dataclasses import dataclass, field, replace, asdict

import numpy as np

from . import __version__
from .constants import DEFAULT_CONSTANTS, constants_hash, load_constants
from .dynamics import CutoffPolicy, EvolutionSpec, Trajectory, converged_evolve
from .entanglement import (
    dominant_pure_state,
    min_residual_contangle,
    project_to_three_qubits,
    three_tangle_pure,
)
from .linalg import SpaceLayout
from .model import (
    DerivedParams,
    PhysicalParams,
    build_hamiltonian_squeezed,
    collapse_operators,
    derive_params,
    red_detuning,
    to_lambda_units,
    trapped_diamond_params,
)
from .tables import ResultTable, write_csv, write_error_report, write_json


class ConfigError(ValueError):
    """Malformed run configuration."""


class GridFailure(RuntimeError):
    """More than 10% of sweep points failed."""


TWO_PI = 2.0 * math.pi

FIG3_GAMMA_S = 0.05
FIG3_GAMMA_M_EFF = 1.1
FIG3_PANELS = (("a", 0.0, 5.0), ("b", 3.0, 5.0), ("c", 3.0, 50.0), ("d", 4.5, 50.0))
FIG3_DETUNING_FLOOR = 16.0     # units of the bare coupling
FIG3_DETUNING_RATIO = 2.0      # per unit of enhanced coupling
FIG4_DETUNING_FLOOR = 40.0
FIG4_DETUNING_RATIO = 7.0
FIG4_SQUEEZINGS = (0.0, 1.5, 3.0, 4.5)
FIG3_RTOL = 1e-6     # occupations only; no stored states
FIG3_ATOL = 1e-9
FIG4_RTOL = 3e-10    # stored states must stay positive to 1e-7
FIG4_ATOL = 1e-12


# --- run configuration -------------------------------------------------------

@dataclass
class AxisSpec:
    name: str
    lo: float
    hi: float
    count: int
    scale: str = "linear"      # or "log"

    def values(self) -> np.ndarray:
        if self.count < 2:
            raise ConfigError(f"axis {self.name}: count must be >= 2, got {self.count}")
        if self.scale == "linear":
            return np.linspace(self.lo, self.hi, self.count)
        if self.scale == "log":
            if self.lo <= 0 or self.hi <= 0:
                raise ConfigError(f"axis {self.name}: log axis needs positive bounds")
            return np.geomspace(self.lo, self.hi, self.count)
        raise ConfigError(f"axis {self.name}: unknown scale {self.scale!r}")


@dataclass
class RunConfig:
    params: dict = field(default_factory=dict)      # PhysicalParams overrides
    axes: list[AxisSpec] = field(default_factory=list)
    options: dict = field(default_factory=dict)     # per-figure knobs
    constants_path: str | None = None
    workers: int = 1
    force: bool = False
    json_mirror: bool = False
    seed: int = 0

    def constants(self) -> dict[str, float]:
        return load_constants(self.constants_path)

    def physical(self, **extra) -> PhysicalParams:
        overrides = dict(self.params)
        overrides.update(extra)
        return trapped_diamond_params(**overrides)

    def opt(self, key: str, default):
        val = self.options.get(key, default)
        return type(default)(val) if default is not None else val


def parse_config(path: str) -> RunConfig:
    """Flat ``key = value`` configuration with ``[dotted.section]`` headers.

    ``[params]`` holds PhysicalParams overrides, ``[options]`` pipeline knobs,
    ``[axis.<name>]`` sweep axes with ``min``/``max``/``count``/``scale``.
    """
    cfg = RunConfig()
    section = ""
    axes: dict[str, dict] = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if section == "params":
                try:
                    cfg.params[key] = float(val)
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: bad number {val!r}") from exc
            elif section == "options":
                cfg.options[key] = val
            elif section.startswith("axis."):
                axes.setdefault(section[5:], {})[key] = val
            elif section == "constants":
                if key != "path":
                    raise ConfigError(f"{path}:{lineno}: [constants] supports only 'path'")
                cfg.constants_path = val
            else:
                raise ConfigError(f"{path}:{lineno}: unknown section {section!r}")
    for name, spec in axes.items():
        try:
            cfg.axes.append(
                AxisSpec(
                    name=name,
                    lo=float(spec["min"]),
                    hi=float(spec["max"]),
                    count=int(spec["count"]),
                    scale=spec.get("scale", "linear"),
                )
            )
        except KeyError as exc:
            raise ConfigError(f"axis {name}: missing {exc}") from exc
    return cfg


def _base_metadata(cfg: RunConfig, phys: PhysicalParams, run: dict) -> dict:
    consts = cfg.constants()
    return {
        "version": __version__,
        "constants_sha256": constants_hash(consts),
        "physical_params": {k: v for k, v in asdict(phys).items() if v is not None},
        "run": run,
    }


# --- generic grid runner -----------------------------------------------------

def _eval_point(args):
    fn, index, point = args
    try:
        return index, fn(point), None
    except Exception as exc:  # isolated per point
        return index, None, f"{type(exc).__name__}: {exc}"


def run_grid(point_fn, points: list, workers: int = 1):
    """Evaluate ``point_fn`` over ``points`` with a worker pool.

    Returns ``(results, errors)`` with results in input order regardless of
    completion order; failures are isolated into ``errors`` as
    ``{"index", "point", "error"}`` records.  Raises :class:`GridFailure`
    if more than 10% of the points fail.
    """
    jobs = [(point_fn, i, p) for i, p in enumerate(points)]
    if workers <= 1 or len(points) <= 1:
        raw = [_eval_point(job) for job in jobs]
    else:
        with multiprocessing.Pool(processes=min(workers, len(points))) as pool:
            raw = pool.map(_eval_point, jobs, chunksize=max(1, len(jobs) // (4 * workers)))
    raw.sort(key=lambda item: item[0])
    results = []
    errors = []
    for index, value, err in raw:
        if err is None:
            results.append((index, value))
        else:
            errors.append({"index": index, "point": repr(points[index]), "error": err})
    if len(errors) > 0.10 * len(points):
        raise GridFailure(f"{len(errors)} of {len(points)} grid points failed")
    return results, errors


# --- figure 2: parameter maps -------------------------------------------------

def _fig2_point(args):
    overrides, constants, R, r = args
    phys = trapped_diamond_params(**{**overrides, "R": R, "r_requested": r})
    dp = derive_params(phys, constants)
    return dp.lambda_eff / TWO_PI, dp.C, dp.lambda_eff / dp.g0


def fig2_tables(cfg: RunConfig) -> tuple[list[ResultTable], list[dict]]:
    consts = cfg.constants()
    phys = cfg.physical()
    nR = cfg.opt("fig2_R_count", 61)
    nr = cfg.opt("fig2_r_count", 51)
    R_axis = AxisSpec("R", cfg.opt("fig2_R_min", 20e-9), cfg.opt("fig2_R_max", 200e-9), nR, "log").values()
    r_axis = AxisSpec("r", 0.0, 5.0, nr, "linear").values()

    meta = lambda run: _base_metadata(cfg, phys, run)  # noqa: E731
    tables: list[ResultTable] = []
    all_errors: list[dict] = []

    # (a) enhancement versus squeezing: exact exponential law
    ta = ResultTable("fig2a", [("r", "dimensionless"), ("enhancement", "lambda_eff/lambda")],
                     metadata=meta({"figure": "fig2a"}))
    for r in r_axis:
        ta.add_row((r, math.exp(r)))
    tables.append(ta)

    # (b) coupling ratio versus r for selected radii
    radii = [50e-9, 100e-9, 200e-9]
    tb = ResultTable(
        "fig2b",
        [("r", "dimensionless")] + [(f"ratio_R{round(R*1e9)}nm", "lambda_eff/g0") for R in radii],
        metadata=meta({"figure": "fig2b", "radii_nm": [round(R * 1e9) for R in radii]}),
    )
    dps = {R: derive_params(cfg.physical(R=R, r_requested=0.0), consts) for R in radii}
    for r in r_axis:
        tb.add_row((r, *[math.exp(r) * dps[R].lam / dps[R].g0 for R in radii]))
    tables.append(tb)

    # (c) coupling ratio versus radius for selected squeezings
    rs = [2.0, 3.0, 4.0]
    tc = ResultTable(
        "fig2c",
        [("R", "nm")] + [(f"ratio_r{r:g}", "lambda_eff/g0") for r in rs],
        metadata=meta({"figure": "fig2c", "squeezings": rs}),
    )
    for R in R_axis:
        dpR = derive_params(cfg.physical(R=float(R), r_requested=0.0), consts)
        tc.add_row((R * 1e9, *[math.exp(r) * dpR.lam / dpR.g0 for r in rs]))
    tables.append(tc)

    # (d)/(e) grid maps of the enhanced coupling and the cooperativity
    points = [(dict(cfg.params), consts, float(R), float(r)) for R in R_axis for r in r_axis]
    results, errors = run_grid(_fig2_point, points, workers=cfg.workers)
    all_errors.extend({**e, "table": "fig2d/e"} for e in errors)
    ok = dict(results)
    td = ResultTable(
        "fig2d",
        [("R", "nm"), ("r", "dimensionless"), ("lambda_eff_over_2pi", "Hz")],
        metadata=meta({"figure": "fig2d", "contour_level_Hz": 1.0e6,
                       "grid_shape": [len(R_axis), len(r_axis)]}),
    )
    te = ResultTable(
        "fig2e",
        [("R", "nm"), ("r", "dimensionless"), ("cooperativity", "dimensionless")],
        metadata=meta({"figure": "fig2e", "contour_level": 1.0,
                       "grid_shape": [len(R_axis), len(r_axis)]}),
    )
    for idx, (R, r) in enumerate([(R, r) for R in R_axis for r in r_axis]):
        if idx not in ok:
            continue
        lam_eff_hz, C, _ = ok[idx]
        td.add_row((R * 1e9, r, lam_eff_hz))
        te.add_row((R * 1e9, r, C))
    tables.extend([td, te])
    return tables, all_errors


# --- normalized trajectory systems ---------------------------------------------

def figure_detuning(r: float, kind: str) -> float:
    """Squeezed-frame mechanical detuning preset (units of the bare coupling)."""
    if kind == "fig3":
        return max(FIG3_DETUNING_FLOOR, FIG3_DETUNING_RATIO * math.exp(r))
    if kind == "fig4":
        return max(FIG4_DETUNING_FLOOR, FIG4_DETUNING_RATIO * math.exp(r))
    raise ConfigError(f"unknown detuning preset {kind!r}")


def normalized_system(
    cfg_params: dict,
    constants: dict[str, float],
    r: float,
    gamma_K: float,
    gamma_s: float,
    Gamma_m: float,
    kind: str,
) -> tuple[DerivedParams, float]:
    """Coupling-normalized parameter set for a figure run.

    Returns the lambda-unit :class:`DerivedParams` with the caption rate set
    applied, plus the mechanical detuning preset.
    """
    phys = trapped_diamond_params(**{**cfg_params, "r_requested": r})
    dpl = to_lambda_units(derive_params(phys, constants))
    dpl = replace(dpl, gamma_K=gamma_K, gamma_s=gamma_s, Gamma_m=Gamma_m)
    return dpl, figure_detuning(r, kind)


def _trajectory_spec_builder(dpl: DerivedParams, delta_m_eff: float, tgrid, rtol, atol, store):
    det = red_detuning(delta_m_eff)

    def build(layout: SpaceLayout) -> EvolutionSpec:
        H = build_hamiltonian_squeezed(dpl, det, layout)
        c_ops = collapse_operators(dpl, "squeezed", layout)
        psi0 = layout.basis_state(1, 0, 0)   # excited spin, both modes empty
        return EvolutionSpec(
            hamiltonian=H, collapse_ops=c_ops, initial_state=psi0,
            time_grid=tgrid, layout=layout, rtol=rtol, atol=atol, store_states=store,
        )

    return build


def _run_fig3_panel(args):
    (panel, r, gamma_K, cfg_params, constants, t_max, n_points, n_b0, rtol, atol) = args
    dpl, dm = normalized_system(cfg_params, constants, r, gamma_K, FIG3_GAMMA_S, FIG3_GAMMA_M_EFF, "fig3")
    tgrid = np.linspace(0.0, t_max, n_points)
    build = _trajectory_spec_builder(dpl, dm, tgrid, rtol, atol, store=False)
    traj = converged_evolve(build, CutoffPolicy(n_b=n_b0))
    for name, series in traj.observables().items():
        if series.min() < -1e-8:
            raise RuntimeError(f"panel {panel}: {name} below physical range")
    if traj.spin_excitation.max() > 1.0 + 1e-6:
        raise RuntimeError(f"panel {panel}: spin excitation above 1")
    return {
        "panel": panel,
        "r": r,
        "gamma_K": gamma_K,
        "delta_m_eff": dm,
        "g0": dpl.g0,
        "times": traj.times,
        "spin": traj.spin_excitation,
        "phonon": traj.phonon_number,
        "magnon": traj.magnon_number,
        "n_b": traj.layout.dims[1],
        "converged": traj.converged,
        "nfev": traj.nfev,
    }


def fig3_tables(cfg: RunConfig) -> tuple[list[ResultTable], list[dict]]:
    consts = cfg.constants()
    phys = cfg.physical(r_requested=0.0)
    t_max = cfg.opt("fig3_t_max", 20.0)
    n_points = cfg.opt("fig3_points", 400)
    n_b0 = cfg.opt("fig3_n_b0", 8)
    jobs = [
        (panel, r, gK, dict(cfg.params), consts, t_max, n_points, n_b0, FIG3_RTOL, FIG3_ATOL)
        for panel, r, gK in FIG3_PANELS
    ]
    results, errors = run_grid(_run_fig3_panel, jobs, workers=cfg.workers)
    tables = []
    for _, res in results:
        meta = _base_metadata(cfg, phys, {
            "figure": f"fig3{res['panel']}",
            "r": res["r"],
            "rates_lambda_units": {"gamma_K": res["gamma_K"], "gamma_s": FIG3_GAMMA_S,
                                   "Gamma_m": FIG3_GAMMA_M_EFF},
            "g0_lambda_units": res["g0"],
            "detuning_preset": "red",
            "delta_m_eff_lambda_units": res["delta_m_eff"],
            "cutoffs": {"n_b": res["n_b"], "n_a": 3},
            "converged": res["converged"],
            "tolerances": {"rtol": FIG3_RTOL, "atol": FIG3_ATOL},
            "time_unit": "1/lambda",
        })
        t = ResultTable(
            f"fig3{res['panel']}",
            [("lambda_t", "1/lambda"), ("spin_excitation", "dimensionless"),
             ("magnon_number", "dimensionless"), ("phonon_number", "dimensionless")],
            metadata=meta,
        )
        for i in range(len(res["times"])):
            t.add_row((res["times"][i], res["spin"][i], res["magnon"][i], res["phonon"][i]))
        tables.append(t)
    return tables, [{**e, "table": "fig3"} for e in errors]


def _run_fig4_panel(args):
    (r, cfg_params, constants, t_max, n_points, n_b0, rtol, atol, want_tangle) = args
    dpl, dm = normalized_system(cfg_params, constants, r, 0.0, 0.0, 0.0, "fig4")
    tgrid = np.linspace(0.0, t_max, n_points)
    build = _trajectory_spec_builder(dpl, dm, tgrid, rtol, atol, store=True)
    traj = converged_evolve(build, CutoffPolicy(n_b=n_b0))
    layout = traj.layout
    mrc = np.array([min_residual_contangle(s, layout) for s in traj.states])
    out = {
        "r": r,
        "delta_m_eff": dm,
        "times": traj.times,
        "mrc": mrc,
        "n_b": layout.dims[1],
        "converged": traj.converged,
    }
    if want_tangle:
        taus = np.empty(len(traj.states))
        leaks = np.empty(len(traj.states))
        for i, s in enumerate(traj.states):
            psi, _ = dominant_pure_state(s)
            proj = project_to_three_qubits(psi, layout)
            leaks[i] = proj.leaked_weight
            taus[i] = three_tangle_pure(proj.amplitudes) if proj.leaked_weight < 1.0 else 0.0
        out["three_tangle"] = taus
        out["leaked_weight"] = leaks
    return out


def fig4_tables(cfg: RunConfig) -> tuple[list[ResultTable], list[dict]]:
    consts = cfg.constants()
    phys = cfg.physical(r_requested=0.0)
    t_max = cfg.opt("fig4_t_max", 0.5)
    n_points = cfg.opt("fig4_points", 5001)
    n_b0 = cfg.opt("fig4_n_b0", 8)
    jobs = [
        (r, dict(cfg.params), consts, t_max, n_points, n_b0, FIG4_RTOL, FIG4_ATOL, r == 4.5)
        for r in FIG4_SQUEEZINGS
    ]
    results, errors = run_grid(_run_fig4_panel, jobs, workers=cfg.workers)
    by_r = {res["r"]: res for _, res in results}
    if len(by_r) != len(FIG4_SQUEEZINGS):
        raise GridFailure("missing squeezing panels for the entanglement figure")

    run_meta = {
        "figure": "fig4a",
        "squeezings": list(FIG4_SQUEEZINGS),
        "detuning_preset": "red",
        "delta_m_eff_lambda_units": {f"{r:g}": by_r[r]["delta_m_eff"] for r in FIG4_SQUEEZINGS},
        "cutoffs": {f"{r:g}": by_r[r]["n_b"] for r in FIG4_SQUEEZINGS},
        "decay_free": True,
        "tolerances": {"rtol": FIG4_RTOL, "atol": FIG4_ATOL},
        "time_unit": "1/lambda",
    }
    ta = ResultTable(
        "fig4a",
        [("lambda_t", "1/lambda")] + [
            (f"contangle_r{str(r).replace('.', 'p')}", "dimensionless") for r in FIG4_SQUEEZINGS
        ],
        metadata=_base_metadata(cfg, phys, run_meta),
    )
    times = by_r[FIG4_SQUEEZINGS[0]]["times"]
    for i in range(len(times)):
        ta.add_row((times[i], *[by_r[r]["mrc"][i] for r in FIG4_SQUEEZINGS]))

    r_star = 4.5
    res = by_r[r_star]
    tb = ResultTable(
        "fig4b",
        [("lambda_t", "1/lambda"), ("min_residual_contangle", "dimensionless"),
         ("three_tangle", "dimensionless"), ("leaked_weight", "dimensionless")],
        metadata=_base_metadata(cfg, phys, {**run_meta, "figure": "fig4b", "r": r_star}),
    )
    for i in range(len(res["times"])):
        tb.add_row((res["times"][i], res["mrc"][i], res["three_tangle"][i], res["leaked_weight"][i]))
    return [ta, tb], [{**e, "table": "fig4"} for e in errors]


# --- custom parameter sweep ----------------------------------------------------

_SWEEP_COLUMNS = [
    ("lambda_over_2pi", "Hz"), ("g0_over_2pi", "Hz"), ("lambda_eff_over_2pi", "Hz"),
    ("Delta_m_over_2pi", "Hz"), ("gamma_th_over_2pi", "Hz"), ("Gamma_m_over_2pi", "Hz"),
    ("r", "dimensionless"), ("cooperativity", "dimensionless"),
]


def _sweep_point(args):
    overrides, constants, names, values = args
    point = dict(zip(names, values))
    phys = trapped_diamond_params(**{**overrides, **point})
    dp = derive_params(phys, constants)
    return (
        dp.lam / TWO_PI, dp.g0 / TWO_PI, dp.lambda_eff / TWO_PI, dp.Delta_m / TWO_PI,
        dp.gamma_th / TWO_PI, dp.Gamma_m / TWO_PI, dp.r, dp.C,
    )


def sweep_table(cfg: RunConfig) -> tuple[ResultTable, list[dict]]:
    if not cfg.axes:
        raise ConfigError("sweep requires at least one [axis.<name>] section")
    valid = set(PhysicalParams.__dataclass_fields__)
    for ax in cfg.axes:
        if ax.name not in valid:
            raise ConfigError(f"axis {ax.name!r} is not a physical parameter")
    grids = [ax.values() for ax in cfg.axes]
    names = [ax.name for ax in cfg.axes]
    mesh = [tuple(float(g[i]) for g, i in zip(grids, idx))
            for idx in np.ndindex(*[len(g) for g in grids])]
    consts = cfg.constants()
    points = [(dict(cfg.params), consts, names, vals) for vals in mesh]
    results, errors = run_grid(_sweep_point, points, workers=cfg.workers)
    phys = cfg.physical(r_requested=cfg.params.get("r_requested", 0.0))
    table = ResultTable(
        "sweep",
        [(n, "SI") for n in names] + _SWEEP_COLUMNS,
        metadata=_base_metadata(cfg, phys, {
            "figure": "sweep",
            "axes": [asdict(ax) for ax in cfg.axes],
        }),
    )
    ok = dict(results)
    for idx, vals in enumerate(mesh):
        if idx in ok:
            table.add_row((*vals, *ok[idx]))
    return table, errors


# --- emission ------------------------------------------------------------------

def emit_tables(tables: list[ResultTable], errors: list[dict], out_dir: str,
                force: bool = False, json_mirror: bool = False) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for table in tables:
        path = os.path.join(out_dir, f"{table.name}.csv")
        write_csv(table, path, force=force)
        written.append(path)
        if json_mirror:
            write_json(table, os.path.join(out_dir, f"{table.name}.json"), force=force)
    report = write_error_report(os.path.join(out_dir, "errors.json"), errors)
    if report:
        written.append(report)
    return written
