"""Declarative scenario runner: named experiments, sweeps, tabular output.

A scenario configuration is a JSON document (or plain dict).  Named
scenarios carry complete defaults; any field may be overridden.  Unknown
keys are rejected so typos fail loudly.  Schema:

    {
      "scenario": "fig1c",             # or fig1b/e/f, fig2a/b, fig4a/b, custom
      "system": "three_level",         # or "hybrid_open"
      "mode": "msd",                   # or "stirap"
      "pulses": {"family": "transfer", "eta0_over_2pi_mhz": 1.6,
                 "t1_us": 0.75, "t2_us": 0.25, "width_us": 0.408},
      "grid": {"t_start_us": -0.2, "t_end_us": 1.2, "steps": 20000},
      "hybrid": {...},                 # hybrid_open only
      "dissipation": {...},            # hybrid_open only
      "sweep": {"path": "dissipation.kappa_ratio", "values": [1, 50, 100, 200]},
      "workers": 1,
      "output": {"directory": null}
    }

All trajectory tables are plain delimited text with 13 significant digits
and LF line endings; identical configurations produce identical bytes.
The run summary repeats the final/maximal table values after passing them
through the same decimal formatting, so summary and table agree exactly.
"""
from __future__ import annotations

import concurrent.futures
import copy
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .backend import backend_name
from .dynamics import (
    DissipationSpec,
    HybridSystemSpec,
    IDX_PHI1,
    IDX_PHI2,
    IDX_PHI3,
    PRODUCT_BASIS,
    TimeGrid,
    Trajectory,
    hybrid_hamiltonian,
    propagate_lindblad,
    propagate_schrodinger,
)
from .errors import ConfigError
from .hamiltonians import msd_hamiltonian, stirap_hamiltonian
from .pulses import ControlWaveform, superposition_waveform, transfer_waveform

MAX_GRID_STEP = 1e-3  # us

_TRANSFER_PULSES = {"family": "transfer", "eta0_over_2pi_mhz": 1.6,
                    "t1_us": 0.75, "t2_us": 0.25, "width_us": 0.408}
_FIG1_GRID = {"t_start_us": -0.2, "t_end_us": 1.2, "steps": 20000}
_FIG2_GRID = {"t_start_us": 0.0, "t_end_us": 2.0, "steps": 20000}
_FIG4_GRID = {"t_start_us": 0.0, "t_end_us": 1.2, "steps": 20000}
_FIG4_DISSIPATION = {"kappa_per_us": 1.0 / 50.0, "gamma_per_us": 1.0 / 6000.0,
                     "gamma_phi_per_us": 1.0 / 600.0, "kappa_ratio": 1.0}
_FIG4_HYBRID = {"g_over_2pi_mhz": 20.0, "delta_over_2pi_mhz": 200.0,
                "omega0_over_2pi_mhz": 16.0}


def _three_level(mode, pulses, grid):
    return {"system": "three_level", "mode": mode,
            "pulses": dict(pulses), "grid": dict(grid), "workers": 1}


def _hybrid(sweep=None):
    cfg = {"system": "hybrid_open", "mode": "msd",
           "pulses": {"family": "transfer", "t1_us": 0.75, "t2_us": 0.25,
                      "width_us": 0.408},
           "grid": dict(_FIG4_GRID),
           "hybrid": dict(_FIG4_HYBRID),
           "dissipation": dict(_FIG4_DISSIPATION),
           "workers": 1}
    if sweep is not None:
        cfg["sweep"] = copy.deepcopy(sweep)
    return cfg


SCENARIOS: dict[str, dict] = {
    "fig1b": _three_level("stirap", _TRANSFER_PULSES, _FIG1_GRID),
    "fig1c": _three_level("msd", _TRANSFER_PULSES, _FIG1_GRID),
    "fig1e": _three_level("stirap", {**_TRANSFER_PULSES, "t1_us": 0.9}, _FIG1_GRID),
    "fig1f": _three_level("msd", {**_TRANSFER_PULSES, "t1_us": 0.9}, _FIG1_GRID),
    "fig2a": _three_level("stirap", {"family": "superposition",
                                     "eta0_over_2pi_mhz": 1.6, "t3_us": 1.15,
                                     "t4_us": 0.25, "width_us": 0.408}, _FIG2_GRID),
    "fig2b": _three_level("msd", {"family": "superposition",
                                  "eta0_over_2pi_mhz": 1.6, "t3_us": 1.15,
                                  "t4_us": 0.25, "width_us": 0.408}, _FIG2_GRID),
    "fig4a": _hybrid(),
    "fig4b": _hybrid(sweep={"path": "dissipation.kappa_ratio",
                            "values": [1.0, 50.0, 100.0, 200.0]}),
}

SCENARIO_DESCRIPTIONS = {
    "fig1b": "Gaussian-pulse population transfer, bare STIRAP driving",
    "fig1c": "Gaussian-pulse population transfer, corrected (msd) driving",
    "fig1e": "delayed-pulse transfer (t1 = 0.9 us), bare STIRAP driving",
    "fig1f": "delayed-pulse transfer (t1 = 0.9 us), corrected (msd) driving",
    "fig2a": "equal-superposition preparation, bare STIRAP driving",
    "fig2b": "equal-superposition preparation, corrected (msd) driving",
    "fig4a": "dissipative transfer on the emitter-resonator product space",
    "fig4b": "fig4a plus a resonator-decay-rate sweep",
    "custom": "fully explicit configuration (no defaults)",
}

_TOP_KEYS = {"scenario", "system", "mode", "pulses", "grid", "hybrid",
             "dissipation", "sweep", "workers", "output"}
_PULSE_KEYS = {
    "transfer": {"family", "eta0_over_2pi_mhz", "t1_us", "t2_us", "width_us"},
    "superposition": {"family", "eta0_over_2pi_mhz", "t3_us", "t4_us", "width_us"},
}
_GRID_KEYS = {"t_start_us", "t_end_us", "steps"}
_HYBRID_KEYS = {"g_over_2pi_mhz", "delta_over_2pi_mhz", "omega0_over_2pi_mhz"}
_DISS_KEYS = {"kappa_per_us", "gamma_per_us", "gamma_phi_per_us", "kappa_ratio"}
_SWEEP_KEYS = {"path", "values"}
_OUTPUT_KEYS = {"directory"}


@dataclass(frozen=True)
class SweepSpec:
    path: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved description of one experiment."""

    scenario: str
    system: str
    mode: str
    pulses: dict
    grid: TimeGrid
    hybrid: Optional[HybridSystemSpec]
    dissipation: Optional[DissipationSpec]
    sweep: Optional[SweepSpec]
    workers: int
    output_dir: Optional[str]
    raw: dict  # resolved document, echoed into summaries and sweeps


def _reject_unknown(block: dict, allowed: set, context: str) -> None:
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key '{sorted(unknown)[0]}' in {context}")


def _require(block: dict, key: str, context: str):
    if key not in block:
        raise ConfigError(f"missing required key '{key}' in {context}")
    return block[key]


def _positive(value, key: str):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
        raise ConfigError(f"'{key}' must be a positive number, got {value!r}")
    return value


def _merge(defaults: dict, override: dict) -> dict:
    out = copy.deepcopy(defaults)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def set_config_path(raw: dict, dotted: str, value) -> None:
    """Assign raw[a][b]... = value for a dotted path; path must exist or be
    a legal new leaf of an existing block."""
    parts = dotted.split(".")
    node = raw
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            raise ConfigError(f"config path '{dotted}' does not name a block")
        node = node[part]
    node[parts[-1]] = value


def load_config(source) -> ScenarioConfig:
    """Parse a config document (dict, JSON text, or file path)."""
    if isinstance(source, ScenarioConfig):
        return source
    if isinstance(source, dict):
        raw = copy.deepcopy(source)
    else:
        if isinstance(source, Path) or (isinstance(source, str)
                                        and not source.lstrip().startswith("{")):
            try:
                text = Path(source).read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read config file {source!r}: {exc}") from exc
        else:
            text = source
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config document is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    return resolve_config(raw)


def resolve_config(raw: dict) -> ScenarioConfig:
    scenario = _require(raw, "scenario", "config")
    if scenario not in SCENARIOS and scenario != "custom":
        known = ", ".join(sorted(SCENARIOS) + ["custom"])
        raise ConfigError(f"unknown scenario id '{scenario}' (known: {known})")

    defaults = copy.deepcopy(SCENARIOS.get(scenario, {}))
    merged = _merge(defaults, {k: v for k, v in raw.items() if k != "scenario"})
    merged["scenario"] = scenario
    _reject_unknown(merged, _TOP_KEYS, "config")

    system = _require(merged, "system", "config")
    if system not in ("three_level", "hybrid_open"):
        raise ConfigError(f"'system' must be three_level or hybrid_open, got {system!r}")
    mode = _require(merged, "mode", "config")
    if mode not in ("stirap", "msd"):
        raise ConfigError(f"'mode' must be stirap or msd, got {mode!r}")

    pulses = dict(_require(merged, "pulses", "config"))
    family = _require(pulses, "family", "pulses")
    if family not in _PULSE_KEYS:
        raise ConfigError(f"'pulses.family' must be transfer or superposition, got {family!r}")
    _reject_unknown(pulses, _PULSE_KEYS[family], "pulses")
    _positive(_require(pulses, "width_us", "pulses"), "pulses.width_us")
    if system == "hybrid_open" and family != "transfer":
        raise ConfigError("hybrid_open scenarios require the transfer pulse family")
    if system == "three_level":
        _positive(_require(pulses, "eta0_over_2pi_mhz", "pulses"),
                  "pulses.eta0_over_2pi_mhz")

    grid_block = dict(_require(merged, "grid", "config"))
    _reject_unknown(grid_block, _GRID_KEYS, "grid")
    steps = _require(grid_block, "steps", "grid")
    if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
        raise ConfigError(f"'grid.steps' must be a positive integer, got {steps!r}")
    t_start = _require(grid_block, "t_start_us", "grid")
    t_end = _require(grid_block, "t_end_us", "grid")
    if not t_end > t_start:
        raise ConfigError("'grid.t_end_us' must exceed 'grid.t_start_us'")
    grid = TimeGrid(t_start=float(t_start), t_end=float(t_end), steps=steps)
    if grid.h > MAX_GRID_STEP * (1 + 1e-12):
        raise ConfigError(
            f"'grid.steps' too coarse: step {grid.h:.3e} us exceeds {MAX_GRID_STEP} us"
        )

    hybrid = dissipation = None
    if system == "hybrid_open":
        hblock = dict(_require(merged, "hybrid", "config"))
        _reject_unknown(hblock, _HYBRID_KEYS, "hybrid")
        for key in _HYBRID_KEYS:
            _positive(_require(hblock, key, "hybrid"), f"hybrid.{key}")
        hybrid = HybridSystemSpec(
            g_over_2pi=float(hblock["g_over_2pi_mhz"]),
            delta_over_2pi=float(hblock["delta_over_2pi_mhz"]),
            omega0_over_2pi=float(hblock["omega0_over_2pi_mhz"]),
            t1=float(pulses["t1_us"]), t2=float(pulses["t2_us"]),
            width=float(pulses["width_us"]),
        )
        dblock = dict(_require(merged, "dissipation", "config"))
        _reject_unknown(dblock, _DISS_KEYS, "dissipation")
        ratio = dblock.get("kappa_ratio", 1.0)
        if not isinstance(ratio, (int, float)) or isinstance(ratio, bool) or ratio < 0:
            raise ConfigError(f"'dissipation.kappa_ratio' must be >= 0, got {ratio!r}")
        for key in ("kappa_per_us", "gamma_per_us", "gamma_phi_per_us"):
            value = _require(dblock, key, "dissipation")
            if not isinstance(value, (int, float)) or isinstance(value, bool) or value < 0:
                raise ConfigError(f"'dissipation.{key}' must be >= 0, got {value!r}")
        dissipation = DissipationSpec(
            kappa=float(dblock["kappa_per_us"]) * float(ratio),
            gamma=float(dblock["gamma_per_us"]),
            gamma_phi=float(dblock["gamma_phi_per_us"]),
        )

    sweep = None
    if "sweep" in merged and merged["sweep"] is not None:
        sblock = dict(merged["sweep"])
        _reject_unknown(sblock, _SWEEP_KEYS, "sweep")
        path = _require(sblock, "path", "sweep")
        values = _require(sblock, "values", "sweep")
        if not isinstance(values, (list, tuple)) or len(values) == 0:
            raise ConfigError("'sweep.values' must be a non-empty list")
        sweep = SweepSpec(path=str(path),
                          values=tuple(float(v) for v in values))

    workers = merged.get("workers", 1)
    if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
        raise ConfigError(f"'workers' must be a positive integer, got {workers!r}")

    output_dir = None
    if "output" in merged and merged["output"] is not None:
        oblock = dict(merged["output"])
        _reject_unknown(oblock, _OUTPUT_KEYS, "output")
        output_dir = oblock.get("directory")

    return ScenarioConfig(
        scenario=scenario, system=system, mode=mode, pulses=pulses, grid=grid,
        hybrid=hybrid, dissipation=dissipation, sweep=sweep, workers=workers,
        output_dir=output_dir, raw=merged,
    )


def build_waveform(cfg: ScenarioConfig) -> ControlWaveform:
    p = cfg.pulses
    if cfg.system == "hybrid_open":
        return cfg.hybrid.waveform()
    if p["family"] == "transfer":
        return transfer_waveform(p["eta0_over_2pi_mhz"], p["t1_us"], p["t2_us"],
                                 p["width_us"])
    return superposition_waveform(p["eta0_over_2pi_mhz"], p["t3_us"], p["t4_us"],
                                  p["width_us"])


def _target_state(cfg: ScenarioConfig) -> np.ndarray:
    if cfg.system == "hybrid_open":
        target = np.zeros(8, dtype=complex)
        target[IDX_PHI1] = 1.0
        return target
    if cfg.pulses["family"] == "superposition":
        return np.array([1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)
    return np.array([1.0, 0.0, 0.0], dtype=complex)


@dataclass(frozen=True)
class RunSummary:
    """Machine-readable digest of one run; values match the emitted table."""

    scenario: str
    system: str
    mode: str
    backend: str
    final_populations: dict
    final_fidelity: float
    max_mean_photon: Optional[float]
    wall_time_s: float
    grid: dict
    config: dict

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "system": self.system,
            "mode": self.mode,
            "backend": self.backend,
            "final_populations": {k: _table_float(v)
                                  for k, v in self.final_populations.items()},
            "final_fidelity": _table_float(self.final_fidelity),
            "max_mean_photon": (None if self.max_mean_photon is None
                                else _table_float(self.max_mean_photon)),
            "wall_time_s": self.wall_time_s,
            "grid": self.grid,
            "config": self.config,
        }


def run_scenario(cfg: ScenarioConfig) -> tuple[Trajectory, RunSummary]:
    """Execute one scenario: closed three-level runs start from phi2, open
    hybrid runs from |0eg><0eg|."""
    started = time.perf_counter()
    target = _target_state(cfg)
    if cfg.system == "three_level":
        waveform = build_waveform(cfg)
        sampler = (msd_hamiltonian(waveform) if cfg.mode == "msd"
                   else stirap_hamiltonian(waveform))
        psi0 = np.array([0.0, 1.0, 0.0], dtype=complex)
        traj = propagate_schrodinger(sampler, psi0, cfg.grid, target=target)
        finals = {f"P{i + 1}": float(p) for i, p in enumerate(traj.populations[-1])}
    else:
        sampler = hybrid_hamiltonian(cfg.hybrid, cfg.mode)
        rho0 = np.zeros((8, 8), dtype=complex)
        rho0[IDX_PHI2, IDX_PHI2] = 1.0
        traj = propagate_lindblad(sampler, rho0, cfg.dissipation, cfg.grid,
                                  target=target)
        finals = {f"P{i + 1}": float(traj.populations[-1, idx])
                  for i, idx in enumerate((IDX_PHI1, IDX_PHI2, IDX_PHI3))}
        finals.update({f"P_{lab}": float(p)
                       for lab, p in zip(PRODUCT_BASIS, traj.populations[-1])})
    wall = time.perf_counter() - started
    summary = RunSummary(
        scenario=cfg.scenario, system=cfg.system, mode=cfg.mode,
        backend=backend_name(), final_populations=finals,
        final_fidelity=float(traj.fidelity[-1]),
        max_mean_photon=traj.max_mean_photon(),
        wall_time_s=wall,
        grid={"t_start_us": cfg.grid.t_start, "t_end_us": cfg.grid.t_end,
              "steps": cfg.grid.steps},
        config=cfg.raw,
    )
    return traj, summary


def _sweep_point(raw: dict, path: str, value: float):
    point_raw = copy.deepcopy(raw)
    point_raw["sweep"] = None  # survives the defaults re-merge, unlike a pop
    set_config_path(point_raw, path, value)
    cfg = resolve_config(point_raw)
    traj, summary = run_scenario(cfg)
    return value, summary.final_fidelity, traj.diagnostics


def run_sweep(cfg: ScenarioConfig):
    """One independent run per sweep value; rows sorted by sweep value.

    Returns a list of (value, final_fidelity, diagnostics) tuples.
    """
    if cfg.sweep is None:
        raise ConfigError("scenario has no 'sweep' block")
    args = [(cfg.raw, cfg.sweep.path, v) for v in cfg.sweep.values]
    if cfg.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_sweep_point_star, args))
    else:
        rows = [_sweep_point(*a) for a in args]
    return sorted(rows, key=lambda row: row[0])


def _sweep_point_star(args):
    return _sweep_point(*args)


# ---------------------------------------------------------------------------
# output emission
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12e}"


def _table_float(x: float) -> float:
    """Round-trip a value through the table's decimal format."""
    return float(_fmt(x))


def _table_columns(traj: Trajectory, system: str):
    if system == "three_level":
        header = ["t", "P1", "P2", "P3", "F"]
        cols = [traj.times] + [traj.populations[:, i] for i in range(3)]
        cols.append(traj.fidelity)
        return header, cols
    header = ["t", "P1", "P2", "P3", "F", "nbar"]
    cols = [traj.times,
            traj.populations[:, IDX_PHI1],
            traj.populations[:, IDX_PHI2],
            traj.populations[:, IDX_PHI3],
            traj.fidelity, traj.mean_photon]
    for i, lab in enumerate(PRODUCT_BASIS):
        header.append(f"P_{lab}")
        cols.append(traj.populations[:, i])
    return header, cols


def emit_table(traj: Trajectory, path, system: str = "three_level") -> None:
    """Write the trajectory as delimited text, one row per grid sample."""
    header, cols = _table_columns(traj, system)
    lines = [",".join(header)]
    data = np.column_stack(cols)
    for row in data:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_sweep(rows, path, value_name: str = "kappa_ratio") -> None:
    lines = [f"{value_name},fidelity"]
    for value, fid, _ in rows:
        lines.append(f"{_fmt(value)},{_fmt(fid)}")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_summary(summary: RunSummary, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(summary.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def execute(cfg: ScenarioConfig, out_dir=None) -> dict:
    """Run a scenario end to end and write its artifacts.

    Returns {"trajectory": path, "summary": path, "sweep": path | None,
    "summary_data": RunSummary}.
    """
    out = Path(out_dir or cfg.output_dir or ".")
    traj, summary = run_scenario(cfg)
    paths = {
        "trajectory": out / f"{cfg.scenario}_trajectory.csv",
        "summary": out / f"{cfg.scenario}_summary.json",
        "sweep": None,
        "summary_data": summary,
    }
    emit_table(traj, paths["trajectory"], cfg.system)
    write_summary(summary, paths["summary"])
    if cfg.sweep is not None:
        rows = run_sweep(cfg)
        paths["sweep"] = out / f"{cfg.scenario}_sweep.csv"
        emit_sweep(rows, paths["sweep"], value_name=cfg.sweep.path.split(".")[-1])
    return paths
