"""End-to-end gap estimation: prepare, step, measure, transform, fit.

The run record always carries both the fitted gap and the exact oracle gap of
the level the preparation actually populated, so systematic offsets can be
read off without re-running anything.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .adiabatic import (
    AdiabaticSchedule,
    ExactEvolver,
    NmrEvolver,
    TrotterEvolver,
    prepare,
    report_to_csv,
    sector_population_report,
)
from .config import ConfigError, ExperimentConfig, with_plan
from .exact import computational_state, reachable_gap
from .nmr import compile_trotter_step
from .spectroscopy import (
    FitResult,
    Spectrum,
    TimeSeries,
    UnitaryStepper,
    acquire,
    dft,
    epsilon_ft,
    fit_damped_sinusoid,
    fit_record,
    peak_pick,
    program_stepper,
    series_to_csv,
    spectrum_to_csv,
    systematic_offset,
)
from .trotter import TrotterPlan, symmetric3_step

# Offsets below this (rad/s) are treated as numerically zero in exponent fits.
_OFFSET_FLOOR = 1e-9


@dataclass(frozen=True)
class RunResult:
    config: ExperimentConfig
    delta_exact: float
    reachable_level: int
    delta_exp: float
    epsilon_ft: float
    systematic_offset: float
    fit: FitResult
    series: TimeSeries
    spectrum: Spectrum
    populations: list[tuple[int, float, float]]
    wall_per_step: float
    clamp_warnings: tuple[str, ...]

    @property
    def wall_total(self) -> float:
        return float(self.series.wall_times[-1])


def _resolve_evolver(cfg: ExperimentConfig):
    kind = cfg.evolver
    if kind == "default":
        kind = "exact" if cfg.method == "ideal" else "nmr"
    if kind == "exact":
        return ExactEvolver()
    if kind == "trotter":
        return TrotterEvolver(cfg.plan)
    method = cfg.method if cfg.method in ("w1", "w2") else "w1"
    return NmrEvolver(method, cfg.machine, cfg.plan, cfg.pulse_mode)


def _build_stepper(cfg: ExperimentConfig) -> tuple[UnitaryStepper, tuple[str, ...]]:
    if cfg.method == "ideal":
        u = symmetric3_step(cfg.model, cfg.plan)
        # Simulated time doubles as physical time for an ideal stepper.
        return UnitaryStepper(u, cfg.plan.t0), ()
    program = compile_trotter_step(cfg.model, cfg.plan, cfg.method, cfg.machine)
    return program_stepper(program, cfg.machine, cfg.pulse_mode), program.clamp_warnings


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    init = computational_state(cfg.model.n, cfg.init_index)
    pairs = cfg.init_bits.count("1")

    evolver = _resolve_evolver(cfg)
    prepared = prepare(cfg.model, init, AdiabaticSchedule(cfg.schedule_steps, cfg.t_ad, evolver))
    if isinstance(evolver, ExactEvolver):
        prepared_exact = prepared
    else:
        prepared_exact = prepare(
            cfg.model, init, AdiabaticSchedule(cfg.schedule_steps, cfg.t_ad, ExactEvolver()),
            check_adiabaticity=False,
        )
    level, delta_exact = reachable_gap(cfg.model, pairs, prepared_exact, cfg.population_floor)

    stepper, clamp_warnings = _build_stepper(cfg)
    t2 = cfg.machine.t2[cfg.observed_spin - 1] if cfg.damping else None
    series = acquire(prepared, stepper, cfg.q, cfg.plan.t0, cfg.observed_spin, t2)

    if cfg.noise_amplitude > 0:
        rng = np.random.default_rng(cfg.noise_seed)
        noisy = series.values + rng.uniform(-cfg.noise_amplitude, cfg.noise_amplitude, cfg.q)
        series = TimeSeries(series.t0, np.clip(noisy, -1.0, 1.0), series.wall_times)

    spectrum = dft(series)
    seed, _ = peak_pick(spectrum, cfg.exclude_dc)
    fit = fit_damped_sinusoid(series, seed)

    eps = epsilon_ft(cfg.q, cfg.plan.t0)
    return RunResult(
        config=cfg,
        delta_exact=delta_exact,
        reachable_level=level,
        delta_exp=fit.delta_exp,
        epsilon_ft=eps,
        systematic_offset=systematic_offset(fit.delta_exp, delta_exact),
        fit=fit,
        series=series,
        spectrum=spectrum,
        populations=sector_population_report(cfg.model, pairs, prepared),
        wall_per_step=stepper.wall_per_step,
        clamp_warnings=clamp_warnings,
    )


def result_record(result: RunResult) -> dict:
    cfg = result.config
    record = fit_record(result.fit)
    record.update(
        {
            "delta_exact_rad_s": result.delta_exact,
            "delta_exact_over_2pi_hz": result.delta_exact / (2 * math.pi),
            "reachable_level": result.reachable_level,
            "epsilon_ft_rad_s": result.epsilon_ft,
            "systematic_offset_rad_s": result.systematic_offset,
            "method": cfg.method,
            "pulse_mode": cfg.pulse_mode,
            "evolver": cfg.evolver,
            "t0_s": cfg.plan.t0,
            "k": cfg.plan.k,
            "q": cfg.q,
            "observed_spin": cfg.observed_spin,
            "damping": cfg.damping,
            "init": cfg.init_bits,
            "schedule_steps": cfg.schedule_steps,
            "t_ad_s": cfg.t_ad,
            "convention_factor": cfg.model.convention_factor,
            "wall_per_step_s": result.wall_per_step,
            "wall_total_s": result.wall_total,
            "clamp_warnings": list(result.clamp_warnings),
        }
    )
    return record


def write_run_artifacts(result: RunResult, out_dir: str) -> dict[str, str]:
    """Write timeseries.csv, spectrum.csv, populations.csv and result.json;
    returns the paths. Output bytes are a pure function of the config."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "timeseries": os.path.join(out_dir, "timeseries.csv"),
        "spectrum": os.path.join(out_dir, "spectrum.csv"),
        "populations": os.path.join(out_dir, "populations.csv"),
        "result": os.path.join(out_dir, "result.json"),
    }
    _write(paths["timeseries"], series_to_csv(result.series))
    _write(paths["spectrum"], spectrum_to_csv(result.spectrum))
    _write(paths["populations"], report_to_csv(result.populations))
    _write(paths["result"], json.dumps(result_record(result), indent=2, sort_keys=True) + "\n")
    return paths


def _write(path: str, body: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(body)
    os.replace(tmp, path)


@dataclass(frozen=True)
class SweepRow:
    t0: float
    k: int
    q: int
    delta_exact: float | None
    delta_exp: float | None
    epsilon_ft: float | None
    offset: float | None
    tau_e: float | None
    converged: bool
    error: str = ""


@dataclass(frozen=True)
class SweepT0Result:
    rows: tuple[SweepRow, ...]
    offset_exponent: float | None


def sweep_t0(
    cfg: ExperimentConfig, t0_values: list[float], hold_epsilon_ft: bool = True
) -> SweepT0Result:
    """Run the pipeline across sampling steps t0.

    With hold_epsilon_ft the sample count Q is co-varied to keep the Fourier
    precision of the base config, isolating the systematic offset. The
    exponent is the log-log slope of |offset| against t0 (None if fewer than
    two usable points). Failures are recorded per row and do not stop the sweep.
    """
    if not t0_values:
        raise ConfigError("sweep: need at least one t0 value")
    eps_ref = epsilon_ft(cfg.q, cfg.plan.t0)
    rows = []
    for t0 in t0_values:
        q = int(round(2 * math.pi / (eps_ref * t0))) if hold_epsilon_ft else cfg.q
        try:
            point = with_plan(cfg, t0, q=q)
            result = run_experiment(point)
            rows.append(
                SweepRow(
                    t0=t0,
                    k=point.plan.k,
                    q=point.q,
                    delta_exact=result.delta_exact,
                    delta_exp=result.delta_exp,
                    epsilon_ft=result.epsilon_ft,
                    offset=result.systematic_offset,
                    tau_e=result.fit.tau_e,
                    converged=result.fit.converged,
                )
            )
        except Exception as exc:  # noqa: BLE001 - per-point failures become rows
            rows.append(SweepRow(t0, cfg.plan.k, q, None, None, None, None, None, False, str(exc)))
    pts = [(r.t0, abs(r.offset)) for r in rows if r.offset is not None and abs(r.offset) > _OFFSET_FLOOR]
    exponent = None
    if len(pts) >= 2:
        lx = np.log([p[0] for p in pts])
        ly = np.log([p[1] for p in pts])
        exponent = float(np.polyfit(lx, ly, 1)[0])
    return SweepT0Result(tuple(rows), exponent)


def sweep_rows_to_csv(rows: tuple[SweepRow, ...]) -> str:
    def fmt(x):
        return "" if x is None else repr(float(x))

    lines = ["t0_s,k,q,delta_exact_rad_s,delta_exp_rad_s,epsilon_ft_rad_s,systematic_offset_rad_s,tau_e_s,converged,error"]
    for r in rows:
        lines.append(
            ",".join(
                [
                    repr(float(r.t0)),
                    str(r.k),
                    str(r.q),
                    fmt(r.delta_exact),
                    fmt(r.delta_exp),
                    fmt(r.epsilon_ft),
                    fmt(r.offset),
                    fmt(r.tau_e),
                    str(int(r.converged)),
                    '"' + r.error.replace('"', "'") + '"' if r.error else "",
                ]
            )
        )
    return "\n".join(lines) + "\n"
