"""Quasiadiabatic state preparation: stepwise interpolation from the free
Hamiltonian to the full pairing Hamiltonian.

The schedule is deliberately fast. Leaving population in an excited state is
the point: the later oscillation of the observable at the gap frequency is
what the spectroscopy stage measures.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exact import eigendecompose, propagator, sector_matrix
from .hamiltonian import (
    PairingModel,
    full_hamiltonian,
    realize,
    sector_basis,
)
from .nmr import SpinSystem, compile_trotter_step, simulate_program
from .trotter import TrotterPlan, symmetric3_step


class AdiabaticityWarning(UserWarning):
    """Raised when the schedule is too fast for the minimum gap along the path."""


@dataclass(frozen=True)
class ExactEvolver:
    pass


@dataclass(frozen=True)
class TrotterEvolver:
    plan: TrotterPlan


@dataclass(frozen=True)
class NmrEvolver:
    method: str
    machine: SpinSystem
    plan: TrotterPlan
    pulse_mode: str = "delta"


Evolver = ExactEvolver | TrotterEvolver | NmrEvolver


@dataclass(frozen=True)
class AdiabaticSchedule:
    """S interpolation steps of per-step simulated time t_ad; the product runs
    over s = 0..S inclusive, so S+1 evolutions are applied."""

    steps: int
    t_ad: float
    evolver: Evolver = field(default_factory=ExactEvolver)

    def __post_init__(self):
        if int(self.steps) < 1:
            raise ValueError("schedule.steps: must be >= 1")
        if not (self.t_ad >= 0 and math.isfinite(self.t_ad)):
            raise ValueError("schedule.t_ad: must be non-negative and finite")
        object.__setattr__(self, "steps", int(self.steps))


def _single_sector(state: np.ndarray, n: int) -> int | None:
    weights = {bin(i).count("1") for i in range(2**n) if abs(state[i]) > 1e-12}
    return weights.pop() if len(weights) == 1 else None


def _min_schedule_gap(model: PairingModel, pairs: int, steps: int) -> float:
    gaps = []
    for s in range(steps + 1):
        sub, _ = sector_matrix(model.with_coupling_scale(s / steps), pairs)
        values = np.linalg.eigvalsh(sub)
        if len(values) > 1:
            gaps.append(float(values[1] - values[0]))
    return min(gaps) if gaps else math.inf


def prepare(
    model: PairingModel,
    init: np.ndarray,
    schedule: AdiabaticSchedule,
    check_adiabaticity: bool = True,
) -> np.ndarray:
    """Evolve ``init`` under the interpolated Hamiltonian for t_ad at each
    s = 0..S and return the final state.

    Scaling the model's couplings by s/S realizes the interpolation, because
    (1 - s/S) H_free + (s/S) H_full = H_free + (s/S) (H_full - H_free).
    Warns when the minimum sector gap along the path is below 1/(S * t_ad).
    """
    psi = np.asarray(init, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")
    s_steps = schedule.steps
    if check_adiabaticity and schedule.t_ad > 0:
        pairs = _single_sector(psi, model.n)
        if pairs is not None:
            min_gap = _min_schedule_gap(model, pairs, s_steps)
            if min_gap < 1.0 / (s_steps * schedule.t_ad):
                warnings.warn(
                    f"minimum schedule gap {min_gap:.3g} rad/s is below "
                    f"1/(S*t_ad) = {1.0 / (s_steps * schedule.t_ad):.3g} rad/s; "
                    "preparation is quasiadiabatic, not adiabatic",
                    AdiabaticityWarning,
                    stacklevel=2,
                )
    for s in range(s_steps + 1):
        scaled = model.with_coupling_scale(s / s_steps)
        ev = schedule.evolver
        if isinstance(ev, ExactEvolver):
            u = propagator(realize(full_hamiltonian(scaled)), schedule.t_ad)
            psi = u @ psi
        elif isinstance(ev, TrotterEvolver):
            if schedule.t_ad > 0:
                u = symmetric3_step(scaled, TrotterPlan(schedule.t_ad, ev.plan.k))
                psi = u @ psi
        elif isinstance(ev, NmrEvolver):
            if schedule.t_ad > 0:
                program = compile_trotter_step(
                    scaled, TrotterPlan(schedule.t_ad, ev.plan.k), ev.method, ev.machine
                )
                psi, _ = simulate_program(program, ev.machine, psi, ev.pulse_mode)
        else:
            raise ValueError(f"unknown evolver {ev!r}")
    return psi


def population_report(state: np.ndarray, h: np.ndarray) -> list[tuple[int, float, float]]:
    """Populations of ``state`` over the eigenstates of ``h``, ascending in
    energy: rows of (eigenindex, energy rad/s, population)."""
    state = np.asarray(state, dtype=complex)
    es = eigendecompose(h)
    if es.vectors.shape[0] != state.shape[0]:
        raise ValueError("state and operator dimensions differ")
    pops = np.abs(es.vectors.conj().T @ state) ** 2
    return [(i, float(es.values[i]), float(pops[i])) for i in range(len(pops))]


def sector_population_report(
    model: PairingModel, pairs: int, state: np.ndarray
) -> list[tuple[int, float, float]]:
    """Population report against the sector-restricted Hamiltonian; the state is
    projected onto the sector first, so rows sum to the in-sector weight."""
    sub, idx = sector_matrix(model, pairs)
    return population_report(np.asarray(state, dtype=complex)[idx], sub)


def report_to_csv(rows: list[tuple[int, float, float]]) -> str:
    lines = ["eigenindex,energy_rad_per_s,population"]
    for i, e, p in rows:
        lines.append(f"{i},{e!r},{p!r}")
    return "\n".join(lines) + "\n"
