"""Product-formula propagators: generic first-order splitting, the symmetric
third-order step used throughout the pipeline, and convergence sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import propagator
from .hamiltonian import (
    PairingModel,
    coupling_hamiltonian,
    full_hamiltonian,
    onsite_hamiltonian,
    realize,
)
from .nmr import SpinSystem, compile_trotter_step, program_unitary

# Errors below this are numerical noise; exponent fits ignore such points.
_ERROR_FLOOR = 1e-12

IDEAL = "ideal"


@dataclass(frozen=True)
class TrotterPlan:
    """Simulated step t0 (s) split into k inner repetitions."""

    t0: float
    k: int = 1

    def __post_init__(self):
        if not (self.t0 > 0 and math.isfinite(self.t0)):
            raise ValueError("plan.t0: must be positive and finite")
        if int(self.k) < 1:
            raise ValueError("plan.k: must be >= 1")
        object.__setattr__(self, "k", int(self.k))


@dataclass(frozen=True)
class NmrRealizer:
    """Realize steps as compiled pulse programs instead of exact part exponentials."""

    method: str
    machine: SpinSystem
    pulse_mode: str = "delta"


def first_order_step(parts: list[np.ndarray], t: float, k: int) -> np.ndarray:
    """(prod_j exp(-i H_j t/k))^k over the parts in the given order."""
    if not parts:
        raise ValueError("need at least one Hamiltonian part")
    if k < 1:
        raise ValueError("k must be >= 1")
    step = np.eye(parts[0].shape[0], dtype=complex)
    for h in parts:
        step = step @ propagator(h, t / k)
    return np.linalg.matrix_power(step, k)


def symmetric3_step(
    model: PairingModel, plan: TrotterPlan, realizer: str | NmrRealizer = IDEAL
) -> np.ndarray:
    """Palindromic split of the pairing evolution over one step t0:

        [A(tau/2) B(tau/2) C(tau) B(tau/2) A(tau/2)]^k,  tau = t0 / k,

    with A the on-site part, B the XX coupling and C the YY coupling. The
    palindrome cancels even error orders, leaving a unitary defect O(t0^3/k^2).
    """
    if isinstance(realizer, NmrRealizer):
        program = compile_trotter_step(model, plan, realizer.method, realizer.machine)
        return program_unitary(program, realizer.machine, realizer.pulse_mode)
    if realizer != IDEAL:
        raise ValueError("realizer must be 'ideal' or an NmrRealizer")
    tau = plan.t0 / plan.k
    ua = propagator(realize(onsite_hamiltonian(model)), tau / 2)
    ub = propagator(realize(coupling_hamiltonian(model, "X")), tau / 2)
    uc = propagator(realize(coupling_hamiltonian(model, "Y")), tau)
    rep = ua @ ub @ uc @ ub @ ua
    return np.linalg.matrix_power(rep, plan.k)


def trotter_error(u_exact: np.ndarray, v: np.ndarray) -> float:
    """Spectral norm of the difference. Global phase is NOT quotiented out:
    trotter_error(U, e^{i phi} U) = |1 - e^{i phi}|."""
    if u_exact.shape != v.shape:
        raise ValueError("operators must share a dimension")
    return float(np.linalg.norm(u_exact - v, ord=2))


@dataclass(frozen=True)
class SweepResult:
    """Grid of (t0, k, error) rows plus fitted exponents: error ~ t0^p at fixed
    k and ~ k^-q at fixed t0. An exponent is None when its axis has fewer than
    two usable points."""

    rows: tuple[tuple[float, int, float], ...]
    p: float | None
    q: float | None


def _log_slope(xs: list[float], ys: list[float]) -> float | None:
    pts = [(x, y) for x, y in zip(xs, ys) if y > _ERROR_FLOOR]
    if len(pts) < 2:
        return None
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    return float(np.polyfit(lx, ly, 1)[0])


def convergence_sweep(
    model: PairingModel,
    t0_list: list[float],
    k_list: list[int],
    realizer: str | NmrRealizer = IDEAL,
) -> SweepResult:
    """Error of the symmetric step against the exact propagator over a product
    grid, with log-log least-squares exponents along each axis."""
    if not t0_list or not k_list:
        raise ValueError("t0 and k lists must be non-empty")
    h_full = realize(full_hamiltonian(model))
    rows = []
    for t0 in t0_list:
        u_exact = propagator(h_full, t0)
        for k in k_list:
            v = symmetric3_step(model, TrotterPlan(t0, k), realizer)
            rows.append((float(t0), int(k), trotter_error(u_exact, v)))
    p_fits = []
    for k in k_list:
        slope = _log_slope(
            [r[0] for r in rows if r[1] == k], [r[2] for r in rows if r[1] == k]
        )
        if slope is not None:
            p_fits.append(slope)
    q_fits = []
    for t0 in t0_list:
        slope = _log_slope(
            [float(r[1]) for r in rows if r[0] == float(t0)],
            [r[2] for r in rows if r[0] == float(t0)],
        )
        if slope is not None:
            q_fits.append(-slope)
    p = float(np.mean(p_fits)) if p_fits else None
    q = float(np.mean(q_fits)) if q_fits else None
    if p is None and q is None:
        raise ValueError("fewer than 2 points for a fit on either axis")
    return SweepResult(tuple(rows), p, q)


def sweep_to_csv(result: SweepResult) -> str:
    lines = ["t0_s,k,error"]
    for t0, k, err in result.rows:
        lines.append(f"{t0!r},{k},{err!r}")
    return "\n".join(lines) + "\n"
