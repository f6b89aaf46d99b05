"""Order-of-magnitude cost estimators for the gap-estimation protocol.

These score scaling laws only; exact event counts for a concrete pulse
program come from the compiler, not from here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def gate_count(n: int, delta: float, epsilon: float) -> float:
    """Gates needed to resolve a gap delta to precision epsilon: 3 n^4 delta/epsilon
    (decoupling pulses included in the constant)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return 3.0 * n**4 * (delta / epsilon)


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    time_in_tau: float


def feasibility(
    n: int,
    delta: float,
    epsilon: float,
    t_g_over_tau: float = 1e-5,
    budget_in_tau: float = 1.0,
) -> Feasibility:
    """Whether the run fits inside the coherence budget: gate count times the
    gate duration (in units of the dephasing time tau) must not exceed the
    budget (also in tau)."""
    if not (t_g_over_tau > 0 and budget_in_tau > 0):
        raise ValueError("t_g_over_tau and budget_in_tau must be positive")
    time_in_tau = gate_count(n, delta, epsilon) * t_g_over_tau
    return Feasibility(time_in_tau <= budget_in_tau, time_in_tau)


def max_feasible_n(
    delta: float,
    epsilon: float,
    t_g_over_tau: float = 1e-5,
    budget_in_tau: float = 1.0,
) -> int:
    """Largest qubit count that stays inside the budget, by upward scan.

    Equals floor((budget / (3 (delta/epsilon) t_g_over_tau))^(1/4)); returns 0
    when even n = 1 does not fit.
    """
    n = 0
    while feasibility(n + 1, delta, epsilon, t_g_over_tau, budget_in_tau).feasible:
        n += 1
    return n


def precision_cost(n: int, d: int, epsilon_rel: float, r: float = 1.0) -> float:
    """Dimensionless cost score n^d / epsilon^r for a d-local Hamiltonian
    simulated to relative precision epsilon; r = 2 models the fault-tolerant
    overhead."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if not epsilon_rel > 0:
        raise ValueError("epsilon_rel must be positive")
    if r < 1:
        raise ValueError("r must be >= 1")
    return n**d / epsilon_rel**r


def grid_to_csv(
    n_list: list[int],
    eps_over_delta_list: list[float],
    t_g_over_tau: float = 1e-5,
    budget_in_tau: float = 1.0,
) -> str:
    """Feasibility table over (n, epsilon/delta); delta scales out of the
    gate count, so only the ratio matters."""
    lines = ["n,eps_over_delta,gates,time_in_tau,feasible"]
    for n in n_list:
        for ratio in eps_over_delta_list:
            gates = gate_count(n, 1.0, ratio)
            fz = feasibility(n, 1.0, ratio, t_g_over_tau, budget_in_tau)
            lines.append(
                f"{n},{float(ratio)!r},{gates!r},{fz.time_in_tau!r},{int(fz.feasible)}"
            )
    return "\n".join(lines) + "\n"
