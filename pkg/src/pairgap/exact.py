"""Exact diagonalization oracle: eigensystems, propagators, sector gaps and the
level actually reachable from a prepared superposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import PairingModel, full_hamiltonian, realize, sector_basis

_HERMITICITY_TOL = 1e-9
# Eigenvalues closer than this (relative to the spectral scale) are treated as
# one degenerate level when grouping populations.
_DEGENERACY_RTOL = 1e-8


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues (rad/s) and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def _require_hermitian(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("operator must be square")
    scale = max(1.0, float(np.abs(h).max()))
    if float(np.abs(h - h.conj().T).max()) > _HERMITICITY_TOL * scale:
        raise ValueError("operator is not Hermitian within tolerance")
    return h


def eigendecompose(h: np.ndarray) -> EigenSystem:
    h = _require_hermitian(h)
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(values, vectors)


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) through the eigendecomposition of Hermitian h."""
    es = eigendecompose(h)
    phases = np.exp(-1j * es.values * t)
    return (es.vectors * phases) @ es.vectors.conj().T


def evolve(state: np.ndarray, u: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if u.shape[1] != state.shape[0]:
        raise ValueError("dimension mismatch between unitary and state")
    return u @ state


def computational_state(n: int, index: int) -> np.ndarray:
    if not 0 <= index < 2**n:
        raise ValueError("basis index out of range")
    psi = np.zeros(2**n, dtype=complex)
    psi[index] = 1.0
    return psi


def sector_matrix(model: PairingModel, pairs: int) -> tuple[np.ndarray, np.ndarray]:
    """Full Hamiltonian restricted to the fixed-pair-number subspace.

    Returns (matrix, basis indices); basis order follows sector_basis.
    """
    idx = sector_basis(model.n, pairs)
    h = realize(full_hamiltonian(model))
    return h[np.ix_(idx, idx)], idx


def sector_gap(model: PairingModel, pairs: int, target: int | str = "first") -> float:
    """E_target - E_ground inside one pair sector; target 'first' means level 1."""
    sub, _ = sector_matrix(model, pairs)
    if sub.shape[0] == 0:
        raise ValueError("empty sector")
    k = 1 if target == "first" else int(target)
    values = np.linalg.eigvalsh(sub)
    if not 1 <= k < len(values):
        raise ValueError("target level outside sector dimension")
    return float(values[k] - values[0])


def _grouped_levels(values: np.ndarray) -> list[np.ndarray]:
    """Indices of eigenvalues clustered into degenerate levels."""
    tol = _DEGENERACY_RTOL * max(1.0, float(np.abs(values).max()))
    groups: list[list[int]] = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [np.array(g, dtype=int) for g in groups]


def reachable_gap(
    model: PairingModel,
    pairs: int,
    prepared: np.ndarray,
    population_floor: float = 0.02,
) -> tuple[int, float]:
    """Lowest excited level holding at least ``population_floor`` of the prepared
    state, and its gap to the ground level.

    This is the oscillation frequency the time-series stage will actually see.
    Degenerate eigenvalues are grouped and their populations summed.
    """
    if not 0.0 < population_floor < 1.0:
        raise ValueError("population_floor must lie in (0, 1)")
    prepared = np.asarray(prepared, dtype=complex)
    if abs(np.linalg.norm(prepared) - 1.0) > 1e-8:
        raise ValueError("prepared state must be normalized")
    sub, idx = sector_matrix(model, pairs)
    es = eigendecompose(sub)
    amps = es.vectors.conj().T @ prepared[idx]
    pops = np.abs(amps) ** 2
    levels = _grouped_levels(es.values)
    e0 = float(np.mean(es.values[levels[0]]))
    for k, members in enumerate(levels[1:], start=1):
        if float(pops[members].sum()) >= population_floor:
            return k, float(np.mean(es.values[members])) - e0
    raise ValueError("no reachable excited state above the population floor")
