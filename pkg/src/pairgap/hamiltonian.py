"""Pauli-sum construction of pairing-model Hamiltonians and their dense realizations.

Conventions used throughout the package: hbar = 1, every energy is an angular
frequency in rad/s, Z|0> = +|0>, and qubit 1 is the most significant bit of a
computational basis index (so |011> on three qubits has index 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_MAX_DENSE_QUBITS = 12

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

ONSITE = "onsite"
XX = "xx"
YY = "yy"
FULL = "full"


def _check_symmetric(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} must be finite")
    if not np.allclose(m, m.T, atol=1e-12, rtol=0.0):
        raise ValueError(f"{name} must be symmetric")
    return m


@dataclass(frozen=True)
class PairingModel:
    """Qubit pairing model: on-site angular frequencies nu_m and a symmetric
    coupling matrix V_ml (diagonal ignored), both in rad/s.

    ``convention_factor`` multiplies every Hamiltonian coefficient; it exists
    because published gap values for different instances are consistent with
    different overall factors, so presets pin it explicitly.
    """

    nu: tuple[float, ...]
    coupling: np.ndarray
    convention_factor: float = 1.0

    def __post_init__(self):
        nu = tuple(float(x) for x in self.nu)
        if len(nu) < 1:
            raise ValueError("model.nu: need at least one mode")
        if not all(math.isfinite(x) for x in nu):
            raise ValueError("model.nu: entries must be finite")
        v = _check_symmetric(self.coupling, "model.coupling")
        if v.shape[0] != len(nu):
            raise ValueError("model.coupling: dimension mismatch with nu")
        if not (self.convention_factor > 0 and math.isfinite(self.convention_factor)):
            raise ValueError("model.convention_factor: must be positive and finite")
        object.__setattr__(self, "nu", nu)
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "coupling", v)

    @property
    def n(self) -> int:
        return len(self.nu)

    def with_coupling_scale(self, scale: float) -> "PairingModel":
        """Model with every off-diagonal coupling multiplied by ``scale``.

        Used for stepwise interpolation schedules: scaling the coupling by
        s/S while keeping nu realizes the interpolated Hamiltonian.
        """
        return PairingModel(self.nu, self.coupling * float(scale), self.convention_factor)


@dataclass(frozen=True)
class FermionicPairingInput:
    """Fermionic-side parameters: single-particle energies epsilon_m and a full
    symmetric interaction matrix including its diagonal, rad/s."""

    epsilon: tuple[float, ...]
    v: np.ndarray

    def __post_init__(self):
        eps = tuple(float(x) for x in self.epsilon)
        v = _check_symmetric(self.v, "input.v")
        if v.shape[0] != len(eps):
            raise ValueError("input.v: dimension mismatch with epsilon")
        object.__setattr__(self, "epsilon", eps)
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "v", v)


def pairing_to_qubit(inp: FermionicPairingInput) -> PairingModel:
    """Convert fermionic parameters to the qubit model: nu_m = epsilon_m + V_mm,
    off-diagonal couplings copied unchanged (a global energy shift is dropped)."""
    eps = np.asarray(inp.epsilon, dtype=float)
    nu = eps + np.diag(inp.v)
    return PairingModel(tuple(nu), inp.v.copy(), 1.0)


@dataclass(frozen=True)
class PauliTerm:
    """A real coefficient (rad/s) times a product of single-qubit Paulis.

    ``factors`` maps 1-based qubit indices to letters in {X, Y, Z}; stored as a
    sorted tuple of (index, letter) pairs so terms are hashable.
    """

    coeff: float
    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if not math.isfinite(self.coeff):
            raise ValueError("term.coeff must be finite")
        pairs = tuple(sorted((int(q), str(p)) for q, p in self.factors))
        seen = set()
        for q, p in pairs:
            if q < 1:
                raise ValueError("term.factors: qubit indices are 1-based")
            if q in seen:
                raise ValueError("term.factors: duplicate qubit index")
            if p not in ("X", "Y", "Z"):
                raise ValueError("term.factors: letters must be X, Y or Z")
            seen.add(q)
        object.__setattr__(self, "factors", pairs)

    def scaled(self, c: float) -> "PauliTerm":
        return PauliTerm(self.coeff * c, self.factors)


@dataclass(frozen=True)
class PauliSum:
    """Sum of PauliTerms on ``n`` qubits. Real coefficients keep the realization
    Hermitian by construction."""

    terms: tuple[PauliTerm, ...]
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("operator qubit count must be >= 1")
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.factors and t.factors[-1][0] > self.n:
                raise ValueError("term qubit index exceeds operator size")


def onsite_hamiltonian(model: PairingModel) -> PauliSum:
    """Free part: sum_m (nu_m/2)(-Z_m), times the convention factor."""
    f = model.convention_factor
    terms = [PauliTerm(-0.5 * f * model.nu[m], ((m + 1, "Z"),)) for m in range(model.n)]
    return PauliSum(tuple(terms), model.n)


def coupling_hamiltonian(model: PairingModel, axis: str) -> PauliSum:
    """Coupling part along one axis: sum_{m<l} (V_ml/2) A_m A_l with A = X or Y."""
    if axis not in ("X", "Y"):
        raise ValueError("axis must be 'X' or 'Y'")
    f = model.convention_factor
    terms = []
    v = model.coupling
    for m in range(model.n):
        for l in range(m + 1, model.n):
            if v[m, l] != 0.0:
                terms.append(PauliTerm(0.5 * f * v[m, l], ((m + 1, axis), (l + 1, axis))))
    return PauliSum(tuple(terms), model.n)


def full_hamiltonian(model: PairingModel) -> PauliSum:
    a = onsite_hamiltonian(model)
    b = coupling_hamiltonian(model, "X")
    c = coupling_hamiltonian(model, "Y")
    return PauliSum(a.terms + b.terms + c.terms, model.n)


def build_hamiltonian(model: PairingModel, part: str) -> PauliSum:
    """Dispatch on part name: 'onsite', 'xx', 'yy' or 'full'."""
    if part == ONSITE:
        return onsite_hamiltonian(model)
    if part == XX:
        return coupling_hamiltonian(model, "X")
    if part == YY:
        return coupling_hamiltonian(model, "Y")
    if part == FULL:
        return full_hamiltonian(model)
    raise ValueError(f"unknown Hamiltonian part {part!r}")


def interpolated_hamiltonian(model: PairingModel, s: int, steps: int) -> PauliSum:
    """Schedule Hamiltonian (1 - s/S) * onsite + (s/S) * full.

    Terms whose scaled coefficient is exactly zero are dropped, so the
    endpoints return the onsite and full term lists verbatim.
    """
    if steps == 0:
        raise ValueError("schedule.steps: must be >= 1")
    if not 0 <= s <= steps:
        raise ValueError("schedule step index out of range")
    lam = s / steps
    terms = []
    for t in onsite_hamiltonian(model).terms:
        ts = t.scaled(1.0 - lam)
        if ts.coeff != 0.0:
            terms.append(ts)
    for t in full_hamiltonian(model).terms:
        ts = t.scaled(lam)
        if ts.coeff != 0.0:
            terms.append(ts)
    return PauliSum(tuple(terms), model.n)


def nmr_zz_hamiltonian(j_hz: np.ndarray) -> PauliSum:
    """Always-on scalar coupling sum_{i<j} (pi/2) J_ij Z_i Z_j.

    J is given in Hz; the pi/2 factor yields coefficients in rad/s.
    """
    j = _check_symmetric(j_hz, "machine.j_hz")
    if np.any(np.diag(j) != 0.0):
        raise ValueError("machine.j_hz: diagonal must be zero")
    n = j.shape[0]
    terms = []
    for i in range(n):
        for k in range(i + 1, n):
            if j[i, k] != 0.0:
                terms.append(PauliTerm(0.5 * math.pi * j[i, k], ((i + 1, "Z"), (k + 1, "Z"))))
    return PauliSum(tuple(terms), n)


def realize(op: PauliSum) -> np.ndarray:
    """Dense matrix of a PauliSum, qubit 1 most significant. Guarded at 12 qubits."""
    if op.n > _MAX_DENSE_QUBITS:
        raise ValueError(f"dense realization limited to {_MAX_DENSE_QUBITS} qubits")
    dim = 2**op.n
    out = np.zeros((dim, dim), dtype=complex)
    for term in op.terms:
        letters = dict(term.factors)
        acc = np.array([[term.coeff]], dtype=complex)
        for q in range(1, op.n + 1):
            acc = np.kron(acc, _PAULI[letters.get(q, "I")])
        out += acc
    return out


def sector_basis(n: int, pairs: int) -> np.ndarray:
    """Ascending computational basis indices with Hamming weight ``pairs``."""
    if not 0 <= pairs <= n:
        raise ValueError("pairs out of range")
    idx = [i for i in range(2**n) if bin(i).count("1") == pairs]
    return np.array(idx, dtype=int)


def number_operator(n: int) -> np.ndarray:
    """Dense sum_m (I - Z_m)/2, counting qubits in |1>."""
    dim = 2**n
    diag = np.array([bin(i).count("1") for i in range(dim)], dtype=float)
    return np.diag(diag).astype(complex)
