"""Gap spectroscopy: step-and-measure acquisition of a single-spin Z series,
discrete Fourier transform, peak picking and a four-parameter damped-cosine
least-squares fit."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .nmr import PulseProgram, SpinSystem, program_unitary, wall_time

# Smallest decay rate distinguishable from zero; keeps tau_e finite.
_MIN_DECAY_RATE = 1e-12
_MAX_FIT_ITERATIONS = 200
_STEP_TOL = 1e-10


@dataclass(frozen=True)
class TimeSeries:
    """Q real samples <Z_r(k t0)> plus the physical wall-clock time that had
    elapsed when each sample was taken."""

    t0: float
    values: np.ndarray
    wall_times: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        walls = np.asarray(self.wall_times, dtype=float)
        if not (self.t0 > 0 and math.isfinite(self.t0)):
            raise ValueError("series.t0: must be positive and finite")
        if values.ndim != 1 or len(values) < 2:
            raise ValueError("series needs at least two samples")
        if walls.shape != values.shape:
            raise ValueError("wall_times must match values in length")
        if np.abs(values).max() > 1 + 1e-9:
            raise ValueError("expectation values must lie in [-1, 1]")
        values.flags.writeable = False
        walls.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "wall_times", walls)

    @property
    def q(self) -> int:
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.q) * self.t0


@dataclass(frozen=True)
class Spectrum:
    """DFT bins sorted by frequency; omega_j = 2 pi j/(Q t0) with j taken in
    (-Q/2, Q/2] so the Nyquist bin is positive."""

    omega: np.ndarray
    amp: np.ndarray
    q: int
    t0: float


@dataclass(frozen=True)
class FitResult:
    delta_exp: float
    tau_e: float
    amplitude: float
    phase: float
    residual_norm: float
    converged: bool


@dataclass(frozen=True)
class UnitaryStepper:
    """One fixed evolution per sample interval plus its physical duration."""

    u: np.ndarray
    wall_per_step: float

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.u @ psi


def program_stepper(
    program: PulseProgram, machine: SpinSystem, pulse_mode: str = "delta"
) -> UnitaryStepper:
    """Collapse a pulse program into a stepper; the program is stationary, so
    its unitary is composed once."""
    return UnitaryStepper(
        program_unitary(program, machine, pulse_mode),
        wall_time(program, machine.t_pi),
    )


def _z_diagonal(n: int, spin: int) -> np.ndarray:
    if not 1 <= spin <= n:
        raise ValueError("observed spin out of range")
    idx = np.arange(2**n)
    bits = (idx >> (n - spin)) & 1
    return 1.0 - 2.0 * bits


def acquire(
    prepared: np.ndarray,
    stepper: UnitaryStepper,
    q: int,
    t0: float,
    observed_spin: int,
    t2: float | None = None,
) -> TimeSeries:
    """Sample <Z_r> after k = 0..Q-1 stepper applications.

    t0 is the simulated time per step; the physical duration per step comes
    from the stepper's wall clock. When t2 is given, sample k is attenuated by
    exp(-k * wall_per_step / t2), modelling dephasing of the observed spin
    over accumulated physical time; the k = 0 sample is untouched.
    """
    if q < 2:
        raise ValueError("need at least two samples")
    psi = np.asarray(prepared, dtype=complex)
    n = int(round(math.log2(psi.shape[0])))
    zdiag = _z_diagonal(n, observed_spin)
    values = np.empty(q)
    walls = np.empty(q)
    wall_step = stepper.wall_per_step
    for k in range(q):
        expectation = float(np.real(np.vdot(psi, zdiag * psi)))
        if t2 is not None:
            expectation *= math.exp(-k * wall_step / t2)
        values[k] = expectation
        walls[k] = k * wall_step
        if k + 1 < q:
            psi = stepper.apply(psi)
    return TimeSeries(t0, values, walls)


def dft(series: TimeSeries) -> Spectrum:
    """X[j] = sum_k values[k] exp(-2 pi i j k / Q), reported on symmetric bins."""
    values = series.values
    q = series.q
    x = np.fft.fft(values)
    j = np.arange(q)
    j_sym = np.where(j <= q // 2, j, j - q) if q % 2 == 0 else np.where(j <= (q - 1) // 2, j, j - q)
    omega = 2 * math.pi * j_sym / (q * series.t0)
    order = np.argsort(omega)
    return Spectrum(omega[order], x[order], q, series.t0)


def idft(spectrum: Spectrum) -> TimeSeries:
    """Inverse transform back to a time series (wall clock not recoverable)."""
    q = spectrum.q
    j_sym = np.rint(spectrum.omega * q * spectrum.t0 / (2 * math.pi)).astype(int)
    x = np.zeros(q, dtype=complex)
    x[j_sym % q] = spectrum.amp
    values = np.fft.ifft(x)
    return TimeSeries(spectrum.t0, values.real, np.zeros(q))


def peak_pick(spectrum: Spectrum, exclude_dc: bool = True) -> tuple[float, float]:
    """Frequency and magnitude of the largest non-negative-frequency bin.

    exclude_dc drops the omega = 0 bin; ties resolve to the lower frequency.
    """
    mask = spectrum.omega > 0 if exclude_dc else spectrum.omega >= 0
    if not np.any(mask):
        raise ValueError("no peak: spectrum has no candidate bins")
    omega = spectrum.omega[mask]
    mag = np.abs(spectrum.amp[mask])
    if mag.max() == 0.0:
        raise ValueError("no peak: spectrum is identically zero")
    best = int(np.argmax(mag))  # first maximum = lowest frequency on ties
    return float(omega[best]), float(mag[best])


def epsilon_ft(q: int, t0: float) -> float:
    """Fourier-limited gap precision 2 pi / (Q t0), rad/s."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if not t0 > 0:
        raise ValueError("t0 must be positive")
    return 2 * math.pi / (q * t0)


def systematic_offset(delta_exp: float, delta_exact: float) -> float:
    """Signed estimate error delta_exp - delta_exact, rad/s."""
    if delta_exp < 0 or delta_exact < 0:
        raise ValueError("gaps must be non-negative")
    return delta_exp - delta_exact


def _model_and_jacobian(beta: np.ndarray, t: np.ndarray):
    a, rate, omega, phi = beta
    envelope = np.exp(-rate * t)
    c = np.cos(omega * t + phi)
    s = np.sin(omega * t + phi)
    f = a * envelope * c
    jac = np.column_stack(
        (envelope * c, -t * a * envelope * c, -t * a * envelope * s, -a * envelope * s)
    )
    return f, jac


def fit_damped_sinusoid(series: TimeSeries, seed: float) -> FitResult:
    """Least-squares fit of A exp(-t/tau_e) cos(Delta t + phi) to the series.

    Damped Gauss-Newton (Levenberg) iteration on (A, 1/tau_e, Delta, phi),
    seeded from the DFT bin nearest the seed frequency: amplitude 2|X|/Q,
    tau_e = Q t0, phase arg(X). Accepted steps never increase the residual;
    convergence means a relative step below 1e-10 within 200 iterations.
    """
    if series.q < 8:
        raise ValueError("need at least eight samples to fit four parameters")
    y = series.values
    if np.ptp(y) == 0.0:
        raise ValueError("degenerate flat series")
    t = series.times
    q = series.q

    x = np.fft.fft(y)
    bin_index = int(round(seed * q * series.t0 / (2 * math.pi)))
    bin_index = min(max(bin_index, 0), q // 2)
    a0 = 2.0 * abs(x[bin_index]) / q
    if a0 == 0.0:
        a0 = np.ptp(y) / 2
    phi0 = float(np.angle(x[bin_index]))
    beta = np.array([a0, 1.0 / (q * series.t0), float(seed), phi0])

    f, jac = _model_and_jacobian(beta, t)
    residual = f - y
    cost = float(residual @ residual)
    lam = 1e-3
    converged = False
    for _ in range(_MAX_FIT_ITERATIONS):
        jtj = jac.T @ jac
        g = jac.T @ residual
        step = None
        for _ in range(50):
            try:
                step = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj)) + 1e-300 * np.eye(4), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            trial = beta + step
            trial[1] = max(trial[1], 0.0)  # decay rates stay physical
            rel = float(np.max(np.abs(trial - beta) / np.maximum(np.abs(beta), 1e-12)))
            if rel < _STEP_TOL:
                # Parameters have stopped moving (possibly pinned at the
                # rate >= 0 boundary); that is convergence, not failure.
                converged = True
                break
            f_t, jac_t = _model_and_jacobian(trial, t)
            r_t = f_t - y
            cost_t = float(r_t @ r_t)
            if cost_t <= cost:
                break
            lam *= 2
            step = None
        if converged or step is None:
            break
        beta, f, jac, residual, cost = trial, f_t, jac_t, r_t, cost_t
        lam = max(lam / 3, 1e-12)

    a, rate, omega, phi = beta
    if a < 0:
        a, phi = -a, phi + math.pi
    if omega < 0:
        omega, phi = -omega, -phi
    phi = math.remainder(phi, 2 * math.pi)
    return FitResult(
        delta_exp=float(omega),
        tau_e=1.0 / max(rate, _MIN_DECAY_RATE),
        amplitude=float(a),
        phase=float(phi),
        residual_norm=math.sqrt(cost),
        converged=converged,
    )


def series_to_csv(series: TimeSeries) -> str:
    lines = ["k,t_s,value,wall_s"]
    for k in range(series.q):
        lines.append(
            f"{k},{float(k * series.t0)!r},{float(series.values[k])!r},{float(series.wall_times[k])!r}"
        )
    return "\n".join(lines) + "\n"


def spectrum_to_csv(spectrum: Spectrum) -> str:
    lines = ["omega_rad_s,re,im,abs"]
    for w, a in zip(spectrum.omega, spectrum.amp):
        lines.append(f"{float(w)!r},{float(a.real)!r},{float(a.imag)!r},{float(abs(a))!r}")
    return "\n".join(lines) + "\n"


def fit_record(fit: FitResult) -> dict:
    return {
        "delta_exp_rad_s": fit.delta_exp,
        "delta_exp_over_2pi_hz": fit.delta_exp / (2 * math.pi),
        "tau_e_s": fit.tau_e,
        "amplitude": fit.amplitude,
        "phase_rad": fit.phase,
        "residual_norm": fit.residual_norm,
        "converged": fit.converged,
    }
