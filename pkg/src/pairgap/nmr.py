"""Pulse-level model of a liquid-state NMR register.

A compiled unitary is a PulseProgram: delays under the always-on scalar (ZZ)
coupling plus phased RF rotation events. Two compilation methods exist: "w1"
emits the bare sequence, "w2" additionally shortens every delay flanked by RF
pulses by alpha = (t_pi / 2 pi)(theta_1 + theta_2) to cancel the coupling that
accrues during finite-width pulses. Simulation runs in "delta" mode (pulses as
instantaneous perfect rotations) or "finite" mode (pulses as rectangular
on-resonance RF applied jointly with the ZZ coupling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import propagator
from .hamiltonian import PairingModel, nmr_zz_hamiltonian, realize, _check_symmetric

_PI = math.pi

W1 = "w1"
W2 = "w2"
DELTA = "delta"
FINITE = "finite"


@dataclass(frozen=True)
class SpinSystem:
    """Machine description: scalar couplings J in Hz (symmetric, zero diagonal),
    pi-pulse duration t_pi in seconds, per-spin dephasing times t2 in seconds."""

    j_hz: np.ndarray
    t_pi: float = 20e-6
    t2: tuple[float, ...] = ()

    def __post_init__(self):
        j = _check_symmetric(self.j_hz, "machine.j_hz")
        if np.any(np.diag(j) != 0.0):
            raise ValueError("machine.j_hz: diagonal must be zero")
        if not (self.t_pi >= 0 and math.isfinite(self.t_pi)):
            raise ValueError("machine.t_pi: must be non-negative and finite")
        t2 = tuple(float(x) for x in self.t2) or tuple(0.25 for _ in range(j.shape[0]))
        if len(t2) != j.shape[0]:
            raise ValueError("machine.t2: need one dephasing time per spin")
        if not all(x > 0 and math.isfinite(x) for x in t2):
            raise ValueError("machine.t2: entries must be positive")
        j = j.copy()
        j.flags.writeable = False
        object.__setattr__(self, "j_hz", j)
        object.__setattr__(self, "t2", t2)

    @property
    def n(self) -> int:
        return self.j_hz.shape[0]


@dataclass(frozen=True)
class Delay:
    duration: float

    def __post_init__(self):
        if not (self.duration >= 0 and math.isfinite(self.duration)):
            raise ValueError("delay duration must be non-negative and finite")
        # numpy scalars sneak in from delay arithmetic; keep plain floats so
        # repr-based serialization stays portable
        object.__setattr__(self, "duration", float(self.duration))


@dataclass(frozen=True)
class RfPulse:
    """Simultaneous rotation R_phase(angle) = exp[+i (angle/2)(X cos(phase) +
    Y sin(phase))] on every target spin. ``ideal`` marks a pulse simulated as a
    perfect rotation even in finite mode; its duration still counts toward the
    wall clock."""

    targets: tuple[int, ...]
    phase: float
    angle: float
    ideal: bool = False

    def __post_init__(self):
        targets = tuple(sorted(int(t) for t in self.targets))
        if not targets:
            raise ValueError("rf event needs at least one target spin")
        if targets[0] < 1 or len(set(targets)) != len(targets):
            raise ValueError("rf targets must be distinct 1-based spin indices")
        if not (math.isfinite(self.phase) and math.isfinite(self.angle)):
            raise ValueError("rf phase and angle must be finite")
        if not -2 * _PI < self.angle <= 2 * _PI:
            raise ValueError("rf angle must lie in (-2*pi, 2*pi]")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "phase", float(self.phase))
        object.__setattr__(self, "angle", float(self.angle))


PulseEvent = Delay | RfPulse


@dataclass(frozen=True)
class PulseProgram:
    events: tuple[PulseEvent, ...]
    n: int
    clamp_warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "clamp_warnings", tuple(self.clamp_warnings))
        top = max(
            (ev.targets[-1] for ev in self.events if isinstance(ev, RfPulse)),
            default=1,
        )
        if self.n < top:
            raise ValueError("program spin count below highest rf target")


def wall_time(program: PulseProgram, t_pi: float) -> float:
    """Total physical duration: delays plus t_pi * |angle| / pi per RF event."""
    total = 0.0
    for ev in program.events:
        if isinstance(ev, Delay):
            total += ev.duration
        else:
            total += t_pi * abs(ev.angle) / _PI
    return total


def _wrap_angle(angle: float) -> float:
    # Rotations are 4*pi-periodic in the angle, so reducing mod 4*pi into
    # (-2*pi, 2*pi] leaves the matrix bit-for-bit unchanged.
    a = math.fmod(angle, 4 * _PI)
    if a > 2 * _PI:
        a -= 4 * _PI
    elif a <= -2 * _PI:
        a += 4 * _PI
    return a


def _onsite_events(model: PairingModel, t: float, parity: dict[int, int], out: list) -> None:
    """Composite z-rotations realizing the free evolution for time t.

    Chronologically R_{-pi/2}(pi/2), per-spin R_0(nu_m t), R_{pi/2}(pi/2); the
    bracketing pulses share phase and angle across spins and merge into single
    multi-target events. A spin whose refocusing parity is odd gets its
    z-angle negated, since the surrounding flips invert its frame.
    """
    every = tuple(range(1, model.n + 1))
    out.append(RfPulse(every, -_PI / 2, _PI / 2))
    for m in range(1, model.n + 1):
        sign = -1.0 if parity[m] % 2 else 1.0
        angle = sign * model.convention_factor * model.nu[m - 1] * t
        out.append(RfPulse((m,), 0.0, _wrap_angle(angle)))
    out.append(RfPulse(every, _PI / 2, _PI / 2))


def _coupling_delay(model: PairingModel, t: float, machine: SpinSystem) -> tuple[float, list[int]]:
    """Shared ZZ delay realizing angle V_ml * t on every coupled pair, plus the
    sorted list of spins those pairs touch."""
    v = model.coupling * model.convention_factor
    pairs = [
        (i, j)
        for i in range(model.n)
        for j in range(i + 1, model.n)
        if v[i, j] != 0.0
    ]
    if not pairs:
        return 0.0, []
    durations = []
    spins: set[int] = set()
    for i, j in pairs:
        j_hz = machine.j_hz[i, j]
        if j_hz == 0.0:
            raise ValueError(f"unrealizable coupling: spins {i + 1},{j + 1} have J = 0")
        d = v[i, j] * t / (_PI * j_hz)
        if d < 0:
            raise ValueError(
                f"coupling on spins {i + 1},{j + 1} requires a negative delay"
            )
        durations.append(d)
        spins.update((i + 1, j + 1))
    if max(durations) - min(durations) > 1e-12 * max(1e-12, max(durations)):
        raise ValueError("coupled pairs demand inconsistent delays; one shared delay realizes them all")
    return durations[0], sorted(spins)


def _coupling_events(
    model: PairingModel,
    axis: str,
    t: float,
    machine: SpinSystem,
    parity: dict[int, int],
    out: list,
) -> None:
    """One coupling block: basis-change sandwich on the coupled spins around a
    shared ZZ delay; uncoupled spins get a single X pi pulse at the delay
    midpoint, which cancels their coupling to the active spins over the block.

    Simultaneously flipped spectator pairs keep their mutual coupling; the
    preset instances have at most one spectator, so this never bites here.
    """
    if axis == "X":
        open_phase, close_phase = _PI / 2, -_PI / 2
    elif axis == "Y":
        open_phase, close_phase = _PI, 0.0
    else:
        raise ValueError("axis must be 'X' or 'Y'")
    d, coupled = _coupling_delay(model, t, machine)
    if not coupled:
        return
    idle = tuple(m for m in range(1, model.n + 1) if m not in coupled)
    out.append(RfPulse(tuple(coupled), open_phase, _PI / 2))
    if idle and d > 0:
        out.append(Delay(d / 2))
        out.append(RfPulse(idle, 0.0, _PI))
        out.append(Delay(d / 2))
        for m in idle:
            parity[m] += 1
    else:
        out.append(Delay(d))
    out.append(RfPulse(tuple(coupled), close_phase, _PI / 2))


def compile_onsite(model: PairingModel, t: float) -> PulseProgram:
    """Program realizing the free (on-site) evolution for simulated time t."""
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    events: list[PulseEvent] = []
    _onsite_events(model, t, {m: 0 for m in range(1, model.n + 1)}, events)
    return PulseProgram(tuple(events), model.n)


def compile_coupling(model: PairingModel, axis: str, t: float, machine: SpinSystem) -> PulseProgram:
    """Program realizing one coupling evolution (axis 'X' or 'Y') for time t.

    A lone block leaves any spectator spin net-flipped (its single refocusing
    pulse is undone only by the parity bookkeeping of a full step program).
    """
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    if machine.n != model.n:
        raise ValueError("machine and model spin counts differ")
    events: list[PulseEvent] = []
    _coupling_events(model, axis, t, machine, {m: 0 for m in range(1, model.n + 1)}, events)
    return PulseProgram(tuple(events), model.n)


def _compensate_delays(
    events: tuple[PulseEvent, ...], t_pi: float
) -> tuple[tuple[PulseEvent, ...], tuple[str, ...]]:
    """Shorten every delay flanked by RF events by (t_pi/2pi)(|th1| + |th2|).

    Angles enter by magnitude because pulse duration does. Delays that would
    go negative are clamped to zero and reported.
    """
    out = list(events)
    warnings = []
    for i, ev in enumerate(events):
        if not isinstance(ev, Delay):
            continue
        prev = events[i - 1] if i > 0 else None
        nxt = events[i + 1] if i + 1 < len(events) else None
        if isinstance(prev, RfPulse) and isinstance(nxt, RfPulse):
            alpha = (t_pi / (2 * _PI)) * (abs(prev.angle) + abs(nxt.angle))
            cut = ev.duration - alpha
            if cut < 0:
                warnings.append(
                    f"event {i}: compensated delay {cut:.3e} s clamped to 0"
                )
                cut = 0.0
            out[i] = Delay(cut)
    return tuple(out), tuple(warnings)


def compile_trotter_step(model, plan, method: str, machine: SpinSystem) -> PulseProgram:
    """Compile one symmetric Trotter step (see trotter.symmetric3_step) into a
    pulse program, repeated plan.k times.

    Refocusing parity is tracked across the whole program: spectator z-angles
    flip sign while the running flip count is odd, and a single restoring X pi
    pulse is appended at the end when the final count is odd. Method "w2"
    post-processes all flanked delays; "w1" leaves them untouched.
    """
    if method not in (W1, W2):
        raise ValueError("method must be 'w1' or 'w2'")
    if machine.n != model.n:
        raise ValueError("machine and model spin counts differ")
    tau = plan.t0 / plan.k
    parity = {m: 0 for m in range(1, model.n + 1)}
    events: list[PulseEvent] = []
    for _ in range(plan.k):
        _onsite_events(model, tau / 2, parity, events)
        _coupling_events(model, "X", tau / 2, machine, parity, events)
        _coupling_events(model, "Y", tau, machine, parity, events)
        _coupling_events(model, "X", tau / 2, machine, parity, events)
        _onsite_events(model, tau / 2, parity, events)
    odd = tuple(m for m in range(1, model.n + 1) if parity[m] % 2)
    if odd:
        events.append(RfPulse(odd, 0.0, _PI))
    warnings: tuple[str, ...] = ()
    if method == W2:
        events_t, warnings = _compensate_delays(tuple(events), machine.t_pi)
        return PulseProgram(events_t, model.n, warnings)
    return PulseProgram(tuple(events), model.n)


def _rotation_unitary(n: int, targets: tuple[int, ...], phase: float, angle: float) -> np.ndarray:
    c = math.cos(angle / 2)
    s = math.sin(angle / 2)
    r = np.array(
        [[c, 1j * s * np.exp(-1j * phase)], [1j * s * np.exp(1j * phase), c]],
        dtype=complex,
    )
    eye = np.eye(2, dtype=complex)
    acc = np.array([[1.0]], dtype=complex)
    for q in range(1, n + 1):
        acc = np.kron(acc, r if q in targets else eye)
    return acc


def _axis_field(n: int, targets: tuple[int, ...], phase: float) -> np.ndarray:
    """Dense sum over targets of (X_i cos(phase) + Y_i sin(phase)) / 2."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    axis = x * math.cos(phase) + y * math.sin(phase)
    eye = np.eye(2, dtype=complex)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for t in targets:
        acc = np.array([[0.5]], dtype=complex)
        for q in range(1, n + 1):
            acc = np.kron(acc, axis if q == t else eye)
        out += acc
    return out


def _event_unitaries(program: PulseProgram, machine: SpinSystem, pulse_mode: str):
    """Yield one unitary per event. Delays evolve the diagonal ZZ Hamiltonian;
    finite-mode pulses evolve RF plus ZZ for duration t_pi |angle| / pi with
    amplitude omega_1 = -sign(angle) pi / t_pi, which reproduces the perfect
    rotation exactly when J = 0."""
    if pulse_mode not in (DELTA, FINITE):
        raise ValueError("pulse_mode must be 'delta' or 'finite'")
    n = program.n
    if machine.n != n:
        raise ValueError("machine and program spin counts differ")
    zz = realize(nmr_zz_hamiltonian(machine.j_hz))
    zz_diag = np.real(np.diag(zz))
    for ev in program.events:
        if isinstance(ev, Delay):
            yield np.diag(np.exp(-1j * zz_diag * ev.duration))
        elif ev.angle == 0.0:
            yield np.eye(2**n, dtype=complex)
        elif pulse_mode == DELTA or ev.ideal:
            yield _rotation_unitary(n, ev.targets, ev.phase, ev.angle)
        else:
            if machine.t_pi <= 0:
                raise ValueError("finite pulse mode needs machine.t_pi > 0")
            duration = machine.t_pi * abs(ev.angle) / _PI
            omega1 = -math.copysign(_PI / machine.t_pi, ev.angle)
            h = omega1 * _axis_field(n, ev.targets, ev.phase) + zz
            yield propagator(h, duration)


def program_unitary(program: PulseProgram, machine: SpinSystem, pulse_mode: str = DELTA) -> np.ndarray:
    u = np.eye(2**program.n, dtype=complex)
    for step in _event_unitaries(program, machine, pulse_mode):
        u = step @ u
    return u


def simulate_program(
    program: PulseProgram,
    machine: SpinSystem,
    init: np.ndarray,
    pulse_mode: str = DELTA,
) -> tuple[np.ndarray, float]:
    """Apply the program to a state; returns (final state, wall-clock duration)."""
    psi = np.asarray(init, dtype=complex)
    if psi.shape[0] != 2**program.n:
        raise ValueError("state dimension does not match program spin count")
    for step in _event_unitaries(program, machine, pulse_mode):
        psi = step @ psi
    return psi, wall_time(program, machine.t_pi)


def damping_factor(elapsed: float, machine: SpinSystem, observed_spin: int) -> float:
    """Signal attenuation exp(-elapsed / T2) for the observed spin."""
    if elapsed < 0:
        raise ValueError("elapsed wall time must be non-negative")
    if not 1 <= observed_spin <= machine.n:
        raise ValueError("observed spin out of range")
    return math.exp(-elapsed / machine.t2[observed_spin - 1])


def program_to_text(program: PulseProgram, t_pi: float) -> str:
    """Line format: DELAY <s> | RF <spins> <phase_rad> <angle_rad> [IDEAL],
    closed by WALL <s> computed at the given t_pi."""
    lines = []
    for ev in program.events:
        if isinstance(ev, Delay):
            lines.append(f"DELAY {ev.duration!r}")
        else:
            spins = ",".join(str(t) for t in ev.targets)
            tail = " IDEAL" if ev.ideal else ""
            lines.append(f"RF {spins} {ev.phase!r} {ev.angle!r}{tail}")
    lines.append(f"WALL {wall_time(program, t_pi)!r}")
    return "\n".join(lines) + "\n"


def program_from_text(text: str, t_pi: float | None = None) -> tuple[PulseProgram, float]:
    """Parse a serialized program. When t_pi is supplied the recomputed wall
    time must match the trailing WALL record to 1e-9 s; otherwise t_pi is
    inferred from the WALL record (and must come out non-negative)."""
    events: list[PulseEvent] = []
    wall: float | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if wall is not None:
            raise ValueError("events after WALL record")
        if fields[0] == "DELAY" and len(fields) == 2:
            events.append(Delay(float(fields[1])))
        elif fields[0] == "RF" and len(fields) in (4, 5):
            if len(fields) == 5 and fields[4] != "IDEAL":
                raise ValueError(f"unrecognized rf suffix {fields[4]!r}")
            targets = tuple(int(t) for t in fields[1].split(","))
            events.append(
                RfPulse(targets, float(fields[2]), float(fields[3]), len(fields) == 5)
            )
        elif fields[0] == "WALL" and len(fields) == 2:
            wall = float(fields[1])
        else:
            raise ValueError(f"unparseable program line: {line!r}")
    if wall is None:
        raise ValueError("missing WALL record")
    n = max((ev.targets[-1] for ev in events if isinstance(ev, RfPulse)), default=1)
    program = PulseProgram(tuple(events), n)
    if t_pi is None:
        delays = sum(ev.duration for ev in events if isinstance(ev, Delay))
        units = sum(abs(ev.angle) / _PI for ev in events if isinstance(ev, RfPulse))
        if units == 0.0:
            if abs(wall - delays) > 1e-9:
                raise ValueError("WALL record disagrees with event durations")
            return program, 0.0
        t_pi = (wall - delays) / units
        if t_pi < -1e-9:
            raise ValueError("WALL record implies a negative pulse width")
        t_pi = max(t_pi, 0.0)
    if abs(wall_time(program, t_pi) - wall) > 1e-9:
        raise ValueError("WALL record disagrees with event durations")
    return program, t_pi
