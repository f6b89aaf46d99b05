"""Flat key = value experiment configuration.

One assignment per line, dotted keys, '#' comments. Frequencies carry an
explicit unit suffix: keys ending in _hz are converted to rad/s internally
(machine J values are the exception and stay in Hz, as the machine model
defines them); _rad_s values pass through; _s values are seconds.

Recognized keys:

    model.preset              h1 | h2 (fills every default below)
    model.n                   mode count (explicit models only)
    model.nu_hz | model.nu_rad_s          comma list of on-site frequencies
    model.v_<i>_<j>_hz | ..._rad_s        coupling entries, i < j
    model.convention_factor   overall coefficient multiplier
    machine.j_<i>_<j>_hz      scalar coupling entries
    machine.t_pi_s            pi-pulse duration
    machine.t2_s              dephasing time for all spins
    machine.t2_<i>_s          per-spin dephasing time
    schedule.steps            interpolation step count S
    schedule.t_ad_s           per-step preparation time
    schedule.evolver          default | exact | trotter | nmr
    plan.t0_s                 simulated time per sample step
    plan.k                    inner Trotter repetitions
    run.method                ideal | w1 | w2
    run.pulse_mode            delta | finite
    run.q                     sample count
    run.observed_spin         1-based spin measured
    run.damping               on | off
    run.exclude_dc            on | off (peak picking)
    run.init                  initial basis state as bits, e.g. 011
    run.population_floor      reachable-level population threshold
    noise.amplitude           uniform measurement noise half-width
    noise.seed                RNG seed for noise
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np

from . import presets
from .hamiltonian import PairingModel
from .nmr import SpinSystem
from .trotter import TrotterPlan

_TWO_PI = 2 * math.pi


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class ExperimentConfig:
    model: PairingModel
    machine: SpinSystem
    plan: TrotterPlan
    schedule_steps: int = presets.SCHEDULE_STEPS
    t_ad: float = presets.SCHEDULE_T_AD
    evolver: str = "default"
    method: str = "ideal"
    pulse_mode: str = "delta"
    q: int = 200
    observed_spin: int = presets.OBSERVED_SPIN
    damping: bool = False
    exclude_dc: bool = True
    init_bits: str = presets.INIT_BITS
    population_floor: float = 0.02
    noise_amplitude: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        if self.method not in ("ideal", "w1", "w2"):
            raise ConfigError("run.method: must be ideal, w1 or w2")
        if self.pulse_mode not in ("delta", "finite"):
            raise ConfigError("run.pulse_mode: must be delta or finite")
        if self.evolver not in ("default", "exact", "trotter", "nmr"):
            raise ConfigError("schedule.evolver: must be default, exact, trotter or nmr")
        if self.schedule_steps < 1:
            raise ConfigError("schedule.steps: must be >= 1")
        if not (self.t_ad >= 0 and math.isfinite(self.t_ad)):
            raise ConfigError("schedule.t_ad_s: must be non-negative and finite")
        if self.q < 2:
            raise ConfigError("run.q: need at least two samples")
        if not 1 <= self.observed_spin <= self.model.n:
            raise ConfigError("run.observed_spin: out of range")
        if len(self.init_bits) != self.model.n or set(self.init_bits) - {"0", "1"}:
            raise ConfigError("run.init: need one bit per mode")
        if not 0.0 < self.population_floor < 1.0:
            raise ConfigError("run.population_floor: must lie in (0, 1)")
        if self.noise_amplitude < 0:
            raise ConfigError("noise.amplitude: must be non-negative")
        if self.machine.n != self.model.n:
            raise ConfigError("machine.j_hz: spin count differs from the model")

    @property
    def init_index(self) -> int:
        return int(self.init_bits, 2)


def parse_config_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        entries[key] = value
    return entries


def _float(entries: dict[str, str], key: str) -> float:
    try:
        return float(entries[key])
    except ValueError:
        raise ConfigError(f"{key}: not a number: {entries[key]!r}") from None


def _int(entries: dict[str, str], key: str) -> int:
    try:
        return int(entries[key])
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {entries[key]!r}") from None


def _flag(entries: dict[str, str], key: str) -> bool:
    value = entries[key].lower()
    if value in ("on", "true", "1", "yes"):
        return True
    if value in ("off", "false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected on or off, got {entries[key]!r}")


def _float_list(entries: dict[str, str], key: str) -> list[float]:
    try:
        return [float(x) for x in entries[key].split(",")]
    except ValueError:
        raise ConfigError(f"{key}: not a comma-separated number list") from None


_MATRIX_KEY = re.compile(r"^(model\.v|machine\.j)_(\d+)_(\d+)_(hz|rad_s)$")


def _matrix_entries(entries: dict[str, str], prefix: str, n: int) -> np.ndarray | None:
    found = False
    m = np.zeros((n, n))
    for key in entries:
        match = _MATRIX_KEY.match(key)
        if not match or match.group(1) != prefix:
            continue
        found = True
        i, j = int(match.group(2)), int(match.group(3))
        if not (1 <= i <= n and 1 <= j <= n and i != j):
            raise ConfigError(f"{key}: indices must be distinct and within 1..{n}")
        value = _float(entries, key)
        if match.group(4) == "hz" and prefix == "model.v":
            value *= _TWO_PI
        if match.group(4) == "rad_s" and prefix == "machine.j":
            raise ConfigError(f"{key}: machine couplings are given in Hz")
        m[i - 1, j - 1] = m[j - 1, i - 1] = value
    return m if found else None


def _build_model(entries: dict[str, str], preset_name: str | None) -> PairingModel:
    factor = _float(entries, "model.convention_factor") if "model.convention_factor" in entries else None
    if preset_name is not None:
        base = presets.pairing_model(preset_name, factor)
        nu: tuple[float, ...] = base.nu
        coupling = np.array(base.coupling)
        n = base.n
        factor = base.convention_factor
    else:
        if "model.nu_hz" in entries:
            nu = tuple(x * _TWO_PI for x in _float_list(entries, "model.nu_hz"))
        elif "model.nu_rad_s" in entries:
            nu = tuple(_float_list(entries, "model.nu_rad_s"))
        else:
            raise ConfigError("model.nu_hz: required when no preset is chosen")
        n = len(nu)
        if "model.n" in entries and _int(entries, "model.n") != n:
            raise ConfigError("model.n: disagrees with the nu list length")
        coupling = np.zeros((n, n))
        factor = factor or 1.0
    explicit = _matrix_entries(entries, "model.v", len(nu))
    if explicit is not None:
        coupling = explicit
    try:
        return PairingModel(nu, coupling, factor)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build_machine(entries: dict[str, str], preset_name: str | None, n: int) -> SpinSystem:
    if preset_name is not None:
        base = presets.spin_system()
        j = np.array(base.j_hz)
        t_pi = base.t_pi
        t2 = list(base.t2)
    else:
        j = np.zeros((n, n))
        t_pi = 20e-6
        t2 = [0.25] * n
    explicit = _matrix_entries(entries, "machine.j", n)
    if explicit is not None:
        j = explicit
    if "machine.t_pi_s" in entries:
        t_pi = _float(entries, "machine.t_pi_s")
    if "machine.t2_s" in entries:
        t2 = [_float(entries, "machine.t2_s")] * n
    for spin in range(1, n + 1):
        key = f"machine.t2_{spin}_s"
        if key in entries:
            t2[spin - 1] = _float(entries, key)
    try:
        return SpinSystem(j, t_pi, tuple(t2))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


_KNOWN_SCALARS = {
    "model.preset",
    "model.n",
    "model.nu_hz",
    "model.nu_rad_s",
    "model.convention_factor",
    "machine.t_pi_s",
    "machine.t2_s",
    "schedule.steps",
    "schedule.t_ad_s",
    "schedule.evolver",
    "plan.t0_s",
    "plan.k",
    "run.method",
    "run.pulse_mode",
    "run.q",
    "run.observed_spin",
    "run.damping",
    "run.exclude_dc",
    "run.init",
    "run.population_floor",
    "noise.amplitude",
    "noise.seed",
}


def _check_keys(entries: dict[str, str]) -> None:
    for key in entries:
        if key in _KNOWN_SCALARS or _MATRIX_KEY.match(key) or re.match(r"^machine\.t2_\d+_s$", key):
            continue
        raise ConfigError(f"{key}: unknown configuration key")


def build_config(
    preset: str | None = None,
    config_text: str | None = None,
    overrides: tuple[str, ...] = (),
) -> ExperimentConfig:
    """Assemble a config from (in increasing precedence) preset defaults, a
    config file body and repeatable 'key=value' override strings."""
    entries: dict[str, str] = {}
    if config_text is not None:
        entries.update(parse_config_text(config_text))
    for item in overrides:
        entries.update(parse_config_text(item))
    preset_name = preset or entries.get("model.preset")
    if preset_name is not None and preset_name not in presets.PRESET_NAMES:
        raise ConfigError(f"model.preset: unknown preset {preset_name!r}")

    _check_keys(entries)
    model = _build_model(entries, preset_name)
    machine = _build_machine(entries, preset_name, model.n)

    defaults = presets.DEFAULTS.get(preset_name or "", {"t0": 1e-3, "k": 1, "q": 200})
    t0 = _float(entries, "plan.t0_s") if "plan.t0_s" in entries else defaults["t0"]
    k = _int(entries, "plan.k") if "plan.k" in entries else defaults["k"]
    try:
        plan = TrotterPlan(t0, k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    init_default = presets.INIT_BITS if model.n == 3 else "0" * model.n
    try:
        return ExperimentConfig(
            model=model,
            machine=machine,
            plan=plan,
            schedule_steps=_int(entries, "schedule.steps") if "schedule.steps" in entries else presets.SCHEDULE_STEPS,
            t_ad=_float(entries, "schedule.t_ad_s") if "schedule.t_ad_s" in entries else presets.SCHEDULE_T_AD,
            evolver=entries.get("schedule.evolver", "default"),
            method=entries.get("run.method", "ideal"),
            pulse_mode=entries.get("run.pulse_mode", "delta"),
            q=_int(entries, "run.q") if "run.q" in entries else defaults["q"],
            observed_spin=_int(entries, "run.observed_spin") if "run.observed_spin" in entries else presets.OBSERVED_SPIN,
            damping=_flag(entries, "run.damping") if "run.damping" in entries else False,
            exclude_dc=_flag(entries, "run.exclude_dc") if "run.exclude_dc" in entries else True,
            init_bits=entries.get("run.init", init_default),
            population_floor=_float(entries, "run.population_floor") if "run.population_floor" in entries else 0.02,
            noise_amplitude=_float(entries, "noise.amplitude") if "noise.amplitude" in entries else 0.0,
            noise_seed=_int(entries, "noise.seed") if "noise.seed" in entries else 0,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def with_plan(cfg: ExperimentConfig, t0: float, k: int | None = None, q: int | None = None) -> ExperimentConfig:
    """Derived config with a different sampling point (used by sweeps)."""
    try:
        return replace(
            cfg,
            plan=TrotterPlan(t0, k if k is not None else cfg.plan.k),
            q=q if q is not None else cfg.q,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
