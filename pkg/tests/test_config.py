"""Config parsing, precedence and validation."""

import math

import numpy as np
import pytest

from pairgap.config import ConfigError, build_config, parse_config_text, with_plan
from pairgap.presets import pairing_model, spin_system

TWO_PI = 2 * math.pi


def test_parse_strips_comments_and_blanks():
    text = """
    # full-line comment
    plan.t0_s = 2e-3   # trailing comment
    run.q=200

    model.preset = h1
    """
    entries = parse_config_text(text)
    assert entries == {"plan.t0_s": "2e-3", "run.q": "200", "model.preset": "h1"}


def test_parse_rejects_bare_words_and_empty_sides():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config_text("not a key value pair")
    with pytest.raises(ConfigError, match="empty key or value"):
        parse_config_text("plan.t0_s =")
    with pytest.raises(ConfigError, match="empty key or value"):
        parse_config_text("= 3")


def _models_equal(a, b):
    return (a.nu == b.nu and np.array_equal(a.coupling, b.coupling)
            and a.convention_factor == b.convention_factor)


def test_preset_defaults_h1():
    cfg = build_config(preset="h1")
    assert _models_equal(cfg.model, pairing_model("h1"))
    ref = spin_system()
    assert np.array_equal(cfg.machine.j_hz, ref.j_hz)
    assert cfg.machine.t_pi == ref.t_pi and cfg.machine.t2 == ref.t2
    assert cfg.plan.t0 == 2e-3 and cfg.plan.k == 2
    assert cfg.q == 200
    assert cfg.method == "ideal" and cfg.pulse_mode == "delta"
    assert cfg.observed_spin == 1
    assert cfg.init_bits == "011" and cfg.init_index == 3
    assert cfg.damping is False and cfg.exclude_dc is True


def test_preset_via_file_key():
    cfg = build_config(config_text="model.preset = h2\n")
    assert _models_equal(cfg.model, pairing_model("h2"))
    assert cfg.plan.t0 == 0.5e-3 and cfg.plan.k == 2


def test_unknown_preset_named_in_error():
    with pytest.raises(ConfigError, match="model.preset"):
        build_config(preset="h3")


def test_precedence_file_over_preset_override_over_file():
    text = "plan.t0_s = 1e-3\nrun.q = 64\n"
    cfg = build_config(preset="h1", config_text=text)
    assert cfg.plan.t0 == 1e-3 and cfg.q == 64
    cfg = build_config(preset="h1", config_text=text, overrides=("plan.t0_s=4e-3",))
    assert cfg.plan.t0 == 4e-3 and cfg.q == 64  # only the overridden key moves


def test_model_coupling_hz_key_converts_to_rad_s():
    cfg = build_config(preset="h1", overrides=("model.v_1_2_hz=10",))
    want = np.array(pairing_model("h1").coupling)
    # explicit matrix entries replace the whole coupling table
    assert cfg.model.coupling[0][1] == pytest.approx(10 * TWO_PI, rel=1e-15)
    assert cfg.model.coupling[1][0] == cfg.model.coupling[0][1]
    assert cfg.model.coupling[0][2] == 0.0
    assert want[0, 1] != cfg.model.coupling[0][1]


def test_machine_j_stays_in_hz_and_rejects_rad_s():
    cfg = build_config(preset="h1", overrides=("machine.j_1_2_hz=100",))
    assert cfg.machine.j_hz[0][1] == 100.0
    with pytest.raises(ConfigError, match="machine couplings are given in Hz"):
        build_config(preset="h1", overrides=("machine.j_1_2_rad_s=10",))


def test_matrix_indices_validated():
    with pytest.raises(ConfigError, match="model.v_1_1_hz"):
        build_config(preset="h1", overrides=("model.v_1_1_hz=5",))
    with pytest.raises(ConfigError, match="within 1..3"):
        build_config(preset="h1", overrides=("model.v_1_4_hz=5",))


def test_presetless_model_from_nu_list():
    text = "model.nu_hz = 10, 20\nmodel.v_1_2_hz = 5\nrun.init = 00\n"
    cfg = build_config(config_text=text)
    assert cfg.model.n == 2
    assert cfg.model.nu == pytest.approx((10 * TWO_PI, 20 * TWO_PI))
    assert cfg.model.coupling[0][1] == pytest.approx(5 * TWO_PI)
    assert cfg.model.convention_factor == 1.0
    # machine defaults for an ad-hoc model: no couplings, 20us pulses
    assert np.all(np.asarray(cfg.machine.j_hz) == 0.0)
    assert cfg.machine.t_pi == 20e-6
    assert cfg.machine.t2 == (0.25, 0.25)


def test_presetless_model_nu_rad_s_taken_verbatim():
    cfg = build_config(config_text="model.nu_rad_s = 1.5, 2.5\nrun.init = 10\n")
    assert cfg.model.nu == (1.5, 2.5)


def test_presetless_model_requires_nu():
    with pytest.raises(ConfigError, match="model.nu_hz"):
        build_config(config_text="plan.t0_s = 1e-3\n")


def test_model_n_must_agree_with_nu_length():
    with pytest.raises(ConfigError, match="model.n"):
        build_config(config_text="model.nu_hz = 1, 2, 3\nmodel.n = 4\n")


def test_t2_scalar_then_per_spin():
    cfg = build_config(preset="h1", overrides=("machine.t2_s=0.5", "machine.t2_2_s=0.1"))
    assert cfg.machine.t2 == (0.5, 0.1, 0.5)


def test_negative_t0_names_the_key():
    with pytest.raises(ConfigError, match="plan.t0"):
        build_config(preset="h1", overrides=("plan.t0_s=-1e-3",))


def test_unknown_key_named_in_error():
    with pytest.raises(ConfigError, match="run.qq"):
        build_config(preset="h1", overrides=("run.qq=100",))


def test_bad_enum_values():
    with pytest.raises(ConfigError, match="run.method"):
        build_config(preset="h1", overrides=("run.method=w3",))
    with pytest.raises(ConfigError, match="run.pulse_mode"):
        build_config(preset="h1", overrides=("run.pulse_mode=square",))
    with pytest.raises(ConfigError, match="schedule.evolver"):
        build_config(preset="h1", overrides=("schedule.evolver=magnus",))
    with pytest.raises(ConfigError, match="run.damping"):
        build_config(preset="h1", overrides=("run.damping=maybe",))


def test_flag_spellings():
    for word, want in (("on", True), ("TRUE", True), ("1", True),
                       ("off", False), ("no", False)):
        cfg = build_config(preset="h1", overrides=(f"run.damping={word}",))
        assert cfg.damping is want


def test_run_section_validation():
    with pytest.raises(ConfigError, match="run.observed_spin"):
        build_config(preset="h1", overrides=("run.observed_spin=4",))
    with pytest.raises(ConfigError, match="run.init"):
        build_config(preset="h1", overrides=("run.init=01",))
    with pytest.raises(ConfigError, match="run.q"):
        build_config(preset="h1", overrides=("run.q=1",))
    with pytest.raises(ConfigError, match="run.population_floor"):
        build_config(preset="h1", overrides=("run.population_floor=1.5",))
    with pytest.raises(ConfigError, match="not a number"):
        build_config(preset="h1", overrides=("plan.t0_s=fast",))
    with pytest.raises(ConfigError, match="not an integer"):
        build_config(preset="h1", overrides=("plan.k=2.5",))


def test_init_index_parses_binary():
    cfg = build_config(preset="h1", overrides=("run.init=101",))
    assert cfg.init_index == 5


def test_with_plan_replaces_only_the_plan():
    cfg = build_config(preset="h1")
    alt = with_plan(cfg, 1e-3)
    assert alt.plan.t0 == 1e-3 and alt.plan.k == cfg.plan.k and alt.q == cfg.q
    alt = with_plan(cfg, 1e-3, k=8, q=512)
    assert (alt.plan.t0, alt.plan.k, alt.q) == (1e-3, 8, 512)
    assert alt.model is cfg.model and alt.machine is cfg.machine
    with pytest.raises(ValueError):
        with_plan(cfg, -1e-3)
