"""Unit tests for the versioned session config format."""

import json

import pytest

from spikeworks.config import (ConfigError, config_from_dict, default_config,
                               load_config)


def write(tmp_path, obj):
    path = tmp_path / "session.json"
    path.write_text(json.dumps(obj))
    return path


class TestLoading:
    def test_minimal_file(self, tmp_path):
        cfg = load_config(write(tmp_path, {"version": 1}))
        assert cfg.seed == 1
        assert cfg.network.builder == "epuck"
        assert cfg.world == "box"

    def test_version_required_in_files(self, tmp_path):
        with pytest.raises(ConfigError, match="version"):
            load_config(write(tmp_path, {"seed": 3}))
        with pytest.raises(ConfigError, match="version"):
            load_config(write(tmp_path, {"version": "1"}))

    def test_unsupported_version(self, tmp_path):
        with pytest.raises(ConfigError, match="version 2"):
            load_config(write(tmp_path, {"version": 2}))

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("<xml/>")
        with pytest.raises(ConfigError, match="JSON"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "nope.json")

    def test_full_document(self, tmp_path):
        cfg = load_config(write(tmp_path, {
            "version": 1,
            "seed": 9,
            "network": {"builder": "epuck", "weight": 20.0, "delay": 2,
                        "params": {"a": 0.02, "b": 0.2, "c": -65, "d": 8}},
            "codec": {"proximity": {"gain": 10.0},
                      "tof": {"gain_clear": 25.0, "d_stop": 0.05, "d_safe": 0.4},
                      "decoder": {"k": 0.005, "v_max": 0.1, "window_ms": 80}},
            "robot": {"wheel_radius": 0.02, "body_radius": 0.03},
            "world": {"walls": [[0, 0, 1, 0]], "start": [0.5, 0.5, 0]},
            "start": [0.4, 0.4, 1.0],
            "noise": {"amplitude": 1.5},
            "session": {"sensor_period_ms": 64, "rt_factor": 2.0},
            "ports": {"vel_out": "/custom/vel"},
            "monitors": [{"groups": ["ctx.ps"]}],
        }))
        assert cfg.seed == 9
        assert cfg.network.weight == 20.0
        assert cfg.codec.k == 0.005
        assert cfg.geometry.wheel_radius == 0.02
        assert cfg.start == (0.4, 0.4, 1.0)
        assert cfg.noise_amplitude == 1.5
        assert cfg.sensor_period_ms == 64
        assert cfg.ports["vel_out"] == "/custom/vel"
        assert cfg.ports["ps_out"] == "/epuck/sensors/ps"
        assert cfg.monitors == [{"groups": ["ctx.ps"]}]


class TestValidation:
    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            config_from_dict({"version": 1, "wat": 1})

    def test_unknown_section_keys(self):
        with pytest.raises(ConfigError, match="network"):
            config_from_dict({"version": 1, "network": {"wires": []}})
        with pytest.raises(ConfigError, match="codec"):
            config_from_dict({"version": 1, "codec": {"gain": 2}})
        with pytest.raises(ConfigError, match="noise"):
            config_from_dict({"version": 1, "noise": {"color": "pink"}})

    def test_bad_builder(self):
        with pytest.raises(ConfigError, match="builder"):
            config_from_dict({"version": 1, "network": {"builder": "lif"}})

    def test_bad_values_surface_with_context(self):
        with pytest.raises(ConfigError, match="network.params"):
            config_from_dict({"version": 1,
                              "network": {"params": {"a": -1.0}}})
        with pytest.raises(ConfigError, match="robot"):
            config_from_dict({"version": 1, "robot": {"wheel_radius": -0.1}})
        with pytest.raises(ConfigError, match="rt_factor"):
            config_from_dict({"version": 1, "session": {"rt_factor": -1}})
        with pytest.raises(ConfigError, match="amplitude"):
            config_from_dict({"version": 1, "noise": {"amplitude": -2}})
        with pytest.raises(ConfigError, match="start"):
            config_from_dict({"version": 1, "start": [1.0, 2.0]})

    def test_default_config_overrides(self):
        cfg = default_config(seed=77, world="tmaze")
        assert cfg.seed == 77 and cfg.world == "tmaze"
        with pytest.raises(ConfigError):
            default_config(bogus=1)
