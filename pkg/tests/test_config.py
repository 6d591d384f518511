import json

import pytest

from ghostsim import ConfigurationError
from ghostsim.config import load_config, parse_config_text

_MINIMAL = """{
  "speckle": {"width": 16, "height": 16},
  "object": {"builtin": "disk"},
  "count": 10
}"""


def test_minimal_config_gets_defaults():
    cfg = parse_config_text(_MINIMAL)
    assert cfg["speckle"] == {"width": 16, "height": 16, "grain_radius": 2.0, "mean_intensity": 1.0, "seed": 0}
    assert cfg["count"] == 10
    assert cfg["noise"]["kind"] == "off"
    assert cfg["noise"]["position"] == "none"
    assert cfg["noise"]["spatial"] is None
    assert cfg["output"] == {"dir": "out", "emit_curves": True, "emit_frames": False, "igi_normalization": "unbiased"}


def test_full_config_round_trip():
    text = json.dumps(
        {
            "speckle": {"width": 8, "height": 8, "grain_radius": 1.5, "mean_intensity": 2.0, "seed": 3},
            "object": {"builtin": "TH"},
            "count": 5,
            "noise": {
                "position": "B",
                "kind": "sinusoid",
                "amplitude": 10.0,
                "frequency": 5.0,
                "phase": 0.5,
                "sample_rate": 25.0,
            },
            "output": {"dir": "elsewhere", "emit_frames": True, "igi_normalization": "paper-literal"},
        }
    )
    cfg = parse_config_text(text)
    assert cfg["noise"]["amplitude"] == 10.0
    assert cfg["output"]["dir"] == "elsewhere"
    assert cfg["output"]["emit_curves"] is True  # untouched default


def test_error_messages_carry_path_and_line():
    text = '{\n  "speckle": {"width": 16, "height": 16},\n  "object": {"builtin": "disk"},\n  "count": 1\n}'
    with pytest.raises(ConfigurationError) as err:
        parse_config_text(text, path="scene.json")
    assert str(err.value).startswith("scene.json:4:")
    assert "count" in str(err.value)


def test_invalid_json_reports_line():
    with pytest.raises(ConfigurationError) as err:
        parse_config_text('{\n  "speckle": }', path="x.json")
    assert str(err.value).startswith("x.json:2:")


def test_unknown_keys_rejected_at_every_level():
    for text, key in [
        ('{"speckle": {"width": 16, "height": 16}, "object": {"builtin": "disk"}, "count": 5, "banana": 1}', "banana"),
        ('{"speckle": {"width": 16, "height": 16, "gain": 2}, "object": {"builtin": "disk"}, "count": 5}', "gain"),
        (
            '{"speckle": {"width": 16, "height": 16}, "object": {"builtin": "disk"}, "count": 5,'
            ' "noise": {"kind": "off", "level": 3}}',
            "level",
        ),
        (
            '{"speckle": {"width": 16, "height": 16}, "object": {"builtin": "disk"}, "count": 5,'
            ' "output": {"format": "png"}}',
            "format",
        ),
    ]:
        with pytest.raises(ConfigurationError) as err:
            parse_config_text(text)
        assert key in str(err.value)


def test_missing_required_keys():
    with pytest.raises(ConfigurationError) as err:
        parse_config_text('{"object": {"builtin": "disk"}, "count": 5}')
    assert "speckle" in str(err.value)
    with pytest.raises(ConfigurationError):
        parse_config_text('{"speckle": {"width": 16}, "object": {"builtin": "disk"}, "count": 5}')
    with pytest.raises(ConfigurationError):
        parse_config_text('{"speckle": {"width": 16, "height": 16}, "count": 5}')


def test_object_needs_exactly_one_source():
    with pytest.raises(ConfigurationError):
        parse_config_text('{"speckle": {"width": 16, "height": 16}, "object": {}, "count": 5}')
    with pytest.raises(ConfigurationError):
        parse_config_text(
            '{"speckle": {"width": 16, "height": 16}, "object": {"builtin": "disk", "pgm": "m.pgm"}, "count": 5}'
        )


def test_amplitude_forms_are_exclusive():
    base = '{"speckle": {"width": 16, "height": 16}, "object": {"builtin": "disk"}, "count": 5, "noise": %s}'
    with pytest.raises(ConfigurationError) as err:
        parse_config_text(base % '{"kind": "constant", "amplitude": 1.0, "amplitude_rel_std": 2.0}')
    assert "amplitude" in str(err.value)
    cfg = parse_config_text(base % '{"kind": "constant", "amplitude_rel_std": 2.0}')
    assert cfg["noise"]["amplitude_rel_std"] == 2.0
    assert "amplitude" not in cfg["noise"]


def test_type_checks_reject_bools_and_strings():
    with pytest.raises(ConfigurationError):
        parse_config_text('{"speckle": {"width": true, "height": 16}, "object": {"builtin": "disk"}, "count": 5}')
    with pytest.raises(ConfigurationError):
        parse_config_text('{"speckle": {"width": 16, "height": 16}, "object": {"builtin": "disk"}, "count": "5"}')
    with pytest.raises(ConfigurationError):
        parse_config_text(
            '{"speckle": {"width": 16, "height": 16}, "object": {"builtin": "disk"}, "count": 5,'
            ' "output": {"emit_frames": 1}}'
        )


def test_manifest_unwraps_to_embedded_config():
    cfg = parse_config_text(_MINIMAL)
    manifest = {
        "format": "ghostsim-manifest",
        "version": 1,
        "tool": {"name": "ghostsim", "version": "0.0.0"},
        "config": {k: v for k, v in cfg.items() if k != "output"} | {"output": {"emit_frames": True}},
        "scenario_digest": "abc",
        "clean_bucket_std": 1.0,
    }
    back = parse_config_text(json.dumps(manifest))
    assert back["speckle"] == cfg["speckle"]
    assert back["count"] == cfg["count"]
    assert back["output"]["emit_frames"] is True
    assert back["output"]["dir"] == "out"  # manifests never pin the output dir


def test_load_config_reads_files(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(_MINIMAL)
    cfg = load_config(path)
    assert cfg["count"] == 10
    with pytest.raises(OSError):
        load_config(tmp_path / "absent.json")
