import json

import pytest

from atmask.config.settings import get_settings
from atmask.controllers import ConfigController
from atmask.repositories import ArtifactRepository
from atmask.utils.exceptions import ConfigError


@pytest.fixture
def controller(tmp_path):
    return ConfigController(ArtifactRepository(root=tmp_path), get_settings())


def write_config(tmp_path, payload, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def test_defaults(controller):
    cfg = controller.resolve()
    assert cfg.seed == 0 and cfg.threads == 1
    assert cfg.mask.mask_ratio_r == 0.75
    assert cfg.mask.high_var_fraction_beta == 0.65
    assert cfg.tvm.alpha == 0.6 and cfg.tvm.stride_s == 4
    assert cfg.preprocess.hu_window == (-1000.0, 500.0)


def test_environment_sets_the_seed(monkeypatch, tmp_path):
    monkeypatch.setenv("ATMASK_SEED", "7")
    monkeypatch.setenv("ATMASK_THREADS", "3")
    get_settings.cache_clear()
    cfg = ConfigController(ArtifactRepository(root=tmp_path)).resolve()
    assert cfg.seed == 7 and cfg.threads == 3
    assert cfg.mask.seed == cfg.train.seed == cfg.phantom.seed == 7


def test_file_beats_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("ATMASK_SEED", "7")
    get_settings.cache_clear()
    path = write_config(tmp_path, {"seed": 3, "mask": {"mask_ratio_r": 0.5}})
    cfg = ConfigController(ArtifactRepository(root=tmp_path)).resolve(config_path=path)
    assert cfg.seed == 3 and cfg.mask.seed == 3
    assert cfg.mask.mask_ratio_r == 0.5


def test_flag_beats_file(controller, tmp_path):
    path = write_config(tmp_path, {"seed": 3, "mask": {"seed": 11}})
    cfg = controller.resolve(config_path=path, seed=5)
    assert cfg.seed == 5
    assert cfg.mask.seed == 5


def test_explicit_section_seed_is_kept_without_flag(controller, tmp_path):
    path = write_config(tmp_path, {"seed": 3, "mask": {"seed": 11}})
    cfg = controller.resolve(config_path=path)
    assert cfg.mask.seed == 11
    assert cfg.train.seed == 3


def test_overrides_skip_unset_flags(controller):
    cfg = controller.resolve(overrides={"mask": {"mask_ratio_r": 0.4, "threshold_tau": None}})
    assert cfg.mask.mask_ratio_r == 0.4
    assert cfg.mask.threshold_tau == 0.5


@pytest.mark.parametrize("payload", [
    {"mask": {"mask_ratio": 0.5}},
    {"unknown_section": {}},
    {"mask": {"mask_ratio_r": 2.0}},
    {"tvm": {"var_window_w": 4}},
])
def test_invalid_files(controller, tmp_path, payload):
    with pytest.raises(ConfigError):
        controller.resolve(config_path=write_config(tmp_path, payload))


def test_invalid_override(controller):
    with pytest.raises(ConfigError, match="mask.high_var_fraction_beta"):
        controller.resolve(overrides={"mask": {"high_var_fraction_beta": -0.1}})


def test_unknown_override_section(controller):
    with pytest.raises(ConfigError, match="unknown config section"):
        controller.resolve(overrides={"nope": {"x": 1}})


def test_missing_file(controller, tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        controller.resolve(config_path=tmp_path / "absent.json")


def test_dump_then_load_is_identity(controller, tmp_path):
    cfg = controller.resolve(seed=9, overrides={"tvm": {"alpha": 0.2}, "experiment": {"ratios": [0.5, 0.9]}})
    path = controller.dump(cfg, tmp_path / "dumped.json")
    again = controller.resolve(config_path=path)
    assert again == cfg
