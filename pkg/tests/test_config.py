# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""测试配置读写、合并与线程数优先级。"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import json  # 说明：读取随包配置
from pathlib import Path

import pytest  # 说明：测试框架

import flow_ldp
from flow_ldp.ldp_config import (
    LIBRARY_VERSION,
    WORKERS_ENV,
    Tolerances,
    get_default_config,
    load_config,
    merge_config,
    resolve_workers,
    save_config,
    sigma_grid,
)
from flow_ldp.ldp_errors import (
    ConfigError,
    DegenerateTilt,
    EventParseError,
    InvalidArgument,
    ModelError,
    NumericalFailure,
    exit_code_for,
)


def test_shipped_config_mirrors_defaults() -> None:  # 说明：config.json 与默认值一致
    shipped = json.loads((Path(flow_ldp.__file__).parent / "config.json").read_text(encoding="utf-8"))
    assert shipped == get_default_config()


def test_merge_config_keeps_defaults_and_user_keys() -> None:  # 说明：递归合并
    merged = merge_config(get_default_config(), {"tolerances": {"mass": 1e-6}, "extra": 1})
    assert merged["tolerances"]["mass"] == 1e-6
    assert merged["tolerances"]["linear"] == 1e-9
    assert merged["extra"] == 1


def test_load_and_save_round_trip(tmp_path: Path) -> None:  # 说明：写入后读回
    path = tmp_path / "cfg.json"
    save_config(str(path), {"simulation": {"seed": 7}})
    assert load_config(str(path))["simulation"]["seed"] == 7
    assert load_config(None) == get_default_config()


def test_load_config_errors(tmp_path: Path) -> None:  # 说明：缺失、损坏、非对象都报 ConfigError
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(broken))


def test_tolerances_from_config() -> None:  # 说明：容差块转为 Tolerances
    tol = Tolerances.from_config({"tolerances": {"divergence": 1e-6}})
    assert tol.divergence == 1e-6
    assert tol.divergence_for(10.0) == pytest.approx(1e-5)
    assert tol.divergence_for(0.1) == 1e-6
    with pytest.raises(ConfigError):
        Tolerances.from_config({"tolerances": {"mass": -1.0}})
    with pytest.raises(ConfigError):
        Tolerances.from_config({"tolerances": {"mass": "x"}})


def test_resolve_workers_precedence(monkeypatch: pytest.MonkeyPatch) -> None:  # 说明：配置 < 环境变量 < 命令行
    config = {"simulation": {"workers": 2}}
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert resolve_workers(config) == 2
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert resolve_workers(config) == 3
    assert resolve_workers(config, 5) == 5
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(ConfigError):
        resolve_workers(config)
    with pytest.raises(ConfigError):
        resolve_workers(config, 0)


def test_sigma_grid_default() -> None:  # 说明：默认网格 2^{−10}..2^3
    grid = sigma_grid()
    assert grid[0] == 2.0 ** -10 and grid[-1] == 8.0
    assert len(grid) == 14


@pytest.mark.parametrize(
    "exc, code",
    [
        (ConfigError("x"), 2),
        (ModelError("x"), 3),
        (InvalidArgument("x"), 3),
        (EventParseError("x"), 3),
        (NumericalFailure("x"), 4),
        (DegenerateTilt("x"), 4),
        (RuntimeError("x"), 1),
    ],
)
def test_exit_codes(exc: BaseException, code: int) -> None:  # 说明：异常族到退出码
    assert exit_code_for(exc) == code


def test_version_exported() -> None:
    assert flow_ldp.__version__ == LIBRARY_VERSION
