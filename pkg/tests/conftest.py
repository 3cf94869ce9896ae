# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""测试共享的小模型与文件辅助函数。"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable, Dict

import pytest

from flow_ldp.ldp_models import Flow, RateKernel


@pytest.fixture
def two_state() -> RateKernel:  # 说明：对称单位速率两状态链
    return RateKernel.build([0, 1], {(0, 1): 1.0, (1, 0): 1.0})


@pytest.fixture
def three_state() -> RateKernel:  # 说明：a→b→c→a 的环，外加一条回边 b→a
    return RateKernel.build(["a", "b", "c"], {("a", "b"): 1.0, ("b", "c"): 2.0, ("c", "a"): 3.0, ("b", "a"): 0.5})


@pytest.fixture
def triangle_flow() -> Flow:
    return Flow({("a", "b"): 1.0, ("b", "c"): 1.0, ("c", "a"): 1.0})


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, Dict[str, Any]], str]:
    def _write(name: str, data: Dict[str, Any]) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def two_state_model(write_json: Callable[[str, Dict[str, Any]], str]) -> str:
    return write_json("two_state.json", {"type": "sparse", "states": [0, 1], "rates": [[0, 1, 1.0], [1, 0, 1.0]]})


@pytest.fixture
def poisson_model(write_json: Callable[[str, Dict[str, Any]], str]) -> str:  # 说明：b_k=1，d_k=k，K=100 的生灭链 JSON
    K = 100
    return write_json("poisson.json", {"type": "birth_death", "b": [1.0] * K, "d": [float(k) for k in range(1, K + 1)], "truncation": K})
