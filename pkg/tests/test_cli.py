# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""测试命令行子命令的输出与退出码。"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import json  # 说明：解析命令输出
import math
from pathlib import Path
from typing import Any, Callable, Dict, List

import pytest  # 说明：测试框架

from flow_ldp.ldp_cli import build_parser, config_from_args, main

WriteJson = Callable[[str, Dict[str, Any]], str]


def _run(capsys: pytest.CaptureFixture[str], argv: List[str]) -> tuple[int, str]:  # 说明：调用 main 并取标准输出
    code = main(argv)
    return code, capsys.readouterr().out


def _json(capsys: pytest.CaptureFixture[str], argv: List[str]) -> Dict[str, Any]:  # 说明：成功运行并把输出解析为 JSON
    code, out = _run(capsys, argv)
    assert code == 0
    return json.loads(out)


def _csv_rows(text: str) -> List[List[str]]:  # 说明：跳过 "# provenance" 注释行
    return [line.split(",") for line in text.splitlines() if not line.startswith("#")]


@pytest.fixture(autouse=True)
def _no_worker_env(monkeypatch: pytest.MonkeyPatch) -> None:  # 说明：环境变量会覆盖线程数
    monkeypatch.delenv("FLOW_LDP_WORKERS", raising=False)


def test_rate_at_stationary_pair(capsys: pytest.CaptureFixture[str], two_state_model: str) -> None:  # 说明：(π,Q^π) 处速率为 0
    data = _json(capsys, ["rate", "--model", two_state_model, "--stationary"])
    assert data["type"] == "rate_report"
    assert data["value"] == 0.0 and data["reason"] == "Ok"
    assert data["provenance"]["config"]["subcommand"] == "rate"


def test_rate_of_divergent_pair_is_inf(capsys: pytest.CaptureFixture[str], two_state_model: str, write_json: WriteJson) -> None:  # 说明：+∞ 在 JSON 与 CSV 中都写作 inf
    pair = write_json(
        "pair.json",
        {
            "type": "pair",
            "measure": {"type": "measure", "weights": [[0, 0.5], [1, 0.5]]},
            "flow": {"type": "flow", "weights": [[0, 1, 1.0]]},
        },
    )
    data = _json(capsys, ["rate", "--model", two_state_model, "--pair", pair])
    assert data["value"] == "inf" and data["reason"] == "NonzeroDivergence"
    code, out = _run(capsys, ["rate", "--model", two_state_model, "--pair", pair, "--csv"])
    assert code == 0
    assert ["value", "inf"] in _csv_rows(out)


def test_rate_needs_an_input(capsys: pytest.CaptureFixture[str], two_state_model: str) -> None:  # 说明：没有 pair/measure/flow/stationary 时退出码 2
    code, _ = _run(capsys, ["rate", "--model", two_state_model])
    assert code == 2


def test_decompose_flow_file(capsys: pytest.CaptureFixture[str], write_json: WriteJson) -> None:  # 说明：三角形流只有一个环
    flow = write_json("tri.json", {"type": "flow", "weights": [["a", "b", 1.0], ["b", "c", 1.0], ["c", "a", 1.0]]})
    data = _json(capsys, ["decompose", "--flow", flow])
    assert data["cycles"] == [{"vertices": ["a", "b", "c"], "weight": 1.0}]
    assert data["reconstruction_error"] == 0.0
    assert data["cycle_mass"] == data["norm"] == 3.0


def test_decompose_truncated(capsys: pytest.CaptureFixture[str], write_json: WriteJson) -> None:  # 说明：越界通量经幽灵顶点报告为逃逸链
    flow = write_json("sq.json", {"type": "flow", "weights": [[0, 1, 1.5], [1, 0, 0.5], [1, 2, 1.0], [2, 3, 1.0], [3, 0, 1.0]]})
    data = _json(capsys, ["decompose", "--flow", flow, "--keep", "0,1,2"])
    assert data["escaping"] == [{"vertices": [0, 1, 2], "weight": 1.0}]
    assert (data["flux_out"], data["flux_in"]) == (1.0, 1.0)


def test_decompose_rejects_divergence(capsys: pytest.CaptureFixture[str], write_json: WriteJson) -> None:  # 说明：非零散度退出码 3
    flow = write_json("edge.json", {"type": "flow", "weights": [["a", "b", 1.0]]})
    code, _ = _run(capsys, ["decompose", "--flow", flow])
    assert code == 3


def test_check_conditions(capsys: pytest.CaptureFixture[str], poisson_model: str, two_state_model: str) -> None:  # 说明：三种条件与生灭链级数诊断
    data = _json(capsys, ["check", "--model", poisson_model, "--condition", "logsobolev"])
    assert data["verdict"] == "FailsOnTruncation"
    assert data["series"]["normalization"]["trend"] == "bounded"
    assert data["series"]["reciprocal"]["trend"] == "growing"
    data = _json(capsys, ["check", "--model", poisson_model, "--condition", "lyapunov", "--u", "geometric:4"])
    assert data["verdict"] == "HoldsOnTruncation"
    assert data["witnesses"]["sigma"] == 0.5
    data = _json(capsys, ["check", "--model", poisson_model, "--condition", "moments"])
    assert data["witnesses"]["sigma"] == 4.0
    code, _ = _run(capsys, ["check", "--model", two_state_model, "--condition", "logsobolev"])
    assert code == 3
    code, _ = _run(capsys, ["check", "--model", poisson_model, "--condition", "lyapunov", "--u", "linear"])
    assert code == 2


def test_simulate_is_reproducible_across_workers(capsys: pytest.CaptureFixture[str], two_state_model: str) -> None:  # 说明：同一种子的输出与线程数无关
    argv = ["simulate", "--model", two_state_model, "--T", "5", "--paths", "20", "--seed", "3"]
    _, first = _run(capsys, argv)
    _, again = _run(capsys, argv)
    _, threaded = _run(capsys, argv + ["--workers", "3"])
    assert first == again == threaded
    rows = _csv_rows(first)
    assert rows[0] == ["seed", "T", "observable", "value"]
    assert rows[1][:3] == ["3", "5", "mean:mu[0]"]


def test_simulate_single_trajectory(capsys: pytest.CaptureFixture[str], two_state_model: str) -> None:  # 说明：--trajectory 只输出一条轨道
    data = _json(capsys, ["simulate", "--model", two_state_model, "--T", "5", "--trajectory", "--json"])
    assert data["type"] == "trajectory"
    assert data["initial"] == 0 and data["horizon"] == 5.0
    times = [t for t, _ in data["jumps"]]
    assert times == sorted(times) and all(0.0 < t < 5.0 for t in times)


def test_counterexample_strong(capsys: pytest.CaptureFixture[str]) -> None:  # 说明：强拓扑反例扫描
    data = _json(capsys, ["counterexample", "--kind", "strong", "--n-max", "12", "--json"])
    rows = data["rows"]
    assert [r["n"] for r in rows] == list(range(2, 13))
    assert all(r["divergence_max"] <= 1e-12 and math.isfinite(r["rate"]) for r in rows)
    assert all(r["distance"] >= 0.9 for r in rows if r["n"] >= 10)


def test_counterexample_nontight(capsys: pytest.CaptureFixture[str]) -> None:  # 说明：非指数紧示例
    data = _json(capsys, ["counterexample", "--kind", "nontight", "--T", "1", "--paths", "500", "--json"])
    (row,) = data["rows"]
    assert row["bound"] == pytest.approx((1.0 / 3.0) ** 5)
    assert row["paths"] == 500 and row["ci_high"] >= row["bound"]


def test_tilt_estimate_small_run(capsys: pytest.CaptureFixture[str], two_state_model: str) -> None:  # 说明：别名 estimate 给出同样结果
    argv = ["tilt-estimate", "--model", two_state_model, "--event", "mu[0] >= 0.7", "--T-list", "5,10", "--paths", "200", "--json"]
    data = _json(capsys, argv)
    assert [r["T"] for r in data["rows"]] == [5.0, 10.0]
    assert all(0.0 < r["estimate"] < 1.0 for r in data["rows"])
    assert data["tilt_rate"] == pytest.approx((math.sqrt(0.7) - math.sqrt(0.3)) ** 2, rel=1e-3)
    assert data["decay_slope"] is not None
    alias = _json(capsys, ["estimate"] + argv[1:])
    assert alias["provenance"]["config"]["subcommand"] == "tilt-estimate"
    assert alias["rows"] == data["rows"]


def test_output_file(capsys: pytest.CaptureFixture[str], two_state_model: str, tmp_path: Path) -> None:  # 说明：-o 写文件且不写标准输出
    target = tmp_path / "out" / "rate.json"
    code, out = _run(capsys, ["rate", "--model", two_state_model, "--stationary", "-o", str(target)])
    assert code == 0 and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["reason"] == "Ok"


def test_error_exit_codes(capsys: pytest.CaptureFixture[str], tmp_path: Path, two_state_model: str) -> None:  # 说明：异常到退出码的映射
    code, _ = _run(capsys, ["rate", "--model", str(tmp_path / "missing.json"), "--stationary"])
    assert code == 2
    code, _ = _run(capsys, ["tilt-estimate", "--model", two_state_model, "--event", "mu[9] > 0", "--paths", "10"])
    assert code == 3
    code, _ = _run(capsys, ["simulate", "--model", two_state_model, "--T", "0"])
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["check", "--model", two_state_model, "--condition", "spectral"])
    assert info.value.code == 2


def test_options_exclude_common_arguments(two_state_model: str) -> None:  # 说明：公共参数不进入 options
    args = build_parser().parse_args(["simulate", "--model", two_state_model, "--x0", "1", "--workers", "2"])
    config = config_from_args(args)
    assert config.workers == 2
    assert config.options == {"trajectory": False, "x0": "1"}
    assert config.output_format == "csv" and config.horizons == [10.0] and config.paths == 100


def test_check_csv_lists_series_trends(capsys: pytest.CaptureFixture[str], poisson_model: str) -> None:  # 说明：CSV 输出带级数趋势行
    code, out = _run(capsys, ["check", "--model", poisson_model, "--condition", "moments", "--csv"])
    assert code == 0
    rows = _csv_rows(out)
    assert ["series:explosion", "growing"] in rows
    assert ["series:exit", "bounded"] in rows
