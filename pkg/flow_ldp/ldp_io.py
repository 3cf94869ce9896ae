# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件负责模型、测度、流、分解、轨道与各类报告的 JSON/CSV 读写。

JSON 中的 +∞ 写作字符串 "inf"；CSV 浮点统一写 17 位有效数字。每个写出的 JSON 都可以带
provenance 块（运行配置 + 库版本），同样的配置与种子得到字节相同的输出。
"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import csv  # 说明：CSV 输出
import io  # 说明：内存中的 CSV 缓冲
import json  # 说明：JSON 读写
import math  # 说明：无穷判定
from dataclasses import asdict, is_dataclass  # 说明：报告对象转 dict
from enum import Enum  # 说明：枚举值序列化
from pathlib import Path  # 说明：路径处理
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple  # 说明：类型标注所需

from .ldp_birth_death import birth_death_kernel  # 说明：生灭链模型转速率核
from .ldp_config import LIBRARY_VERSION  # 说明：库版本号
from .ldp_errors import ConfigError, ModelError  # 说明：统一异常类型
from .ldp_models import (  # 说明：数据结构
    BirthDeathSpec,
    ConditionReport,
    Cycle,
    CycleDecomposition,
    ExtendedReal,
    Flow,
    Measure,
    ProbabilityMeasure,
    RateKernel,
    RateReason,
    RateReport,
    SeriesDiagnostics,
    StateSpace,
    Trajectory,
    Verdict,
)

FLOAT_FORMAT = ".17g"  # 说明：CSV 浮点格式


# ---------------------------------------------------------------- 基础读写


def read_json(path: str) -> Dict[str, Any]:  # 说明：读取 JSON 对象，文件问题视为参数错误
    if not path:
        raise ConfigError("文件路径不能为空")
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"文件不存在: {path}")
    try:
        data = json.loads(file_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelError(f"文件不是合法 JSON: {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ModelError(f"JSON 顶层必须是对象: {path}")
    return data


def sanitize(value: Any) -> Any:
    """递归转换为 JSON 安全的值：非有限浮点写成字符串，元组变列表，枚举取值。"""
    if isinstance(value, ExtendedReal):
        return value.to_json()
    if isinstance(value, Enum):
        return value.value
    if is_dataclass(value) and not isinstance(value, type):
        return sanitize(asdict(value))
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, Mapping):
        return {str(k): sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize(v) for v in value]
    return value


def provenance_block(run_provenance: Mapping[str, Any]) -> Dict[str, Any]:  # 说明：{"config": ..., "version": ...}
    return {"config": sanitize(dict(run_provenance)), "version": LIBRARY_VERSION}


def dump_json(payload: Mapping[str, Any], provenance: Optional[Mapping[str, Any]] = None) -> str:
    body = dict(payload)
    if provenance is not None:
        body["provenance"] = provenance_block(provenance)
    return json.dumps(sanitize(body), ensure_ascii=False, indent=2) + "\n"


def write_text(path: str, text: str) -> None:  # 说明：写入文本文件，自动创建父目录
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")


def format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, FLOAT_FORMAT)
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(row.get(name, "")) for name in header])
    return buffer.getvalue()


def csv_document(header: Sequence[str], rows: Iterable[Mapping[str, Any]], provenance: Optional[Mapping[str, Any]] = None) -> str:
    """CSV 文本；带溯源时首行写成 "# provenance: {...}" 注释（读取时用 comment="#" 跳过）。"""
    body = csv_text(header, rows)
    if provenance is None:
        return body
    block = json.dumps(sanitize(provenance_block(provenance)), ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    return f"# provenance: {block}\n" + body


def _number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ModelError(f"{what} 必须是数值: {value!r}")
    try:
        return float(value)
    except ValueError as exc:
        raise ModelError(f"{what} 必须是数值: {value!r}") from exc


def _label(value: Any) -> Any:  # 说明：状态标签只能是 JSON 标量
    if isinstance(value, list):
        return tuple(_label(v) for v in value)
    if isinstance(value, (dict, float)) or value is None:
        raise ModelError(f"状态标签必须是字符串或整数: {value!r}")
    return value


def resolve_label(label: Any, states: Optional[StateSpace]) -> Any:
    """把 JSON 标签映射到状态空间里的标签，允许 "3" 与 3 互相匹配。"""
    label = _label(label)
    if states is None or label in states:
        return label
    for candidate in states.labels:
        if str(candidate) == str(label):
            return candidate
    raise ModelError(f"未知状态 {label!r}")


def _require_type(data: Mapping[str, Any], expected: str) -> None:
    kind = data.get("type", expected)
    if kind != expected:
        raise ModelError(f"期望 type={expected!r}，实际为 {kind!r}")


# ---------------------------------------------------------------- 模型


def birth_death_from_dict(data: Mapping[str, Any]) -> BirthDeathSpec:
    """{"type":"birth_death","b":[b_0..b_{K−1}],"d":[d_1..d_K] 或 [d_0..d_K],"truncation":K}。"""
    _require_type(data, "birth_death")
    try:
        K = int(data["truncation"])
        b = [_number(x, "b") for x in data["b"]]
        d = [_number(x, "d") for x in data["d"]]
    except (KeyError, TypeError) as exc:
        raise ModelError(f"生灭链模型缺少字段或字段类型错误: {exc}") from exc
    if len(d) == K:  # 说明：只给出 d_1..d_K 时补 d_0 占位
        d = [0.0] + d
    return BirthDeathSpec(tuple(b), tuple(d), K)


def birth_death_to_dict(spec: BirthDeathSpec) -> Dict[str, Any]:
    return {"type": "birth_death", "b": list(spec.b), "d": list(spec.d[1:]), "truncation": spec.truncation}


def model_from_dict(data: Mapping[str, Any]) -> RateKernel:
    """解析 sparse 或 birth_death 模型为速率核。"""
    kind = data.get("type")
    if kind == "birth_death":
        return birth_death_kernel(birth_death_from_dict(data))
    if kind != "sparse":
        raise ModelError(f"未知模型类型 {kind!r}，应为 sparse 或 birth_death")
    try:
        states = StateSpace(tuple(_label(s) for s in data["states"]))
        rates: Dict[Any, float] = {}
        for entry in data["rates"]:
            y, z, r = entry
            edge = (resolve_label(y, states), resolve_label(z, states))
            if edge in rates:
                raise ModelError(f"边 {edge!r} 重复出现")
            rates[edge] = _number(r, "速率")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"sparse 模型字段缺失或格式错误: {exc}") from exc
    return RateKernel.build(states, rates)


def model_to_dict(kernel: RateKernel) -> Dict[str, Any]:
    return {
        "type": "sparse",
        "states": list(kernel.states.labels),
        "rates": [[y, z, kernel.rate(y, z)] for y, z in kernel.edges()],
    }


def read_model(path: str) -> RateKernel:
    return model_from_dict(read_json(path))


def read_birth_death(path: str) -> BirthDeathSpec:
    return birth_death_from_dict(read_json(path))


# ---------------------------------------------------------------- 测度与流


def measure_to_dict(mu: Measure, states: Optional[StateSpace] = None) -> Dict[str, Any]:
    keys = list(mu.weights)
    if states is not None:
        keys.sort(key=states.index_of)
    return {"type": "measure", "weights": [[x, mu.weights[x]] for x in keys]}


def measure_from_dict(data: Mapping[str, Any], states: Optional[StateSpace] = None) -> ProbabilityMeasure:
    _require_type(data, "measure")
    try:
        weights = {resolve_label(x, states): _number(w, "测度权重") for x, w in data["weights"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"测度格式错误: {exc}") from exc
    return ProbabilityMeasure(weights)


def flow_to_dict(Q: Flow, states: Optional[StateSpace] = None) -> Dict[str, Any]:
    edges = list(Q.weights)
    if states is not None:
        edges.sort(key=states.edge_key)
    return {"type": "flow", "weights": [[y, z, Q.weights[(y, z)]] for y, z in edges]}


def flow_from_dict(data: Mapping[str, Any], states: Optional[StateSpace] = None) -> Flow:
    _require_type(data, "flow")
    weights: Dict[Any, float] = {}
    try:
        for y, z, w in data["weights"]:
            edge = (resolve_label(y, states), resolve_label(z, states))
            weights[edge] = weights.get(edge, 0.0) + _number(w, "流权重")
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"流格式错误: {exc}") from exc
    return Flow(weights)


def pair_to_dict(mu: Measure, Q: Flow, states: Optional[StateSpace] = None) -> Dict[str, Any]:
    return {"type": "pair", "measure": measure_to_dict(mu, states), "flow": flow_to_dict(Q, states)}


def pair_from_dict(data: Mapping[str, Any], states: Optional[StateSpace] = None) -> Tuple[ProbabilityMeasure, Flow]:
    _require_type(data, "pair")
    if "measure" not in data or "flow" not in data:
        raise ModelError("pair 需要 measure 与 flow 两个字段")
    return measure_from_dict(data["measure"], states), flow_from_dict(data["flow"], states)


def read_pair(path: str, states: Optional[StateSpace] = None) -> Tuple[ProbabilityMeasure, Flow]:
    return pair_from_dict(read_json(path), states)


def read_flow(path: str, states: Optional[StateSpace] = None) -> Flow:
    return flow_from_dict(read_json(path), states)


# ---------------------------------------------------------------- 分解


def decomposition_to_dict(d: CycleDecomposition) -> Dict[str, Any]:
    return {
        "type": "decomposition",
        "cycles": [{"vertices": list(cycle.vertices), "weight": weight} for cycle, weight in d.terms],
        "steps": d.steps,
    }


def decomposition_from_dict(data: Mapping[str, Any], states: Optional[StateSpace] = None) -> CycleDecomposition:
    _require_type(data, "decomposition")
    try:
        terms = tuple(
            (Cycle(tuple(resolve_label(v, states) for v in item["vertices"])), _number(item["weight"], "环权重"))
            for item in data["cycles"]
        )
    except (KeyError, TypeError) as exc:
        raise ModelError(f"分解格式错误: {exc}") from exc
    return CycleDecomposition(terms, int(data.get("steps", 0)))


# ---------------------------------------------------------------- 轨道


def trajectory_to_dict(traj: Trajectory) -> Dict[str, Any]:
    return {
        "type": "trajectory",
        "initial": traj.initial,
        "horizon": traj.horizon,
        "absorbed": traj.absorbed,
        "jumps": [[t, z] for t, z in traj.jumps],
    }


def trajectory_from_dict(data: Mapping[str, Any], states: Optional[StateSpace] = None) -> Trajectory:
    _require_type(data, "trajectory")
    try:
        jumps = tuple((_number(t, "跳跃时刻"), resolve_label(z, states)) for t, z in data["jumps"])
        return Trajectory(resolve_label(data["initial"], states), jumps, _number(data["horizon"], "时间窗"), bool(data.get("absorbed", False)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"轨道格式错误: {exc}") from exc


def trajectory_rows(traj: Trajectory) -> List[Dict[str, Any]]:  # 说明：(time, state) 行，首行为初始状态
    rows = [{"time": 0.0, "state": traj.initial}]
    rows.extend({"time": t, "state": z} for t, z in traj.jumps)
    return rows


# ---------------------------------------------------------------- 报告


def rate_report_to_dict(report: RateReport, states: Optional[StateSpace] = None, top_k: int = 5) -> Dict[str, Any]:
    edges = list(report.per_edge_terms)
    if states is not None:
        edges.sort(key=states.edge_key)
    return {
        "type": "rate_report",
        "value": report.value.to_json(),
        "reason": report.reason.value,
        "divergence_max": report.divergence_max,
        "per_edge_terms": [[y, z, report.per_edge_terms[(y, z)]] for y, z in edges],
        "offending_edges": [[y, z] for y, z in report.offending_edges],
        "top_edges": [[y, z, v] for (y, z), v in report.top_edges(top_k)],
    }


def rate_report_from_dict(data: Mapping[str, Any], states: Optional[StateSpace] = None) -> RateReport:
    _require_type(data, "rate_report")
    try:
        terms = {(resolve_label(y, states), resolve_label(z, states)): _number(v, "边项") for y, z, v in data.get("per_edge_terms", [])}
        offending = tuple((resolve_label(y, states), resolve_label(z, states)) for y, z in data.get("offending_edges", []))
        return RateReport(
            ExtendedReal.from_json(data["value"]),
            RateReason(data["reason"]),
            terms,
            _number(data.get("divergence_max", 0.0), "散度"),
            offending,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"速率报告格式错误: {exc}") from exc


def condition_report_to_dict(report: ConditionReport) -> Dict[str, Any]:
    return {
        "type": "condition_report",
        "condition": report.condition,
        "verdict": report.verdict.value,
        "witnesses": dict(report.witnesses),
        "trend": report.trend,
        "notes": list(report.notes),
    }


def condition_report_from_dict(data: Mapping[str, Any]) -> ConditionReport:
    _require_type(data, "condition_report")
    try:
        witnesses = {str(k): float(v) for k, v in data.get("witnesses", {}).items()}
        return ConditionReport(str(data["condition"]), Verdict(data["verdict"]), witnesses, str(data.get("trend", "")), tuple(data.get("notes", ())))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"条件报告格式错误: {exc}") from exc


def series_diagnostics_to_dict(diag: SeriesDiagnostics) -> Dict[str, Any]:  # 说明：只写部分和的末项与趋势，完整序列过长
    def last(values: Tuple[float, ...]) -> Any:
        return values[-1] if values else None

    return {
        "type": "series_diagnostics",
        "normalization": {"partial": last(diag.normalization_partial), "trend": diag.normalization_trend},
        "explosion": {"partial": last(diag.explosion_partial), "trend": diag.explosion_trend},
        "exit": {"partial": last(diag.exit_partial), "trend": diag.exit_trend},
        "reciprocal": {"partial": last(diag.reciprocal_partial), "trend": diag.reciprocal_trend},
    }
