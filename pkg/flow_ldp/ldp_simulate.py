# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件负责可复现的轨道采样与经验统计量：经验测度、经验流、周期化流、连续性残差与鞅残差。

随机数使用以 (seed, 轨道序号) 为键的 Philox 计数器生成器，因此批量并行时结果与线程数无关。
"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import math  # 说明：对数与精确求和
from concurrent.futures import ThreadPoolExecutor  # 说明：批量轨道并行
from dataclasses import dataclass  # 说明：采样表
from typing import Dict, List, Optional, Sequence, Tuple  # 说明：类型标注所需

import numpy as np  # 说明：随机数与累积和

from .ldp_errors import AbsorbedBeforeHorizon, InvalidArgument, ModelError, UnknownEdge, logger  # 说明：统一异常与日志
from .ldp_events import LinearForm, parse_expression  # 说明：观测量表达式
from .ldp_models import (  # 说明：数据结构
    Edge,
    EmpiricalPair,
    Flow,
    ProbabilityMeasure,
    RateKernel,
    SignedMeasure,
    State,
    Trajectory,
)


def make_rng(seed: int, index: int = 0) -> np.random.Generator:  # 说明：按 (seed, index) 派生独立的计数器流
    if seed < 0 or index < 0:
        raise InvalidArgument("seed 与 index 必须是非负整数")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


@dataclass(frozen=True)
class _JumpTable:  # 说明：每个状态的出边目标与累积速率
    targets: Dict[State, Tuple[State, ...]]
    cumulative: Dict[State, np.ndarray]
    exit: Dict[State, float]

    @classmethod
    def of(cls, kernel: RateKernel) -> "_JumpTable":
        targets: Dict[State, Tuple[State, ...]] = {}
        cumulative: Dict[State, np.ndarray] = {}
        for x, items in kernel.out_edges.items():
            targets[x] = tuple(z for z, _ in items)  # 说明：按目标下标排序，边界处低下标优先
            cumulative[x] = np.cumsum([rate for _, rate in items]) if items else np.zeros(0)
        return cls(targets, cumulative, dict(kernel.exit))


def _sample(table: _JumpTable, x0: State, T: float, rng: np.random.Generator, strict: bool) -> Trajectory:
    jumps: List[Tuple[float, State]] = []
    current = x0
    t = 0.0
    absorbed = False
    while True:
        rate = table.exit[current]
        if rate <= 0.0:  # 说明：出口速率为零，轨道以最后的逗留补齐到 T
            absorbed = True
            break
        t += -math.log(1.0 - rng.random()) / rate  # 说明：逆 CDF 生成指数逗留时间，1−U ∈ (0,1]
        if t > T:
            break
        cum = table.cumulative[current]
        pick = int(np.searchsorted(cum, rng.random() * cum[-1], side="left"))  # 说明：首个 cum ≥ v，恰在边界时低下标胜出
        current = table.targets[current][min(pick, len(cum) - 1)]
        jumps.append((t, current))
    if absorbed:
        if strict:
            raise AbsorbedBeforeHorizon(f"轨道在时刻 {t:.6g} 被状态 {current!r} 吸收，早于时间窗 {T}")
        logger.debug(f"轨道在状态 {current!r} 被吸收，已用最后的逗留补齐到 T={T}")
    return Trajectory(x0, tuple(jumps), float(T), absorbed)


def sample_path(kernel: RateKernel, x0: State, T: float, seed: int, index: int = 0, strict: bool = False) -> Trajectory:
    """采样一条 [0,T] 上的轨道；给定 (seed, index) 结果完全确定。"""
    if x0 not in kernel.states:
        raise ModelError(f"初始状态 {x0!r} 不在状态集合中")
    if not (T >= 0.0 and math.isfinite(T)):
        raise InvalidArgument(f"时间窗必须是非负有限数: {T!r}")
    return _sample(_JumpTable.of(kernel), x0, float(T), make_rng(seed, index), strict)


def sample_paths(
    kernel: RateKernel,
    x0: State,
    T: float,
    seed: int,
    n: int,
    workers: int = 1,
    strict: bool = False,
    offset: int = 0,
) -> List[Trajectory]:
    """并行采样 n 条轨道，第 i 条使用流 (seed, offset+i)，输出按序号排列。"""
    if x0 not in kernel.states:
        raise ModelError(f"初始状态 {x0!r} 不在状态集合中")
    if n < 0:
        raise InvalidArgument("路径数必须非负")
    table = _JumpTable.of(kernel)

    def _one(i: int) -> Trajectory:  # 说明：单条轨道，无共享可变状态
        return _sample(table, x0, float(T), make_rng(seed, offset + i), strict)

    if workers <= 1:
        return [_one(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as executor:  # 说明：map 保持提交顺序
        return list(executor.map(_one, range(n)))


def occupation_times(traj: Trajectory) -> Dict[State, float]:  # 说明：各状态的逗留总时长
    pieces: Dict[State, List[float]] = {}
    for state, start, end in traj.visits():
        if end > start:
            pieces.setdefault(state, []).append(end - start)
    return {state: math.fsum(parts) for state, parts in pieces.items()}


def jump_counts(traj: Trajectory) -> Dict[Edge, int]:  # 说明：各有向边的跳跃次数
    counts: Dict[Edge, int] = {}
    current = traj.initial
    for _, target in traj.jumps:
        counts[(current, target)] = counts.get((current, target), 0) + 1
        current = target
    return counts


def _require_horizon(traj: Trajectory) -> float:
    if not traj.horizon > 0.0:
        raise InvalidArgument("经验统计量要求时间窗 T > 0")
    return traj.horizon


def empirical_measure(traj: Trajectory) -> ProbabilityMeasure:  # 说明：μ_T(y) = 逗留时间 / T
    T = _require_horizon(traj)
    return ProbabilityMeasure({state: time / T for state, time in occupation_times(traj).items()})


def empirical_flow(traj: Trajectory) -> Flow:  # 说明：Q_T(y,z) = 跳跃次数 / T
    T = _require_horizon(traj)
    return Flow({edge: count / T for edge, count in jump_counts(traj).items()})


def empirical_pair(traj: Trajectory) -> EmpiricalPair:
    return EmpiricalPair(empirical_measure(traj), empirical_flow(traj), traj.horizon)


def periodize_flow(traj: Trajectory) -> Flow:
    """周期化轨道的经验流：若 X_T ≠ X_0，在边 (X_T, X_0) 上补一次跳跃。"""
    T = _require_horizon(traj)
    counts = jump_counts(traj)
    closing = (traj.final_state, traj.initial)
    if closing[0] != closing[1]:
        counts[closing] = counts.get(closing, 0) + 1
    return Flow({edge: count / T for edge, count in counts.items()})


def continuity_residual(traj: Trajectory) -> SignedMeasure:
    """δ_y(X_T) − δ_y(X_0) + T·div Q_T(y)，用整数计数逐点精确为零。"""
    balance: Dict[State, int] = {}
    for (y, z), count in jump_counts(traj).items():
        balance[y] = balance.get(y, 0) + count
        balance[z] = balance.get(z, 0) - count
    balance[traj.final_state] = balance.get(traj.final_state, 0) + 1
    balance[traj.initial] = balance.get(traj.initial, 0) - 1
    return SignedMeasure({state: float(value) for state, value in balance.items()})


def martingale_residual(traj: Trajectory, edge: Edge, kernel: RateKernel) -> float:
    """M_T(y,z) = T·Q_T(y,z) − r(y,z)·(y 的逗留时间)。"""
    if not kernel.has_edge(edge):
        raise UnknownEdge(f"边 {edge!r} 不在正速率边集合 E 中")
    count = jump_counts(traj).get(edge, 0)
    return count - kernel.rate(*edge) * occupation_times(traj).get(edge[0], 0.0)


def default_observables(kernel: RateKernel) -> List[str]:  # 说明：默认观测 μ_T 的每个坐标与 Q_T 的每条边
    names = [f"mu[{x}]" for x in kernel.states.labels]
    names.extend(f"Q[{y},{z}]" for y, z in kernel.edges())
    return names


def batch_statistics(
    kernel: RateKernel,
    x0: State,
    T: float,
    seed: int,
    n: int,
    observables: Optional[Sequence[str]] = None,
    workers: int = 1,
) -> List[Dict[str, object]]:
    """批量模拟并汇总观测量，输出 (seed, T, observable, value) 行；按固定顺序归约。"""
    if n < 1:
        raise InvalidArgument("批量统计至少需要一条路径")
    names = list(observables) if observables else default_observables(kernel)
    forms: List[Tuple[str, LinearForm]] = [(name, parse_expression(name, kernel.states)) for name in names]
    paths = sample_paths(kernel, x0, T, seed, n, workers)
    pairs = [empirical_pair(p) for p in paths]
    rows: List[Dict[str, object]] = []
    for name, form in forms:
        values = np.array([form.evaluate(pair.measure, pair.flow) for pair in pairs])
        mean = math.fsum(values.tolist()) / n
        stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        rows.append({"seed": seed, "T": T, "observable": f"mean:{name}", "value": mean})
        rows.append({"seed": seed, "T": T, "observable": f"stderr:{name}", "value": stderr})
    rows.append({"seed": seed, "T": T, "observable": "absorbed_paths", "value": sum(1 for p in paths if p.absorbed)})
    return rows
