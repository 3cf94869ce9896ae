# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件负责指数倾斜：由目标对 (μ,Q) 构造倾斜链 r̃ = Q/μ，计算 Radon–Nikodym 对数权重、
两类指数鞅，并用重要性采样估计稀有事件概率。

所有似然都在对数空间按跳跃顺序累加，最后才取指数。
"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import math  # 说明：对数与精确求和
from typing import Dict, Iterable, List, Optional, Sequence, Tuple  # 说明：类型标注所需

import networkx as nx  # 说明：逃逸路径
import numpy as np  # 说明：回归与统计
import scipy.stats  # 说明：Clopper–Pearson 区间

from .ldp_config import DEFAULT_TOLERANCES, Tolerances  # 说明：容差
from .ldp_core import StateFunction, balance_residual, kernel_graph, lift_operator  # 说明：核心运算
from .ldp_errors import DegenerateTilt, DisconnectedAmbient, InvalidArgument, ModelError, NumericalFailure, UnknownEdge, logger  # 说明：统一异常与日志
from .ldp_events import EventSpec  # 说明：事件判定
from .ldp_models import (  # 说明：数据结构
    BoundCheck,
    Edge,
    Flow,
    ImportanceEstimate,
    ProbabilityMeasure,
    RateKernel,
    State,
    TestPair,
    TiltedModel,
    Trajectory,
    WillyReport,
)
from .ldp_rate import require_tiltable, minimize_rate_over_event  # 说明：倾斜前置检查与自动倾斜
from .ldp_simulate import empirical_pair, sample_paths  # 说明：轨道采样

SNAP_ULPS = 4  # 说明：比值与原速率相差不超过这么多 ulp 时直接取原速率


def _snap(ratio: float, base: float) -> float:
    if abs(ratio - base) <= SNAP_ULPS * math.ulp(base):
        return base
    return ratio


def _escape_path(kernel: RateKernel, start: State, support: Iterable[State]) -> Tuple[State, ...]:
    """从 start 到 supp(μ) 中最近状态的有向最短路径，平局取下标最小的终点。"""
    targets = set(support)
    lengths = nx.single_source_shortest_path_length(kernel_graph(kernel), start)
    reachable = [x for x in targets if x in lengths]
    if not reachable:
        raise DisconnectedAmbient(f"(V,E) 中不存在从 {start!r} 到 supp(μ) 的有向路径")
    end = min(reachable, key=lambda x: (lengths[x], kernel.states.index[x]))
    return tuple(nx.shortest_path(kernel_graph(kernel), start, end))


def tilted_kernel(
    mu: ProbabilityMeasure,
    Q: Flow,
    kernel: RateKernel,
    escape_from: Optional[State] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TiltedModel:
    """r̃(y,z) = Q(y,z)/μ(y)；给定 escape_from 时沿一条固定路径保留原速率，直到进入 supp(μ)。"""
    require_tiltable(mu, Q, kernel, tol)
    rates: Dict[Edge, float] = {}
    for (y, z), w in Q.weights.items():
        rates[(y, z)] = _snap(w / mu.get(y), kernel.rate(y, z))
    path: Tuple[State, ...] = ()
    if escape_from is not None and mu.get(escape_from) == 0.0:
        if escape_from not in kernel.states:
            raise ModelError(f"起点 {escape_from!r} 不在状态集合中")
        path = _escape_path(kernel, escape_from, mu.weights)
        for edge in zip(path[:-1], path[1:]):
            rates[edge] = kernel.rate(*edge)
    tilted = RateKernel.build(kernel.states, rates)
    residual = balance_residual(mu, tilted)
    logger.debug(f"倾斜链下 μ 的平衡残差 {residual:.3e}")
    if residual > tol.linear * max(1.0, Q.norm):  # 说明：μ 必须是倾斜链的不变测度
        raise NumericalFailure(f"μ 在倾斜链下的平衡残差 {residual:.3e} 超过容差")
    log_ratio = {e: math.log(r / kernel.rate(*e)) for e, r in tilted.rates.items()}
    exit_gap = {x: tilted.exit_rate(x) - kernel.exit_rate(x) for x in kernel.states.labels}
    return TiltedModel(kernel, tilted, log_ratio, exit_gap, path)


def log_rn_weight(traj: Trajectory, tm: TiltedModel) -> float:
    """log dP̂/dP = −∫(r̂−r)(X_t)dt + Σ_jumps ln(r̂/r)；出现倾斜链不允许的跳跃时为 −∞。"""
    drift: List[float] = []
    for state, start, end in traj.visits():
        if state not in tm.exit_gap:
            raise ModelError(f"轨道经过未知状态 {state!r}")
        drift.append((end - start) * tm.exit_gap[state])
    jumps: List[float] = []
    current = traj.initial
    for _, target in traj.jumps:
        ratio = tm.log_rate_ratio.get((current, target))
        if ratio is None:
            return -math.inf
        jumps.append(ratio)
        current = target
    return math.fsum(jumps) - math.fsum(drift)


def _safe_exp(value: float) -> float:
    try:
        return math.exp(value)
    except OverflowError:
        return math.inf


def log_exp_martingale_F(traj: Trajectory, tp: TestPair, kernel: RateKernel) -> float:  # 说明：T[⟨Q_T,F⟩ − ⟨μ_T, r^F − r⟩]
    for edge in tp.F:
        if not kernel.has_edge(edge):
            raise UnknownEdge(f"F 的支撑边 {edge!r} 不在 E 中")
    gap = {x: math.fsum(r * math.expm1(tp.F.get((x, z), 0.0)) for z, r in kernel.out_edges[x]) for x in kernel.states.labels}
    jumps: List[float] = []
    current = traj.initial
    for _, target in traj.jumps:
        jumps.append(tp.F.get((current, target), 0.0))
        current = target
    drift = math.fsum((end - start) * gap[state] for state, start, end in traj.visits())
    return math.fsum(jumps) - drift


def exp_martingale_F(traj: Trajectory, tp: TestPair, kernel: RateKernel) -> float:
    return _safe_exp(log_exp_martingale_F(traj, tp, kernel))


def log_exp_martingale_u(traj: Trajectory, u: StateFunction, kernel: RateKernel) -> float:
    """ln u(X_T) − ln u(X_0) + ∫ v(X_t)dt，其中 v = −Lu/u。"""
    Lu = lift_operator(kernel, u)
    values = {x: float(u(x)) if callable(u) else float(u[x]) for x in kernel.states.labels}
    for x, value in values.items():
        if not value > 0.0:
            raise InvalidArgument(f"u 必须处处为正，u({x!r}) = {value!r}")
    v = {x: -Lu[x] / values[x] for x in kernel.states.labels}
    drift = math.fsum((end - start) * v[state] for state, start, end in traj.visits())
    return math.log(values[traj.final_state]) - math.log(values[traj.initial]) + drift


def exp_martingale_u(traj: Trajectory, u: StateFunction, kernel: RateKernel) -> float:
    return _safe_exp(log_exp_martingale_u(traj, u, kernel))


def _mean_stderr(values: Sequence[float]) -> Tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    return mean, float(np.std(np.asarray(values), ddof=1) / math.sqrt(n))


def martingale_mean(
    kernel: RateKernel,
    x0: State,
    T: float,
    n: int,
    seed: int,
    tp: Optional[TestPair] = None,
    u: Optional[StateFunction] = None,
    workers: int = 1,
) -> Tuple[float, float]:
    """原链下 M^F_T 或 M^u_T 的样本均值与标准误（二者恰好给一个）。"""
    if (tp is None) == (u is None):
        raise InvalidArgument("tp 与 u 必须恰好提供一个")
    if n < 1:
        raise InvalidArgument("路径数至少为 1")
    paths = sample_paths(kernel, x0, T, seed, n, workers)
    if tp is not None:
        values = [exp_martingale_F(p, tp, kernel) for p in paths]
    else:
        assert u is not None
        values = [exp_martingale_u(p, u, kernel) for p in paths]
    return _mean_stderr(values)


def tilted_entropy_estimate(
    kernel: RateKernel,
    mu: ProbabilityMeasure,
    Q: Flow,
    x0: State,
    T: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> Tuple[float, float]:
    """倾斜链下 (1/T)·log dP̂/dP 的样本均值与标准误，T 大时应接近 I(μ,Q)。"""
    tm = tilted_kernel(mu, Q, kernel, escape_from=x0)
    paths = sample_paths(tm.tilted, x0, T, seed, n, workers)
    return _mean_stderr([log_rn_weight(p, tm) / T for p in paths])


def auto_tilt(kernel: RateKernel, event: EventSpec, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[ProbabilityMeasure, Flow]:
    """事件上速率函数的约束最小点，作为倾斜目标。

    最小点不在事件内部的 μ 不变对附近时，由估计值反推的速率偏高。
    """
    measure, flow, value = minimize_rate_over_event(kernel, event, tol)
    logger.info(f"自动倾斜：事件 {event.text!r} 上的最小速率 {value:.6g}")
    return measure, flow


def importance_estimate(
    kernel: RateKernel,
    event: EventSpec,
    mu_star: ProbabilityMeasure,
    Q_star: Flow,
    T: float,
    N: int,
    seed: int,
    x0: State,
    workers: int = 1,
    pilot_fraction: float = 0.1,
    offset: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ImportanceEstimate:
    """在倾斜链下采样，用 exp(−log dP̂/dP)·1_event 估计 P_x((μ_T,Q_T) ∈ event)。"""
    if N < 1:
        raise InvalidArgument("路径数至少为 1")
    if not T > 0.0:
        raise InvalidArgument("时间窗 T 必须为正")
    if event.is_whole_space:
        return ImportanceEstimate(float(T), 1.0, 0.0, N, N)
    tm = tilted_kernel(mu_star, Q_star, kernel, escape_from=x0, tol=tol)

    def weigh(paths: List[Trajectory]) -> List[float]:  # 说明：未命中事件的路径贡献 0
        out: List[float] = []
        for path in paths:
            if event(empirical_pair(path)):
                out.append(_safe_exp(-log_rn_weight(path, tm)))
            else:
                out.append(0.0)
        return out

    n_pilot = min(N, max(1, math.ceil(N * pilot_fraction)))
    pilot = weigh(sample_paths(tm.tilted, x0, T, seed, n_pilot, workers, offset=offset))
    pilot_hits = sum(1 for w in pilot if w > 0.0)
    logger.debug(f"T={T}：试探批 {n_pilot} 条路径命中 {pilot_hits} 次")
    if pilot_hits == 0:
        raise DegenerateTilt(f"倾斜链在试探批 {n_pilot} 条路径中从未到达事件 {event.text!r}")
    rest = weigh(sample_paths(tm.tilted, x0, T, seed, N - n_pilot, workers, offset=offset + n_pilot))
    values = pilot + rest
    mean, stderr = _mean_stderr(values)
    hits = sum(1 for w in values if w > 0.0)
    return ImportanceEstimate(float(T), mean, stderr, hits, N)


def estimate_over_horizons(
    kernel: RateKernel,
    event: EventSpec,
    mu_star: ProbabilityMeasure,
    Q_star: Flow,
    horizons: Sequence[float],
    N: int,
    seed: int,
    x0: State,
    workers: int = 1,
    pilot_fraction: float = 0.1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> List[ImportanceEstimate]:  # 说明：每个时间窗使用互不重叠的随机流
    return [
        importance_estimate(kernel, event, mu_star, Q_star, T, N, seed, x0, workers, pilot_fraction, k * N, tol)
        for k, T in enumerate(horizons)
    ]


def decay_slope(horizons: Sequence[float], estimates: Sequence[float]) -> float:
    """−log P̂ 对 T 的最小二乘斜率。"""
    if len(horizons) != len(estimates) or len(horizons) < 2:
        raise InvalidArgument("至少需要两个 (T, P̂) 数据点")
    if any(not p > 0.0 for p in estimates):
        raise InvalidArgument("概率估计必须为正才能取对数")
    slope, _ = np.polyfit(np.asarray(horizons, dtype=float), -np.log(np.asarray(estimates, dtype=float)), 1)
    return float(slope)


def clopper_pearson(hits: int, n: int, confidence: float = 0.99) -> Tuple[float, float]:  # 说明：二项比例的精确置信区间
    alpha = 1.0 - confidence
    low = 0.0 if hits == 0 else float(scipy.stats.beta.ppf(alpha / 2.0, hits, n - hits + 1))
    high = 1.0 if hits == n else float(scipy.stats.beta.ppf(1.0 - alpha / 2.0, hits + 1, n - hits))
    return low, high


def willy_bounds_check(
    kernel: RateKernel,
    edge: Edge,
    lam: float,
    delta: float,
    T: float,
    N: int,
    seed: int,
    x0: Optional[State] = None,
    workers: int = 1,
    confidence: float = 0.99,
) -> WillyReport:
    """检验单侧界 P(Q_T ≷ μ_T(y)r·c_± ± δ) ≤ e^{−Tδλ}；区间下端不超过界即视为成立。"""
    if not kernel.has_edge(edge):
        raise UnknownEdge(f"边 {edge!r} 不在正速率边集合 E 中")
    if not (lam > 0.0 and delta > 0.0):
        raise InvalidArgument("λ 与 δ 必须为正")
    if not T > 0.0 or N < 1:
        raise InvalidArgument("需要 T > 0 且 N ≥ 1")
    start = edge[0] if x0 is None else x0
    r = kernel.rate(*edge)
    up_coeff = math.expm1(lam) / lam
    down_coeff = -math.expm1(-lam) / lam
    up_hits = down_hits = 0
    for path in sample_paths(kernel, start, T, seed, N, workers):
        pair = empirical_pair(path)
        q = pair.flow.get(*edge)
        m = pair.measure.get(edge[0])
        if q > m * r * up_coeff + delta:
            up_hits += 1
        if q < m * r * down_coeff - delta:
            down_hits += 1
    bound = math.exp(-T * delta * lam)

    def check(name: str, hits: int) -> BoundCheck:
        low, high = clopper_pearson(hits, N, confidence)
        return BoundCheck(name, hits / N, bound, low, high, low <= bound)

    return WillyReport(edge, lam, delta, float(T), N, check("upper", up_hits), check("lower", down_hits))

