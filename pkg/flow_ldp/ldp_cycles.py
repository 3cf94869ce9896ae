# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件负责无散度流的环分解：逐步找出自回避环并减去环上最小权重，直到流被清空；
另外提供约化流、截断诊断（流向无穷的通量）、截断序列与连通化混合。
"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import math  # 说明：精确求和
from typing import Dict, Iterable, List, Optional, Set, Tuple  # 说明：类型标注所需

import networkx as nx  # 说明：最短路径与连通分量

from .ldp_config import DEFAULT_TOLERANCES, Tolerances  # 说明：容差
from .ldp_core import divergence, invariant_measure, kernel_graph  # 说明：核心运算
from .ldp_errors import DisconnectedAmbient, EmptyTruncation, InvalidArgument, ModelError, NonzeroDivergence, NumericalFailure, logger  # 说明：统一异常与日志
from .ldp_models import (  # 说明：数据结构
    Cycle,
    CycleDecomposition,
    Edge,
    Flow,
    Measure,
    ProbabilityMeasure,
    RateKernel,
    State,
    StateSpace,
    TruncatedDecomposition,
)


class _Ghost:  # 说明：截断外部所有状态合并成的幽灵顶点
    def __repr__(self) -> str:
        return "<ghost>"


GHOST = _Ghost()  # 说明：唯一的幽灵顶点实例


def _best_outgoing(current: State, residual: Dict[Edge, float], targets: Dict[State, List[State]], zero_tol: float) -> Optional[State]:
    best: Optional[State] = None
    best_weight = zero_tol
    for z in targets.get(current, ()):  # 说明：目标已按下标排序，严格大于才替换，平局时低下标胜出
        weight = residual.get((current, z), 0.0)
        if weight > best_weight:
            best, best_weight = z, weight
    return best


def decompose(Q: Flow, states: Optional[StateSpace] = None, tol: Tolerances = DEFAULT_TOLERANCES) -> CycleDecomposition:
    """把无散度的有限支撑流写成自回避环指示函数的正组合。"""
    space = states if states is not None else StateSpace.from_flow(Q)
    norm = Q.norm
    div_max = divergence(Q, space).max_abs()
    if div_max > tol.divergence_for(norm):
        raise NonzeroDivergence(f"环分解要求 div Q = 0，最大散度 {div_max:.3e}")
    if norm == 0.0:
        return CycleDecomposition((), 0)
    zero_tol = tol.cycle_zero * norm  # 说明：低于此值视为已清零
    noise_tol = tol.cycle_noise * norm  # 说明：死胡同处允许丢弃的舍入噪声
    residual: Dict[Edge, float] = dict(Q.weights)
    targets: Dict[State, List[State]] = {}
    for y, z in sorted(Q.weights, key=space.edge_key):
        targets.setdefault(y, []).append(z)
    terms: List[Tuple[Cycle, float]] = []
    steps = 0
    while True:
        live = [e for e, w in residual.items() if w > zero_tol]
        if not live:
            break
        start = min(live, key=lambda e: (-residual[e], space.edge_key(e)))  # 说明：最大残余权重，平局按字典序
        path: List[State] = [start[0], start[1]]
        position: Dict[State, int] = {start[0]: 0, start[1]: 1}
        cycle: Optional[List[State]] = None
        while cycle is None:
            current = path[-1]
            nxt = _best_outgoing(current, residual, targets, zero_tol)
            if nxt is None:  # 说明：只有舍入噪声会造成死胡同
                inflow = [(e, w) for e, w in residual.items() if e[1] == current and w > 0.0]
                stuck = math.fsum(w for _, w in inflow)
                if stuck > noise_tol:
                    raise NumericalFailure(f"环分解在顶点 {current!r} 处卡住，残余流入 {stuck:.3e}")
                for e, _ in inflow:
                    residual.pop(e, None)
                steps += 1
                break
            if nxt in position:
                cycle = path[position[nxt]:]
            else:
                position[nxt] = len(path)
                path.append(nxt)
        if cycle is None:
            continue
        found = Cycle(tuple(cycle))
        edges = found.edges()
        weight = min(residual[e] for e in edges)
        for e in edges:
            left = residual[e] - weight
            if left <= zero_tol:  # 说明：最小边精确清零
                residual.pop(e)
            else:
                residual[e] = left
        terms.append((found, weight))
        steps += 1
    logger.debug(f"环分解完成：{len(terms)} 个环，{steps} 步，支撑边数 {len(Q.weights)}")
    return CycleDecomposition(tuple(terms), steps)


def reconstruct(d: CycleDecomposition, states: Optional[StateSpace] = None) -> Flow:
    """Q(y,z) = Σ_{C∋(y,z)} Q̂(C)。"""
    pieces: Dict[Edge, List[float]] = {}
    for cycle, weight in d.terms:
        for edge in cycle.edges():
            if states is not None and (edge[0] not in states or edge[1] not in states):
                raise ModelError(f"环的边 {edge!r} 超出状态集合")
            pieces.setdefault(edge, []).append(weight)
    return Flow({edge: math.fsum(values) for edge, values in pieces.items()})


def cycle_mass(d: CycleDecomposition) -> float:  # 说明：Σ 权重·|C|，应等于 ‖Q‖
    return math.fsum(weight * len(cycle) for cycle, weight in d.terms)


def reduced_flow(Q: Flow) -> Flow:
    """约化流 q(y,z) = Q(y,z) − min(Q(y,z), Q(z,y))，去掉两点环的重叠部分。"""
    return Flow({(y, z): w - min(w, Q.get(z, y)) for (y, z), w in Q.weights.items()})


def flux_to_infinity(Q: Flow, keep: Iterable[State]) -> Tuple[float, float]:
    """(φ_n^+, φ_n^−)：从 V_n 流出与流入 V_n 的总通量。"""
    inside = set(keep)
    out_flux = math.fsum(w for (y, z), w in Q.weights.items() if y in inside and z not in inside)
    in_flux = math.fsum(w for (y, z), w in Q.weights.items() if y not in inside and z in inside)
    return out_flux, in_flux


def decompose_truncated(
    Q: Flow,
    keep: Iterable[State],
    states: Optional[StateSpace] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TruncatedDecomposition:
    """截断流的分解：越过边界的通量经幽灵顶点闭合，穿过幽灵的环作为逃逸链单独报告。"""
    space = states if states is not None else StateSpace.from_flow(Q)
    inside_space = space.restrict(keep)
    reduced = reduced_flow(Q)
    out_flux, in_flux = flux_to_infinity(reduced, inside_space.labels)
    inner = reduced.restricted_to(inside_space.labels)
    if out_flux == 0.0 and in_flux == 0.0:
        return TruncatedDecomposition(decompose(inner, inside_space, tol), (), 0.0, 0.0)
    weights: Dict[Edge, float] = dict(inner.weights)
    inside = set(inside_space.labels)
    for (y, z), w in reduced.weights.items():
        if y in inside and z not in inside:
            weights[(y, GHOST)] = weights.get((y, GHOST), 0.0) + w
        elif y not in inside and z in inside:
            weights[(GHOST, z)] = weights.get((GHOST, z), 0.0) + w
    ghost_space = StateSpace(inside_space.labels + (GHOST,))
    full = decompose(Flow(weights), ghost_space, tol)
    closed: List[Tuple[Cycle, float]] = []
    escaping: List[Tuple[Tuple[State, ...], float]] = []
    for cycle, weight in full.terms:
        if GHOST in cycle.vertices:
            k = cycle.vertices.index(GHOST)
            chain = cycle.vertices[k + 1 :] + cycle.vertices[:k]  # 说明：从入口到出口的顶点序列
            escaping.append((chain, weight))
        else:
            closed.append((cycle, weight))
    return TruncatedDecomposition(CycleDecomposition(tuple(closed), full.steps), tuple(escaping), out_flux, in_flux)


def truncate_pair(
    mu: Measure,
    Q: Flow,
    keep: Iterable[State],
    decomposition: Optional[CycleDecomposition] = None,
    states: Optional[StateSpace] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[ProbabilityMeasure, Flow]:
    """μ_n = μ|V_n / μ(V_n)，Q_n = 完全落在 E_n 内的环之和（不重新归一化）。"""
    inside = set(keep)
    mass = math.fsum(w for x, w in mu.weights.items() if x in inside)
    if not mass > 0.0:
        raise EmptyTruncation("截断集合 V_n 的 μ 质量为零")
    d = decomposition if decomposition is not None else decompose(Q, states, tol)
    kept = CycleDecomposition(tuple((c, w) for c, w in d.terms if c.inside(inside)), d.steps)
    measure = ProbabilityMeasure({x: w / mass for x, w in mu.weights.items() if x in inside})
    return measure, reconstruct(kept)


def _support_components(mu: Measure, Q: Flow, order: Dict[State, int]) -> List[List[State]]:
    graph = nx.Graph()
    graph.add_nodes_from(mu.weights)
    graph.add_nodes_from(Q.vertices())
    graph.add_edges_from(Q.weights)
    comps = [sorted(c, key=order.__getitem__) for c in nx.connected_components(graph)]
    return sorted(comps, key=lambda c: order[c[0]])


def make_connected(
    mu: ProbabilityMeasure,
    Q: Flow,
    kernel: RateKernel,
    eps: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[ProbabilityMeasure, Flow]:
    """与单位速率辅助链的平稳对 (π*,Q*) 做凸组合 eps·(π*,Q*) + (1−eps)·(μ,Q)，使支撑图连通。"""
    if not (0.0 < eps < 1.0):
        raise InvalidArgument("eps 必须落在 (0,1) 内")
    order = kernel.states.index
    for x in list(mu.weights) + Q.vertices():
        if x not in kernel.states:
            raise ModelError(f"状态 {x!r} 不在速率核的状态集合中")
    comps = _support_components(mu, Q, order)
    reps = [c[0] for c in comps]  # 说明：每个分量取下标最小的状态作代表
    graph = kernel_graph(kernel)
    aux_edges: Set[Edge] = set(Q.weights)
    aux_nodes: Set[State] = set(mu.weights) | set(Q.vertices())
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            if i == j:
                continue
            try:
                path = nx.shortest_path(graph, a, b)  # 说明：按跳数最短，邻接顺序确定
            except nx.NetworkXNoPath as exc:
                raise DisconnectedAmbient(f"(V,E) 中不存在从 {a!r} 到 {b!r} 的有向路径") from exc
            aux_nodes.update(path)
            aux_edges.update(zip(path[:-1], path[1:]))
    aux_space = kernel.states.restrict(aux_nodes)
    aux_kernel = RateKernel.build(aux_space, {e: 1.0 for e in aux_edges})
    pi_star = invariant_measure(aux_kernel, tol)
    q_star = Flow({(y, z): pi_star.get(y) for (y, z) in aux_edges})
    measure_weights = {x: eps * pi_star.get(x) + (1.0 - eps) * mu.get(x) for x in aux_space.labels}
    return ProbabilityMeasure(measure_weights), q_star.combine(Q, eps, 1.0 - eps)
