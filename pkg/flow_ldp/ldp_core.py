# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件负责链的核心运算：不可约性、不变测度、散度、平稳流、平均出口速率与生成元作用。
所有函数都是纯函数，输入对象构造后不可变，可以在线程间共享。
"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import math  # 说明：精确求和
import warnings  # 说明：把病态警告升级为异常
from typing import Callable, Dict, List, Mapping, Optional, Union  # 说明：类型标注所需

import networkx as nx  # 说明：图的强连通性判定
import numpy as np  # 说明：稠密矩阵运算
import scipy.linalg  # 说明：线性方程组求解

from .ldp_config import DEFAULT_TOLERANCES, Tolerances  # 说明：容差
from .ldp_errors import ModelError, NoUniqueInvariant, NumericalFailure, logger  # 说明：统一异常与日志
from .ldp_models import Flow, Measure, ProbabilityMeasure, RateKernel, SignedMeasure, State, StateSpace  # 说明：数据结构

StateFunction = Union[Mapping[State, float], Callable[[State], float]]  # 说明：状态上的函数，映射或可调用对象


def kernel_graph(kernel: RateKernel) -> "nx.DiGraph":  # 说明：(V,E) 的有向图表示
    graph = nx.DiGraph()  # 说明：创建有向图
    graph.add_nodes_from(kernel.states.labels)  # 说明：孤立状态也要登记
    graph.add_edges_from(kernel.edges())  # 说明：正速率边
    return graph


def check_irreducible(kernel: RateKernel) -> bool:  # 说明：(V,E) 是否强连通
    if kernel.states.size <= 1:  # 说明：单点链平凡不可约
        return True
    return bool(nx.is_strongly_connected(kernel_graph(kernel)))


def generator_matrix(kernel: RateKernel) -> np.ndarray:  # 说明：L[x,y]=r(x,y)，L[x,x]=−r(x)
    n = kernel.states.size
    L = np.zeros((n, n), dtype=float)
    for (y, z), rate in kernel.rates.items():
        L[kernel.states.index[y], kernel.states.index[z]] = rate
    for x, total in kernel.exit.items():
        L[kernel.states.index[x], kernel.states.index[x]] = -total
    return L


def _gth_stationary(kernel: RateKernel) -> np.ndarray:
    """Grassmann–Taksar–Heyman 消元：无减法，尾部极小概率也能保持正值。"""
    n = kernel.states.size
    P = generator_matrix(kernel)
    np.fill_diagonal(P, 0.0)
    for k in range(n - 1, 0, -1):
        s = P[k, :k].sum()
        if not s > 0.0:
            raise NumericalFailure(f"GTH 消元在第 {k} 步遇到零出口质量，链可能可约")
        P[:k, k] /= s
        P[:k, :k] += np.outer(P[:k, k], P[k, :k])
    x = np.zeros(n)
    x[0] = 1.0
    for k in range(1, n):
        x[k] = x[:k] @ P[:k, k]
    return x


def balance_residual(mu: Measure, kernel: RateKernel) -> float:  # 说明：max_x |Σ_y μ(x)r(x,y) − μ(y)r(y,x)|
    outflow: Dict[State, List[float]] = {x: [] for x in kernel.states.labels}
    inflow: Dict[State, List[float]] = {x: [] for x in kernel.states.labels}
    for (y, z), rate in kernel.rates.items():
        mass = mu.get(y) * rate
        outflow[y].append(mass)
        inflow[z].append(mass)
    return max((abs(math.fsum(outflow[x]) - math.fsum(inflow[x])) for x in kernel.states.labels), default=0.0)


def invariant_measure(kernel: RateKernel, tol: Tolerances = DEFAULT_TOLERANCES) -> ProbabilityMeasure:
    """解平衡方程 πL=0，用归一化行替换一个冗余方程；部分主元 LU 保证可复现。"""
    if not check_irreducible(kernel):  # 说明：可约链没有唯一不变测度
        raise NoUniqueInvariant("速率核不可约性不成立，不变测度不唯一")
    states = kernel.states
    n = states.size
    if n == 1:
        return ProbabilityMeasure.dirac(states.labels[0])
    L = generator_matrix(kernel)
    A = L.T.copy()  # 说明：π L = 0 等价于 L^T π^T = 0
    A[-1, :] = 1.0  # 说明：归一化行替换最后一个方程
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            x = scipy.linalg.solve(A, rhs)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning, ValueError) as exc:
        raise NumericalFailure(f"平衡方程求解失败: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise NumericalFailure("平衡方程的解含有非有限值")
    if np.any(x <= 0.0):  # 说明：尾部质量低于舍入误差时改用 GTH
        logger.debug("LU 解出现非正分量，改用 GTH 消元")
        x = _gth_stationary(kernel)
    x = x / math.fsum(x.tolist())
    if np.any(x <= 0.0):
        raise NumericalFailure("不变测度出现非正分量")
    pi = ProbabilityMeasure({states.labels[i]: float(x[i]) for i in range(n)})
    scale = max(1.0, max(pi.get(s) * kernel.exit_rate(s) for s in states.labels))
    residual = balance_residual(pi, kernel)
    if residual > tol.linear * scale:  # 说明：回代检查平衡方程
        raise NumericalFailure(f"不变测度残差 {residual:.3e} 超过容差")
    return pi


def divergence(flow: Flow, states: Optional[StateSpace] = None) -> SignedMeasure:  # 说明：div Q(y)=Σ_z Q(y,z)−Σ_z Q(z,y)
    space = states if states is not None else StateSpace.from_flow(flow)
    outflow: Dict[State, List[float]] = {}
    inflow: Dict[State, List[float]] = {}
    for (y, z), weight in flow.weights.items():
        if y not in space or z not in space:
            raise ModelError(f"流的边 ({y!r},{z!r}) 超出状态集合")
        outflow.setdefault(y, []).append(weight)
        inflow.setdefault(z, []).append(weight)
    values: Dict[State, float] = {}
    for state in space.labels:
        if state in outflow or state in inflow:
            values[state] = math.fsum(outflow.get(state, [])) - math.fsum(inflow.get(state, []))
    return SignedMeasure(values)


def stationary_flow(mu: Measure, kernel: RateKernel) -> Flow:  # 说明：Q^μ(y,z)=μ(y)r(y,z)
    weights: Dict = {}
    for (y, z), rate in kernel.rates.items():
        mass = mu.get(y)
        if mass > 0.0:
            weights[(y, z)] = mass * rate
    return Flow(weights)


def mean_exit_rate(mu: Measure, kernel: RateKernel) -> float:  # 说明：⟨μ,r⟩
    for state in mu.weights:
        if state not in kernel.states:
            raise ModelError(f"测度的支撑点 {state!r} 不在状态集合中")
    return math.fsum(weight * kernel.exit_rate(state) for state, weight in mu.weights.items())


def _evaluator(f: StateFunction) -> Callable[[State], float]:
    if callable(f):
        return lambda s: float(f(s))  # type: ignore[operator]
    mapping = f
    return lambda s: float(mapping[s])


def lift_operator(kernel: RateKernel, f: StateFunction) -> Dict[State, float]:  # 说明：Lf(x)=Σ_y r(x,y)[f(y)−f(x)]
    value = _evaluator(f)
    try:
        cached = {s: value(s) for s in kernel.states.labels}  # 说明：f 必须在所有状态上有定义
    except KeyError as exc:
        raise ModelError(f"函数在状态 {exc.args[0]!r} 处无定义") from exc
    return {
        x: math.fsum(rate * (cached[y] - cached[x]) for y, rate in kernel.out_edges[x])
        for x in kernel.states.labels
    }
