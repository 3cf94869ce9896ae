# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件负责速率函数 I(μ,Q) 的计算：泊松代价 Φ、变分形式 I_{φ,F}、闭式最优 F*、
仿射分解、倾斜链熵恒等式，以及基于最大特征值的 Gärtner–Ellis 对偶校验。

约定：0·ln0 = 0，Φ(0,0) = 0；+∞ 一律用 ExtendedReal 表示。
"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import math  # 说明：对数与精确求和
from dataclasses import dataclass  # 说明：对偶优化结果
from typing import Dict, List, Optional, Tuple  # 说明：类型标注所需

import networkx as nx  # 说明：支撑图连通分量
import numpy as np  # 说明：矩阵与网格
import scipy.linalg  # 说明：特征值
import scipy.optimize  # 说明：一维与约束优化

from .ldp_config import DEFAULT_TOLERANCES, Tolerances  # 说明：容差
from .ldp_core import divergence, mean_exit_rate  # 说明：核心运算
from .ldp_errors import InfiniteRate, InvalidArgument, ModelError, NonzeroDivergence, NumericalFailure, UnsupportedFlow, logger  # 说明：统一异常与日志
from .ldp_events import EventSpec  # 说明：事件约束
from .ldp_models import (  # 说明：数据结构
    AffineComponent,
    Edge,
    ExtendedReal,
    Flow,
    Measure,
    ProbabilityMeasure,
    RateKernel,
    RateReason,
    RateReport,
    State,
    SupCheck,
    TestPair,
)

LOWER_BOUND_CONSTANT = (1.0 - math.log(2.0)) / 2.0  # 说明：Φ(q,p) ≥ p(1−ln2)/2 当 q < p/2


def phi_term(q: float, p: float) -> ExtendedReal:
    """Φ(q,p) = q ln(q/p) − (q−p)；q=0 时为 p，p=0 且 q>0 时为 +∞。"""
    if q < 0.0 or p < 0.0 or math.isnan(q) or math.isnan(p):
        raise InvalidArgument(f"Φ 的参数必须非负: q={q!r}, p={p!r}")
    if q == 0.0:
        return ExtendedReal(float(p))
    if p == 0.0:
        return ExtendedReal.inf()
    return ExtendedReal(max(0.0, q * math.log(q / p) - (q - p)))  # 说明：舍入可能给出 −1e−17 量级的负值


def poisson_legendre(q: float, p: float) -> ExtendedReal:
    """数值计算 sup_λ [λq − p(e^λ−1)]，用于核对 Φ 的 Legendre 对偶。"""
    if q < 0.0 or p < 0.0:
        raise InvalidArgument("q, p 必须非负")
    if p == 0.0:
        return ExtendedReal(0.0) if q == 0.0 else ExtendedReal.inf()
    if q == 0.0:  # 说明：λ → −∞ 的极限
        return ExtendedReal(float(p))
    upper = math.log((q + p) / p) + 1.0  # 说明：导数 q − p e^λ 在此处已为负
    result = scipy.optimize.minimize_scalar(
        lambda lam: -(lam * q - p * math.expm1(lam)),
        bounds=(-60.0, upper),
        method="bounded",
        options={"xatol": 1e-12, "maxiter": 500},
    )
    if not result.success:
        raise NumericalFailure(f"Legendre 一维最大化失败: {result.message}")
    return ExtendedReal(float(-result.fun))


def edge_cost_sum(mu: Measure, Q: Flow, kernel: RateKernel) -> Tuple[ExtendedReal, Dict[Edge, float], List[Edge]]:
    """Σ_{(y,z)∈E} Φ(Q(y,z), μ(y)r(y,z))，不检查散度；返回 (总和, 有限项, 无穷项所在边)。"""
    terms: Dict[Edge, float] = {}
    offending: List[Edge] = [edge for edge in Q.weights if not kernel.has_edge(edge)]
    for edge in kernel.edges():  # 说明：固定的边顺序，保证归约确定
        q = Q.get(*edge)
        p = mu.get(edge[0]) * kernel.rate(*edge)
        if q == 0.0 and p == 0.0:
            continue
        term = phi_term(q, p)
        if term.infinite:
            offending.append(edge)
        else:
            terms[edge] = term.value
    if offending:
        return ExtendedReal.inf(), terms, offending
    return ExtendedReal(math.fsum(terms.values())), terms, offending


def _check_states(mu: Measure, Q: Flow, kernel: RateKernel) -> None:
    for state in mu.weights:
        if state not in kernel.states:
            raise ModelError(f"测度支撑点 {state!r} 不在状态集合中")
    for y, z in Q.weights:
        if y not in kernel.states or z not in kernel.states:
            raise ModelError(f"流的边 ({y!r},{z!r}) 超出状态集合")


def rate(mu: Measure, Q: Flow, kernel: RateKernel, tol: Tolerances = DEFAULT_TOLERANCES) -> RateReport:
    """I(μ,Q)：散度非零或 ⟨μ,r⟩ 发散时为 +∞，否则为各边 Φ 之和。"""
    _check_states(mu, Q, kernel)
    div_max = divergence(Q, kernel.states).max_abs()
    if div_max > tol.divergence_for(Q.norm):
        return RateReport(ExtendedReal.inf(), RateReason.NONZERO_DIVERGENCE, {}, div_max)
    exit_mean = mean_exit_rate(mu, kernel)
    if not math.isfinite(exit_mean) or not math.isfinite(Q.norm):
        return RateReport(ExtendedReal.inf(), RateReason.SERIES_DIVERGENCE, {}, div_max)
    total, terms, offending = edge_cost_sum(mu, Q, kernel)
    if offending:
        return RateReport(total, RateReason.UNSUPPORTED_EDGE, terms, div_max, tuple(offending))
    return RateReport(total, RateReason.OK, terms, div_max)


def exit_rate_lower_bound(mu: Measure, Q: Flow, kernel: RateKernel) -> float:
    """边代价之和的下界 (1−ln2)/2·(⟨μ,r⟩ − 2‖Q‖)。"""
    return LOWER_BOUND_CONSTANT * (mean_exit_rate(mu, kernel) - 2.0 * Q.norm)


def rate_variational(mu: Measure, Q: Flow, kernel: RateKernel, tp: TestPair) -> float:
    """I_{φ,F}(μ,Q) = ⟨φ, div Q⟩ + ⟨Q,F⟩ − ⟨μ, r^F − r⟩。"""
    _check_states(mu, Q, kernel)
    for state in tp.phi:
        if state not in kernel.states:
            raise ModelError(f"φ 的支撑点 {state!r} 不在状态集合中")
    for edge in tp.F:
        if not kernel.has_edge(edge):
            raise ModelError(f"F 的支撑边 {edge!r} 不在 E 中")
    div_part = divergence(Q, kernel.states).pair(tp.phi)
    flow_part = Q.pair(tp.F)
    exit_part = math.fsum(  # 说明：r^F(y) − r(y) = Σ_z r(y,z)(e^F − 1)，expm1 保精度
        mu.get(y) * kernel.rate(y, z) * math.expm1(F)
        for (y, z), F in tp.F.items()
        if mu.get(y) > 0.0
    )
    return math.fsum([div_part, flow_part, -exit_part])


def require_tiltable(mu: Measure, Q: Flow, kernel: RateKernel, tol: Tolerances) -> None:
    _check_states(mu, Q, kernel)
    div_max = divergence(Q, kernel.states).max_abs()
    if div_max > tol.divergence_for(Q.norm):
        raise NonzeroDivergence(f"流的散度最大绝对值 {div_max:.3e} 超过容差")
    for (y, z) in Q.weights:
        if not kernel.has_edge((y, z)):
            raise UnsupportedFlow(f"流在非正速率边 ({y!r},{z!r}) 上非零")
        if mu.get(y) == 0.0:
            raise UnsupportedFlow(f"流在 μ=0 的状态 {y!r} 处流出")


def closed_form_maximizer(mu: Measure, Q: Flow, kernel: RateKernel, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[Dict[Edge, float], bool]:
    """F* = ln(Q/Q^μ)，截断到 [−F_max, F_max]；Q=0 的边取 −F_max。返回 (F*, 是否截断)。"""
    F: Dict[Edge, float] = {}
    clamped = False
    for edge in kernel.edges():
        p = mu.get(edge[0]) * kernel.rate(*edge)
        if p == 0.0:
            continue
        q = Q.get(*edge)
        if q == 0.0:
            F[edge] = -tol.f_max
            clamped = True
            continue
        value = math.log(q / p)
        if abs(value) > tol.f_max:
            clamped = True
            value = math.copysign(tol.f_max, value)
        F[edge] = value
    return F, clamped


def rate_sup_check(mu: Measure, Q: Flow, kernel: RateKernel, tol: Tolerances = DEFAULT_TOLERANCES) -> SupCheck:
    """在闭式最优点 (φ≡0, F*) 处计算 I_{φ,F}，并给出与 rate() 的间隙。"""
    require_tiltable(mu, Q, kernel, tol)
    F_star, clamped = closed_form_maximizer(mu, Q, kernel, tol)
    if clamped:
        logger.debug("F* 触发了截断，变分值只是上确界的下界")
    value = rate_variational(mu, Q, kernel, TestPair({}, F_star))
    report = rate(mu, Q, kernel, tol)
    if report.value.infinite:
        return SupCheck(value, ExtendedReal.inf(), clamped, F_star)
    gap = report.value.value - value
    if gap < 0.0:
        if gap < -tol.sup_gap * max(1.0, abs(value)):  # 说明：变分值不可能超过速率函数
            raise NumericalFailure(f"变分值超过速率函数 {-gap:.3e}")
        gap = 0.0
    return SupCheck(value, ExtendedReal(gap), clamped, F_star)


def affine_decompose(mu: ProbabilityMeasure, Q: Flow, kernel: RateKernel, tol: Tolerances = DEFAULT_TOLERANCES) -> List[AffineComponent]:
    """按无向支撑图的连通分量拆分 (μ,Q)：μ_j = μ|K_j/μ(K_j)，Q_j = Q|K_j/μ(K_j)。"""
    report = rate(mu, Q, kernel, tol)
    if report.value.infinite:
        raise InfiniteRate(f"仿射分解要求 I(μ,Q) 有限，原因: {report.reason.value}")
    order = kernel.states.index
    graph = nx.Graph()
    graph.add_nodes_from(sorted(mu.weights, key=order.__getitem__))
    graph.add_edges_from(Q.weights)  # 说明：有限速率保证端点都在 supp(μ) 中
    components = sorted((sorted(c, key=order.__getitem__) for c in nx.connected_components(graph)), key=lambda c: order[c[0]])
    result: List[AffineComponent] = []
    for comp in components:
        members = set(comp)
        weight = math.fsum(mu.get(x) for x in comp)
        measure = ProbabilityMeasure({x: mu.get(x) / weight for x in comp})
        flow = Flow({e: w / weight for e, w in Q.weights.items() if e[0] in members})
        result.append(AffineComponent(weight, measure, flow, tuple(comp)))
    return result


def entropy_rate_tilted(mu: Measure, Q: Flow, kernel: RateKernel, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """倾斜链 r̃ = Q/μ 的相对熵率 ⟨Q, ln(r̃/r)⟩ − ⟨μ, r̃ − r⟩，按恒等式应等于 I(μ,Q)。"""
    require_tiltable(mu, Q, kernel, tol)
    log_part = math.fsum(w * math.log((w / mu.get(y)) / kernel.rate(y, z)) for (y, z), w in Q.weights.items())
    tilted_exit = math.fsum(Q.weights.values())  # 说明：Σ_y μ(y) r̃(y) = ‖Q‖
    base_exit = mean_exit_rate(mu, kernel)
    return log_part - (tilted_exit - base_exit)


def _tilted_generator(kernel: RateKernel, F: Dict[Edge, float], h: Dict[State, float]) -> np.ndarray:
    states = kernel.states
    n = states.size
    M = np.zeros((n, n))
    for (y, z), r in kernel.rates.items():
        M[states.index[y], states.index[z]] = r * math.exp(F.get((y, z), 0.0))
    for x in states.labels:
        i = states.index[x]
        M[i, i] = h.get(x, 0.0) - kernel.exit_rate(x)
    return M


def _perron(M: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:  # 说明：最大实部特征值及左右特征向量
    try:
        values, left, right = scipy.linalg.eig(M, left=True, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"特征值求解失败: {exc}") from exc
    k = int(np.argmax(values.real))
    lam = values[k]
    scale = max(1.0, float(np.max(np.abs(M))))
    if not np.isfinite(lam) or abs(lam.imag) > 1e-8 * scale:
        raise NumericalFailure(f"主特征值不是有限实数: {lam!r}")
    l_vec = np.real(left[:, k])
    r_vec = np.real(right[:, k])
    l_vec = l_vec if l_vec.sum() >= 0 else -l_vec
    r_vec = r_vec if r_vec.sum() >= 0 else -r_vec
    return float(lam.real), l_vec, r_vec


def scgf_max_eigenvalue(kernel: RateKernel, tp: TestPair) -> float:
    """λ(F,h)：非对角 r(y,z)e^{F(y,z)}、对角 h(y) − r(y) 的矩阵的最大实特征值（h 取 tp.phi）。"""
    return _perron(_tilted_generator(kernel, tp.F, tp.phi))[0]


def dual_objective(mu: Measure, Q: Flow, kernel: RateKernel, F: Dict[Edge, float], h: Dict[State, float]) -> float:
    """⟨Q,F⟩ + ⟨μ,h⟩ − λ(F,h)，对任意 (F,h) 都不超过 I(μ,Q)。"""
    return Q.pair(F) + mu.pair(h) - scgf_max_eigenvalue(kernel, TestPair(dict(h), dict(F)))


@dataclass(frozen=True)
class DualResult:  # 说明：对偶最大化的结果
    value: float
    F: Dict[Edge, float]
    h: Dict[State, float]
    iterations: int
    converged: bool


def maximize_dual(
    mu: Measure,
    Q: Flow,
    kernel: RateKernel,
    start: Optional[TestPair] = None,
    gtol: float = 1e-11,
    max_iter: int = 20000,
) -> DualResult:
    """用 Perron 左右特征向量给出的解析梯度，对 (F,h) 做拟牛顿上升。"""
    edges = kernel.edges()
    states = kernel.states
    n, m = states.size, len(edges)
    q_vec = np.array([Q.get(*e) for e in edges])
    mu_vec = np.array([mu.get(x) for x in states.labels])
    rows = np.array([states.index[e[0]] for e in edges], dtype=int)
    cols = np.array([states.index[e[1]] for e in edges], dtype=int)
    rates = np.array([kernel.rate(*e) for e in edges])
    exits = np.array([kernel.exit_rate(x) for x in states.labels])

    def negative(x: np.ndarray) -> Tuple[float, np.ndarray]:
        F, h = x[:m], x[m:]
        M = np.zeros((n, n))
        M[rows, cols] = rates * np.exp(F)
        M[np.arange(n), np.arange(n)] = h - exits
        lam, l_vec, r_vec = _perron(M)
        norm = float(l_vec @ r_vec)
        grad_F = l_vec[rows] * r_vec[cols] * M[rows, cols] / norm  # 说明：∂λ/∂F_e
        grad_h = l_vec * r_vec / norm  # 说明：∂λ/∂h_y
        value = float(q_vec @ F + mu_vec @ h - lam)
        return -value, -np.concatenate([q_vec - grad_F, mu_vec - grad_h])

    x0 = np.zeros(m + n)
    if start is not None:
        x0[:m] = [start.F.get(e, 0.0) for e in edges]
        x0[m:] = [start.phi.get(x, 0.0) for x in states.labels]
    result = scipy.optimize.minimize(negative, x0, jac=True, method="BFGS", options={"gtol": gtol, "maxiter": max_iter})
    F_opt = {e: float(result.x[i]) for i, e in enumerate(edges)}
    h_opt = {x: float(result.x[m + i]) for i, x in enumerate(states.labels)}
    return DualResult(float(-result.fun), F_opt, h_opt, int(result.nit), bool(result.success))


def phi_lower_bound_check(q: float, p: float) -> bool:
    """当 0 ≤ q < p/2 时检查 Φ(q,p) ≥ p(1−ln2)/2。"""
    if not (p > 0.0 and 0.0 <= q < p / 2.0):
        raise InvalidArgument(f"前置条件 0 ≤ q < p/2, p > 0 不成立: q={q!r}, p={p!r}")
    return phi_term(q, p).value >= p * LOWER_BOUND_CONSTANT


def _smooth_cost(q: np.ndarray, p: np.ndarray) -> float:
    return float(np.sum(q * np.log(q / p) - q + p))


def minimize_rate_over_event(
    kernel: RateKernel,
    event: EventSpec,
    tol: Tolerances = DEFAULT_TOLERANCES,
    floor: float = 1e-12,
) -> Tuple[ProbabilityMeasure, Flow, float]:
    """在 div Q = 0、Σμ = 1 与事件约束下最小化 I(μ,Q)（SLSQP），返回最优对与最小值。"""
    states = kernel.states
    edges = kernel.edges()
    n, m = states.size, len(edges)
    rows = np.array([states.index[e[0]] for e in edges], dtype=int)
    cols = np.array([states.index[e[1]] for e in edges], dtype=int)
    rates = np.array([kernel.rate(*e) for e in edges])
    edge_pos = {e: i for i, e in enumerate(edges)}

    def unpack(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return x[:n], x[n:]

    def objective(x: np.ndarray) -> Tuple[float, np.ndarray]:
        mu, q = unpack(x)
        p = mu[rows] * rates
        grad_mu = np.zeros(n)
        np.add.at(grad_mu, rows, rates * (1.0 - q / p))
        return _smooth_cost(q, p), np.concatenate([grad_mu, np.log(q / p)])

    incidence = np.zeros((n, m))  # 说明：div Q = B q
    incidence[rows, np.arange(m)] += 1.0
    incidence[cols, np.arange(m)] -= 1.0
    constraints: List[dict] = [
        {"type": "eq", "fun": lambda x: np.array([x[:n].sum() - 1.0]), "jac": lambda x: np.concatenate([np.ones(n), np.zeros(m)])[None, :]},
    ]
    if n > 1:  # 说明：散度方程之和恒为零，去掉最后一个冗余方程
        constraints.append({"type": "eq", "fun": lambda x: incidence[:-1] @ x[n:], "jac": lambda x: np.hstack([np.zeros((n - 1, n)), incidence[:-1]])})
    for constraint in event.constraints:
        row = np.zeros(n + m)
        for state, coeff in constraint.form.mu.items():
            row[states.index_of(state)] += coeff
        for edge, coeff in constraint.form.flow.items():
            if edge not in edge_pos:
                raise ModelError(f"事件约束涉及非正速率边 {edge!r}，该坐标恒为零")
            row[n + edge_pos[edge]] += coeff
        const = constraint.form.constant
        sign = -1.0 if constraint.comparator in ("<", "<=") else 1.0
        kind = "eq" if constraint.comparator == "==" else "ineq"
        constraints.append({
            "type": kind,
            "fun": (lambda x, row=row, const=const, sign=sign: np.array([sign * (row @ x + const)])),
            "jac": (lambda x, row=row, sign=sign: (sign * row)[None, :]),
        })
    # 说明：起点取均匀测度及其平稳流
    mu0 = np.full(n, 1.0 / n)
    x0 = np.concatenate([mu0, mu0[rows] * rates])
    bounds = [(floor, 1.0)] * n + [(floor, None)] * m
    result = scipy.optimize.minimize(objective, x0, jac=True, method="SLSQP", bounds=bounds, constraints=constraints, options={"ftol": 1e-14, "maxiter": 1000})
    if not result.success:
        raise NumericalFailure(f"事件约束下的速率最小化失败: {result.message}")
    mu_opt, q_opt = unpack(result.x)
    correction, *_ = np.linalg.lstsq(incidence, incidence @ q_opt, rcond=None)  # 说明：投影回 div Q = 0，消除 SLSQP 的可行性残差
    q_opt = np.maximum(q_opt - correction, 0.0)
    measure = ProbabilityMeasure.normalized({states.labels[i]: float(v) for i, v in enumerate(mu_opt)})
    flow = Flow({edges[i]: float(v) for i, v in enumerate(q_opt)})
    report = rate(measure, flow, kernel, tol)
    if report.value.infinite:
        raise NumericalFailure(f"最小化结果不可行: {report.reason.value}")
    return measure, flow, report.value.value


def two_state_event_minimum(r01: float, r10: float, lower: float, step: float = 1e-3) -> Tuple[float, float]:
    """两状态链上事件 {μ(0) ≥ lower} 的网格最小值；每个 μ 上 Q 的最优值闭式为 √(p₁p₂)。"""
    if not (0.0 <= lower <= 1.0) or step <= 0.0:
        raise InvalidArgument("需要 0 ≤ lower ≤ 1 且 step > 0")
    grid = np.arange(lower, 1.0 + step / 2.0, step)
    grid = grid[grid <= 1.0]
    values = (np.sqrt(grid * r01) - np.sqrt((1.0 - grid) * r10)) ** 2  # 说明：Φ(q,p₁)+Φ(q,p₂) 在 q=√(p₁p₂) 处的值
    k = int(np.argmin(values))
    return float(values[k]), float(grid[k])
