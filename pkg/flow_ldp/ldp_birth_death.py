# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件负责生灭链模型族与条件检查：预设速率、闭式不变测度、级数诊断、
Lyapunov 条件、对数 Sobolev 判据、指数矩、Dirichlet 形式，以及两个反例
（经验测度非指数紧、强拓扑下的非紧水平集）。

所有结论都只在截断 {0..K} 上给出，结论名里显式带 OnTruncation。
"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import math  # 说明：对数与精确求和
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union  # 说明：类型标注所需

import numpy as np  # 说明：对数空间的向量运算
from scipy.special import logsumexp  # 说明：对数空间求和

from .ldp_config import sigma_grid as default_sigma_grid  # 说明：σ 网格
from .ldp_core import StateFunction, lift_operator, stationary_flow  # 说明：核心运算
from .ldp_errors import InvalidArgument, ModelError, logger  # 说明：统一异常与日志
from .ldp_models import (  # 说明：数据结构
    BirthDeathSpec,
    ConditionReport,
    Flow,
    NonTightnessReport,
    ProbabilityMeasure,
    RateKernel,
    SeriesDiagnostics,
    State,
    Verdict,
)
from .ldp_simulate import sample_paths  # 说明：反例的蒙特卡洛部分
from .ldp_tilting import clopper_pearson  # 说明：二项比例置信区间

GROWING = "growing"
BOUNDED = "bounded"
FLAT = "flat"


# ---------------------------------------------------------------- 预设速率


def constant_rates(beta: float, delta: float, K: int) -> BirthDeathSpec:  # 说明：b_k=β，d_k=δ
    return BirthDeathSpec(tuple([beta] * K), tuple([0.0] + [delta] * K), K)


def poisson_rates(lam: float, K: int) -> BirthDeathSpec:  # 说明：b_k=λ，d_k=k，π 为泊松分布
    return BirthDeathSpec(tuple([lam] * K), tuple(float(k) for k in range(K + 1)), K)


def doubling_rates(K: int) -> BirthDeathSpec:  # 说明：b_k=k+1，d_{k+1}=2b_k，π(k)=2^{−k−1}
    return BirthDeathSpec(tuple(float(k + 1) for k in range(K)), tuple(2.0 * k for k in range(K + 1)), K)


def counterexample_rates(K: int) -> BirthDeathSpec:  # 说明：b_k=(k+1)/2，d_k=k，π 几何分布参数 1/2
    return BirthDeathSpec(tuple((k + 1) / 2.0 for k in range(K)), tuple(float(k) for k in range(K + 1)), K)


def birth_death_kernel(spec: BirthDeathSpec) -> RateKernel:
    """{0..K} 上的最近邻速率核：r(k,k+1)=b_k，r(k+1,k)=d_{k+1}。"""
    K = spec.truncation
    rates: Dict[Tuple[State, State], float] = {}
    for k in range(K):
        rates[(k, k + 1)] = spec.b[k]
        rates[(k + 1, k)] = spec.d[k + 1]
    return RateKernel.build(list(range(K + 1)), rates)


def _log_weights(spec: BirthDeathSpec) -> np.ndarray:  # 说明：ln(b_0⋯b_{k−1} / d_1⋯d_k)
    steps = np.log(np.asarray(spec.b)) - np.log(np.asarray(spec.d[1:]))
    return np.concatenate([[0.0], np.cumsum(steps)])


def closed_form_invariant(spec: BirthDeathSpec) -> ProbabilityMeasure:
    """π(k) = Z⁻¹ b_0⋯b_{k−1}/(d_1⋯d_k)，在对数空间归一化。"""
    lw = _log_weights(spec)
    logpi = lw - logsumexp(lw)
    return ProbabilityMeasure({k: float(math.exp(v)) for k, v in enumerate(logpi.tolist())})


# ---------------------------------------------------------------- 趋势判定


def _split(values: np.ndarray, tail_fraction: float) -> Tuple[np.ndarray, np.ndarray]:
    n = len(values)
    size = max(2, int(math.ceil(n * tail_fraction)))
    if n <= size:
        raise InvalidArgument(f"序列长度 {n} 不足以做尾部趋势判定")
    return values[: n - size], values[n - size :]


def sequence_trend(values: Sequence[float], tail_fraction: float = 0.25) -> str:
    """尾部严格递增且超过头部最大值记为 growing；尾部最大值不超过头部最大值记为 bounded。"""
    head, tail = _split(np.asarray(values, dtype=float), tail_fraction)
    head_max = float(np.max(head))
    if np.all(np.diff(tail) > 0.0) and tail[-1] > head_max:
        return GROWING
    if float(np.max(tail)) <= head_max + 1e-12 * max(1.0, abs(head_max)):
        return BOUNDED
    return FLAT


def series_trend(log_terms: Sequence[float], tail_fraction: float = 0.25) -> str:
    """级数项的比值检验：尾部 ln(a_{k+1}/a_k) 全负为 bounded（收敛），全非负为 growing（发散）。"""
    _, tail = _split(np.asarray(log_terms, dtype=float), tail_fraction)
    ratios = np.diff(tail)
    if np.all(ratios < 0.0):
        return BOUNDED
    if np.all(ratios >= 0.0):
        return GROWING
    return FLAT


def series_diagnostics(spec: BirthDeathSpec, tail_fraction: float = 0.25) -> SeriesDiagnostics:
    """归一化级数 Z、非爆炸级数 Σ d_1⋯d_k/(b_1⋯b_k)、改写形式 Σ 1/(π(k)b_k) 与 ⟨π,r⟩ 的部分和及趋势。"""
    lw = _log_weights(spec)
    b = np.asarray(spec.b)
    d = np.asarray(spec.d)
    le = np.concatenate([[0.0], np.cumsum(np.log(d[1:-1]) - np.log(b[1:]))])  # 说明：k=0..K−1
    logpi = lw - logsumexp(lw)
    exits = np.concatenate([b, [0.0]]) + d  # 说明：r(k)=b_k+d_k，截断端 r(K)=d_K
    log_exit_terms = logpi + np.log(exits)
    log_recip = -logpi[:-1] - np.log(b)  # 说明：k=0..K−1
    with np.errstate(over="ignore"):
        norm_partial = np.exp(np.logaddexp.accumulate(lw))
        expl_partial = np.exp(np.logaddexp.accumulate(le))
        exit_partial = np.exp(np.logaddexp.accumulate(log_exit_terms))
        recip_partial = np.exp(np.logaddexp.accumulate(log_recip))
    return SeriesDiagnostics(
        tuple(norm_partial.tolist()),
        tuple(expl_partial.tolist()),
        series_trend(lw, tail_fraction),
        series_trend(le, tail_fraction),
        tuple(exit_partial.tolist()),
        series_trend(log_exit_terms, tail_fraction),
        tuple(recip_partial.tolist()),
        series_trend(log_recip, tail_fraction),
    )


# ---------------------------------------------------------------- Lyapunov 条件


def geometric_u(A: float) -> Callable[[State], float]:  # 说明：u(k)=A^k
    if not A > 0.0:
        raise InvalidArgument("A 必须为正")
    return lambda k: float(A) ** int(k)  # type: ignore[call-overload]


def normalized_drift(kernel: RateKernel, u: StateFunction) -> Dict[State, float]:
    """v = −Lu/u。"""
    values = {x: float(u(x)) if callable(u) else float(u[x]) for x in kernel.states.labels}
    for x, value in values.items():
        if not (value > 0.0 and math.isfinite(value)):
            raise InvalidArgument(f"u 必须是有限正函数，u({x!r}) = {value!r}")
    Lu = lift_operator(kernel, values)
    return {x: -Lu[x] / values[x] for x in kernel.states.labels}


def check_lyapunov(
    kernel: RateKernel,
    u: Union[StateFunction, Sequence[StateFunction]],
    sigma_grid: Optional[Sequence[float]] = None,
    tail_fraction: float = 0.25,
) -> ConditionReport:
    """计算 v = −Lu/u，判断水平集趋势，并在 σ 网格上找最大的 σ 使 v ≥ σr − C 由有限个状态决定。

    u 也可以是函数序列 (u_n)，此时用最后一个的 v 作为逐点极限，并报告最后两项之差。
    """
    notes: List[str] = []
    if isinstance(u, (list, tuple)):
        if not u:
            raise InvalidArgument("u 序列不能为空")
        drifts = [normalized_drift(kernel, item) for item in u]
        v = drifts[-1]
        if len(drifts) > 1:
            change = max(abs(v[x] - drifts[-2][x]) for x in kernel.states.labels)
            notes.append(f"sequence_last_change={change:.6g}")
    else:
        v = normalized_drift(kernel, u)  # type: ignore[arg-type]
    labels = kernel.states.labels
    v_arr = np.array([v[x] for x in labels])
    r_arr = np.array([kernel.exit_rate(x) for x in labels])
    trend = sequence_trend(v_arr, tail_fraction)
    grid = sorted(set(float(s) for s in (sigma_grid if sigma_grid is not None else default_sigma_grid())))
    best_sigma = 0.0
    for sigma in grid:
        if not sigma > 0.0:
            continue
        head, tail = _split(sigma * r_arr - v_arr, tail_fraction)
        if float(np.max(tail)) < float(np.max(head)):  # 说明：约束由头部有限个状态决定
            best_sigma = sigma
    C = float(np.max(best_sigma * r_arr - v_arr))
    witnesses = {"sigma": best_sigma, "C": C, "v_min": float(v_arr.min()), "v_last": float(v_arr[-1])}
    if best_sigma == 0.0:
        verdict = Verdict.FAILS
    elif trend == GROWING:
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.INCONCLUSIVE
    logger.debug(f"Lyapunov 检查：σ={best_sigma}，C={C:.6g}，v 趋势 {trend}")
    return ConditionReport("lyapunov", verdict, witnesses, trend, tuple(notes))


# ---------------------------------------------------------------- 对数 Sobolev 判据与指数矩


def sobolev_criterion_terms(spec: BirthDeathSpec, include_remainder: bool = True) -> Tuple[np.ndarray, float]:
    """k=1..K 的判据项 π[k,∞)·ln(1/π[k,∞))·Σ_{j<k} 1/(π(j)b_j)，返回 (各项, 归一化后的截断余项)。

    余项按末端比值 ρ = b_{K−1}/d_K 的几何尾部估计，仅在 ρ < 1 时加入。
    """
    K = spec.truncation
    lw = _log_weights(spec)
    rho = spec.b[K - 1] / spec.d[K]
    log_rem = -math.inf
    if include_remainder and rho < 1.0:
        log_rem = float(lw[K] + math.log(rho) - math.log1p(-rho))
    logZ = float(np.logaddexp(logsumexp(lw), log_rem))
    logpi = lw - logZ
    log_tails = np.logaddexp(np.logaddexp.accumulate(logpi[::-1])[::-1], log_rem - logZ)  # 说明：ln π[k,∞)
    log_sums = np.logaddexp.accumulate(-logpi[:-1] - np.log(np.asarray(spec.b)))  # 说明：ln Σ_{j<k}
    tails = log_tails[1:]
    with np.errstate(divide="ignore"):
        terms = np.exp(tails + np.log(-tails) + log_sums)
    return terms, math.exp(log_rem - logZ) if math.isfinite(log_rem) else 0.0


def exponential_moment(kernel: RateKernel, pi: ProbabilityMeasure, sigma: float) -> float:  # 说明：⟨π, e^{σr}⟩
    logs = [math.log(w) + sigma * kernel.exit_rate(x) for x, w in pi.weights.items()]
    return float(np.exp(logsumexp(logs)))


def check_moments(
    kernel: RateKernel,
    pi: ProbabilityMeasure,
    sigma_grid: Optional[Sequence[float]] = None,
    tail_fraction: float = 0.25,
) -> ConditionReport:
    """π 是否对 r 有指数矩：按状态下标顺序对项 π(x)e^{σr(x)} 做比值检验，取收敛的最大 σ。"""
    grid = sorted(set(float(s) for s in (sigma_grid if sigma_grid is not None else default_sigma_grid())))
    positive = [s for s in grid if s > 0.0]
    if not positive:
        raise InvalidArgument("σ 网格中至少需要一个正数")
    labels = kernel.states.labels
    logpi = np.array([math.log(pi.get(x)) if pi.get(x) > 0.0 else -math.inf for x in labels])
    r_arr = np.array([kernel.exit_rate(x) for x in labels])
    best: Optional[float] = None
    trends: Dict[float, str] = {}
    for sigma in positive:
        trends[sigma] = series_trend(logpi + sigma * r_arr, tail_fraction)
        if trends[sigma] == BOUNDED:
            best = sigma
    chosen = best if best is not None else positive[0]
    witnesses = {"sigma": chosen, "moment": exponential_moment(kernel, pi, chosen)}
    if best is not None:
        verdict = Verdict.HOLDS
    elif all(t == GROWING for t in trends.values()):
        verdict = Verdict.FAILS
    else:
        verdict = Verdict.INCONCLUSIVE
    return ConditionReport("exponential-moment", verdict, witnesses, trends[chosen])


def check_log_sobolev_bd(
    spec: BirthDeathSpec,
    include_remainder: bool = True,
    sigma_grid: Optional[Sequence[float]] = None,
    tail_fraction: float = 0.25,
) -> ConditionReport:
    """生灭链对数 Sobolev 判据的截断证据，外加指数矩检查。"""
    terms, remainder = sobolev_criterion_terms(spec, include_remainder)
    running = np.maximum.accumulate(terms)
    trend = sequence_trend(terms, tail_fraction)
    kernel = birth_death_kernel(spec)
    moments = check_moments(kernel, closed_form_invariant(spec), sigma_grid, tail_fraction)
    notes = [f"truncation_remainder={remainder:.6g}"]
    if include_remainder and remainder == 0.0:
        notes.append("remainder_not_bounded: b_{K-1}/d_K >= 1")
    witnesses = {
        "criterion_sup": float(running[-1]),
        "criterion_last": float(terms[-1]),
        "truncation": float(spec.truncation),
        "remainder": remainder,
        "moment_sigma": moments.witnesses["sigma"],
        "moment": moments.witnesses["moment"],
    }
    if trend == GROWING or moments.verdict is Verdict.FAILS:
        verdict = Verdict.FAILS
    elif trend == BOUNDED and moments.verdict is Verdict.HOLDS:
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.INCONCLUSIVE
    logger.debug(f"对数 Sobolev 判据：sup={running[-1]:.6g}，趋势 {trend}，余项 {remainder:.3e}")
    return ConditionReport("log-sobolev", verdict, witnesses, trend, tuple(notes))


def dirichlet_form(kernel: RateKernel, pi: ProbabilityMeasure, f: StateFunction) -> float:
    """D_π(f) = ¼ΣΣ(π(x)r(x,y)+π(y)r(y,x))(f(y)−f(x))² = ½Σ_{(x,y)∈E} π(x)r(x,y)(f(y)−f(x))²。"""
    values = {x: float(f(x)) if callable(f) else float(f[x]) for x in kernel.states.labels}
    return 0.5 * math.fsum(pi.get(x) * r * (values[y] - values[x]) ** 2 for (x, y), r in kernel.rates.items())


# ---------------------------------------------------------------- 反例


def non_tightness_bound(beta: float, delta: float, T: float) -> float:  # 说明：[β/(β+δ)]^{2(β+δ)T−1}
    return (beta / (beta + delta)) ** (2.0 * (beta + delta) * T - 1.0)


def non_tightness_demo(
    beta: float,
    delta: float,
    T: float,
    paths: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> NonTightnessReport:
    """常速率生灭链上"跳跃次数为 O(T) 且全部向右"事件的解析下界与（可选的）蒙特卡洛频率。"""
    if not (beta > 0.0 and delta > 0.0) or not beta < delta:
        raise InvalidArgument("需要 0 < β < δ（γ = β/δ < 1）")
    if not T > 0.0:
        raise InvalidArgument("时间窗 T 必须为正")
    bound = non_tightness_bound(beta, delta, T)
    if paths <= 0:
        return NonTightnessReport(beta, delta, float(T), bound)
    low_jumps, high_jumps = beta * T / 2.0, 2.0 * (beta + delta) * T
    K = int(math.ceil(high_jumps)) + 2  # 说明：满足事件的路径碰不到截断端
    kernel = birth_death_kernel(constant_rates(beta, delta, K))
    hits = 0
    for path in sample_paths(kernel, 0, T, seed, paths, workers):
        count = len(path.jumps)
        if low_jumps <= count <= high_jumps and path.final_state == count:  # 说明：从 0 出发，终点等于跳跃数即全部向右
            hits += 1
    low, high = clopper_pearson(hits, paths)
    return NonTightnessReport(beta, delta, float(T), bound, paths, hits, hits / paths, low, high)


def strong_topology_counterexample(n: int, K: Optional[int] = None) -> Tuple[ProbabilityMeasure, Flow]:
    """μ^n = (1−1/n)π + (δ_n+δ_{n+1})/(2n)，Q^n = (1−1/n)Q^π + ½(1_{(n,n+1)}+1_{(n+1,n)})，速率 b_k=(k+1)/2，d_k=k。"""
    if n < 2:
        raise InvalidArgument("n 至少为 2")
    K = n + 10 if K is None else K
    if K < n + 1:
        raise ModelError(f"截断 K={K} 必须至少为 n+1={n + 1}")
    spec = counterexample_rates(K)
    kernel = birth_death_kernel(spec)
    pi = closed_form_invariant(spec)
    q_pi = stationary_flow(pi, kernel)
    scale = 1.0 - 1.0 / n
    weights = {x: scale * w for x, w in pi.weights.items()}
    for x in (n, n + 1):
        weights[x] = weights.get(x, 0.0) + 1.0 / (2.0 * n)
    loop = Flow.indicator([(n, n + 1), (n + 1, n)], 0.5)
    return ProbabilityMeasure(weights), q_pi.combine(loop, scale, 1.0)
