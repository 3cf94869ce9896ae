# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件定义数据结构（模型），用于在核心运算、模拟、速率函数、环分解、倾斜各阶段传递清晰的结构化数据。
"""  # 说明：文件级说明，强调仅存放数据结构

from __future__ import annotations  # 说明：允许前向引用类型标注

import math  # 说明：求和与无穷判断
from dataclasses import dataclass, field  # 说明：使用 dataclass 简化样板代码
from enum import Enum  # 说明：原因与结论使用枚举
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple  # 说明：类型标注所需

from .ldp_config import DEFAULT_TOLERANCES  # 说明：默认容差
from .ldp_errors import InvalidArgument, ModelError  # 说明：统一异常类型

State = Hashable  # 说明：状态标签，可以是字符串或整数
Edge = Tuple[State, State]  # 说明：有向边 (y,z)


@dataclass(frozen=True)
class StateSpace:  # 说明：有序状态集合，标签与整数下标一一对应
    labels: Tuple[State, ...]  # 说明：按顺序排列的互不相同的状态标签
    index: Dict[State, int] = field(default_factory=dict, compare=False, repr=False)  # 说明：标签到下标的映射

    def __post_init__(self) -> None:  # 说明：构造时检查不变量并建立下标
        mapping: Dict[State, int] = {}  # 说明：临时映射
        for i, label in enumerate(self.labels):  # 说明：逐个登记
            if label in mapping:  # 说明：标签必须互不相同
                raise ModelError(f"状态标签重复: {label!r}")
            mapping[label] = i  # 说明：下标从 0 连续编号
        object.__setattr__(self, "index", mapping)  # 说明：冻结对象内写入缓存

    @classmethod
    def of(cls, labels: Iterable[State]) -> "StateSpace":  # 说明：从任意可迭代对象构造
        return cls(tuple(labels))

    @classmethod
    def from_flow(cls, flow: "Flow") -> "StateSpace":  # 说明：按首次出现顺序收集流中的顶点
        seen: Dict[State, None] = {}
        for y, z in flow.weights:
            seen.setdefault(y, None)
            seen.setdefault(z, None)
        return cls(tuple(seen))

    @property
    def size(self) -> int:  # 说明：状态个数
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.index

    def __iter__(self):  # type: ignore[no-untyped-def]
        return iter(self.labels)

    def index_of(self, label: State) -> int:  # 说明：标签转下标，未知标签报错
        try:
            return self.index[label]
        except KeyError as exc:
            raise ModelError(f"未知状态: {label!r}") from exc

    def edge_key(self, edge: Edge) -> Tuple[int, int]:  # 说明：边的字典序键，用于确定性排序
        return (self.index_of(edge[0]), self.index_of(edge[1]))

    def restrict(self, keep: Iterable[State]) -> "StateSpace":  # 说明：保持原顺序的子集
        wanted = set(keep)
        return StateSpace(tuple(label for label in self.labels if label in wanted))


@dataclass(frozen=True)
class RateKernel:  # 说明：稀疏跳跃速率 r(y,z)，无自环，存储值严格为正
    states: StateSpace  # 说明：状态集合
    rates: Dict[Edge, float]  # 说明：有向边到速率的映射
    exit: Dict[State, float] = field(default_factory=dict, compare=False)  # 说明：出口速率 r(x)
    out_edges: Dict[State, Tuple[Tuple[State, float], ...]] = field(default_factory=dict, compare=False, repr=False)  # 说明：按目标下标排序的出边

    def __post_init__(self) -> None:  # 说明：校验并重新计算缓存
        ordered: Dict[Edge, float] = {}
        for (y, z), value in sorted(self.rates.items(), key=lambda item: self.states.edge_key(item[0])):
            if y == z:  # 说明：不允许自环
                raise ModelError(f"速率核不允许自环: ({y!r},{z!r})")
            rate = float(value)
            if not (rate > 0.0 and math.isfinite(rate)):  # 说明：存储的速率必须严格为正且有限
                raise ModelError(f"边 ({y!r},{z!r}) 的速率必须为正的有限数，收到 {value!r}")
            ordered[(y, z)] = rate
        object.__setattr__(self, "rates", ordered)
        outgoing: Dict[State, List[Tuple[State, float]]] = {label: [] for label in self.states.labels}
        for (y, z), rate in ordered.items():  # 说明：已经按 (y,z) 下标排序
            outgoing[y].append((z, rate))
        object.__setattr__(self, "out_edges", {x: tuple(items) for x, items in outgoing.items()})
        object.__setattr__(self, "exit", {x: math.fsum(rate for _, rate in items) for x, items in outgoing.items()})

    @classmethod
    def build(cls, states: Iterable[State] | StateSpace, rates: Mapping[Edge, float], drop_zero: bool = True) -> "RateKernel":  # 说明：便捷构造，速率为零的边视为不存在
        space = states if isinstance(states, StateSpace) else StateSpace.of(states)
        kept: Dict[Edge, float] = {}
        for edge, value in rates.items():
            if drop_zero and float(value) == 0.0:  # 说明：零速率用“不存储”表示
                continue
            kept[(edge[0], edge[1])] = float(value)
        return cls(space, kept)

    def rate(self, y: State, z: State) -> float:  # 说明：r(y,z)，不在 E 中返回 0
        return self.rates.get((y, z), 0.0)

    def exit_rate(self, x: State) -> float:  # 说明：r(x)
        return self.exit.get(x, 0.0)

    def edges(self) -> List[Edge]:  # 说明：按字典序排列的正速率边集合 E
        return list(self.rates)

    def has_edge(self, edge: Edge) -> bool:
        return edge in self.rates

    def with_rates(self, rates: Mapping[Edge, float]) -> "RateKernel":  # 说明：替换速率后返回新的核（出口速率随之重算）
        return RateKernel.build(self.states, rates)


@dataclass(frozen=True)
class Measure:  # 说明：状态上的非负权重（稀疏）
    weights: Dict[State, float]  # 说明：状态到权重

    def __post_init__(self) -> None:
        cleaned: Dict[State, float] = {}
        for state, value in self.weights.items():
            weight = float(value)
            if weight < 0.0 or math.isnan(weight):  # 说明：权重必须非负
                raise ModelError(f"测度在 {state!r} 处为负: {value!r}")
            if weight > 0.0:
                cleaned[state] = weight
        object.__setattr__(self, "weights", cleaned)

    def get(self, state: State) -> float:
        return self.weights.get(state, 0.0)

    def total(self) -> float:  # 说明：总质量
        return math.fsum(self.weights.values())

    def support(self) -> List[State]:
        return list(self.weights)

    def pair(self, f: Mapping[State, float]) -> float:  # 说明：⟨μ,f⟩
        return math.fsum(weight * float(f.get(state, 0.0)) for state, weight in self.weights.items())


@dataclass(frozen=True)
class ProbabilityMeasure(Measure):  # 说明：总质量在 τ_mass 内等于 1 的测度
    def __post_init__(self) -> None:
        super().__post_init__()
        mass = self.total()
        if abs(mass - 1.0) > DEFAULT_TOLERANCES.mass:  # 说明：归一化检查
            raise ModelError(f"概率测度总质量为 {mass!r}，偏离 1 超过容差")

    @classmethod
    def normalized(cls, weights: Mapping[State, float]) -> "ProbabilityMeasure":  # 说明：先归一化再构造
        total = math.fsum(float(v) for v in weights.values())
        if not total > 0.0:
            raise InvalidArgument("无法归一化总质量为零的测度")
        return cls({state: float(v) / total for state, v in weights.items()})

    @classmethod
    def dirac(cls, state: State) -> "ProbabilityMeasure":  # 说明：δ_x
        return cls({state: 1.0})


@dataclass(frozen=True)
class SignedMeasure:  # 说明：带符号的稀疏测度，用于散度与连续性残差
    weights: Dict[State, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", {s: float(v) for s, v in self.weights.items() if float(v) != 0.0})

    def get(self, state: State) -> float:
        return self.weights.get(state, 0.0)

    def total(self) -> float:
        return math.fsum(self.weights.values())

    def max_abs(self) -> float:  # 说明：最大绝对值（sup 范数）
        return max((abs(v) for v in self.weights.values()), default=0.0)

    def pair(self, f: Mapping[State, float]) -> float:  # 说明：⟨φ, div Q⟩ 之类的配对
        return math.fsum(value * float(f.get(state, 0.0)) for state, value in self.weights.items())

    def is_zero(self) -> bool:
        return not self.weights


@dataclass(frozen=True)
class Flow:  # 说明：有向边上的非负权重，总质量有限
    weights: Dict[Edge, float]  # 说明：边到每单位时间跳跃数
    norm: float = field(default=0.0, compare=False)  # 说明：缓存的 L1 范数 ‖Q‖

    def __post_init__(self) -> None:
        cleaned: Dict[Edge, float] = {}
        for edge, value in self.weights.items():
            weight = float(value)
            if weight < 0.0 or not math.isfinite(weight):  # 说明：权重非负且有限
                raise ModelError(f"流在边 {edge!r} 上的值非法: {value!r}")
            if edge[0] == edge[1]:
                raise ModelError(f"流不允许自环: {edge!r}")
            if weight > 0.0:  # 说明：零值不存储，E(Q) 即存储的键
                cleaned[(edge[0], edge[1])] = weight
        object.__setattr__(self, "weights", cleaned)
        try:
            norm = math.fsum(cleaned.values())
        except OverflowError:  # 说明：各边有限但总和溢出，按 ‖Q‖=+∞ 处理
            norm = math.inf
        object.__setattr__(self, "norm", norm)

    @classmethod
    def zero(cls) -> "Flow":
        return cls({})

    @classmethod
    def indicator(cls, edges: Iterable[Edge], weight: float = 1.0) -> "Flow":  # 说明：边集合的指示流（可加权）
        values: Dict[Edge, float] = {}
        for edge in edges:
            values[edge] = values.get(edge, 0.0) + weight
        return cls(values)

    def get(self, y: State, z: State) -> float:
        return self.weights.get((y, z), 0.0)

    def support(self) -> List[Edge]:  # 说明：E(Q)
        return list(self.weights)

    def vertices(self) -> List[State]:  # 说明：支撑边涉及的顶点（首次出现顺序）
        seen: Dict[State, None] = {}
        for y, z in self.weights:
            seen.setdefault(y, None)
            seen.setdefault(z, None)
        return list(seen)

    def scaled(self, factor: float) -> "Flow":
        return Flow({edge: factor * weight for edge, weight in self.weights.items()})

    def combine(self, other: "Flow", a: float = 1.0, b: float = 1.0) -> "Flow":  # 说明：a·Q + b·Q'
        edges = list(self.weights) + [e for e in other.weights if e not in self.weights]
        return Flow({e: a * self.get(*e) + b * other.get(*e) for e in edges})

    def restricted_to(self, keep: Iterable[State]) -> "Flow":  # 说明：两端都在集合内的边
        wanted = set(keep)
        return Flow({(y, z): w for (y, z), w in self.weights.items() if y in wanted and z in wanted})

    def pair(self, F: Mapping[Edge, float]) -> float:  # 说明：⟨Q,F⟩
        return math.fsum(weight * float(F.get(edge, 0.0)) for edge, weight in self.weights.items())

    def distance(self, other: "Flow") -> float:  # 说明：L1 距离 ‖Q − Q'‖
        edges = set(self.weights) | set(other.weights)
        return math.fsum(abs(self.get(*e) - other.get(*e)) for e in edges)

    def sup_distance(self, other: "Flow") -> float:  # 说明：sup 距离
        edges = set(self.weights) | set(other.weights)
        return max((abs(self.get(*e) - other.get(*e)) for e in edges), default=0.0)


@dataclass(frozen=True)
class Trajectory:  # 说明：初始状态、有序跳跃（时间、目标）与时间窗 T
    initial: State  # 说明：X_0
    jumps: Tuple[Tuple[float, State], ...]  # 说明：(跳跃时刻, 目标状态)，时刻严格递增
    horizon: float  # 说明：时间窗 T
    absorbed: bool = False  # 说明：是否在 T 之前进入出口速率为零的状态

    def __post_init__(self) -> None:
        if not (self.horizon >= 0.0 and math.isfinite(self.horizon)):
            raise ModelError(f"时间窗必须是非负有限数: {self.horizon!r}")
        current = self.initial
        last = 0.0
        for time, target in self.jumps:
            if not (last < time <= self.horizon):
                raise ModelError(f"跳跃时刻必须严格递增且落在 (0,T] 内: {time!r}")
            if target == current:  # 说明：不允许跳到当前状态
                raise ModelError(f"时刻 {time!r} 的跳跃目标等于当前状态 {target!r}")
            current = target
            last = time

    @property
    def final_state(self) -> State:  # 说明：X_T
        return self.jumps[-1][1] if self.jumps else self.initial

    def visits(self) -> List[Tuple[State, float, float]]:  # 说明：(状态, 进入时刻, 离开时刻) 的逗留区间
        intervals: List[Tuple[State, float, float]] = []
        current, start = self.initial, 0.0
        for time, target in self.jumps:
            intervals.append((current, start, time))
            current, start = target, time
        intervals.append((current, start, self.horizon))
        return intervals

    def split(self, s: float) -> Tuple["Trajectory", "Trajectory"]:  # 说明：拆成 [0,s] 与 [s,T]（后者时间平移）
        if not (0.0 < s < self.horizon):
            raise InvalidArgument("拆分时刻必须落在 (0,T) 内")
        head = tuple((t, z) for t, z in self.jumps if t <= s)  # 说明：[0,s] 内的跳跃
        tail = tuple((t - s, z) for t, z in self.jumps if t > s)  # 说明：时间平移到从 0 开始
        middle = head[-1][1] if head else self.initial  # 说明：拆分时刻所在状态
        return (
            Trajectory(self.initial, head, s),
            Trajectory(middle, tail, self.horizon - s, self.absorbed),
        )


@dataclass(frozen=True)
class EmpiricalPair:  # 说明：(μ_T, Q_T)
    measure: ProbabilityMeasure  # 说明：μ_T
    flow: Flow  # 说明：Q_T
    horizon: float  # 说明：时间窗 T


@dataclass(frozen=True)
class TestPair:  # 说明：变分公式中的有限支撑测试函数 (φ,F)
    __test__ = False  # 说明：避免 pytest 把类名当成测试收集

    phi: Dict[State, float] = field(default_factory=dict)  # 说明：φ：状态上的测试函数
    F: Dict[Edge, float] = field(default_factory=dict)  # 说明：F：边上的测试函数

    def r_F(self, kernel: RateKernel, y: State) -> float:  # 说明：r^F(y)=Σ_z r(y,z)e^{F(y,z)}
        return math.fsum(rate * math.exp(self.F.get((y, z), 0.0)) for z, rate in kernel.out_edges.get(y, ()))


@dataclass(frozen=True)
class ExtendedReal:  # 说明：带标记的 [0,+∞] 取值，避免用浮点哨兵表示无穷
    value: float = 0.0  # 说明：有限时的取值
    infinite: bool = False  # 说明：是否为 +∞

    @classmethod
    def of(cls, value: float) -> "ExtendedReal":  # 说明：由浮点构造，正无穷转为标记
        if math.isinf(value) and value > 0:
            return cls(0.0, True)
        if math.isnan(value) or math.isinf(value):
            raise InvalidArgument(f"无法表示的取值: {value!r}")  # 说明：NaN 与 −∞ 不在 [0,+∞] 中
        return cls(float(value), False)

    @classmethod
    def inf(cls) -> "ExtendedReal":  # 说明：+∞
        return cls(0.0, True)

    @property
    def finite(self) -> bool:  # 说明：是否有限
        return not self.infinite

    def __float__(self) -> float:  # 说明：显式转换时 +∞ 才变成浮点 inf
        return math.inf if self.infinite else self.value

    def __add__(self, other: "ExtendedReal") -> "ExtendedReal":  # 说明：任一方为 +∞ 则和为 +∞
        if self.infinite or other.infinite:
            return ExtendedReal.inf()
        return ExtendedReal(self.value + other.value)

    def scale(self, factor: float) -> "ExtendedReal":  # 说明：非负数乘法，0·∞ 约定为 0
        if factor < 0:
            raise InvalidArgument("只允许非负系数")
        if self.infinite:
            return ExtendedReal.inf() if factor > 0 else ExtendedReal(0.0)
        return ExtendedReal(factor * self.value)

    def __le__(self, other: "ExtendedReal") -> bool:  # 说明：+∞ 只不大于 +∞
        if other.infinite:
            return True
        if self.infinite:
            return False
        return self.value <= other.value

    def __lt__(self, other: "ExtendedReal") -> bool:
        return self <= other and self != other

    def to_json(self) -> float | str:  # 说明：JSON 中 +∞ 写作字符串 "inf"
        return "inf" if self.infinite else self.value

    @classmethod
    def from_json(cls, payload: float | str) -> "ExtendedReal":  # 说明："inf" 或数值
        if payload == "inf":
            return cls.inf()
        return cls.of(float(payload))

    @staticmethod
    def total(items: Iterable["ExtendedReal"]) -> "ExtendedReal":  # 说明：按顺序的精确求和
        values: List[float] = []
        for item in items:
            if item.infinite:
                return ExtendedReal.inf()
            values.append(item.value)
        return ExtendedReal(math.fsum(values))


class RateReason(str, Enum):  # 说明：速率函数取值的原因
    OK = "Ok"
    NONZERO_DIVERGENCE = "NonzeroDivergence"
    UNSUPPORTED_EDGE = "UnsupportedEdge"
    SERIES_DIVERGENCE = "SeriesDivergence"


@dataclass(frozen=True)
class RateReport:  # 说明：I(μ,Q) 的计算报告
    value: ExtendedReal  # 说明：取值，可能为 +∞
    reason: RateReason  # 说明：有限或无穷的原因
    per_edge_terms: Dict[Edge, float] = field(default_factory=dict)  # 说明：各边 Φ 项（有限时求和等于 value）
    divergence_max: float = 0.0  # 说明：散度的最大绝对值
    offending_edges: Tuple[Edge, ...] = ()  # 说明：导致 +∞ 的边

    def top_edges(self, k: int) -> List[Tuple[Edge, float]]:  # 说明：贡献最大的 k 条边（稳定排序）
        ranked = sorted(self.per_edge_terms.items(), key=lambda item: -item[1])
        return ranked[:k]


@dataclass(frozen=True)
class SupCheck:  # 说明：rate_sup_check 的结果
    value: float  # 说明：I_{φ,F*}(μ,Q)
    gap: ExtendedReal  # 说明：rate − value ≥ 0
    clamped: bool  # 说明：F* 是否触发了截断
    F_star: Dict[Edge, float] = field(default_factory=dict)  # 说明：闭式最优点 F*


@dataclass(frozen=True)
class AffineComponent:  # 说明：仿射分解中的一个分量
    weight: float  # 说明：μ(K_j)
    measure: ProbabilityMeasure  # 说明：μ_j
    flow: Flow  # 说明：Q_j
    states: Tuple[State, ...]  # 说明：分量的顶点集合 K_j


@dataclass(frozen=True)
class Cycle:  # 说明：自回避有向环 (x_1,…,x_k)，边按首尾相接隐含
    vertices: Tuple[State, ...]  # 说明：按环上顺序

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise ModelError("环至少需要两个顶点")
        if len(set(self.vertices)) != len(self.vertices):  # 说明：自回避
            raise ModelError(f"环不是自回避的: {self.vertices!r}")

    def edges(self) -> List[Edge]:  # 说明：(x_i, x_{i+1})，末点接回首点
        k = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % k]) for i in range(k)]

    def __len__(self) -> int:  # 说明：环长 |C|
        return len(self.vertices)

    def inside(self, keep: Iterable[State]) -> bool:  # 说明：所有顶点都在集合内
        wanted = set(keep)
        return all(v in wanted for v in self.vertices)


@dataclass(frozen=True)
class CycleDecomposition:  # 说明：(环, 正权重) 列表
    terms: Tuple[Tuple[Cycle, float], ...]  # 说明：按提取顺序
    steps: int = 0  # 说明：减法迭代次数

    def __post_init__(self) -> None:
        for cycle, weight in self.terms:
            if not weight > 0.0:  # 说明：零权重的环不保留
                raise ModelError(f"环权重必须为正: {weight!r}")

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class TruncatedDecomposition:  # 说明：带幽灵顶点的截断分解结果
    inside: CycleDecomposition  # 说明：完全落在 V_n 内的环
    escaping: Tuple[Tuple[Tuple[State, ...], float], ...]  # 说明：穿过幽灵顶点的链（去掉幽灵后的顶点序列）
    flux_out: float  # 说明：φ_n^+
    flux_in: float  # 说明：φ_n^-


@dataclass(frozen=True)
class TiltedModel:  # 说明：指数倾斜链
    base: RateKernel  # 说明：原链速率 r
    tilted: RateKernel  # 说明：倾斜速率 r̂
    log_rate_ratio: Dict[Edge, float]  # 说明：ln(r̂/r)，只在倾斜支撑上
    exit_gap: Dict[State, float]  # 说明：r̂(y) − r(y)
    escape_path: Tuple[State, ...] = ()  # 说明：保留原速率的逃逸路径

    def __post_init__(self) -> None:
        for edge in self.tilted.rates:  # 说明：绝对连续：倾斜边必须是原边
            if not self.base.has_edge(edge):
                raise ModelError(f"倾斜边 {edge!r} 不在原链的边集合中")


@dataclass(frozen=True)
class ImportanceEstimate:  # 说明：重要性采样估计
    horizon: float
    estimate: float  # 说明：概率估计
    std_error: float  # 说明：标准误
    hits: int  # 说明：倾斜链下命中事件的路径数
    paths: int  # 说明：总路径数

    @property
    def implied_rate(self) -> float:  # 说明：−(1/T) log P̂
        if self.estimate <= 0.0:
            return math.inf
        return -math.log(self.estimate) / self.horizon


@dataclass(frozen=True)
class BoundCheck:  # 说明：单侧 Chebyshev 型界的蒙特卡洛检验结果
    event: str  # 说明："upper" 或 "lower"
    frequency: float  # 说明：事件频率
    bound: float  # 说明：e^{−Tδλ}
    ci_low: float  # 说明：Clopper–Pearson 区间下端
    ci_high: float  # 说明：区间上端
    holds: bool  # 说明：区间下端不超过界


@dataclass(frozen=True)
class WillyReport:  # 说明：两侧事件的检验汇总
    edge: Edge  # 说明：被检验的边 (y,z)
    lam: float  # 说明：λ > 0
    delta: float  # 说明：δ > 0
    horizon: float
    paths: int
    upper: BoundCheck  # 说明：上偏事件
    lower: BoundCheck  # 说明：下偏事件


@dataclass(frozen=True)
class BirthDeathSpec:  # 说明：生灭链参数，b[k]=b_k (k<K)，d[k]=d_k (1≤k≤K，d[0] 忽略)
    b: Tuple[float, ...]  # 说明：出生率 b_0..b_{K−1}
    d: Tuple[float, ...]  # 说明：死亡率，d[0]=0 占位
    truncation: int  # 说明：截断层数 K

    def __post_init__(self) -> None:
        K = self.truncation
        if K < 2:
            raise ModelError("截断层数 K 至少为 2")
        if len(self.b) < K or len(self.d) < K + 1:
            raise ModelError(f"需要 b_0..b_{K - 1} 与 d_1..d_{K}（d[0] 占位）")
        object.__setattr__(self, "b", tuple(float(x) for x in self.b[:K]))  # 说明：多余的项截掉
        object.__setattr__(self, "d", (0.0,) + tuple(float(x) for x in self.d[1 : K + 1]))  # 说明：d[0] 统一写 0
        for k, value in enumerate(self.b):
            if not value > 0.0:
                raise ModelError(f"出生率 b_{k} 必须为正")
        for k in range(1, K + 1):
            if not self.d[k] > 0.0:
                raise ModelError(f"死亡率 d_{k} 必须为正")


class Verdict(str, Enum):  # 说明：截断上的结论，显式标注 OnTruncation
    HOLDS = "HoldsOnTruncation"
    FAILS = "FailsOnTruncation"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ConditionReport:  # 说明：条件检查报告
    condition: str  # 说明：条件编号
    verdict: Verdict  # 说明：Holds / Fails / Inconclusive
    witnesses: Dict[str, float] = field(default_factory=dict)  # 说明：σ、C、判据值等具名标量
    trend: str = ""  # 说明："growing" / "bounded" / "flat"
    notes: Tuple[str, ...] = ()  # 说明：附加说明，例如序列 u_n 的收敛情况

    def __post_init__(self) -> None:
        if self.verdict is not Verdict.INCONCLUSIVE and not self.witnesses:
            raise ModelError("非 Inconclusive 结论必须附带见证量")


@dataclass(frozen=True)
class SeriesDiagnostics:  # 说明：生灭链级数诊断
    normalization_partial: Tuple[float, ...]  # 说明：Z 的部分和
    explosion_partial: Tuple[float, ...]  # 说明：非爆炸级数的部分和
    normalization_trend: str  # 说明：bounded 表示 Z 收敛
    explosion_trend: str  # 说明：growing 表示不爆炸
    exit_partial: Tuple[float, ...] = ()  # 说明：⟨π,r⟩ 的部分和
    exit_trend: str = ""  # 说明：⟨π,r⟩ 的趋势
    reciprocal_partial: Tuple[float, ...] = ()  # 说明：Σ 1/(π(k)b_k) 的部分和
    reciprocal_trend: str = ""  # 说明：改写形式的趋势


@dataclass(frozen=True)
class NonTightnessReport:  # 说明：经验测度非指数紧性示例
    beta: float  # 说明：出生率 β
    delta: float  # 说明：死亡率 δ
    horizon: float
    bound: float  # 说明：解析下界 [β/(β+δ)]^{2(β+δ)T−1}
    paths: int = 0  # 说明：每个时间窗的路径数
    hits: int = 0  # 说明：落入事件的路径数
    frequency: float = 0.0
    ci_low: float = 0.0
    ci_high: float = 0.0


@dataclass
class RunConfig:  # 说明：命令行一次运行的完整配置
    subcommand: str  # 说明：子命令名
    model_path: str = ""  # 说明：模型 JSON 路径
    seed: int = 0  # 说明：随机种子
    horizons: List[float] = field(default_factory=list)  # 说明：时间窗列表
    paths: int = 0
    output_path: str = ""  # 说明：空串表示标准输出
    output_format: str = "json"  # 说明：json 或 csv
    workers: int = 1  # 说明：并行线程数
    options: Dict[str, object] = field(default_factory=dict)  # 说明：子命令专有参数
    settings: Dict[str, object] = field(default_factory=dict)  # 说明：合并后的配置字典（含容差覆盖）

    def provenance(self) -> Dict[str, object]:  # 说明：嵌入输出文件的配置快照，不含线程数与输出路径
        return {
            "subcommand": self.subcommand,
            "model": self.model_path,
            "seed": self.seed,
            "horizons": list(self.horizons),
            "paths": self.paths,
            "options": dict(sorted(self.options.items())),
            "settings": self.settings,
        }


def sorted_edges(edges: Iterable[Edge], states: StateSpace) -> List[Edge]:  # 说明：按下标字典序排序
    return sorted(edges, key=states.edge_key)


def as_state_function(f: Mapping[State, float] | Sequence[float], states: StateSpace) -> Dict[State, float]:  # 说明：接受映射或按下标的序列
    if isinstance(f, Mapping):
        return {state: float(f.get(state, 0.0)) for state in states.labels}
    values = list(f)
    if len(values) != len(states):
        raise InvalidArgument(f"函数长度 {len(values)} 与状态数 {len(states)} 不一致")
    return {state: float(values[i]) for i, state in enumerate(states.labels)}


__all__ = [
    "AffineComponent",
    "BirthDeathSpec",
    "BoundCheck",
    "ConditionReport",
    "Cycle",
    "CycleDecomposition",
    "Edge",
    "EmpiricalPair",
    "ExtendedReal",
    "Flow",
    "ImportanceEstimate",
    "Measure",
    "NonTightnessReport",
    "ProbabilityMeasure",
    "RateKernel",
    "RateReason",
    "RateReport",
    "RunConfig",
    "SeriesDiagnostics",
    "SignedMeasure",
    "State",
    "StateSpace",
    "SupCheck",
    "TestPair",
    "TiltedModel",
    "Trajectory",
    "TruncatedDecomposition",
    "Verdict",
    "WillyReport",
    "as_state_function",
    "sorted_edges",
]
