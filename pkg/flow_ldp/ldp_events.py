# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件负责解析事件表达式：若干仿射约束的合取，约束的变量是 μ_T 与 Q_T 的有限个坐标。

语法示例::

    mu[0] >= 0.7
    Q[0,1] - Q[1,0] <= 0.05 & mu[1] > 0.2
    true
"""  # 说明：文件级说明，强调解析职责

from __future__ import annotations  # 说明：允许前向引用类型标注

import math  # 说明：常数比较
import operator  # 说明：比较运算符
from dataclasses import dataclass, field  # 说明：数据结构
from typing import Callable, Dict, List, Optional, Tuple  # 说明：类型标注所需

from .ldp_errors import EventParseError  # 说明：统一异常类型
from .ldp_models import Edge, EmpiricalPair, Flow, Measure, State, StateSpace  # 说明：数据结构

_COMPARATORS: Dict[str, Callable[[float, float], bool]] = {  # 说明：支持的比较符，长的放前面优先匹配
    "<=": operator.le,
    ">=": operator.ge,
    "==": operator.eq,
    "<": operator.lt,
    ">": operator.gt,
}


@dataclass(frozen=True)
class LinearForm:  # 说明：c + Σ a_x μ(x) + Σ b_e Q(e)
    constant: float = 0.0
    mu: Dict[State, float] = field(default_factory=dict)
    flow: Dict[Edge, float] = field(default_factory=dict)

    def evaluate(self, measure: Measure, flow: Flow) -> float:  # 说明：在 (μ,Q) 上求值
        parts = [self.constant]
        parts.extend(coeff * measure.get(x) for x, coeff in self.mu.items())
        parts.extend(coeff * flow.get(*edge) for edge, coeff in self.flow.items())
        return math.fsum(parts)

    def plus(self, other: "LinearForm", sign: float = 1.0) -> "LinearForm":  # 说明：self + sign·other
        mu = dict(self.mu)
        for x, coeff in other.mu.items():
            mu[x] = mu.get(x, 0.0) + sign * coeff
        flow = dict(self.flow)
        for e, coeff in other.flow.items():
            flow[e] = flow.get(e, 0.0) + sign * coeff
        return LinearForm(self.constant + sign * other.constant, mu, flow)

    def times(self, factor: float) -> "LinearForm":
        return LinearForm(
            factor * self.constant,
            {x: factor * c for x, c in self.mu.items()},
            {e: factor * c for e, c in self.flow.items()},
        )


@dataclass(frozen=True)
class Constraint:  # 说明：form ⊙ 0，其中 form = 左式 − 右式
    form: LinearForm
    comparator: str
    text: str = ""

    def holds(self, measure: Measure, flow: Flow) -> bool:
        return _COMPARATORS[self.comparator](self.form.evaluate(measure, flow), 0.0)


@dataclass(frozen=True)
class EventSpec:  # 说明：约束的合取；空约束表示全空间
    constraints: Tuple[Constraint, ...] = ()
    text: str = "true"

    def __call__(self, pair: EmpiricalPair) -> bool:
        return all(c.holds(pair.measure, pair.flow) for c in self.constraints)

    def holds(self, measure: Measure, flow: Flow) -> bool:  # 说明：直接在 (μ,Q) 上判定
        return all(c.holds(measure, flow) for c in self.constraints)

    @property
    def is_whole_space(self) -> bool:
        return not self.constraints


class _Scanner:  # 说明：逐字符扫描器
    def __init__(self, text: str, states: StateSpace) -> None:
        self.text = text
        self.pos = 0
        self.states = states
        self._lookup = {str(label): label for label in states.labels}  # 说明：按字符串匹配状态

    def error(self, message: str) -> EventParseError:
        return EventParseError(f"{message}（位置 {self.pos}）: {self.text!r}")

    def skip_spaces(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip_spaces()
        return self.text.startswith(token, self.pos)

    def take(self, token: str) -> bool:
        if self.peek(token):
            self.pos += len(token)
            return True
        return False

    def at_end(self) -> bool:
        self.skip_spaces()
        return self.pos >= len(self.text)

    def number(self) -> Optional[float]:  # 说明：读取一个浮点数字面量
        self.skip_spaces()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] in ".eE"):
            if self.text[self.pos] in "eE" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] in "+-":
                self.pos += 1
            self.pos += 1
        if start == self.pos:
            return None
        try:
            return float(self.text[start : self.pos])
        except ValueError:
            self.pos = start
            raise self.error("无法解析的数字")

    def state(self, raw: str) -> State:
        key = raw.strip()
        if key not in self._lookup:
            raise self.error(f"未知状态 {key!r}")
        return self._lookup[key]

    def bracket(self) -> List[str]:  # 说明：读取 [...] 内以逗号分隔的标签
        if not self.take("["):
            raise self.error("缺少 '['")
        end = self.text.find("]", self.pos)
        if end < 0:
            raise self.error("缺少 ']'")
        inside = self.text[self.pos : end]
        self.pos = end + 1
        return inside.split(",")


def _parse_atom(scan: _Scanner) -> LinearForm:
    if scan.take("mu"):
        labels = scan.bracket()
        if len(labels) != 1:
            raise scan.error("mu[...] 需要一个状态")
        return LinearForm(0.0, {scan.state(labels[0]): 1.0}, {})
    if scan.take("Q"):
        labels = scan.bracket()
        if len(labels) != 2:
            raise scan.error("Q[...] 需要两个状态")
        y, z = scan.state(labels[0]), scan.state(labels[1])
        if y == z:
            raise scan.error("Q[y,z] 不能是自环")
        return LinearForm(0.0, {}, {(y, z): 1.0})
    if scan.take("("):
        form = _parse_expression(scan)
        if not scan.take(")"):
            raise scan.error("缺少 ')'")
        return form
    value = scan.number()
    if value is None:
        raise scan.error("需要数字、mu[...] 或 Q[...]")
    if scan.take("*"):  # 说明：系数 * 原子
        return _parse_atom(scan).times(value)
    return LinearForm(value)


def _parse_term(scan: _Scanner) -> LinearForm:
    sign = 1.0
    while True:  # 说明：允许连续的一元正负号
        if scan.take("-"):
            sign = -sign
        elif scan.take("+"):
            continue
        else:
            break
    return _parse_atom(scan).times(sign)


def _parse_expression(scan: _Scanner) -> LinearForm:
    form = _parse_term(scan)
    while True:
        if scan.take("+"):
            form = form.plus(_parse_term(scan))
        elif scan.take("-"):
            form = form.plus(_parse_term(scan), -1.0)
        else:
            return form


def parse_expression(text: str, states: StateSpace) -> LinearForm:  # 说明：解析单个仿射表达式（观测量）
    scan = _Scanner(text, states)
    form = _parse_expression(scan)
    if not scan.at_end():
        raise scan.error("表达式后有多余内容")
    return form


def _split_conjunction(text: str) -> List[str]:  # 说明：按 & / ; / and 切分
    normalized = text.replace(";", "&")
    pieces: List[str] = []
    for chunk in normalized.split("&"):
        pieces.extend(part for part in _split_word(chunk, "and"))
    return [piece.strip() for piece in pieces]


def _split_word(chunk: str, word: str) -> List[str]:
    tokens = chunk.split()
    parts: List[List[str]] = [[]]
    for token in tokens:
        if token.lower() == word:
            parts.append([])
        else:
            parts[-1].append(token)
    return [" ".join(p) for p in parts]


def parse_event(text: str, states: StateSpace) -> EventSpec:  # 说明：解析事件表达式
    stripped = (text or "").strip()
    if stripped.lower() in ("", "true", "all"):
        return EventSpec((), "true")
    constraints: List[Constraint] = []
    for piece in _split_conjunction(stripped):
        if not piece:
            raise EventParseError(f"空约束: {text!r}")
        comparator = next((op for op in _COMPARATORS if op in piece), None)
        if comparator is None:
            raise EventParseError(f"约束缺少比较符: {piece!r}")
        left_text, right_text = piece.split(comparator, 1)
        if any(op in right_text for op in ("<", ">", "=")):
            raise EventParseError(f"约束只能包含一个比较符: {piece!r}")
        left = parse_expression(left_text, states)
        right = parse_expression(right_text, states)
        constraints.append(Constraint(left.plus(right, -1.0), comparator, piece))
    return EventSpec(tuple(constraints), stripped)
