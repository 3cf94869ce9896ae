# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""测试事件表达式解析。"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import pytest  # 说明：测试框架

from flow_ldp.ldp_errors import EventParseError
from flow_ldp.ldp_events import parse_event, parse_expression
from flow_ldp.ldp_models import EmpiricalPair, Flow, ProbabilityMeasure, RateKernel

MU = ProbabilityMeasure({0: 0.8, 1: 0.2})  # 说明：共用的经验测度
Q = Flow({(0, 1): 0.3, (1, 0): 0.25})  # 说明：共用的经验流


def test_single_constraint(two_state: RateKernel) -> None:  # 说明：单个约束
    event = parse_event("mu[0] >= 0.7", two_state.states)
    assert len(event.constraints) == 1
    assert event(EmpiricalPair(MU, Q, 1.0))
    assert not event.holds(ProbabilityMeasure({0: 0.5, 1: 0.5}), Q)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("Q[0,1] - Q[1,0] <= 0.05 & mu[1] > 0.2", False),
        ("Q[0,1] - Q[1,0] <= 0.05 & mu[1] >= 0.2", True),
        ("mu[0] >= 0.1 and mu[1] >= 0.1", True),
        ("mu[0] > 0.9; mu[1] > 0.1", False),
        ("2*mu[0] + -0.5 * Q[0,1] - 1.4 >= 0", True),
        ("2 * (mu[0] - 0.4) == 0.8", True),
        ("-mu[0] < -0.75", True),
        ("Q[0,1] <= 3e-1", True),
    ],
)
def test_conjunctions_and_coefficients(two_state: RateKernel, text: str, expected: bool) -> None:  # 说明：合取与系数写法
    assert parse_event(text, two_state.states).holds(MU, Q) is expected


def test_whole_space(two_state: RateKernel) -> None:  # 说明：true 与空串都是全空间
    for text in ("true", "", "  TRUE "):
        event = parse_event(text, two_state.states)
        assert event.is_whole_space and event.text == "true"


def test_string_labels(three_state: RateKernel) -> None:  # 说明：字符串标签的系数向量
    form = parse_expression("Q[a,b] - 2 * mu[c] + 1", three_state.states)
    assert form.flow == {("a", "b"): 1.0}
    assert form.mu == {"c": -2.0}
    assert form.constant == 1.0


@pytest.mark.parametrize(
    "text",
    [
        "mu[7] >= 0",
        "mu[0]",
        "0 < mu[0] < 1",
        "Q[0,0] > 0",
        "mu[0] 3 >= 0",
        "mu[0] >= 0 & ",
        "mu[0,1] >= 0",
        "(mu[0] >= 0",
        "mu[0] >= x",
    ],
)
def test_parse_errors(two_state: RateKernel, text: str) -> None:  # 说明：非法输入报 EventParseError
    with pytest.raises(EventParseError):
        parse_event(text, two_state.states)
