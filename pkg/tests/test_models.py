# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""测试基础数据类型的校验。"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import math

import pytest  # 说明：测试框架

from flow_ldp.ldp_errors import InvalidArgument, ModelError
from flow_ldp.ldp_models import (
    BirthDeathSpec,
    ConditionReport,
    ExtendedReal,
    Flow,
    ProbabilityMeasure,
    RateKernel,
    RunConfig,
    StateSpace,
    Trajectory,
    Verdict,
    as_state_function,
)


def test_state_space_rejects_duplicates() -> None:  # 说明：状态标签不可重复
    with pytest.raises(ModelError):
        StateSpace((0, 1, 0))


def test_state_space_orders_edges_lexicographically() -> None:  # 说明：边按下标字典序
    space = StateSpace(("x", "y", "z"))
    edges = [("z", "x"), ("x", "z"), ("x", "y")]
    assert sorted(edges, key=space.edge_key) == [("x", "y"), ("x", "z"), ("z", "x")]
    assert space.restrict(["z", "x"]).labels == ("x", "z")


def test_kernel_drops_zero_rates_and_caches_exit() -> None:  # 说明：零速率不进入 E
    kernel = RateKernel.build([0, 1, 2], {(0, 1): 2.0, (0, 2): 0.0, (1, 0): 1.5})
    assert kernel.edges() == [(0, 1), (1, 0)]
    assert kernel.exit_rate(0) == 2.0
    assert kernel.exit_rate(2) == 0.0
    assert kernel.rate(0, 2) == 0.0


@pytest.mark.parametrize("rates", [{(0, 0): 1.0}, {(0, 1): -1.0}, {(0, 1): math.inf}])
def test_kernel_rejects_bad_rates(rates) -> None:  # 说明：负数、非有限、自环
    with pytest.raises(ModelError):
        RateKernel(StateSpace((0, 1)), rates)


def test_probability_measure_mass_check() -> None:  # 说明：总质量为 1
    with pytest.raises(ModelError):
        ProbabilityMeasure({0: 0.5, 1: 0.4})
    mu = ProbabilityMeasure.normalized({0: 2.0, 1: 6.0})
    assert mu.get(1) == pytest.approx(0.75)
    assert ProbabilityMeasure.dirac("a").support() == ["a"]


def test_flow_helpers() -> None:  # 说明：支撑、缩放、组合、限制
    Q = Flow({(0, 1): 1.0, (1, 0): 0.0, (1, 2): 2.0})
    assert Q.support() == [(0, 1), (1, 2)]
    assert Q.norm == 3.0
    R = Q.combine(Flow({(0, 1): 1.0}), 0.5, 2.0)
    assert R.get(0, 1) == 2.5 and R.get(1, 2) == 1.0
    assert Q.distance(R) == pytest.approx(2.5)
    with pytest.raises(ModelError):
        Flow({(0, 1): -0.1})


def test_trajectory_validation_and_split() -> None:  # 说明：跳跃时刻递增，拆分后拼回
    with pytest.raises(ModelError):
        Trajectory(0, ((1.0, 1), (0.5, 0)), 2.0)
    with pytest.raises(ModelError):
        Trajectory(0, ((1.0, 0),), 2.0)
    traj = Trajectory(0, ((0.5, 1), (1.5, 0), (2.5, 1)), 3.0)
    head, tail = traj.split(2.0)
    assert head.final_state == 0 and tail.initial == 0
    assert len(head.jumps) + len(tail.jumps) == 3
    assert tail.jumps == ((0.5, 1),)
    with pytest.raises(InvalidArgument):
        traj.split(3.0)


def test_extended_real_arithmetic() -> None:  # 说明：+∞ 的加法、缩放与比较
    inf = ExtendedReal.inf()
    one = ExtendedReal.of(1.0)
    assert (one + inf).infinite
    assert float(one + ExtendedReal(2.0)) == 3.0
    assert inf.scale(0.0) == ExtendedReal(0.0)
    assert one <= inf and not inf <= one
    assert one < inf
    assert ExtendedReal.from_json(inf.to_json()) == inf
    assert ExtendedReal.total([one, one, inf]).infinite
    with pytest.raises(InvalidArgument):
        ExtendedReal.of(math.nan)


def test_birth_death_spec_validation() -> None:  # 说明：速率为正，d[0] 占位
    spec = BirthDeathSpec((1.0, 1.0), (0.0, 1.0, 2.0), 2)
    assert spec.d == (0.0, 1.0, 2.0)
    with pytest.raises(ModelError):
        BirthDeathSpec((1.0,), (0.0, 1.0), 1)
    with pytest.raises(ModelError):
        BirthDeathSpec((1.0, 0.0), (0.0, 1.0, 1.0), 2)


def test_condition_report_requires_witnesses() -> None:  # 说明：非 Inconclusive 需见证量
    with pytest.raises(ModelError):
        ConditionReport("lyapunov", Verdict.HOLDS)
    assert ConditionReport("lyapunov", Verdict.INCONCLUSIVE).witnesses == {}


def test_run_config_provenance_omits_workers_and_output() -> None:  # 说明：provenance 不含线程数
    a = RunConfig("rate", "m.json", workers=1, output_path="a.json", options={"b": 1, "a": 2})
    b = RunConfig("rate", "m.json", workers=8, output_path="b.json", options={"a": 2, "b": 1})
    assert a.provenance() == b.provenance()
    assert list(a.provenance()["options"]) == ["a", "b"]


def test_as_state_function_accepts_sequences() -> None:  # 说明：映射或序列
    space = StateSpace(("a", "b"))
    assert as_state_function([1, 2], space) == {"a": 1.0, "b": 2.0}
    assert as_state_function({"a": 3.0}, space) == {"a": 3.0, "b": 0.0}
    with pytest.raises(InvalidArgument):
        as_state_function([1.0], space)
