# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""测试轨道模拟、经验对与批量统计。"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import math
from typing import Callable

import numpy as np
import pytest  # 说明：测试框架
from scipy import stats  # 说明：KS 检验与泊松分布

from flow_ldp.ldp_errors import AbsorbedBeforeHorizon, InvalidArgument, ModelError, UnknownEdge
from flow_ldp.ldp_models import RateKernel, Trajectory
from flow_ldp.ldp_simulate import (
    batch_statistics,
    continuity_residual,
    default_observables,
    empirical_flow,
    empirical_measure,
    empirical_pair,
    jump_counts,
    make_rng,
    martingale_residual,
    occupation_times,
    periodize_flow,
    sample_path,
    sample_paths,
)


def test_same_seed_and_index_reproduce_path(three_state: RateKernel) -> None:  # 说明：(seed,index) 决定轨道
    a = sample_path(three_state, "a", 20.0, seed=11, index=3)
    b = sample_path(three_state, "a", 20.0, seed=11, index=3)
    c = sample_path(three_state, "a", 20.0, seed=11, index=4)
    assert a == b
    assert a.jumps != c.jumps


def test_batch_independent_of_workers_and_offset(three_state: RateKernel) -> None:  # 说明：批量结果与线程数无关
    serial = sample_paths(three_state, "a", 5.0, seed=1, n=12, workers=1)
    threaded = sample_paths(three_state, "a", 5.0, seed=1, n=12, workers=4)
    assert serial == threaded
    shifted = sample_paths(three_state, "a", 5.0, seed=1, n=3, offset=5)
    assert shifted[0] == sample_path(three_state, "a", 5.0, seed=1, index=5)


def test_bad_arguments(two_state: RateKernel) -> None:  # 说明：非法起点、时间窗与种子
    with pytest.raises(ModelError):
        sample_path(two_state, 7, 1.0, seed=0)
    with pytest.raises(InvalidArgument):
        sample_path(two_state, 0, -1.0, seed=0)
    with pytest.raises(InvalidArgument):
        make_rng(-1)


def test_hand_built_trajectory_statistics() -> None:  # 说明：手工轨道的逗留时间与跳跃数
    traj = Trajectory(0, ((1.0, 1), (3.0, 0), (3.5, 1)), 4.0)
    assert occupation_times(traj) == {0: 1.5, 1: 2.5}
    assert jump_counts(traj) == {(0, 1): 2, (1, 0): 1}
    mu = empirical_measure(traj)
    assert mu.get(0) == pytest.approx(0.375)
    Q = empirical_flow(traj)
    assert Q.get(0, 1) == 0.5 and Q.get(1, 0) == 0.25


def test_zero_horizon_has_no_empirical_pair() -> None:  # 说明：T=0 无经验对
    with pytest.raises(InvalidArgument):
        empirical_pair(Trajectory(0, (), 0.0))


def test_continuity_equation_holds_pathwise(three_state: RateKernel) -> None:  # 说明：逐轨道的连续性方程
    for path in sample_paths(three_state, "a", 3.0, seed=5, n=1000):
        assert continuity_residual(path).is_zero()


def test_periodized_flow_differs_by_one_jump(three_state: RateKernel) -> None:  # 说明：周期化只多一次回跳
    T = 7.0
    for path in sample_paths(three_state, "b", T, seed=9, n=200):
        plain, periodic = empirical_flow(path), periodize_flow(path)
        changed = [e for e in set(plain.weights) | set(periodic.weights) if plain.get(*e) != periodic.get(*e)]
        if path.final_state == path.initial:
            assert changed == []
        else:
            assert changed == [(path.final_state, path.initial)]
            assert periodic.get(*changed[0]) - plain.get(*changed[0]) == pytest.approx(1.0 / T, rel=1e-12)


def test_absorbing_state_pads_or_raises() -> None:  # 说明：吸收后补齐或报错
    kernel = RateKernel.build([0, 1], {(0, 1): 5.0})
    path = sample_path(kernel, 0, 100.0, seed=0)
    assert path.absorbed and path.final_state == 1
    assert empirical_measure(path).get(1) > 0.9
    with pytest.raises(AbsorbedBeforeHorizon):
        sample_path(kernel, 0, 100.0, seed=0, strict=True)


def test_empirical_measure_approaches_invariant(two_state: RateKernel) -> None:  # 说明：长时间下 μ_T→π
    path = sample_path(two_state, 0, 2000.0, seed=2)
    assert abs(empirical_measure(path).get(0) - 0.5) < 0.05


def test_jump_martingale_has_mean_zero(two_state: RateKernel) -> None:  # 说明：跳跃鞅均值为零
    values = np.array([martingale_residual(p, (0, 1), two_state) for p in sample_paths(two_state, 0, 10.0, seed=4, n=2000)])
    stderr = values.std(ddof=1) / math.sqrt(len(values))
    assert abs(values.mean()) < 4.0 * stderr
    with pytest.raises(UnknownEdge):
        martingale_residual(Trajectory(0, (), 1.0), (0, 0), two_state)


def _jittered_poisson_cdf(lam: float) -> Callable[[np.ndarray], np.ndarray]:  # 说明：N+U 的连续分布函数，U~Uniform(0,1) 与 N 独立
    def cdf(x: np.ndarray) -> np.ndarray:
        k = np.floor(x)
        return stats.poisson.cdf(k - 1, lam) + (x - k) * stats.poisson.pmf(k, lam)

    return cdf


def test_jump_count_dominated_by_poisson_at_max_rate(three_state: RateKernel) -> None:  # 说明：跳跃数随机地不超过 Poisson(T·r̄)
    T = 2.0
    r_max = max(three_state.exit_rate(x) for x in three_state.states.labels)
    counts = np.array([len(p.jumps) for p in sample_paths(three_state, "a", T, seed=12, n=2000)], dtype=float)
    jittered = counts + np.random.default_rng(0).uniform(size=len(counts))
    # 说明：原假设 F ≥ G 即跳跃数随机地不大于 Poisson(T·r̄)
    assert stats.kstest(jittered, _jittered_poisson_cdf(T * r_max), alternative="less").pvalue > 0.01
    # 说明：出口速率都不小于 1，与 Poisson(T) 比较应被拒绝
    assert stats.kstest(jittered, _jittered_poisson_cdf(T * 1.0), alternative="less").pvalue < 0.01


def test_batch_statistics_rows(two_state: RateKernel) -> None:  # 说明：汇总行的名称与取值
    assert default_observables(two_state) == ["mu[0]", "mu[1]", "Q[0,1]", "Q[1,0]"]
    rows = batch_statistics(two_state, 0, 50.0, seed=3, n=200, observables=["mu[0]", "Q[0,1] - Q[1,0]"])
    names = [row["observable"] for row in rows]
    assert names == ["mean:mu[0]", "stderr:mu[0]", "mean:Q[0,1] - Q[1,0]", "stderr:Q[0,1] - Q[1,0]", "absorbed_paths"]
    assert abs(rows[0]["value"] - 0.5) < 0.05
    assert abs(rows[2]["value"]) <= 1.0 / 50.0 + 1e-12
    assert rows[-1]["value"] == 0
    with pytest.raises(InvalidArgument):
        batch_statistics(two_state, 0, 1.0, seed=0, n=0)
