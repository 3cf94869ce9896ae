# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""测试生灭链模型、级数诊断与条件检查。"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import numpy as np
import pytest  # 说明：测试框架
from scipy import stats  # 说明：泊松分布作为独立参照

from flow_ldp.ldp_birth_death import (
    BOUNDED,
    FLAT,
    GROWING,
    birth_death_kernel,
    check_log_sobolev_bd,
    check_lyapunov,
    check_moments,
    closed_form_invariant,
    constant_rates,
    counterexample_rates,
    dirichlet_form,
    doubling_rates,
    geometric_u,
    non_tightness_bound,
    non_tightness_demo,
    normalized_drift,
    poisson_rates,
    sequence_trend,
    series_diagnostics,
    strong_topology_counterexample,
)
from flow_ldp.ldp_core import divergence, invariant_measure, stationary_flow
from flow_ldp.ldp_errors import InvalidArgument, ModelError
from flow_ldp.ldp_models import RateKernel, Verdict
from flow_ldp.ldp_rate import rate


def test_poisson_invariant_measure() -> None:  # 说明：闭式 π 与 scipy 的泊松概率一致
    pi = closed_form_invariant(poisson_rates(1.0, 100))
    expected = stats.poisson.pmf(np.arange(101), 1.0)
    expected = expected / expected.sum()
    assert np.allclose([pi.get(k) for k in range(101)], expected, rtol=1e-9, atol=0.0)


def test_geometric_drift_formula() -> None:  # 说明：u(k)=A^k 时 v(k)=d_k(1−1/A)+b_k(1−A)
    spec = poisson_rates(1.0, 100)
    v = normalized_drift(birth_death_kernel(spec), geometric_u(4.0))
    for k in range(1, 100):
        expected = spec.d[k] * (1.0 - 1.0 / 4.0) + spec.b[k] * (1.0 - 4.0)
        assert v[k] == pytest.approx(expected, rel=1e-12, abs=1e-12)
    with pytest.raises(InvalidArgument):
        geometric_u(0.0)


def test_lyapunov_holds_for_poisson_with_geometric_u() -> None:  # 说明：见证量 σ=1/2，C=3.5
    report = check_lyapunov(birth_death_kernel(poisson_rates(1.0, 100)), geometric_u(4.0))
    assert report.verdict is Verdict.HOLDS
    assert report.trend == GROWING
    assert report.witnesses["sigma"] == 0.5
    assert report.witnesses["C"] == pytest.approx(3.5)


def test_lyapunov_fails_for_constant_u() -> None:  # 说明：u≡1 时 v≡0，只有 σ=0
    report = check_lyapunov(birth_death_kernel(poisson_rates(1.0, 100)), lambda k: 1.0)
    assert report.verdict is Verdict.FAILS
    assert report.witnesses["sigma"] == 0.0
    assert report.witnesses["C"] == 0.0


def test_lyapunov_accepts_function_sequence() -> None:  # 说明：序列 u_n 取最后一个
    kernel = birth_death_kernel(poisson_rates(1.0, 40))
    report = check_lyapunov(kernel, [geometric_u(2.0), geometric_u(4.0)])
    assert report.notes and report.notes[0].startswith("sequence_last_change=")
    with pytest.raises(InvalidArgument):
        check_lyapunov(kernel, [])


def test_log_sobolev_fails_for_poisson_but_moments_hold() -> None:  # 说明：判据增长，但指数矩在整个网格上有限
    spec = poisson_rates(1.0, 100)
    report = check_log_sobolev_bd(spec)
    assert report.verdict is Verdict.FAILS
    assert report.trend == GROWING
    moments = check_moments(birth_death_kernel(spec), closed_form_invariant(spec))
    assert moments.verdict is Verdict.HOLDS
    assert moments.witnesses["sigma"] == 4.0


def test_log_sobolev_holds_for_doubling_rates() -> None:  # 说明：π(k)=2^{−k−1} 的链满足判据
    report = check_log_sobolev_bd(doubling_rates(100))
    assert report.verdict is Verdict.HOLDS
    assert report.trend == BOUNDED
    assert report.witnesses["moment_sigma"] == 0.125
    assert report.witnesses["remainder"] > 0.0


def test_sequence_trend_labels() -> None:  # 说明：三种趋势标签
    assert sequence_trend(list(range(20))) == GROWING
    assert sequence_trend([5.0] + [1.0] * 19) == BOUNDED
    assert sequence_trend(list(range(15)) + [20, 19, 21, 18, 22]) == FLAT
    with pytest.raises(InvalidArgument):
        sequence_trend([1.0, 2.0])


def test_series_diagnostics_constant_rates() -> None:  # 说明：几何 π 下各级数的部分和与趋势
    diag = series_diagnostics(constant_rates(1.0, 2.0, 50))
    assert diag.normalization_trend == BOUNDED
    assert diag.explosion_trend == GROWING
    assert diag.exit_trend == BOUNDED
    assert diag.normalization_partial[-1] == pytest.approx(2.0, rel=1e-12)
    Z = 2.0 - 2.0 ** -50  # 说明：π(k)=2^{−k}/Z，故 1/(π(k)b_k)=Z·2^k
    assert diag.reciprocal_trend == GROWING
    assert len(diag.reciprocal_partial) == 50
    assert diag.reciprocal_partial[0] == pytest.approx(Z, rel=1e-12)
    assert diag.reciprocal_partial[-1] == pytest.approx(Z * (2.0**50 - 1.0), rel=1e-9)


def test_dirichlet_form_two_state(two_state: RateKernel) -> None:  # 说明：E(f,f)=½Σπ(x)r(x,y)(f(y)−f(x))²
    pi = invariant_measure(two_state)
    assert dirichlet_form(two_state, pi, {0: 0.0, 1: 1.0}) == pytest.approx(0.5)


def test_non_tightness_bound_and_demo() -> None:  # 说明：解析下界与蒙特卡洛频率
    assert non_tightness_bound(1.0, 2.0, 1.0) == pytest.approx((1.0 / 3.0) ** 5)
    report = non_tightness_demo(1.0, 2.0, 1.0, paths=2000, seed=0)
    assert report.paths == 2000 and report.ci_high >= report.bound
    assert non_tightness_demo(1.0, 2.0, 1.0).hits == 0
    with pytest.raises(InvalidArgument):
        non_tightness_demo(2.0, 2.0, 1.0)


def test_strong_topology_sweep() -> None:  # 说明：Q^n 无散度、速率有限，且与 Q^π 距离不趋于零
    for n in range(2, 31):
        mu, Q = strong_topology_counterexample(n)
        spec = counterexample_rates(n + 10)
        kernel = birth_death_kernel(spec)
        assert divergence(Q, kernel.states).max_abs() <= 1e-12
        assert rate(mu, Q, kernel).value.finite
        if n >= 10:
            q_pi = stationary_flow(closed_form_invariant(spec), kernel)
            assert Q.distance(q_pi) >= 0.9
    with pytest.raises(InvalidArgument):
        strong_topology_counterexample(1)
    with pytest.raises(ModelError):
        strong_topology_counterexample(5, K=5)
