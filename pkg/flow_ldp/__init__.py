# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
flow_ldp：连续时间马尔可夫链经验测度与经验流的联合大偏差计算库。

常用入口在这里统一导出；命令行见 flow_ldp.ldp_cli。
"""  # 说明：包级说明

from .ldp_birth_death import (  # 说明：生灭链模型与条件检查
    birth_death_kernel,
    check_log_sobolev_bd,
    check_lyapunov,
    check_moments,
    closed_form_invariant,
    non_tightness_demo,
    strong_topology_counterexample,
)
from .ldp_config import LIBRARY_VERSION, Tolerances, get_default_config, load_config  # 说明：配置
from .ldp_core import divergence, invariant_measure, stationary_flow  # 说明：核心运算
from .ldp_cycles import decompose, decompose_truncated, make_connected, reconstruct, truncate_pair  # 说明：环分解
from .ldp_errors import FlowLdpError, logger  # 说明：异常与日志
from .ldp_events import parse_event  # 说明：事件表达式
from .ldp_models import (  # 说明：数据结构
    BirthDeathSpec,
    EmpiricalPair,
    ExtendedReal,
    Flow,
    Measure,
    ProbabilityMeasure,
    RateKernel,
    StateSpace,
    TestPair,
    Trajectory,
)
from .ldp_rate import affine_decompose, phi_term, rate, rate_sup_check, rate_variational  # 说明：速率函数
from .ldp_simulate import empirical_flow, empirical_measure, empirical_pair, sample_path, sample_paths  # 说明：模拟
from .ldp_tilting import importance_estimate, log_rn_weight, tilted_kernel, willy_bounds_check  # 说明：指数倾斜

__version__ = LIBRARY_VERSION  # 说明：包版本

__all__ = [
    "BirthDeathSpec",
    "EmpiricalPair",
    "ExtendedReal",
    "Flow",
    "FlowLdpError",
    "Measure",
    "ProbabilityMeasure",
    "RateKernel",
    "StateSpace",
    "TestPair",
    "Tolerances",
    "Trajectory",
    "__version__",
    "affine_decompose",
    "birth_death_kernel",
    "check_log_sobolev_bd",
    "check_lyapunov",
    "check_moments",
    "closed_form_invariant",
    "decompose",
    "decompose_truncated",
    "divergence",
    "empirical_flow",
    "empirical_measure",
    "empirical_pair",
    "get_default_config",
    "importance_estimate",
    "invariant_measure",
    "load_config",
    "log_rn_weight",
    "logger",
    "make_connected",
    "non_tightness_demo",
    "parse_event",
    "phi_term",
    "rate",
    "rate_sup_check",
    "rate_variational",
    "reconstruct",
    "sample_path",
    "sample_paths",
    "stationary_flow",
    "strong_topology_counterexample",
    "tilted_kernel",
    "truncate_pair",
    "willy_bounds_check",
]
