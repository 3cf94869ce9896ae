# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件负责配置读取/写入与默认值管理，所有容差与可变参数都集中在这里。
"""  # 说明：文件级说明，强调配置集中管理

from __future__ import annotations  # 说明：允许前向引用类型标注

import json  # 说明：配置文件为 JSON 格式
import os  # 说明：读取线程数环境变量
from dataclasses import dataclass  # 说明：容差结构使用 dataclass
from pathlib import Path  # 说明：路径处理
from typing import Any, Dict, List, Optional  # 说明：类型标注所需

from .ldp_errors import ConfigError  # 说明：引入统一配置异常

LIBRARY_VERSION = "0.1.0"  # 说明：库版本号，写入输出文件的溯源信息
WORKERS_ENV = "FLOW_LDP_WORKERS"  # 说明：默认线程数的环境变量名


def get_default_config() -> Dict[str, Any]:  # 说明：提供默认配置
    return {  # 说明：集中返回默认值字典
        "config_version": 1,  # 说明：配置版本号，方便未来迁移
        "tolerances": {  # 说明：数值容差
            "mass": 1e-9,  # 说明：概率测度归一化容差 τ_mass
            "linear": 1e-9,  # 说明：线性求解残差（相对）τ_lin
            "divergence": 1e-9,  # 说明：散度为零判定，乘以 max(1,‖Q‖)
            "sup_gap": 1e-9,  # 说明：变分上确界间隙 τ_sup
            "sum": 1e-12,  # 说明：仿射分解可加性 τ_sum
            "f_max": 40.0,  # 说明：闭式最优 F 的截断幅度
            "cycle_zero": 1e-14,  # 说明：环分解“已清零”阈值（乘以 ‖Q‖）
            "cycle_noise": 1e-12,  # 说明：环分解舍入噪声上限（乘以 ‖Q‖）
        },
        "simulation": {  # 说明：模拟相关
            "seed": 0,  # 说明：默认随机种子
            "workers": 1,  # 说明：并行线程数（环境变量可覆盖）
            "strict_absorption": False,  # 说明：吸收时是否抛出异常
        },
        "estimation": {  # 说明：重要性采样相关
            "pilot_fraction": 0.1,  # 说明：试探批次占比 N/10
            "paths": 2000,  # 说明：每个时间窗的路径数
            "horizons": [50.0, 100.0, 200.0],  # 说明：默认时间窗列表
        },
        "checks": {  # 说明：条件检查相关
            "sigma_exponents": [-10, 3],  # 说明：σ 网格 2^{-10}..2^{3}
            "tail_fraction": 0.25,  # 说明：趋势检测使用末尾四分之一
            "lyapunov_base": 4.0,  # 说明：u(k)=A^k 的默认 A
        },
        "output": {  # 说明：输出相关
            "top_k": 5,  # 说明：rate 子命令列出的主要边数
        },
    }


def merge_config(defaults: Dict[str, Any], current: Dict[str, Any]) -> Dict[str, Any]:  # 说明：递归合并配置
    merged: Dict[str, Any] = {}  # 说明：准备合并后的新字典
    for key, value in defaults.items():  # 说明：遍历默认值
        if key in current:  # 说明：当前配置存在该键
            if isinstance(value, dict) and isinstance(current[key], dict):  # 说明：字典则递归合并
                merged[key] = merge_config(value, current[key])  # 说明：递归合并子字典
            else:  # 说明：非字典直接覆盖
                merged[key] = current[key]  # 说明：采用当前配置值
        else:  # 说明：当前配置缺失该键
            merged[key] = value  # 说明：使用默认值
    for key, value in current.items():  # 说明：保留当前配置中默认值没有的字段
        if key not in merged:  # 说明：仅添加不存在的键
            merged[key] = value  # 说明：保留用户自定义字段
    return merged  # 说明：返回合并结果


def load_config(path: Optional[str] = None) -> Dict[str, Any]:  # 说明：从 JSON 文件读取配置
    defaults = get_default_config()  # 说明：获取默认配置
    if not path:  # 说明：未指定文件时只用默认值
        return defaults  # 说明：直接返回默认配置
    file_path = Path(path)  # 说明：构造路径对象
    if not file_path.exists():  # 说明：检查文件是否存在
        raise ConfigError(f"配置文件不存在: {path}")  # 说明：抛出配置异常
    try:  # 说明：解析 JSON
        current = json.loads(file_path.read_text(encoding="utf-8"))  # 说明：读取当前配置
    except json.JSONDecodeError as exc:  # 说明：JSON 语法错误
        raise ConfigError(f"配置文件不是合法 JSON: {path}: {exc}") from exc  # 说明：包装为配置异常
    if not isinstance(current, dict):  # 说明：顶层必须为对象
        raise ConfigError("配置文件顶层必须是 JSON 对象")  # 说明：抛出配置异常
    return merge_config(defaults, current)  # 说明：合并默认与当前配置


def save_config(path: str, config: Dict[str, Any]) -> None:  # 说明：写入配置到 JSON 文件
    if not path:  # 说明：安全检查
        raise ConfigError("path 不能为空")  # 说明：抛出配置异常
    if not isinstance(config, dict):  # 说明：安全检查，确保配置为字典
        raise ConfigError("config 必须是 dict")  # 说明：抛出配置异常
    Path(path).write_text(json.dumps(config, ensure_ascii=False, indent=2, sort_keys=True), encoding="utf-8")  # 说明：写入 JSON


def resolve_workers(config: Dict[str, Any], override: Optional[int] = None) -> int:  # 说明：确定并行线程数
    if override is not None:  # 说明：命令行参数优先
        workers = override
    elif os.environ.get(WORKERS_ENV):  # 说明：其次是环境变量
        try:
            workers = int(os.environ[WORKERS_ENV])  # 说明：解析整数
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV} 必须是整数") from exc
    else:  # 说明：最后是配置文件
        workers = int(config.get("simulation", {}).get("workers", 1))
    if workers < 1:  # 说明：至少一个线程
        raise ConfigError("workers 必须 >= 1")
    return workers


def sigma_grid(config: Optional[Dict[str, Any]] = None) -> List[float]:  # 说明：σ 对数网格 {2^a..2^b}
    cfg = config if config is not None else get_default_config()
    low, high = cfg.get("checks", {}).get("sigma_exponents", [-10, 3])
    return [2.0 ** k for k in range(int(low), int(high) + 1)]


@dataclass(frozen=True)
class Tolerances:  # 说明：数值模块共享的容差集合
    mass: float = 1e-9
    linear: float = 1e-9
    divergence: float = 1e-9
    sup_gap: float = 1e-9
    sum: float = 1e-12
    f_max: float = 40.0
    cycle_zero: float = 1e-14
    cycle_noise: float = 1e-12

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "Tolerances":  # 说明：从配置字典构造
        block = config.get("tolerances", {})  # 说明：取容差子字典
        if not isinstance(block, dict):
            raise ConfigError("tolerances 必须是对象")
        values: Dict[str, float] = {}
        for name in cls.__dataclass_fields__:  # 说明：逐个字段读取
            if name in block:
                try:
                    values[name] = float(block[name])
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"容差 {name} 不是数值") from exc
                if values[name] <= 0:  # 说明：容差必须为正
                    raise ConfigError(f"容差 {name} 必须为正")
        return cls(**values)

    def divergence_for(self, norm: float) -> float:  # 说明：τ_div = tol·max(1,‖Q‖)
        return self.divergence * max(1.0, norm)


DEFAULT_TOLERANCES = Tolerances()  # 说明：模块级默认容差
