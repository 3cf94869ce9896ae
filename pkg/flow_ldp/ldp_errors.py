# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
本文件提供统一的异常与日志接口，保证错误处理集中在一处，数值模块只调用这里的能力。
"""  # 说明：文件级说明，强调职责边界

from __future__ import annotations  # 说明：允许使用前向引用类型标注

import logging  # 说明：使用标准库日志模块统一输出


class FlowLdpError(Exception):  # 说明：库的基础异常类型，统一继承入口
    """库统一异常基类。"""  # 说明：所有对外抛出的异常都从这里派生

    exit_code = 1  # 说明：命令行退出码，子类按类别覆盖


class ConfigError(FlowLdpError):  # 说明：配置相关异常
    """配置读取、合并或命令行参数不合法时的异常。"""

    exit_code = 2  # 说明：配置错误对应退出码 2


class ModelError(FlowLdpError):  # 说明：模型校验相关异常
    """速率核、测度、流等输入不满足不变量时的异常。"""

    exit_code = 3  # 说明：模型校验失败对应退出码 3


class InvalidArgument(ModelError, ValueError):  # 说明：参数越界（同时是 ValueError，方便调用方捕获）
    """函数前置条件不满足。"""


class UnknownEdge(ModelError):  # 说明：边不在 E 中
    """请求的有向边不是速率核中的正速率边。"""


class UnsupportedFlow(ModelError):  # 说明：流在 μ=0 处非零
    """流的支撑超出了测度或速率核允许的范围。"""


class NonzeroDivergence(ModelError):  # 说明：散度不为零
    """需要无散度流的操作收到了散度非零的流。"""


class EmptyTruncation(ModelError):  # 说明：截断集合测度为零
    """截断后的状态集合没有测度质量。"""


class DisconnectedAmbient(ModelError):  # 说明：环境图中找不到连接路径
    """在 (V,E) 中无法连接两个支撑分量。"""


class InfiniteRate(ModelError):  # 说明：速率函数为 +∞
    """需要有限速率函数值的操作收到了 I=+∞ 的输入。"""


class NoUniqueInvariant(ModelError):  # 说明：不可约性失败
    """链不可约性不成立，不变测度不唯一。"""


class EventParseError(ModelError):  # 说明：事件表达式解析失败
    """事件表达式语法错误。"""


class NumericalFailure(FlowLdpError):  # 说明：数值求解失败
    """线性方程组奇异、特征值求解失败等数值问题。"""

    exit_code = 4  # 说明：数值失败对应退出码 4


class SimulationError(FlowLdpError):  # 说明：模拟相关异常
    """轨道模拟或重要性采样时的异常。"""

    exit_code = 4  # 说明：按数值失败处理


class AbsorbedBeforeHorizon(SimulationError):  # 说明：轨道在时间窗前被吸收
    """出口速率为零的状态提前吸收了轨道。"""


class DegenerateTilt(SimulationError):  # 说明：倾斜链无法到达事件
    """试探批次中倾斜链一次也没有命中事件。"""


def exit_code_for(exc: BaseException) -> int:  # 说明：异常到退出码的映射
    if isinstance(exc, FlowLdpError):  # 说明：库内异常按类别取码
        return exc.exit_code  # 说明：返回类属性
    return 1  # 说明：未知异常统一返回 1


class AppLogger:  # 说明：统一日志封装，便于后续替换输出方式
    """统一日志封装。"""  # 说明：简要说明用途

    def __init__(self, name: str = "flow_ldp") -> None:  # 说明：初始化日志对象
        self._logger = logging.getLogger(name)  # 说明：获取标准库 logger 实例
        self._logger.setLevel(logging.INFO)  # 说明：默认设置为 INFO 级别
        if not self._logger.handlers:  # 说明：避免重复添加 handler
            handler = logging.StreamHandler()  # 说明：输出到标准错误
            formatter = logging.Formatter("[%(levelname)s] %(message)s")  # 说明：简单易读格式
            handler.setFormatter(formatter)  # 说明：把格式器绑定到 handler
            self._logger.addHandler(handler)  # 说明：将 handler 注册到 logger

    def set_level(self, level: int) -> None:  # 说明：切换日志级别（命令行 --verbose 使用）
        self._logger.setLevel(level)

    def debug(self, message: str) -> None:  # 说明：输出调试信息
        self._logger.debug(message)

    def info(self, message: str) -> None:  # 说明：输出普通信息
        self._logger.info(message)  # 说明：调用标准库 info

    def warning(self, message: str) -> None:  # 说明：输出警告信息
        self._logger.warning(message)  # 说明：调用标准库 warning

    def error(self, message: str) -> None:  # 说明：输出错误信息
        self._logger.error(message)  # 说明：调用标准库 error


logger = AppLogger()  # 说明：提供一个模块级默认 logger，供全局使用
