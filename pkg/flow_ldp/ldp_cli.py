# -*- coding: utf-8 -*-  # 说明：显式声明源码编码，避免中文注释读取异常
"""
命令行入口：解析参数、组装 RunConfig、按子命令调度并写出 JSON/CSV。

子命令：simulate、rate、decompose、tilt-estimate（别名 estimate）、check、counterexample。
退出码：0 成功，2 配置/参数错误，3 模型校验失败，4 数值失败。
"""  # 说明：文件级说明

from __future__ import annotations  # 说明：允许前向引用类型标注

import argparse  # 说明：命令行解析
import logging  # 说明：--verbose 切换日志级别
import sys  # 说明：标准输出
from dataclasses import dataclass, field  # 说明：子命令结果结构
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple  # 说明：类型标注所需

from .ldp_birth_death import (  # 说明：生灭链模型与条件检查
    birth_death_kernel,
    check_log_sobolev_bd,
    check_lyapunov,
    check_moments,
    closed_form_invariant,
    counterexample_rates,
    geometric_u,
    non_tightness_demo,
    series_diagnostics,
    strong_topology_counterexample,
)
from .ldp_config import Tolerances, load_config, resolve_workers, sigma_grid  # 说明：配置
from .ldp_core import divergence, invariant_measure, stationary_flow  # 说明：核心运算
from .ldp_cycles import cycle_mass, decompose, decompose_truncated, reconstruct  # 说明：环分解
from .ldp_errors import ConfigError, FlowLdpError, InvalidArgument, ModelError, exit_code_for, logger  # 说明：统一异常与日志
from .ldp_events import parse_event  # 说明：事件表达式
from .ldp_io import (  # 说明：读写
    birth_death_from_dict,
    condition_report_to_dict,
    csv_document,
    decomposition_to_dict,
    dump_json,
    measure_from_dict,
    model_from_dict,
    pair_to_dict,
    rate_report_to_dict,
    read_flow,
    read_json,
    read_model,
    read_pair,
    resolve_label,
    series_diagnostics_to_dict,
    trajectory_rows,
    trajectory_to_dict,
    write_text,
)
from .ldp_models import ConditionReport, Flow, ProbabilityMeasure, RateKernel, RunConfig, State, StateSpace  # 说明：数据结构
from .ldp_rate import rate  # 说明：速率函数
from .ldp_simulate import batch_statistics, sample_path  # 说明：模拟
from .ldp_tilting import auto_tilt, decay_slope, estimate_over_horizons  # 说明：倾斜估计

PROG = "flow-ldp"  # 说明：命令名
DEFAULT_FORMAT = {  # 说明：各子命令的默认输出格式
    "simulate": "csv",
    "rate": "json",
    "decompose": "json",
    "tilt-estimate": "csv",
    "check": "json",
    "counterexample": "csv",
}
_COMMON = ("config", "workers", "verbose", "output", "output_format", "seed", "model", "horizons", "paths", "subcommand")  # 说明：不进入 options 的公共参数
_CONDITIONS = {"lyapunov": "lyapunov", "logsobolev": "log-sobolev", "log-sobolev": "log-sobolev", "moments": "exponential-moment"}


@dataclass
class CommandResult:  # 说明：子命令的输出，JSON 载荷与 CSV 行二选一写出
    payload: Dict[str, Any]
    header: Tuple[str, ...] = ()
    rows: List[Dict[str, Any]] = field(default_factory=list)


# ---------------------------------------------------------------- 参数解析


def _float_list(text: str) -> List[float]:  # 说明："50,100,200" -> [50.0, 100.0, 200.0]
    try:
        values = [float(part) for part in text.replace(";", ",").split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"不是逗号分隔的数字列表: {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("列表不能为空")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="", help="JSON 配置文件（与默认值递归合并）")
    common.add_argument("--workers", type=int, default=None, help="并行线程数，覆盖配置与环境变量")
    common.add_argument("--verbose", "-v", action="store_true", help="输出调试日志")
    common.add_argument("--output", "-o", default="", help="输出文件，缺省写到标准输出")
    common.add_argument("--seed", type=int, default=None, help="随机种子")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output_format", action="store_const", const="json", help="输出 JSON")
    fmt.add_argument("--csv", dest="output_format", action="store_const", const="csv", help="输出 CSV")

    parser = argparse.ArgumentParser(prog=PROG, description="CTMC 经验测度与经验流的联合大偏差计算")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("simulate", parents=[common], help="模拟轨道并汇总观测量")
    p.add_argument("--model", required=True)
    p.add_argument("--x0", default=None, help="初始状态，缺省取第一个状态")
    p.add_argument("--T", "--T-list", dest="horizons", type=_float_list, default=None, help="时间窗（可逗号分隔多个）")
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--observable", dest="observables", action="append", default=None, help="观测表达式，可重复")
    p.add_argument("--trajectory", action="store_true", help="只输出一条轨道")

    p = sub.add_parser("rate", parents=[common], help="计算 I(μ,Q)")
    p.add_argument("--model", required=True)
    p.add_argument("--pair", default=None, help="pair JSON 文件")
    p.add_argument("--measure", default=None, help="measure JSON 文件")
    p.add_argument("--flow", default=None, help="flow JSON 文件")
    p.add_argument("--stationary", action="store_true", help="在 (π,Q^π) 上求值")
    p.add_argument("--top-k", dest="top_k", type=int, default=None)

    p = sub.add_parser("decompose", parents=[common], help="无散度流的环分解")
    p.add_argument("--flow", required=True)
    p.add_argument("--model", default=None, help="可选，提供状态顺序")
    p.add_argument("--keep", default=None, help="逗号分隔的截断集合，给出时做幽灵顶点分解")

    p = sub.add_parser("tilt-estimate", aliases=["estimate"], parents=[common], help="指数倾斜重要性采样")
    p.add_argument("--model", required=True)
    p.add_argument("--event", required=True, help='例如 "mu[0] >= 0.7"')
    p.add_argument("--T-list", "--T", dest="horizons", type=_float_list, default=None)
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--tilt", default="auto", help="auto 或 pair JSON 文件")
    p.add_argument("--x0", default=None)

    p = sub.add_parser("check", parents=[common], help="截断上的条件检查")
    p.add_argument("--model", required=True)
    p.add_argument("--condition", required=True, choices=sorted(_CONDITIONS))
    p.add_argument("--u", default=None, help="geometric:A、geometric:A1,A2,... 或 constant")
    p.add_argument("--no-remainder", dest="no_remainder", action="store_true", help="对数 Sobolev 判据不加截断余项")

    p = sub.add_parser("counterexample", parents=[common], help="强拓扑反例扫描或非指数紧示例")
    p.add_argument("--kind", choices=("strong", "nontight"), default="strong")
    p.add_argument("--n-max", dest="n_max", type=int, default=30)
    p.add_argument("--K", dest="truncation", type=int, default=None)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=2.0)
    p.add_argument("--T-list", "--T", dest="horizons", type=_float_list, default=None)
    p.add_argument("--paths", type=int, default=None)
    return parser


def _default_horizons(subcommand: str, settings: Mapping[str, Any]) -> List[float]:
    if subcommand == "tilt-estimate":
        return [float(t) for t in settings.get("estimation", {}).get("horizons", [50.0, 100.0, 200.0])]
    if subcommand == "counterexample":
        return [1.0, 2.0, 4.0]
    if subcommand == "simulate":
        return [10.0]
    return []  # 说明：rate、decompose、check 不用时间窗


def _default_paths(subcommand: str, settings: Mapping[str, Any]) -> int:
    if subcommand == "tilt-estimate":
        return int(settings.get("estimation", {}).get("paths", 2000))
    if subcommand == "simulate":
        return 100
    return 0  # 说明：counterexample 默认只给解析下界


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """把解析结果与配置文件合并成一次运行的 RunConfig。"""
    subcommand = "tilt-estimate" if args.subcommand == "estimate" else args.subcommand
    settings = load_config(args.config or None)
    seed = args.seed if args.seed is not None else int(settings.get("simulation", {}).get("seed", 0))
    horizons = list(args.horizons) if getattr(args, "horizons", None) else _default_horizons(subcommand, settings)
    if any(not t > 0.0 for t in horizons):
        raise ConfigError("时间窗必须为正")
    paths = args.paths if getattr(args, "paths", None) is not None else _default_paths(subcommand, settings)
    if paths < 0:
        raise ConfigError("--paths 不能为负")
    options = {k: v for k, v in sorted(vars(args).items()) if k not in _COMMON and v is not None}
    return RunConfig(
        subcommand=subcommand,
        model_path=getattr(args, "model", None) or "",
        seed=seed,
        horizons=horizons,
        paths=paths,
        output_path=args.output,
        output_format=args.output_format or DEFAULT_FORMAT[subcommand],
        workers=resolve_workers(settings, args.workers),
        options=options,
        settings=settings,
    )


# ---------------------------------------------------------------- 子命令


def _start_state(kernel: RateKernel, raw: object) -> State:
    if raw is None:
        return kernel.states.labels[0]
    return resolve_label(raw, kernel.states)


def _labels(text: str, states: StateSpace) -> List[State]:
    return [resolve_label(part.strip(), states) for part in text.split(",") if part.strip()]


def _cmd_simulate(config: RunConfig, tol: Tolerances) -> CommandResult:
    kernel = read_model(config.model_path)
    x0 = _start_state(kernel, config.options.get("x0"))
    if config.options.get("trajectory"):
        strict = bool(config.settings.get("simulation", {}).get("strict_absorption", False))
        traj = sample_path(kernel, x0, config.horizons[0], config.seed, 0, strict)
        return CommandResult(trajectory_to_dict(traj), ("time", "state"), trajectory_rows(traj))
    if config.paths < 1:
        raise ConfigError("simulate 至少需要一条路径")
    observables = config.options.get("observables")
    rows: List[Dict[str, Any]] = []
    for T in config.horizons:
        rows.extend(batch_statistics(kernel, x0, T, config.seed, config.paths, observables, config.workers))  # type: ignore[arg-type]
    return CommandResult({"type": "batch_statistics", "rows": rows}, ("seed", "T", "observable", "value"), rows)


def _cmd_rate(config: RunConfig, tol: Tolerances) -> CommandResult:
    kernel = read_model(config.model_path)
    opts = config.options
    mu: ProbabilityMeasure
    Q: Flow
    if opts.get("stationary"):
        mu = invariant_measure(kernel, tol)
        Q = stationary_flow(mu, kernel)
    elif opts.get("pair"):
        mu, Q = read_pair(str(opts["pair"]), kernel.states)
    elif opts.get("measure") and opts.get("flow"):
        mu = measure_from_dict(read_json(str(opts["measure"])), kernel.states)
        Q = read_flow(str(opts["flow"]), kernel.states)
    else:
        raise ConfigError("rate 需要 --pair、--measure 加 --flow，或 --stationary")
    top_k = int(opts.get("top_k") or config.settings.get("output", {}).get("top_k", 5))  # type: ignore[call-overload]
    report = rate(mu, Q, kernel, tol)
    logger.info(f"I(μ,Q) = {report.value.to_json()}，原因 {report.reason.value}")
    payload = rate_report_to_dict(report, kernel.states, top_k)
    rows: List[Dict[str, Any]] = [
        {"quantity": "value", "value": float(report.value)},
        {"quantity": "reason", "value": report.reason.value},
        {"quantity": "divergence_max", "value": report.divergence_max},
    ]
    rows.extend({"quantity": f"Q[{y},{z}]", "value": v} for y, z, v in payload["per_edge_terms"])
    return CommandResult(payload, ("quantity", "value"), rows)


def _cmd_decompose(config: RunConfig, tol: Tolerances) -> CommandResult:
    states: Optional[StateSpace] = read_model(config.model_path).states if config.model_path else None
    Q = read_flow(str(config.options["flow"]), states)
    space = states if states is not None else StateSpace.from_flow(Q)
    keep_text = config.options.get("keep")
    if keep_text:
        truncated = decompose_truncated(Q, _labels(str(keep_text), space), space, tol)
        d = truncated.inside
        payload = decomposition_to_dict(d)
        payload["escaping"] = [{"vertices": list(chain), "weight": w} for chain, w in truncated.escaping]
        payload["flux_out"] = truncated.flux_out
        payload["flux_in"] = truncated.flux_in
    else:
        d = decompose(Q, space, tol)
        payload = decomposition_to_dict(d)
        payload["reconstruction_error"] = reconstruct(d).sup_distance(Q)
    payload["norm"] = Q.norm
    payload["cycle_mass"] = cycle_mass(d)
    rows = [{"cycle": i, "vertices": " ".join(str(v) for v in c.vertices), "weight": w} for i, (c, w) in enumerate(d.terms)]
    logger.info(f"环分解：{len(d)} 个环，‖Q‖ = {Q.norm:.6g}")
    return CommandResult(payload, ("cycle", "vertices", "weight"), rows)


def _cmd_tilt_estimate(config: RunConfig, tol: Tolerances) -> CommandResult:
    kernel = read_model(config.model_path)
    event = parse_event(str(config.options["event"]), kernel.states)
    x0 = _start_state(kernel, config.options.get("x0"))
    if config.paths < 1:
        raise ConfigError("tilt-estimate 至少需要一条路径")
    tilt = str(config.options.get("tilt", "auto"))
    if tilt == "auto":
        mu_star, Q_star = auto_tilt(kernel, event, tol)
    else:
        mu_star, Q_star = read_pair(tilt, kernel.states)
    pilot = float(config.settings.get("estimation", {}).get("pilot_fraction", 0.1))  # type: ignore[union-attr]
    estimates = estimate_over_horizons(kernel, event, mu_star, Q_star, config.horizons, config.paths, config.seed, x0, config.workers, pilot, tol)
    rows = [
        {"T": e.horizon, "estimate": e.estimate, "stderr": e.std_error, "implied_rate": e.implied_rate, "hits": e.hits, "paths": e.paths}
        for e in estimates
    ]
    slope: Optional[float] = None
    if len(estimates) >= 2 and all(e.estimate > 0.0 for e in estimates):
        slope = decay_slope([e.horizon for e in estimates], [e.estimate for e in estimates])
        logger.info(f"−log P̂ 对 T 的斜率 {slope:.6g}")
    payload = {
        "type": "importance_estimates",
        "event": event.text,
        "tilt_rate": rate(mu_star, Q_star, kernel, tol).value,
        "decay_slope": slope,
        "rows": rows,
        "tilt": pair_to_dict(mu_star, Q_star, kernel.states),
    }
    return CommandResult(payload, ("T", "estimate", "stderr", "implied_rate", "hits", "paths"), rows)


def _lyapunov_functions(text: Optional[str], default_base: float) -> Any:
    """解析 --u：constant、geometric:A 或 geometric:A1,A2,...（函数序列 u_n）。"""
    if text is None:
        return geometric_u(default_base)
    if text == "constant":
        return lambda _x: 1.0
    kind, _, arg = text.partition(":")
    if kind != "geometric" or not arg:
        raise ConfigError(f"无法识别的 --u: {text!r}")
    try:
        bases = [float(part) for part in arg.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"--u 的底数必须是数字: {text!r}") from exc
    if len(bases) == 1:
        return geometric_u(bases[0])
    return [geometric_u(a) for a in bases]


def _cmd_check(config: RunConfig, tol: Tolerances) -> CommandResult:
    condition = _CONDITIONS[str(config.options["condition"])]
    checks = config.settings.get("checks", {})
    tail = float(checks.get("tail_fraction", 0.25))  # type: ignore[union-attr]
    grid = sigma_grid(config.settings)
    data = read_json(config.model_path)
    spec = birth_death_from_dict(data) if data.get("type") == "birth_death" else None
    report: ConditionReport
    if condition == "log-sobolev":
        if spec is None:
            raise ModelError("对数 Sobolev 判据需要 birth_death 模型")
        report = check_log_sobolev_bd(spec, not config.options.get("no_remainder"), grid, tail)
    else:
        if spec is not None:
            kernel, pi = birth_death_kernel(spec), closed_form_invariant(spec)
        else:
            kernel = model_from_dict(data)
            pi = invariant_measure(kernel, tol)
        if condition == "lyapunov":
            u = _lyapunov_functions(config.options.get("u"), float(checks.get("lyapunov_base", 4.0)))  # type: ignore[union-attr, arg-type]
            report = check_lyapunov(kernel, u, grid, tail)
        else:
            report = check_moments(kernel, pi, grid, tail)
    logger.info(f"{report.condition}: {report.verdict.value}（趋势 {report.trend}）")
    rows: List[Dict[str, Any]] = [
        {"key": "condition", "value": report.condition},
        {"key": "verdict", "value": report.verdict.value},
        {"key": "trend", "value": report.trend},
    ]
    rows.extend({"key": f"witness:{k}", "value": v} for k, v in report.witnesses.items())
    payload = condition_report_to_dict(report)
    if spec is not None:  # 说明：生灭链附带级数诊断
        try:
            series = series_diagnostics_to_dict(series_diagnostics(spec, tail))
        except InvalidArgument as exc:
            logger.debug(f"截断过短，跳过级数诊断: {exc}")
        else:
            payload["series"] = series
            rows.extend({"key": f"series:{name}", "value": series[name]["trend"]} for name in ("normalization", "explosion", "exit", "reciprocal"))
    return CommandResult(payload, ("key", "value"), rows)


def _cmd_counterexample(config: RunConfig, tol: Tolerances) -> CommandResult:
    opts = config.options
    if opts.get("kind", "strong") == "nontight":
        beta, delta = float(opts.get("beta", 1.0)), float(opts.get("delta", 2.0))  # type: ignore[arg-type]
        reports = [non_tightness_demo(beta, delta, T, config.paths, config.seed, config.workers) for T in config.horizons]
        rows = [
            {"T": r.horizon, "bound": r.bound, "paths": r.paths, "hits": r.hits, "frequency": r.frequency, "ci_low": r.ci_low, "ci_high": r.ci_high}
            for r in reports
        ]
        return CommandResult({"type": "non_tightness", "beta": beta, "delta": delta, "rows": rows}, ("T", "bound", "paths", "hits", "frequency", "ci_low", "ci_high"), rows)
    n_max = int(opts.get("n_max", 30))  # type: ignore[call-overload]
    K_opt = opts.get("truncation")
    rows = []
    for n in range(2, n_max + 1):
        K = int(K_opt) if K_opt is not None else n + 10  # type: ignore[call-overload]
        spec = counterexample_rates(K)
        kernel = birth_death_kernel(spec)
        mu, Q = strong_topology_counterexample(n, K)
        q_pi = stationary_flow(closed_form_invariant(spec), kernel)
        rows.append(
            {
                "n": n,
                "rate": float(rate(mu, Q, kernel, tol).value),
                "divergence_max": divergence(Q, kernel.states).max_abs(),
                "distance": Q.distance(q_pi),
            }
        )
    return CommandResult({"type": "strong_topology_sweep", "rows": rows}, ("n", "rate", "divergence_max", "distance"), rows)


COMMANDS: Dict[str, Callable[[RunConfig, Tolerances], CommandResult]] = {  # 说明：子命令调度表
    "simulate": _cmd_simulate,
    "rate": _cmd_rate,
    "decompose": _cmd_decompose,
    "tilt-estimate": _cmd_tilt_estimate,
    "check": _cmd_check,
    "counterexample": _cmd_counterexample,
}


# ---------------------------------------------------------------- 运行


def render(config: RunConfig, result: CommandResult) -> str:  # 说明：按输出格式渲染文本，均嵌入溯源信息
    provenance = config.provenance()
    if config.output_format == "csv":
        if not result.header:
            raise ConfigError(f"{config.subcommand} 不支持 CSV 输出")
        return csv_document(result.header, result.rows, provenance)
    return dump_json(result.payload, provenance)


def run(config: RunConfig) -> int:
    """执行一次运行，返回退出码；库异常记录日志后转成退出码。"""
    handler = COMMANDS.get(config.subcommand)
    if handler is None:
        logger.error(f"未知子命令 {config.subcommand!r}")
        return 2
    try:
        tol = Tolerances.from_config(config.settings)
        text = render(config, handler(config, tol))
        if config.output_path:
            try:
                write_text(config.output_path, text)
            except OSError as exc:
                raise ConfigError(f"无法写出 {config.output_path}: {exc}") from exc
            logger.info(f"已写出 {config.output_path}")
        else:
            sys.stdout.write(text)
    except FlowLdpError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exit_code_for(exc)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.set_level(logging.DEBUG if args.verbose else logging.INFO)
    try:
        config = config_from_args(args)
    except FlowLdpError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exit_code_for(exc)
    return run(config)


if __name__ == "__main__":  # 说明：python -m flow_ldp.ldp_cli
    sys.exit(main())
