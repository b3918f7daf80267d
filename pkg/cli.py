#!/usr/bin/env python3
"""
命令行入口

    causal-species enumerate cells --n 3
    causal-species compute tits "(12,3)" "(13,2)"
    causal-species verify steinmann --n 4 --json
    causal-species scenario scenario.json

退出码：0 全部通过，1 验证失败，2 用法或上界错误。
"""

import argparse
import sys
from contextlib import ExitStack
from typing import Any, Dict, List, Optional

import orjson
from loguru import logger

from compositions import (
    composition_to_json, enumerate_compositions, enumerate_refinements, parse_composition, sort_compositions,
    tits_product,
)
from config import ScenarioConfig, Settings, configure_logging, get_settings, load_scenario, override_settings
from errors import CausalSpeciesError, DomainError, ParseError
from product_systems import (
    Character, Coupling, Decoration, PerturbedSystem, ToyCausalSystem, bogoliubov_extract, generating_function,
    green_function, scattering_blocks, scattering_check, verify_generating_function,
)
from scalars import scalar
from species_algebra import H, antipode, h_to_q, is_primitive, q_to_h, sig_to_json
from steinmann_arrows import ArrowDirection, fresh_labels, iterated_arrow
from verification_suites import SUITES, export_report, print_report, run_suite
from zie_cells import (
    advanced_cell, cell_from_json, cell_to_json, dynkin_element, enumerate_cells, parse_tree, retarded_cell,
    tree_to_Q,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

ENUMERATE_KINDS = ["compositions", "cells", "refinements"]
COMPUTE_KINDS = ["antipode", "qbasis", "dynkin", "steinmann-arrow", "tits", "tree"]


def _emit(payload: Dict[str, Any], as_json: bool, lines: List[str]) -> None:
    if as_json:
        sys.stdout.write(orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS).decode() + "\n")
    else:
        for line in lines:
            print(line)


def _ground(n: int):
    return frozenset(range(1, n + 1))


def _parse_overrides(items: List[str]) -> Dict[str, int]:
    overrides = {}
    fields = Settings.model_fields
    for item in items:
        key, sep, value = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in fields:
            raise ParseError(f"无法解析上界覆盖 {item!r}（形如 composition_bound=9）")
        try:
            overrides[key] = int(value)
        except ValueError:
            raise ParseError(f"上界覆盖的值必须是整数: {item!r}") from None
    return overrides


# =============================================================================
# 子命令
# =============================================================================

def cmd_enumerate(args) -> int:
    """列出组合、胞腔或细化，最后一行给出个数"""
    if args.kind == "compositions":
        items = list(enumerate_compositions(_ground(args.n)))
        listing = [composition_to_json(F) for F in items]
        text = [str(F) for F in items]
    elif args.kind == "cells":
        items = list(enumerate_cells(_ground(args.n), args.seed))
        listing = [cell_to_json(c) for c in items]
        text = [str(c) for c in items]
    else:
        if not args.composition:
            raise ParseError("refinements 需要 --composition，如 --composition \"(12,3)\"")
        items = sort_compositions(enumerate_refinements(parse_composition(args.composition)))
        listing = [composition_to_json(F) for F in items]
        text = [str(F) for F in items]
    payload = {"kind": args.kind, "n": args.n, "seed": args.seed, "count": len(items), "items": listing}
    _emit(payload, args.json, text + [f"count: {len(items)}"])
    return EXIT_OK


def _compute(args) -> Dict[str, Any]:
    kind, operands = args.expr, args.operands
    if kind == "tits":
        if len(operands) != 2:
            raise ParseError("tits 需要两个组合参数")
        F, G = (parse_composition(t) for t in operands)
        result = tits_product(F, G)
        return {"expr": kind, "result": composition_to_json(result), "text": str(result)}
    if kind == "dynkin":
        if args.cell_file:
            with open(args.cell_file, "rb") as f:
                raw = f.read()
            try:
                obj = orjson.loads(raw)
            except orjson.JSONDecodeError as e:
                raise ParseError(f"胞腔文件不是合法的 JSON: {args.cell_file} ({e})") from e
            cell = cell_from_json(obj)
        elif args.retarded is not None or args.advanced is not None:
            label = args.retarded if args.retarded is not None else args.advanced
            builder = retarded_cell if args.retarded is not None else advanced_cell
            try:
                i = int(label)
            except ValueError:
                raise ParseError(f"标签必须是整数: {label!r}") from None
            ground = _ground(args.n)
            if i not in ground:
                raise DomainError(f"标签 {i} 不在 {{1..{args.n}}} 中")
            cell = builder(ground, i)
        else:
            raise ParseError("dynkin 需要 --cell-file、--retarded 或 --advanced")
        element = dynkin_element(cell).element
        return {"expr": kind, "cell": cell_to_json(cell), "result": sig_to_json(element),
                "primitive": is_primitive(element), "text": str(element)}
    if kind == "tree":
        if len(operands) != 1:
            raise ParseError("tree 需要一个树参数，如 \"[[1,2],3]\"")
        element = tree_to_Q(parse_tree(operands[0])).element
        return {"expr": kind, "result": sig_to_json(element), "primitive": True, "text": str(element)}

    if len(operands) != 1:
        raise ParseError(f"{kind} 需要一个组合参数")
    F = parse_composition(operands[0])
    if kind == "antipode":
        element = antipode(H(F))
    elif kind == "qbasis":
        element = h_to_q(F) if args.inverse else q_to_h(F)
    else:
        direction = ArrowDirection(args.direction)
        element = iterated_arrow(H(F), fresh_labels(args.arrows), direction)
    return {"expr": kind, "result": sig_to_json(element), "text": str(element)}


def cmd_compute(args) -> int:
    payload = _compute(args)
    text = payload.pop("text")
    _emit(payload, args.json, [text])
    return EXIT_OK


def cmd_verify(args) -> int:
    """运行一个或全部验证套件；全部通过时退出码为 0"""
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        params = {"n": args.n, "seed": args.seed, "n_g": args.ng, "n_j": args.nj, "progress": args.progress}
        if name == "ruelle":
            params["random_pairs"] = args.random_pairs
        reports.append(run_suite(name, **params))
    if args.json:
        payload = {"seed": args.seed, "reports": [r.to_json() for r in reports],
                   "passed": all(r.passed for r in reports)}
        _emit(payload, True, [])
    else:
        for report in reports:
            print_report(report)
    if args.export:
        for report in reports:
            target = args.export if len(reports) == 1 else f"{report.suite}_{args.export}"
            export_report(report, target)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def run_scenario(scenario: ScenarioConfig) -> Dict[str, Any]:
    """玩具因果模型上的场景计算"""
    P = ToyCausalSystem(scenario.n_g, scenario.n_j)
    c = Coupling.quantum()
    interaction = Decoration(scenario.interaction.symbol, scenario.interaction.time_value())
    assignment = {}
    values = {scenario.interaction.symbol: scenario.interaction.character}
    for k, spec in enumerate(scenario.decorations, start=1):
        label = spec.label if spec.label is not None else k
        assignment[label] = Decoration(spec.symbol, spec.time_value())
        values[spec.symbol] = spec.character
    chi = Character({s: scalar(str(v)) for s, v in values.items()})
    result: Dict[str, Any] = {"seed": scenario.seed, "n_g": scenario.n_g, "n_j": scenario.n_j}

    if assignment:
        result["T"] = P.component(assignment.keys(), assignment).to_json()
        perturbed = PerturbedSystem(P, interaction, scenario.n_g, c)
        result["perturbed_T"] = perturbed.component(assignment.keys(), assignment).to_json()
        result["green_function"] = green_function(P, interaction, assignment, chi, scenario.n_g, c).to_json()
        try:
            later, earlier = scattering_blocks(interaction, assignment)
        except CausalSpeciesError as e:
            result["scattering"] = {"applicable": False, "reason": str(e)}
        else:
            result["scattering"] = {
                "applicable": True,
                "later": sorted(map(str, later)),
                "earlier": sorted(map(str, earlier)),
                "holds": scattering_check(P, interaction, assignment, chi, scenario.n_g, c),
            }

    if scenario.observable is not None:
        A = next(Decoration(d.symbol, d.time_value()) for d in scenario.decorations if d.symbol == scenario.observable)
        V = generating_function(P, interaction, A, c, scenario.n_g, scenario.n_j)
        result["generating_function"] = V.to_json()
        result["generating_function_holds"] = verify_generating_function(
            P, interaction, A, c, scenario.n_g, scenario.n_j)
        if scenario.n_j >= 1:
            result["bogoliubov"] = bogoliubov_extract(V, c).to_json()
    return result


def cmd_scenario(args) -> int:
    scenario = load_scenario(args.path)
    payload = run_scenario(scenario)
    suites_ok = True
    if scenario.suites:
        reports = [run_suite(name, n=scenario.n, seed=scenario.seed, n_g=scenario.n_g, n_j=scenario.n_j)
                   for name in scenario.suites]
        payload["reports"] = [r.to_json() for r in reports]
        suites_ok = all(r.passed for r in reports)
    checks = [payload.get("generating_function_holds", True),
              payload.get("scattering", {}).get("holds", True)]
    lines = [f"{key}: {value}" for key, value in payload.items() if not isinstance(value, (dict, list))]
    if "scattering" in payload:
        lines.append(f"scattering: {payload['scattering']}")
    _emit(payload, args.json, lines)
    return EXIT_OK if suites_ok and all(checks) else EXIT_FAILED


# =============================================================================
# 参数解析
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="随机种子（默认取配置）")
    common.add_argument("--json", action="store_true", help="输出 JSON")
    common.add_argument("--bound-override", action="append", default=[], metavar="KEY=VALUE",
                        help="临时覆盖配置上界，如 composition_bound=9")
    common.add_argument("--log-level", default=None, help="日志级别（DEBUG/INFO/WARNING）")

    parser = argparse.ArgumentParser(prog="causal-species", description="组合 Hopf 幺半群与因果微扰论的精确计算")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="枚举组合、胞腔或细化")
    p.add_argument("kind", choices=ENUMERATE_KINDS)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--composition", default=None, help="refinements 的输入组合")
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("compute", parents=[common], help="计算单个元素")
    p.add_argument("expr", choices=COMPUTE_KINDS)
    p.add_argument("operands", nargs="*")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--inverse", action="store_true", help="qbasis：给出 H_F 的 Q 坐标")
    p.add_argument("--arrows", type=int, default=1, help="steinmann-arrow：新标签个数")
    p.add_argument("--direction", choices=[d.value for d in ArrowDirection], default="retarded")
    p.add_argument("--cell-file", default=None)
    p.add_argument("--retarded", default=None, help="dynkin：全推迟胞腔的标签")
    p.add_argument("--advanced", default=None, help="dynkin：全超前胞腔的标签")
    p.set_defaults(handler=cmd_compute)

    p = sub.add_parser("verify", parents=[common], help="运行验证套件")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--ng", type=int, default=None)
    p.add_argument("--nj", type=int, default=None)
    p.add_argument("--random-pairs", type=int, default=None, help="ruelle：随机胞腔对个数")
    p.add_argument("--export", default=None, help="导出报告的 JSON 文件名")
    p.add_argument("--progress", action="store_true", help="显示进度条")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("scenario", parents=[common], help="按场景文件计算玩具因果模型")
    p.add_argument("path")
    p.set_defaults(handler=cmd_scenario)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        changes = _parse_overrides(args.bound_override)
        with ExitStack() as stack:
            if changes:
                stack.enter_context(override_settings(**changes))
                logger.info(f"覆盖配置: {changes}")
            if args.seed is None:
                args.seed = get_settings().seed
            return args.handler(args)
    except CausalSpeciesError as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
