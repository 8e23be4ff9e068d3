"""Command-line front end.

Every command reads one JSON file and prints a report.  Exit status: 0 on
pass/valid, 1 on fail/invalid, 2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Callable

from . import annulus as an
from . import cover_skeleton as cs
from . import deformation as de
from . import hurwitz_graph as hg
from . import power_series as ps
from . import selftest
from .errors import SchemaError, WildHurwitzError
from .valuation_ring import INF, RingElement, RingSpec, format_rational, parse_rational

COMMANDS = ("validate-graph", "reduce-graph", "level", "check-earnest", "annulus-analyze",
            "skeleton-admissible", "skeleton-classify", "defring", "smooth-lift", "selftest")


class InputError(Exception):
    """Malformed input; reported with exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None = None
    format: str = "text"
    seed: int = 0
    T: int | None = None
    M: int | None = None
    N: int | None = None
    singularities: bool = False


@dataclass
class Outcome:
    status: int
    text: str
    data: object


def _load(path: str | None) -> dict:
    if path is None:
        raise InputError("an input file is required")
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return data


def _parse(fn: Callable, *args):
    try:
        return fn(*args)
    except (SchemaError, WildHurwitzError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r}") from exc


def _spec(data: dict, cfg: RunConfig) -> RingSpec:
    if "spec" not in data:
        raise InputError("missing field 'spec'")
    raw = dict(_parse(lambda d: dict(d), data["spec"]))
    if cfg.M is not None:
        raw["M"] = cfg.M
    if cfg.N is not None:
        raw["N"] = cfg.N
    return _parse(RingSpec.from_json, raw)


def _level_text(level: dict) -> str:
    return "{" + ",".join(f"{v}:{x}" for v, x in level.items()) + "}"


# graph commands ---------------------------------------------------------------

def cmd_validate_graph(cfg: RunConfig) -> Outcome:
    g = _parse(hg.HurwitzGraph.from_json, _load(cfg.input))
    problems = hg.validate(g)
    if problems:
        text = "invalid\n" + "".join(f"  {v}\n" for v in problems)
        return Outcome(1, text, {"valid": False, "violations": [str(v) for v in problems]})
    red = hg.reduce(g).graph
    if hg.is_good(red):
        level = hg.level_function(red)
        text = f"valid; reduced graph good; ℓ = {_level_text(level)}\n"
        return Outcome(0, text, {"valid": True, "good": True, "level": level})
    return Outcome(0, "valid; reduced graph not good (directed cycle)\n",
                   {"valid": True, "good": False})


def cmd_reduce_graph(cfg: RunConfig) -> Outcome:
    g = _parse(hg.HurwitzGraph.from_json, _load(cfg.input))
    red = hg.reduce(g)
    data = {"graph": red.graph.to_json(), "merge": red.merge}
    lines = [f"{v} -> {red.merge[v]}" for v in g.vertices]
    lines += [f"edge {e.id}: {e.origin} -> {e.target} m={e.m}" for e in red.graph.edges]
    return Outcome(0, "\n".join(lines) + "\n", data)


def cmd_level(cfg: RunConfig) -> Outcome:
    g = _parse(hg.HurwitzGraph.from_json, _load(cfg.input))
    red = hg.reduce(g).graph
    if not hg.is_good(red):
        return Outcome(1, "reduced graph not good: no level function\n", {"good": False})
    level = hg.level_function(red)
    return Outcome(0, f"ℓ = {_level_text(level)}\n", {"good": True, "level": level})


# series and annulus commands ---------------------------------------------------------

def _resize(series: ps.Series, T: int | None) -> ps.Series:
    if T is None or T == series.T:
        return series
    zero = RingElement.zero(series.spec)
    coeffs = list(series.coeffs[:T]) + [zero] * max(0, T - series.T)
    return ps.Series(series.spec, tuple(coeffs))


def cmd_check_earnest(cfg: RunConfig) -> Outcome:
    data = _load(cfg.input)
    spec = _spec(data, cfg)
    for key in ("f", "delta", "r"):
        if key not in data:
            raise InputError(f"missing field '{key}'")
    f = _resize(_parse(ps.Series.from_json, {**data["f"], "spec": spec.to_json()}), cfg.T)
    delta_series = _parse(ps.Series.from_json, {**data["delta"], "spec": spec.to_json()})
    delta = ps.DifferentialForm(_resize(delta_series, cfg.T))
    r = _parse(parse_rational, data["r"])
    if r == INF:
        if "g" not in data:
            raise InputError("r=inf requires field 'g'")
        g = _parse(RingElement.from_json, data["g"], spec)
        verdict = _parse(ps.is_pinf_earnest, f, delta, g)
    else:
        verdict = _parse(ps.is_pr_earnest, f, delta, r)
    if verdict.ok:
        text = f"earnest r={format_rational(r)} ({verdict.checked} indices checked)\n"
    else:
        text = verdict.first_failure.describe() + "\n"
    return Outcome(0 if verdict.ok else 1, text, verdict.to_json())


def cmd_annulus_analyze(cfg: RunConfig) -> Outcome:
    data = _load(cfg.input)
    spec = _spec(data, cfg)
    for key in ("n", "alpha"):
        if key not in data:
            raise InputError(f"missing field '{key}'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError("n: expected a positive integer")
    T = cfg.T if cfg.T is not None else data.get("T", 16)
    c = _parse(RingElement.from_json, data.get("c", [0, 1]), spec)
    alpha_raw = data["alpha"]
    if not isinstance(alpha_raw, dict):
        raise InputError("alpha: expected an object with 'u' and 'v' lists")

    def elements(key):
        return [_parse(RingElement.from_json, x, spec) for x in alpha_raw.get(key, [])]

    alpha = _parse(an.AnnulusElement.build, spec, c, T, elements("u"), elements("v"))
    if not alpha.is_unit():
        raise InputError("alpha: not a unit (constant term has positive valuation)")
    try:
        cover, inv, rep = an.analyze(n, alpha)
    except ArithmeticError as exc:
        return Outcome(1, f"cover relation fails: {exc}\n", {"ok": False, "error": str(exc)})
    except WildHurwitzError as exc:
        return Outcome(1, f"{type(exc).__name__}: {exc}\n", {"ok": False, "error": str(exc)})
    verdict = "pass" if rep.ok else "fail"
    text = f"m={inv.m} side={inv.side.value} val_d={format_rational(inv.val_d)} alternativeA={verdict}\n"
    for reason in rep.reasons if not rep.ok else ():
        text += f"  {reason}\n"
    body = inv.to_json() | {"alternativeA": rep.ok, "relation_holds": cover.relation_holds()}
    return Outcome(0 if rep.ok else 1, text, body)


# skeleton commands --------------------------------------------------------------

def _skeleton(cfg: RunConfig) -> cs.CoverSkeleton:
    return _parse(cs.CoverSkeleton.from_json, _load(cfg.input))


def cmd_skeleton_admissible(cfg: RunConfig) -> Outcome:
    sk = _skeleton(cfg)
    problems = cs.graph_problems(sk)
    if problems:
        return Outcome(1, "invalid Hurwitz graph\n" + "".join(f"  {p}\n" for p in problems),
                       {"admissible": False, "graph": problems})
    adm = cs.check_admissible(sk)
    checks = {"admissible": adm, "base-degree": cs.base_degree_check(sk)}
    try:
        checks["hurwitz-inequality"] = cs.hurwitz_inequality(sk)
        checks["target-genus"] = cs.target_genus_check(sk)
    except WildHurwitzError as exc:
        checks["connected"] = cs.Report(False, (str(exc),))
    lines = []
    for name, rep in checks.items():
        skipped = rep.details.get("checked") is False
        lines.append(f"{name}: {'skipped' if skipped else ('pass' if rep.ok else 'fail')}")
        lines += [f"  {msg}" for msg in rep.failures]
    data = {name: {"ok": rep.ok, "failures": list(rep.failures)} for name, rep in checks.items()}
    return Outcome(0 if adm.ok else 1, "\n".join(lines) + "\n", data)


def cmd_skeleton_classify(cfg: RunConfig) -> Outcome:
    sk = _skeleton(cfg)
    result = cs.classify(sk)
    lines = [result.kind.value] + [f"  {where}: {why}" for where, why in result.witnesses]
    data = {"kind": result.kind.value, "witnesses": [list(w) for w in result.witnesses]}
    return Outcome(1 if result.kind is cs.Kind.INVALID else 0, "\n".join(lines) + "\n", data)


def cmd_defring(cfg: RunConfig) -> Outcome:
    sk = _skeleton(cfg)
    try:
        pres = de.emit_presentation(sk)
    except WildHurwitzError as exc:
        return Outcome(1, f"{type(exc).__name__}: {exc}\n", {"error": str(exc)})
    text, data = pres.text(), pres.to_json()
    if cfg.singularities:
        rep = de.singularity_report(pres)
        text += rep.text()
        data["singularities"] = rep.to_json()
    return Outcome(0, text, data)


def cmd_smooth_lift(cfg: RunConfig) -> Outcome:
    sk = _skeleton(cfg)
    try:
        pres = de.emit_presentation(sk)
        asg = de.smooth_lift(sk)
    except WildHurwitzError as exc:
        return Outcome(1, f"{type(exc).__name__}: {exc}\n", {"error": str(exc)})
    rep = de.verify_assignment(pres, asg)
    lines = [f"kind: {asg.kind}"]
    lines += [f"g[{v}]: {format_rational(x)}" for v, x in sorted(asg.vertex_exp.items())]
    lines += [f"w[{e}]: {format_rational(x)}" for e, x in sorted(asg.edge_exp.items())]
    lines.append(f"N = {asg.N}")
    lines.append("verified" if rep.ok else "verification failed")
    lines += [f"  {msg}" for msg in rep.failures]
    return Outcome(0 if rep.ok else 1, "\n".join(lines) + "\n", asg.to_json() | {"verified": rep.ok})


def cmd_selftest(cfg: RunConfig) -> Outcome:
    results = selftest.run_all(cfg.seed)
    data = {"seed": cfg.seed,
            "suites": [{"name": r.name, "cases": r.cases, "failures": r.failures,
                        "first_failure": r.first_failure} for r in results]}
    ok = all(r.ok for r in results)
    return Outcome(0 if ok else 1, selftest.format_table(cfg.seed, results), data)


HANDLERS: dict[str, Callable[[RunConfig], Outcome]] = {
    "validate-graph": cmd_validate_graph,
    "reduce-graph": cmd_reduce_graph,
    "level": cmd_level,
    "check-earnest": cmd_check_earnest,
    "annulus-analyze": cmd_annulus_analyze,
    "skeleton-admissible": cmd_skeleton_admissible,
    "skeleton-classify": cmd_skeleton_classify,
    "defring": cmd_defring,
    "smooth-lift": cmd_smooth_lift,
    "selftest": cmd_selftest,
}


def run(cfg: RunConfig) -> Outcome:
    try:
        return HANDLERS[cfg.command](cfg)
    except InputError as exc:
        return Outcome(2, "", {"error": str(exc)})


def _seed_from_env() -> int:
    raw = os.environ.get("WILDHURWITZ_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"WILDHURWITZ_SEED: expected an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wildhurwitz",
                                     description="Checks for wild Hurwitz data and degree-p covers.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--T", type=int, default=None, help="override series truncation")
    common.add_argument("--M", type=int, default=None, help="override coefficient precision")
    common.add_argument("--N", type=int, default=None, help="override ramification index")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, parents=[common])
        if name != "selftest":
            cmd.add_argument("input")
        if name == "defring":
            cmd.add_argument("--singularities", action="store_true",
                             help="append the singularity report")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        seed = args.seed if args.seed is not None else _seed_from_env()
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for name in ("T", "M", "N"):
        value = getattr(args, name)
        if value is not None and value < 1:
            print(f"error: --{name} must be positive", file=sys.stderr)
            return 2
    cfg = RunConfig(args.command, getattr(args, "input", None), args.format, seed,
                    args.T, args.M, args.N, getattr(args, "singularities", False))
    out = run(cfg)
    if out.status == 2:
        print(f"error: {out.data['error']}", file=sys.stderr)
        return 2
    if cfg.format == "json":
        sys.stdout.write(json.dumps(out.data, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(out.text)
    return out.status


if __name__ == "__main__":
    sys.exit(main())
