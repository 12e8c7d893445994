"""Command-line entry point: ``russian-cards {run,verify,params,hue}``.

Exit codes: 0 success; 1 a verification check failed; 2 infeasible parameters
or a size guard tripped (override with --force); 3 protocol error or
malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .colouring import (
    DEFAULT_HUE_CAP,
    Colouring,
    find_critical,
    full_lines,
    hue_counterexample,
    hue_explore,
    is_distinguished,
    trivial_colouring,
)
from .errors import MalformedTranscript, RegimeInfeasibleAtThisA, RussianCardsError, TooLargeForExhaustive
from .field import field_of_order, prime_power
from .geometry import affine_space
from .params import feasible, search_k, suggest_params, sweep
from .protocol import Deal, ProtocolParams, Transcript, deal_random, heavy_lines, run_protocol
from .verification import check_informative, check_weak_safety, execution_problems

TOOL = f"russian_cards {__version__}"
HUE_SIZE_GUARD = 81

EXIT_OK, EXIT_FAILED, EXIT_INFEASIBLE, EXIT_ERROR = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    a: int | None = None
    b: int | None = None
    c: int | None = None
    d: int | None = None
    k: int | None = None
    seed: int = 0
    transcript: Path | None = None
    deal: Path | None = None
    out: Path | None = None
    mode: str | None = None
    cap: int = DEFAULT_HUE_CAP
    force: bool = False
    action: str = "report"
    regime: str | None = None
    max_a: int | None = None
    sample: int | None = None
    points: list[str] | None = None
    colouring: Path | None = None
    fmt: str = "json"


def default_seed() -> int:
    return int(os.environ.get("RC_SEED", "0"))


def _dump(data) -> str:
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def _write(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _resolve_sizes(cfg: RunConfig) -> tuple[int, int, int, int]:
    """Fill in whichever of b, c, d is missing from a + b + c = a^d."""
    a, b, c, d = cfg.a, cfg.b, cfg.c, cfg.d
    if a is None:
        raise ValueError("--a is required")
    if d is None:
        if b is None or c is None:
            raise ValueError("give --d, or both --b and --c")
        total, d = a + b + c, 1
        while a**d < total:
            d += 1
        if a**d != total:
            raise ValueError(f"a+b+c = {total} is not a power of a = {a}")
    elif c is None:
        if b is None:
            raise ValueError("give --c or --b")
        c = a**d - a - b
    if b is None:
        b = a**d - a - c
    if a + b + c != a**d or min(b, c) < 0:
        raise ValueError(f"sizes a={a}, b={b}, c={c} do not fill GF({a})^{d}")
    return a, b, c, d


# -- run ------------------------------------------------------------------------


def cmd_run(cfg: RunConfig) -> int:
    try:
        a, b, c, d = _resolve_sizes(cfg)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INFEASIBLE
    k = cfg.k if cfg.k is not None else search_k(a, c, d)
    if k is None:
        _err(f"no k makes (a={a}, c={c}, d={d}) feasible")
        if not cfg.force:
            return EXIT_INFEASIBLE
        k = 1
    report = feasible(a, c, d, k)
    if not report.feasible and not cfg.force:
        _err(f"parameters are not known to be executable: {json.dumps(report.to_json(), sort_keys=True)}")
        return EXIT_INFEASIBLE
    try:
        params = ProtocolParams.make(a, c, d, k)
        if cfg.deal is not None:
            deal = Deal.from_json(json.loads(cfg.deal.read_text(encoding="utf-8")))
        else:
            deal = deal_random(a, b, c, random.Random(f"deal-{cfg.seed}"))
        randomize = cfg.mode == "randomized-leftover"
        transcript = run_protocol(deal, params, cfg.seed, randomize_leftover=randomize)
    except (RussianCardsError, ValueError, OSError) as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_ERROR
    out = cfg.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    _write(_dump(transcript.to_json()), out / "transcript.json")
    deal_json = {**deal.to_json(), "params": params.to_json(), "seed": cfg.seed, "tool": TOOL}
    _write(_dump(deal_json), out / "deal.json")
    heavy = heavy_lines(transcript.f, deal.B, params)
    print(f"(a,b,c,d,k) = ({a},{b},{c},{d},{k})  seed = {cfg.seed}")
    print(f"announced colour: {transcript.colour}")
    print(f"lines meeting Alice+Cath in >= {a - k} points: {len(heavy)}")
    print(f"colouring density: {transcript.xi.density} (needed {c + 2})")
    print(f"Bob's claim matches Cath's hand: {set(transcript.claimed_C) == set(deal.C)}")
    print(f"wrote {out / 'transcript.json'} and {out / 'deal.json'}")
    return EXIT_OK


# -- verify ---------------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> int:
    try:
        t = Transcript.from_json(json.loads(cfg.transcript.read_text(encoding="utf-8")))
        deal = Deal.from_json(json.loads(cfg.deal.read_text(encoding="utf-8")))
        problems = execution_problems(t, deal, rich_mode="exhaustive" if cfg.mode == "exhaustive" else "density")
        informative = check_informative(t, deal)
        cards = None
        if cfg.sample is not None:
            outside = sorted(set(deal.A) | set(deal.B))
            cards = random.Random(cfg.seed).sample(outside, min(cfg.sample, len(outside)))
        safety = check_weak_safety(t, deal, cards=cards)
    except (OSError, json.JSONDecodeError, MalformedTranscript) as exc:
        _err(f"malformed input: {exc}")
        return EXIT_ERROR
    except TooLargeForExhaustive as exc:
        _err(str(exc))
        return EXIT_INFEASIBLE
    passed = not problems and informative and safety.passed
    report = {
        "tool": TOOL,
        "params": t.params.to_json(),
        "seed": t.seed,
        "execution": {"legal": not problems, "problems": problems},
        "informative": informative,
        "safety": safety.to_json(),
        "passed": passed,
    }
    _write(_dump(report), cfg.out)
    print(f"legal execution: {not problems}", file=sys.stderr)
    for p in problems:
        print(f"  - {p}", file=sys.stderr)
    print(f"informative: {informative}", file=sys.stderr)
    print(f"weakly 1-safe on {len(safety.cards)} cards: {safety.passed}", file=sys.stderr)
    leaks = safety.leaks()
    for leak in leaks[:10]:
        print(f"  card {leak.card} at {leak.point}: Cath learns its owner ({leak.leak()})", file=sys.stderr)
    if len(leaks) > 10:
        print(f"  ... and {len(leaks) - 10} more (see the report)", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAILED


# -- params ---------------------------------------------------------------------


def _table(rows: dict) -> str:
    width = max(len(k) for k in rows)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows.items())


def cmd_params(cfg: RunConfig) -> int:
    if cfg.action == "sweep":
        if cfg.max_a is None:
            _err("sweep needs --max-a")
            return EXIT_INFEASIBLE
        buf = io.StringIO()
        buf.write(f"# {TOOL} params sweep max_a={cfg.max_a}\n")
        writer = csv.DictWriter(buf, fieldnames=["a", "d", "k", "c_max", "b"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(sweep(cfg.max_a))
        _write(buf.getvalue(), cfg.out)
        return EXIT_OK
    if cfg.action == "suggest":
        if cfg.a is None or cfg.regime is None:
            _err("suggest needs --a and --regime")
            return EXIT_INFEASIBLE
        try:
            k, c, b, report = suggest_params(cfg.a, cfg.regime)
        except RegimeInfeasibleAtThisA as exc:
            _err(str(exc))
            return EXIT_INFEASIBLE
        data = {"tool": TOOL, "a": cfg.a, "regime": cfg.regime, "k": k, "c": c, "b": b, "c_over_a": round(c / cfg.a, 4), "report": report.to_json()}
        _write(_dump(data) if cfg.fmt == "json" else _table({key: v for key, v in data.items() if key != "report"}), cfg.out)
        return EXIT_OK
    if cfg.a is None or cfg.c is None or cfg.d is None:
        _err("params needs --a, --c and --d")
        return EXIT_INFEASIBLE
    k = cfg.k if cfg.k is not None else search_k(cfg.a, cfg.c, cfg.d)
    if k is None:
        data = {"tool": TOOL, "a": cfg.a, "c": cfg.c, "d": cfg.d, "k": None, "feasible": False}
    else:
        try:
            report = feasible(cfg.a, cfg.c, cfg.d, k, exhaustive=cfg.mode == "exhaustive")
        except TooLargeForExhaustive as exc:
            _err(str(exc))
            return EXIT_INFEASIBLE
        data = {"tool": TOOL, **report.to_json(), "c_over_a": round(cfg.c / cfg.a, 4)}
    _write(_dump(data) if cfg.fmt == "json" else _table(data), cfg.out)
    return EXIT_OK


# -- hue ------------------------------------------------------------------------


def _hue_inputs(cfg: RunConfig):
    if cfg.transcript is not None:
        t = Transcript.from_json(json.loads(cfg.transcript.read_text(encoding="utf-8")))
        xi = t.xi
        params = t.params.to_json()
        if cfg.points:
            E = frozenset(xi.space.parse_label(s) for s in cfg.points)
        elif cfg.deal is not None:
            deal = Deal.from_json(json.loads(cfg.deal.read_text(encoding="utf-8")))
            E = frozenset(t.f[x - 1] for x in deal.A | deal.C)
        else:
            raise ValueError("give --points or --deal with --transcript")
        return xi, E, params
    if cfg.a is None or cfg.d is None or prime_power(cfg.a) is None:
        raise ValueError("give --transcript, or --a (a prime power) and --d")
    space = affine_space(field_of_order(cfg.a), cfg.d)
    if cfg.colouring is not None:
        xi = Colouring.from_json(space, cfg.k or 1, json.loads(cfg.colouring.read_text(encoding="utf-8")))
    else:
        xi = trivial_colouring(space)
    if not cfg.points:
        raise ValueError("give --points")
    E = frozenset(space.parse_label(s) for s in cfg.points)
    return xi, E, {"a": cfg.a, "d": cfg.d, "k": xi.k}


def cmd_hue(cfg: RunConfig) -> int:
    try:
        xi, E, params = _hue_inputs(cfg)
    except (OSError, json.JSONDecodeError, MalformedTranscript, ValueError) as exc:
        _err(f"bad input: {exc}")
        return EXIT_ERROR
    space = xi.space
    if space.num_points > HUE_SIZE_GUARD and not cfg.force:
        _err(f"{space!r} has {space.num_points} points (> {HUE_SIZE_GUARD}); use --force")
        return EXIT_INFEASIBLE

    def describe(F) -> dict:
        lines = full_lines(space, F)
        return {
            "points": sorted(space.label(p) for p in F),
            "full_lines": [{"points": sorted(space.label(p) for p in space.line_points(i).tolist()), "colour": xi.colour(i)} for i in lines],
            "distinguished": is_distinguished(xi, F),
        }

    members, truncated = hue_explore(xi, E, cfg.cap)
    bad, _ = hue_counterexample(xi, E, cfg.cap)
    if bad is not None:
        very = False
    else:
        very = None if truncated else True
    ordered = sorted(members, key=lambda F: sorted(F))
    data = {
        "tool": TOOL,
        "params": params,
        "start": describe(E),
        "size": len(members),
        "truncated": truncated,
        "very_distinguished": very,
        "critical": find_critical(xi, E) is not None,
        "counterexample": describe(bad) if bad is not None else None,
        "members": [describe(F) for F in ordered],
    }
    _write(_dump(data), cfg.out)
    print(f"hue size {len(members)}{' (truncated)' if truncated else ''}; very distinguished: {very}", file=sys.stderr)
    if bad is not None:
        desc = describe(bad)
        print(f"bad hue member {' '.join(desc['points'])} with lines:", file=sys.stderr)
        for fl in desc["full_lines"]:
            print(f"  {' '.join(fl['points'])} colour {fl['colour']}", file=sys.stderr)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="russian-cards", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=TOOL)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def sizes(p):
        for name in "abcdk":
            p.add_argument(f"--{name}", type=int)

    def seed(p):
        p.add_argument("--seed", type=int, default=None, help="defaults to $RC_SEED, else 0")

    run = sub.add_parser("run", help="deal and execute the protocol")
    sizes(run)
    seed(run)
    run.add_argument("--deal", type=Path, help="load the deal instead of dealing at random")
    run.add_argument("--out", type=Path, help="output directory (default .)")
    run.add_argument("--mode", choices=["deterministic", "randomized-leftover"], default="deterministic")
    run.add_argument("--force", action="store_true")

    ver = sub.add_parser("verify", help="check a transcript against a deal")
    ver.add_argument("--transcript", type=Path, required=True)
    ver.add_argument("--deal", type=Path, required=True)
    ver.add_argument("--out", type=Path, help="report path (default stdout)")
    ver.add_argument("--mode", choices=["density", "exhaustive"], default="density", help="richness check")
    ver.add_argument("--sample", type=int, help="spot-check this many random cards for safety")
    seed(ver)

    par = sub.add_parser("params", help="feasibility reports, suggestions and sweeps")
    par.add_argument("action", nargs="?", choices=["report", "suggest", "sweep"], default="report")
    sizes(par)
    par.add_argument("--regime", choices=["d3", "d4"])
    par.add_argument("--max-a", type=int, dest="max_a")
    par.add_argument("--format", choices=["json", "table"], default="json", dest="fmt")
    par.add_argument("--mode", choices=["bound", "exhaustive"], default="bound", help="how to check condition 4")
    par.add_argument("--out", type=Path)

    hue = sub.add_parser("hue", help="explore the hue class of a point set")
    sizes(hue)
    hue.add_argument("--transcript", type=Path)
    hue.add_argument("--deal", type=Path)
    hue.add_argument("--colouring", type=Path, help="colouring JSON (by_line or by_direction form)")
    hue.add_argument("--points", nargs="+", help="point labels such as 00 01 02")
    hue.add_argument("--cap", type=int, default=DEFAULT_HUE_CAP)
    hue.add_argument("--out", type=Path)
    hue.add_argument("--force", action="store_true")
    return parser


COMMANDS = {"run": cmd_run, "verify": cmd_verify, "params": cmd_params, "hue": cmd_hue}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    if "seed" not in values:
        values["seed"] = default_seed()
    cfg = RunConfig(**values)
    return COMMANDS[cfg.subcommand](cfg)


if __name__ == "__main__":
    sys.exit(main())
