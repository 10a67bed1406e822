"""Command-line entry point: ``pacfol <subcommand> ...``.

Exit codes: 0 success, 1 not entailed / below threshold, 2 usage or input
error, 3 solver resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .grounding import fresh_names, gnd_with_names
from .harness import MaskSpec, WorldDistributionSpec, run_calibration
from .implicit import LearnConfig, decide, estimate, sample_size
from .limited import entails_z_formula
from .models import load_partial_models
from .parser import parse_kb, parse_query
from .sat import ResourceLimitExceeded, check_entailment, to_clauses
from .syntax import LogicError, Name, Not, canonical_clauses, format_clause, names_of, predicates_of

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load(args):
    kb = parse_kb(_read(args.kb))
    query = parse_query(_read(args.query)) if getattr(args, "query", None) else None
    if query is not None:
        predicates_of(kb, query)
    return kb, query


def cmd_ground(args) -> int:
    kb, query = _load(args)
    names = set(names_of(kb))
    if query is not None:
        names |= names_of(query)
    if args.names:
        names |= {Name(tok.strip()) for tok in args.names.split(",") if tok.strip()}
    else:
        z = kb.rank if args.extra is None else args.extra
        names |= set(fresh_names(names, z))
    clauses = gnd_with_names(kb, names)
    if query is not None:
        clauses = clauses + canonical_clauses(to_clauses(Not(query)))
    for c in clauses:
        print(format_clause(c))
    return EXIT_OK


def cmd_entail(args) -> int:
    kb, query = _load(args)
    result = check_entailment(kb, query, step_cap=args.step_cap, extra=args.extra_names)
    if result.entailed:
        print("ENTAILED")
        return EXIT_OK
    print("NOT ENTAILED")
    if args.witness:
        for atom, value in sorted(result.countermodel.items()):
            print(f"{atom} = {int(value)}")
    return EXIT_NO


def cmd_entail_limited(args) -> int:
    kb, query = _load(args)
    mentioned = set(names_of(kb)) | set(names_of(query))
    k = kb.rank if args.extra_names is None else args.extra_names
    clauses = gnd_with_names(kb, names_of(query) | set(fresh_names(mentioned, k)))
    for z in range(args.z + 1):
        if entails_z_formula(clauses, query, z):
            print(f"ENTAILED at z={z}")
            return EXIT_OK
    print(f"UNKNOWN at z={args.z}")
    return EXIT_NO


def cmd_learn(args) -> int:
    kb, query = _load(args)
    with open(args.examples, encoding="utf-8") as fh:
        examples = load_partial_models(fh)
    cfg = LearnConfig(k=args.k, z=args.z, tuple_cap=args.tuple_cap, pad_fresh=not args.no_pad,
                      step_cap=args.step_cap)
    est = estimate(examples, kb, query, cfg)
    print(f"p_hat = {est.v}/{est.m} = {float(est.p_hat):.6f}")
    report = est.to_json(trace=args.trace)
    report["tuple_cap"] = args.tuple_cap
    if args.tuple_cap:
        report["note"] = "tuple enumeration was capped; the estimate can only be lower"
    print(json.dumps(report, sort_keys=True))
    if args.threshold is not None and not decide(est, args.threshold):
        return EXIT_NO
    return EXIT_OK


def cmd_samplesize(args) -> int:
    print(sample_size(args.gamma, args.delta))
    return EXIT_OK


def load_simulation(path: str) -> dict:
    """Read a TOML or JSON simulation config; KB/query paths are relative to it."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    cfg = json.loads(text) if p.suffix == ".json" else tomllib.loads(text)
    base = p.parent

    def text_of(section: str) -> str:
        sec = cfg.get(section, {})
        if "text" in sec:
            return sec["text"]
        return (base / sec["path"]).read_text(encoding="utf-8")

    world = dict(cfg["world"])
    world.update(world.pop("params", {}))
    if world.pop("background_from_kb", False):
        world["background"] = text_of("kb")
    mask = dict(cfg.get("mask", {}))
    mask.update(mask.pop("params", {}))
    return {
        "world": WorldDistributionSpec(**world),
        "mask": MaskSpec(**mask),
        "kb": parse_kb(text_of("kb")),
        "query": parse_query(text_of("query")),
        "learn": LearnConfig(**cfg.get("learn", {"k": 1})),
        "calibration": cfg.get("calibration", {}),
    }


def cmd_simulate(args) -> int:
    sim = load_simulation(args.config)
    cal = sim["calibration"]
    report = run_calibration(sim["world"], sim["mask"], sim["kb"], sim["query"], sim["learn"],
                             gamma=cal.get("gamma", 0.1), delta=cal.get("delta", 0.1),
                             trials=cal.get("trials", 20), seed=args.seed)
    print(json.dumps(report.to_json(timing=args.timing), sort_keys=True, indent=2))
    print(report.summary(), file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pacfol", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("ground", help="print the grounding of a KB")
    g.add_argument("--kb", required=True)
    g.add_argument("--query")
    grp = g.add_mutually_exclusive_group()
    grp.add_argument("--names", help="comma-separated extra names")
    grp.add_argument("--extra", type=int, help="number of fresh names (default: rank)")
    g.set_defaults(func=cmd_ground)

    e = sub.add_parser("entail", help="decide kb |= query")
    e.add_argument("--kb", required=True)
    e.add_argument("--query", required=True)
    e.add_argument("--extra-names", type=int, help="fresh names to ground with (default: rank)")
    e.add_argument("--witness", action="store_true", help="print a countermodel if not entailed")
    e.add_argument("--step-cap", type=int, default=10_000_000)
    e.set_defaults(func=cmd_entail)

    el = sub.add_parser("entail-limited", help="decide kb |=_z query for the least z <= N")
    el.add_argument("--kb", required=True)
    el.add_argument("--query", required=True)
    el.add_argument("-z", type=int, required=True)
    el.add_argument("--extra-names", type=int)
    el.set_defaults(func=cmd_entail_limited)

    ln = sub.add_parser("learn", help="estimate validity from partial examples")
    ln.add_argument("--kb", required=True)
    ln.add_argument("--query", required=True)
    ln.add_argument("--examples", required=True, help="JSON-lines partial models")
    ln.add_argument("-k", type=int, required=True)
    ln.add_argument("-z", type=int)
    ln.add_argument("--tuple-cap", type=int, default=0)
    ln.add_argument("--no-pad", action="store_true")
    ln.add_argument("--trace", action="store_true")
    ln.add_argument("--threshold", type=str, help="exit 1 if p_hat is below this (e.g. 9/10 or 0.9)")
    ln.add_argument("--step-cap", type=int, default=10_000_000)
    ln.set_defaults(func=cmd_learn)

    ss = sub.add_parser("samplesize", help="examples needed for accuracy gamma, confidence 1-delta")
    ss.add_argument("--gamma", type=float, required=True)
    ss.add_argument("--delta", type=float, required=True)
    ss.set_defaults(func=cmd_samplesize)

    sm = sub.add_parser("simulate", help="run a calibration experiment from a config file")
    sm.add_argument("--config", required=True)
    sm.add_argument("--seed", type=int, required=True)
    sm.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    sm.set_defaults(func=cmd_simulate)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (LogicError, ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
