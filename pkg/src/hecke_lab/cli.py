"""hecke-lab command line.

verify     run a verification campaign (default: full built-in grid)
classical  operator diagnostics on a directory of fixture spaces

Exit codes: 0 all assertions pass, 1 assertion failures, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .campaign import DEFAULT_TOLERANCE, Campaign, run_verify
from .newspace import characterize, qualifying_primes
from .operators import OpMatrix, op_Q, op_Qprime, op_S, op_Sprime, quad_ratio
from .report import Report, check, check_bool, timed
from .spaces import SpaceFormatError, load_space

_OP_BUILDERS = {
    "q": (op_Q, "Q", (-1.0, None)),
    "qprime": (op_Qprime, "Q", (-1.0, None)),
    "s": (op_S, "S", (0.0, None)),
    "sprime": (op_Sprime, "S", (0.0, None)),
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hecke-lab", description=__doc__.strip().splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification campaign")
    v.add_argument("--campaign", help="campaign JSON file (default: built-in grid)")
    v.add_argument("--seed", type=int, default=0, help="seed recorded in the report")
    v.add_argument("--report", help="write the JSON report to this path")

    c = sub.add_parser("classical", help="operator diagnostics on fixture spaces")
    c.add_argument("--fixture", required=True, help="directory of fixture JSON files")
    c.add_argument("--prime", required=True, type=int, help="prime p")
    c.add_argument("--op", choices=sorted(_OP_BUILDERS), help="single operator to build")
    c.add_argument("--characterize", action="store_true",
                   help="cut out the newspace and compare with the dimension oracle")
    c.add_argument("--report", help="write the JSON report to this path")
    return ap


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _cmd_verify(args) -> int:
    if args.campaign:
        campaign = Campaign.from_file(args.campaign)
        campaign.seed = args.seed
    else:
        campaign = Campaign.default(seed=args.seed)
    rep = run_verify(campaign)
    _emit(rep, args.report)
    return 0 if rep.ok else 1


def _cmd_classical(args) -> int:
    base = Path(args.fixture)
    if not base.is_dir():
        print(f"fixture directory not found: {base}", file=sys.stderr)
        return 2
    p = args.prime
    rep = Report(meta={"fixture": str(base), "prime": p, "operators": []})
    touched = 0
    for path in sorted(base.glob("*.json")):
        if path.name == "families.json":
            continue
        sp = load_space(path)
        if sp.level % p != 0:
            continue
        touched += 1
        tag = f"{path.stem}"
        quals = {q["p"]: q for q in qualifying_primes(sp.level, sp.char)}
        if args.op:
            builder, need_kind, (target, _) = _OP_BUILDERS[args.op]
            n = _vp(sp.level, p)
            if (need_kind == "Q") != (n == 1):
                rep.meta["operators"].append(
                    {"space": tag, "op": args.op, "skipped": f"level has p-exponent {n}"}
                )
                continue
            if _vp(sp.char.conductor, p) > n - 1:
                # character primitive at p: no admissible operator of this kind
                rep.meta["operators"].append(
                    {"space": tag, "op": args.op, "skipped": "character primitive at p"}
                )
                continue
            with timed() as t:
                op: OpMatrix = builder(sp, p)
            roots = (target, float(p))
            quad = quad_ratio(op, *roots)
            rep.meta["operators"].append({
                "space": tag, "op": op.label, "dim": op.dim,
                "residual": op.residual, "conditioning": op.conditioning,
                "poisoned": op.poisoned, "quad": quad, "runtime": t.elapsed,
            })
            if p in quals and quals[p]["kind"] == need_kind:
                check_bool(
                    rep, f"{tag}.{op.label}.quad",
                    quad <= DEFAULT_TOLERANCE["quad"], "formula", t.elapsed,
                    expected=f"<= {DEFAULT_TOLERANCE['quad']:g}",
                    computed=f"{quad:.3g}",
                )
        if args.characterize:
            with timed() as t:
                res = characterize(sp)
            check(
                rep, f"{tag}.newdim", res.expected_new, res.new_dim, "oracle",
                t.elapsed, detail=f"gap {res.gap:.3g}",
            )
    if touched == 0:
        print(f"no fixture in {base} has level divisible by {p}", file=sys.stderr)
        return 2
    _emit(rep, args.report)
    return 0 if rep.ok else 1


def _emit(rep: Report, path: str | None) -> None:
    text = rep.to_json()
    if path:
        Path(path).write_text(text + "\n")
    summary = rep.to_dict()["summary"]
    print(f"assertions: {summary['pass']} pass, {summary['fail']} fail")
    for a in rep.failures():
        print(f"  FAIL {a.id}: expected {a.expected}, computed {a.computed}")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_classical(args)
    except (SpaceFormatError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
