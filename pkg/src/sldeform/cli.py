"""Command-line front end.  Every subcommand prints a short summary and can
write a full JSON report with ``--out``; the exit status is 0 when all
checks pass, 1 when a check fails and 2 on usage errors."""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Any

from . import __version__
from .errors import (
    AlgebraError,
    NotLocal,
    NotPrime,
    PresentationSyntaxError,
    RingSyntaxError,
    UnsupportedPresentation,
)
from .localring import parse_ring

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _ring(text: str):
    try:
        return parse_ring(text)
    except (RingSyntaxError, NotLocal, NotPrime) as exc:
        raise UsageError(str(exc)) from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _load_json(text: str) -> Any:
    """A JSON literal, or the name of a file holding one."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    try:
        with open(text) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {text!r}: {exc}") from exc


# --- subcommands -----------------------------------------------------------

def cmd_ring(args) -> dict:
    R = _ring(args.spec)
    m = R.maximal_ideal()
    rep = {
        "ring": R.spec_string(),
        "p": R.p, "a": R.a, "degree": R.d,
        "size": R.size,
        "residue_field_size": R.k_size,
        "units": R.unit_count,
        "maximal_ideal_generators": [g.serialize() for g in m.generators()],
        "nilpotency_index": R.nilpotency_index,
        "pass": True,
    }
    if args.elements:
        rep["elements"] = [list(R.decode(c)) for c in R.element_codes()]
    return rep


def cmd_relations(args) -> dict:
    from .matrix import RELATION_NAMES, verify_relations

    R = _ring(args.ring)
    res = verify_relations(R, args.n, samples=args.samples, seed=args.seed)
    rels = {str(k): {"name": RELATION_NAMES[k], **v} for k, v in sorted(res.items())}
    return {"ring": R.spec_string(), "n": args.n,
            "mode": "exhaustive" if args.samples is None else f"{args.samples} samples",
            "relations": rels, "pass": all(v["pass"] for v in res.values())}


def cmd_decompose(args) -> dict:
    from .matrix import Mat, decompose_transvections

    R = _ring(args.ring)
    rows = _load_json(args.matrix)
    try:
        M = Mat.from_rows(R, rows)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad matrix: {exc}") from exc
    ideal = R.ideal([R.elt(g) for g in _load_json(args.ideal)]) if args.ideal else None
    word = decompose_transvections(M, ideal)
    ok = word.evaluate() == M and (ideal is None or word.params_in_ideal())
    return {"ring": R.spec_string(), "matrix": M.serialize(), "length": len(word),
            "word": word.serialize(), "pass": ok}


def cmd_h1(args) -> dict:
    from .defo import h1_dimension
    from .groups import builtin_group, enumerate_group

    gens, _ = builtin_group(args.group)
    G = enumerate_group(gens)
    res = h1_dimension(G)
    rep = {"group": args.group, "order": G.order, "z1": res.z1, "b1": res.b1, "h1": res.h1,
           "ad_invariants": res.ad_invariants, "pass": True}
    if args.expect is not None:
        rep["expected_h1"] = args.expect
        rep["pass"] = res.h1 == args.expect
    return rep


def cmd_enumerate(args) -> dict:
    from .defo import classify_strict, enumerate_lifts
    from .groups import builtin_group

    gens, P = builtin_group(args.group)
    if P is None:
        raise UsageError(f"group {args.group!r} has no built-in presentation")
    S = _ring(args.target)
    lifts = enumerate_lifts(P, gens, S, shards=args.shards)
    classes = classify_strict(lifts, S)
    rep = {
        "group": args.group, "target": S.spec_string(), "lifts": len(lifts),
        "classes": len(classes),
        "orbit_sizes": [c.orbit_size for c in classes],
        "representatives": [[M.serialize() for M in c.representative.images] for c in classes],
        "pass": True,
    }
    if args.expect is not None:
        rep["expected_classes"] = args.expect
        rep["pass"] = len(classes) == args.expect
    return rep


def cmd_verify_lift(args) -> dict:
    from .defo import EXCEPTIONAL, verify_exceptional_lift

    which = EXCEPTIONAL if args.which == "all" else [args.which]
    reports = [verify_exceptional_lift(w, args.precision) for w in which]
    return {"precision": args.precision, "lifts": reports, "pass": all(r["pass"] for r in reports)}


def cmd_normalize(args) -> dict:
    from .defo import GeneratorLift
    from .localring import find_homs
    from .normalize import induced_lift, normalize_lift, random_conjugate

    if args.certificate:
        L = GeneratorLift.from_json(_load_json(args.certificate))
        res = normalize_lift(L)
        return {
            "R": L.R.spec_string(), "S": L.S.spec_string(), "n": L.n,
            "conjugator_chain": [K.serialize() for K in res.chain],
            "recovered_hom": {"source": res.hom.source.spec_string(),
                              "target": res.hom.target.spec_string(),
                              "x_image": res.hom(L.R.x).serialize()},
            "pass": True,
        }
    if not (args.ring and args.n):
        raise UsageError("give a certificate or --ring, --n (and optionally --target)")
    R = _ring(args.ring)
    S = _ring(args.target) if args.target else R
    homs = find_homs(R, S)
    if not homs:
        raise UsageError(f"no ring maps {R} -> {S}")
    rng = random.Random(args.seed)
    trials = []
    for i in range(args.trials):
        f = homs[i % len(homs)]
        L, _ = random_conjugate(induced_lift(f, args.n), rng)
        L = GeneratorLift(L.R, L.n, L.S, L.images, L.d_images)
        res = normalize_lift(L)
        trials.append({"planted": f(R.x).serialize(), "recovered": res.hom(R.x).serialize(),
                       "ok": res.hom == f})
    good = sum(t["ok"] for t in trials)
    return {"R": R.spec_string(), "S": S.spec_string(), "n": args.n, "trials": len(trials),
            "recovered": good, "details": trials, "pass": good == len(trials)}


def cmd_chebyshev(args) -> dict:
    from .matrix import chebyshev_scan

    rings = [_ring(t) for t in args.ring]
    ns = _ints(args.n)
    if any(n < 1 or n % 2 == 0 for n in ns):
        raise UsageError("n must be odd and positive")
    out = []
    for R in rings:
        scan = chebyshev_scan(R, ns)
        out.append({"ring": R.spec_string(), "results": {str(n): v for n, v in scan.items()}})
    ok = all(v["pass"] for r in out for v in r["results"].values())
    return {"scans": out, "pass": ok}


def cmd_acceptance(args) -> dict:
    from .acceptance import CRITERIA

    which = sorted(CRITERIA) if args.criterion == "all" else [int(args.criterion)]
    out = {}
    for n in which:
        out[str(n)] = CRITERIA[n](shards=args.shards) if n == 3 else CRITERIA[n]()
    return {"criteria": {k: v["pass"] for k, v in out.items()}, "reports": out,
            "pass": all(v["pass"] for v in out.values())}


# --- plumbing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sldeform",
                                 description="Deformations of SL_n over finite local rings.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", help="write the full JSON report here")
        p.add_argument("--json", action="store_true", help="print the full report to stdout")
        p.set_defaults(func=fn)
        return p

    p = add("ring", cmd_ring, "construct and describe a ring, e.g. 'Z/5^2[x]/(x^2-5)'")
    p.add_argument("spec")
    p.add_argument("--elements", action="store_true", help="list all elements")

    p = add("relations", cmd_relations, "verify the seven transvection identities")
    p.add_argument("--ring", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, help="random instances instead of an exhaustive sweep")
    p.add_argument("--seed", type=int, default=0)

    p = add("decompose", cmd_decompose, "write a matrix as a product of transvections")
    p.add_argument("--ring", required=True)
    p.add_argument("--matrix", required=True, help="JSON rows, or a file holding them")
    p.add_argument("--ideal", help="JSON list of ideal generators; parameters must lie in it")

    p = add("h1", cmd_h1, "dimension of H^1 with adjoint coefficients for a built-in group")
    p.add_argument("--group", required=True)
    p.add_argument("--expect", type=int, help="fail unless dim H^1 equals this")

    p = add("enumerate", cmd_enumerate, "enumerate and classify lifts of a built-in group")
    p.add_argument("--group", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--expect", type=int, help="fail unless the class count equals this")

    p = add("verify-lift", cmd_verify_lift, "check an exceptional lift at finite precision")
    p.add_argument("--which", default="all", choices=["all", "sl3f2", "sl2f2", "sl2f3", "sl2f5"])
    p.add_argument("--precision", type=int, default=20)

    p = add("normalize", cmd_normalize, "normalise a lift certificate, or round-trip planted lifts")
    p.add_argument("certificate", nargs="?", help="GeneratorLift JSON (file or literal)")
    p.add_argument("--ring")
    p.add_argument("--target")
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)

    p = add("chebyshev", cmd_chebyshev, "exhaustive trace-criterion scan over M_2(R)")
    p.add_argument("--ring", action="append", required=True)
    p.add_argument("--n", default="3,5,7")

    p = add("acceptance", cmd_acceptance, "run one numbered acceptance check, or all of them")
    p.add_argument("--criterion", default="all", choices=["all"] + [str(i) for i in range(1, 8)])
    p.add_argument("--shards", type=int, default=4, help="worker processes for criterion 3")
    return ap


def _summary(report: dict) -> str:
    skip = {"reports", "representatives", "details", "elements", "word", "conjugator_chain", "schema_version"}
    parts = []
    for k, v in report.items():
        if k in skip:
            continue
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
            if len(v) > 200:
                v = v[:197] + "..."
        parts.append(f"{k}: {v}")
    return "\n".join(parts)


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    report: dict = {"schema_version": SCHEMA_VERSION, "command": args.command}
    try:
        report.update(args.func(args))
        code = 0 if report.get("pass") else 1
    except (UsageError, PresentationSyntaxError, UnsupportedPresentation) as exc:
        print(f"sldeform {args.command}: {exc}", file=sys.stderr)
        return 2
    except AlgebraError as exc:
        report.update({"pass": False, "error": type(exc).__name__, "message": str(exc)})
        witness = getattr(exc, "witness", None)
        if witness is not None:
            report["witness"] = witness
        code = 1
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text if args.json else _summary(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
