"""Command line front end: verification runs, module construction, loop
spectra, character formulas, and cache exports.

Exit codes: 0 everything checked out, 1 at least one failed check or
recorded finding, 2 bad configuration or arguments.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .characters import CharacterError
from .harness import PlanError, VerificationPlan


def parse_label(text):
    """Weight labels like "2,1,0|-1"; a plain comma list also works."""
    text = text.strip()
    if "|" in text:
        head, _, tail = text.partition("|")
        parts = head.split(",") + [tail]
    else:
        parts = text.split(",")
    try:
        lab = tuple(int(p.strip()) for p in parts)
    except ValueError as e:
        raise ValueError(f"bad label {text!r}: {e}") from None
    if len(lab) != 4:
        raise ValueError(f"label needs four entries, got {text!r}")
    return lab


def parse_ints(text):
    return tuple(int(p.strip()) for p in text.split(",") if p.strip())


def _emit(obj, out_path=None):
    blob = json.dumps(obj, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(blob + "\n")
    else:
        print(blob)


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="superkoszul",
        description="exact checks for the double complex on a super vector "
                    "space and its module constructions",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification plan")
    v.add_argument("--m", type=int, default=3)
    v.add_argument("--n", type=int, default=1)
    v.add_argument("--max-k", type=int, default=4)
    v.add_argument("--max-l", type=int, default=4)
    v.add_argument("--max-i", type=int, default=3)
    v.add_argument("--max-a", type=int, default=3)
    v.add_argument("--max-p", type=int, default=3)
    v.add_argument("--max-r", type=int, default=3)
    v.add_argument("--dim-cap", type=int, default=3000)
    v.add_argument("--checks", default=",".join(harness.CHECK_GROUPS),
                   help="comma separated subset of: "
                        + ", ".join(harness.CHECK_GROUPS))
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--cache-dir", default=None)
    v.add_argument("--json", dest="json_out", default=None,
                   help="write the full report to this file")

    c = sub.add_parser("construct", help="build a named module and verify it")
    c.add_argument("name", help="H31, ImD, Mmp, Ysummand, Z1, Zk, Mfinal, "
                                "or Ilambda")
    c.add_argument("params", nargs="*",
                   help="integers; for Ilambda one comma-separated partition")
    c.add_argument("--json", dest="json_out", default=None)

    s = sub.add_parser("spectrum", help="exact spectrum of a loop operator")
    s.add_argument("kind", choices=["delPQd", "PdeldQ"])
    s.add_argument("params", nargs="+", type=int,
                   help="(i, a) for delPQd; (i, k, a) for PdeldQ")
    s.add_argument("--json", dest="json_out", default=None)

    ch = sub.add_parser("character", help="evaluate a character formula")
    ch.add_argument("formula",
                    choices=["typical", "atypical", "auto", "kac", "schur"])
    ch.add_argument("label",
                    help='weight label "2,1,0|-1", or a partition for schur')
    ch.add_argument("--json", dest="json_out", default=None)

    e = sub.add_parser("export", help="re-export a cached or computed object")
    esub = e.add_subparsers(dest="what", required=True)
    em = esub.add_parser("matrix")
    em.add_argument("which", choices=["d", "del", "P", "Q"])
    em.add_argument("pair", help='degree pair "k,l"')
    em.add_argument("alphabet", nargs="?", default="3,1", help='"m,n"')
    em.add_argument("--cache-dir", default=None)
    em.add_argument("--out", default=None)
    eb = esub.add_parser("basis")
    eb.add_argument("kind", choices=["sym", "alt"])
    eb.add_argument("degree", type=int)
    eb.add_argument("alphabet", nargs="?", default="3,1")
    eb.add_argument("--dual", action="store_true")
    eb.add_argument("--out", default=None)
    er = esub.add_parser("report")
    er.add_argument("key", nargs="?", default="last")
    er.add_argument("--cache-dir", default=None)
    er.add_argument("--out", default=None)
    return ap


def _cmd_verify(args):
    plan = VerificationPlan(
        m=args.m, n=args.n,
        max_k=args.max_k, max_l=args.max_l,
        max_i=args.max_i, max_a=args.max_a,
        max_p=args.max_p, max_r=args.max_r,
        dim_cap=args.dim_cap,
        checks=tuple(c.strip() for c in args.checks.split(",") if c.strip()),
        jobs=args.jobs,
        cache_dir=args.cache_dir,
    )
    report = harness.run(plan)
    blob = report.to_json()
    harness.store_report(blob, args.cache_dir)
    if args.json_out:
        _emit(blob, args.json_out)
    s = report.summary
    print(f"pass {s['pass']}  fail {s['fail']}  skip {s['skip']}  "
          f"findings {s['findings']}")
    for f in report.findings:
        print(f"finding [{f['claim']}] {f['description']}")
    if not args.json_out:
        for r in report.records:
            if r["status"] == "fail":
                print(f"FAIL [{r['claim']}] {json.dumps(r['params'])}")
    return report.exit_code()


def _cmd_construct(args):
    name = args.name
    if name.lower() == "ilambda":
        if len(args.params) != 1:
            raise ValueError("Ilambda takes one comma-separated partition")
        params = parse_ints(args.params[0])
        if args.params[0].strip() == "1,1,1,-1":
            params = (1, 1, 1, -1)
    else:
        params = tuple(int(p) for p in args.params)
    out = harness.construct_report(name, params)
    _emit(out, args.json_out)
    return 0 if out["ok"] else 1


def _cmd_spectrum(args):
    out = harness.spectrum_report(args.kind, tuple(args.params))
    _emit(out, args.json_out)
    if not out["ok"]:
        return 1
    return 0 if out["matches_stated"] in (True, None) else 1


def _cmd_character(args):
    if args.formula == "schur":
        label = parse_ints(args.label)
    else:
        label = parse_label(args.label)
    out = harness.character_report(args.formula, label)
    _emit(out, args.json_out)
    return 0


def _cmd_export(args):
    if args.what == "matrix":
        out = harness.export_matrix(
            args.which, parse_ints(args.pair), parse_ints(args.alphabet),
            cache_dir=args.cache_dir)
    elif args.what == "basis":
        out = harness.export_basis(
            args.kind, args.degree, parse_ints(args.alphabet),
            dual=args.dual)
    else:
        out = harness.export_report(args.key, cache_dir=args.cache_dir)
    _emit(out, args.out)
    return 0


def main(argv=None):
    ap = _build_parser()
    args = ap.parse_args(argv)
    handlers = {
        "verify": _cmd_verify,
        "construct": _cmd_construct,
        "spectrum": _cmd_spectrum,
        "character": _cmd_character,
        "export": _cmd_export,
    }
    try:
        return handlers[args.command](args)
    except (PlanError, CharacterError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
