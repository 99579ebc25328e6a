"""Command line front end: ``koszulprop <subcommand> [options]``.

Exit codes: 0 success or positive verdict, 1 negative verdict or failed
check, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .barcobar import bar_complex, cobar_complex
from .graphs import GraphError, enumerate_graphs
from .koszul import (
    VERDICT_YES,
    augmented_bar_weight,
    bar_cobar_check,
    dual_component,
    koszul_check,
    koszul_complex_weight,
    parallel_map,
)
from .linalg import DifferentialError
from .presets import PRESET_NAMES, EXTRA_PRESETS, GebraStructure, PresentationError, gebra_check, load_preset, parse_presentation
from .propcalc import TruncationParams, free_prop_component, quotient_dim


class UsageError(Exception):
    pass


def _parser():
    p = argparse.ArgumentParser(prog="koszulprop", description="Quadratic PROPs, bar/cobar and Koszul checks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [("dims", "dimensions of the quotient P(m,n)_(w)"),
                        ("free", "dimensions of the free PROP on the generators"),
                        ("dual", "dimensions of the Koszul dual"),
                        ("d2", "verify d^2 = 0 for bar, cobar, Koszul and augmented bar differentials"),
                        ("koszul", "Koszul criterion report"),
                        ("barcobar", "bar-cobar resolution and augmented bar acyclicity"),
                        ("gebra", "check a gebra structure against the relations")]:
        s = sub.add_parser(name, help=help_)
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--preset", choices=PRESET_NAMES + EXTRA_PRESETS)
        src.add_argument("--file", type=Path, help="presentation JSON file")
        s.add_argument("--max-weight", type=int, default=3)
        s.add_argument("--max-biarity", type=int, default=6)
        s.add_argument("--component", help="restrict to one component, as m,n")
        s.add_argument("--format", choices=("text", "json"), default="text")
        s.add_argument("--jobs", type=int, default=1, help="worker processes (env KOSZULPROP_JOBS overrides)")
        if name == "gebra":
            s.add_argument("--structure", type=Path, required=True, help="gebra structure JSON file")
    return p


def _presentation(args):
    if args.preset:
        return load_preset(args.preset)
    try:
        return parse_presentation(args.file.read_text())
    except OSError as e:
        raise UsageError(f"cannot read {args.file}: {e.strerror}") from None


def _components(args, trunc):
    if args.component:
        try:
            m, n = (int(x) for x in args.component.split(","))
        except ValueError:
            raise UsageError(f"--component expects m,n, got {args.component!r}") from None
        if m < 1 or n < 1 or m + n > trunc.max_biarity:
            raise UsageError(f"component ({m},{n}) outside the truncation")
        return [(m, n)]
    return trunc.components()


# -- per-component workers (top level so they pickle) -------------------------

def _dims_rows(task):
    pres, m, n, W, kind = task
    rows = []
    for w in range(1, W + 1):
        if kind == "dims":
            d = quotient_dim(pres, m, n, w)
        elif kind == "free":
            d = free_prop_component(pres.signature, m, n, w).dim
        else:
            d = dual_component(pres, m, n, w).dim
        if d or enumerate_graphs(pres.signature, m, n, w):
            rows.append({"m": m, "n": n, "weight": w, "dim": d})
    return rows


def _d2_rows(task):
    pres, m, n, W = task
    rows = []
    for w in range(1, W + 1):
        row = {"m": m, "n": n, "weight": w}
        try:
            bar_complex(pres, m, n, w).complex.check_d_squared()
            row["bar"] = True
        except DifferentialError:
            row["bar"] = False
        row["cobar"] = cobar_complex(pres, m, n, w).d_squared_zero()
        row["koszul"] = all(koszul_complex_weight(pres, m, n, w, top).checks["d_squared"] for top in (True, False))
        try:
            for top in (True, False):
                augmented_bar_weight(pres, m, n, w, top).check_d_squared()
            row["augmented_bar"] = True
        except DifferentialError:
            row["augmented_bar"] = False
        rows.append(row)
    return rows


def _barcobar_rows(task):
    from .koszul import augmented_bar_acyclicity
    pres, m, n, W = task
    trunc = TruncationParams(W, max(2, m + n))
    res = bar_cobar_check(pres, m, n, trunc)
    aug = augmented_bar_acyclicity(pres, m, n, trunc)
    rows = []
    for w in range(1, W + 1):
        r = res["weights"][w]
        rows.append({"m": m, "n": n, "weight": w, "cobar_homology": r["homology"], "dim_P": r["dim_P"],
                     "resolution": r["ok"], "augmented_bar_homology": aug["weights"][w]["homology"],
                     "augmented_acyclic": not any(aug["weights"][w]["homology"])})
    return rows


def _sorted(rows):
    return sorted(rows, key=lambda r: (r["m"] + r["n"], r["m"], r["weight"]))


def _emit(args, doc, text_lines, out):
    if args.format == "json":
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(text_lines) + "\n")


def _table(rows, cols):
    lines = ["  ".join(f"{c:>8}" for c in cols)]
    for r in rows:
        lines.append("  ".join(f"{str(r[c]):>8}" for c in cols))
    return lines


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        if args.max_weight < 1 or args.max_biarity < 1:
            raise UsageError("truncation bounds must be >= 1")
        trunc = TruncationParams(args.max_weight, args.max_biarity)
        pres = _presentation(args)
        comps = _components(args, trunc)
        return _dispatch(args, pres, trunc, comps, out)
    except (UsageError, PresentationError, GraphError) as e:
        print(f"koszulprop: error: {e}", file=sys.stderr)
        return 2


def _dispatch(args, pres, trunc, comps, out) -> int:
    W = trunc.max_weight
    head = {"presentation": pres.name, "max_weight": W, "max_biarity": trunc.max_biarity}
    cmd = args.command
    if cmd in ("dims", "free", "dual"):
        rows = _sorted(r for rs in parallel_map(_dims_rows, [(pres, m, n, W, cmd) for m, n in comps], args.jobs)
                       for r in rs)
        _emit(args, {**head, "command": cmd, "rows": rows},
              [f"{cmd} for {pres.name}"] + _table(rows, ["m", "n", "weight", "dim"]), out)
        return 0
    if cmd == "d2":
        rows = _sorted(r for rs in parallel_map(_d2_rows, [(pres, m, n, W) for m, n in comps], args.jobs) for r in rs)
        ok = all(r[k] for r in rows for k in ("bar", "cobar", "koszul", "augmented_bar"))
        lines = [f"d^2 = 0 checks for {pres.name}"] + _table(rows, ["m", "n", "weight", "bar", "cobar", "koszul", "augmented_bar"])
        lines.append("all differentials square to zero" if ok else "FAILED: some differential does not square to zero")
        _emit(args, {**head, "command": cmd, "rows": rows, "ok": ok}, lines, out)
        return 0 if ok else 1
    if cmd == "koszul":
        if args.component:
            trunc_c = TruncationParams(W, max(trunc.max_biarity, 2))
            rep = koszul_check(pres, trunc_c, jobs=args.jobs, components=comps)
        else:
            rep = koszul_check(pres, trunc, jobs=args.jobs)
        _emit(args, {**rep.to_dict(), "command": cmd}, rep.lines(), out)
        return 0 if rep.verdict == VERDICT_YES else 1
    if cmd == "barcobar":
        rows = _sorted(r for rs in parallel_map(_barcobar_rows, [(pres, m, n, W) for m, n in comps], args.jobs)
                       for r in rs)
        ok = all(r["resolution"] and r["augmented_acyclic"] for r in rows)
        lines = [f"bar-cobar check for {pres.name}"] + _table(
            rows, ["m", "n", "weight", "dim_P", "cobar_homology", "augmented_bar_homology"])
        lines.append("resolution holds within truncation" if ok else "FAILED: resolution does not hold")
        _emit(args, {**head, "command": cmd, "rows": rows, "ok": ok}, lines, out)
        return 0 if ok else 1
    if cmd == "gebra":
        try:
            S = GebraStructure.from_document(args.structure.read_text(), pres.signature)
        except OSError as e:
            raise UsageError(f"cannot read {args.structure}: {e.strerror}") from None
        except (KeyError, ValueError, TypeError) as e:
            raise UsageError(f"malformed gebra structure: {e}") from None
        rep = gebra_check(pres, S)
        doc = {**head, "command": cmd, "passed": rep.passed, "relations": rep.relations, "equivariance": rep.equivariance}
        _emit(args, doc, rep.lines() + ["gebra: " + ("pass" if rep.passed else "FAIL")], out)
        return 0 if rep.passed else 1
    raise UsageError(f"unknown command {cmd}")


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
