"""Command line front end: ``colombeau <subcommand> ...``.

Exit codes: 0 success (Moderate/Negligible, equivalences hold), 2 NotModerate
(or failed checks), 3 Indeterminate, 1 usage, parse or precondition errors.
Data goes to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import ColombeauError, InsufficientPrecisionError
from .nets import BoxDomain, CompactBox

EXIT_OK, EXIT_ERROR, EXIT_NOT_MODERATE, EXIT_INDETERMINATE = 0, 1, 2, 3
# options whose values may start with a minus sign
_VALUE_OPTIONS = ("--box", "--point", "--scale", "--domain")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _scale(text):
    from .order import EpsilonScale
    try:
        return EpsilonScale.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _floats(text: str) -> list:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def parse_box(text: str) -> CompactBox:
    """``a,b`` for an interval; ``a,b:c,d`` for a product of intervals."""
    lo, hi = [], []
    for part in text.split(":"):
        v = _floats(part)
        if len(v) != 2 or not v[0] <= v[1]:
            raise UsageError(f"box side {part!r} must be 'lower,upper' with lower <= upper")
        lo.append(v[0])
        hi.append(v[1])
    return CompactBox(tuple(lo), tuple(hi))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--scale", type=_scale, default=None, help="eps0,ratio,count")
    common.add_argument("--grid", type=_positive_int, default=None, help="grid intervals per axis")
    common.add_argument("--seed", type=int, default=7)
    common.add_argument("--out", type=Path, default=None, help="write data here instead of stdout")

    p = _Parser(prog="colombeau", description="generalized functions and asymptotic maps workbench")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", parents=[common], help="moderateness verdict of a net")
    c.add_argument("--net", required=True,
                   help="distribution (delta, delta', heaviside, pv, abs, smooth:NAME) or an expression")
    c.add_argument("--box", action="append", default=None, help="compact box a,b[:c,d...]; repeatable")
    c.add_argument("--alpha", type=int, default=1, help="largest derivative order tested")
    c.add_argument("--moments", type=int, default=4, help="vanishing moments of the mollifier")
    c.add_argument("--domain", default=None, help="open domain a,b[:c,d...] for expressions")

    e = sub.add_parser("embed-pair", parents=[common], help="pairings of an embedded distribution")
    e.add_argument("--dist", required=True)
    e.add_argument("--moments", type=int, default=4)
    e.add_argument("--testfn", default="0", help="0, 1, 2 (built-in bumps) or 'zero'")

    f = sub.add_parser("field", parents=[common], help="asymptotic number arithmetic")
    f.add_argument("expr")

    r = sub.add_parser("retract", parents=[common], help="cube retraction onto L")
    r.add_argument("--n", type=int, default=0)
    r.add_argument("--point", default=None, help="u_1,...,u_{n+2}")
    r.add_argument("--eps", type=float, default=None, help="also evaluate the mollified retraction")

    h = sub.add_parser("hep", parents=[common], help="homotopy extension over a cell complex")
    h.add_argument("--complex", type=Path, default=None, help="problem file (default: circle demo)")
    h.add_argument("--h", dest="h_override", default=None,
                   help="replace h on every base point: component expressions in t separated by ';'")
    h.add_argument("--csv-eps", type=float, default=0.1, help="eps level for the CSV export")

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    s.add_argument("--only", default=None, help="comma-separated criterion numbers")
    return p


def _normalise(argv: list) -> list:
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


# subcommands ---------------------------------------------------------------------


def _net_for(spec: str, moments: int, domain_text: str | None):
    from .distributions import embed, make_mollifier, parse_distribution
    from .errors import ParseError
    from .exprs import expression_net, parse_expression
    try:
        u = parse_distribution(spec)
    except ParseError:
        u = None
    if u is not None:
        return embed(u, make_mollifier(moments))
    node = parse_expression(spec)
    dim = _expression_dim(node)
    if domain_text:
        box = parse_box(domain_text)
        domain = BoxDomain.open(box.lower, box.upper)
    else:
        domain = BoxDomain.open((-4.0,) * dim, (4.0,) * dim)
    return expression_net(spec, domain)


def _expression_dim(node) -> int:
    used = [-1]

    def walk(n):
        if n.kind == "var":
            used.append(n.value)
        for a in n.args:
            walk(a)
    walk(node)
    return max(used) + 1 if max(used) >= 0 else 1


def cmd_classify(args) -> int:
    from .order import EpsilonScale, classify
    net = _net_for(args.net, args.moments, args.domain)
    boxes = [parse_box(b) for b in (args.box or ["-1,1"])]
    if net.dim != 1 and not args.box:
        boxes = [CompactBox((-1.0,) * net.dim, (1.0,) * net.dim)]
    for K in boxes:
        if K.dim != net.dim:
            raise UsageError(f"box {K.to_json()} has dimension {K.dim}, the net has {net.dim}")
        if not K.inside(net.domain):
            raise UsageError(f"box {K.to_json()} is not inside the domain of the net")
    if args.alpha < 0:
        raise UsageError("--alpha must be non-negative")
    verdict = classify(net, boxes, args.alpha, args.scale or EpsilonScale(), grid_per_axis=args.grid)
    out = verdict.to_json()
    out["net"] = args.net
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return {"Moderate": EXIT_OK, "Negligible": EXIT_OK, "NotModerate": EXIT_NOT_MODERATE}.get(
        verdict.kind, EXIT_INDETERMINATE)


def cmd_embed_pair(args) -> int:
    from .distributions import (default_test_functions, make_mollifier, pairing_errors,
                                parse_distribution, zero_test_function)
    from .order import EpsilonScale
    u = parse_distribution(args.dist)
    if args.testfn == "zero":
        psi = zero_test_function()
    else:
        fns = default_test_functions()
        try:
            psi = fns[int(args.testfn)]
        except (ValueError, IndexError) as exc:
            raise UsageError(f"--testfn must be 0..{len(fns) - 1} or 'zero'") from exc
    scale = args.scale or EpsilonScale(0.25, 0.75, 8)
    ref, rows, est = pairing_errors(u, make_mollifier(args.moments), psi, scale)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "pairing", "reference", "abs_error"])
    for eps, val, err in rows:
        w.writerow([f"{eps:.12g}", f"{val:.12g}", f"{ref:.12g}", f"{err:.6g}"])
    decay = -est.exponent
    w.writerow(["decay_exponent", "inf" if math.isinf(decay) else f"{decay:.4f}",
                f"fit={est.fit_quality:.4f}", est.marker or ""])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_field(args) -> int:
    from .field import evaluate_command
    lines = evaluate_command(args.expr)
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_retract(args) -> int:
    from .homotopy import mollified_retraction, retraction
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    d = args.n + 2
    if args.point is not None:
        U = np.array([_floats(args.point)])
        if U.shape[1] != d:
            raise UsageError(f"--point needs {d} coordinates for n={args.n}")
    else:
        g = np.linspace(0.0, 1.0, (args.grid or 8) + 1)
        U = np.stack(np.meshgrid(*([g] * d), indexing="ij"), -1).reshape(-1, d)
    r = retraction(args.n, U)
    cols = [f"u{i}" for i in range(d)] + [f"r{i}" for i in range(d)]
    rows = [np.concatenate([U, r], axis=1)]
    if args.eps is not None:
        R = mollified_retraction(args.n)
        cols += [f"R{i}" for i in range(d)]
        rows.append(R.values(args.eps, U))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in np.concatenate(rows, axis=1):
        w.writerow([f"{x:.12g}" for x in row])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_hep(args) -> int:
    from .homotopy import (PieceMap, demo_path, expression_piece, extend_homotopy, hep_report,
                           problem_from_json)
    path = args.complex or demo_path()
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc
    X, f, h, target = problem_from_json(data)
    if args.h_override is not None:
        comps = [c.strip() for c in args.h_override.split(";")]
        if len(comps) != target.dim:
            raise UsageError(f"--h needs {target.dim} components separated by ';'")
        h = PieceMap([expression_piece(comps, ("t",)) for _ in range(X.n_base)], target.dim)
    H = extend_homotopy(X, f, h, target)
    rep = hep_report(H, scale=args.scale) if args.scale else hep_report(H)
    if args.out is not None:
        args.out.write_text(H.to_csv(args.csv_eps, per_axis=args.grid or 8))
    sys.stdout.write(json.dumps(rep.to_json(), indent=2) + "\n")
    return EXIT_OK if rep.order >= 1 else EXIT_NOT_MODERATE


def cmd_selftest(args) -> int:
    from . import acceptance
    only = None
    if args.only:
        only = {int(x) for x in args.only.split(",")}
    results = acceptance.run(args.seed, only)
    _emit(acceptance.report(results), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NOT_MODERATE


COMMANDS = {"classify": cmd_classify, "embed-pair": cmd_embed_pair, "field": cmd_field,
            "retract": cmd_retract, "hep": cmd_hep, "selftest": cmd_selftest}


def main(argv=None) -> int:
    argv = _normalise(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"colombeau: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except InsufficientPrecisionError as exc:
        print(f"colombeau: error: {exc} (blocking exponent {exc.exponent})", file=sys.stderr)
        return EXIT_ERROR
    except (ColombeauError, ValueError, ZeroDivisionError) as exc:
        cell = getattr(exc, "cell", None)
        where = f" [cell {cell}]" if cell is not None else ""
        print(f"colombeau: error{where}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
