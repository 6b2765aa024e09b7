"""Command-line front end.

Exit status: 0 when a computation succeeds or a check passes, 1 when a check
finds a mathematical defect, 2 for unusable input. Reports go to stdout;
elapsed time goes to stderr so that stdout is reproducible.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .action import ActionDefect, load_action, pointwise_bracket
from .extension import ExtensionError, kk_embed, load_extension, verify_embedding
from .fundamental import DEFAULT_ORDER, format_t_table, fundamental_jet, t_coefficients
from .lie import LieValidationError, lie_to_json, load_lie
from .polyjet import NotSummableError, TruncationError, jet_from_json, jet_to_json, pretty
from .spaces import DimensionError, format_rational
from .suites import SUITES, run_suites
from .vectorfield import bracket_S
from .wreath import (
    WreathAlgebra,
    element_from_json,
    element_to_json,
    fundamental_wreath,
    triangular_field,
    wreath_bracket,
)


class InputError(Exception):
    pass


class Failure(Exception):
    """A mathematical check failed; ``report`` carries the witnesses."""

    def __init__(self, report):
        super().__init__("check failed")
        self.report = report


def _load_json_arg(value: str, what: str):
    """A JSON document given inline or as a path."""
    path = Path(value)
    try:
        text = path.read_text() if path.exists() else value
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: not a JSON file or inline JSON ({exc.msg})") from None


def _lie(ref: str, what: str):
    try:
        return load_lie(ref)
    except FileNotFoundError as exc:
        raise InputError(f"{what}: {exc}") from None
    except LieValidationError as exc:
        raise InputError(f"{what}: invalid Lie algebra: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{what}: {exc}") from None


def _jet_text(j) -> str:
    head = f"order {j.order}, valid through degree {j.valid_order}" + (" (polynomial)" if j.polynomial else "")
    return head + "\n" + pretty(j)


def _element_text(u, W) -> str:
    b = ", ".join(f"{format_rational(c)}·{lab}" for c, lab in zip(u.b, W.B.labels) if c) or "0"
    return f"f: {_jet_text(u.f)}\nb: {b}"


# ---------------------------------------------------------------------------
# commands; each returns (status, payload, text)


def cmd_check_lie(args):
    try:
        L = load_lie(args.file)
    except LieValidationError as exc:
        raise Failure({"kind": exc.kind, "indices": list(exc.indices),
                       "defect": [format_rational(c) for c in exc.defect], "message": str(exc)})
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from None
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"file: {exc}") from None
    return "pass", lie_to_json(L), f"pass: {L.name or args.file} is a Lie algebra of dimension {L.dim}"


def cmd_tcoeffs(args):
    vals = t_coefficients(args.order)
    return "computed", [format_rational(v) for v in vals], format_t_table(vals)


def cmd_fundamental(args):
    B = _lie(args.lie, "lieB")
    try:
        b = B.element(args.elem)
    except (ValueError, DimensionError) as exc:
        raise InputError(f"--elem: {exc}") from None
    j = fundamental_jet(B, b, args.order)
    return "computed", jet_to_json(j), _jet_text(j)


def _parse_jet(value, what, source=None, target=None):
    try:
        return jet_from_json(_load_json_arg(value, what), source=source, target=target)
    except (ValueError, DimensionError) as exc:
        raise InputError(f"{what}: {exc}") from None


def cmd_series_bracket(args):
    if args.lie is None:
        f = _parse_jet(args.lhs, "--lhs")
        g = _parse_jet(args.rhs, "--rhs", source=f.source, target=f.target)
        try:
            res = bracket_S(f, g)
        except DimensionError as exc:
            raise InputError(f"--lhs/--rhs: {exc}") from None
    else:
        A = _lie(args.lie, "lieA")
        f = _parse_jet(args.lhs, "--lhs", target=A.space)
        g = _parse_jet(args.rhs, "--rhs", source=f.source, target=A.space)
        res = pointwise_bracket(f, g, A)
    return "computed", jet_to_json(res), _jet_text(res)


def _wreath(args) -> WreathAlgebra:
    A, B = _lie(args.lieA, "lieA"), _lie(args.lieB, "lieB")
    if getattr(args, "action", None):
        try:
            d = load_action(args.action)
        except (ValueError, ActionDefect, FileNotFoundError) as exc:
            raise InputError(f"--action: {exc}") from None
        if d.algebra != B:
            raise InputError("--action: the action must be an action of lieB")
        return WreathAlgebra(A, B, d.space, d, args.order)
    return fundamental_wreath(A, B, args.order)


def _element(value, what, W):
    try:
        return element_from_json(_load_json_arg(value, what), W)
    except (ValueError, DimensionError) as exc:
        raise InputError(f"{what}: {exc}") from None


def cmd_wreath_bracket(args):
    W = _wreath(args)
    u, v = _element(args.lhs, "--lhs", W), _element(args.rhs, "--rhs", W)
    res = wreath_bracket(u, v, W)
    return "computed", element_to_json(res), _element_text(res, W)


def cmd_triangular(args):
    try:
        D = load_action(args.action_file)
    except (ValueError, ActionDefect, FileNotFoundError) as exc:
        raise InputError(f"actionD: {exc}") from None
    W = _wreath(args)
    if D.algebra != W.A:
        raise InputError("actionD: the action must be an action of lieA")
    u = _element(args.elem, "--elem", W)
    res = triangular_field(W, D, u)
    return "computed", jet_to_json(res), _jet_text(res)


def cmd_kk_embed(args):
    try:
        ext = load_extension(args.ext)
    except ExtensionError as exc:
        raise InputError(f"ext: {exc}") from None
    except (ValueError, FileNotFoundError, LieValidationError) as exc:
        raise InputError(f"ext: {exc}") from None
    try:
        c = ext.C.element(args.elem)
    except (ValueError, DimensionError) as exc:
        raise InputError(f"--elem: {exc}") from None
    u = kk_embed(ext, c, args.order)
    payload = element_to_json(u)
    W = fundamental_wreath(ext.A, ext.B, args.order) if args.verify else None
    text = f"f: {_jet_text(u.f)}\nb: {', '.join(format_rational(x) for x in u.b)}"
    if args.verify:
        rep = verify_embedding(ext, args.order, W)
        payload = {"element": payload, "verification": rep}
        if not rep["ok"]:
            raise Failure(payload)
        text += f"\nverify: pass ({len(rep['homomorphism'])} basis pairs, rank {rep['rank']})"
        return "pass", payload, text
    return "computed", payload, text


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    rep = run_suites(names, order=args.order, seed=args.seed, max_m=args.max_m)
    if rep["status"] != "pass":
        raise Failure(rep)
    lines = []
    for name in names:
        cells = [c for c in rep["cells"] if c["suite"] == name]
        lines.append(f"{name}: pass ({len(cells)} cells)")
    lines.append(f"all {len(rep['cells'])} cells pass")
    return "pass", rep, "\n".join(lines)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liewreath", description="Exact computations with formal series, "
                                 "formal vector fields and wreath products of Lie algebras.")
    ap.add_argument("--json", action="store_true", help="emit JSON instead of text")
    sub = ap.add_subparsers(dest="command", required=True)

    def order_arg(p, default=DEFAULT_ORDER):
        p.add_argument("--order", type=int, default=default, help=f"truncation order (default {default})")

    p = sub.add_parser("check-lie", help="validate a Lie algebra table")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check_lie)

    p = sub.add_parser("tcoeffs", help="coefficients of T e^T/(e^T - 1)")
    order_arg(p)
    p.set_defaults(fn=cmd_tcoeffs)

    p = sub.add_parser("fundamental", help="jet d_b of the fundamental action")
    p.add_argument("lie")
    p.add_argument("--elem", required=True, help="basis label or comma-separated coordinates")
    order_arg(p)
    p.set_defaults(fn=cmd_fundamental)

    p = sub.add_parser("series-bracket", help="bracket in S(X), or pointwise in A[[Y]] when lieA is given")
    p.add_argument("lie", nargs="?")
    p.add_argument("--lhs", required=True, help="jet JSON (file or inline)")
    p.add_argument("--rhs", required=True)
    p.set_defaults(fn=cmd_series_bracket)

    p = sub.add_parser("wreath-bracket", help="bracket in W(A,B;d)")
    p.add_argument("lieA")
    p.add_argument("lieB")
    order_arg(p)
    p.add_argument("--lhs", required=True, help="element JSON {\"f\": jet, \"b\": {\"coords\": [...]}}")
    p.add_argument("--rhs", required=True)
    p.add_argument("--action", help="action of B (default: the fundamental action)")
    p.set_defaults(fn=cmd_wreath_bracket)

    p = sub.add_parser("triangular", help="vector field Δ_(f,b) on X×Y")
    p.add_argument("action_file", metavar="actionD")
    p.add_argument("lieA")
    p.add_argument("lieB")
    p.add_argument("--elem", required=True)
    p.add_argument("--action", help="action of B (default: the fundamental action)")
    order_arg(p)
    p.set_defaults(fn=cmd_triangular)

    p = sub.add_parser("kk-embed", help="image of c under the embedding C -> W(A,B)")
    p.add_argument("ext")
    p.add_argument("--elem", required=True)
    p.add_argument("--verify", action="store_true", help="also verify the embedding")
    order_arg(p)
    p.set_defaults(fn=cmd_kk_embed)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    order_arg(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-m", type=int, default=12)
    p.set_defaults(fn=cmd_verify)
    return ap


def run_command(argv) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "order", 0) < 0 or (args.command == "verify" and args.order < 2):
        print("error: --order out of range", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        status, payload, text = args.fn(args)
        code = 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Failure as exc:
        status, payload, code = "fail", exc.report, 1
        text = "fail\n" + json.dumps(exc.report, indent=2, default=str)
    except (TruncationError, NotSummableError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    elapsed = (time.perf_counter() - start) * 1000
    if args.json:
        print(json.dumps({"status": status, "payload": payload}, indent=2, default=str))
    else:
        print(text)
    print(f"time: {elapsed:.1f} ms", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
