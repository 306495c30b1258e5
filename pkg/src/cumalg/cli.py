"""Batch front door: load JSON documents, run one job, write one report.

Reports are deterministic: canonical key order, tables in canonical monomial
order, no timestamps.  Exit codes: 0 success, 1 validation failure, 2 usage
error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .algebra import AlgebraError, format_scalar, parse_algebra, parse_linear_map
from .coalgebra import DEFAULT_WEIGHT_CAP, canonical_monomials
from .cumulant import (
    cumulant_context,
    defect_family,
    h3_seven_term_variant,
    vanishes_above_one,
)
from .probability import cumulants_from_moments, oracle_cumulants, parse_moments
from .transfer import (
    TransferError,
    induced_cumulant_bijection,
    parse_retract,
    parse_transfer_input,
    validate_retract,
)

WEIGHT_CAP_CEILING = 10
ROLES = ("algebra", "map", "retract", "transfer", "moments")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--weight-cap", type=int, default=DEFAULT_WEIGHT_CAP, metavar="N",
        help=f"truncation weight (default {DEFAULT_WEIGHT_CAP}, ceiling {WEIGHT_CAP_CEILING})",
    )
    common.add_argument(
        "--input", action="append", default=[], metavar="ROLE=PATH",
        help="role-tagged input document; roles: " + ", ".join(ROLES),
    )
    common.add_argument("--output", metavar="PATH", help="report destination (default stdout)")
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(
        prog="cumalg",
        description="Exact cumulant bijections on graded commutative algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check algebra and retract laws")
    sub.add_parser("lift", parents=[common], help="tabulate the cumulant bijection")
    sub.add_parser("invert", parents=[common], help="tabulate its inverse")
    defects = sub.add_parser("defects", parents=[common], help="defect coefficient tables")
    defects.add_argument("--kind", choices=("hom", "der"), required=True)
    sub.add_parser("transfer", parents=[common], help="run the retract pipeline")
    sub.add_parser("cumulants", parents=[common], help="moments to cumulants")
    return parser


def _parse_inputs(pairs) -> dict:
    inputs = {}
    for item in pairs:
        role, sep, path = item.partition("=")
        if not sep or role not in ROLES:
            raise UsageError(f"--input must look like role=path with role in {ROLES}")
        if role in inputs:
            raise UsageError(f"role {role!r} given twice")
        inputs[role] = path
    return inputs


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err}") from None
    return json.loads(text)


def _require(inputs: dict, role: str) -> str:
    if role not in inputs:
        raise UsageError(f"this command needs --input {role}=<path>")
    return inputs[role]


def _algebra_from_map_doc(doc):
    """Resolve the inline source/target presentations of a map document."""
    if not isinstance(doc, dict) or "source" not in doc:
        raise AlgebraError("map document lacks an inline 'source' algebra")
    source = parse_algebra(doc["source"])
    target_doc = doc.get("target", doc["source"])
    target = source if target_doc == doc["source"] else parse_algebra(target_doc)
    return source, target


def _selement_rows(op):
    return op.to_doc()


def cmd_validate(args, inputs):
    results = {}
    ok = True
    if "algebra" not in inputs and "retract" not in inputs:
        raise UsageError("validate needs --input algebra=... and/or retract=...")
    if "algebra" in inputs:
        doc = _load_json(inputs["algebra"])
        algebra = parse_algebra(doc)
        results["algebra"] = {"ok": True, "generators": len(algebra)}
    if "retract" in inputs:
        retract = parse_retract(_load_json(inputs["retract"]))
        report = validate_retract(retract)
        results["retract"] = report.to_doc()
        ok = ok and report.ok
    return {"results": results}, ok


def cmd_lift(args, inputs, inverse=False):
    algebra = parse_algebra(_load_json(_require(inputs, "algebra")))
    ctx = cumulant_context(algebra, args.weight_cap)
    op = ctx.tau_tilde_inverse if inverse else ctx.tau_tilde
    return {"table": _selement_rows(op)}, True


def cmd_defects(args, inputs):
    doc = _load_json(_require(inputs, "map"))
    source, target = _algebra_from_map_doc(doc)
    m = parse_linear_map(doc, source, target)
    family = defect_family(m, args.kind, cap=args.weight_cap)
    payload = {
        "kind": args.kind,
        "tables": family.to_doc(),
        "vanishes_above_1": vanishes_above_one(family),
    }
    if args.kind == "der" and args.weight_cap >= 3:
        payload["arity3_comparison"] = _arity3_comparison(m, family, args.weight_cap)
    return payload, True


def _arity3_comparison(d, family, cap):
    """Computed arity-3 table next to the seven-term variant expression."""
    A = d.source
    rows = []
    all_match = True
    for mono in canonical_monomials(A, 3):
        computed = family.coefficient(mono)
        factors = [A.generator(i) for i in mono.indices]
        variant = h3_seven_term_variant(d, A, *factors)
        match = computed == variant
        all_match = all_match and match
        rows.append(
            {
                "monomial": mono.names(A),
                "computed": computed.to_doc(),
                "variant": variant.to_doc(),
                "match": match,
            }
        )
    return {"variant_matches_everywhere": all_match, "rows": rows}


def cmd_transfer(args, inputs):
    t = parse_transfer_input(_load_json(_require(inputs, "transfer")))
    try:
        result = induced_cumulant_bijection(t, args.weight_cap)
    except TransferError as err:
        report = err.report.to_doc() if err.report is not None else {}
        return {"error": str(err), "report": report}, False
    return {"report": result.to_doc()}, result.ok


def cmd_cumulants(args, inputs):
    moments = parse_moments(_load_json(_require(inputs, "moments")))
    if len(moments) > args.weight_cap:
        raise AlgebraError(
            f"{len(moments)} moments exceed the weight cap {args.weight_cap}"
        )
    kappa = cumulants_from_moments(moments)
    reference = oracle_cumulants(moments)
    agree = kappa == reference
    payload = {
        "order": len(moments),
        "cumulants": [format_scalar(k) for k in kappa],
        "oracle": [format_scalar(k) for k in reference],
        "agree": agree,
    }
    return payload, agree


def _render_text(value, indent=0, key=None):
    pad = "  " * indent
    label = f"{key}: " if key is not None else ""
    if isinstance(value, dict):
        lines = [f"{pad}{key}:"] if key is not None else []
        for k in sorted(value):
            lines.extend(_render_text(value[k], indent + (1 if key is not None else 0), k))
        return lines
    if isinstance(value, list):
        lines = [f"{pad}{key}: ({len(value)} entries)"] if key is not None else []
        for item in value:
            sub = _render_text(item, indent + 1)
            if sub and not isinstance(item, (dict, list)):
                lines.append("  " * (indent + 1) + "- " + json.dumps(item))
            else:
                lines.extend(sub)
        return lines
    return [f"{pad}{label}{json.dumps(value)}"]


def _emit(report: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        text = "\n".join(_render_text(report)) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


HANDLERS = {
    "validate": cmd_validate,
    "lift": lambda a, i: cmd_lift(a, i, inverse=False),
    "invert": lambda a, i: cmd_lift(a, i, inverse=True),
    "defects": cmd_defects,
    "transfer": cmd_transfer,
    "cumulants": cmd_cumulants,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)

    try:
        if args.weight_cap < 1:
            raise UsageError("--weight-cap must be at least 1")
        if args.weight_cap > WEIGHT_CAP_CEILING:
            raise UsageError(
                f"--weight-cap above {WEIGHT_CAP_CEILING} is refused: partition "
                "counts grow like Bell numbers"
            )
        if args.weight_cap >= 8:
            print(
                f"warning: weight cap {args.weight_cap} is large; partition "
                "counts grow like Bell numbers",
                file=sys.stderr,
            )
        inputs = _parse_inputs(args.input)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2

    base = {"command": args.command, "weight_cap": args.weight_cap, "overflow": False}
    try:
        payload, ok = HANDLERS[args.command](args, inputs)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as err:
        report = {**base, "ok": False, "error": {"message": f"invalid JSON: {err}"}}
        _emit(report, args)
        return 1
    except AlgebraError as err:
        error = {"message": str(err)}
        witness = getattr(err, "witness", None)
        if witness:
            error["witness"] = witness
        report = {**base, "ok": False, "error": error}
        _emit(report, args)
        return 1

    report = {**base, "ok": ok, **payload}
    _emit(report, args)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
