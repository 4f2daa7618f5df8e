"""Batch command-line front end.

    folijet <normal-form|tangency|realize|check|verify>
        --input FILE --k0 INT --out FILE [--format json|csv]
        [--seed INT] [--tol-rel F] [--tol-abs F]

Exit codes: 0 success, 2 input error, 3 degenerate configuration,
4 non-generic realization, 5 internal verification failure.
Every output embeds the tool version, a hash of the effective input and the
tolerance configuration, so reruns are byte-comparable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__, schemas
from .normalform import compute_normal_form
from .realize import NonGenericConfigError, NonGenericCurveError, check_genericity, realize
from .tangency import tangency_curves
from .tolerance import ToleranceConfig
from .ufunc import DegenerateInputError, DepthError, PoleEvaluationError
from .verify import run_verification

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_NON_GENERIC = 4
EXIT_VERIFY_FAILED = 5


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folijet",
        description="normal forms, tangency-curve jets and realization for foliation pairs",
    )
    parser.add_argument("command",
                        choices=["normal-form", "tangency", "realize", "check", "verify"])
    parser.add_argument("--input", help="input JSON file (optional for verify)")
    parser.add_argument("--k0", type=int, default=None, help="override the jet order")
    parser.add_argument("--out", help="output file (stdout when omitted)")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--seed", type=int, default=0, help="seed for verify")
    parser.add_argument("--tol-rel", type=float, default=None)
    parser.add_argument("--tol-abs", type=float, default=None)
    return parser


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise schemas.SchemaError("$", f"cannot read input: {exc}") from None
    except json.JSONDecodeError as exc:
        raise schemas.SchemaError(f"$ (line {exc.lineno}, col {exc.colno})",
                                  f"malformed JSON: {exc.msg}") from None


def _config_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _emit(args, envelope: dict, csv_text: str | None = None) -> None:
    if args.format == "csv":
        if csv_text is None:
            raise schemas.SchemaError("--format", "csv export is not available for this command")
        text = csv_text
    else:
        text = json.dumps(envelope, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _override_k0(fp, k0):
    if k0 is None:
        return fp
    if k0 < 1 or k0 > fp.k0:
        raise schemas.SchemaError("--k0", f"override must be in 1..{fp.k0}")
    return type(fp)(fp.points, fp.singular, fp.tangency, fp.background, k0)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    tol = ToleranceConfig(
        abs_tol=1e-12 if args.tol_abs is None else args.tol_abs,
        rel_tol=1e-9 if args.tol_rel is None else args.tol_rel,
    )
    try:
        return _dispatch(args, tol)
    except schemas.SchemaError as exc:
        sys.stderr.write(f"folijet: input error: {exc}\n")
        return EXIT_INPUT
    except (DegenerateInputError, PoleEvaluationError, DepthError, ValueError) as exc:
        if isinstance(exc, (NonGenericConfigError, NonGenericCurveError)):
            sys.stderr.write(f"folijet: non-generic: {exc}\n")
            return EXIT_NON_GENERIC
        sys.stderr.write(f"folijet: degenerate configuration: {exc}\n")
        return EXIT_DEGENERATE


def _envelope(args, input_payload, result: dict) -> dict:
    return {
        "tool": {"name": "folijet", "version": __version__},
        "config_hash": _config_hash({
            "command": args.command,
            "input": input_payload,
            "k0": args.k0,
            "seed": args.seed,
            "tolerance": {"abs": args.tol_abs, "rel": args.tol_rel},
        }),
        "tolerance": {
            "abs": 1e-12 if args.tol_abs is None else args.tol_abs,
            "rel": 1e-9 if args.tol_rel is None else args.tol_rel,
        },
        "result": result,
    }


def _dispatch(args, tol: ToleranceConfig) -> int:
    if args.command == "verify":
        payload = _load_json(args.input) if args.input else {}
        report = run_verification(
            seed=args.seed,
            k0=args.k0 if args.k0 else payload.get("k0", 6) if isinstance(payload, dict) else 6,
        )
        _emit(args, _envelope(args, payload, report))
        return EXIT_OK if report["pass"] else EXIT_VERIFY_FAILED

    if not args.input:
        raise schemas.SchemaError("--input", "an input file is required")
    payload = _load_json(args.input)

    if args.command == "normal-form":
        fp = _override_k0(schemas.foliation_pair_from_json(payload), args.k0)
        table = compute_normal_form(fp, tol=tol)
        _emit(args, _envelope(args, payload, schemas.table_to_json(table)))
        return EXIT_OK

    if args.command == "tangency":
        fp = _override_k0(schemas.foliation_pair_from_json(payload), args.k0)
        curve = tangency_curves(fp, tol=tol)
        _emit(args, _envelope(args, payload, schemas.curve_to_json(curve)),
              csv_text=schemas.curve_to_csv(curve))
        return EXIT_OK

    if args.command == "check":
        fp = _override_k0(
            schemas.foliation_pair_from_json(payload, displacements_required=False),
            args.k0)
        cert = check_genericity(fp)
        _emit(args, _envelope(args, payload, schemas.certificate_to_json(cert)))
        return EXIT_OK if cert.verdict else EXIT_DEGENERATE

    if args.command == "realize":
        fp, curve, correction = schemas.realize_input_from_json(payload)
        fp = _override_k0(fp, args.k0)
        result = realize(fp, curve, correction=correction, tol=tol)
        _emit(args, _envelope(args, payload, schemas.realization_to_json(result)),
              csv_text=schemas.curve_to_csv(result.curve))
        return EXIT_OK

    raise schemas.SchemaError("command", f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
