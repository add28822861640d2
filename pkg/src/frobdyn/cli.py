"""Command-line client for the analysis operations.

Runs the shared service handlers in-process by default; with --server the
same request documents are POSTed to a running HTTP service instead. Output
is deterministic JSON (sorted keys); orbit tables can be written as CSV.

Exit codes: 0 success, 2 input error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .errors import DomainError, FrobdynError, InternalError, Unsupported
from .service import handlers

_ENDPOINTS = {
    "analyze": "/analyze",
    "simulate": "/simulate",
    "reduce": "/reduce",
    "jordan": "/jordan",
    "fset-member": "/fset-member",
    "count-frobeq": "/count-frobeq",
}


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc})") from exc


def _emit(result: dict, args) -> None:
    text = json.dumps(result, indent=2, sort_keys=True)
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_orbit_csv(result: dict, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "exponents", "torsion", "modulus"])
        for row in result["rows"]:
            writer.writerow(
                [
                    row["step"],
                    json.dumps(row["exponents"]),
                    json.dumps(row["torsion"]),
                    row["modulus"],
                ]
            )


def _dispatch(command: str, payload: dict, server: str | None) -> dict:
    if server is None:
        handler = {
            "analyze": handlers.handle_analyze,
            "simulate": handlers.handle_simulate,
            "reduce": handlers.handle_reduce,
            "jordan": handlers.handle_jordan,
            "fset-member": handlers.handle_fset_member,
            "count-frobeq": handlers.handle_count_frobeq,
        }[command]
        result = handler(payload)
        if command == "analyze":
            return {"verdict": result}
        return result
    import httpx

    url = server.rstrip("/") + _ENDPOINTS[command]
    resp = httpx.post(url, json=payload, timeout=600.0)
    if resp.status_code == 422:
        raise DomainError(resp.json().get("detail", resp.text))
    if resp.status_code >= 500:
        raise InternalError(resp.json().get("detail", resp.text))
    resp.raise_for_status()
    return resp.json()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frobdyn",
        description="Exact dense-orbit analysis for self-maps of split "
        "algebraic tori and semiabelian factor products",
    )
    parser.add_argument(
        "--server",
        help="base URL of a running service; without it requests run in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="run the full A/B/C verdict")
    pa.add_argument("file", help="system description JSON")
    pa.add_argument("--d", type=int, help="override the transcendence degree")
    pa.add_argument("--json", help="write the report to a file")
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--steps", type=int, default=50, help="orbit length for evidence")
    pa.add_argument("--degree-bound", type=int, default=3)
    pa.add_argument("--m-bound", type=int, default=24)
    pa.add_argument("--spec-trials", type=int, default=5)
    pa.add_argument("--index-bound", type=int, default=64)

    ps = sub.add_parser("simulate", help="simulate an orbit")
    ps.add_argument("file")
    ps.add_argument("--start", help="comma-separated coordinate literals")
    ps.add_argument("--steps", type=int, default=10)
    ps.add_argument(
        "--torsion-rule",
        choices=["deterministic", "enumerate"],
        default="deterministic",
    )
    ps.add_argument("--csv", help="write the orbit table as CSV")
    ps.add_argument("--json", help="write the orbit as JSON")

    pr = sub.add_parser("reduce", help="compute the normal form")
    pr.add_argument("file")
    pr.add_argument("--json")

    pj = sub.add_parser("jordan", help="Jordan form of a matrix over a ring")
    pj.add_argument("file", help="JSON with q, ring and matrix")
    pj.add_argument("--json")

    pf = sub.add_parser("fset-member", help="decide F-set membership")
    pf.add_argument("point", help="point JSON (exponents/torsion)")
    pf.add_argument("fset", help="F-set JSON including field and basis")
    pf.add_argument("--json")

    pc = sub.add_parser("count-frobeq", help="count solvable Frobenius-power equations")
    pc.add_argument("file", help="equation JSON")
    pc.add_argument("n_max", type=int)
    pc.add_argument("--json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            doc = _load_json(args.file)
            payload = {
                "system": doc,
                "d": args.d,
                "options": {
                    "seed": args.seed,
                    "orbit_steps": args.steps,
                    "degree_bound": args.degree_bound,
                    "m_bound": args.m_bound,
                    "spec_trials": args.spec_trials,
                    "index_bound": args.index_bound,
                },
            }
            result = _dispatch("analyze", payload, args.server)
            _emit(result, args)
        elif args.command == "simulate":
            doc = _load_json(args.file)
            payload = {
                "system": doc,
                "start": args.start.split(",") if args.start else None,
                "steps": args.steps,
                "torsion_rule": args.torsion_rule,
            }
            result = _dispatch("simulate", payload, args.server)
            if args.csv:
                _emit_orbit_csv(result, args.csv)
            else:
                _emit(result, args)
        elif args.command == "reduce":
            payload = {"system": _load_json(args.file)}
            result = _dispatch("reduce", payload, args.server)
            _emit(result, args)
        elif args.command == "jordan":
            result = _dispatch("jordan", _load_json(args.file), args.server)
            _emit(result, args)
        elif args.command == "fset-member":
            fset_doc = _load_json(args.fset)
            payload = {
                "field": fset_doc.get("field", {}),
                "fset": fset_doc.get("fset", fset_doc),
                "point": _load_json(args.point),
            }
            result = _dispatch("fset-member", payload, args.server)
            _emit(result, args)
        elif args.command == "count-frobeq":
            payload = {"eq": _load_json(args.file), "n_max": args.n_max}
            result = _dispatch("count-frobeq", payload, args.server)
            _emit(result, args)
        return 0
    except (DomainError, Unsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except FrobdynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
