"""``certlab`` command line.

Payload JSON goes to stdout with sorted keys, so identical inputs give
byte-identical output; diagnostics go to stderr.  Exit codes: 0 success
(or accepted), 1 rejected / infeasible, 2 malformed input, 3 budget exceeded.
``--budget`` (default from ``CERTLAB_BUDGET``) caps lattice enumeration and
Sherali-Adams LP columns.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import circuitcert, cubecert, exactlp, hierarchy, polytope
from .cubecert import PseudoExpectation
from .hierarchy import Certificate, ConstraintSystem
from .matrixkit import psd_check
from .polycore import BudgetExceeded, Polynomial, format_rational, to_rational

EXIT_OK, EXIT_REJECTED, EXIT_MALFORMED, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class CommandResult:
    exit_code: int
    payload: dict
    format: str = "json"


class InputError(ValueError):
    pass


def _load(path: Optional[str], what: str) -> dict:
    if path is None:
        raise InputError(f"--{what} is required")
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _poly(args) -> Polynomial:
    return Polynomial.from_json(_load(args.poly, "poly"))


def _system(args, n: Optional[int] = None) -> ConstraintSystem:
    if args.system is None:
        if n is None:
            raise InputError("--system is required")
        return ConstraintSystem.empty(n)
    return ConstraintSystem.from_json(_load(args.system, "system"))


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("CERTLAB_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"CERTLAB_BUDGET must be an integer, got {env!r}") from exc
    return polytope.DEFAULT_LATTICE_BUDGET


# subcommands


def cmd_classify(args) -> CommandResult:
    p = _poly(args)
    try:
        c = circuitcert.detect_circuit(p)
    except circuitcert.NotACircuit as exc:
        return CommandResult(EXIT_OK, {"circuit": False, "nonnegative": None, "sos": None, "reason": exc.reason})
    nonneg = circuitcert.is_nonnegative_circuit(c)
    sos = circuitcert.circuit_is_sos(c, _budget(args)) if nonneg else False
    details = {"vertices": [list(v) for v in c.vertices]}
    if not c.degenerate:
        details["inner_exp"] = list(c.inner_exp)
        details["lambdas"] = [format_rational(v) for v in c.lambdas]
        details["inner_vs_circuit_number"] = circuitcert.circuit_number_compare(c)
    return CommandResult(EXIT_OK, {"circuit": True, "nonnegative": nonneg, "sos": sos, "details": details})


def cmd_mms(args) -> CommandResult:
    budget = _budget(args)
    if args.points is not None:
        ps = polytope.PointSet.from_json(_load(args.points, "points"))
    else:
        ps = polytope.newton_vertices(_poly(args))
    verts = polytope.vertices_of(ps)
    mms = polytope.maximal_mediated_set(verts, budget)
    try:
        shape = polytope.classify_simplex(verts, budget)
    except polytope.SimplexRejected as exc:
        shape = f"not a simplex ({exc.reason})"
    return CommandResult(
        EXIT_OK,
        {
            "vertices": [list(v) for v in verts.points],
            "mediated_set": [list(v) for v in mms.points],
            "simplex": shape,
        },
    )


def cmd_verify(args) -> CommandResult:
    f = _poly(args)
    G = _system(args, f.n)
    cert = Certificate.from_json(_load(args.cert, "cert"))
    if args.kind and args.kind.upper() != cert.kind:
        raise InputError(f"certificate kind {cert.kind} does not match --kind {args.kind}")
    rep = hierarchy.verify(f, to_rational(args.lam), G, cert)
    return CommandResult(EXIT_OK if rep.accepted else EXIT_REJECTED, rep.to_json())


def cmd_convert(args) -> CommandResult:
    cert = Certificate.from_json(_load(args.cert, "cert"))
    target = (args.to or {"SDSOS": "sonc", "SONC": "sa"}.get(cert.kind, "")).lower()
    if cert.kind == "SDSOS" and target == "sonc":
        out = hierarchy.convert_sdsos_to_sonc(cert)
    elif cert.kind == "SONC" and target == "sa":
        out = hierarchy.convert_sonc_to_sa(cert, _system(args))
    else:
        raise InputError(f"no converter from {cert.kind} to {target or '?'}")
    payload = {"certificate": out.to_json()}
    code = EXIT_OK
    if args.poly is not None:
        G = _system(args, None) if args.system else None
        f = _poly(args)
        rep = hierarchy.verify(f, to_rational(args.lam), G or ConstraintSystem.empty(f.n), out)
        payload["verification"] = rep.to_json()
        code = EXIT_OK if rep.accepted else EXIT_REJECTED
    return CommandResult(code, payload)


def cmd_sa_solve(args) -> CommandResult:
    G = _system(args)
    f = _poly(args) if args.poly is not None else G.objective
    if f is None:
        raise InputError("no objective: pass --poly or put an 'objective' in the system file")
    if args.degree is None:
        raise InputError("--degree is required")
    res = cubecert.sa_solve(f, G, args.degree, args.shape, budget=_budget(args))
    payload = {"status": res.status, "degree": args.degree, "shape": args.shape}
    if res.status == "optimal":
        payload["bound"] = format_rational(res.bound)
        payload["certificate"] = hierarchy.sa_certificate(res).to_json()
        return CommandResult(EXIT_OK, payload)
    payload["bound"] = None
    payload["lp"] = res.outcome.to_json()
    payload["certificate_checked"] = exactlp.check_certificate(res.problem, res.outcome)
    return CommandResult(EXIT_REJECTED, payload)


def cmd_moment(args) -> CommandResult:
    pe = PseudoExpectation.from_json(_load(args.pe, "pe"))
    g = _poly(args) if args.poly is not None else Polynomial.constant(pe.n, 1)
    if args.degree is None:
        raise InputError("--degree is required")
    mm = cubecert.moment_matrix(pe, g, args.degree)
    psd = psd_check(mm.matrix)
    payload = {
        "index_sets": [sorted(s) for s in mm.index_sets],
        "matrix": mm.matrix.to_json(),
        "psd": psd.psd,
    }
    if not psd.psd:
        payload["witness"] = [format_rational(v) for v in psd.witness]
    return CommandResult(EXIT_OK, payload)


def cmd_condition(args) -> CommandResult:
    pe = PseudoExpectation.from_json(_load(args.pe, "pe"))
    if args.var is None or args.bit is None:
        raise InputError("--var and --bit are required")
    try:
        out = cubecert.condition(pe, args.var, args.bit)
    except cubecert.DegenerateConditioning as exc:
        return CommandResult(EXIT_REJECTED, {"error": "degenerate", "message": str(exc)})
    return CommandResult(EXIT_OK, out.to_json())


def cmd_witness(args) -> CommandResult:
    if args.n is None:
        raise InputError("--n is required")
    kind = args.kind or "motzkin"
    if kind == "motzkin":
        return CommandResult(EXIT_OK, hierarchy.witness_generalized_motzkin(args.n).to_json())
    if kind in ("signed_quadric", "signed-quadric"):
        return CommandResult(EXIT_OK, hierarchy.witness_signed_quadric(args.n).to_json())
    if kind in (hierarchy.SOS_FRIENDLY, hierarchy.SONC_FRIENDLY):
        f, G = hierarchy.witness_cpop(kind, args.n, args.t)
        return CommandResult(EXIT_OK, G.to_json())
    raise InputError(f"unknown witness kind {kind!r}")


def cmd_separation(args) -> CommandResult:
    if args.n is None:
        raise InputError("--n is required")
    report = hierarchy.separation_report(args.n, args.t)
    return CommandResult(EXIT_OK if report["all_passed"] else EXIT_REJECTED, report)


COMMANDS = {
    "classify": cmd_classify,
    "mms": cmd_mms,
    "verify": cmd_verify,
    "convert": cmd_convert,
    "sa-solve": cmd_sa_solve,
    "moment": cmd_moment,
    "condition": cmd_condition,
    "witness": cmd_witness,
    "separation": cmd_separation,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poly", metavar="FILE", help="polynomial JSON ('-' for stdin)")
    common.add_argument("--system", metavar="FILE", help="constraint system JSON")
    common.add_argument("--cert", metavar="FILE", help="certificate JSON")
    common.add_argument("--pe", metavar="FILE", help="pseudoexpectation JSON")
    common.add_argument("--points", metavar="FILE", help="point set JSON")
    common.add_argument("--degree", type=int)
    common.add_argument("--shape", choices=[cubecert.PUTINAR, cubecert.SCHMUEDGEN], default=cubecert.PUTINAR)
    common.add_argument("--kind", help="sos|sdsos|sonc|sa for verify; witness family for witness")
    common.add_argument("--to", help="target kind for convert (sonc|sa)")
    common.add_argument("--lambda", dest="lam", default="0", help="bound lambda for verify (rational string)")
    common.add_argument("--n", type=int)
    common.add_argument("--t", type=int, default=1)
    common.add_argument("--var", type=int, help="0-based variable index for condition")
    common.add_argument("--bit", type=int, choices=[0, 1])
    common.add_argument("--budget", type=int, help="cap on enumeration size / LP columns")
    common.add_argument("--format", choices=["json", "table"], default="json")
    parser = argparse.ArgumentParser(prog="certlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _table(payload, prefix: str = "") -> list[str]:
    lines = []
    if isinstance(payload, dict):
        for k in sorted(payload):
            v = payload[k]
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                lines.extend(_table(v, f"{prefix}{k}."))
            else:
                lines.append(f"{prefix}{k}\t{json.dumps(v, sort_keys=True)}")
    elif isinstance(payload, list):
        for i, v in enumerate(payload):
            lines.extend(_table(v, f"{prefix}{i}.") if isinstance(v, (dict, list)) else [f"{prefix}{i}\t{json.dumps(v)}"])
    return lines


def render(result: CommandResult, fmt: str) -> str:
    if fmt == "table":
        return "\n".join(_table(result.payload)) + "\n"
    return hierarchy.dumps(result.payload)


def run(argv: Sequence[str]) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return CommandResult(EXIT_MALFORMED if exc.code else EXIT_OK, {"error": "usage"})
    try:
        result = COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        result = CommandResult(EXIT_BUDGET, {"error": "budget", "message": str(exc)})
    except (InputError, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        result = CommandResult(EXIT_MALFORMED, {"error": "malformed", "message": str(exc)})
    result.format = args.format
    return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    result = run(sys.argv[1:] if argv is None else argv)
    fmt = result.format
    if "error" in result.payload and result.exit_code != EXIT_OK:
        print(f"certlab: {result.payload.get('message', result.payload['error'])}", file=sys.stderr)
    if result.payload.get("error") != "usage":
        sys.stdout.write(render(result, fmt))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
