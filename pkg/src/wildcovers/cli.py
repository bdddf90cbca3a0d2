"""Command-line front end.

Every command reads a JSON payload (``--in PATH``, ``--in -`` for stdin, or
``--json TEXT``) and writes a JSON result to stdout or ``--out``.

Exit codes: 0 success, 2 malformed input, 3 domain/usage error,
4 refusal on an anomalous curve, 5 failed self-verification.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import codec
from .arith import GF
from .curves import (
    EllipticMarkedCurve,
    ProjectiveLine,
    elliptic_verdict,
    reduce_matrix_global,
    split_residual,
)
from .errors import CoverError, IntegrityError, ParseError, UsageError
from .series import LaurentSeries, wp_apply, wp_solve_local
from .unipotent import LaurentRing, UnipotentMatrix, lang_map, lang_section, orbit_classes, p_conjugate, p_equiv_decide, positions

DEFAULT_PREC = 40


def _field(args):
    modulus = None
    if args.modulus:
        modulus = [int(c) for c in args.modulus.split(",")]
    e = args.ext_degree if args.ext_degree else (len(modulus) - 1 if modulus else 1)
    return GF(args.p, e, modulus)


def _payload(args):
    try:
        if args.json is not None:
            return json.loads(args.json)
        if args.input is None:
            raise ParseError("no payload given (use --in or --json)")
        if args.input == "-":
            return json.load(sys.stdin)
        with open(args.input) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read payload: {exc}") from exc


def _default_field(args):
    return _field(args) if args.p else None


def _model(args, field):
    choice = args.model or "p1"
    if choice != "p1":
        try:
            choice = json.loads(choice)
        except json.JSONDecodeError as exc:
            raise ParseError(f"--model must be 'p1' or curve JSON: {exc}") from exc
    if choice == "p1" and field is None:
        raise UsageError("the p1 model needs a field (payload or --p)")
    return codec.model_from_json(choice, field)


def _require(flag, what):
    if not flag:
        raise IntegrityError(f"self-verification of {what} failed")


# -- commands ------------------------------------------------------------

def cmd_wp_solve(args) -> dict:
    g = codec.series_from_json(_payload(args), _default_field(args))
    b = wp_solve_local(g, prec=args.prec)
    if b is None:
        return {"solvable": False, "b": None}
    wb = wp_apply(b)
    ok = wb.agrees_with(g)
    _require(ok, "wp(b) = input")
    return {"solvable": True, "b": codec.series_to_json(b), "wp_b": codec.series_to_json(wb), "verified": ok}


def cmd_split(args) -> dict:
    f = codec.series_from_json(_payload(args), _default_field(args))
    if f.is_exact:
        f = f.truncate(max(f.top, args.prec))
    model = _model(args, f.field)
    sp = model.split(f)
    ok = split_residual(model, f, sp).is_zero()
    _require(ok, "f = wp(b) + g")
    out = {"b": codec.series_to_json(sp.b)}
    if isinstance(model, ProjectiveLine):
        out["h"] = codec.series_to_json(sp.g)
    else:
        out["g"] = codec.efunc_to_json(sp.g)
        out["obstruction"] = sp.obstruction
    out["verified"] = ok
    return out


def cmd_reduce(args) -> dict:
    M = codec.matrix_from_json(_payload(args), _default_field(args))
    model = _model(args, M.ring.field)
    red = reduce_matrix_global(model, M, prec=args.prec)
    ok = red.verify(model, M)
    _require(ok, "B^(p) M B^(-1) = M'")
    return {"B": codec.matrix_to_json(red.B), "M_prime": codec.matrix_to_json(red.M_global), "verified": ok}


def cmd_equiv(args) -> dict:
    payload = _payload(args)
    F = _default_field(args)
    M = codec.matrix_from_json(payload["M"], F)
    Mp = codec.matrix_from_json(payload["M_prime"], F)
    C = p_equiv_decide(M, Mp)
    if C is None:
        return {"equivalent": False, "C": None}
    ok = p_conjugate(C, Mp).agrees_with(M)
    _require(ok, "C^(p) M' C^(-1) = M")
    return {"equivalent": True, "C": codec.matrix_to_json(C), "verified": ok}


def cmd_orbits(args) -> dict:
    if not args.n or not args.p:
        raise UsageError("orbits needs --n and --p")
    return codec.orbit_report_to_json(orbit_classes(args.n, _field(args)))


def cmd_lang_section(args) -> dict:
    M = codec.matrix_from_json(_payload(args), _default_field(args))
    sec = lang_section(M)
    ok = lang_map(sec.B) == M.map(sec.embedding, sec.B.ring)
    _require(ok, "B^(p) B^(-1) = M")
    return {
        "B": codec.matrix_to_json(sec.B),
        "s": sec.s,
        "field": codec.field_to_json(sec.field),
        "image_of_gen": codec.element_to_json(sec.embedding.image_of_gen, compact=True),
        "verified": ok,
    }


def cmd_elliptic_analyze(args) -> dict:
    if args.p and args.A is not None and args.B is not None:
        E = EllipticMarkedCurve(args.p, args.A, args.B)
    else:
        E = codec.curve_from_json(_payload(args))
    return codec.verdict_to_json(elliptic_verdict(E))


def cmd_random_matrix(args) -> dict:
    if not args.n or not args.p:
        raise UsageError("random-matrix needs --n and --p")
    rng = random.Random(args.seed)
    ring = LaurentRing(_field(args))
    M = UnipotentMatrix(args.n, ring, {pos: ring.random(rng, pole=args.pole, prec=args.prec)
                                       for pos in positions(args.n)})
    return codec.matrix_to_json(M)


COMMANDS = {
    "wp-solve": cmd_wp_solve,
    "split": cmd_split,
    "reduce": cmd_reduce,
    "equiv": cmd_equiv,
    "orbits": cmd_orbits,
    "lang-section": cmd_lang_section,
    "elliptic-analyze": cmd_elliptic_analyze,
    "random-matrix": cmd_random_matrix,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wildcovers", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="characteristic")
    common.add_argument("--ext-degree", type=int, help="extension degree e of F_q over F_p")
    common.add_argument("--modulus", help="comma-separated modulus coefficients, low to high")
    common.add_argument("--prec", type=int, default=DEFAULT_PREC, help="precision for exact inputs")
    common.add_argument("--model", help="'p1' or curve JSON such as '{\"p\":5,\"A\":1,\"B\":0}'")
    common.add_argument("--in", dest="input", help="payload file, or - for stdin")
    common.add_argument("--json", help="inline JSON payload")
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n", type=int, help="matrix dimension")
    common.add_argument("--A", type=int)
    common.add_argument("--B", type=int)
    common.add_argument("--pole", type=int, default=4, help="pole order for random-matrix")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _emit(result, out):
    text = json.dumps(result, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        result = COMMANDS[args.command](args)
    except CoverError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        witness = getattr(exc, "witness", None)
        if witness:
            err["witness"] = witness
        print(json.dumps(err), file=sys.stderr)
        if witness:
            _emit(err, args.out)
        return exc.exit_code
    _emit(result, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
