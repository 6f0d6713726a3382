"""Command-line front end.

Usage examples::

    nordengeom generate --kind w3 --dim 4 --seed 7 --output w3.json
    nordengeom validate --input w3.json
    nordengeom classify --input w3.json
    nordengeom invariants --input w3.json
    nordengeom verify --input w3.json --samples 500

Exit codes: 0 success, 1 failed check or invalid model, 2 parse/IO error,
3 generator produced no model.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import generator as gen
from .curvature import isotropic_kahler_flags
from .errors import NordenError, NotFound, OnlyKahlerSolutions, ParseError, RetriesExhausted
from .model import NordenModel
from .modelfile import dumps, model_from_raw, model_to_dict, parse_model
from .structure import EPS_CLASS
from .tensor import relative_residual
from .verify import DEFAULT_TOL, verify_model

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_GENERATOR = 0, 1, 2, 3
DEBUG_GAMMA_SLOT = (0, 1, 0)


class CheckFailed(Exception):
    def __init__(self, report: dict):
        super().__init__("check failed")
        self.report = report


def _header(command: str, args, model: NordenModel | None) -> dict:
    doc = {
        "tool": "nordengeom",
        "version": __version__,
        "command": command,
        "tolerances": {
            "check": args.tolerance,
            "class": args.class_tolerance,
        },
    }
    if model is not None:
        doc["model"] = {"label": model.label, "dim": model.dim}
    return doc


def _load(args):
    try:
        text = Path(args.input).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {args.input}: {exc}") from exc
    raw = parse_model(text)
    try:
        return model_from_raw(raw)
    except NordenError as exc:
        doc = _header(args.command, args, None)
        doc["model"] = {"label": raw["label"], "dim": raw["dim"]}
        doc["valid"] = False
        doc["error"] = {"type": type(exc).__name__, "message": str(exc)}
        raise CheckFailed(doc) from exc


def _connection_rows(model: NordenModel, tol: float) -> list[dict]:
    rows = []
    for name, value in (("torsion", model.torsion), ("metricity", model.metricity)):
        value = value / max(1.0, float(np.abs(model.connection.gamma).max()))
        rows.append({"name": name, "value": value, "tolerance": tol,
                     "status": "pass" if value <= tol else "fail"})
    return rows


def cmd_validate(args) -> tuple[dict, int]:
    model = _load(args)
    rows = _connection_rows(model, args.tolerance)
    ok = all(r["status"] == "pass" for r in rows)
    doc = _header("validate", args, model)
    doc.update({"valid": ok, "signature": list(model.structure.metric.signature()), "checks": rows})
    return doc, EXIT_OK if ok else EXIT_FAIL


def cmd_classify(args) -> tuple[dict, int]:
    model = _load(args)
    doc = _header("classify", args, model)
    doc["classes"] = model.membership(args.class_tolerance).as_dict()
    return doc, EXIT_OK


def invariants_dict(model: NordenModel, tol: float, eps_class: float) -> dict:
    cd = model.curvature
    is_k, is_iso = isotropic_kahler_flags(model.DJ, cd.snorm, tol)
    mem = model.membership(eps_class)
    t = [np.array(cd.snorm), np.array(2 * cd.tau), np.array(2 * cd.tau_star2)]
    if mem.is_W3:
        r = relative_residual(sum(t), *t)
        row = {"name": "norm_theorem", "value": r, "tolerance": tol,
               "status": "pass" if r <= tol else "fail"}
    else:
        row = {"name": "norm_theorem", "value": None, "tolerance": None,
               "status": "skipped", "note": "model is not in W3"}
    return {
        "tau": cd.tau,
        "tau_star2": cd.tau_star2,
        "snorm": cd.snorm,
        "max_nabla_J": model.max_nabla_J(),
        "is_kahler": is_k,
        "is_isotropic_kahler": is_iso,
        "theta": model.theta.tolist(),
        "rho": cd.rho.tolist(),
        "rho_star": cd.rho_star.tolist(),
        "checks": [row],
    }


def cmd_invariants(args) -> tuple[dict, int]:
    model = _load(args)
    doc = _header("invariants", args, model)
    inv = invariants_dict(model, args.tolerance, args.class_tolerance)
    doc["invariants"] = inv
    ok = all(r["status"] != "fail" for r in inv["checks"])
    return doc, EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> tuple[dict, int]:
    model = _load(args)
    if args.debug_perturb_gamma:
        conn = model.connection.perturbed(*DEBUG_GAMMA_SLOT, args.debug_perturb_gamma)
        model = NordenModel(model.algebra, model.structure, model.label, connection=conn)
    rep = verify_model(model, args.tolerance, args.samples, args.seed, args.class_tolerance)
    doc = _header("verify", args, model)
    doc["config"] = {
        "samples": args.samples,
        "seed": args.seed,
        "prng": "PCG64",
        "debug_perturb_gamma": args.debug_perturb_gamma,
    }
    doc["classes"] = model.membership(args.class_tolerance).as_dict()
    inv = invariants_dict(model, args.tolerance, args.class_tolerance)
    doc["invariants"] = {k: inv[k] for k in
                         ("tau", "tau_star2", "snorm", "max_nabla_J", "is_kahler",
                          "is_isotropic_kahler")}
    doc["checks"] = [r.as_dict() for r in rep.rows]
    doc["summary"] = rep.summary()
    return doc, EXIT_OK if rep.passed else EXIT_FAIL


def cmd_generate(args) -> tuple[dict, int]:
    model = gen.generate(args.kind, args.dim, args.seed, args.max_retries)
    extra = {"generator": {"kind": args.kind, "dim": args.dim, "seed": args.seed,
                           "prng": "PCG64", "version": __version__}}
    return model_to_dict(model, extra), EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "classify": cmd_classify,
    "invariants": cmd_invariants,
    "verify": cmd_verify,
    "generate": cmd_generate,
}


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nordengeom", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"nordengeom {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="model file (JSON)")
        p.add_argument("--output", help="write the report/model here instead of stdout")
        p.add_argument("--tolerance", type=float, default=DEFAULT_TOL)
        p.add_argument("--class-tolerance", type=float, default=EPS_CLASS)
        return p

    common(sub.add_parser("validate", help="check model invariants"))
    common(sub.add_parser("classify", help="W0..W3 membership"))
    common(sub.add_parser("invariants", help="tau, tau**, square norm of nabla J"))
    p = common(sub.add_parser("verify", help="run every identity check"))
    p.add_argument("--samples", type=int, default=500, help="random vector pairs for the holomorphic curvature check")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--debug-perturb-gamma", type=float, default=0.0,
                   help="add this to gamma[0,1,0] (negative control)")
    p = common(sub.add_parser("generate", help="write a generated model"), needs_input=False)
    p.add_argument("--kind", choices=gen.KINDS, default="w3")
    p.add_argument("--dim", type=int, choices=(4, 6, 8), default=4)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--max-retries", type=int, default=50)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, code = COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CheckFailed as exc:
        doc, code = exc.report, EXIT_FAIL
        print(f"invalid model: {doc['error']['type']}: {doc['error']['message']}", file=sys.stderr)
    except (OnlyKahlerSolutions, NotFound, RetriesExhausted) as exc:
        print(f"generator: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GENERATOR

    text = dumps(doc)
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_PARSE
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
