"""JSON command-line front end.

One JSON document is read from a file argument or standard input, one JSON
document is written to standard output, and human-readable diagnostics go
to standard error.  Exit codes: 0 ok or member, 1 non-member, 2 schema
violation, 3 pair not in Omega, 4 not differentiable, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib.metadata import PackageNotFoundError, version

import jsonschema
import numpy as np

from .cones import (
    NormalCandidate,
    cone_kind,
    normal_contains,
    sample_limiting_normal,
    sample_omega_near,
    sample_regular_normal,
)
from .errors import AmbiguousCase, NotDifferentiable, NotInOmega, SocError
from .oracles import (
    OracleConfig,
    OracleVerdict,
    equivalence_sweep,
    limiting_oracle,
    proximal_oracle,
    regular_oracle,
)
from .proj_calculus import calmness_report, dir_derivative, jacobian
from .soc_core import CaseTag, Tolerances, classify_pair, classify_point, project_soc

EXIT_OK, EXIT_NON_MEMBER, EXIT_SCHEMA, EXIT_OMEGA, EXIT_NONDIFF, EXIT_VERIFY = range(6)

# looser than the library defaults so that hand-typed 8-digit inputs classify
CLI_TOL = Tolerances(classify=1e-7, member=1e-7, oracle=1e-6)

try:
    __version__ = version("socnormal")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"


class SchemaError(Exception):
    pass


# ---------------------------------------------------------------- schemas

_VEC = {"type": "array", "items": {"type": "number"}, "minItems": 2}
_TOLS = {
    "type": "object",
    "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in ("classify", "member", "oracle")},
    "additionalProperties": False,
}
_COMMON = {"m": {"type": "integer", "minimum": 2}, "tolerances": _TOLS, "seed": {"type": "integer"}}
_CONE = {"type": "string", "enum": ["proximal", "regular", "limiting", "Proximal", "Regular", "Limiting"]}


def _schema(required, **props):
    return {
        "type": "object",
        "properties": {**_COMMON, **props},
        "required": ["m", *required] if "m" not in required else required,
        "additionalProperties": False,
    }


SCHEMAS = {
    "classify": _schema(["x"], x=_VEC, y=_VEC),
    "member": _schema(["x", "y", "u", "v", "cone"], x=_VEC, y=_VEC, u=_VEC, v=_VEC, cone=_CONE),
    "project": _schema(["x"], x=_VEC),
    "ddir": _schema(["x", "h"], x=_VEC, h=_VEC),
    "jacobian": _schema(["x"], x=_VEC),
    "calmness": _schema(
        ["x", "h"], x=_VEC, h=_VEC,
        scales={"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
    ),
    "sample": _schema(
        ["x", "y"], x=_VEC, y=_VEC, cone=_CONE,
        samples={"type": "integer", "minimum": 0}, radius={"type": "number", "exclusiveMinimum": 0},
    ),
    "verify_sweep": {
        "type": "object",
        "properties": {
            "caseTag": {"type": "string", "enum": [c.value for c in CaseTag]},
            "pairs": {"type": "integer", "minimum": 1},
            "candidates": {"type": "integer", "minimum": 1},
            "limiting": {"type": "boolean"},
            "samples": {"type": "integer", "minimum": 1},
            "hSamples": {"type": "integer", "minimum": 1},
            "tolerances": _TOLS,
            "seed": {"type": "integer"},
        },
        "required": ["caseTag", "pairs", "candidates"],
        "additionalProperties": False,
    },
    "verify_single": _schema(
        ["x", "y", "u", "v", "oracle"], x=_VEC, y=_VEC, u=_VEC, v=_VEC,
        oracle={"type": "string", "enum": ["proximal", "regular", "limiting"]},
        samples={"type": "integer", "minimum": 1},
    ),
}

_RESULT_SCHEMA = {
    "type": "object",
    "properties": {"status": {"enum": ["ok", "error"]}, "version": {"type": "string"}},
    "required": ["status", "version"],
}


def _validate(doc, name):
    try:
        jsonschema.validate(doc, SCHEMAS[name])
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"{name}: {exc.message}") from None
    m = doc.get("m")
    for key in ("x", "y", "u", "v", "h"):
        if key in doc:
            if len(doc[key]) != m:
                raise SchemaError(f"'{key}' has length {len(doc[key])}, expected m = {m}")
            if not all(math.isfinite(t) for t in doc[key]):
                raise SchemaError(f"'{key}' has non-finite entries")


# ---------------------------------------------------------------- output


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if hasattr(obj, "value"):
        return obj.value
    return obj


def _dump(obj, indent, level=0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    colon = ":" if indent is None else ": "
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}{colon}{_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + ",".join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [f"{pad}{_dump(v, indent, level + 1)}" for v in obj]
        return "[" + ",".join(items) + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        return f"{obj:.16e}"
    return json.dumps(obj, ensure_ascii=False)


def _emit(doc, pretty):
    doc = {"status": doc.pop("status", "ok"), **doc, "version": __version__}
    doc = _plain(doc)
    jsonschema.validate(doc, _RESULT_SCHEMA)
    sys.stdout.write(_dump(doc, 2 if pretty else None) + "\n")


# ---------------------------------------------------------------- commands


def _tol(doc, args) -> Tolerances:
    if args.tol is not None:
        return Tolerances.uniform(args.tol)
    t = doc.get("tolerances", {})
    return Tolerances(
        classify=t.get("classify", CLI_TOL.classify),
        member=t.get("member", CLI_TOL.member),
        oracle=t.get("oracle", CLI_TOL.oracle),
    )


def _seed(doc, args) -> int:
    return args.seed if args.seed is not None else doc.get("seed", 0)


def _verdict_doc(v):
    return {
        "verdict": "member" if v.member else "non-member",
        "member": v.member,
        "branch": v.branch,
        "certificate": v.certificate,
        "coneKind": v.cone_kind,
    }


def cmd_classify(doc, args):
    _validate(doc, "classify")
    tol = _tol(doc, args)
    if "y" not in doc:
        return {"region": classify_point(doc["x"], tol)}, EXIT_OK
    pair = classify_pair(doc["x"], doc["y"], tol)
    out = {"caseTag": pair.case}
    if pair.k is not None:
        out["k"] = pair.k
    return out, EXIT_OK


def cmd_member(doc, args):
    _validate(doc, "member")
    tol = _tol(doc, args)
    pair = classify_pair(doc["x"], doc["y"], tol)
    v = normal_contains(pair, NormalCandidate.of(doc["u"], doc["v"]), cone_kind(doc["cone"]), tol)
    out = {**_verdict_doc(v), "caseTag": pair.case}
    return out, EXIT_OK if v.member else EXIT_NON_MEMBER


def cmd_calculus(doc, args):
    op = args.op
    _validate(doc, op)
    tol = _tol(doc, args)
    if op == "project":
        return {"projection": project_soc(doc["x"]).tolist()}, EXIT_OK
    if op == "ddir":
        return {"derivative": dir_derivative(doc["x"], doc["h"], tol).tolist(), "region": classify_point(doc["x"], tol)}, EXIT_OK
    if op == "jacobian":
        j = jacobian(doc["x"], tol)
        return {"jacobian": j.matrix.tolist(), "region": j.region}, EXIT_OK
    scales = doc.get("scales", [1e-1, 1e-2, 1e-3, 1e-4, 1e-5])
    rep = calmness_report(doc["x"], doc["h"], scales, tol)
    return {"scales": rep.scales, "ratios": rep.ratios, "fittedC": rep.fitted_c}, EXIT_OK


def cmd_verify(doc, args):
    seed = _seed(doc, args)
    if "caseTag" in doc:
        _validate(doc, "verify_sweep")
        tol = _tol(doc, args)
        cfg = OracleConfig(n_samples=doc.get("samples", 256), seed=seed, slack=tol.oracle)
        rep = equivalence_sweep(
            doc["caseTag"], doc["pairs"], doc["candidates"], cfg,
            limiting=doc.get("limiting", False), h_samples=doc.get("hSamples", 10_000), tol=tol,
        )
        out = rep.to_dict()
        return out, EXIT_VERIFY if rep.disagreements else EXIT_OK
    _validate(doc, "verify_single")
    tol = _tol(doc, args)
    pair = classify_pair(doc["x"], doc["y"], tol)
    cand = NormalCandidate.of(doc["u"], doc["v"])
    cfg = OracleConfig(n_samples=doc.get("samples", 256), seed=seed, slack=tol.oracle)
    which = doc["oracle"]
    if which == "limiting":
        rep = limiting_oracle(pair, cand, cfg, tol)
    else:
        rep = (proximal_oracle if which == "proximal" else regular_oracle)(pair, cand, cfg)
    closed = normal_contains(pair, cand, which, tol).member
    contradiction = (rep.verdict == OracleVerdict.CONSISTENT_MEMBER and not closed) or (
        rep.verdict == OracleVerdict.CERTIFIED_NON_MEMBER and closed
    )
    out = {**rep.to_dict(), "closedForm": closed, "caseTag": pair.case}
    return out, EXIT_VERIFY if contradiction else EXIT_OK


def cmd_sample(doc, args):
    _validate(doc, "sample")
    tol = _tol(doc, args)
    seed = _seed(doc, args)
    n = doc.get("samples", 10)
    pair = classify_pair(doc["x"], doc["y"], tol)
    if "radius" in doc:
        s = sample_omega_near(pair, doc["radius"], seed, n, tol)
        pts = [{"x": p.x.tolist(), "y": p.y.tolist(), "caseTag": p.case} for p in s.pairs]
        return {"caseTag": pair.case, "radius": s.radius, "pairs": pts}, EXIT_OK
    kind = cone_kind(doc.get("cone", "regular"))
    sampler = sample_limiting_normal if kind.value == "Limiting" else sample_regular_normal
    cands = [{"u": c.u.tolist(), "v": c.v.tolist()} for c in sampler(pair, seed, n)]
    return {"caseTag": pair.case, "coneKind": kind, "candidates": cands}, EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "member": cmd_member,
    "calculus": cmd_calculus,
    "verify": cmd_verify,
    "sample": cmd_sample,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="override all three tolerances")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--pretty", action="store_true", help="indent the output")
    parser = argparse.ArgumentParser(prog="socnormal", description="Normal cones of the SOC complementarity set.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("classify", "member", "calculus", "verify", "sample"):
        p = sub.add_parser(name, parents=[common])
        if name == "calculus":
            p.add_argument("op", choices=["project", "ddir", "jacobian", "calmness"])
        p.add_argument("input", nargs="?", help="JSON document (default: standard input)")
    return parser


def _read(path):
    text = sys.stdin.read() if path in (None, "-") else open(path, encoding="utf-8").read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("input must be a JSON object")
    return doc


def _error(code, message, exit_code, pretty):
    print(f"socnormal: {message}", file=sys.stderr)
    _emit({"status": "error", "code": code, "message": message}, pretty)
    return exit_code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_SCHEMA if exc.code not in (0, None) else EXIT_OK
    pretty = args.pretty
    try:
        doc = _read(args.input)
        payload, code = COMMANDS[args.command](doc, args)
    except SchemaError as exc:
        return _error("schema", str(exc), EXIT_SCHEMA, pretty)
    except OSError as exc:
        return _error("io", str(exc), EXIT_SCHEMA, pretty)
    except (NotInOmega, AmbiguousCase) as exc:
        return _error(exc.code, str(exc), EXIT_OMEGA, pretty)
    except NotDifferentiable as exc:
        return _error(exc.code, str(exc), EXIT_NONDIFF, pretty)
    except SocError as exc:
        return _error(exc.code, str(exc), EXIT_SCHEMA, pretty)
    _emit({"status": "ok", "command": args.command, **payload}, pretty)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
