"""JSON command-line front end.

``polyheight <command> [--input FILE|-] [--output FILE|-] [--seed N] [--convention C]``

The input is the command's payload (or a full ``{"command", "payload"}``
request). Every number on the wire is an exact rational string ``"p/q"``.
Exit codes: 0 ok, 1 domain error, 2 schema error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Any

import jsonschema

from . import __version__
from . import linalg as la
from .base_model import BaseRing, RingElement, build_ring
from .bkk import BkkInstance, F_hat, I_hat
from .errors import PolyheightError, SchemaError
from .fan import normal_fan
from .minima import QuadraticForm, ZetaOracle, absolute_minimum, essential_minimum
from .okounkov import product_body, toric_okounkov, transform_extrema, volumes
from .polyint import default_variables, integrate_polynomial, integrate_roof_composite, parse_polynomial
from .polytope import RationalPolytope, canonicalize, relative_volume, volume
from .roofs import AdelicPolytope, build_roof, hypograph, legendre_dual
from .semiabelian import SemiabelianInput, chambert_loir_polytope, height, minima_report
from .verify import DEFAULT_SEED, SUITES, run_suites

COMMANDS = ("describe", "integrate", "bkk", "height", "minima", "okounkov", "verify")

# schemas

_RATIONAL = {"oneOf": [{"type": "integer"},
                       {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}
_VECTOR = {"type": "array", "items": {"$ref": "#/$defs/rational"}}
_MATRIX = {"type": "array", "items": _VECTOR}
_POLYTOPE = {"oneOf": [
    {"type": "string"},
    {"type": "object", "required": ["vertices"], "additionalProperties": False,
     "properties": {"vertices": {"type": "array", "minItems": 1, "items": _VECTOR}}},
    {"type": "object", "required": ["halfspaces"], "additionalProperties": False,
     "properties": {"dim": {"type": "integer", "minimum": 0},
                    "halfspaces": {"type": "array", "items": {
                        "type": "object", "required": ["normal", "offset"],
                        "additionalProperties": False,
                        "properties": {"normal": _VECTOR,
                                       "offset": {"$ref": "#/$defs/rational"}}}}}},
]}
_ROOFS = {"type": "array", "items": {
    "type": "object", "required": ["place", "lift"], "additionalProperties": False,
    "properties": {"place": {"type": ["string", "integer"]},
                   "weight": {"$ref": "#/$defs/rational"},
                   "lift": {"type": "array", "minItems": 1, "items": _VECTOR}}}}
_RING = {"type": "object", "required": ["generators", "top_degree"], "additionalProperties": False,
         "properties": {
             "generators": {"type": "array", "items": {
                 "type": "object", "required": ["name", "grade"], "additionalProperties": False,
                 "properties": {"name": {"type": "string", "pattern": r"^[A-Za-z_][A-Za-z_0-9]*$"},
                                "grade": {"type": "integer", "minimum": 1}}}},
             "infinity": {"type": ["string", "null"]},
             "top_degree": {"type": "integer", "minimum": 0},
             "table": {"type": "object", "additionalProperties": {"$ref": "#/$defs/rational"}},
             "zeros": {"type": "array", "items": {"type": "array", "items": {
                 "type": "object", "required": ["generators", "count"], "additionalProperties": False,
                 "properties": {"generators": {"type": "array", "items": {"type": "string"}},
                                "count": {"type": "integer", "minimum": 1}}}}},
             "lattice_map": {"type": "array", "items": {
                 "type": "object", "additionalProperties": {"$ref": "#/$defs/rational"}}}}}
_DEFS = {"rational": _RATIONAL, "polytope": _POLYTOPE, "roofs": _ROOFS, "ring": _RING}
_SEMIABELIAN = {
    "t": {"type": "integer", "minimum": 0},
    "g": {"type": "integer", "minimum": 1},
    "polytope": {"$ref": "#/$defs/polytope"},
    "gram": _MATRIX,
    "degM": {"$ref": "#/$defs/rational"},
    "roofs": {"$ref": "#/$defs/roofs"},
}


def _schema(required, properties) -> dict:
    return {"$defs": _DEFS, "type": "object", "required": list(required),
            "additionalProperties": False, "properties": properties}


SCHEMAS = {
    "describe": _schema(["polytope"], {"polytope": {"$ref": "#/$defs/polytope"},
                                       "roofs": {"$ref": "#/$defs/roofs"}}),
    "integrate": _schema(["polytope", "polynomial"], {
        "polytope": {"$ref": "#/$defs/polytope"},
        "polynomial": {"type": "string"},
        "variables": {"type": "array", "items": {"type": "string"}},
        "roofs": {"$ref": "#/$defs/roofs"}}),
    "bkk": _schema(["ring", "gamma", "i", "polytope"], {
        "ring": {"$ref": "#/$defs/ring"},
        "gamma": {"type": "object", "additionalProperties": {"$ref": "#/$defs/rational"}},
        "i": {"type": "integer", "minimum": 0},
        "polytope": {"$ref": "#/$defs/polytope"},
        "roofs": {"$ref": "#/$defs/roofs"}}),
    "height": _schema(["t", "g", "polytope", "gram", "degM"], _SEMIABELIAN),
    "minima": _schema(["t", "g", "polytope", "gram"], {
        **_SEMIABELIAN, "convention": {"enum": ["default", "printed"]}}),
    "okounkov": _schema(["polytope"], {
        "polytope": {"$ref": "#/$defs/polytope"},
        "roofs": {"$ref": "#/$defs/roofs"},
        "fiber": {"$ref": "#/$defs/polytope"},
        "gram": _MATRIX}),
    "verify": _schema([], {
        "suite": {"oneOf": [{"enum": ["all", *SUITES]},
                            {"type": "array", "items": {"enum": list(SUITES)}}]},
        "seed": {"type": "integer"},
        "cases": {"type": "integer", "minimum": 1}}),
}


def validate(command: str, payload: Any) -> None:
    if command not in SCHEMAS:
        raise SchemaError(f"unknown command {command!r}", "/command")
    validator = jsonschema.Draft202012Validator(SCHEMAS[command])
    err = jsonschema.exceptions.best_match(validator.iter_errors(payload))
    if err is not None:
        pointer = "".join(f"/{p}" for p in err.absolute_path)
        raise SchemaError(err.message, pointer)


# wire format


def fmt(x) -> str:
    x = la.frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_vec(v) -> list[str]:
    return [fmt(x) for x in v]


_INTERVAL = re.compile(r"^\s*\[\s*([^,\]]+)\s*,\s*([^,\]]+)\s*\]\s*$")
_CL = re.compile(r"^\s*cl\s*:\s*(\d+)\s*$")


def load_polytope(obj) -> RationalPolytope:
    """``{"vertices"}``, ``{"halfspaces"}``, ``"[a,b]"`` or ``"cl:t"``."""
    if isinstance(obj, str):
        m = _INTERVAL.match(obj)
        if m:
            return canonicalize(vertices=[(la.frac(m.group(1).strip()),), (la.frac(m.group(2).strip()),)])
        m = _CL.match(obj)
        if m:
            return chambert_loir_polytope(int(m.group(1)))
        raise SchemaError(f"unrecognized polytope shorthand {obj!r}", "/polytope")
    if "vertices" in obj:
        return canonicalize(vertices=[la.vec(v) for v in obj["vertices"]])
    hs = [(la.vec(h["normal"]), la.frac(h["offset"])) for h in obj["halfspaces"]]
    return canonicalize(halfspaces=hs, dim=obj.get("dim"))


def dump_polytope(p: RationalPolytope) -> dict:
    return {"vertices": [fmt_vec(v) for v in p.vertices]}


def load_adelic(base: RationalPolytope, roofs) -> AdelicPolytope:
    data, weights = {}, {}
    for r in roofs or []:
        v = r["place"]
        pts = [(la.vec(x[:-1]), la.frac(x[-1])) for x in r["lift"]]
        data[v] = build_roof(base, pts)
        if "weight" in r:
            weights[v] = la.frac(r["weight"])
    return AdelicPolytope(base, data, weights)


def dump_adelic(p: AdelicPolytope) -> list[dict]:
    out = []
    for v in p.places:
        out.append({"place": v, "weight": fmt(p.weight(v)),
                    "lift": [fmt_vec(tuple(a) + (h,)) for a, h in p.roof(v).vertices]})
    return out


def dump_ring(ring: BaseRing) -> dict:
    names = ring.names
    zeros = [[{"generators": sorted(names[i] for i in grp), "count": k} for grp, k in pat.clauses]
             for pat in ring.zeros]
    lattice = []
    for j in range(ring.rank):
        row = {}
        for mono, c in ring.c_of_basis(j).terms.items():
            row[names[mono.index(1)]] = fmt(c)
        lattice.append(row)
    return {"generators": [{"name": n, "grade": g} for n, g in zip(names, ring.grades)],
            "infinity": names[ring.infinity] if ring.infinity is not None else None,
            "top_degree": ring.top_degree,
            "table": {ring.format_monomial(m): fmt(c) for m, c in sorted(ring.table.items())},
            "zeros": zeros, "lattice_map": lattice}


def _encode(obj):
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(x) for x in obj]
    return obj


# commands


def cmd_describe(payload, opts):
    p = load_polytope(payload["polytope"])
    lattice = p.face_lattice
    fvec = [sum(1 for d in lattice.values() if d == k) for k in range(p.affine_dim + 1)]
    out = {"ambient_dim": p.ambient_dim, "affine_dim": p.affine_dim,
           "vertices": [fmt_vec(v) for v in p.vertices],
           "halfspaces": [{"normal": fmt_vec(a), "offset": fmt(b)} for a, b in p.halfspaces],
           "f_vector": fvec, "volume": volume(p), "relative_volume": relative_volume(p)}
    prov = ["polytope: vertex/facet double description, face lattice by facet intersection"]
    if p.is_full_dimensional and p.ambient_dim > 0:
        out["normal_fan_rays"] = [list(map(str, r)) for r in normal_fan(p).rays]
    if payload.get("roofs"):
        P = load_adelic(p, payload["roofs"])
        roof = P.global_roof
        out["global_roof"] = [{"gradient": fmt_vec(a), "constant": fmt(c)} for a, c in roof.pieces]
        out["legendre_dual"] = [{"slope": fmt_vec(a), "constant": fmt(c)}
                                for a, c in legendre_dual(roof).pieces]
        out["hypograph_volume"] = volume(hypograph(P))
        out["roofs"] = dump_adelic(P)
        prov.append("global roof = sum_v n_v theta_v; dual = min_k(<A_k,n> - h_k)")
    return out, prov


def cmd_integrate(payload, opts):
    p = load_polytope(payload["polytope"])
    t = p.ambient_dim
    if payload.get("roofs"):
        vars_ = payload.get("variables") or default_variables(t) + ["s"]
        f = parse_polynomial(payload["polynomial"], vars_)
        P = load_adelic(p, payload["roofs"])
        return {"result": integrate_roof_composite(P, f)}, [
            "∫_Δ f(m, theta(m)) dm over the cells of the global roof"]
    vars_ = payload.get("variables") or default_variables(t)
    f = parse_polynomial(payload["polynomial"], vars_)
    return {"result": integrate_polynomial(p, f)}, [
        "∫_Δ f: pulling triangulation, exact monomial moments on simplices"]


def cmd_bkk(payload, opts):
    ring = build_ring(payload["ring"])
    gamma = RingElement.from_terms(ring, {ring.parse_monomial(k): la.frac(v)
                                          for k, v in payload["gamma"].items()})
    inst = BkkInstance(ring, gamma, payload["i"])
    p = load_polytope(payload["polytope"])
    P = load_adelic(p, payload.get("roofs"))
    return {"I_hat": I_hat(inst, P), "F_hat": F_hat(inst, P), "degree": inst.degree}, [
        "I = ∫_Δ deg((c(m) + theta(m)[inf])^i gamma) dm",
        "F = (t+i)!/i! * I"]


def _semiabelian_input(payload) -> SemiabelianInput:
    p = load_polytope(payload["polytope"])
    roofs = load_adelic(p, payload["roofs"]) if payload.get("roofs") else None
    gram = [[la.frac(x) for x in row] for row in payload["gram"]]
    return SemiabelianInput(payload["t"], payload["g"], p, gram,
                            la.frac(payload.get("degM", 1)), roofs)


def cmd_height(payload, opts):
    rep = height(_semiabelian_input(payload))
    return {"okounkov_route": rep.okounkov_route, "bkk_route": rep.bkk_route,
            "printed_formula": rep.printed_formula, "consistent": rep.consistent,
            "normalization_note": rep.normalization_note}, [
        "okounkov route: (d+1)! * (degM/g!) * ∫_Δ (theta(m) - hq(m)) dm",
        "intersection route: sum_i C(d+1,t+i) (t+i)!/i! I_i with gamma = omega^(g+1-i)",
        "printed: -(d+1)! ∫_Δ hq(m) dm"]


def cmd_minima(payload, opts):
    inp = _semiabelian_input(payload)
    conv = opts.convention or payload.get("convention", "default")
    zetas = minima_report(inp, conv)
    z = ZetaOracle("concave_quadratic", quadratic=inp.hq)
    ab, boundary = absolute_minimum(inp.roofs, z, with_flag=True)
    ess, point = essential_minimum(inp.roofs, z, with_point=True)
    return {"successive_minima": zetas, "convention": conv, "essential_minimum": ess,
            "essential_point": fmt_vec(point), "absolute_minimum": ab,
            "absolute_boundary_only": boundary}, [
        "zeta_ess = max_Δ (theta - hq); zeta_abs = min over vertices of (theta - hq)",
        "zeta_i = min over faces F of the attached dimension of max_F (theta - hq)"]


def cmd_okounkov(payload, opts):
    p = load_polytope(payload["polytope"])
    P = load_adelic(p, payload.get("roofs"))
    if "fiber" in payload:
        gram = payload.get("gram")
        tr = QuadraticForm([[la.frac(x) for x in r] for r in gram]) if gram else None
        B = product_body(P, load_polytope(payload["fiber"]), tr)
    else:
        B = toric_okounkov(P)
    geo, chi = volumes(B)
    top, low = transform_extrema(B)
    return {"total_dim": B.total_dim, "geometric_volume": geo, "chi_volume": chi,
            "transform_max": top, "transform_inf": low}, [
        "vol = d! vol(body); chi = (d+1)! ∫_body G",
        "max G = essential minimum; inf G = absolute minimum"]


def cmd_verify(payload, opts):
    seed = opts.seed if opts.seed is not None else payload.get("seed", DEFAULT_SEED)
    names = payload.get("suite", "all")
    results = run_suites(names, seed=seed, cases=payload.get("cases"))
    report = {r.name: {"passed": r.passed, "cases": r.cases,
                       "counterexample": r.counterexample} for r in results}
    return {"seed": seed, "all_passed": all(r.passed for r in results), "suites": report}, [
        f"identity suites: {', '.join(r.name for r in results)}"]


HANDLERS = {"describe": cmd_describe, "integrate": cmd_integrate, "bkk": cmd_bkk,
            "height": cmd_height, "minima": cmd_minima, "okounkov": cmd_okounkov,
            "verify": cmd_verify}


def run(command: str, payload, opts=None) -> tuple[int, dict]:
    """Validate and dispatch; returns ``(exit code, response)``."""
    opts = opts or argparse.Namespace(seed=None, convention=None)
    try:
        validate(command, payload)
        result, prov = HANDLERS[command](payload, opts)
    except SchemaError as exc:
        return 2, {"status": "error", "command": command,
                   "error": {"name": exc.name, "message": str(exc), "pointer": exc.pointer}}
    except PolyheightError as exc:
        return 1, {"status": "error", "command": command,
                   "error": {"name": exc.name, "message": str(exc)}}
    except (ValueError, ZeroDivisionError, KeyError) as exc:
        return 1, {"status": "error", "command": command,
                   "error": {"name": type(exc).__name__, "message": str(exc)}}
    return 0, {"status": "ok", "command": command, "result": _encode(result),
               "provenance": prov, "version": __version__}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="polyheight", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", default="-", help="payload JSON file, '-' for stdin")
    ap.add_argument("--output", default="-", help="response file, '-' for stdout")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--convention", choices=["default", "printed"], default=None)
    opts = ap.parse_args(argv)

    try:
        if opts.input == "-":
            text = sys.stdin.read() if not sys.stdin.isatty() else "{}"
        else:
            with open(opts.input, encoding="utf-8") as fh:
                text = fh.read()
        payload = json.loads(text) if text.strip() else {}
    except (OSError, json.JSONDecodeError) as exc:
        code, resp = 2, {"status": "error", "command": opts.command,
                         "error": {"name": "SchemaError", "message": str(exc), "pointer": ""}}
    else:
        if isinstance(payload, dict) and "command" in payload and "payload" in payload:
            if payload["command"] != opts.command:
                code, resp = 2, {"status": "error", "command": opts.command,
                                 "error": {"name": "SchemaError", "pointer": "/command",
                                           "message": f"request is for {payload['command']!r}"}}
                return _emit(resp, opts.output, code)
            payload = payload["payload"]
        code, resp = run(opts.command, payload, opts)
    return _emit(resp, opts.output, code)


def _emit(resp, output, code) -> int:
    text = json.dumps(resp, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
