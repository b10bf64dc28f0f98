"""Command-line front end.

Usage::

    polylip eval instance.json
    polylip check instance.json --format json
    polylip verify instance.json --seed 3 --radii 8 --samples 50
    polylip plot2d instance.json --query q1 -o out.svg

An instance file is UTF-8 JSON with the keys ``dims``, ``sets``, ``maps``,
``points``, ``directions`` and ``queries``.  Every rational is an integer or
a ``"p/q"`` string; JSON floats are rejected because they are not exact.

Exit codes: 0 success, 2 input error, 4 internal error.  Queries whose point
lies outside the relevant domain are reported with code 3 in the per-query
record and do not change the process exit code.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .criteria import (
    GAP_NOTE,
    SUFFICIENT,
    SUFFICIENT_FAILS,
    SUFFICIENT_HOLDS,
    LIPSCHITZ,
    NOT_LIPSCHITZ,
    FaceCone,
    Verdict,
    aubin_criterion,
    convex_equivalences,
    function_lipschitz_criterion,
    inclusion_audit,
    minimal_time_criterion,
    minkowski_report,
    scalarization_criterion,
)
from .exact import EQ, LE, InvariantError, PreconditionError, StructuralError
from .gendiff import (
    coderivative,
    minkowski_singular,
    scalarization_subdifferential,
    singular_subdifferential,
    value_subdifferential,
)
from .oracle import SamplingPlan, aubin_sampled, exact_pl_lipschitz, sampled_modulus
from .polyhedra import (
    EmptySetError,
    HPolyhedron,
    UnboundedSetError,
    VPolytope,
    hrep_to_vrep,
    is_trivial_cone,
    metric_projection,
    normal_cone_at,
    vrep_to_hrep,
)
from .varfun import (
    ExtReal,
    GraphMap,
    PLValueFunction,
    distance,
    distance_function,
    gauge,
    gauge_function,
    generalized_projection,
    hitting_point,
    minimal_time_sv,
    minimal_time_sv_function,
    scalar_distance_D,
    scalar_distance_function,
    scalarization,
    scalarization_function,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_OUT_OF_DOMAIN = 3
EXIT_INTERNAL = 4

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")


class InputError(Exception):
    """Malformed or inconsistent instance file; maps to exit code 2."""


# ---------------------------------------------------------------------------
# parsing


def parse_rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise InputError(f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise InputError(f"{where}: floats are not exact; write {value!r} as a string 'p/q'")
    if isinstance(value, str) and _RATIONAL.match(value):
        num, _, den = value.replace(" ", "").partition("/")
        if den and int(den) == 0:
            raise InputError(f"{where}: zero denominator in {value!r}")
        return Fraction(int(num), int(den) if den else 1)
    raise InputError(f"{where}: cannot parse {value!r} as a rational")


def _vector(value, where: str) -> tuple:
    if not isinstance(value, list):
        raise InputError(f"{where}: expected a list of rationals")
    return tuple(parse_rational(v, f"{where}[{i}]") for i, v in enumerate(value))


def _matrix(value, where: str) -> tuple:
    if not isinstance(value, list):
        raise InputError(f"{where}: expected a list of rows")
    rows = tuple(_vector(r, f"{where}[{i}]") for i, r in enumerate(value))
    if len({len(r) for r in rows}) > 1:
        raise InputError(f"{where}: rows have different lengths")
    return rows


def _object(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise InputError(f"{where}: expected an object")
    return value


def _hrep(entry, where: str, dim: int | None) -> HPolyhedron:
    entry = _object(entry, where)
    A = _matrix(entry.get("A", []), f"{where}.A")
    b = _vector(entry.get("b", []), f"{where}.b")
    kinds = entry.get("kinds") or [LE] * len(A)
    if len(b) != len(A) or len(kinds) != len(A):
        raise InputError(f"{where}: A, b and kinds must have the same number of rows")
    for i, k in enumerate(kinds):
        if k not in (LE, EQ):
            raise InputError(f"{where}.kinds[{i}]: expected '<=' or '=', got {k!r}")
    width = len(A[0]) if A else entry.get("dim", dim)
    if not isinstance(width, int) or isinstance(width, bool) or width < 0:
        raise InputError(f"{where}: dimension unknown; give 'dim' when there are no rows")
    if dim is not None and width != dim:
        raise InputError(f"{where}: dimension {width} clashes with declared dimension {dim}")
    return HPolyhedron(A, b, tuple(kinds), width)


def _vrep(entry, where: str, dim: int | None) -> VPolytope:
    entry = _object(entry, where)
    verts = _matrix(entry.get("vertices", []), f"{where}.vertices")
    rays = _matrix(entry.get("rays", []), f"{where}.rays")
    if not verts:
        raise InputError(f"{where}: a V-representation needs at least one vertex")
    width = len(verts[0])
    if rays and len(rays[0]) != width:
        raise InputError(f"{where}: rays and vertices have different dimensions")
    if dim is not None and width != dim:
        raise InputError(f"{where}: dimension {width} clashes with declared dimension {dim}")
    return VPolytope(verts, rays, width)


@dataclass
class Query:
    id: str
    op: str
    args: dict
    options: dict


@dataclass
class InstanceFile:
    dims: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    directions: dict = field(default_factory=dict)
    queries: list = field(default_factory=list)
    sha256: str = ""

    @property
    def ambient(self) -> int | None:
        return self.dims.get("ambient")


def parse_instance_text(text: str) -> InstanceFile:
    """Validated instance from JSON text; raises :class:`InputError` with a located message."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    raw = _object(raw, "instance")
    known = {"dims", "sets", "maps", "points", "directions", "queries", "description"}
    extra = sorted(set(raw) - known)
    if extra:
        raise InputError(f"unknown top-level key(s): {', '.join(extra)}")
    inst = InstanceFile(sha256=hashlib.sha256(text.encode("utf-8")).hexdigest())
    dims = _object(raw.get("dims", {}), "dims")
    for k, v in dims.items():
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise InputError(f"dims.{k}: expected a nonnegative integer")
    inst.dims = dict(dims)
    amb = inst.ambient
    for name, entry in _object(raw.get("sets", {}), "sets").items():
        where = f"sets.{name}"
        entry = _object(entry, where)
        dim = dims.get(name, amb)
        if "hrep" in entry:
            inst.sets[name] = _hrep(entry["hrep"], f"{where}.hrep", dim)
        elif "vrep" in entry:
            inst.sets[name] = _vrep(entry["vrep"], f"{where}.vrep", dim)
        else:
            raise InputError(f"{where}: expected an 'hrep' or 'vrep' entry")
    for name, entry in _object(raw.get("maps", {}), "maps").items():
        where = f"maps.{name}"
        entry = _object(entry, where)
        m, n = entry.get("m"), entry.get("n")
        for key, val in (("m", m), ("n", n)):
            if not isinstance(val, int) or isinstance(val, bool) or val < 0:
                raise InputError(f"{where}.{key}: expected a nonnegative integer")
        if "graph_hrep" not in entry:
            raise InputError(f"{where}: missing 'graph_hrep'")
        graph = _hrep(entry["graph_hrep"], f"{where}.graph_hrep", m + n)
        inst.maps[name] = GraphMap(graph, m, n)
    for key in ("points", "directions"):
        table = getattr(inst, key)
        for name, value in _object(raw.get(key, {}), key).items():
            v = _vector(value, f"{key}.{name}")
            dim = dims.get(name)
            if dim is not None and len(v) != dim:
                raise InputError(f"{key}.{name}: has {len(v)} coordinates, declared {dim}")
            table[name] = v
    queries = raw.get("queries", [])
    if not isinstance(queries, list):
        raise InputError("queries: expected a list")
    seen = set()
    for i, q in enumerate(queries):
        where = f"queries[{i}]"
        q = _object(q, where)
        op = q.get("op")
        if op not in OPS:
            raise InputError(f"{where}.op: unknown operation {op!r}")
        qid = str(q.get("id", f"q{i + 1}"))
        if qid in seen:
            raise InputError(f"{where}.id: duplicate query id {qid!r}")
        seen.add(qid)
        query = Query(qid, op, dict(_object(q.get("args", {}), f"{where}.args")),
                      dict(_object(q.get("options", {}), f"{where}.options")))
        resolve(inst, query)  # semantic validation up front
        inst.queries.append(query)
    return inst


def parse_instance(path) -> InstanceFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    except UnicodeDecodeError:
        raise InputError(f"{path}: not valid UTF-8")
    return parse_instance_text(text)


# ---------------------------------------------------------------------------
# argument resolution

# role -> (table, converter); converters raise InputError on type mismatch


def _as_hset(obj, where):
    if isinstance(obj, HPolyhedron):
        return obj
    if isinstance(obj, VPolytope):
        return vrep_to_hrep(obj)
    raise InputError(f"{where}: expected a set")


def _as_polytope(obj, where):
    if isinstance(obj, VPolytope):
        if obj.rays:
            raise InputError(f"{where}: the dynamic set must be bounded")
        return obj
    if isinstance(obj, HPolyhedron):
        try:
            V = hrep_to_vrep(obj)
        except EmptySetError:
            raise InputError(f"{where}: the dynamic set is empty")
        if V.rays:
            raise InputError(f"{where}: the dynamic set must be bounded")
        return V
    raise InputError(f"{where}: expected a set")


def _lookup(inst: InstanceFile, query: Query, key: str, tables, required=True):
    where = f"query {query.id}: argument {key!r}"
    if key not in query.args:
        if required:
            raise InputError(f"{where} is missing")
        return None
    ref = query.args[key]
    if isinstance(ref, list):
        return _vector(ref, where)
    if not isinstance(ref, str):
        raise InputError(f"{where}: expected a name")
    for t in tables:
        table = getattr(inst, t)
        if ref in table:
            return table[ref]
    raise InputError(f"{where}: dangling name {ref!r}")


def _point(inst, query, key, dim, required=True):
    v = _lookup(inst, query, key, ("points", "directions"), required)
    if v is None:
        return None
    if not isinstance(v, tuple):
        raise InputError(f"query {query.id}: argument {key!r} must be a point")
    if dim is not None and len(v) != dim:
        raise InputError(f"query {query.id}: argument {key!r} has dimension {len(v)}, expected {dim}")
    return v


def _set(inst, query, key, required=True):
    obj = _lookup(inst, query, key, ("sets",), required)
    return None if obj is None else _as_hset(obj, f"query {query.id}: argument {key!r}")


def _polytope(inst, query, key):
    return _as_polytope(_lookup(inst, query, key, ("sets",)), f"query {query.id}: argument {key!r}")


def _map_or_target(inst, query):
    """``G`` from a named map or a constant map built from a target set ``Omega``."""
    if "G" in query.args:
        G = _lookup(inst, query, "G", ("maps",))
        if not isinstance(G, GraphMap):
            raise InputError(f"query {query.id}: argument 'G' must be a map")
        return G
    omega = _set(inst, query, "Omega")
    return GraphMap.constant(omega)


def _map_point(inst, query, G):
    """``(x, y)`` for a map query; a constant target takes its point from ``x``."""
    if G.m == 0 and "y" not in query.args:
        return (), _point(inst, query, "x", G.n)
    return _point(inst, query, "x", G.m), _point(inst, query, "y", G.n)


def _norm(query):
    norm = str(query.options.get("norm", "inf"))
    if norm not in ("inf", "1", "2"):
        raise InputError(f"query {query.id}: norm must be 'inf', '1' or '2'")
    return norm


def _function(inst, query):
    """``(f, p)``: a value function named by ``args.function`` and its base point."""
    kind = query.args.get("function")
    if kind == "gauge":
        F = _polytope(inst, query, "F")
        return gauge_function(F), _point(inst, query, "x", F.dim)
    if kind == "distance":
        omega = _set(inst, query, "Omega")
        norm = _norm(query)
        if norm == "2":
            raise InputError(f"query {query.id}: the Euclidean distance is not piecewise linear")
        return distance_function(omega, norm), _point(inst, query, "x", omega.dim)
    if kind == "scalar_distance":
        G = _map_or_target(inst, query)
        x, y = _map_point(inst, query, G)
        return scalar_distance_function(G, "inf"), x + y
    if kind == "minimal_time":
        F = _polytope(inst, query, "F")
        G = _map_or_target(inst, query)
        _check_dim(query, F.dim, G.n)
        x, y = _map_point(inst, query, G)
        return minimal_time_sv_function(F, G), x + y
    if kind == "scalarization":
        omega = _set(inst, query, "Omega")
        d = _point(inst, query, "d", omega.dim)
        return scalarization_function(omega, d), _point(inst, query, "x", omega.dim)
    if kind == "max_affine":
        slopes = _matrix(query.args.get("slopes", []), f"query {query.id}: slopes")
        offsets = _vector(query.args.get("offsets", []), f"query {query.id}: offsets")
        if not slopes or len(slopes) != len(offsets):
            raise InputError(f"query {query.id}: slopes and offsets must be nonempty and match")
        dom = _set(inst, query, "domain", required=False)
        if dom is not None and dom.dim != len(slopes[0]):
            raise InputError(f"query {query.id}: domain dimension clashes with the slopes")
        return PLValueFunction.max_affine(slopes, offsets, dom), _point(inst, query, "x", len(slopes[0]))
    raise InputError(f"query {query.id}: 'function' must be one of gauge, distance, "
                     f"scalar_distance, minimal_time, scalarization, max_affine")


def _check_dim(query, a, b):
    if a != b:
        raise InputError(f"query {query.id}: dimension clash ({a} vs {b})")


def _omega_point(inst, query):
    omega = _set(inst, query, "Omega")
    return omega, _point(inst, query, "x", omega.dim)


def _omega_dir_point(inst, query):
    omega = _set(inst, query, "Omega")
    d = _point(inst, query, "d", omega.dim)
    if not any(d):
        raise InputError(f"query {query.id}: the direction must be nonzero")
    return omega, d, _point(inst, query, "x", omega.dim)


def _dynamics(inst, query):
    F = _polytope(inst, query, "F")
    G = _map_or_target(inst, query)
    _check_dim(query, F.dim, G.n)
    x, y = _map_point(inst, query, G)
    return F, G, x, y


def _graph_point(inst, query):
    G = _map_or_target(inst, query)
    x, y = _map_point(inst, query, G)
    return G, x, y


def _gauge_args(inst, query):
    F = _polytope(inst, query, "F")
    return F, _point(inst, query, "x", F.dim)


# op -> (resolver, kind); kind selects how the result is run and reported
OPS = {
    "gauge": (_gauge_args, "value"),
    "distance": (_omega_point, "value"),
    "scalar_distance": (_graph_point, "value"),
    "minimal_time": (_dynamics, "value"),
    "generalized_projection": (_dynamics, "set"),
    "scalarization": (_omega_dir_point, "value"),
    "hitting_point": (_omega_dir_point, "point"),
    "normal_cone": (_omega_point, "set"),
    "metric_projection": (_omega_point, "point"),
    "value_subdifferential": (_function, "set"),
    "singular_subdifferential": (_function, "set"),
    "coderivative": (_graph_point, "set"),
    "minkowski_singular": (_gauge_args, "set"),
    "scalarization_subdifferential": (_omega_dir_point, "set"),
    "function_lipschitz_criterion": (_function, "verdict"),
    "aubin_criterion": (_graph_point, "verdict"),
    "scalarization_criterion": (_omega_dir_point, "verdict"),
    "minimal_time_criterion": (_dynamics, "verdict"),
    "minkowski_report": (_gauge_args, "report"),
    "convex_equivalences": (_graph_point, "report"),
    "inclusion_audit": (None, "report"),
}


@dataclass(frozen=True)
class _AuditInstance:
    kind: str
    x: tuple = ()
    y: tuple = ()
    G: GraphMap | None = None
    F: VPolytope | None = None
    omega: HPolyhedron | None = None
    d: tuple = ()


def _audit_args(inst, query):
    kind = query.args.get("kind")
    if kind == "graph":
        G, x, y = _graph_point(inst, query)
        return (_AuditInstance("graph", x, y, G=G),)
    if kind == "minimal_time":
        F, G, x, y = _dynamics(inst, query)
        return (_AuditInstance("minimal_time", x, y, G=G, F=F),)
    if kind == "scalarization":
        omega, d, x = _omega_dir_point(inst, query)
        return (_AuditInstance("scalarization", x, omega=omega, d=d),)
    raise InputError(f"query {query.id}: audit kind must be graph, minimal_time or scalarization")


def resolve(inst: InstanceFile, query: Query) -> tuple:
    """Resolved positional arguments of a query; raises :class:`InputError`."""
    resolver = OPS[query.op][0] or _audit_args
    out = resolver(inst, query)
    if query.op == "coderivative":
        G, x, y = out
        v = _point(inst, query, "v", G.n, required=False) or (Fraction(0),) * G.n
        return G, x, y, v
    return out


# ---------------------------------------------------------------------------
# execution


def _point_json(p) -> list:
    return [str(v) for v in p]


def _set_json(S: HPolyhedron) -> dict:
    C = S.canonical
    return {"hrep": C.to_json(), "text": C.describe()}


def _value(inst_args, op, query):
    if op == "gauge":
        return gauge(*inst_args)
    if op == "distance":
        omega, x = inst_args
        norm = _norm(query)
        if norm == "2":
            return ExtReal.of(metric_projection(omega, x)[1])
        return distance(omega, x, norm)
    if op == "scalar_distance":
        G, x, y = inst_args
        return scalar_distance_D(G, x, y, "1" if _norm(query) == "1" else "inf")
    if op == "minimal_time":
        F, G, x, y = inst_args
        return minimal_time_sv(F, G, x, y)
    if op == "scalarization":
        return scalarization(*inst_args)
    raise AssertionError(op)


def _sampled_function(op, args, query):
    """The scalar function and base point a value query samples in ``verify``."""
    if op == "gauge":
        F, x = args
        return gauge_function(F), x
    if op == "distance":
        omega, x = args
        norm = _norm(query)
        return (distance_function(omega, norm), x) if norm != "2" else (None, None)
    if op == "scalar_distance":
        G, x, y = args
        return scalar_distance_function(G, "inf"), x + y
    if op == "minimal_time":
        F, G, x, y = args
        return minimal_time_sv_function(F, G), x + y
    if op == "scalarization":
        omega, d, x = args
        return scalarization_function(omega, d), x
    return None, None


def _verdict(op, args, with_oracle):
    if op == "function_lipschitz_criterion":
        f, p = args
        return function_lipschitz_criterion(f, p, with_oracle), (f, p)
    if op == "aubin_criterion":
        G, x, y = args
        return aubin_criterion(G, x, y, with_oracle), None
    if op == "scalarization_criterion":
        omega, d, x = args
        return scalarization_criterion(omega, d, x, with_oracle), (scalarization_function(omega, d), x)
    if op == "minimal_time_criterion":
        F, G, x, y = args
        return (minimal_time_criterion(F, G, x, y, with_oracle=with_oracle),
                (minimal_time_sv_function(F, G), x + y))
    raise AssertionError(op)


def _witness_entries(qid, v: Verdict):
    out = []
    if isinstance(v.witness, list):
        for k, fc in enumerate(v.witness):
            if isinstance(fc, FaceCone):
                out.append({"query": qid, "name": f"face {k} cone", "trivial": fc.trivial,
                            "point": _point_json(fc.point), **_set_json(fc.cone)})
    elif v.witness is not None:
        out.append({"query": qid, "name": v.criterion, "trivial": is_trivial_cone(v.witness),
                    **_set_json(v.witness)})
    return out


def _verdict_json(v: Verdict) -> dict:
    return {
        "conclusion": v.conclusion,
        "criterion": v.criterion,
        "provenance": v.provenance,
        "cones": {k: _set_json(c) for k, c in sorted(v.cones.items())},
        "notes": list(v.notes),
    }


def _escalate(v: Verdict, fp) -> dict | None:
    """Exact-oracle decision for verdicts that are not decisive by themselves."""
    if fp is None:
        return None
    f, p = fp
    ex = exact_pl_lipschitz(f, p)
    return {"method": "interiority of the domain", "lipschitz": ex.lipschitz,
            "position": ex.position}


def run_query(inst: InstanceFile, query: Query, mode: str, plan: SamplingPlan):
    """Returns ``(result, witnesses, oracle_entries)`` for one query."""
    op = query.op
    kind = OPS[op][1]
    args = resolve(inst, query)
    result = {"id": query.id, "op": op, "status": "ok", "code": EXIT_OK}
    witnesses, oracle = [], []
    checking = mode in ("check", "verify")
    if kind == "value":
        val = _value(args, op, query)
        result["value"] = val.to_json()
        if mode == "verify":
            f, p = _sampled_function(op, args, query)
            if f is not None:
                oracle.append({"query": query.id, "sampled": sampled_modulus(f, p, plan).to_json()})
    elif kind == "set":
        if op == "generalized_projection":
            F, G, x, y = args
            S = generalized_projection(F, G, x, y)
        elif op == "normal_cone":
            S = normal_cone_at(*args)
        elif op == "value_subdifferential":
            S = value_subdifferential(*args)
        elif op == "singular_subdifferential":
            S = singular_subdifferential(*args)
        elif op == "coderivative":
            S = coderivative(*args).set
        elif op == "minkowski_singular":
            S = minkowski_singular(*args)
        else:
            res = scalarization_subdifferential(*args)
            S = res.set
            result["hit"] = _point_json(res.hit)
            result["time"] = str(res.time)
            result["exact"] = res.exact
        result["set"] = _set_json(S)
    elif kind == "point":
        if op == "hitting_point":
            hit, t = hitting_point(*args)
            result["point"] = _point_json(hit)
            result["time"] = str(t)
        else:
            z, d2 = metric_projection(*args)
            result["point"] = _point_json(z)
            result["squared_distance"] = str(d2)
    elif kind == "verdict":
        v, fp = _verdict(op, args, checking)
        result["verdict"] = _verdict_json(v)
        witnesses.extend(_witness_entries(query.id, v))
        entry = {}
        if v.oracle is not None:
            entry["exact"] = v.oracle
        if (v.conclusion == SUFFICIENT_FAILS or GAP_NOTE in v.notes) and "exact" not in entry:
            esc = _escalate(v, fp)
            if esc is not None:
                entry["exact"] = esc
        if mode == "verify":
            if op == "aubin_criterion":
                G, x, y = args
                entry["sampled"] = aubin_sampled(G, x, y, plan).to_json()
            elif fp is not None:
                entry["sampled"] = sampled_modulus(fp[0], fp[1], plan).to_json()
        if entry:
            oracle.append({"query": query.id, **entry})
    else:
        if op == "minkowski_report":
            rep = minkowski_report(*args)
            result["report"] = {
                "local": None if rep.local is None else _verdict_json(rep.local),
                "local_error": rep.local_error,
                "zero_in_interior": rep.zero_in_interior,
                "dual_cone_trivial": rep.dual_trivial,
                "lipschitz_at_zero": rep.lipschitz_at_zero,
                "globally_lipschitz": rep.globally_lipschitz,
                "global_agreement": rep.global_agreement,
            }
            if rep.local is not None:
                witnesses.extend(_witness_entries(query.id, rep.local))
        elif op == "convex_equivalences":
            G, x, y = args
            rep = convex_equivalences(G, x, y, plan)
            result["report"] = {
                "aubin_sampled": rep.aubin_oracle,
                "distance_lipschitz_sampled": rep.distance_lipschitz_oracle,
                "interiority": rep.interiority,
                "coderivative_trivial": rep.coderivative_trivial,
                "agreement": rep.agreement,
            }
            oracle.append({"query": query.id,
                           **{k: p.to_json() for k, p in sorted(rep.profiles.items())}})
        else:
            rep = inclusion_audit(args[0])
            result["report"] = {
                "passed": rep.passed,
                "items": [{"name": i.name, "status": i.status, "detail": i.detail,
                           "offending": None if i.offending is None else list(i.offending)}
                          for i in rep.items],
            }
    return result, witnesses, oracle


def run_queries(inst: InstanceFile, mode: str = "eval", plan: SamplingPlan | None = None,
                seed: int = 0) -> tuple[dict, int]:
    """Report dictionary and process exit code.  Failures are recorded per query."""
    plan = plan or SamplingPlan(seed=seed)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "polylip",
        "version": __version__,
        "instance_sha256": inst.sha256,
        "mode": mode,
        "seed": plan.seed,
        "plan": {"radii": plan.K, "samples": plan.samples, "k0": plan.k0, "norm": plan.norm}
        if mode == "verify" else None,
        "results": [],
        "witnesses": [],
        "oracle": [],
    }
    code = EXIT_OK
    for query in inst.queries:
        try:
            result, witnesses, oracle = run_query(inst, query, mode, plan)
        except (PreconditionError, EmptySetError, UnboundedSetError) as exc:
            result, witnesses, oracle = ({"id": query.id, "op": query.op, "status": "out-of-domain",
                                          "code": EXIT_OUT_OF_DOMAIN, "error": str(exc)}, [], [])
        except (InputError, StructuralError) as exc:
            result, witnesses, oracle = ({"id": query.id, "op": query.op, "status": "input-error",
                                          "code": EXIT_INPUT, "error": str(exc)}, [], [])
            code = max(code, EXIT_INPUT)
        except Exception as exc:  # recorded, batch continues
            kind = "invariant breach" if isinstance(exc, InvariantError) else type(exc).__name__
            result, witnesses, oracle = ({"id": query.id, "op": query.op, "status": "internal-error",
                                          "code": EXIT_INTERNAL, "error": f"{kind}: {exc}"}, [], [])
            code = EXIT_INTERNAL
        report["results"].append(result)
        report["witnesses"].extend(witnesses)
        report["oracle"].extend(oracle)
    return report, code


# ---------------------------------------------------------------------------
# emission


def emit_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _ext_text(v) -> str:
    return v["finite"] if isinstance(v, dict) else v


def _oracle_phrase(exact: dict | None) -> str:
    if not exact:
        return "not run"
    word = "LIPSCHITZ" if exact["lipschitz"] else "NOT LIPSCHITZ"
    return f"exact oracle says {word} (point {exact['position']})"


def verdict_line(v: dict, oracle: dict | None = None) -> str:
    """One summary line naming the criterion used."""
    c, crit = v["conclusion"], v["criterion"]
    sufficient = v["provenance"] == SUFFICIENT
    if c == LIPSCHITZ:
        tail = "; sufficient only" if sufficient else ""
        return f"LIPSCHITZ (criterion: {crit}; witness cone trivial{tail})"
    if c == NOT_LIPSCHITZ:
        return f"NOT LIPSCHITZ (criterion: {crit}; witness cone nontrivial)"
    if c == SUFFICIENT_HOLDS:
        return f"LIPSCHITZ (criterion: {crit}; sufficient only; every face cone trivial)"
    exact = (oracle or {}).get("exact")
    return (f"UNDECIDED (criterion: {crit}; sufficient only; "
            f"oracle escalation: {_oracle_phrase(exact)})")


def emit_text(report: dict) -> str:
    lines = [f"polylip {report['version']}  mode {report['mode']}  seed {report['seed']}",
             f"instance sha256 {report['instance_sha256']}"]
    oracle = {}
    for o in report["oracle"]:
        oracle.setdefault(o["query"], {}).update(o)
    for r in report["results"]:
        head = f"[{r['id']}] {r['op']}"
        if r["status"] != "ok":
            lines.append(f"{head}: {r['status']} (code {r['code']}): {r['error']}")
            continue
        orc = oracle.get(r["id"])
        if "value" in r:
            lines.append(f"{head} = {_ext_text(r['value'])}")
        elif "set" in r:
            rows = r["set"]["text"]
            lines.append(f"{head} = " + ("{" + "; ".join(rows) + "}" if rows else "whole space"))
            if "hit" in r:
                lines.append(f"    hit point ({', '.join(r['hit'])}) at time {r['time']}"
                             + ("" if r["exact"] else "; upper estimate only"))
        elif "point" in r:
            extra = f"time {r['time']}" if "time" in r else f"squared distance {r['squared_distance']}"
            lines.append(f"{head} = ({', '.join(r['point'])}); {extra}")
        elif "verdict" in r:
            v = r["verdict"]
            lines.append(f"{head}: {verdict_line(v, orc)}")
            for name, cone in v["cones"].items():
                rows = cone["text"]
                lines.append(f"    {name}: " + ("{" + "; ".join(rows) + "}" if rows else "whole space"))
            for note in v["notes"]:
                lines.append(f"    note: {note}")
        else:
            rep = r["report"]
            if "items" in rep:
                lines.append(f"{head}: {'PASS' if rep['passed'] else 'FAIL'}")
                for item in rep["items"]:
                    lines.append(f"    {item['status']}: {item['name']}"
                                 + (f" ({item['detail']})" if item["detail"] else ""))
            else:
                lines.append(f"{head}:")
                for key, val in rep.items():
                    if key == "local" and val is not None:
                        lines.append(f"    local: {verdict_line(val)}")
                    elif key != "local":
                        lines.append(f"    {key}: {val}")
        if orc:
            if "exact" in orc and "verdict" not in r:
                lines.append(f"    oracle: {_oracle_phrase(orc['exact'])}")
            elif "exact" in orc and r["verdict"]["conclusion"] != SUFFICIENT_FAILS:
                lines.append(f"    oracle: {_oracle_phrase(orc['exact'])}")
            for key in ("sampled", "aubin", "distance"):
                if key in orc:
                    prof = orc[key]
                    est = prof["estimate"]
                    est = "-" if est is None else _ext_text(est)
                    lines.append(f"    sampled {key if key != 'sampled' else 'modulus'}: "
                                 f"{prof['verdict']} (estimate {est})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polylip",
        description="Exact Lipschitz and Aubin criteria on polyhedral convex data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("instance", help="instance JSON file")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("-o", "--output", help="write the report here instead of stdout")

    common(sub.add_parser("eval", help="evaluate every query"))
    common(sub.add_parser("check", help="evaluate and echo the exact oracle for criteria"))
    ver = sub.add_parser("verify", help="check plus sampled oracle profiles")
    common(ver)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--radii", type=int, default=12, help="number of radius halvings")
    ver.add_argument("--samples", type=int, default=200, help="random offsets per radius")
    plot = sub.add_parser("plot2d", help="draw a 2-D query as SVG")
    plot.add_argument("instance")
    plot.add_argument("--query", required=True, help="query id")
    plot.add_argument("-o", "--output", required=True, help="SVG output path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inst = parse_instance(args.instance)
    except InputError as exc:
        print(f"polylip: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "plot2d":
        from .plot import PlotError, plot_query

        try:
            svg = plot_query(inst, args.query)
        except (InputError, PlotError) as exc:
            print(f"polylip: error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        except (PreconditionError, EmptySetError) as exc:
            print(f"polylip: query is out of domain: {exc}", file=sys.stderr)
            return EXIT_INPUT
        Path(args.output).write_text(svg, encoding="utf-8")
        return EXIT_OK
    plan = None
    seed = 0
    if args.command == "verify":
        if args.radii < 0 or args.samples < 0:
            print("polylip: error: --radii and --samples must be nonnegative", file=sys.stderr)
            return EXIT_INPUT
        plan = SamplingPlan(seed=args.seed, K=args.radii, samples=args.samples)
        seed = args.seed
    report, code = run_queries(inst, args.command, plan, seed)
    text = emit_json(report) if args.format == "json" else emit_text(report)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
