"""Deterministic SVG drawings of two-dimensional queries.

The output is hand-written SVG so that the same instance always produces
the same bytes.  Sets are clipped to a square view box with exact
arithmetic; only the final pixel coordinates are rounded.
"""

from __future__ import annotations

import math
from fractions import Fraction
from xml.sax.saxutils import escape

from .cli import OPS, InputError, InstanceFile, resolve
from .gendiff import minkowski_singular
from .polyhedra import (
    ConeSet,
    EmptySetError,
    HPolyhedron,
    VPolytope,
    hrep_to_vrep,
    metric_projection,
    normal_cone_at,
    vrep_to_hrep,
)
from .varfun import GraphMap, gauge, generalized_projection, hitting_point, minimal_time_sv

SIZE = 480
CONE_RADIUS = Fraction(3, 2)

STYLES = {
    "sets": 'fill="#9ecae1" fill-opacity="0.35" stroke="#3182bd" stroke-width="2"',
    "dynamic": 'fill="#fdae6b" fill-opacity="0.35" stroke="#e6550d" stroke-width="2"',
    "projection": 'fill="#31a354" stroke="#31a354" stroke-width="3"',
    "cones": 'fill="#bcbddc" fill-opacity="0.45" stroke="#756bb1" stroke-width="1.5"',
    "points": 'fill="#000000" stroke="#000000" stroke-width="1.5"',
}


class PlotError(Exception):
    """The query cannot be drawn (for example because it is not planar)."""


def _as_h(obj) -> HPolyhedron:
    return vrep_to_hrep(obj) if isinstance(obj, VPolytope) else obj


def _vertices(P: HPolyhedron) -> list:
    try:
        return list(hrep_to_vrep(P).vertices)
    except EmptySetError:
        return []


def _ordered(points: list) -> list:
    """Vertices of a planar polygon in counterclockwise order."""
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: (math.atan2(float(p[1] - cy), float(p[0] - cx)), p))


class Canvas:
    def __init__(self, lo: tuple, hi: tuple):
        self.lo, self.hi = lo, hi
        self.view = HPolyhedron.from_rows([[1, 0], [-1, 0], [0, 1], [0, -1]],
                                          [hi[0], -lo[0], hi[1], -lo[1]])
        self.layers = {name: [] for name in STYLES}

    def px(self, p) -> str:
        sx = SIZE * (p[0] - self.lo[0]) / (self.hi[0] - self.lo[0])
        sy = SIZE - SIZE * (p[1] - self.lo[1]) / (self.hi[1] - self.lo[1])
        return f"{float(sx):.2f},{float(sy):.2f}"

    def shape(self, layer: str, P: HPolyhedron, label: str = ""):
        pts = _ordered(_vertices(P.intersect(self.view)))
        if not pts:
            return
        if len(pts) == 1:
            x, y = self.px(pts[0]).split(",")
            el = f'<circle cx="{x}" cy="{y}" r="4"/>'
        elif len(pts) == 2:
            (x1, y1), (x2, y2) = (self.px(p).split(",") for p in pts)
            el = f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>'
        else:
            el = f'<polygon points="{" ".join(self.px(p) for p in pts)}"/>'
        self.layers[layer].append(el)
        if label:
            self.text(layer, pts[0], label)

    def point(self, p, label: str = ""):
        self.shape("points", HPolyhedron.point(p), label)

    def text(self, layer, p, label):
        x, y = self.px(p).split(",")
        self.layers[layer].append(
            f'<text x="{float(x) + 6:.2f}" y="{float(y) - 6:.2f}" stroke="none" '
            f'fill="#000000" font-size="13" font-family="sans-serif">{escape(label)}</text>')

    def cone(self, C: ConeSet, at, label: str = ""):
        body = C.intersect(HPolyhedron.box((0, 0), CONE_RADIUS)).translated(at)
        self.shape("cones", body, label)

    def svg(self) -> str:
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
               f'viewBox="0 0 {SIZE} {SIZE}">',
               f'<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>']
        if self.lo[0] <= 0 <= self.hi[0]:
            (x1, y1), (x2, y2) = (self.px(p).split(",") for p in ((0, self.lo[1]), (0, self.hi[1])))
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#cccccc"/>')
        if self.lo[1] <= 0 <= self.hi[1]:
            (x1, y1), (x2, y2) = (self.px(p).split(",") for p in ((self.lo[0], 0), (self.hi[0], 0)))
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#cccccc"/>')
        for name, style in STYLES.items():
            out.append(f'<g id="{name}" {style}>')
            out.extend(f"  {el}" for el in self.layers[name])
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _planar(objs) -> None:
    for obj in objs:
        if isinstance(obj, GraphMap):
            dim = obj.m + obj.n
        elif isinstance(obj, (HPolyhedron, VPolytope)):
            dim = obj.dim
        else:
            continue
        if dim != 2:
            raise PlotError(f"plot2d draws planar instances only; this query lives in dimension {dim}")


def _bounds(points: list) -> tuple:
    xs = [p[0] for p in points] or [Fraction(0)]
    ys = [p[1] for p in points] or [Fraction(0)]
    cx = (min(xs) + max(xs)) / 2
    cy = (min(ys) + max(ys)) / 2
    half = max(max(xs) - min(xs), max(ys) - min(ys), Fraction(4)) / 2 + Fraction(3, 2)
    return (cx - half, cy - half), (cx + half, cy + half)


def plot_query(inst: InstanceFile, qid: str) -> str:
    """SVG text for the query with id ``qid``."""
    matches = [q for q in inst.queries if q.id == qid]
    if not matches:
        raise InputError(f"no query with id {qid!r}")
    query = matches[0]
    if OPS[query.op][0] is None:
        raise PlotError("audit queries have no drawing")
    args = resolve(inst, query)
    sets = {}
    for key in ("Omega", "F", "domain"):
        ref = query.args.get(key)
        if isinstance(ref, str) and ref in inst.sets:
            sets[key] = inst.sets[ref]
    graph = next((a for a in args if isinstance(a, GraphMap)), None)
    _planar(list(sets.values()) + ([graph] if graph is not None else []))

    if graph is not None:
        gi = args.index(graph)
        point = tuple(args[gi + 1]) + tuple(args[gi + 2])
    else:
        point = args[-1]
    if len(point) != 2:
        raise PlotError(f"plot2d draws planar instances only; the query point has dimension {len(point)}")

    anchors = [point]
    extra = []  # (layer, set, label)
    cones = []  # (cone, anchor, label)
    F = sets.get("F")
    if isinstance(F, VPolytope) and F.dim == 2:
        anchors.extend(F.vertices)
    for S in sets.values():
        anchors.extend(_vertices(_as_h(S)))

    op = query.op
    if op in ("minimal_time", "generalized_projection", "minimal_time_criterion") and graph.m == 0:
        Fv, G, _, y = args
        t = minimal_time_sv(Fv, G, (), y)
        extra.append(("dynamic", VPolytope(tuple(tuple(a + b for a, b in zip(y, v))
                                                 for v in Fv.vertices), (), 2), "y + F"))
        if t.finite:
            seg = VPolytope(tuple(tuple(a + t.value * b for a, b in zip(y, v)) for v in Fv.vertices), (), 2)
            extra.append(("dynamic", seg, f"y + {t.value}F"))
            anchors.extend(seg.vertices)
            Pi = generalized_projection(Fv, G, (), y)
            extra.append(("projection", Pi, "projection"))
            for z in _vertices(Pi)[:4]:
                cones.append((normal_cone_at(G.graph, z), z, "N"))
    elif op in ("scalarization", "scalarization_criterion", "scalarization_subdifferential",
                "hitting_point"):
        omega, d, x = args
        hit, _ = hitting_point(omega, d, x)
        anchors.append(hit)
        extra.append(("dynamic", VPolytope((x, hit), (), 2), "x + t d"))
        extra.append(("projection", HPolyhedron.point(hit), "hit"))
        cones.append((normal_cone_at(omega, hit), hit, "N"))
    elif op in ("distance", "normal_cone", "metric_projection"):
        omega, x = args
        z, _ = metric_projection(omega, x)
        anchors.append(z)
        extra.append(("projection", HPolyhedron.point(z), "projection"))
        cones.append((normal_cone_at(omega, z), z, "N"))
    elif op in ("gauge", "minkowski_singular", "minkowski_report"):
        Fv, x = args
        extra.append(("dynamic", Fv, "level set 1"))
        if gauge(Fv, x).finite:
            cones.append((minkowski_singular(Fv, x), x, "F^- cap {x}^+"))
    elif graph is not None and graph.m and op in ("aubin_criterion", "coderivative",
                                                  "convex_equivalences", "scalar_distance"):
        cones.append((normal_cone_at(graph.graph, point), point, "N"))
    if graph is not None:
        anchors.extend(_vertices(graph.graph))

    lo, hi = _bounds([a for a in anchors if len(a) == 2])
    canvas = Canvas(lo, hi)
    for name, S in sets.items():
        if S.dim == 2 and not (name == "F" and graph is not None and graph.m == 0):
            canvas.shape("sets", _as_h(S), name)
    if graph is not None and "Omega" not in sets:
        canvas.shape("sets", graph.graph, "target" if graph.m == 0 else "graph")
    for layer, S, label in extra:
        canvas.shape(layer, _as_h(S), label)
    for C, at, label in cones:
        if C.dim == 2:
            canvas.cone(C, at, label)
    canvas.point(point, "point")
    return canvas.svg()


__all__ = ["PlotError", "plot_query", "Canvas"]
