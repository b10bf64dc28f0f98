"""Subdifferentials, singular subdifferentials and coderivatives.

Everything here is computed on convex polyhedral data, where Fréchet,
limiting and convex-analysis objects coincide.  Value-function
subdifferentials come from the optimal dual face of the defining LP; the
closed-form cone formulas are computed separately so the two routes can be
compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    EQ,
    ONE,
    PreconditionError,
    StructuralError,
    optimal_dual_face,
    transpose,
    vec,
)
from .polyhedra import (
    ConeSet,
    HPolyhedron,
    VPolytope,
    classify_point,
    linear_image,
    negative_dual,
    normal_cone_at,
    point_dual,
    support_value,
)
from .varfun import (
    GraphMap,
    PLValueFunction,
    dom_of_map,
    gauge,
    hitting_point,
    scalarization_function,
)


@dataclass(frozen=True)
class CoderivativeResult:
    """``D*G(x, y)(v)`` together with the graph normal cone it was cut from."""

    set: HPolyhedron
    graph_normal_cone: ConeSet


@dataclass(frozen=True)
class ScalarizationSubdifferential:
    """Normal-cone formula for the scalarization subdifferential.

    ``exact`` records whether the calmness surrogate (interiority in the
    domain) guarantees equality rather than an upper estimate.
    """

    set: HPolyhedron
    hit: tuple
    time: Fraction
    exact: bool


def _as_cone(P: HPolyhedron) -> ConeSet:
    return ConeSet(P.A, P.b, P.kinds, P.dim)


def value_subdifferential(f: PLValueFunction, p) -> HPolyhedron:
    """Convex subdifferential of an LP value function at ``p``.

    The image of the optimal dual face under ``y -> -B^T y``.
    """
    p = vec(p)
    lp = f.lp_at(p)
    out = f.solve(p)
    if not out.optimal:
        raise PreconditionError(f"{f.name} is not finite at the point ({out.status})")
    face = optimal_dual_face(lp)
    if not f.B:
        return HPolyhedron.point((Fraction(0),) * f.param_dim)
    BT = transpose(f.B, f.param_dim)
    M = tuple(tuple(-v for v in row) for row in BT)
    return linear_image(face, M)


def singular_subdifferential(f: PLValueFunction, p) -> ConeSet:
    """``N(p; dom f)``, the horizon subdifferential of a convex function."""
    p = vec(p)
    dom = f.domain
    if not dom.contains(p):
        raise PreconditionError("the point is outside the domain")
    if not f.value(p).finite:
        raise PreconditionError("the function is not finite at the point")
    return normal_cone_at(dom, p)


def coderivative(G: GraphMap, x, y, v) -> CoderivativeResult:
    """``{u : (u, -v) in N((x, y); gph G)}``."""
    x, y, v = vec(x), vec(y), vec(v)
    if len(v) != G.n:
        raise StructuralError("dual direction must live in the output space")
    point = x + y
    if not G.graph.contains(point):
        raise PreconditionError("the point is not on the graph")
    N = normal_cone_at(G.graph, point)
    cut = N.slice(range(G.m, G.m + G.n), tuple(-a for a in v))
    if not any(v):
        cut = _as_cone(cut)
    return CoderivativeResult(cut, N)


def coderivative_at_zero_convex(G: GraphMap, x) -> ConeSet:
    """``N(x; dom G)``, which equals ``D*G(x, y)(0)`` for convex graphs."""
    x = vec(x)
    dom = dom_of_map(G)
    if not dom.contains(x):
        raise PreconditionError("the point is outside the domain of the map")
    return normal_cone_at(dom, x)


def minkowski_singular(F: VPolytope, x) -> ConeSet:
    """``F^- cap {x}^+``, the closed-form horizon subdifferential of the gauge."""
    x = vec(x)
    if not gauge(F, x).finite:
        raise PreconditionError("the point is outside the domain of the gauge")
    return negative_dual(F).intersect(point_dual(x))


def scalarization_subdifferential(omega: HPolyhedron, d, x) -> ScalarizationSubdifferential:
    """``{w : <w, -d> = 1} cap N(x + t d; omega)`` with ``t`` the hitting time."""
    d, x = vec(d), vec(x)
    hit, t = hitting_point(omega, d, x)
    N = normal_cone_at(omega, hit)
    row = tuple(-a for a in d)
    S = HPolyhedron(N.A + (row,), N.b + (ONE,), N.kinds + (EQ,), N.dim).canonical
    dom = scalarization_function(omega, d).domain
    exact = classify_point(dom, x)[0] == "interior"
    return ScalarizationSubdifferential(S, hit, t, exact)


def in_support_sphere(F: VPolytope, v) -> bool:
    """``sigma_F(-v) == 1``."""
    v = vec(v)
    return support_value(F, tuple(-a for a in v)) == 1


__all__ = [
    "CoderivativeResult", "ScalarizationSubdifferential", "value_subdifferential",
    "singular_subdifferential", "coderivative", "coderivative_at_zero_convex",
    "minkowski_singular", "scalarization_subdifferential", "in_support_sphere",
]
