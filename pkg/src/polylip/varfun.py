"""Exact evaluators for gauges, distances, minimal time and scalarization.

Each function is realized as the optimal value of a linear program whose
right-hand side depends affinely on the query point.  The builders
(``*_function``) return that :class:`PLValueFunction` descriptor so that the
same object can be evaluated, differentiated and audited.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, total_ordering

from .exact import (
    EQ,
    LE,
    ONE,
    ZERO,
    LinearProgram,
    LpOutcome,
    PreconditionError,
    StructuralError,
    dot,
    mat,
    solve_lp,
    unit,
    vec,
    zeros,
)
from .polyhedra import (
    EmptySetError,
    HPolyhedron,
    VPolytope,
    metric_projection,
    project_out,
    vrep_to_hrep,
)

NORMS = ("inf", "1", "2")


# ---------------------------------------------------------------------------
# extended reals


@total_ordering
@dataclass(frozen=True)
class ExtReal:
    """A rational, ``+inf`` or ``-inf``."""

    tag: str
    value: Fraction | None = None

    def __post_init__(self):
        if self.tag not in ("finite", "+inf", "-inf"):
            raise StructuralError(f"unknown extended-real tag {self.tag!r}")
        if (self.tag == "finite") != (self.value is not None):
            raise StructuralError("finite extended reals carry a value, infinite ones do not")

    @classmethod
    def of(cls, value) -> "ExtReal":
        if isinstance(value, ExtReal):
            return value
        return cls("finite", Fraction(value))

    @classmethod
    def pos_inf(cls) -> "ExtReal":
        return cls("+inf")

    @classmethod
    def neg_inf(cls) -> "ExtReal":
        return cls("-inf")

    @classmethod
    def from_outcome(cls, out: LpOutcome) -> "ExtReal":
        """Minimization convention: infeasible is ``+inf``, unbounded is ``-inf``."""
        if out.status == "optimal":
            return cls.of(out.value)
        return cls.pos_inf() if out.status == "infeasible" else cls.neg_inf()

    @property
    def finite(self) -> bool:
        return self.tag == "finite"

    def _key(self):
        if self.tag == "-inf":
            return (-1, ZERO)
        if self.tag == "+inf":
            return (1, ZERO)
        return (0, self.value)

    def __lt__(self, other):
        return self._key() < ExtReal.of(other)._key()

    def __eq__(self, other):
        if not isinstance(other, (ExtReal, int, Fraction)):
            return NotImplemented
        return self._key() == ExtReal.of(other)._key()

    def __hash__(self):
        return hash(self._key())

    def __neg__(self):
        if self.finite:
            return ExtReal.of(-self.value)
        return ExtReal("-inf" if self.tag == "+inf" else "+inf")

    def __add__(self, other):
        other = ExtReal.of(other)
        if self.finite and other.finite:
            return ExtReal.of(self.value + other.value)
        tags = {self.tag, other.tag} - {"finite"}
        if len(tags) == 2:
            raise PreconditionError("+inf + -inf is undefined")
        return ExtReal(tags.pop())

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-ExtReal.of(other))

    def __mul__(self, t):
        """Multiplication by a nonnegative rational (``0 * inf = 0``)."""
        t = Fraction(t)
        if t < 0:
            return (-self) * (-t)
        if self.finite:
            return ExtReal.of(self.value * t)
        return ExtReal.of(0) if t == 0 else self

    __rmul__ = __mul__

    def __str__(self):
        return str(self.value) if self.finite else self.tag

    def to_json(self):
        return {"finite": str(self.value)} if self.finite else self.tag


PLUS_INF = ExtReal.pos_inf()
MINUS_INF = ExtReal.neg_inf()


# ---------------------------------------------------------------------------
# set-valued maps


@dataclass(frozen=True)
class GraphMap:
    """A set-valued map ``R^m => R^n`` given by its graph in ``R^(m+n)``.

    ``m = 0`` encodes a constant set.
    """

    graph: HPolyhedron
    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 1 or self.graph.dim != self.m + self.n:
            raise StructuralError(
                f"graph dimension {self.graph.dim} does not split as {self.m} + {self.n}"
            )

    @classmethod
    def constant(cls, omega: HPolyhedron, m: int = 0) -> "GraphMap":
        return cls(omega.embed(m + omega.dim, range(m, m + omega.dim)), m, omega.dim)

    @classmethod
    def from_rows(cls, A, b, m: int, n: int, kinds=None) -> "GraphMap":
        return cls(HPolyhedron.from_rows(A, b, kinds, dim=m + n), m, n)

    def input_rows(self):
        """``(P, Q, r, kinds)`` with the graph ``P x + Q z (kinds) r``."""
        P = tuple(row[: self.m] for row in self.graph.A)
        Q = tuple(row[self.m:] for row in self.graph.A)
        return P, Q, self.graph.b, self.graph.kinds

    def contains(self, x, y) -> bool:
        return self.graph.contains(vec(x) + vec(y))

    @cached_property
    def domain(self) -> HPolyhedron:
        return dom_of_map(self)


def slice_map(G: GraphMap, x) -> HPolyhedron:
    """``G(x)`` as an H-polyhedron in ``R^n`` (possibly empty)."""
    x = vec(x)
    if len(x) != G.m:
        raise StructuralError(f"input point has dimension {len(x)}, map expects {G.m}")
    return G.graph.substitute({i: v for i, v in enumerate(x)})


def dom_of_map(G: GraphMap) -> HPolyhedron:
    """``{x : G(x) nonempty}`` by projecting the graph."""
    if G.m == 0:
        return HPolyhedron.universe(0) if not G.graph.is_empty() else HPolyhedron.empty(0)
    return project_out(G.graph, range(G.m, G.m + G.n))


# ---------------------------------------------------------------------------
# RHS-parametric value functions


@dataclass(frozen=True)
class PLValueFunction:
    """``p -> min c.x  s.t.  A x (kinds) b0 + B p``, ``x_j >= 0`` where flagged.

    Infeasible parameters give ``+inf``; unbounded ones give ``-inf``.  The
    value is convex in ``p``.
    """

    c: tuple
    A: tuple
    kinds: tuple
    b0: tuple
    B: tuple
    nonneg: tuple
    param_dim: int
    name: str = "value function"

    def __post_init__(self):
        nrows = len(self.A)
        if len(self.b0) != nrows or len(self.B) != nrows or len(self.kinds) != nrows:
            raise StructuralError("row counts of A, b0, B and kinds differ")
        for row in self.B:
            if len(row) != self.param_dim:
                raise StructuralError("B rows must have the parameter dimension")
        for row in self.A:
            if len(row) != len(self.c):
                raise StructuralError("A rows must match the variable count")
        if len(self.nonneg) != len(self.c):
            raise StructuralError("nonneg flags must match the variable count")

    @classmethod
    def build(cls, c, A, b0, B, kinds=None, nonneg=False, param_dim=None, name="value function"):
        c = vec(c)
        A = mat(A)
        B = mat(B)
        b0 = vec(b0)
        if param_dim is None:
            if not B:
                raise StructuralError("parameter dimension needed for a row-free template")
            param_dim = len(B[0])
        kinds = tuple(kinds) if kinds is not None else (LE,) * len(b0)
        if isinstance(nonneg, bool):
            nonneg = (nonneg,) * len(c)
        return cls(c, A, kinds, b0, B, tuple(nonneg), param_dim, name)

    @classmethod
    def max_affine(cls, slopes, offsets, domain: HPolyhedron | None = None, name="max-affine"):
        """``max_i (g_i . p + h_i)`` restricted to ``domain``, via an epigraph LP."""
        slopes = mat(slopes)
        offsets = vec(offsets)
        n = len(slopes[0])
        A, b0, B, kinds = [], [], [], []
        for g, h in zip(slopes, offsets):
            A.append((-ONE,))
            b0.append(-h)
            B.append(tuple(-v for v in g))
            kinds.append(LE)
        if domain is not None:
            for a, bi, k in domain.rows():
                A.append((ZERO,))
                b0.append(bi)
                B.append(tuple(-v for v in a))
                kinds.append(k)
        return cls((ONE,), tuple(A), tuple(kinds), tuple(b0), tuple(B), (False,), n, name)

    @property
    def nvars(self) -> int:
        return len(self.c)

    def lp_at(self, p) -> LinearProgram:
        p = vec(p)
        if len(p) != self.param_dim:
            raise StructuralError(f"parameter has dimension {len(p)}, expected {self.param_dim}")
        b = tuple(bi + dot(Bi, p) for bi, Bi in zip(self.b0, self.B))
        return LinearProgram(self.c, self.A, b, self.kinds, self.nonneg, "min")

    def solve(self, p) -> LpOutcome:
        return solve_lp(self.lp_at(p))

    def value(self, p) -> ExtReal:
        return ExtReal.from_outcome(self.solve(p))

    __call__ = value

    def feasibility_region(self) -> HPolyhedron:
        """``{(x, p) : A x - B p (kinds) b0, x >= 0 where flagged}``."""
        n = self.nvars
        A, b, kinds = [], [], []
        for a, bi, Bi, k in zip(self.A, self.b0, self.B, self.kinds):
            A.append(tuple(a) + tuple(-v for v in Bi))
            b.append(bi)
            kinds.append(k)
        for j in range(n):
            if self.nonneg[j]:
                A.append(unit(n + self.param_dim, j, -1))
                b.append(ZERO)
                kinds.append(LE)
        return HPolyhedron(tuple(A), tuple(b), tuple(kinds), n + self.param_dim)

    @cached_property
    def domain(self) -> HPolyhedron:
        """Parameters with a feasible LP (where the value is below ``+inf``)."""
        return project_out(self.feasibility_region(), range(self.nvars))

    def epigraph(self) -> HPolyhedron:
        """``{(p, z) : value(p) <= z}`` in ``R^(param_dim + 1)``."""
        n, d = self.nvars, self.param_dim
        lifted = self.feasibility_region().embed(n + d + 1, range(n + d))
        row = tuple(self.c) + zeros(d) + (-ONE,)
        lifted = HPolyhedron(lifted.A + (row,), lifted.b + (ZERO,), lifted.kinds + (LE,), n + d + 1)
        return project_out(lifted, range(n))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "c": [str(v) for v in self.c],
            "A": [[str(v) for v in r] for r in self.A],
            "kinds": list(self.kinds),
            "b0": [str(v) for v in self.b0],
            "B": [[str(v) for v in r] for r in self.B],
            "nonneg": list(self.nonneg),
            "param_dim": self.param_dim,
        }


def _require_bounded(F: VPolytope):
    if F.rays:
        raise PreconditionError("the dynamic set must be bounded")
    if not F.vertices:
        raise PreconditionError("the dynamic set must be nonempty")


def _vertex_columns(F: VPolytope):
    """``V`` with the generators of ``F`` as columns."""
    return tuple(tuple(v[i] for v in F.vertices) for i in range(F.dim))


# ---------------------------------------------------------------------------
# gauge


def gauge_function(F: VPolytope) -> PLValueFunction:
    """``x -> min sum(mu)  s.t.  V mu = x, mu >= 0``."""
    _require_bounded(F)
    n, k = F.dim, len(F.vertices)
    V = _vertex_columns(F)
    B = tuple(unit(n, i) for i in range(n))
    return PLValueFunction((ONE,) * k, V, (EQ,) * n, zeros(n), B, (True,) * k, n, "gauge")


def gauge(F: VPolytope, x) -> ExtReal:
    """Minkowski gauge ``inf{t >= 0 : x in tF}``."""
    x = vec(x)
    if not any(x):
        return ExtReal.of(0)
    return gauge_function(F).value(x)


# ---------------------------------------------------------------------------
# distances


def _norm_rows(n: int, norm: str, zcols: int, offset: int):
    """Rows bounding ``|z - p|`` in a polyhedral norm.

    Variables are ``(z, s)`` where ``s`` has one entry (inf norm) or ``n``
    entries (1 norm); returns ``(A, B, extra_vars)``.
    """
    A, B = [], []
    extra = 1 if norm == "inf" else n
    width = zcols + extra
    for i in range(n):
        s_idx = zcols if norm == "inf" else zcols + i
        for sign in (ONE, -ONE):
            row = [ZERO] * width
            row[offset + i] = sign
            row[s_idx] = -ONE
            A.append(tuple(row))
            brow = [ZERO] * n
            brow[i] = sign
            B.append(tuple(brow))
    return A, B, extra


def distance_function(omega: HPolyhedron, norm: str = "inf") -> PLValueFunction:
    """``x -> d(x, omega)`` in the 1 or inf norm as an LP value function."""
    if norm not in ("inf", "1"):
        raise PreconditionError("LP distance descriptors exist for the 1 and inf norms only")
    n = omega.dim
    nr, Bn, extra = _norm_rows(n, norm, n, 0)
    A = [tuple(a) + zeros(extra) for a in omega.A] + nr
    b0 = list(omega.b) + [ZERO] * len(nr)
    B = [zeros(n)] * omega.nrows + Bn
    kinds = list(omega.kinds) + [LE] * len(nr)
    c = zeros(n) + (ONE,) * extra
    return PLValueFunction(c, tuple(A), tuple(kinds), tuple(b0), tuple(B),
                           (False,) * (n + extra), n, f"distance-{norm}")


def distance(omega: HPolyhedron, x, norm: str = "inf") -> ExtReal:
    """Distance from ``x`` to ``omega``; the squared value for the 2 norm."""
    x = vec(x)
    if len(x) != omega.dim:
        raise StructuralError("point dimension mismatch")
    if norm not in NORMS:
        raise StructuralError(f"unknown norm {norm!r}")
    if omega.is_empty():
        return PLUS_INF
    if norm == "2":
        return ExtReal.of(metric_projection(omega, x)[1])
    return distance_function(omega, norm).value(x)


def scalar_distance_function(G: GraphMap, norm: str = "inf") -> PLValueFunction:
    """``(x, y) -> d(y, G(x))`` in a polyhedral norm on ``y``."""
    if norm not in ("inf", "1"):
        raise PreconditionError("LP distance descriptors exist for the 1 and inf norms only")
    m, n = G.m, G.n
    P, Q, r, gk = G.input_rows()
    nr, Bn, extra = _norm_rows(n, norm, n, 0)
    A = [tuple(q) + zeros(extra) for q in Q] + nr
    B = [tuple(-v for v in p) + zeros(n) for p in P] + [zeros(m) + tuple(row) for row in Bn]
    b0 = list(r) + [ZERO] * len(nr)
    kinds = list(gk) + [LE] * len(nr)
    c = zeros(n) + (ONE,) * extra
    return PLValueFunction(c, tuple(A), tuple(kinds), tuple(b0), tuple(B),
                           (False,) * (n + extra), m + n, f"graph-distance-{norm}")


def scalar_distance_D(G: GraphMap, x, y, norm: str = "inf") -> ExtReal:
    """``d(y, G(x))``; ``+inf`` when ``G(x)`` is empty."""
    return distance(slice_map(G, x), vec(y), norm)


# ---------------------------------------------------------------------------
# minimal time


def minimal_time_sv_function(F: VPolytope, G: GraphMap) -> PLValueFunction:
    """``(x, y) -> min sum(mu)  s.t.  (x, y + V mu) in gph G, mu >= 0``."""
    _require_bounded(F)
    if F.dim != G.n:
        raise StructuralError("dynamic set and map output have different dimensions")
    V = _vertex_columns(F)
    k = len(F.vertices)
    P, Q, r, gk = G.input_rows()
    A = tuple(tuple(dot(q, tuple(V[i][j] for i in range(G.n))) for j in range(k)) for q in Q)
    B = tuple(tuple(-v for v in p) + tuple(-v for v in q) for p, q in zip(P, Q))
    return PLValueFunction((ONE,) * k, A, tuple(gk), tuple(r), B, (True,) * k, G.m + G.n,
                           "minimal-time")


def minimal_time_function(F: VPolytope, omega: HPolyhedron) -> PLValueFunction:
    """``x -> T_F(x; omega)``."""
    return minimal_time_sv_function(F, GraphMap.constant(omega))


def minimal_time(F: VPolytope, omega: HPolyhedron, x) -> ExtReal:
    """First time ``t >= 0`` with ``(x + tF)`` meeting ``omega``."""
    return minimal_time_function(F, omega).value(x)


def minimal_time_sv(F: VPolytope, G: GraphMap, x, y) -> ExtReal:
    """First time ``t >= 0`` with ``(y + tF)`` meeting ``G(x)``."""
    return minimal_time_sv_function(F, G).value(vec(x) + vec(y))


def generalized_projection(F: VPolytope, G: GraphMap, x, y) -> HPolyhedron:
    """``(y + tF) cap G(x)`` at the optimal time ``t``, in canonical H-form."""
    x, y = vec(x), vec(y)
    t = minimal_time_sv(F, G, x, y)
    if not t.finite:
        raise PreconditionError(f"minimal time is {t}; the projection set is undefined")
    target = slice_map(G, x)
    if t.value == 0:
        reach = HPolyhedron.point(y)
    else:
        reach = vrep_to_hrep(F).scaled(t.value).translated(y)
    out = reach.intersect(target).canonical
    if out.is_empty():
        raise EmptySetError("projection set is empty at a finite minimal time")
    return out


# ---------------------------------------------------------------------------
# scalarization


def scalarization_function(omega: HPolyhedron, d) -> PLValueFunction:
    """``x -> inf{t : x + t d in omega}`` over a free ``t``."""
    d = vec(d)
    if len(d) != omega.dim:
        raise StructuralError("direction dimension mismatch")
    if not any(d):
        raise PreconditionError("the direction must be nonzero")
    A = tuple((dot(a, d),) for a in omega.A)
    B = tuple(tuple(-v for v in a) for a in omega.A)
    return PLValueFunction((ONE,), A, omega.kinds, omega.b, B, (False,), omega.dim,
                           "scalarization")


def scalarization(omega: HPolyhedron, d, x) -> ExtReal:
    """Signed hitting time along ``d``; ``-inf`` when unbounded below."""
    return scalarization_function(omega, d).value(vec(x))


def hitting_point(omega: HPolyhedron, d, x):
    """``x + phi_d(x) d`` for a finite scalarization value."""
    x, d = vec(x), vec(d)
    t = scalarization(omega, d, x)
    if not t.finite:
        raise PreconditionError(f"scalarization value is {t}")
    return tuple(xi + t.value * di for xi, di in zip(x, d)), t.value


# ---------------------------------------------------------------------------
# epigraph encoding


def has_descent_ray(f: PLValueFunction) -> bool:
    """Is there a recession direction of the LP feasible set with ``c.dx < 0``?"""
    n = f.nvars
    A = list(f.A) + [tuple(f.c)]
    b = [ZERO] * len(f.A) + [-ONE]
    kinds = list(f.kinds) + [LE]
    for j in range(n):
        if f.nonneg[j]:
            A.append(unit(n, j, -1))
            b.append(ZERO)
            kinds.append(LE)
    out = solve_lp(LinearProgram(zeros(n), tuple(A), tuple(b), tuple(kinds), (False,) * n, "min"))
    return out.optimal


def epigraph_map(f: PLValueFunction) -> GraphMap:
    """The map ``x => [f(x), inf)`` whose graph is ``epi f``."""
    if not f.domain.is_empty() and has_descent_ray(f):
        raise PreconditionError("the value function is -inf on its domain; epigraph not closed")
    return GraphMap(f.epigraph(), f.param_dim, 1)


__all__ = [
    "ExtReal", "PLUS_INF", "MINUS_INF", "GraphMap", "PLValueFunction", "slice_map",
    "dom_of_map", "gauge", "gauge_function", "distance", "distance_function",
    "scalar_distance_D", "scalar_distance_function", "minimal_time", "minimal_time_function",
    "minimal_time_sv", "minimal_time_sv_function", "generalized_projection", "scalarization",
    "scalarization_function", "hitting_point", "epigraph_map",
]
