"""Seeded random instances and the curated fixture corpus.

Random graphs are ``{(x, z) : P x + Q z <= r}`` with entries of ``P`` and
``Q`` drawn from ``{-3, ..., 3}``.  The base point has coordinates in
``{-1, 0, 1}`` and ``r`` is chosen so that the point is on the graph, with
roughly half of the rows active there.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .criteria import (
    aubin_criterion,
    function_lipschitz_criterion,
    minimal_time_in_criterion,
    minimal_time_out_criterion,
    minkowski_report,
    scalarization_criterion,
)
from .exact import EQ, LE, LinearProgram, dot, vec
from .oracle import exact_aubin, exact_pl_lipschitz
from .polyhedra import HPolyhedron, VPolytope
from .varfun import (
    GraphMap,
    PLValueFunction,
    gauge_function,
    minimal_time_sv_function,
    scalarization_function,
)

COEFFS = range(-3, 4)
SLACKS = (0, 0, 1, 2)


@dataclass(frozen=True)
class Instance:
    """One criterion instance with everything needed to check it."""

    name: str
    kind: str  # function | graph | gauge | minimal_time | scalarization
    x: tuple
    y: tuple = ()
    f: PLValueFunction | None = None
    G: GraphMap | None = None
    F: VPolytope | None = None
    omega: HPolyhedron | None = None
    d: tuple = ()

    def verdict(self, plan=None):
        if self.kind == "function":
            return function_lipschitz_criterion(self.f, self.x)
        if self.kind == "graph":
            return aubin_criterion(self.G, self.x, self.y)
        if self.kind == "gauge":
            return minkowski_report(self.F, self.x).local
        if self.kind == "minimal_time":
            if self.G.contains(self.x, self.y):
                return minimal_time_in_criterion(self.F, self.G, self.x, self.y, with_oracle=False)
            return minimal_time_out_criterion(self.F, self.G, self.x, self.y, with_oracle=False)
        if self.kind == "scalarization":
            return scalarization_criterion(self.omega, self.d, self.x)
        raise ValueError(f"unknown instance kind {self.kind!r}")

    def exact_oracle(self) -> bool:
        if self.kind == "function":
            return exact_pl_lipschitz(self.f, self.x).lipschitz
        if self.kind == "graph":
            return exact_aubin(self.G, self.x).lipschitz
        if self.kind == "gauge":
            return exact_pl_lipschitz(gauge_function(self.F), self.x).lipschitz
        if self.kind == "minimal_time":
            return exact_pl_lipschitz(minimal_time_sv_function(self.F, self.G), self.x + self.y).lipschitz
        if self.kind == "scalarization":
            return exact_pl_lipschitz(scalarization_function(self.omega, self.d), self.x).lipschitz
        raise ValueError(f"unknown instance kind {self.kind!r}")

    def evaluate(self, plan=None):
        """``(verdict, oracle_lipschitz, biconditional)`` for the agreement harness."""
        v = self.verdict(plan)
        return v, self.exact_oracle(), v.provenance == "characterization"


# ---------------------------------------------------------------------------
# random generators


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def _row(rng, n):
    while True:
        row = tuple(Fraction(rng.choice(COEFFS)) for _ in range(n))
        if any(row):
            return row


def random_graph(seed, max_m=3, max_n=3, max_rows=8):
    """A random convex polyhedral graph and a point on it."""
    rng = _rng(seed)
    m = rng.randint(1, max_m)
    n = rng.randint(1, max_n)
    rows = rng.randint(2, max_rows)
    x = tuple(Fraction(rng.choice((-1, 0, 1))) for _ in range(m))
    y = tuple(Fraction(rng.choice((-1, 0, 1))) for _ in range(n))
    A, b = [], []
    for _ in range(rows):
        a = _row(rng, m + n)
        A.append(a)
        b.append(dot(a, x + y) + rng.choice(SLACKS))
    return GraphMap(HPolyhedron(tuple(A), tuple(b), (LE,) * rows, m + n), m, n), x, y


def random_pl_function(seed, max_n=3):
    """A max-affine function restricted to a random polyhedral domain, with a domain point."""
    rng = _rng(seed)
    n = rng.randint(1, max_n)
    k = rng.randint(1, 4)
    x = tuple(Fraction(rng.choice((-1, 0, 1))) for _ in range(n))
    slopes = [tuple(Fraction(rng.choice(COEFFS)) for _ in range(n)) for _ in range(k)]
    offsets = [Fraction(rng.choice(COEFFS)) for _ in range(k)]
    nd = rng.randint(0, 3)
    dA, db = [], []
    for _ in range(nd):
        a = _row(rng, n)
        dA.append(a)
        db.append(dot(a, x) + rng.choice(SLACKS))
    domain = HPolyhedron(tuple(dA), tuple(db), (LE,) * nd, n) if nd else None
    return PLValueFunction.max_affine(slopes, offsets, domain), x


def random_polytope(seed, dims=(2, 3)):
    """Random integer polytope ``F`` and a point of ``cone(F)``."""
    rng = _rng(seed)
    n = rng.choice(dims)
    k = rng.randint(1, n + 3)
    verts = sorted({tuple(Fraction(rng.choice(COEFFS)) for _ in range(n)) for _ in range(k)})
    F = VPolytope(tuple(verts), (), n)
    mu = [rng.choice((0, 0, 1, 2)) for _ in verts]
    x = tuple(sum((c * v[i] for c, v in zip(mu, verts)), Fraction(0)) for i in range(n))
    return F, x


def random_scalarization_case(seed, max_n=3):
    """``(omega, d, x, alpha)`` with a nonempty random target set."""
    rng = _rng(seed)
    while True:
        n = rng.randint(1, max_n)
        rows = rng.randint(1, 4)
        A = tuple(_row(rng, n) for _ in range(rows))
        b = tuple(Fraction(rng.choice(COEFFS)) for _ in range(rows))
        omega = HPolyhedron(A, b, (LE,) * rows, n)
        if not omega.is_empty():
            break
    d = _row(rng, n)
    x = tuple(Fraction(rng.randint(-6, 6), rng.choice((1, 2, 3))) for _ in range(n))
    alpha = Fraction(rng.randint(-12, 12), rng.choice((1, 2, 4, 3)))
    return omega, d, x, alpha


def random_minimal_time(seed, max_m=2, max_n=2, max_rows=5) -> Instance:
    """Random minimal-time instance with a finite time at its point.

    The point is a graph point shifted in the output space; shifts that
    leave the minimal time infinite are redrawn.
    """
    from .varfun import minimal_time_sv

    rng = _rng(seed)
    while True:
        G, x, y = random_graph(rng, max_m, max_n, max_rows)
        k = rng.randint(1, 3)
        verts = sorted({tuple(Fraction(rng.randint(-2, 2)) for _ in range(G.n)) for _ in range(k)})
        F = VPolytope(tuple(verts), (), G.n)
        shift = tuple(Fraction(rng.choice((-2, -1, 0, 0, 1, 2))) for _ in range(G.n))
        yy = tuple(a + b for a, b in zip(y, shift))
        if minimal_time_sv(F, G, x, yy).finite:
            return Instance(f"random minimal time {seed}", "minimal_time", x, yy, G=G, F=F)


def random_solvable_lp(seed, max_vars=5, max_rows=5) -> LinearProgram:
    """An LP built from a feasible primal point and a feasible dual point."""
    rng = _rng(seed)
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_rows)
    nonneg = tuple(rng.random() < 0.6 for _ in range(n))
    kinds = tuple(EQ if rng.random() < 0.25 else LE for _ in range(m))
    A = tuple(tuple(Fraction(rng.choice(COEFFS)) for _ in range(n)) for _ in range(m))
    x0 = tuple(Fraction(rng.randint(0, 3)) for _ in range(n))
    b = tuple(dot(a, x0) + (0 if k == EQ else rng.choice(SLACKS)) for a, k in zip(A, kinds))
    # dual point: y >= 0 on LE rows, free on EQ rows; c + A^T y >= 0 with
    # equality on free variables
    y = tuple(Fraction(rng.randint(0, 3) if k == LE else rng.randint(-3, 3)) for k in kinds)
    c = []
    for j in range(n):
        aty = sum((A[i][j] * y[i] for i in range(m)), Fraction(0))
        s = Fraction(rng.randint(0, 2)) if nonneg[j] else Fraction(0)
        c.append(s - aty)
    sense = rng.choice(("min", "max"))
    if sense == "max":
        c = [-v for v in c]
    return LinearProgram(tuple(c), A, b, kinds, nonneg, sense)


def random_hpolytope(seed, dims=(2, 3)) -> HPolyhedron:
    """Random bounded H-polytope: a random vertex set's hull."""
    from .polyhedra import vrep_to_hrep

    rng = _rng(seed)
    n = rng.choice(dims)
    k = rng.randint(1, n + 4)
    verts = sorted({tuple(Fraction(rng.choice(COEFFS)) for _ in range(n)) for _ in range(k)})
    return vrep_to_hrep(VPolytope(tuple(verts), (), n))


def random_lifted_system(seed):
    """Random ``{(x, z) : A (x, z) <= b}`` with 1-2 eliminated coordinates."""
    rng = _rng(seed)
    nx = rng.randint(1, 2)
    nz = rng.randint(1, 2)
    rows = rng.randint(2, 6)
    A = tuple(_row(rng, nx + nz) for _ in range(rows))
    b = tuple(Fraction(rng.randint(0, 6)) for _ in range(rows))
    return HPolyhedron(A, b, (LE,) * rows, nx + nz), nx


# ---------------------------------------------------------------------------
# curated corpus


def _h(A, b, kinds=None):
    return HPolyhedron.from_rows(A, b, kinds)


def _v(*pts):
    return VPolytope.from_points(pts)


AXIS = _h([[0, 1]], [0], [EQ])
SEGMENT_UP = _v([0, 0], [0, 1])
UNIT_RIGHT = _v([1])
SIMPLEX_EDGE = _v([1, 0], [0, 1])
BOX = _v([1, 1], [1, -1], [-1, 1], [-1, -1])
ABOVE_DIAGONAL = GraphMap.from_rows([[1, -1]], [0], 1, 1)
HALF_LINE = GraphMap.from_rows([[-1, 0], [0, 1]], [0, 0], 1, 1, [LE, EQ])
BOX_GRAPH = GraphMap(HPolyhedron.box([0, 0], 1), 1, 1)
ZERO_MAP = GraphMap.from_rows([[0, 1]], [0], 1, 1, [EQ])
V_CONE = _h([[1, -1], [-1, -1]], [0, 0])
ORTHANT = _h([[-1, 0], [0, -1]], [0, 0])


def corpus() -> list[Instance]:
    """Hand-checked fixtures covering vertex, edge and interior contact."""
    p = lambda *v: vec(v)  # noqa: E731
    return [
        Instance("gauge simplex edge, interior of domain", "gauge", p(1, 1), F=SIMPLEX_EDGE),
        Instance("gauge simplex edge, domain boundary", "gauge", p(1, 0), F=SIMPLEX_EDGE),
        Instance("gauge unit box", "gauge", p(1, 0), F=BOX),
        Instance("graph above diagonal", "graph", p(0), p(0), G=ABOVE_DIAGONAL),
        Instance("graph half line", "graph", p(0), p(0), G=HALF_LINE),
        Instance("graph box", "graph", p(0), p(0), G=BOX_GRAPH),
        Instance("minimal time on graph, unit speed", "minimal_time", p(0), p(0),
                 G=ABOVE_DIAGONAL, F=UNIT_RIGHT),
        Instance("minimal time off graph, unit speed", "minimal_time", p(2), p(0),
                 G=ABOVE_DIAGONAL, F=UNIT_RIGHT),
        Instance("minimal time, zero map", "minimal_time", p(0), p(0), G=ZERO_MAP, F=UNIT_RIGHT),
        Instance("minimal time, axis target at the target", "minimal_time", (), p(0, 0),
                 G=GraphMap.constant(AXIS), F=SEGMENT_UP),
        Instance("minimal time, axis target below", "minimal_time", (), p(0, -2),
                 G=GraphMap.constant(AXIS), F=SEGMENT_UP),
        Instance("minimal time, point target below", "minimal_time", (), p(0, -2),
                 G=GraphMap.constant(HPolyhedron.point([0, 0])), F=SEGMENT_UP),
        Instance("minimal time, 1-D point target", "minimal_time", (), p(-2),
                 G=GraphMap.constant(HPolyhedron.point([0])), F=UNIT_RIGHT),
        Instance("scalarization, vertex contact", "scalarization", p(0, -1), omega=V_CONE, d=p(0, 1)),
        Instance("scalarization, edge contact", "scalarization", p(1, 0), omega=V_CONE, d=p(0, 1)),
        Instance("scalarization, orthant corner", "scalarization", p(0, 0), omega=ORTHANT, d=p(0, 1)),
        Instance("scalarization, orthant edge from inside", "scalarization", p(1, 1), omega=ORTHANT,
                 d=p(0, 1)),
        Instance("absolute value at the kink", "function", p(0),
                 f=PLValueFunction.max_affine([[1], [-1]], [0, 0])),
        Instance("affine function restricted to a half line", "function", p(0),
                 f=PLValueFunction.max_affine([[2]], [1], _h([[-1]], [0]))),
    ]


def support_gap_instance() -> Instance:
    """Point target, speed set ``conv{(1,0),(0,1)}``, start ``(0,-1)``.

    ``F^perp = {0}`` so the off-graph cone test passes, yet ``T`` is finite
    only on the quadrant ``y <= 0``: moving the start to ``(e, -1)`` with
    ``e > 0`` makes the target unreachable, so ``T`` is not Lipschitz there.
    """
    return Instance("minimal time, point target on the reachable boundary", "minimal_time", (),
                    vec((0, -1)), G=GraphMap.constant(HPolyhedron.point([0, 0])), F=SIMPLEX_EDGE)


__all__ = [
    "Instance", "support_gap_instance", "random_graph", "random_pl_function", "random_polytope",
    "random_scalarization_case", "random_minimal_time", "random_solvable_lp", "random_hpolytope",
    "random_lifted_system", "corpus",
]
