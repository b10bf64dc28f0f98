"""Lipschitz and Aubin criteria as cone-triviality tests.

Each checker returns a :class:`Verdict`.  Characterizations may conclude
``lipschitz`` or ``not-lipschitz``.  One-directional tests conclude
``sufficient-condition-holds`` or ``sufficient-condition-fails``, so a
failed sufficient test is never read as a negative answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exact import (
    EQ,
    LE,
    ONE,
    ZERO,
    InvariantError,
    LinearProgram,
    PreconditionError,
    norm_1,
    solve_lp,
    vec,
    zeros,
)
from .gendiff import (
    coderivative,
    minkowski_singular,
    scalarization_subdifferential,
    singular_subdifferential,
    value_subdifferential,
)
from .oracle import (
    LIPSCHITZ_EVIDENCE,
    SamplingPlan,
    aubin_sampled,
    exact_aubin,
    exact_pl_lipschitz,
    quick_plan,
    sampled_modulus,
)
from .polyhedra import (
    ConeSet,
    HPolyhedron,
    VPolytope,
    classify_point,
    enumerate_faces,
    hrep_to_vrep,
    is_trivial_cone,
    negative_dual,
    normal_cone_at,
    orthogonal_complement,
    positive_dual,
    find_violation,
    set_equal,
    support_value,
    vrep_to_hrep,
)
from .varfun import (
    GraphMap,
    PLValueFunction,
    dom_of_map,
    gauge_function,
    generalized_projection,
    hitting_point,
    minimal_time_sv_function,
    scalar_distance_function,
    scalarization_function,
)

LIPSCHITZ = "lipschitz"
NOT_LIPSCHITZ = "not-lipschitz"
SUFFICIENT_HOLDS = "sufficient-condition-holds"
SUFFICIENT_FAILS = "sufficient-condition-fails"
UNDECIDED = "undecided"

CHARACTERIZATION = "characterization"
SUFFICIENT = "sufficient"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one criterion.

    ``witness`` is the cone whose triviality decided the outcome (or a list
    of per-face cones); ``cones`` holds every intermediate cone worth
    printing; ``oracle`` is an optional independent echo.
    """

    conclusion: str
    criterion: str
    witness: object
    provenance: str = CHARACTERIZATION
    cones: dict = field(default_factory=dict)
    oracle: dict | None = None
    notes: tuple = ()

    @property
    def lipschitz_claim(self) -> bool:
        return self.conclusion in (LIPSCHITZ, SUFFICIENT_HOLDS)

    @property
    def decisive(self) -> bool:
        return self.conclusion in (LIPSCHITZ, NOT_LIPSCHITZ)


def _decide(cone, criterion, cones=None, oracle=None, notes=()) -> Verdict:
    trivial = is_trivial_cone(cone)
    return Verdict(LIPSCHITZ if trivial else NOT_LIPSCHITZ, criterion, cone.canonical,
                   CHARACTERIZATION, cones or {}, oracle, tuple(notes))


def _oracle_echo(f: PLValueFunction, p) -> dict:
    ex = exact_pl_lipschitz(f, p)
    return {"method": "interiority of the domain", "lipschitz": ex.lipschitz,
            "position": ex.position}


# ---------------------------------------------------------------------------
# characterizations


def function_lipschitz_criterion(f: PLValueFunction, x, with_oracle: bool = False) -> Verdict:
    """Lipschitz around ``x`` iff the singular subdifferential is ``{0}``."""
    C = singular_subdifferential(f, x)
    oracle = _oracle_echo(f, x) if with_oracle else None
    return _decide(C, "singular subdifferential", {"singular subdifferential": C.canonical}, oracle)


def aubin_criterion(G: GraphMap, x, y, with_oracle: bool = False) -> Verdict:
    """Aubin property around ``(x, y)`` iff ``D*G(x, y)(0) = {0}``."""
    res = coderivative(G, x, y, zeros(G.n))
    oracle = None
    if with_oracle:
        ex = exact_aubin(G, x)
        oracle = {"method": "interiority of the map domain", "lipschitz": ex.lipschitz,
                  "position": ex.position}
    return _decide(res.set, "coderivative",
                   {"graph normal cone": res.graph_normal_cone.canonical,
                    "coderivative at 0": res.set.canonical}, oracle)


@dataclass(frozen=True)
class EquivalenceReport:
    """The four equivalent conditions for convex graphs, each computed separately."""

    aubin_oracle: bool
    distance_lipschitz_oracle: bool
    interiority: bool
    coderivative_trivial: bool
    profiles: dict = field(default_factory=dict)

    @property
    def flags(self) -> tuple:
        return (self.aubin_oracle, self.distance_lipschitz_oracle, self.interiority,
                self.coderivative_trivial)

    @property
    def agreement(self) -> bool:
        return len(set(self.flags)) == 1


def convex_equivalences(G: GraphMap, x, y, plan: SamplingPlan | None = None) -> EquivalenceReport:
    """Sampled Aubin, sampled Lipschitz of the distance function, interiority and
    coderivative triviality at one graph point."""
    plan = plan or quick_plan()
    x, y = vec(x), vec(y)
    if not G.contains(x, y):
        raise PreconditionError("the point is not on the graph")
    aub = aubin_sampled(G, x, y, plan)
    D = scalar_distance_function(G, "inf")
    dmod = sampled_modulus(D, x + y, plan)
    dom = dom_of_map(G)
    interior = G.m == 0 or classify_point(dom, x)[0] == "interior"
    trivial = is_trivial_cone(coderivative(G, x, y, zeros(G.n)).set)
    return EquivalenceReport(aub.verdict == LIPSCHITZ_EVIDENCE,
                             dmod.verdict == LIPSCHITZ_EVIDENCE, interior, trivial,
                             {"aubin": aub, "distance": dmod})


@dataclass(frozen=True)
class MinkowskiReport:
    local: Verdict | None
    local_error: str | None
    zero_in_interior: bool
    dual_trivial: bool
    lipschitz_at_zero: bool
    globally_lipschitz: bool

    @property
    def global_flags(self) -> tuple:
        return (self.zero_in_interior, self.dual_trivial, self.lipschitz_at_zero,
                self.globally_lipschitz)

    @property
    def global_agreement(self) -> bool:
        return len(set(self.global_flags)) == 1


def zero_in_interior(F: VPolytope) -> bool:
    """``0 in int F``: no equality rows and every irredundant rhs positive."""
    H = vrep_to_hrep(F)
    return all(k == LE for k in H.kinds) and all(bi > 0 for bi in H.b)


def minkowski_report(F: VPolytope, x) -> MinkowskiReport:
    """Local gauge verdict at ``x`` plus the global equivalent conditions."""
    x = vec(x)
    local, err = None, None
    try:
        C = minkowski_singular(F, x)
        local = _decide(C, "gauge dual cone", {"F^- cap {x}^+": C.canonical})
    except PreconditionError as exc:
        err = str(exc)
    zi = zero_in_interior(F)
    Fm = negative_dual(F)
    dual_trivial = is_trivial_cone(Fm)
    at_zero = is_trivial_cone(minkowski_singular(F, zeros(F.dim)))
    dom = gauge_function(F).domain.canonical
    glob = dom.nrows == 0
    return MinkowskiReport(local, err, zi, dual_trivial, at_zero, glob)


def scalarization_criterion(omega: HPolyhedron, d, x, with_oracle: bool = False) -> Verdict:
    """Lipschitz around ``x`` iff ``N(x~; omega) cap {d}^perp = {0}`` (convex omega)."""
    d, x = vec(d), vec(x)
    hit, t = hitting_point(omega, d, x)
    N = normal_cone_at(omega, hit)
    C = N.intersect(ConeSet((d,), (ZERO,), (EQ,), len(d)))
    oracle = _oracle_echo(scalarization_function(omega, d), x) if with_oracle else None
    return _decide(C, "scalarization normal cone",
                   {"normal cone at hit point": N.canonical, "N cap {d}^perp": C.canonical},
                   oracle, (f"hit point ({', '.join(str(v) for v in hit)}) at time {t}",))


# ---------------------------------------------------------------------------
# minimal time


def _coderivative_pair_cone(N: ConeSet, m: int, n: int, v_cone: ConeSet) -> ConeSet:
    """``{(u, v) : (u, -v) in N, v in v_cone}`` in ``R^(m+n)``."""
    A, kinds = [], []
    for a, k in zip(N.A, N.kinds):
        A.append(tuple(a[:m]) + tuple(-c for c in a[m:]))
        kinds.append(k)
    for a, k in zip(v_cone.A, v_cone.kinds):
        A.append(zeros(m) + tuple(a))
        kinds.append(k)
    return ConeSet(tuple(A), zeros(len(A)), tuple(kinds), m + n)


def _contains_zero(F: VPolytope) -> bool:
    return vrep_to_hrep(F).contains(zeros(F.dim))


def minimal_time_in_criterion(F: VPolytope, G: GraphMap, x, y, with_oracle: bool = True) -> Verdict:
    """Graph-point test for the minimal time function.

    The cone ``{(u, v) : u in D*G(x, y)(v), v in F^-}`` must be ``{0}``.  The
    test is a characterization only when ``0 in F``.
    """
    x, y = vec(x), vec(y)
    if not G.contains(x, y):
        raise PreconditionError("the point is off the graph; use the outside-graph criterion")
    point = x + y
    N = normal_cone_at(G.graph, point)
    K = _coderivative_pair_cone(N, G.m, G.n, negative_dual(F))
    trivial = is_trivial_cone(K)
    zero_in_F = _contains_zero(F)
    cones = {"graph normal cone": N.canonical, "F^-": negative_dual(F).canonical,
             "K": K.canonical}
    notes = []
    if G.m == 0:
        C6 = N.intersect(positive_dual(F))
        cones["N cap F^+"] = C6.canonical
        if is_trivial_cone(C6) != trivial:
            raise InvariantError("constant-target cone disagrees with the graph cone")
    T = minimal_time_sv_function(F, G)
    oracle = _oracle_echo(T, point) if with_oracle else None
    if trivial:
        conclusion = LIPSCHITZ
        provenance = CHARACTERIZATION if zero_in_F else SUFFICIENT
    elif zero_in_F:
        conclusion = NOT_LIPSCHITZ
        provenance = CHARACTERIZATION
        if not zero_in_interior(F):
            notes.append("0 lies on the boundary of F; converse regime flagged for oracle confirmation")
    else:
        conclusion = SUFFICIENT_FAILS
        provenance = SUFFICIENT
        notes.append("0 is not in F, so a nontrivial cone is not a negative answer")
    return Verdict(conclusion, "minimal time at a graph point", K.canonical, provenance, cones,
                   oracle, tuple(notes))


@dataclass(frozen=True)
class FaceCone:
    active: frozenset
    point: tuple
    normal_cone: ConeSet
    cone: ConeSet
    trivial: bool


def _meets_relint(graph: HPolyhedron, active: frozenset, extra: HPolyhedron):
    """A point of ``extra`` in the relative interior of the face ``active``, or None."""
    d = graph.dim
    A, b, kinds = [], [], []
    for i, (a, bi, k) in enumerate(graph.rows()):
        if k == EQ or i in active:
            A.append(tuple(a) + (ZERO,))
            kinds.append(EQ)
        else:
            A.append(tuple(a) + (ONE,))
            kinds.append(LE)
        b.append(bi)
    for a, bi, k in extra.rows():
        A.append(tuple(a) + (ZERO,))
        b.append(bi)
        kinds.append(k)
    A.append(zeros(d) + (ONE,))
    b.append(ONE)
    kinds.append(LE)
    out = solve_lp(LinearProgram(zeros(d) + (ONE,), tuple(A), tuple(b), tuple(kinds),
                                 (False,) * (d + 1), "max"))
    if not out.optimal or out.value <= 0:
        return None
    return out.x[:d]


def _is_reference_fixture(F: VPolytope, G: GraphMap, y, zbar) -> bool:
    if G.m != 0 or G.n != 2:
        return False
    axis = HPolyhedron.from_rows([[0, 1]], [0], [EQ])
    return (set(F.vertices) == {(ZERO, ZERO), (ZERO, ONE)} and set_equal(G.graph.canonical, axis.canonical)
            and tuple(zbar) == (ZERO, ZERO))


REFERENCE_NOTE = (
    "reference fixture: the stated value of N(z;Omega) cap F^perp here is R x {0}; "
    "computed N(z;Omega) = {0} x R and F^perp = R x {0} intersect in {0}; "
    "the Lipschitz verdict (T(y) = -y2 near y) is confirmed independently"
)


def minimal_time_out_criterion(F: VPolytope, G: GraphMap, x, y, with_oracle: bool = True,
                               plan: SamplingPlan | None = None) -> Verdict:
    """Sufficient test off the graph: at every projection point the cone
    ``{(u, v) : u in D*G(x, z)(v), v in F^perp}`` must be ``{0}``.

    The quantifier over the projection set is discharged face by face.
    """
    x, y = vec(x), vec(y)
    if G.contains(x, y):
        raise PreconditionError("the point is on the graph; use the graph-point criterion")
    Pi = generalized_projection(F, G, x, y)
    fixed = HPolyhedron.point(x).embed(G.m + G.n, range(G.m)) if G.m else HPolyhedron.universe(G.n)
    lifted_pi = Pi.embed(G.m + G.n, range(G.m, G.m + G.n)).intersect(fixed)
    perp = orthogonal_complement(F)
    per_face = []
    for face in enumerate_faces(G.graph):
        w = _meets_relint(G.graph, face.active, lifted_pi)
        if w is None:
            continue
        N = normal_cone_at(G.graph, w)
        K = _coderivative_pair_cone(N, G.m, G.n, perp)
        per_face.append(FaceCone(face.active, w, N.canonical, K.canonical, is_trivial_cone(K)))
    if not per_face:
        raise InvariantError("no graph face meets the projection set")
    cones = {"F^perp": perp.canonical, "projection set": Pi}
    for k, fc in enumerate(per_face):
        cones[f"face {k} normal cone"] = fc.normal_cone
        cones[f"face {k} cone"] = fc.cone
        if G.m == 0:
            cones[f"face {k} N cap F^perp"] = fc.normal_cone.intersect(perp).canonical
    notes = []
    if any(_is_reference_fixture(F, G, y, fc.point[G.m:]) for fc in per_face):
        notes.append(REFERENCE_NOTE)
    gaps = _support_zero_gaps(F, G, per_face)
    for k, C in gaps:
        cones[f"face {k} support-zero cone"] = C.canonical
    if gaps and all(fc.trivial for fc in per_face):
        notes.append(GAP_NOTE)
    oracle = None
    if with_oracle:
        T = minimal_time_sv_function(F, G)
        oracle = _oracle_echo(T, x + y)
        if plan is not None:
            prof = sampled_modulus(T, x + y, plan)
            oracle["sampled"] = prof.verdict
            oracle["estimate"] = None if prof.estimate is None else str(prof.estimate)
    if all(fc.trivial for fc in per_face):
        conclusion = SUFFICIENT_HOLDS
    else:
        conclusion = SUFFICIENT_FAILS
        notes.append("sufficient only; oracle escalation required for a decision")
    return Verdict(conclusion, "minimal time at projection faces", per_face, SUFFICIENT, cones,
                   oracle, tuple(notes))


GAP_NOTE = (
    "the F^perp cone is trivial but some face admits (u, v) in N with min over F of <v, .> = 0 "
    "and v != 0; limits of off-graph subgradients can land there, so confirm with the oracle"
)


def _support_zero_gaps(F: VPolytope, G: GraphMap, per_face) -> list[tuple[int, ConeSet]]:
    """Faces whose normal cone meets ``{v in F^- : <v, f> = 0 for a vertex f}``
    nontrivially, in the same ``(u, -v)`` convention as the face cones.

    Off-graph subgradients satisfy ``sigma_F(-v) = 1``; scaling them to zero
    only forces ``sigma_F(-v) = 0`` in the limit, which is weaker than
    ``v in F^perp`` whenever ``F`` spans more than its own orthogonal
    directions.  These cones record where that weaker limit is possible.
    """
    Fm = negative_dual(F)
    out = []
    for k, fc in enumerate(per_face):
        for f in F.vertices:
            V = Fm.intersect(ConeSet.from_rows([f], [EQ], F.dim))
            K = _coderivative_pair_cone(fc.normal_cone, G.m, G.n, V)
            if not is_trivial_cone(K):
                out.append((k, K))
                break
    return out


def minimal_time_criterion(F, G, x, y, **kw) -> Verdict:
    """Dispatch on graph membership."""
    if G.contains(vec(x), vec(y)):
        return minimal_time_in_criterion(F, G, x, y, kw.get("with_oracle", True))
    return minimal_time_out_criterion(F, G, x, y, **kw)


# ---------------------------------------------------------------------------
# inclusion audits


@dataclass(frozen=True)
class AuditItem:
    name: str
    status: str  # pass | fail | skipped
    detail: str = ""
    offending: tuple | None = None


@dataclass
class AuditReport:
    items: list = field(default_factory=list)

    def add(self, name, ok, detail="", offending=None):
        self.items.append(AuditItem(name, "pass" if ok else "fail", detail, offending))

    def skip(self, name, reason):
        self.items.append(AuditItem(name, "skipped", reason))

    @property
    def passed(self) -> bool:
        return all(i.status != "fail" for i in self.items)

    def statuses(self) -> dict:
        return {i.name: i.status for i in self.items}


def _l1_ball_rows(m: int, n: int):
    """Rows of ``{(v, w) : |w|_1 <= 1}`` in ``R^(m+n)``."""
    rows = []
    for mask in range(2 ** n):
        signs = tuple(ONE if (mask >> i) & 1 else -ONE for i in range(n))
        rows.append(zeros(m) + signs)
    return rows


def _subset_item(report, name, P, Q, detail=""):
    bad = find_violation(P, Q)
    report.add(name, bad is None, detail, None if bad is None else tuple(str(v) for v in bad))


def _generators_with_sums(C: ConeSet):
    rays, lin = C.generators()
    gens = list(rays) + list(lin) + [tuple(-v for v in g) for g in lin]
    sums = [tuple(a + b for a, b in zip(g, h)) for i, g in enumerate(gens) for h in gens[i + 1:]]
    return [g for g in gens + sums if any(g)]


def audit_distance(G: GraphMap, x, y) -> AuditReport:
    """Distance-function inclusions in the inf norm on the output space."""
    x, y = vec(x), vec(y)
    m, n = G.m, G.n
    report = AuditReport()
    D = scalar_distance_function(G, "inf")
    out = D.solve(x + y)
    if not out.optimal:
        report.skip("distance subgradients in graph normals", "the distance is infinite here")
        return report
    zbar = out.x[:n]
    dD = value_subdifferential(D, x + y)
    N = normal_cone_at(G.graph, x + zbar)
    rows = _l1_ball_rows(m, n)
    target = HPolyhedron(N.A + tuple(rows), N.b + (ONE,) * len(rows),
                         N.kinds + (LE,) * len(rows), m + n)
    _subset_item(report, "distance subgradients in graph normals", dD, target,
                 f"nearest point {tuple(str(v) for v in zbar)}")
    if not G.contains(x, y):
        report.skip("graph normals scaled into subgradients", "the point is off the graph")
        report.skip("singular subgradients of the distance", "the point is off the graph")
        return report
    aubin = is_trivial_cone(coderivative(G, x, y, zeros(n)).set)
    if aubin:
        Ng = normal_cone_at(G.graph, x + y)
        bad = None
        for g in _generators_with_sums(Ng):
            lam = norm_1(g[m:])
            if lam == 0:
                bad = g
                break
            scaled = tuple(v / lam for v in g)
            if not dD.contains(scaled):
                bad = g
                break
        report.add("graph normals scaled into subgradients", bad is None,
                   "lambda is the dual norm of the output component",
                   None if bad is None else tuple(str(v) for v in bad))
    else:
        report.skip("graph normals scaled into subgradients", "distance function not Lipschitz here")
    sing = singular_subdifferential(D, x + y)
    cod = coderivative(G, x, y, zeros(n)).set
    lifted = HPolyhedron(
        tuple(tuple(a) + zeros(n) for a in cod.A) + tuple(zeros(m) + tuple(ONE if j == i else ZERO for j in range(n)) for i in range(n)),
        cod.b + zeros(n), cod.kinds + (EQ,) * n, m + n)
    _subset_item(report, "singular subgradients of the distance", sing, lifted)
    if aubin:
        report.add("singular subgradients equality", set_equal(sing.canonical, lifted.canonical))
    else:
        report.skip("singular subgradients equality", "distance function not Lipschitz here")
    return report


def _support_extremes(F: VPolytope, S: HPolyhedron, m: int):
    """Max and min of ``sigma_F(-v)`` over the v-part of ``S`` (max may be ``None`` when unbounded)."""
    V = hrep_to_vrep(S)
    vals = [support_value(F, tuple(-c for c in p[m:])) for p in V.vertices]
    ray_ok = all(support_value(F, tuple(-c for c in r[m:])) <= 0 for r in V.rays)
    d = S.dim
    # min s  s.t.  s >= <-v, f_i>,  (u, v) in S
    A, b, kinds = [], [], []
    for a, bi, kd in S.rows():
        A.append(tuple(a) + (ZERO,))
        b.append(bi)
        kinds.append(kd)
    for f in F.vertices:
        A.append(zeros(m) + tuple(-c for c in f) + (-ONE,))
        b.append(ZERO)
        kinds.append(LE)
    out = solve_lp(LinearProgram(zeros(d) + (ONE,), tuple(A), tuple(b), tuple(kinds),
                                 (False,) * (d + 1), "min"))
    low = out.value if out.optimal else None
    return max(vals), low, ray_ok


def audit_minimal_time(F: VPolytope, G: GraphMap, x, y) -> AuditReport:
    """Off-graph subgradients of the minimal time function."""
    x, y = vec(x), vec(y)
    report = AuditReport()
    if G.contains(x, y):
        report.skip("minimal-time subgradients in graph normals", "the point is on the graph")
        return report
    T = minimal_time_sv_function(F, G)
    if not T.value(x + y).finite:
        report.skip("minimal-time subgradients in graph normals", "the minimal time is infinite")
        return report
    dT = value_subdifferential(T, x + y)
    Pi = generalized_projection(F, G, x, y)
    for z in hrep_to_vrep(Pi).vertices:
        N = normal_cone_at(G.graph, x + z)
        _subset_item(report, f"minimal-time subgradients in graph normals at {tuple(map(str, z))}",
                     dT, N)
    hi, lo, ray_ok = _support_extremes(F, dT, G.m)
    report.add("minimal-time subgradients on the support sphere", hi == 1 and lo == 1 and ray_ok,
               f"support range [{lo}, {hi}]")
    return report


def audit_scalarization(omega: HPolyhedron, d, x) -> AuditReport:
    """Normal-cone formula versus the LP subdifferential of the scalarization."""
    d, x = vec(d), vec(x)
    report = AuditReport()
    phi = scalarization_function(omega, d)
    if not phi.value(x).finite:
        report.skip("scalarization subdifferential in formula", "the scalarization is infinite")
        return report
    oracle = value_subdifferential(phi, x)
    formula = scalarization_subdifferential(omega, d, x)
    _subset_item(report, "scalarization subdifferential in formula", oracle, formula.set)
    if formula.exact:
        report.add("scalarization subdifferential equality", set_equal(oracle.canonical, formula.set))
    else:
        report.skip("scalarization subdifferential equality", "calmness surrogate does not hold")
    return report


def inclusion_audit(instance) -> AuditReport:
    """Run every applicable inclusion for a corpus instance."""
    kind = instance.kind
    if kind == "graph":
        return audit_distance(instance.G, instance.x, instance.y)
    if kind == "minimal_time":
        rep = audit_distance(instance.G, instance.x, instance.y) if instance.G.m else AuditReport()
        for item in audit_minimal_time(instance.F, instance.G, instance.x, instance.y).items:
            rep.items.append(item)
        return rep
    if kind == "scalarization":
        return audit_scalarization(instance.omega, instance.d, instance.x)
    rep = AuditReport()
    rep.skip("inclusions", f"no inclusion applies to {kind} instances")
    return rep


__all__ = [
    "Verdict", "EquivalenceReport", "MinkowskiReport", "FaceCone", "AuditItem", "AuditReport",
    "LIPSCHITZ", "NOT_LIPSCHITZ", "SUFFICIENT_HOLDS", "SUFFICIENT_FAILS", "UNDECIDED",
    "function_lipschitz_criterion", "aubin_criterion", "convex_equivalences",
    "minkowski_report", "zero_in_interior", "scalarization_criterion",
    "minimal_time_in_criterion", "minimal_time_out_criterion", "minimal_time_criterion",
    "audit_distance", "audit_minimal_time", "audit_scalarization", "inclusion_audit",
    "REFERENCE_NOTE",
]
