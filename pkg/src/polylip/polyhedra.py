"""Polyhedral convex sets in exact arithmetic.

An :class:`HPolyhedron` is ``{x : A x (kinds) b}``; a :class:`VPolytope` is
``conv(vertices) + cone(rays)``; a :class:`ConeSet` is a homogeneous
H-polyhedron.  Conversions use the double description method on the
homogenized cone, run in integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .exact import (
    EQ,
    LE,
    ONE,
    ZERO,
    InvariantError,
    LinearProgram,
    PreconditionError,
    StructuralError,
    dot,
    mat,
    norm2_sq,
    primitive,
    rref,
    solve_linear,
    solve_lp,
    sub,
    vec,
    zeros,
)

DEFAULT_FACE_CAP = 16


class EmptySetError(ValueError):
    """The operation needs a nonempty set."""


class ResourceError(RuntimeError):
    """A configured size cap was exceeded."""


class UnboundedSetError(ValueError):
    """The operation needs a bounded set."""


# ---------------------------------------------------------------------------
# double description (integer arithmetic)


def _int_rows(rows: Sequence[Sequence[Fraction]]) -> list[tuple[int, ...]]:
    return [primitive(r) for r in rows]


def _idot(u, v) -> int:
    s = 0
    for a, b in zip(u, v):
        if a and b:
            s += a * b
    return s


def _reduce(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for a in v:
        g = gcd(g, a)
    if g > 1:
        return tuple(a // g for a in v)
    return tuple(v)


def cone_generators(ineqs: Sequence[Sequence], eqs: Sequence[Sequence], d: int):
    """Extreme rays and a lineality basis of ``{y : H y <= 0, E y = 0}``.

    Returns ``(rays, lineality)`` as lists of primitive integer tuples.  Rays
    are extreme modulo the lineality space.
    """
    constraints = [(tuple(r), True) for r in _int_rows(eqs)] + [
        (tuple(r), False) for r in _int_rows(ineqs)
    ]
    lin: list[tuple[int, ...]] = [tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]
    rays: list[tuple[tuple[int, ...], frozenset]] = []
    for idx, (h, is_eq) in enumerate(constraints):
        if not any(h):
            continue
        pivot = next((k for k, l in enumerate(lin) if _idot(h, l) != 0), None)
        if pivot is not None:
            lp_ = lin.pop(pivot)
            hl = _idot(h, lp_)
            sgn = 1 if hl > 0 else -1
            ahl = abs(hl)
            lin = [
                _reduce([ahl * a - sgn * _idot(h, l) * b for a, b in zip(l, lp_)])
                for l in lin
            ]
            new_rays = []
            for r, z in rays:
                hr = _idot(h, r)
                if hr:
                    r = _reduce([ahl * a - sgn * hr * b for a, b in zip(r, lp_)])
                new_rays.append((r, z | {idx}))
            if not is_eq:
                new_rays.append((tuple(-sgn * a for a in lp_), frozenset(range(idx))))
            rays = new_rays
            continue
        pos, zer, negs = [], [], []
        for r, z in rays:
            hr = _idot(h, r)
            if hr > 0:
                pos.append((r, z, hr))
            elif hr < 0:
                negs.append((r, z, hr))
            else:
                zer.append((r, z | {idx}))
        if not pos and (not is_eq or not negs):
            rays = zer + [(r, z) for r, z, _ in negs]
            continue
        need = d - len(lin) - 2
        all_z = [z for _, z in rays]
        combos = []
        for rp, zp, hp in pos:
            for rn, zn, hn in negs:
                common = zp & zn
                if len(common) < need:
                    continue
                adjacent = True
                for z in all_z:
                    if z is not zp and z is not zn and common <= z:
                        adjacent = False
                        break
                if adjacent:
                    v = _reduce([hp * a - hn * b for a, b in zip(rn, rp)])
                    combos.append((v, common | {idx}))
        kept = zer + ([] if is_eq else [(r, z) for r, z, _ in negs])
        seen = {r for r, _ in kept}
        for v, z in combos:
            if v not in seen and any(v):
                seen.add(v)
                kept.append((v, z))
        rays = kept
    return sorted({r for r, _ in rays}), sorted(lin)


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class HPolyhedron:
    """``{x in R^dim : A x (kinds) b}``."""

    A: tuple
    b: tuple
    kinds: tuple
    dim: int

    def __post_init__(self):
        if len(self.A) != len(self.b) or len(self.b) != len(self.kinds):
            raise StructuralError("A, b and kinds must have equal row counts")
        for row in self.A:
            if len(row) != self.dim:
                raise StructuralError(f"row {row} does not have dimension {self.dim}")
        if any(k not in (LE, EQ) for k in self.kinds):
            raise StructuralError("row kinds must be '<=' or '='")

    # construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, A, b, kinds=None, dim=None) -> "HPolyhedron":
        A = mat(A)
        b = vec(b)
        if dim is None:
            if not A:
                raise StructuralError("dimension needed for a row-free polyhedron")
            dim = len(A[0])
        kinds = tuple(kinds) if kinds is not None else (LE,) * len(b)
        return cls(A, b, kinds, dim)

    @classmethod
    def universe(cls, dim: int) -> "HPolyhedron":
        return cls((), (), (), dim)

    @classmethod
    def empty(cls, dim: int) -> "HPolyhedron":
        return cls((zeros(dim),), (-ONE,), (LE,), dim)

    @classmethod
    def point(cls, x) -> "HPolyhedron":
        x = vec(x)
        n = len(x)
        rows = tuple(tuple(ONE if j == i else ZERO for j in range(n)) for i in range(n))
        return cls(rows, x, (EQ,) * n, n)

    @classmethod
    def box(cls, center, radius) -> "HPolyhedron":
        center = vec(center)
        r = Fraction(radius)
        n = len(center)
        A, b = [], []
        for i in range(n):
            e = tuple(ONE if j == i else ZERO for j in range(n))
            A.append(e)
            b.append(center[i] + r)
            A.append(tuple(-a for a in e))
            b.append(r - center[i])
        return cls(tuple(A), tuple(b), (LE,) * len(b), n)

    # queries ----------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.b)

    def rows(self):
        return zip(self.A, self.b, self.kinds)

    def contains(self, x) -> bool:
        x = vec(x)
        for a, bi, k in self.rows():
            ax = dot(a, x)
            if ax > bi or (k == EQ and ax != bi):
                return False
        return True

    def lp(self, c, sense="max") -> LinearProgram:
        return LinearProgram(vec(c), self.A, self.b, self.kinds, (False,) * self.dim, sense)

    def optimize(self, c, sense="max"):
        return solve_lp(self.lp(c, sense))

    @cached_property
    def feasible_point(self):
        out = solve_lp(LinearProgram(zeros(self.dim), self.A, self.b, self.kinds,
                                     (False,) * self.dim, "min"))
        return out.x if out.optimal else None

    def is_empty(self) -> bool:
        return self.feasible_point is None

    # set algebra ------------------------------------------------------

    def intersect(self, other: "HPolyhedron") -> "HPolyhedron":
        if other.dim != self.dim:
            raise StructuralError("dimension mismatch in intersection")
        cls = ConeSet if isinstance(self, ConeSet) and isinstance(other, ConeSet) else HPolyhedron
        return cls(self.A + other.A, self.b + other.b, self.kinds + other.kinds, self.dim)

    def negate(self) -> "HPolyhedron":
        """``{-x : x in P}``."""
        A = tuple(tuple(-a for a in row) for row in self.A)
        return type(self)(A, self.b, self.kinds, self.dim)

    def scaled(self, t) -> "HPolyhedron":
        """``{t x : x in P}`` for ``t > 0``."""
        t = Fraction(t)
        if t <= 0:
            raise PreconditionError("scale factor must be positive")
        return type(self)(self.A, tuple(t * bi for bi in self.b), self.kinds, self.dim)

    def translated(self, v) -> "HPolyhedron":
        v = vec(v)
        b = tuple(bi + dot(a, v) for a, bi in zip(self.A, self.b))
        return HPolyhedron(self.A, b, self.kinds, self.dim)

    def substitute(self, fixed: dict[int, Fraction]) -> "HPolyhedron":
        """Fix the coordinates in ``fixed`` and drop them."""
        keep = [j for j in range(self.dim) if j not in fixed]
        A, b = [], []
        for a, bi, _ in self.rows():
            A.append(tuple(a[j] for j in keep))
            b.append(bi - sum((a[j] * v for j, v in fixed.items()), ZERO))
        return HPolyhedron(tuple(A), tuple(b), self.kinds, len(keep))

    def embed(self, dim: int, coords: Sequence[int]) -> "HPolyhedron":
        """Cylinder over this set placed on ``coords`` of ``R^dim``."""
        A = []
        for a in self.A:
            row = [ZERO] * dim
            for j, c in enumerate(coords):
                row[c] = a[j]
            A.append(tuple(row))
        return HPolyhedron(tuple(A), self.b, self.kinds, dim)

    # canonical form ---------------------------------------------------

    def relative_interior_point(self, extra_eq: Iterable[int] = ()):
        """Relative-interior witness and the implicit-equality row set.

        Rows listed in ``extra_eq`` are forced to equality.  Returns
        ``(point, active)`` or ``None`` when the (restricted) set is empty.
        """
        active = set(extra_eq) | {i for i, k in enumerate(self.kinds) if k == EQ}
        n = self.dim
        while True:
            free = [i for i in range(self.nrows) if i not in active]
            A, b, kinds = [], [], []
            for i in sorted(active):
                A.append(self.A[i] + (ZERO,))
                b.append(self.b[i])
                kinds.append(EQ)
            for i in free:
                A.append(self.A[i] + (ONE,))
                b.append(self.b[i])
                kinds.append(LE)
            A.append(zeros(n) + (ONE,))
            b.append(ONE)
            kinds.append(LE)
            lp = LinearProgram(zeros(n) + (ONE,), tuple(A), tuple(b), tuple(kinds),
                               (False,) * (n + 1), "max")
            out = solve_lp(lp)
            if out.status == "infeasible":
                return None
            if out.value > 0 or not free:
                return out.x[:n], frozenset(active)
            y = out.certificate
            moved = {free[k] for k in range(len(free)) if y[len(active) + k] > 0}
            if not moved:
                raise InvariantError("slack LP at zero without a certifying row")
            active |= moved

    @cached_property
    def canonical(self) -> "HPolyhedron":
        """Sorted, gcd-reduced, irredundant form with explicit equalities."""
        ri = self.relative_interior_point()
        cls = type(self)
        if ri is None:
            return HPolyhedron.empty(self.dim)
        _, active = ri
        n = self.dim
        eq_aug = [self.A[i] + (self.b[i],) for i in sorted(active)]
        R, piv = rref(eq_aug, n + 1)
        if n in piv:
            raise InvariantError("inconsistent equalities on a nonempty set")
        ineq = []
        for i in range(self.nrows):
            if i in active:
                continue
            a = list(self.A[i])
            bi = self.b[i]
            for row, p in zip(R, piv):
                f = a[p]
                if f:
                    for j in range(n):
                        a[j] -= f * row[j]
                    bi -= f * row[n]
            if not any(a):
                continue
            ints = primitive(a + [bi])
            ineq.append((tuple(Fraction(v) for v in ints[:n]), Fraction(ints[n])))
        ineq = sorted(set(ineq))
        # drop redundant rows one at a time
        kept = list(ineq)
        eqA = tuple(r[:n] for r in R)
        eqb = tuple(r[n] for r in R)
        k = 0
        while k < len(kept):
            a, bi = kept[k]
            others = kept[:k] + kept[k + 1:]
            A = eqA + tuple(o[0] for o in others)
            b = eqb + tuple(o[1] for o in others)
            kinds = (EQ,) * len(eqA) + (LE,) * len(others)
            out = solve_lp(LinearProgram(a, A, b, kinds, (False,) * n, "max"))
            if out.optimal and out.value <= bi:
                kept.pop(k)
            else:
                k += 1
        eq_rows = []
        for row in R:
            ints = primitive(row)
            first = next(v for v in ints[:n] if v)
            if first < 0:
                ints = tuple(-v for v in ints)
            eq_rows.append((tuple(Fraction(v) for v in ints[:n]), Fraction(ints[n])))
        eq_rows.sort()
        A = tuple(r[0] for r in eq_rows) + tuple(r[0] for r in kept)
        b = tuple(r[1] for r in eq_rows) + tuple(r[1] for r in kept)
        kinds = (EQ,) * len(eq_rows) + (LE,) * len(kept)
        if cls is ConeSet:
            return ConeSet(A, b, kinds, n)
        return HPolyhedron(A, b, kinds, n)

    def normalize(self) -> "HPolyhedron":
        return self.canonical

    # display ----------------------------------------------------------

    def describe(self, names: Sequence[str] | None = None) -> list[str]:
        names = names or [f"x{j + 1}" for j in range(self.dim)]
        out = []
        for a, bi, k in self.rows():
            terms = []
            for coef, name in zip(a, names):
                if coef == 0:
                    continue
                sign = "-" if coef < 0 else "+"
                mag = abs(coef)
                body = name if mag == 1 else f"{mag}*{name}"
                terms.append((sign, body))
            if not terms:
                lhs = "0"
            else:
                lhs = ("-" if terms[0][0] == "-" else "") + terms[0][1]
                for sign, body in terms[1:]:
                    lhs += f" {sign} {body}"
            out.append(f"{lhs} {'<=' if k == LE else '='} {bi}")
        return out

    def to_json(self) -> dict:
        return {
            "A": [[str(v) for v in row] for row in self.A],
            "b": [str(v) for v in self.b],
            "kinds": list(self.kinds),
            "dim": self.dim,
        }


class ConeSet(HPolyhedron):
    """Homogeneous H-polyhedron (a closed convex cone)."""

    def __post_init__(self):
        super().__post_init__()
        if any(bi != 0 for bi in self.b):
            raise StructuralError("a cone must have zero right-hand sides")

    @classmethod
    def from_rows(cls, A, kinds=None, dim=None) -> "ConeSet":
        A = mat(A)
        if dim is None:
            if not A:
                raise StructuralError("dimension needed for a row-free cone")
            dim = len(A[0])
        kinds = tuple(kinds) if kinds is not None else (LE,) * len(A)
        return cls(A, zeros(len(A)), kinds, dim)

    @classmethod
    def whole(cls, dim: int) -> "ConeSet":
        return cls((), (), (), dim)

    @classmethod
    def trivial(cls, dim: int) -> "ConeSet":
        rows = tuple(tuple(ONE if j == i else ZERO for j in range(dim)) for i in range(dim))
        return cls(rows, zeros(dim), (EQ,) * dim, dim)

    @classmethod
    def generated_by(cls, rays: Sequence, lineality: Sequence = (), dim: int | None = None) -> "ConeSet":
        """H-form of ``cone(rays) + span(lineality)`` via the polar cone."""
        rays = [vec(r) for r in rays]
        lineality = [vec(l) for l in lineality]
        if dim is None:
            dim = len((rays + lineality)[0])
        prays, plin = cone_generators(rays, lineality, dim)
        A = tuple(tuple(Fraction(v) for v in r) for r in plin) + tuple(
            tuple(Fraction(v) for v in r) for r in prays
        )
        kinds = (EQ,) * len(plin) + (LE,) * len(prays)
        return cls(A, zeros(len(A)), kinds, dim)

    def generators(self):
        """``(rays, lineality)`` as Fraction tuples."""
        ineqs = [a for a, k in zip(self.A, self.kinds) if k == LE]
        eqs = [a for a, k in zip(self.A, self.kinds) if k == EQ]
        rays, lin = cone_generators(ineqs, eqs, self.dim)
        to_f = lambda v: tuple(Fraction(a) for a in v)  # noqa: E731
        return [to_f(r) for r in rays], [to_f(l) for l in lin]

    def slice(self, coords: Sequence[int], values) -> HPolyhedron:
        """Fix ``coords`` to ``values`` and drop them (result need not be a cone)."""
        P = HPolyhedron(self.A, self.b, self.kinds, self.dim)
        return P.substitute({c: Fraction(v) for c, v in zip(coords, vec(values))})


@dataclass(frozen=True)
class VPolytope:
    """``conv(vertices) + cone(rays)``."""

    vertices: tuple
    rays: tuple = ()
    dim: int = field(default=-1)

    def __post_init__(self):
        dim = self.dim
        if dim < 0:
            if not self.vertices:
                raise StructuralError("an empty vertex list needs an explicit dimension")
            object.__setattr__(self, "dim", len(self.vertices[0]))
        for v in self.vertices + self.rays:
            if len(v) != self.dim:
                raise StructuralError("generator dimension mismatch")
        if any(not any(r) for r in self.rays):
            raise StructuralError("rays must be nonzero")

    @classmethod
    def from_points(cls, vertices, rays=()) -> "VPolytope":
        return cls(tuple(vec(v) for v in vertices), tuple(vec(r) for r in rays))

    @property
    def bounded(self) -> bool:
        return not self.rays

    def to_json(self) -> dict:
        return {
            "vertices": [[str(v) for v in p] for p in self.vertices],
            "rays": [[str(v) for v in r] for r in self.rays],
        }


@dataclass(frozen=True)
class Face:
    active: frozenset
    witness: tuple


# ---------------------------------------------------------------------------
# conversions


def vrep_to_hrep(P: VPolytope) -> HPolyhedron:
    """Canonical H-form of ``conv(vertices) + cone(rays)``."""
    if not P.vertices:
        raise StructuralError("a V-polytope needs at least one vertex")
    n = P.dim
    rows = [tuple(v) + (-ONE,) for v in P.vertices] + [tuple(r) + (ZERO,) for r in P.rays]
    rays, lin = cone_generators(rows, [], n + 1)
    A, b, kinds = [], [], []
    for g in lin:
        A.append(tuple(Fraction(v) for v in g[:n]))
        b.append(Fraction(g[n]))
        kinds.append(EQ)
    for g in rays:
        if not any(g[:n]):
            continue  # 0 <= beta, always valid
        A.append(tuple(Fraction(v) for v in g[:n]))
        b.append(Fraction(g[n]))
        kinds.append(LE)
    return HPolyhedron(tuple(A), tuple(b), tuple(kinds), n).canonical


def hrep_to_vrep(P: HPolyhedron) -> VPolytope:
    """Vertices and rays (lineality as +- pairs) by double description."""
    n = P.dim
    ineqs = [tuple(a) + (-bi,) for a, bi, k in P.rows() if k == LE]
    ineqs.append(zeros(n) + (-ONE,))
    eqs = [tuple(a) + (-bi,) for a, bi, k in P.rows() if k == EQ]
    rays, lin = cone_generators(ineqs, eqs, n + 1)
    vertices, out_rays = [], []
    for g in rays:
        if g[n] > 0:
            vertices.append(tuple(Fraction(v, g[n]) for v in g[:n]))
        else:
            out_rays.append(tuple(Fraction(v) for v in g[:n]))
    for g in lin:
        if g[n] != 0:
            raise InvariantError("lineality with nonzero homogenizing coordinate")
        out_rays.append(tuple(Fraction(v) for v in g[:n]))
        out_rays.append(tuple(Fraction(-v) for v in g[:n]))
    if not vertices:
        raise EmptySetError("polyhedron is empty")
    return VPolytope(tuple(sorted(vertices)), tuple(sorted(set(out_rays))), n)


# ---------------------------------------------------------------------------
# projection


def _prune(rows, n):
    """Drop duplicate and LP-redundant inequality rows ``(a, b)``."""
    uniq = {}
    for a, bi in rows:
        if not any(a):
            if bi < 0:
                return None
            continue
        # rows with the same direction: keep the tightest
        norm_a = tuple(Fraction(v) for v in primitive(a))
        j = next(j for j in range(n) if a[j])
        b_norm = bi * norm_a[j] / a[j]
        if norm_a not in uniq or b_norm < uniq[norm_a]:
            uniq[norm_a] = b_norm
    kept = sorted(uniq.items())
    k = 0
    while k < len(kept) and len(kept) > 1:
        a, bi = kept[k]
        others = kept[:k] + kept[k + 1:]
        out = solve_lp(LinearProgram(a, tuple(o[0] for o in others), tuple(o[1] for o in others),
                                     (LE,) * len(others), (False,) * n, "max"))
        if out.status == "infeasible":
            return None
        if out.optimal and out.value <= bi:
            kept.pop(k)
        else:
            k += 1
    return kept


def project_out(P: HPolyhedron, coords: Iterable[int]) -> HPolyhedron:
    """Eliminate ``coords`` by Gaussian substitution then Fourier-Motzkin."""
    elim = sorted(set(coords))
    if any(c < 0 or c >= P.dim for c in elim):
        raise StructuralError(f"coordinates {elim} out of range for dimension {P.dim}")
    keep = [j for j in range(P.dim) if j not in elim]
    if P.is_empty():
        return HPolyhedron.empty(len(keep))
    eqs = [(list(a), bi) for a, bi, k in P.rows() if k == EQ]
    les = [(list(a), bi) for a, bi, k in P.rows() if k == LE]
    remaining = []
    for c in elim:
        piv = next((i for i, (a, _) in enumerate(eqs) if a[c] != 0), None)
        if piv is None:
            remaining.append(c)
            continue
        pa, pb = eqs.pop(piv)
        pc = pa[c]

        def sub_row(a, bi):
            f = a[c] / pc
            if not f:
                return a, bi
            return [x - f * y for x, y in zip(a, pa)], bi - f * pb

        eqs = [sub_row(a, bi) for a, bi in eqs]
        les = [sub_row(a, bi) for a, bi in les]
    n = P.dim
    for c in remaining:
        pos = [(a, bi) for a, bi in les if a[c] > 0]
        negs = [(a, bi) for a, bi in les if a[c] < 0]
        rows = [(a, bi) for a, bi in les if a[c] == 0]
        for ap, bp in pos:
            for an, bn in negs:
                fp, fn = ap[c], -an[c]
                rows.append(([fn * x + fp * y for x, y in zip(ap, an)], fn * bp + fp * bn))
        pruned = _prune([(tuple(a), bi) for a, bi in rows] + [], n) if rows else []
        if pruned is None:
            return HPolyhedron.empty(len(keep))
        les = [(list(a), bi) for a, bi in pruned]
    A, b, kinds = [], [], []
    for a, bi in eqs:
        A.append(tuple(a[j] for j in keep))
        b.append(bi)
        kinds.append(EQ)
    for a, bi in les:
        A.append(tuple(a[j] for j in keep))
        b.append(bi)
        kinds.append(LE)
    return HPolyhedron(tuple(A), tuple(b), tuple(kinds), len(keep)).canonical


# ---------------------------------------------------------------------------
# point classification, cones


def classify_point(P: HPolyhedron, x):
    """``("outside" | "boundary" | "interior", active inequality rows)``.

    ``interior`` is the topological interior in ``R^dim``: no equality row
    with a nonzero normal and every inequality strict.
    """
    x = vec(x)
    if len(x) != P.dim:
        raise StructuralError("point dimension mismatch")
    active = []
    has_eq = False
    for i, (a, bi, k) in enumerate(P.rows()):
        ax = dot(a, x)
        if ax > bi or (k == EQ and ax != bi):
            return "outside", frozenset()
        if k == EQ:
            if any(a):
                has_eq = True
        elif ax == bi:
            if not any(a):
                continue
            active.append(i)
    if has_eq or active:
        return "boundary", frozenset(active)
    return "interior", frozenset()


def positive_dual(F: VPolytope) -> ConeSet:
    """``{v : <v, x> >= 0 for x in F}``."""
    rows = [tuple(-a for a in p) for p in F.vertices + F.rays]
    return ConeSet(tuple(rows), zeros(len(rows)), (LE,) * len(rows), F.dim)


def negative_dual(F: VPolytope) -> ConeSet:
    rows = [tuple(p) for p in F.vertices + F.rays]
    return ConeSet(tuple(rows), zeros(len(rows)), (LE,) * len(rows), F.dim)


def orthogonal_complement(F: VPolytope) -> ConeSet:
    rows = [tuple(p) for p in F.vertices + F.rays if any(p)]
    return ConeSet(tuple(rows), zeros(len(rows)), (EQ,) * len(rows), F.dim)


def point_dual(x) -> ConeSet:
    """``{v : <v, x> >= 0}``; the whole space when ``x = 0``."""
    x = vec(x)
    if not any(x):
        return ConeSet.whole(len(x))
    return ConeSet((tuple(-a for a in x),), (ZERO,), (LE,), len(x))


def direction_complement(d) -> ConeSet:
    """``{v : <v, d> = 0}``."""
    d = vec(d)
    return ConeSet((d,), (ZERO,), (EQ,), len(d))


def trivial_by_lp(C: HPolyhedron) -> bool:
    for i in range(C.dim):
        for s in (ONE, -ONE):
            row = tuple(ONE if j == i else ZERO for j in range(C.dim))
            lp = LinearProgram(zeros(C.dim), C.A + (row,), C.b + (s,), C.kinds + (EQ,),
                               (False,) * C.dim, "min")
            if solve_lp(lp).status != "infeasible":
                return False
    return True


def trivial_by_generators(C: HPolyhedron) -> bool:
    ineqs = [a for a, k in zip(C.A, C.kinds) if k == LE]
    eqs = [a for a, k in zip(C.A, C.kinds) if k == EQ]
    rays, lin = cone_generators(ineqs, eqs, C.dim)
    return not rays and not lin


def is_trivial_cone(C: HPolyhedron, crosscheck: bool = True) -> bool:
    """True iff the cone is ``{0}``; LP probes, cross-checked by ray enumeration."""
    if any(bi != 0 for bi in C.b):
        raise PreconditionError("triviality test needs a homogeneous system")
    verdict = trivial_by_lp(C)
    if crosscheck and verdict != trivial_by_generators(C):
        raise InvariantError("LP probes and ray enumeration disagree on cone triviality")
    return verdict


def tangent_cone(P: HPolyhedron, z) -> ConeSet:
    z = vec(z)
    if not P.contains(z):
        raise PreconditionError(f"point {tuple(map(str, z))} is not in the set")
    rows, kinds = [], []
    for a, bi, k in P.rows():
        if not any(a):
            continue
        if k == EQ:
            rows.append(a)
            kinds.append(EQ)
        elif dot(a, z) == bi:
            rows.append(a)
            kinds.append(LE)
    return ConeSet(tuple(rows), zeros(len(rows)), tuple(kinds), P.dim)


def normal_cone_at(P: HPolyhedron, z) -> ConeSet:
    """Normal cone of convex analysis at ``z`` (equal to the limiting cone here)."""
    T = tangent_cone(P, z)
    if not T.A:
        return ConeSet.trivial(P.dim)
    rays, lin = T.generators()
    A = tuple(lin) + tuple(rays)
    kinds = (EQ,) * len(lin) + (LE,) * len(rays)
    return ConeSet(A, zeros(len(A)), kinds, P.dim)


def support_value(F: VPolytope, v) -> Fraction:
    """``max <v, x>`` over the bounded set ``F``."""
    if F.rays:
        raise UnboundedSetError("support value needs a bounded set")
    v = vec(v)
    return max(dot(v, p) for p in F.vertices)


# ---------------------------------------------------------------------------
# faces and Euclidean projection


def enumerate_faces(P: HPolyhedron, cap: int = DEFAULT_FACE_CAP) -> list[Face]:
    """All nonempty faces with relative-interior witnesses."""
    n_ineq = sum(1 for k in P.kinds if k == LE)
    if n_ineq > cap:
        raise ResourceError(f"{n_ineq} inequality rows exceed the face-enumeration cap {cap}")
    first = P.relative_interior_point()
    if first is None:
        return []
    eq_rows = {i for i, k in enumerate(P.kinds) if k == EQ}
    faces = {first[1]: first[0]}
    frontier = [first[1]]
    while frontier:
        nxt = []
        for S in frontier:
            for i in range(P.nrows):
                if i in S or i in eq_rows:
                    continue
                r = P.relative_interior_point(S | {i})
                if r is None:
                    continue
                if r[1] not in faces:
                    faces[r[1]] = r[0]
                    nxt.append(r[1])
        frontier = nxt
    out = [Face(frozenset(S - eq_rows), w) for S, w in faces.items()]
    return sorted(out, key=lambda f: (len(f.active), sorted(f.active)))


def _affine_projection(rows, rhs, x):
    """Euclidean projection of ``x`` onto ``{z : rows z = rhs}`` (consistent)."""
    if not rows:
        return tuple(x)
    n = len(x)
    R, piv = rref([tuple(r) + (bi,) for r, bi in zip(rows, rhs)], n + 1)
    M = [r[:n] for r in R]
    c = [r[n] for r in R]
    # solve (M M^T) lam = M x - c, z = x - M^T lam
    G = [[dot(mi, mj) for mj in M] for mi in M]
    g = [dot(mi, x) - ci for mi, ci in zip(M, c)]
    lam = solve_linear(G, g)
    if lam is None:
        raise InvariantError("singular Gram matrix for independent rows")
    z = list(x)
    for l, mi in zip(lam, M):
        if l:
            for j in range(n):
                z[j] -= l * mi[j]
    return tuple(z)


def in_generated_cone(vector, rays, lineality) -> bool:
    """Is ``vector`` in ``cone(rays) + span(lineality)``? (LP feasibility)."""
    n = len(vector)
    gens = list(rays) + list(lineality)
    if not gens:
        return not any(vector)
    A = tuple(tuple(g[j] for g in gens) for j in range(n))
    nonneg = (True,) * len(rays) + (False,) * len(lineality)
    lp = LinearProgram(zeros(len(gens)), A, tuple(vector), (EQ,) * n, nonneg, "min")
    return solve_lp(lp).optimal


def metric_projection(P: HPolyhedron, x, cap: int = DEFAULT_FACE_CAP):
    """Euclidean nearest point and squared distance, exactly.

    Projects onto the affine hull of every face and keeps the best feasible
    candidate; the winner is KKT-verified.
    """
    x = vec(x)
    if len(x) != P.dim:
        raise StructuralError("point dimension mismatch")
    if P.is_empty():
        raise EmptySetError("projection onto the empty set")
    if P.contains(x):
        return x, ZERO
    best = None
    for face in enumerate_faces(P, cap):
        idx = sorted(face.active | {i for i, k in enumerate(P.kinds) if k == EQ})
        z = _affine_projection([P.A[i] for i in idx], [P.b[i] for i in idx], x)
        if not P.contains(z):
            continue
        d2 = norm2_sq(sub(x, z))
        if best is None or d2 < best[1]:
            best = (z, d2)
    if best is None:
        raise InvariantError("no feasible face projection found")
    z, d2 = best
    active = [P.A[i] for i in range(P.nrows) if P.kinds[i] == LE and dot(P.A[i], z) == P.b[i]]
    eqs = [P.A[i] for i in range(P.nrows) if P.kinds[i] == EQ]
    if not in_generated_cone(sub(x, z), active, eqs):
        raise InvariantError("projection fails the KKT normal-cone test")
    return z, d2


# ---------------------------------------------------------------------------
# inclusion and equality


def find_violation(P: HPolyhedron, Q: HPolyhedron):
    """A point of ``P`` outside ``Q``, or None when ``P`` is a subset of ``Q``.

    Unbounded violations are reported as a feasible point of ``P`` moved
    along the improving ray far enough to leave ``Q``.
    """
    if P.dim != Q.dim:
        raise StructuralError("dimension mismatch")
    if P.is_empty():
        return None
    for a, bi, k in Q.rows():
        senses = ("max", "min") if k == EQ else ("max",)
        for sense in senses:
            out = P.optimize(a, sense)
            if out.status == "unbounded":
                base = P.feasible_point
                r = out.certificate
                ar = dot(a, r)
                step = (abs(bi - dot(a, base)) + 1) / abs(ar)
                return tuple(p + step * ri for p, ri in zip(base, r))
            if (sense == "max" and out.value > bi) or (sense == "min" and out.value < bi):
                return out.x
    return None


def subset_of(P: HPolyhedron, Q: HPolyhedron) -> bool:
    return find_violation(P, Q) is None


def set_equal(P: HPolyhedron, Q: HPolyhedron) -> bool:
    if P.dim != Q.dim:
        raise StructuralError("dimension mismatch")
    if (P.A, P.b, P.kinds) == (Q.A, Q.b, Q.kinds):
        return True
    return subset_of(P, Q) and subset_of(Q, P)


def linear_image(P: HPolyhedron, M: Sequence[Sequence[Fraction]]) -> HPolyhedron:
    """``{M y : y in P}`` by lifting and projecting out ``y``."""
    k = len(M)
    d = P.dim
    A, b, kinds = [], [], []
    for a, bi, kind in P.rows():
        A.append(zeros(k) + tuple(a))
        b.append(bi)
        kinds.append(kind)
    for i, row in enumerate(M):
        A.append(tuple(ONE if j == i else ZERO for j in range(k)) + tuple(-v for v in row))
        b.append(ZERO)
        kinds.append(EQ)
    lifted = HPolyhedron(tuple(A), tuple(b), tuple(kinds), k + d)
    return project_out(lifted, range(k, k + d))


def product(P: HPolyhedron, Q: HPolyhedron) -> HPolyhedron:
    n = P.dim + Q.dim
    return P.embed(n, range(P.dim)).intersect(Q.embed(n, range(P.dim, n)))


__all__ = [
    "HPolyhedron", "VPolytope", "ConeSet", "Face", "EmptySetError", "ResourceError",
    "UnboundedSetError", "cone_generators", "vrep_to_hrep", "hrep_to_vrep", "project_out",
    "classify_point", "positive_dual", "negative_dual", "orthogonal_complement",
    "point_dual", "direction_complement", "is_trivial_cone", "normal_cone_at",
    "tangent_cone", "support_value", "enumerate_faces", "metric_projection",
    "find_violation", "subset_of", "set_equal", "linear_image", "product",
    "in_generated_cone",
]
