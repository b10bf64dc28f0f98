"""Exact rational linear algebra and a two-phase simplex solver.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  Vectors are tuples of Fractions, matrices tuples of rows.

Dual sign convention
--------------------
Every LP is read as ``sense c.x`` subject to ``A x (<= | =) b`` with each
variable either ``>= 0`` or free.  The dual certificate ``y`` attached to an
optimal solve is the Lagrange multiplier vector of the rows:

* ``y_i >= 0`` on ``<=`` rows, free on ``=`` rows;
* min: ``c + A^T y >= 0`` on nonnegative variables, ``= 0`` on free ones, and
  ``value == -b.y``;
* max: ``A^T y >= c`` on nonnegative variables, ``=`` on free ones, and
  ``value == b.y``.

For infeasible systems ``y`` is a Farkas vector (``y >= 0`` on ``<=`` rows,
``A^T y >= 0`` / ``= 0`` as above, ``b.y == -1``); for unbounded problems it
is an improving recession direction of the primal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from gmpy2 import mpq

LE = "<="
EQ = "="

Vector = tuple
Matrix = tuple

ZERO = Fraction(0)
ONE = Fraction(1)


class StructuralError(ValueError):
    """Malformed input: dimension mismatch, bad row kind, unparsable number."""


class PreconditionError(ValueError):
    """An operation was called outside its documented precondition."""


class InvariantError(AssertionError):
    """An internal cross-check failed; indicates a bug, never bad input."""


def to_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string exactly.

    Floats are rejected: they would smuggle binary rounding into exact data.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise StructuralError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise StructuralError(f"not a rational: {value!r}") from exc
    raise StructuralError(f"not a rational: {value!r}")


def vec(values: Iterable) -> Vector:
    return tuple(to_fraction(v) for v in values)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(r) for r in rows)


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit(n: int, i: int, value=ONE) -> Vector:
    return tuple(Fraction(value) if j == i else ZERO for j in range(n))


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    s = ZERO
    for a, b in zip(u, v):
        if a and b:
            s += a * b
    return s


def add(u, v) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(t, u) -> Vector:
    return tuple(t * a for a in u)


def neg(u) -> Vector:
    return tuple(-a for a in u)


def norm_inf(u) -> Fraction:
    return max((abs(a) for a in u), default=ZERO)


def norm_1(u) -> Fraction:
    return sum((abs(a) for a in u), ZERO)


def norm2_sq(u) -> Fraction:
    return sum((a * a for a in u), ZERO)


def transpose(A: Sequence[Sequence[Fraction]], ncols: int | None = None) -> Matrix:
    if not A:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*A))


def matvec(A, x) -> Vector:
    return tuple(dot(row, x) for row in A)


def primitive(values: Sequence[Fraction]) -> tuple[int, ...]:
    """Positive multiple of ``values`` with coprime integer entries."""
    den = 1
    for v in values:
        d = Fraction(v).denominator
        den = den * d // gcd(den, d)
    ints = [int(Fraction(v) * den) for v in values]
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g > 1:
        ints = [a // g for a in ints]
    return tuple(ints)


def rref(rows: Sequence[Sequence[Fraction]], ncols: int):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    M = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][col]
        if p != 1:
            M[r] = [a / p for a in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
        if r == len(M):
            break
    return [tuple(row) for row in M[:r]], pivots


def solve_linear(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vector | None:
    """One exact solution of ``A x = b`` (free variables set to 0), or None."""
    n = len(A[0]) if A else 0
    aug = [tuple(row) + (bi,) for row, bi in zip(A, b)]
    R, piv = rref(aug, n + 1)
    if n in piv:
        return None
    x = [ZERO] * n
    for row, p in zip(R, piv):
        x[p] = row[n]
    return tuple(x)


@dataclass(frozen=True)
class LinearProgram:
    """``sense c.x`` subject to ``A x (kinds) b``; ``nonneg[j]`` marks ``x_j >= 0``."""

    c: Vector
    A: Matrix
    b: Vector
    kinds: tuple[str, ...]
    nonneg: tuple[bool, ...]
    sense: str = "min"

    def __post_init__(self):
        n = len(self.c)
        if len(self.A) != len(self.b) or len(self.kinds) != len(self.b):
            raise StructuralError("row count of A, b and kinds differ")
        for row in self.A:
            if len(row) != n:
                raise StructuralError("column count of A differs from len(c)")
        if len(self.nonneg) != n:
            raise StructuralError("nonneg flags must match the number of variables")
        if any(k not in (LE, EQ) for k in self.kinds):
            raise StructuralError(f"row kinds must be '<=' or '=', got {self.kinds}")
        if self.sense not in ("min", "max"):
            raise StructuralError(f"sense must be 'min' or 'max', got {self.sense!r}")

    @classmethod
    def build(cls, c, A, b, kinds=None, nonneg=False, sense="min") -> "LinearProgram":
        """Convenience constructor accepting ints/strings; ``nonneg`` may be a bool."""
        c = vec(c)
        A = mat(A)
        b = vec(b)
        kinds = tuple(kinds) if kinds is not None else (LE,) * len(b)
        if isinstance(nonneg, bool):
            nonneg = (nonneg,) * len(c)
        return cls(c, A, b, kinds, tuple(bool(f) for f in nonneg), sense)

    @property
    def nvars(self) -> int:
        return len(self.c)

    @property
    def nrows(self) -> int:
        return len(self.b)


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: Vector | None = None
    certificate: Vector | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _q(v) -> mpq:
    return mpq(v.numerator, v.denominator)


def _f(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


Q0 = mpq(0)
Q1 = mpq(1)


class _Tableau:
    """Dense simplex tableau, Bland's rule throughout.

    Entries are gmpy2 ``mpq`` rationals for speed; :func:`solve_lp` converts
    at the boundary so callers only ever see Fractions.
    """

    def __init__(self, rows, rhs, basis, ncols):
        self.T = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols

    def set_costs(self, costs):
        # reduced costs d_j = c_j - c_B B^-1 A_j; objective = -c_B x_B
        d = list(costs)
        z = Q0
        for i, bi in enumerate(self.basis):
            cb = costs[bi]
            if cb:
                row = self.T[i]
                for j in range(self.ncols):
                    if row[j]:
                        d[j] -= cb * row[j]
                z -= cb * self.rhs[i]
        self.d = d
        self.z = z

    def pivot(self, p, q):
        T = self.T
        prow = T[p]
        pv = prow[q]
        if pv != 1:
            prow = [a / pv for a in prow]
            T[p] = prow
            self.rhs[p] /= pv
        nz = [j for j in range(self.ncols) if prow[j]]
        rp = self.rhs[p]
        for i in range(len(T)):
            if i == p:
                continue
            f = T[i][q]
            if f:
                row = T[i]
                for j in nz:
                    row[j] -= f * prow[j]
                self.rhs[i] -= f * rp
        f = self.d[q]
        if f:
            for j in nz:
                self.d[j] -= f * prow[j]
            self.z -= f * rp
        self.basis[p] = q

    def run(self, allowed):
        """Bland's rule to optimality; returns None or the unbounded column."""
        while True:
            q = next((j for j in range(self.ncols) if allowed[j] and self.d[j] < 0), None)
            if q is None:
                return None
            best = None
            for i, row in enumerate(self.T):
                a = row[q]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return q
            self.pivot(best[1], q)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve exactly; certificates follow the module's dual sign convention."""
    m, n = lp.nrows, lp.nvars
    sgn = ONE if lp.sense == "min" else -ONE
    # structural columns: (original var, +-1); free vars are split
    cols: list[tuple[int, int]] = []
    for j in range(n):
        cols.append((j, 1))
        if not lp.nonneg[j]:
            cols.append((j, -1))
    ns = len(cols)
    le_rows = [i for i in range(m) if lp.kinds[i] == LE]
    slack_col = {i: ns + k for k, i in enumerate(le_rows)}
    flip = [(-1 if lp.b[i] < 0 else 1) for i in range(m)]
    art_rows = [i for i in range(m) if not (lp.kinds[i] == LE and flip[i] == 1)]
    art_col = {i: ns + len(le_rows) + k for k, i in enumerate(art_rows)}
    N = ns + len(le_rows) + len(art_rows)

    T = []
    rhs = []
    basis = []
    for i in range(m):
        row = [Q0] * N
        s = flip[i]
        Ai = lp.A[i]
        for k, (j, sign) in enumerate(cols):
            a = Ai[j]
            if a:
                row[k] = _q(a) if sign * s == 1 else -_q(a)
        if i in slack_col:
            row[slack_col[i]] = mpq(s)
        if i in art_col:
            row[art_col[i]] = Q1
            basis.append(art_col[i])
        else:
            basis.append(slack_col[i])
        T.append(row)
        rhs.append(_q(lp.b[i] * s))
    # identity column of row i in the initial basis
    init_col = [art_col.get(i, slack_col.get(i)) for i in range(m)]
    is_art = [False] * N
    for k in art_col.values():
        is_art[k] = True

    tab = _Tableau(T, rhs, basis, N)

    def multipliers(costs):
        # pi_i = c_k - d_k for the initial identity column k of row i
        pi = [costs[init_col[i]] - tab.d[init_col[i]] for i in range(m)]
        # back to original row orientation, then y = -pi
        return tuple(-_f(pi[i]) * flip[i] for i in range(m))

    if art_rows:
        c1 = [Q1 if is_art[j] else Q0 for j in range(N)]
        tab.set_costs(c1)
        tab.run([True] * N)
        if -tab.z > 0:
            y = multipliers(c1)
            by = dot(lp.b, y)
            y = tuple(v / -by for v in y)
            return LpOutcome("infeasible", certificate=y)
        # drive zero-level artificials out of the basis where possible
        for i in range(m):
            if is_art[tab.basis[i]]:
                q = next((j for j in range(N) if not is_art[j] and tab.T[i][j] != 0), None)
                if q is not None:
                    tab.pivot(i, q)

    c2 = [Q0] * N
    for k, (j, sign) in enumerate(cols):
        c2[k] = _q(sgn * lp.c[j] * sign)
    tab.set_costs(c2)
    q = tab.run([not a for a in is_art])
    if q is not None:
        d = [ZERO] * N
        d[q] = ONE
        for i, bi in enumerate(tab.basis):
            d[bi] = -_f(tab.T[i][q])
        ray = [ZERO] * n
        for k, (j, sign) in enumerate(cols):
            if d[k]:
                ray[j] += sign * d[k]
        ray = tuple(Fraction(v) for v in primitive(ray))
        return LpOutcome("unbounded", certificate=ray)

    xs = [ZERO] * N
    for i, bi in enumerate(tab.basis):
        xs[bi] = _f(tab.rhs[i])
    x = [ZERO] * n
    for k, (j, sign) in enumerate(cols):
        if xs[k]:
            x[j] += sign * xs[k]
    x = tuple(x)
    value = dot(lp.c, x)
    y = multipliers(c2)
    return LpOutcome("optimal", value=value, x=x, certificate=y)


def dual_value(lp: LinearProgram, y: Sequence[Fraction]) -> Fraction:
    """Dual objective of ``y`` under the module convention."""
    by = dot(lp.b, y)
    return -by if lp.sense == "min" else by


def check_outcome(lp: LinearProgram, out: LpOutcome) -> None:
    """Verify primal/dual feasibility and the certificate exactly; raise on breach."""
    A, b = lp.A, lp.b
    AT = transpose(A, lp.nvars) if A else tuple(() for _ in range(lp.nvars))
    if out.status == "optimal":
        x, y = out.x, out.certificate
        for i in range(lp.nrows):
            ax = dot(A[i], x)
            if (lp.kinds[i] == LE and ax > b[i]) or (lp.kinds[i] == EQ and ax != b[i]):
                raise InvariantError(f"primal row {i} violated")
            if lp.kinds[i] == LE and y[i] < 0:
                raise InvariantError(f"dual sign on row {i}")
        for j in range(lp.nvars):
            if lp.nonneg[j] and x[j] < 0:
                raise InvariantError(f"x_{j} negative")
            aty = dot(AT[j], y) if AT[j] else ZERO
            red = lp.c[j] + aty if lp.sense == "min" else aty - lp.c[j]
            if (lp.nonneg[j] and red < 0) or (not lp.nonneg[j] and red != 0):
                raise InvariantError(f"dual constraint {j} violated")
        if out.value != dual_value(lp, y) or out.value != dot(lp.c, x):
            raise InvariantError("strong duality gap")
    elif out.status == "infeasible":
        y = out.certificate
        for i in range(lp.nrows):
            if lp.kinds[i] == LE and y[i] < 0:
                raise InvariantError("Farkas sign")
        for j in range(lp.nvars):
            aty = dot(AT[j], y) if AT[j] else ZERO
            if (lp.nonneg[j] and aty < 0) or (not lp.nonneg[j] and aty != 0):
                raise InvariantError("Farkas combination")
        if dot(b, y) >= 0:
            raise InvariantError("Farkas rhs")
    else:
        r = out.certificate
        for i in range(lp.nrows):
            ar = dot(A[i], r)
            if (lp.kinds[i] == LE and ar > 0) or (lp.kinds[i] == EQ and ar != 0):
                raise InvariantError("ray leaves the feasible set")
        if any(lp.nonneg[j] and r[j] < 0 for j in range(lp.nvars)):
            raise InvariantError("ray sign")
        cr = dot(lp.c, r)
        if (lp.sense == "min" and cr >= 0) or (lp.sense == "max" and cr <= 0):
            raise InvariantError("ray does not improve")


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    point: Vector | None = None
    certificate: Vector | None = None


def lp_feasible(A, b, kinds=None) -> Feasibility:
    """Decide ``{x : A x (kinds) b}`` over free variables, with a certificate."""
    A = mat(A)
    b = vec(b)
    n = len(A[0]) if A else 0
    lp = LinearProgram.build([0] * n, A, b, kinds, nonneg=False)
    out = solve_lp(lp)
    if out.status == "infeasible":
        return Feasibility(False, certificate=out.certificate)
    return Feasibility(True, point=out.x)


def optimal_dual_face(lp: LinearProgram):
    """All optimal dual multipliers as an H-polyhedron in row space.

    Built from dual feasibility, the objective equality, and complementary
    slackness against the primal optimum found by the simplex.
    """
    from .polyhedra import HPolyhedron

    out = solve_lp(lp)
    if not out.optimal:
        raise PreconditionError(f"optimal dual face needs an optimal LP, got {out.status}")
    m = lp.nrows
    AT = transpose(lp.A, lp.nvars) if lp.A else tuple(() for _ in range(lp.nvars))
    rows, rhs, kinds = [], [], []
    for i in range(m):
        if lp.kinds[i] == LE:
            if dot(lp.A[i], out.x) < lp.b[i]:
                rows.append(unit(m, i))
                rhs.append(ZERO)
                kinds.append(EQ)
            else:
                rows.append(unit(m, i, -1))
                rhs.append(ZERO)
                kinds.append(LE)
    s = ONE if lp.sense == "min" else -ONE
    for j in range(lp.nvars):
        col = AT[j] if AT[j] else zeros(m)
        # min: -(A^T y)_j <= c_j ; max: -(A^T y)_j <= -c_j
        row = tuple(-a for a in col)
        bound = s * lp.c[j]
        if lp.nonneg[j] and out.x[j] == 0:
            rows.append(row)
            rhs.append(bound)
            kinds.append(LE)
        else:
            rows.append(row)
            rhs.append(bound)
            kinds.append(EQ)
    rows.append(lp.b)
    rhs.append(-out.value if lp.sense == "min" else out.value)
    kinds.append(EQ)
    return HPolyhedron(tuple(rows), tuple(rhs), tuple(kinds), m)
