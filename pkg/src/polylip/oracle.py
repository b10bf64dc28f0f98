"""Independent checks of Lipschitz-type properties.

Two kinds of evidence live here.  The sampling layer evaluates the defining
inequalities on a deterministic rational lattice around the point, at a
geometric schedule of radii.  The exact layer decides Lipschitz continuity
of convex piecewise-linear functions (and the Aubin property of convex
polyhedral maps) by interiority in the domain.

Offsets are drawn once per plan and rescaled at every radius.  For
piecewise-linear data this makes the per-radius suprema exactly constant
once the radius is small enough, so stabilization is tested by equality.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .exact import ZERO, dot, norm_1, norm_inf, sub, vec
from .polyhedra import (
    EmptySetError,
    HPolyhedron,
    classify_point,
    hrep_to_vrep,
)
from .varfun import ExtReal, GraphMap, PLValueFunction, distance, dom_of_map, slice_map

LIPSCHITZ_EVIDENCE = "lipschitz-evidence"
BLOWUP_EVIDENCE = "blowup-evidence"
INCONCLUSIVE = "inconclusive"

STABLE_WINDOW = 4
GROWTH_WINDOW = 3


@dataclass(frozen=True)
class SamplingPlan:
    """Deterministic sampling schedule.

    Radii are ``2**-(k0 + k)`` for ``k = 0..K``.  Each radius reuses the same
    offsets: the signed unit vectors plus ``samples`` lattice points in the
    unit box whose denominators are ``2**a * 3**b``.
    """

    seed: int = 0
    K: int = 12
    samples: int = 200
    k0: int = 0
    norm: str = "inf"

    def __post_init__(self):
        if self.K < 0 or self.samples < 0 or self.k0 < 0:
            raise ValueError("sampling plan parameters must be nonnegative")
        if self.norm not in ("inf", "1"):
            raise ValueError("sampling norms are 'inf' and '1'")

    @property
    def radii(self) -> list[Fraction]:
        return [Fraction(1, 2 ** (self.k0 + k)) for k in range(self.K + 1)]

    def offsets(self, dim: int) -> list[tuple[Fraction, ...]]:
        rng = random.Random(self.seed * 1_000_003 + dim)
        out = []
        for i in range(dim):
            for s in (1, -1):
                out.append(tuple(Fraction(s) if j == i else ZERO for j in range(dim)))
        dens = [2 ** a * 3 ** b for a in range(4) for b in range(3)]
        for _ in range(self.samples):
            den = rng.choice(dens)
            h = tuple(Fraction(rng.randint(-den, den), den) for _ in range(dim))
            if any(h) and h not in out:
                out.append(h)
        return out

    def measure(self, v) -> Fraction:
        return norm_inf(v) if self.norm == "inf" else norm_1(v)


def quick_plan(seed: int = 0) -> SamplingPlan:
    """Short plan used by batch suites: four tiny radii, few random offsets."""
    return SamplingPlan(seed=seed, K=3, samples=4, k0=10)


@dataclass(frozen=True)
class ModulusProfile:
    """Per-radius supremum quotients and the verdict drawn from them."""

    radii: tuple
    sups: tuple
    verdict: str
    estimate: ExtReal | None
    worst: tuple | None = None

    def to_json(self) -> dict:
        return {
            "radii": [str(r) for r in self.radii],
            "sups": [s.to_json() for s in self.sups],
            "verdict": self.verdict,
            "estimate": None if self.estimate is None else self.estimate.to_json(),
        }


def judge(radii, sups, worst=None) -> ModulusProfile:
    """Verdict rules: a ``+inf`` among the finest radii or sustained growth is
    blowup evidence, equal sups over the last radii are Lipschitz evidence.

    Lipschitz continuity is local, so an infinite quotient at a coarse radius
    (a sample that left the domain far from ``x``) is not held against the
    point once the finer radii are all finite.
    """
    sups = tuple(sups)
    if any(not s.finite for s in sups[-STABLE_WINDOW:]):
        return ModulusProfile(tuple(radii), sups, BLOWUP_EVIDENCE, ExtReal.pos_inf(), worst)
    if len(sups) >= STABLE_WINDOW and len(set(sups[-STABLE_WINDOW:])) == 1:
        return ModulusProfile(tuple(radii), sups, LIPSCHITZ_EVIDENCE, sups[-1], worst)
    finite_tail = sups
    for i, s in enumerate(sups):
        if not s.finite:
            finite_tail = sups[i + 1:]
    run = 0
    for a, b in zip(finite_tail, finite_tail[1:]):
        run = run + 1 if b > a else 0
        if run >= GROWTH_WINDOW:
            return ModulusProfile(tuple(radii), sups, BLOWUP_EVIDENCE, None, worst)
    return ModulusProfile(tuple(radii), sups, INCONCLUSIVE, None, worst)


def _quotient(fx: ExtReal, fu: ExtReal, gap: Fraction) -> ExtReal | None:
    if fx.finite and fu.finite:
        return ExtReal.of(abs(fx.value - fu.value) / gap)
    if fx.finite or fu.finite:
        return ExtReal.pos_inf()
    return None


def _pairs(count: int):
    """Index pairs: every sample with the center (index 0) and consecutive samples."""
    for i in range(1, count):
        yield 0, i
    for i in range(1, count - 1):
        yield i, i + 1


def sampled_modulus(f: Callable, x, plan: SamplingPlan = SamplingPlan()) -> ModulusProfile:
    """Sampled Lipschitz quotients ``|f(x) - f(u)| / |x - u|`` around ``x``."""
    x = vec(x)
    offsets = plan.offsets(len(x))
    sups, worst = [], None
    for r in plan.radii:
        pts = [x] + [tuple(xi + r * hi for xi, hi in zip(x, h)) for h in offsets]
        vals = [ExtReal.of(v) if not isinstance(v, ExtReal) else v for v in map(f, pts)]
        best = ExtReal.of(0)
        for i, j in _pairs(len(pts)):
            q = _quotient(vals[i], vals[j], plan.measure(sub(pts[i], pts[j])))
            if q is not None and q > best:
                best = q
                worst = (pts[i], pts[j])
        sups.append(best)
    return judge(plan.radii, sups, worst)


@dataclass(frozen=True)
class ExactVerdict:
    lipschitz: bool
    in_domain: bool
    position: str


def exact_pl_lipschitz(f: PLValueFunction, x) -> ExactVerdict:
    """Convex PL ground truth: Lipschitz around ``x`` iff ``x`` is interior to the domain."""
    position, _ = classify_point(f.domain, vec(x))
    return ExactVerdict(position == "interior", position != "outside", position)


def exact_aubin(G: GraphMap, x) -> ExactVerdict:
    """Convex-graph ground truth: Aubin iff ``x`` is interior to ``dom G``."""
    if G.m == 0:
        return ExactVerdict(True, not G.graph.is_empty(), "interior")
    position, _ = classify_point(dom_of_map(G), vec(x))
    return ExactVerdict(position == "interior", position != "outside", position)


def _vertices(P: HPolyhedron):
    try:
        V = hrep_to_vrep(P)
    except EmptySetError:
        return []
    return list(V.vertices)


def aubin_sampled(G: GraphMap, x, y, plan: SamplingPlan = SamplingPlan()) -> ModulusProfile:
    """Sampled Aubin quotients ``e(G(x') cap W, G(u)) / |x' - u|``.

    ``W`` is the box of the current radius around ``y``; the excess is the
    largest inf-norm distance from a vertex of ``G(x') cap W`` to ``G(u)``.
    """
    x, y = vec(x), vec(y)
    if G.m == 0:
        return judge(plan.radii, [ExtReal.of(0)] * len(plan.radii))
    offsets = plan.offsets(G.m)
    sups, worst = [], None
    for r in plan.radii:
        W = HPolyhedron.box(y, r)
        pts = [x] + [tuple(xi + r * hi for xi, hi in zip(x, h)) for h in offsets]
        slices = [slice_map(G, p) for p in pts]
        verts = [_vertices(S.intersect(W)) for S in slices]
        empty = [S.is_empty() for S in slices]
        best = ExtReal.of(0)
        for i, j in _pairs(len(pts)):
            gap = plan.measure(sub(pts[i], pts[j]))
            for a, b in ((i, j), (j, i)):
                if not verts[a]:
                    continue
                if empty[b]:
                    q = ExtReal.pos_inf()
                else:
                    # vertices already in the other slice contribute zero; skip their LPs
                    excess = max((distance(slices[b], w, "inf").value for w in verts[a]
                                  if not slices[b].contains(w)), default=ZERO)
                    q = ExtReal.of(excess / gap)
                if q > best:
                    best = q
                    worst = (pts[a], pts[b])
        sups.append(best)
    return judge(plan.radii, sups, worst)


@dataclass(frozen=True)
class SubgradientCheck:
    passed: bool
    tail: ExtReal
    sups: tuple
    counterexample: tuple | None


def frechet_subgradient_check(f: Callable, x, w, plan: SamplingPlan = SamplingPlan(),
                              eps: Fraction = ZERO) -> SubgradientCheck:
    """Normalized violation ``(<w, u - x> - f(u) + f(x)) / |u - x|`` over samples.

    Passes when the sup at the smallest radius is at most ``eps``; on failure
    the worst sample point is returned.
    """
    x, w = vec(x), vec(w)
    fx = f(x)
    if not fx.finite:
        raise ValueError("the function must be finite at the base point")
    offsets = plan.offsets(len(x))
    sups, worst, worst_val = [], None, None
    for r in plan.radii:
        best, arg = None, None
        for h in offsets:
            u = tuple(xi + r * hi for xi, hi in zip(x, h))
            fu = f(u)
            if fu.tag == "+inf":
                continue
            if fu.tag == "-inf":
                val = ExtReal.pos_inf()
            else:
                val = ExtReal.of((dot(w, sub(u, x)) - fu.value + fx.value) / plan.measure(sub(u, x)))
            if best is None or val > best:
                best, arg = val, u
        best = best if best is not None else ExtReal.neg_inf()
        sups.append(best)
        if worst_val is None or best > worst_val:
            worst_val, worst = best, arg
    tail = sups[-1]
    passed = tail <= ExtReal.of(eps)
    return SubgradientCheck(passed, tail, tuple(sups), None if passed else worst)


@dataclass
class AgreementSummary:
    total: int = 0
    agreements: int = 0
    disagreements: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    @property
    def all_agree(self) -> bool:
        return self.total == self.agreements


def agreement_harness(instances: Sequence, plan: SamplingPlan | None = None) -> AgreementSummary:
    """Run each instance's criterion against its exact oracle and tabulate.

    Instances are objects with ``name`` and an ``evaluate(plan)`` method
    returning ``(criterion_verdict, oracle_lipschitz, biconditional)``.
    """
    plan = plan or quick_plan()
    summary = AgreementSummary()
    for inst in instances:
        verdict, oracle_ok, bicond = inst.evaluate(plan)
        if bicond:
            ok = verdict.lipschitz_claim == oracle_ok
        else:
            ok = not (verdict.lipschitz_claim and not oracle_ok)
        summary.total += 1
        summary.rows.append((inst.name, verdict.conclusion, oracle_ok, ok))
        if ok:
            summary.agreements += 1
        else:
            summary.disagreements.append(inst.name)
    return summary


__all__ = [
    "SamplingPlan", "ModulusProfile", "ExactVerdict", "SubgradientCheck", "AgreementSummary",
    "sampled_modulus", "exact_pl_lipschitz", "exact_aubin", "aubin_sampled",
    "frechet_subgradient_check", "agreement_harness", "quick_plan", "judge",
    "LIPSCHITZ_EVIDENCE", "BLOWUP_EVIDENCE", "INCONCLUSIVE",
]
