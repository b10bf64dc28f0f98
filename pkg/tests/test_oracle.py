from fractions import Fraction

import pytest

from polylip.exact import EQ, LE, dot, sub
from polylip.instances import corpus
from polylip.oracle import (
    BLOWUP_EVIDENCE,
    INCONCLUSIVE,
    LIPSCHITZ_EVIDENCE,
    SamplingPlan,
    agreement_harness,
    aubin_sampled,
    exact_aubin,
    exact_pl_lipschitz,
    frechet_subgradient_check,
    judge,
    quick_plan,
    sampled_modulus,
)
from polylip.polyhedra import HPolyhedron, VPolytope
from polylip.varfun import (
    PLUS_INF,
    ExtReal,
    GraphMap,
    PLValueFunction,
    gauge_function,
    minimal_time_function,
)

F = Fraction
SIMPLEX_EDGE = VPolytope.from_points([(1, 0), (0, 1)])
AXIS = HPolyhedron.from_rows([[0, 1]], [0], [EQ])
SEGMENT_UP = VPolytope.from_points([(0, 0), (0, 1)])
ABOVE_DIAGONAL = GraphMap.from_rows([[1, -1]], [0], 1, 1)
HALF_LINE = GraphMap.from_rows([[-1, 0], [0, 1]], [0, 0], 1, 1, [LE, EQ])
SMALL = SamplingPlan(seed=1, K=5, samples=12)


def fin(v):
    return ExtReal.of(v)


class TestPlan:
    def test_radii_are_dyadic(self):
        assert SamplingPlan(K=3, k0=2).radii == [F(1, 4), F(1, 8), F(1, 16), F(1, 32)]

    def test_offsets_are_deterministic_and_distinct(self):
        a = SamplingPlan(seed=5).offsets(3)
        assert a == SamplingPlan(seed=5).offsets(3)
        assert len(a) == len(set(a))
        assert all(max(abs(v) for v in h) <= 1 for h in a)
        assert a != SamplingPlan(seed=6).offsets(3)

    def test_invalid_plans(self):
        with pytest.raises(ValueError):
            SamplingPlan(K=-1)
        with pytest.raises(ValueError):
            SamplingPlan(norm="2")


class TestJudge:
    radii = [F(1, 2 ** k) for k in range(6)]

    def test_stable_tail(self):
        prof = judge(self.radii, [fin(v) for v in (3, 2, 1, 1, 1, 1)])
        assert prof.verdict == LIPSCHITZ_EVIDENCE and prof.estimate == fin(1)

    def test_infinite_quotient(self):
        prof = judge(self.radii, [fin(1)] * 5 + [PLUS_INF])
        assert prof.verdict == BLOWUP_EVIDENCE

    def test_coarse_infinite_quotient_is_ignored(self):
        prof = judge(self.radii, [PLUS_INF, PLUS_INF] + [fin(2)] * 4)
        assert prof.verdict == LIPSCHITZ_EVIDENCE and prof.estimate == fin(2)

    def test_growth_after_a_coarse_infinity(self):
        prof = judge(self.radii, [PLUS_INF, fin(1), fin(2), fin(3), fin(4), fin(5)])
        assert prof.verdict == BLOWUP_EVIDENCE

    def test_sustained_growth(self):
        prof = judge(self.radii, [fin(v) for v in (1, 2, 4, 8, 9, 9)])
        assert prof.verdict == BLOWUP_EVIDENCE

    def test_neither(self):
        prof = judge(self.radii, [fin(v) for v in (1, 2, 1, 2, 1, 2)])
        assert prof.verdict == INCONCLUSIVE


class TestSampledModulus:
    def test_absolute_value(self):
        f = PLValueFunction.max_affine([[1], [-1]], [0, 0])
        prof = sampled_modulus(f, (0,), SMALL)
        assert prof.verdict == LIPSCHITZ_EVIDENCE and prof.estimate == fin(1)

    def test_boundary_of_the_gauge_domain(self):
        prof = sampled_modulus(gauge_function(SIMPLEX_EDGE), (1, 0), SMALL)
        assert prof.verdict == BLOWUP_EVIDENCE

    def test_axis_target_has_modulus_one(self):
        T = minimal_time_function(SEGMENT_UP, AXIS)
        prof = sampled_modulus(T, (0, -2))
        assert prof.verdict == LIPSCHITZ_EVIDENCE
        assert prof.estimate == fin(1)

    def test_interior_point_near_the_boundary(self):
        # radius 1 leaves the domain, the finer radii do not
        g = gauge_function(SIMPLEX_EDGE)
        prof = sampled_modulus(g, (F(1, 2), F(1, 2)), SamplingPlan(K=6, samples=8))
        assert prof.verdict == LIPSCHITZ_EVIDENCE

    def test_reproducible(self):
        f = gauge_function(SIMPLEX_EDGE)
        assert sampled_modulus(f, (1, 1), SMALL) == sampled_modulus(f, (1, 1), SMALL)

    def test_one_norm_quotients(self):
        f = PLValueFunction.max_affine([[1, 1]], [0])
        prof = sampled_modulus(f, (0, 0), SamplingPlan(K=4, samples=8, norm="1"))
        assert prof.estimate == fin(1)


class TestExactOracles:
    def test_pl_positions(self):
        g = gauge_function(SIMPLEX_EDGE)
        assert exact_pl_lipschitz(g, (1, 1)).lipschitz
        ex = exact_pl_lipschitz(g, (1, 0))
        assert not ex.lipschitz and ex.in_domain and ex.position == "boundary"
        assert not exact_pl_lipschitz(g, (-1, 0)).in_domain

    def test_aubin(self):
        assert exact_aubin(ABOVE_DIAGONAL, (0,)).lipschitz
        assert not exact_aubin(HALF_LINE, (0,)).lipschitz
        assert exact_aubin(GraphMap.constant(AXIS), ()).lipschitz


class TestAubinSampled:
    def test_above_diagonal(self):
        assert aubin_sampled(ABOVE_DIAGONAL, (0,), (0,), SMALL).verdict == LIPSCHITZ_EVIDENCE

    def test_half_line(self):
        assert aubin_sampled(HALF_LINE, (0,), (0,), SMALL).verdict == BLOWUP_EVIDENCE

    def test_box_graph(self):
        G = GraphMap(HPolyhedron.box((0, 0), 1), 1, 1)
        assert aubin_sampled(G, (0,), (0,), SMALL).verdict == LIPSCHITZ_EVIDENCE


class TestFrechetCheck:
    def test_true_subgradient_passes(self):
        g = gauge_function(SIMPLEX_EDGE)
        assert frechet_subgradient_check(g, (2, 2), (1, 1), SMALL).passed

    def test_false_subgradient_fails_with_a_genuine_violation(self):
        g = gauge_function(SIMPLEX_EDGE)
        x, w = (F(2), F(2)), (F(2), F(0))
        res = frechet_subgradient_check(g, x, w, SMALL)
        assert not res.passed
        u = res.counterexample
        # the witness really violates the subgradient inequality
        assert g(u).value < g(x).value + dot(w, sub(u, x))

    def test_base_point_must_be_finite(self):
        with pytest.raises(ValueError):
            frechet_subgradient_check(gauge_function(SIMPLEX_EDGE), (-1, 0), (0, 0), SMALL)


class TestHarness:
    def test_corpus_agrees(self):
        summary = agreement_harness(corpus(), quick_plan())
        assert summary.all_agree, summary.disagreements
        assert summary.total >= 12
