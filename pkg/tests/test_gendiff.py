from fractions import Fraction
from itertools import product as iproduct

import pytest
from hypothesis import given, strategies as st

from polylip.exact import EQ, LE, PreconditionError, dot, sub
from polylip.gendiff import (
    coderivative,
    coderivative_at_zero_convex,
    in_support_sphere,
    minkowski_singular,
    scalarization_subdifferential,
    singular_subdifferential,
    value_subdifferential,
)
from polylip.instances import random_pl_function, random_polytope
from polylip.polyhedra import ConeSet, HPolyhedron, VPolytope, is_trivial_cone, set_equal, vrep_to_hrep
from polylip.varfun import GraphMap, PLValueFunction, gauge_function, scalarization_function

F = Fraction
SIMPLEX_EDGE = VPolytope.from_points([(1, 0), (0, 1)])
ABOVE_DIAGONAL = GraphMap.from_rows([[1, -1]], [0], 1, 1)
HALF_LINE = GraphMap.from_rows([[-1, 0], [0, 1]], [0, 0], 1, 1, [LE, EQ])
BOX_GRAPH = GraphMap(HPolyhedron.box((0, 0), 1), 1, 1)
V_CONE = HPolyhedron.from_rows([[1, -1], [-1, -1]], [0, 0])
ORTHANT = HPolyhedron.from_rows([[-1, 0], [0, -1]], [0, 0])


def hull(*pts):
    return vrep_to_hrep(VPolytope.from_points(pts))


def cone(rows, kinds=None, dim=2):
    return ConeSet.from_rows(rows, kinds, dim)


class TestValueSubdifferential:
    def test_gauge_on_the_open_orthant(self):
        S = value_subdifferential(gauge_function(SIMPLEX_EDGE), (2, 2))
        assert set_equal(S, HPolyhedron.point((1, 1)))

    def test_scalarization_kink(self):
        S = value_subdifferential(scalarization_function(V_CONE, (0, 1)), (0, 0))
        assert set_equal(S, hull((1, -1), (-1, -1)))

    def test_constant_zero(self):
        f = PLValueFunction.max_affine([[0, 0]], [0])
        assert set_equal(value_subdifferential(f, (3, 1)), HPolyhedron.point((0, 0)))

    def test_infinite_value_is_rejected(self):
        with pytest.raises(PreconditionError):
            value_subdifferential(gauge_function(SIMPLEX_EDGE), (1, -1))

    @given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=4),
           st.lists(st.integers(-2, 2), min_size=4, max_size=4),
           st.tuples(st.integers(-2, 2), st.integers(-2, 2)))
    def test_max_affine_matches_active_slope_hull(self, slopes, offsets, x):
        offsets = offsets[:len(slopes)]
        f = PLValueFunction.max_affine(slopes, offsets)
        vals = [dot(tuple(map(F, g)), tuple(map(F, x))) + h for g, h in zip(slopes, offsets)]
        top = max(vals)
        active = [g for g, v in zip(slopes, vals) if v == top]
        assert set_equal(value_subdifferential(f, x), hull(*active))

    @pytest.mark.parametrize("seed", range(12))
    def test_subgradient_inequality_on_random_functions(self, seed):
        f, x = random_pl_function(seed)
        S = value_subdifferential(f, x)
        w = S.feasible_point
        fx = f(x).value
        for h in iproduct((-1, 0, 1), repeat=len(x)):
            u = tuple(a + F(b, 3) for a, b in zip(x, h))
            fu = f(u)
            if fu.finite:
                assert fu.value >= fx + dot(w, sub(u, x))


class TestSingularSubdifferential:
    def test_gauge_fixtures(self):
        g = gauge_function(SIMPLEX_EDGE)
        assert set_equal(singular_subdifferential(g, (1, 0)), cone([[1, 0], [0, 1]], [EQ, LE]))
        assert is_trivial_cone(singular_subdifferential(g, (1, 1)))
        assert set_equal(singular_subdifferential(g, (0, 0)), cone([[1, 0], [0, 1]]))

    def test_outside_domain_is_rejected(self):
        with pytest.raises(PreconditionError):
            singular_subdifferential(gauge_function(SIMPLEX_EDGE), (-1, 0))


class TestCoderivative:
    def test_fixtures_at_zero(self):
        assert is_trivial_cone(coderivative(ABOVE_DIAGONAL, (0,), (0,), (0,)).set)
        D = coderivative(HALF_LINE, (0,), (0,), (0,)).set
        assert set_equal(D, cone([[1]], dim=1))
        assert is_trivial_cone(coderivative(BOX_GRAPH, (0,), (0,), (0,)).set)

    def test_nonzero_direction(self):
        # N((0,0); {z >= x}) = cone{(1,-1)}: (u, -v) in N gives u = v for v >= 0
        D = coderivative(ABOVE_DIAGONAL, (0,), (0,), (1,)).set
        assert set_equal(D, HPolyhedron.point((1,)))
        assert coderivative(ABOVE_DIAGONAL, (0,), (0,), (-1,)).set.is_empty()

    def test_off_graph_is_rejected(self):
        with pytest.raises(PreconditionError):
            coderivative(ABOVE_DIAGONAL, (1,), (0,), (0,))

    def test_domain_normal_cone(self):
        assert set_equal(coderivative_at_zero_convex(HALF_LINE, (0,)), cone([[1]], dim=1))
        assert is_trivial_cone(coderivative_at_zero_convex(ABOVE_DIAGONAL, (0,)))
        assert set_equal(coderivative_at_zero_convex(BOX_GRAPH, (1,)), cone([[-1]], dim=1))

    @pytest.mark.parametrize("seed", range(10))
    def test_zero_direction_equals_domain_normal_cone(self, seed):
        from polylip.instances import random_graph

        G, x, y = random_graph(seed)
        D = coderivative(G, x, y, (0,) * G.n).set
        assert set_equal(D, coderivative_at_zero_convex(G, x))


class TestMinkowski:
    def test_fixtures(self):
        assert set_equal(minkowski_singular(SIMPLEX_EDGE, (1, 0)), cone([[1, 0], [0, 1]], [EQ, LE]))
        assert is_trivial_cone(minkowski_singular(SIMPLEX_EDGE, (1, 1)))
        assert set_equal(minkowski_singular(SIMPLEX_EDGE, (0, 0)), cone([[1, 0], [0, 1]]))

    @pytest.mark.parametrize("seed", range(12))
    def test_closed_form_matches_value_function_route(self, seed):
        Fp, x = random_polytope(seed)
        assert set_equal(minkowski_singular(Fp, x), singular_subdifferential(gauge_function(Fp), x))


class TestScalarizationSubdifferential:
    def test_vertex_contact(self):
        res = scalarization_subdifferential(V_CONE, (0, 1), (0, -1))
        assert res.hit == (0, 0) and res.time == 1
        assert set_equal(res.set, hull((1, -1), (-1, -1)))
        assert res.exact

    def test_edge_contact(self):
        res = scalarization_subdifferential(V_CONE, (0, 1), (1, 0))
        assert res.hit == (1, 1)
        assert set_equal(res.set, HPolyhedron.point((1, -1)))

    def test_interior_start_on_the_orthant(self):
        res = scalarization_subdifferential(ORTHANT, (0, 1), (1, 1))
        assert res.hit == (1, 0)
        assert set_equal(res.set, HPolyhedron.point((0, -1)))

    @pytest.mark.parametrize("x", [(0, -1), (1, 0), (-2, 1), (F(1, 2), F(-3, 2))])
    def test_agrees_with_value_subdifferential(self, x):
        res = scalarization_subdifferential(V_CONE, (0, 1), x)
        direct = value_subdifferential(scalarization_function(V_CONE, (0, 1)), x)
        assert set_equal(res.set, direct)


class TestSupportSphere:
    def test_fixtures(self):
        unit = VPolytope.from_points([(1,)])
        assert in_support_sphere(unit, (-1,))
        assert not in_support_sphere(unit, (1,))
        assert in_support_sphere(VPolytope.from_points([(0, 0), (0, 1)]), (0, -1))
