from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from oracles import box_distance_inf, gauge_by_facets, halfplane_scalarization
from polylip.exact import EQ, LE, PreconditionError
from polylip.instances import random_graph, random_scalarization_case
from polylip.polyhedra import HPolyhedron, VPolytope, set_equal, vrep_to_hrep
from polylip.varfun import (
    MINUS_INF,
    PLUS_INF,
    ExtReal,
    GraphMap,
    PLValueFunction,
    distance,
    dom_of_map,
    epigraph_map,
    gauge,
    generalized_projection,
    hitting_point,
    minimal_time,
    minimal_time_sv,
    scalar_distance_D,
    scalarization,
    slice_map,
)

F = Fraction
rat = st.fractions(min_value=-4, max_value=4, max_denominator=4)
pos = st.fractions(min_value=F(1, 8), max_value=4, max_denominator=8)
vec2 = st.tuples(rat, rat)

SIMPLEX_EDGE = VPolytope.from_points([(1, 0), (0, 1)])
BOX = VPolytope.from_points([(1, 1), (1, -1), (-1, 1), (-1, -1)])
AXIS = HPolyhedron.from_rows([[0, 1]], [0], [EQ])
SEGMENT_UP = VPolytope.from_points([(0, 0), (0, 1)])
ABOVE_DIAGONAL = GraphMap.from_rows([[1, -1]], [0], 1, 1)
HALF_LINE = GraphMap.from_rows([[-1, 0], [0, 1]], [0, 0], 1, 1, [LE, EQ])
BOX_GRAPH = GraphMap(HPolyhedron.box((0, 0), 1), 1, 1)
V_CONE = HPolyhedron.from_rows([[1, -1], [-1, -1]], [0, 0])
ORTHANT = HPolyhedron.from_rows([[-1, 0], [0, -1]], [0, 0])


def fin(v):
    return ExtReal.of(v)


class TestExtReal:
    def test_ordering_and_arithmetic(self):
        assert MINUS_INF < fin(-100) < fin(3) < PLUS_INF
        assert fin(2) + fin(F(1, 2)) == fin(F(5, 2))
        assert PLUS_INF + fin(1) == PLUS_INF
        assert fin(3) * 0 == fin(0) and PLUS_INF * 0 == fin(0)

    def test_opposite_infinities_do_not_add(self):
        with pytest.raises(ValueError):
            PLUS_INF + MINUS_INF

    def test_json_forms(self):
        assert fin(F(-3, 4)).to_json() == {"finite": "-3/4"}
        assert PLUS_INF.to_json() == "+inf" and MINUS_INF.to_json() == "-inf"


class TestGauge:
    def test_fixtures(self):
        assert gauge(SIMPLEX_EDGE, (2, 2)) == fin(4)
        assert gauge(SIMPLEX_EDGE, (1, -1)) == PLUS_INF
        assert gauge(SIMPLEX_EDGE, (0, 0)) == fin(0)

    @given(vec2)
    def test_box_gauge_is_the_inf_norm(self, x):
        H = vrep_to_hrep(BOX)
        rows = [(a, b) for a, b in zip(H.A, H.b)]
        assert gauge(BOX, x) == fin(gauge_by_facets(rows, x))

    @given(vec2, pos)
    def test_positive_homogeneity(self, x, t):
        gx = gauge(SIMPLEX_EDGE, x)
        gtx = gauge(SIMPLEX_EDGE, tuple(t * v for v in x))
        assert gtx == gx * t

    @given(vec2, vec2)
    def test_subadditivity(self, x, y):
        s = tuple(a + b for a, b in zip(x, y))
        assert gauge(SIMPLEX_EDGE, s) <= gauge(SIMPLEX_EDGE, x) + gauge(SIMPLEX_EDGE, y)


class TestDistance:
    def test_fixtures(self):
        box = HPolyhedron.box((0, 0), 1)
        assert distance(box, (2, 3), "2") == fin(5)
        assert distance(box, (0, 0), "inf") == fin(0)
        assert distance(AXIS, (0, -2), "inf") == fin(2)
        assert distance(HPolyhedron.empty(2), (0, 0), "inf") == PLUS_INF

    @given(vec2)
    def test_inf_distance_to_a_box(self, x):
        box = HPolyhedron.box((1, 0), F(1, 2))
        assert distance(box, x, "inf") == fin(box_distance_inf((1, 0), F(1, 2), x))

    @given(vec2)
    def test_one_norm_distance_to_a_box(self, x):
        box = HPolyhedron.box((0, 0), 1)
        expected = sum(max(F(0), abs(v) - 1) for v in x)
        assert distance(box, x, "1") == fin(expected)

    @given(vec2)
    def test_minimal_time_with_unit_ball_is_the_distance(self, x):
        omega = HPolyhedron.from_rows([[1, 2], [-1, 0]], [2, 1])
        assert minimal_time(BOX, omega, x) == distance(omega, x, "inf")


class TestMaps:
    def test_slices(self):
        assert set_equal(slice_map(ABOVE_DIAGONAL, (1,)), HPolyhedron.from_rows([[-1]], [-1]))
        assert slice_map(HALF_LINE, (-1,)).is_empty()
        assert set_equal(slice_map(HALF_LINE, (1,)), HPolyhedron.point((0,)))

    def test_domains(self):
        assert set_equal(dom_of_map(ABOVE_DIAGONAL), HPolyhedron.universe(1))
        assert set_equal(dom_of_map(HALF_LINE), HPolyhedron.from_rows([[-1]], [0]))
        assert set_equal(dom_of_map(BOX_GRAPH), HPolyhedron.box((0,), 1))

    def test_scalar_distance_fixtures(self):
        assert scalar_distance_D(ABOVE_DIAGONAL, (1,), (0,)) == fin(1)
        assert scalar_distance_D(ABOVE_DIAGONAL, (0,), (3,)) == fin(0)
        assert scalar_distance_D(HALF_LINE, (-1,), (0,)) == PLUS_INF

    @pytest.mark.parametrize("seed", range(15))
    def test_scalar_distance_is_distance_to_the_slice(self, seed):
        G, x, y = random_graph(seed)
        for shift in (0, 1, -1):
            yy = tuple(v + shift for v in y)
            assert scalar_distance_D(G, x, yy) == distance(slice_map(G, x), yy, "inf")


class TestMinimalTime:
    def test_fixtures(self):
        assert minimal_time(SEGMENT_UP, AXIS, (0, -2)) == fin(2)
        assert minimal_time(SEGMENT_UP, AXIS, (5, 0)) == fin(0)
        assert minimal_time(VPolytope.from_points([(1,)]), HPolyhedron.point((0,)), (1,)) == PLUS_INF

    def test_set_valued_fixtures(self):
        unit = VPolytope.from_points([(1,)])
        assert minimal_time_sv(unit, ABOVE_DIAGONAL, (2,), (0,)) == fin(2)
        assert minimal_time_sv(unit, ABOVE_DIAGONAL, (0,), (5,)) == fin(0)
        assert minimal_time_sv(unit, HALF_LINE, (-1,), (0,)) == PLUS_INF

    @given(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.integers(-3, 3),
           st.tuples(st.integers(-2, 2), st.integers(-2, 2)), vec2)
    def test_halfplane_target_with_a_single_velocity(self, a, beta, v, x):
        assume(any(a))
        omega = HPolyhedron.from_rows([a], [beta])
        T = minimal_time(VPolytope.from_points([v]), omega, x)
        ax = a[0] * x[0] + a[1] * x[1]
        av = a[0] * v[0] + a[1] * v[1]
        if ax <= beta:
            assert T == fin(0)
        elif av < 0:
            assert T == fin((beta - ax) / av)
        else:
            assert T == PLUS_INF

    @given(vec2)
    def test_zero_exactly_on_the_target(self, x):
        omega = HPolyhedron.from_rows([[1, 1], [-1, 0]], [1, 1])
        assert (minimal_time(SEGMENT_UP, omega, x) == fin(0)) == omega.contains(x)

    @given(vec2, vec2)
    def test_convexity_at_midpoints(self, x, y):
        omega = HPolyhedron.from_rows([[0, -1], [1, -1]], [0, 2])
        Tx, Ty = minimal_time(SIMPLEX_EDGE, omega, x), minimal_time(SIMPLEX_EDGE, omega, y)
        mid = tuple((a + b) / 2 for a, b in zip(x, y))
        assert minimal_time(SIMPLEX_EDGE, omega, mid) <= (Tx + Ty) * F(1, 2)


class TestGeneralizedProjection:
    def test_fixtures(self):
        G = GraphMap.constant(AXIS)
        assert set_equal(generalized_projection(SEGMENT_UP, G, (), (0, -2)), HPolyhedron.point((0, 0)))
        G = GraphMap.constant(HPolyhedron.from_rows([[-1, 0]], [-1]))
        seg = VPolytope.from_points([(0, 0), (1, 0)])
        assert set_equal(generalized_projection(seg, G, (), (0, 0)), HPolyhedron.point((1, 0)))

    def test_point_on_target_projects_to_itself(self):
        Pi = generalized_projection(SEGMENT_UP, GraphMap.constant(AXIS), (), (3, 0))
        assert Pi.contains((3, 0))

    def test_infinite_time_is_rejected(self):
        with pytest.raises(PreconditionError):
            generalized_projection(SEGMENT_UP, GraphMap.constant(AXIS), (), (0, 1))

    @given(vec2)
    def test_nonempty_when_time_is_finite(self, y):
        omega = HPolyhedron.from_rows([[0, -1], [1, -1]], [0, 2])
        G = GraphMap.constant(omega)
        T = minimal_time_sv(SIMPLEX_EDGE, G, (), y)
        assume(T.finite)
        Pi = generalized_projection(SIMPLEX_EDGE, G, (), y)
        assert not Pi.is_empty()
        assert all(omega.contains(z) for z in [Pi.feasible_point])


class TestScalarization:
    def test_fixtures(self):
        assert scalarization(V_CONE, (0, 1), (1, 0)) == fin(1)
        assert scalarization(HPolyhedron.universe(2), (1, 0), (3, 3)) == MINUS_INF
        assert scalarization(ORTHANT, (0, 1), (-1, 0)) == PLUS_INF

    def test_zero_direction_is_rejected(self):
        with pytest.raises(PreconditionError):
            scalarization(V_CONE, (0, 0), (1, 0))

    def test_hitting_point(self):
        hit, t = hitting_point(V_CONE, (0, 1), (1, 0))
        assert hit == (1, 1) and t == 1

    @given(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.integers(-3, 3),
           st.tuples(st.integers(-2, 2), st.integers(-2, 2)), vec2)
    def test_halfplane_closed_form(self, a, beta, d, x):
        assume(any(a) and any(d))
        omega = HPolyhedron.from_rows([a], [beta])
        expected = halfplane_scalarization(a, beta, d, x)
        got = scalarization(omega, d, x)
        if isinstance(expected, str):
            assert got.to_json() == expected
        else:
            assert got == fin(expected)

    @pytest.mark.parametrize("seed", range(25))
    def test_translation_identity(self, seed):
        omega, d, x, alpha = random_scalarization_case(seed)
        shifted = tuple(xi + alpha * di for xi, di in zip(x, d))
        lhs = scalarization(omega, d, shifted)
        rhs = scalarization(omega, d, x)
        assert lhs == (rhs if not rhs.finite else fin(rhs.value - alpha))


class TestValueFunctions:
    def test_max_affine_values(self):
        f = PLValueFunction.max_affine([[1], [-1]], [0, 0])
        assert f((F(-3, 2),)) == fin(F(3, 2))
        g = PLValueFunction.max_affine([[2]], [1], HPolyhedron.from_rows([[-1]], [0]))
        assert g((-1,)) == PLUS_INF and g((1,)) == fin(3)

    def test_epigraph_of_the_absolute_value(self):
        f = PLValueFunction.max_affine([[1], [-1]], [0, 0])
        epi = epigraph_map(f).graph
        assert set_equal(epi, HPolyhedron.from_rows([[1, -1], [-1, -1]], [0, 0]))

    def test_epigraph_of_the_simplex_gauge(self):
        from polylip.varfun import gauge_function

        epi = epigraph_map(gauge_function(SIMPLEX_EDGE)).graph
        expected = HPolyhedron.from_rows([[-1, 0, 0], [0, -1, 0], [1, 1, -1]], [0, 0, 0])
        assert set_equal(epi, expected)

    def test_epigraph_of_zero(self):
        f = PLValueFunction.max_affine([[0, 0]], [0])
        assert set_equal(epigraph_map(f).graph, HPolyhedron.from_rows([[0, 0, -1]], [0]))

    def test_unbounded_below_has_no_closed_epigraph(self):
        f = PLValueFunction.build([1], [[-1]], [0], [[1]])  # min x s.t. x >= -p ... value -p
        assert f((2,)) == fin(-2)
        g = PLValueFunction.build([1], [[0]], [0], [[1]])  # min x with no effective bound
        assert g((0,)) == MINUS_INF
        with pytest.raises(PreconditionError):
            epigraph_map(g)
