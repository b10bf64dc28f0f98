import pytest

from polylip.instances import (
    corpus,
    random_graph,
    random_minimal_time,
    random_pl_function,
    random_scalarization_case,
    support_gap_instance,
)
from polylip.varfun import minimal_time_sv


class TestGenerators:
    @pytest.mark.parametrize("seed", range(20))
    def test_graph_point_is_on_the_graph(self, seed):
        G, x, y = random_graph(seed)
        assert G.contains(x, y)
        assert all(-3 <= a <= 3 for row in G.graph.A for a in row)

    def test_seeds_are_deterministic(self):
        assert random_graph(7) == random_graph(7)
        assert random_pl_function(3) == random_pl_function(3)
        assert random_scalarization_case(11) == random_scalarization_case(11)

    @pytest.mark.parametrize("seed", range(10))
    def test_pl_point_is_in_the_domain(self, seed):
        f, x = random_pl_function(seed)
        assert f(x).finite

    @pytest.mark.parametrize("seed", range(10))
    def test_minimal_time_is_finite(self, seed):
        inst = random_minimal_time(seed)
        assert minimal_time_sv(inst.F, inst.G, inst.x, inst.y).finite


class TestCorpus:
    def test_size_and_kinds(self):
        insts = corpus()
        assert len(insts) >= 12
        assert {i.kind for i in insts} == {"gauge", "graph", "minimal_time", "scalarization", "function"}
        assert len({i.name for i in insts}) == len(insts)

    def test_support_gap_instance_is_off_target(self):
        inst = support_gap_instance()
        assert not inst.G.contains(inst.x, inst.y)
        assert minimal_time_sv(inst.F, inst.G, inst.x, inst.y).value == 1
