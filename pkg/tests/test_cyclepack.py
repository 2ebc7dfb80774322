"""Exact packing LP, spreading-metric dual, and the region-growing FES."""

import math
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings

from gnskit import (
    CapacityError,
    ContractViolation,
    Digraph,
    closure_links,
    fes_to_fvs,
    parse_network,
    rcp_exact,
    solve_spreading_metric,
    subset_fes_approx,
    to_index_graph,
)
from gnskit.bounds import mais_exact, min_fvs_exact
from gnskit.cyclepack import (
    CyclePacking,
    _greedy_fes,
    validate_packing,
    vertex_split_links,
)
from helpers import (
    PARALLEL_LINKS,
    SINGLE_PATH,
    TWO_DISJOINT,
    directed_cycle,
)
from test_digraph import random_graphs


class TestRcpExact:
    def test_dag_is_zero(self):
        g = Digraph(4, [(0, 1), (1, 2)])
        packing = rcp_exact(g)
        assert packing.value == 0 and packing.assignments == ()

    def test_two_disjoint_triangles(self):
        g = Digraph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
        packing = rcp_exact(g)
        assert packing.value == 2
        assert dict(packing.assignments) == {
            (0, 1, 2): Fraction(1),
            (3, 4, 5): Fraction(1),
        }

    def test_two_triangles_sharing_a_vertex(self):
        g = Digraph(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
        packing = rcp_exact(g)
        # vertex 0 lies on both cycles: its unit budget caps the total, and
        # weight (1, 0) or any convex split attains it
        assert packing.value == 1

    def test_fractional_optimum(self):
        # three pairwise-overlapping two-cycles on a triangle: optimum 3/2
        g = Digraph(3, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)])
        packing = rcp_exact(g)
        assert packing.value == Fraction(3, 2)
        validate_packing(g, packing)

    def test_cycle_cap(self):
        g = Digraph(3, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)])
        with pytest.raises(CapacityError, match="approximation"):
            rcp_exact(g, cycle_cap=2)

    @settings(max_examples=30, deadline=None)
    @given(random_graphs(max_n=6))
    def test_packings_validate_and_respect_duality(self, g):
        packing = rcp_exact(g)
        validate_packing(g, packing)
        assert packing.value <= g.n - mais_exact(g)[0]


class TestValidatePacking:
    def test_overload_rejected(self):
        g = directed_cycle(3)
        bad = CyclePacking(assignments=(((0, 1, 2), Fraction(2)),), value=Fraction(2))
        with pytest.raises(ContractViolation, match="overloaded"):
            validate_packing(g, bad)

    def test_missing_edge_rejected(self):
        g = directed_cycle(3)
        bad = CyclePacking(assignments=(((0, 2, 1), Fraction(1)),), value=Fraction(1))
        with pytest.raises(ContractViolation, match="missing edge"):
            validate_packing(g, bad)


class TestSpreadingMetric:
    def test_acyclic_closure(self):
        net = parse_network(TWO_DISJOINT)
        links = [e for e in net.regular_links()]
        metric = solve_spreading_metric(links, [s for s, _ in net.pairs])
        assert metric.objective == 0

    def test_single_two_cycle(self):
        net = parse_network("network\nnode s\nnode t\nlink s t\npair s t\n")
        metric = solve_spreading_metric(closure_links(net), ["s"])
        assert metric.objective == 1

    def test_parallel_links_objective_two(self):
        net = parse_network(PARALLEL_LINKS)
        metric = solve_spreading_metric(closure_links(net), ["s"])
        assert metric.objective == 2

    def test_equals_rcp_of_line_graph_on_networks(self):
        import itertools

        from gnskit.instances import random_dag_network

        count = 0
        for seed in itertools.count(1):
            if count == 10:
                break
            try:
                net = random_dag_network(6, 6, 1 + seed % 3, seed=seed)
            except ValueError:
                continue
            count += 1
            g, _ = to_index_graph(net)
            metric = solve_spreading_metric(
                closure_links(net), [s for s, _ in net.pairs]
            )
            assert metric.objective == rcp_exact(g).value

    @settings(max_examples=25, deadline=None)
    @given(random_graphs(max_n=7))
    def test_strong_duality_via_vertex_split(self, g):
        links, terminals = vertex_split_links(g)
        metric = solve_spreading_metric(links, terminals)
        assert metric.objective == rcp_exact(g).value

    def test_iteration_cap(self):
        net = parse_network(PARALLEL_LINKS)
        with pytest.raises(CapacityError, match="converge"):
            solve_spreading_metric(closure_links(net), ["s"], iteration_cap=0)

    def test_every_cycle_covered_at_convergence(self):
        net = parse_network(PARALLEL_LINKS)
        metric = solve_spreading_metric(closure_links(net), ["s"])
        lengths = metric.as_dict()
        d = nx.DiGraph()
        for e in closure_links(net):
            d.add_edge(e.tail, e.head, ids=[])
        for cyc in nx.simple_cycles(d):
            pairs = list(zip(cyc, cyc[1:] + cyc[:1]))
            total = Fraction(0)
            for a, b in pairs:
                ids = [e.id for e in closure_links(net) if (e.tail, e.head) == (a, b)]
                total += lengths[ids[0]]
            assert total >= 1


class TestSubsetFesApprox:
    def test_acyclic_closure_empty(self):
        # zero-mincut pairs get no source links, so the closure stays acyclic
        from helpers import crossed_unicasts

        result = subset_fes_approx(crossed_unicasts())
        assert result.fes == frozenset()
        assert result.diagnostics.objective == 0
        assert result.diagnostics.ratio == 1.0

    def test_single_path_cuts_one(self):
        result = subset_fes_approx(parse_network(SINGLE_PATH))
        assert len(result.fes) == 1

    def test_parallel_links_cut_two_ratio_one(self):
        result = subset_fes_approx(parse_network(PARALLEL_LINKS))
        assert len(result.fes) == 2
        assert result.diagnostics.ratio == 1.0
        assert not result.diagnostics.fallback_used

    def test_output_is_verified_fes(self):
        import itertools

        from gnskit.instances import random_dag_network

        count = 0
        for seed in itertools.count(100):
            if count == 15:
                break
            try:
                net = random_dag_network(6, 7, 1 + seed % 3, seed=seed)
            except ValueError:
                continue
            count += 1
            result = subset_fes_approx(net)
            d = nx.DiGraph()
            for e in closure_links(net):
                if e.id not in result.fes:
                    d.add_edge(e.tail, e.head)
            assert nx.is_directed_acyclic_graph(d)
            # parallel links are cut all or none
            groups: dict[tuple[str, str], list[int]] = {}
            for e in closure_links(net):
                groups.setdefault((e.tail, e.head), []).append(e.id)
            for ids in groups.values():
                hit = sum(1 for i in ids if i in result.fes)
                assert hit in (0, len(ids))

    def test_regression_ratio_bound(self):
        import itertools

        from gnskit.instances import random_dag_network

        count = 0
        for seed in itertools.count(500):
            if count == 15:
                break
            try:
                net = random_dag_network(6, 6, 1 + seed % 3, seed=seed)
            except ValueError:
                continue
            count += 1
            g, _ = to_index_graph(net)
            rcp = rcp_exact(g).value
            weight = subset_fes_approx(net).diagnostics.weight
            if rcp == 0:
                assert weight == 0
            else:
                assert weight <= 8 * math.log(net.k + 1) ** 2 * rcp


class TestGreedyFallback:
    def test_clears_all_cycles(self):
        active = {
            ("a", "b"): [0],
            ("b", "a"): [1],
            ("b", "c"): [2],
            ("c", "a"): [3],
        }
        removed = _greedy_fes(active, cycle_cap=100)
        survivors = {k: v for k, v in active.items() if k not in removed}
        d = nx.DiGraph(list(survivors))
        assert nx.is_directed_acyclic_graph(d)


class TestFesToFvs:
    def test_empty_on_acyclic(self):
        # single cross-link network: closure has cycles only through pairs
        net = parse_network(SINGLE_PATH)
        result = subset_fes_approx(net)
        fvs = fes_to_fvs(net, result.fes)
        assert len(fvs) == 1

    def test_two_cycle_instance(self):
        net = parse_network("network\nnode s\nnode t\nlink s t\npair s t\n")
        fvs = fes_to_fvs(net, {0})
        assert fvs == frozenset({0})

    def test_parallel_links_matches_min_fvs(self):
        net = parse_network(PARALLEL_LINKS)
        g, _ = to_index_graph(net)
        result = subset_fes_approx(net)
        fvs = fes_to_fvs(net, result.fes)
        assert len(fvs) == len(min_fvs_exact(g)) == 4 - mais_exact(g)[0]

    def test_rejects_non_fes(self):
        net = parse_network(PARALLEL_LINKS)
        with pytest.raises(ContractViolation, match="not a feedback edge set"):
            fes_to_fvs(net, set())

    def test_empty_on_acyclic_closure(self):
        from helpers import crossed_unicasts

        assert fes_to_fvs(crossed_unicasts(), set()) == frozenset()


class TestWeakDualityAgainstApproxFvs:
    @settings(max_examples=15, deadline=None)
    @given(random_graphs(max_n=5))
    def test_rcp_below_any_fvs(self, g):
        # every feedback vertex set produced anywhere weighs at least rcp
        packing = rcp_exact(g)
        fvs = min_fvs_exact(g)
        assert packing.value <= len(fvs)
