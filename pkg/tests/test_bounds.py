"""Exact bound quantities, product/blowup identities, and the report."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from gnskit import (
    CapacityError,
    Digraph,
    blowup,
    bound_report,
    complement,
    parse_network,
    parse_report,
    serialize_report,
    strong_product,
)
from gnskit.bounds import (
    alpha_exact,
    mais_exact,
    min_fvs_exact,
    shannon_capacity_lb,
    tensor_bound,
)
from gnskit.cyclepack import rcp_exact

from helpers import (
    PARALLEL_LINKS,
    SINGLE_PATH,
    TWO_DISJOINT,
    directed_cycle,
    oracle_alpha,
    oracle_mais,
    symmetric_cycle,
)
from test_digraph import random_graphs


class TestMaisExact:
    def test_dag(self):
        g = Digraph(5, [(0, 1), (1, 2), (2, 3), (0, 4)])
        assert mais_exact(g) == (5, frozenset(range(5)))

    def test_three_cycle(self):
        size, cert = mais_exact(directed_cycle(3))
        assert size == 2
        assert cert == frozenset({0, 1})  # lexicographically smallest

    def test_bidirected_k22(self):
        g, _ = __import__("gnskit").to_index_graph(parse_network(PARALLEL_LINKS))
        assert oracle_mais(g) == 2
        assert mais_exact(g)[0] == 2

    def test_certificate_induces_acyclic(self):
        g = Digraph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (1, 4)])
        size, cert = mais_exact(g)
        assert len(cert) == size == oracle_mais(g)

    def test_cap(self):
        with pytest.raises(CapacityError):
            mais_exact(Digraph(23), vertex_cap=22)

    @settings(max_examples=50, deadline=None)
    @given(random_graphs(max_n=6))
    def test_matches_subset_oracle(self, g):
        assert mais_exact(g)[0] == oracle_mais(g)


class TestAlphaExact:
    def test_empty_graph(self):
        assert alpha_exact(Digraph(6)) == (6, frozenset(range(6)))

    def test_c5(self):
        size, cert = alpha_exact(symmetric_cycle(5))
        assert size == 2
        assert cert == frozenset({0, 2})

    def test_c5_square(self):
        p = strong_product(symmetric_cycle(5), symmetric_cycle(5))
        assert alpha_exact(p)[0] == 5 == oracle_alpha(p)

    @settings(max_examples=50, deadline=None)
    @given(random_graphs(max_n=6))
    def test_matches_clique_oracle(self, g):
        size, cert = alpha_exact(g)
        assert size == oracle_alpha(g)
        assert all(
            (u, v) not in g.edges for u in cert for v in cert if u != v
        )


class TestMinFvsExact:
    def test_dag_empty(self):
        assert min_fvs_exact(Digraph(4, [(0, 1), (2, 3)])) == frozenset()

    def test_three_cycle_smallest_index(self):
        assert min_fvs_exact(directed_cycle(3)) == frozenset({0})

    def test_two_disjoint_two_cycles(self):
        g = Digraph(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
        fvs = min_fvs_exact(g)
        assert len(fvs) == 2
        assert fvs == frozenset({0, 2})

    @settings(max_examples=40, deadline=None)
    @given(random_graphs(max_n=6))
    def test_complementarity_and_validity(self, g):
        fvs = min_fvs_exact(g)
        assert len(fvs) == g.n - oracle_mais(g)
        rest = [v for v in range(g.n) if v not in fvs]
        sub = Digraph(
            len(rest),
            [
                (rest.index(u), rest.index(v))
                for (u, v) in g.edges
                if u in rest and v in rest
            ],
        )
        assert sub.is_acyclic()


class TestTensorBound:
    def test_q1_equals_gap(self):
        g = directed_cycle(3)
        tb = tensor_bound(g, 1, 3)
        assert tb == (1, 2, 1.0)

    def test_three_cycle_squared(self):
        tb = tensor_bound(directed_cycle(3), 2, 3, vertex_cap=25)
        assert tb.radicand == 4
        assert tb.value == 3 - 2.0  # 4 ** (1/2) is exactly 2

    def test_dag_all_powers(self):
        g = Digraph(3, [(0, 1), (1, 2)])
        for q in (1, 2):
            tb = tensor_bound(g, q, 5, vertex_cap=30)
            assert tb.radicand == 3**q
            assert tb.value == pytest.approx(5 - 3)


class TestShannonLowerBound:
    def test_empty_graph(self):
        for power in (1, 2):
            sb = shannon_capacity_lb(Digraph(3), power, vertex_cap=30)
            assert sb.value == pytest.approx(3)

    def test_power_one_is_alpha(self):
        sb = shannon_capacity_lb(symmetric_cycle(5), 1)
        assert sb == (1, 2, 2.0)

    def test_c5_power_two(self):
        sb = shannon_capacity_lb(symmetric_cycle(5), 2)
        assert sb.radicand == 5
        assert sb.value == pytest.approx(math.sqrt(5))


class TestProductBlowupIdentities:
    @settings(max_examples=40, deadline=None)
    @given(random_graphs(max_n=4), random_graphs(max_n=4))
    def test_mais_supermultiplicative(self, g, h):
        assert (
            mais_exact(strong_product(g, h), vertex_cap=16)[0]
            >= mais_exact(g)[0] * mais_exact(h)[0]
        )

    @settings(max_examples=40, deadline=None)
    @given(random_graphs(max_n=5), st.integers(1, 3))
    def test_blowup_scaling(self, g, k):
        b = blowup(g, k)
        assert alpha_exact(b)[0] == k * alpha_exact(g)[0]
        assert mais_exact(b, vertex_cap=15)[0] == k * mais_exact(g)[0]

    @settings(max_examples=40, deadline=None)
    @given(random_graphs(max_n=5))
    def test_alpha_le_mais_le_n(self, g):
        a = alpha_exact(g)[0]
        m = mais_exact(g)[0]
        assert a <= m <= g.n

    @settings(max_examples=25, deadline=None)
    @given(random_graphs(max_n=5))
    def test_diagonal_independent_in_complement_product(self, g):
        p = strong_product(g, complement(g))
        assert alpha_exact(p)[0] >= g.n


class TestBoundReport:
    def test_parallel_links_chain(self):
        report = bound_report(parse_network(PARALLEL_LINKS), exact_gns=True)
        assert (report.m, report.mais_value) == (4, 2)
        assert report.rcp_value == 2
        assert report.approx_weight == 2
        assert len(report.gns_exact.cut) == 2
        assert report.code_rate == 2
        assert report.co_rate_lb == 2
        assert report.skipped == ()

    def test_two_disjoint_unicasts(self):
        report = bound_report(parse_network(TWO_DISJOINT))
        assert (report.m, report.mais_value, report.rcp_value) == (4, 2, 2)

    def test_single_pair_collapses_to_mincut(self):
        report = bound_report(parse_network(SINGLE_PATH), exact_gns=True)
        assert report.m - report.mais_value == 1
        assert report.rcp_value == 1
        assert len(report.gns_exact.cut) == 1

    def test_tensor_and_shannon_fields(self):
        report = bound_report(
            parse_network(SINGLE_PATH), qs=(1, 2), shannon_powers=(1,)
        )
        assert [tb.q for tb in report.tensor_bounds] == [1, 2]
        assert len(report.shannon_lb) == 1

    def test_round_trip(self):
        for kwargs in (
            dict(exact_gns=True, qs=(1, 2), shannon_powers=(1, 2)),
            dict(),
        ):
            report = bound_report(parse_network(PARALLEL_LINKS), **kwargs)
            assert parse_report(serialize_report(report)) == report

    def test_skips_oversized_components(self):
        from gnskit.caps import Caps

        tight = Caps(mais_vertices=2, rcp_cycles=20000)
        report = bound_report(parse_network(PARALLEL_LINKS), caps=tight)
        assert report.mais_value is None
        assert "mais" in report.skipped
        assert parse_report(serialize_report(report)) == report

    @pytest.mark.parametrize(
        "text",
        [
            "m: 4\nk: 1\n",  # missing header
            "boundreport\nmais 2\n",  # missing separator
            "boundreport\nm: 4\nk: 1\npacking:\n  weightless: 1\n",
        ],
    )
    def test_parse_report_rejects_malformed(self, text):
        from gnskit import FormatError

        with pytest.raises(FormatError):
            parse_report(text)


class TestWeakDuality:
    @settings(max_examples=25, deadline=None)
    @given(random_graphs(max_n=6))
    def test_rcp_below_fvs(self, g):
        packing = rcp_exact(g)
        assert packing.value <= g.n - mais_exact(g)[0]


class TestCertificateTieBreaking:
    """Certificates are the lexicographically smallest optimal sets; checked
    against first-hit subset scans in combination order."""

    @staticmethod
    def _induced_acyclic(g, sub):
        import networkx as nx

        d = nx.DiGraph()
        d.add_nodes_from(sub)
        d.add_edges_from((u, v) for (u, v) in g.edges if u in sub and v in sub)
        return nx.is_directed_acyclic_graph(d)

    @settings(max_examples=30, deadline=None)
    @given(random_graphs(max_n=6))
    def test_mais_certificate_is_lex_smallest(self, g):
        from itertools import combinations

        size, cert = mais_exact(g)
        first = next(
            sub
            for sub in combinations(range(g.n), size)
            if self._induced_acyclic(g, set(sub))
        )
        assert tuple(sorted(cert)) == first

    @settings(max_examples=30, deadline=None)
    @given(random_graphs(max_n=6))
    def test_fvs_certificate_is_lex_smallest(self, g):
        from itertools import combinations

        fvs = min_fvs_exact(g)
        first = next(
            sub
            for sub in combinations(range(g.n), len(fvs))
            if self._induced_acyclic(g, set(range(g.n)) - set(sub))
        )
        assert tuple(sorted(fvs)) == first

    @settings(max_examples=30, deadline=None)
    @given(random_graphs(max_n=6))
    def test_alpha_certificate_is_lex_smallest(self, g):
        from itertools import combinations

        size, cert = alpha_exact(g)
        und = {frozenset(e) for e in g.edges}
        first = next(
            sub
            for sub in combinations(range(g.n), size)
            if all(frozenset((u, v)) not in und for u in sub for v in sub if u < v)
        )
        assert tuple(sorted(cert)) == first
