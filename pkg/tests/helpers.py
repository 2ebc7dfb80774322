"""Shared fixtures and independent oracles for the test suite.

Oracles deliberately avoid the library's own algorithms: independence and
acyclicity checks go through networkx or plain subset enumeration, GNS cuts
through the permutation definition, decodability through exhaustive message
simulation. Expected values in tests were computed by these oracles.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

import networkx as nx

from gnskit import Digraph, MUNetwork, build_network


def directed_cycle(n: int) -> Digraph:
    return Digraph(n, [(i, (i + 1) % n) for i in range(n)])


def symmetric_cycle(n: int) -> Digraph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    edges += [(v, u) for u, v in edges]
    return Digraph(n, edges)


def complete_digraph(n: int) -> Digraph:
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def to_nx(g: Digraph) -> nx.DiGraph:
    d = nx.DiGraph()
    d.add_nodes_from(range(g.n))
    d.add_edges_from(g.edges)
    return d


def oracle_alpha(g: Digraph) -> int:
    """Independence number via maximum clique of the undirected complement."""
    und = nx.Graph()
    und.add_nodes_from(range(g.n))
    und.add_edges_from((u, v) for u, v in g.edges)
    comp = nx.complement(und)
    best = 1 if g.n else 0
    for clique in nx.find_cliques(comp):
        best = max(best, len(clique))
    return best


def oracle_mais(g: Digraph) -> int:
    """Max acyclic induced set by subset enumeration (small n only)."""
    d = to_nx(g)
    for size in range(g.n, -1, -1):
        for sub in combinations(range(g.n), size):
            if nx.is_directed_acyclic_graph(d.subgraph(sub)):
                return size
    return 0


def oracle_cycles(g: Digraph) -> set[tuple[int, ...]]:
    """Canonical simple cycles via networkx."""
    out = set()
    for cyc in nx.simple_cycles(to_nx(g)):
        pivot = cyc.index(min(cyc))
        out.add(tuple(cyc[pivot:] + cyc[:pivot]))
    return out


def oracle_cycles_bruteforce(g: Digraph) -> set[tuple[int, ...]]:
    """Canonical simple cycles by scanning every vertex subset and every
    cyclic order on it (tiny n only)."""
    out = set()
    for size in range(2, g.n + 1):
        for sub in combinations(range(g.n), size):
            first, rest = sub[0], sub[1:]
            for perm in permutations(rest):
                order = (first,) + perm
                if all(
                    (order[i], order[(i + 1) % size]) in g.edges
                    for i in range(size)
                ):
                    out.add(order)
    return out


def network_paths_exist(net: MUNetwork, cut: frozenset[int], s: str, t: str) -> bool:
    d = nx.DiGraph()
    d.add_nodes_from(net.nodes)
    for e in net.links:
        if e.tail is not None and e.id not in cut:
            d.add_edge(e.tail, e.head)
    return nx.has_path(d, s, t)


def oracle_is_gns(net: MUNetwork, cut: frozenset[int]) -> bool:
    """Straight from the definition: some permutation forbids every path
    from a rank-greater-or-equal source to a destination."""
    k = net.k
    reach = [
        [network_paths_exist(net, cut, s, t) for (_, t) in net.pairs]
        for (s, _) in net.pairs
    ]
    for perm in permutations(range(1, k + 1)):
        if all(
            not reach[i][j]
            for i in range(k)
            for j in range(k)
            if perm[i] >= perm[j]
        ):
            return True
    return False


def oracle_min_gns_size(net: MUNetwork) -> int:
    cuttable = sorted(e.id for e in net.links if e.tail is not None)
    for size in range(len(cuttable) + 1):
        for combo in combinations(cuttable, size):
            if oracle_is_gns(net, frozenset(combo)):
                return size
    raise AssertionError("no GNS cut at all")


def oracle_mincut(net: MUNetwork, s: str, t: str) -> int:
    """Smallest regular-link set whose removal disconnects s from t."""
    regular = sorted(e.id for e in net.links if e.tail is not None)
    if not network_paths_exist(net, frozenset(), s, t):
        return 0
    for size in range(len(regular) + 1):
        for combo in combinations(regular, size):
            if not network_paths_exist(net, frozenset(combo), s, t):
                return size
    return len(regular)


def decode_simulation(g: Digraph, code) -> tuple[bool, int | None]:
    """Exhaustive decodability check: every user must be able to identify
    their message from transmissions plus side information, for all message
    assignments. Only usable when p ** (t*n) is small."""
    p, t, n = code.p, code.blowup_t, code.n
    width = t * n
    assignments = list(product(range(p), repeat=width))
    for user in range(n):
        side_cols = [
            j * t + s for j in g.out_neighbors(user) for s in range(t)
        ]
        own_cols = [user * t + s for s in range(t)]
        seen: dict[tuple, tuple] = {}
        for x in assignments:
            received = tuple(
                sum(c * xv for c, xv in zip(row, x)) % p for row in code.rows
            )
            key = (received, tuple(x[c] for c in side_cols))
            message = tuple(x[c] for c in own_cols)
            if key in seen and seen[key] != message:
                return False, user
            seen[key] = message
    return True, None


def gf_rank_oracle(rows: list[list[int]], p: int) -> int:
    """Test-side fraction-free rank over a prime field."""
    rows = [list(r) for r in rows]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for col in range(cols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [(v * inv) % p for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def oracle_minrank(g: Digraph, p: int) -> int:
    """Exhaustive minrank with the test-side rank routine."""
    edges = sorted(g.edges)
    best = g.n
    for values in product(range(p), repeat=len(edges)):
        mat = [[0] * g.n for _ in range(g.n)]
        for i in range(g.n):
            mat[i][i] = 1
        for val, (u, v) in zip(values, edges):
            mat[u][v] = val
        best = min(best, gf_rank_oracle(mat, p))
    return best


PARALLEL_LINKS = """network
node s
node t
link s t
link s t
pair s t
"""

SINGLE_PATH = """network
node s
node a
node t
link s a
link a t
pair s t
"""

DIAMOND = """network
node s
node a
node b
node t
link s a
link s b
link a t
link b t
pair s t
"""

TWO_DISJOINT = """network
node s1
node t1
node s2
node t2
link s1 t1
link s2 t2
pair s1 t1
pair s2 t2
"""


def crossed_unicasts() -> MUNetwork:
    """Two pairs with only cross links; own-pair mincuts are zero, so this
    network exists only programmatically."""
    return build_network(
        ["s1", "t1", "s2", "t2"],
        [("s1", "t2"), ("s2", "t1")],
        [("s1", "t1"), ("s2", "t2")],
    )
