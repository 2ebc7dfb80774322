"""Immutable simple digraphs and the graph algebra every bound is built on.

Vertices are the integers ``0..n-1``. Constructions use fixed row-major
vertex orderings (product index ``u*|V(h)| + v``, blowup index ``v*k + i``)
so outputs are reproducible byte for byte. Optional labels are opaque
provenance strings (blowup coordinates, subset contents); they ride along
through constructions but are ignored by equality and never serialized.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .caps import DEFAULT_CAPS
from .errors import CapacityError, FormatError

VertexSet = frozenset  # vertex subsets are plain frozensets of ints


class Digraph:
    """Simple directed graph: no self-loops, no duplicate edges.

    All operations treat instances as immutable values; adjacency is kept in
    both directions so traversals are linear-time.
    """

    __slots__ = ("n", "edges", "labels", "_out", "_in")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        labels: Sequence[str] | None = None,
    ):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        edge_set: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            edge_set.add((u, v))
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("label count must match vertex count")
        self.n = n
        self.edges = frozenset(edge_set)
        self.labels = labels
        out: list[list[int]] = [[] for _ in range(n)]
        inn: list[list[int]] = [[] for _ in range(n)]
        for u, v in sorted(edge_set):
            out[u].append(v)
            inn[v].append(u)
        self._out = tuple(tuple(vs) for vs in out)
        self._in = tuple(tuple(us) for us in inn)

    def out_neighbors(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def edge_count(self) -> int:
        return len(self.edges)

    def is_acyclic(self) -> bool:
        indeg = [len(self._in[v]) for v in range(self.n)]
        queue = [v for v in range(self.n) if indeg[v] == 0]
        seen = 0
        while queue:
            v = queue.pop()
            seen += 1
            for w in self._out[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return seen == self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, edges={len(self.edges)})"


def strong_product(g: Digraph, h: Digraph) -> Digraph:
    """Product with an edge (u,v)->(u',v') iff each coordinate stays put or
    follows an edge of its factor. Vertex (u,v) has index ``u*h.n + v``."""
    n = g.n * h.n
    edges: list[tuple[int, int]] = []
    for u in range(g.n):
        u_next = (u,) + g.out_neighbors(u)
        for v in range(h.n):
            base = u * h.n + v
            v_next = (v,) + h.out_neighbors(v)
            for u2 in u_next:
                row = u2 * h.n
                for v2 in v_next:
                    if u2 == u and v2 == v:
                        continue
                    edges.append((base, row + v2))
    labels = tuple(
        f"({g.label(u)},{h.label(v)})" for u in range(g.n) for v in range(h.n)
    )
    return Digraph(n, edges, labels)


def complement(g: Digraph) -> Digraph:
    """Edge (u,v), u != v, present iff absent in g."""
    edges = [
        (u, v)
        for u in range(g.n)
        for v in range(g.n)
        if u != v and (u, v) not in g.edges
    ]
    return Digraph(g.n, edges, g.labels)


def blowup(g: Digraph, k: int) -> Digraph:
    """Replace each vertex by k unconnected copies and each edge by a
    directed biclique between the copy groups. Copy (v,i) has index ``v*k + i``."""
    if k < 1:
        raise ValueError("blowup factor must be >= 1")
    edges = [
        (u * k + i, v * k + j)
        for (u, v) in sorted(g.edges)
        for i in range(k)
        for j in range(k)
    ]
    labels = tuple(f"({g.label(v)},{i})" for v in range(g.n) for i in range(k))
    return Digraph(g.n * k, edges, labels)


def tensor_power(g: Digraph, q: int, vertex_cap: int = DEFAULT_CAPS.tensor_vertices) -> Digraph:
    """Strong product of g with itself q times; q=1 returns g unchanged."""
    if q < 1:
        raise ValueError("tensor power must be >= 1")
    if g.n**q > vertex_cap:
        raise CapacityError(
            f"tensor power would have {g.n ** q} vertices, cap is {vertex_cap}"
        )
    result = g
    for _ in range(q - 1):
        result = strong_product(result, g)
    return result


def _find_cycle(adj: dict) -> tuple | None:
    """One directed cycle of a dict-adjacency graph, deterministically, or
    None if acyclic. Nodes must be mutually comparable (all ints or all strs).

    Prunes nodes that cannot lie on a cycle, then walks minimal successors
    until a node repeats; the cycle is rotated to start at its smallest node.
    """
    live = {v: {w for w in ws if w in adj} for v, ws in adj.items()}
    changed = True
    while changed:
        changed = False
        dead = [v for v, ws in live.items() if not ws]
        indeg: dict = {v: 0 for v in live}
        for v, ws in live.items():
            for w in ws:
                indeg[w] += 1
        dead += [v for v in live if indeg[v] == 0 and v not in dead]
        if dead:
            changed = True
            for v in dead:
                live.pop(v, None)
            for ws in live.values():
                ws.difference_update(dead)
    if not live:
        return None
    walk = [min(live)]
    seen_at = {walk[0]: 0}
    while True:
        nxt = min(live[walk[-1]])
        if nxt in seen_at:
            cycle = tuple(walk[seen_at[nxt]:])
            pivot = cycle.index(min(cycle))
            return cycle[pivot:] + cycle[:pivot]
        seen_at[nxt] = len(walk)
        walk.append(nxt)


def _scc_with_root(g: Digraph, root: int) -> frozenset[int]:
    """Strongly connected component of `root` in the subgraph induced on
    vertices >= root."""
    fwd = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for w in g.out_neighbors(v):
            if w >= root and w not in fwd:
                fwd.add(w)
                stack.append(w)
    bwd = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for w in g.in_neighbors(v):
            if w >= root and w not in bwd and w in fwd:
                bwd.add(w)
                stack.append(w)
    return frozenset(bwd)


def enumerate_simple_cycles(g: Digraph, cap: int = DEFAULT_CAPS.cycles) -> list[tuple[int, ...]]:
    """All simple directed cycles, each once, in canonical rotation.

    Backtracking search with blocked sets, rooted at each vertex in turn and
    restricted to vertices at least as large as the root, so every cycle is
    reported exactly once starting from its smallest vertex. Deterministic
    output order. Raises CapacityError once more than `cap` cycles are found.
    """
    cycles: list[tuple[int, ...]] = []
    for root in range(g.n):
        comp = _scc_with_root(g, root)
        if len(comp) < 2:
            continue
        adj = {v: tuple(w for w in g.out_neighbors(v) if w in comp) for v in comp}
        blocked = {v: False for v in comp}
        blist: dict[int, set[int]] = {v: set() for v in comp}
        path: list[int] = []

        def unblock(v: int) -> None:
            blocked[v] = False
            while blist[v]:
                w = blist[v].pop()
                if blocked[w]:
                    unblock(w)

        def circuit(v: int) -> bool:
            found = False
            path.append(v)
            blocked[v] = True
            for w in adj[v]:
                if w == root:
                    if len(cycles) >= cap:
                        raise CapacityError(
                            f"cycle enumeration exceeded cap of {cap} cycles"
                        )
                    cycles.append(tuple(path))
                    found = True
                elif not blocked[w]:
                    if circuit(w):
                        found = True
            if found:
                unblock(v)
            else:
                for w in adj[v]:
                    blist[w].add(v)
            path.pop()
            return found

        circuit(root)
    return cycles


def verify_product_blowup_embedding(
    graphs: Sequence[Digraph],
    ks: Sequence[int],
    vertex_cap: int = DEFAULT_CAPS.tensor_vertices,
) -> tuple[bool, tuple[int, ...]]:
    """Check that the product of blowups embeds edge-wise into the blowup of
    the product under the coordinate bijection, and return that bijection.

    Builds A = product of blowup(g_i, k_i) and B = blowup(product of g_i,
    prod(k_i)), maps each A-vertex through the mixed-radix coordinate
    re-grouping, and reports whether every A-edge lands on a B-edge.
    """
    if not graphs or len(graphs) != len(ks):
        raise ValueError("need equally many graphs and blowup factors, at least one")
    if any(k < 1 for k in ks):
        raise ValueError("blowup factors must be >= 1")
    total = 1
    for g, k in zip(graphs, ks):
        total *= g.n * k
    if total > vertex_cap:
        raise CapacityError(f"product would have {total} vertices, cap is {vertex_cap}")

    blown = [blowup(g, k) for g, k in zip(graphs, ks)]
    g_alpha = blown[0]
    for b in blown[1:]:
        g_alpha = strong_product(g_alpha, b)
    prod = graphs[0]
    for g in graphs[1:]:
        prod = strong_product(prod, g)
    big_k = 1
    for k in ks:
        big_k *= k
    g_beta = blowup(prod, big_k)

    sizes = [(g.n, k) for g, k in zip(graphs, ks)]
    mapping = []
    for idx in range(g_alpha.n):
        rem = idx
        coords: list[tuple[int, int]] = []
        for n_i, k_i in reversed(sizes):
            rem, a = divmod(rem, n_i * k_i)
            coords.append(divmod(a, k_i))
        coords.reverse()
        w = 0
        j = 0
        for (n_i, k_i), (v_i, j_i) in zip(sizes, coords):
            w = w * n_i + v_i
            j = j * k_i + j_i
        mapping.append(w * big_k + j)

    ok = all((mapping[u], mapping[v]) in g_beta.edges for (u, v) in g_alpha.edges)
    return ok, tuple(mapping)


def parse_digraph(text: str) -> Digraph:
    """Parse the ".dg" text format.

    First meaningful line is ``digraph <n>``; each following line is
    ``e <u> <v>`` with 0-based endpoints. ``#`` starts a comment. Self-loop
    and duplicate edge lines are format errors.
    """
    n: int | None = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "digraph":
                raise FormatError(f"line {lineno}: expected 'digraph <n>' header")
            try:
                n = int(parts[1])
            except ValueError:
                raise FormatError(f"line {lineno}: vertex count is not an integer") from None
            if n < 0:
                raise FormatError(f"line {lineno}: vertex count must be non-negative")
            continue
        if len(parts) != 3 or parts[0] != "e":
            raise FormatError(f"line {lineno}: expected 'e <u> <v>'")
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            raise FormatError(f"line {lineno}: endpoints are not integers") from None
        if u == v:
            raise FormatError(f"line {lineno}: self-loop at {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"line {lineno}: endpoint out of range")
        if (u, v) in seen:
            raise FormatError(f"line {lineno}: duplicate edge ({u}, {v})")
        seen.add((u, v))
        edges.append((u, v))
    if n is None:
        raise FormatError("missing 'digraph <n>' header")
    return Digraph(n, edges)


def serialize_digraph(g: Digraph, header_comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in header_comments]
    lines.append(f"digraph {g.n}")
    lines.extend(f"e {u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"
