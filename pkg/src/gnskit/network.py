"""Multiple-unicasts networks with unit-capacity links.

Covers the ".mun" text format, unit-capacity max-flow mincuts, the cyclic
closure (destinations feeding back into their sources' tail-less links) and
its reversed line graph, the staging transform that turns source links into
cuttable regular links, and exact GNS cut search with a polynomial-time
certificate checker.

Link ids are dense integers: regular links first in declaration order, then
synthesized source links grouped by pair. The staging transform preserves
every original link's id, so feedback-vertex-set certificates on the line
graph translate to cut link ids without any renumbering.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .caps import DEFAULT_CAPS
from .digraph import Digraph, _find_cycle
from .errors import CapacityError, ContractViolation, FormatError


@dataclass(frozen=True)
class Link:
    id: int
    tail: str | None  # None marks a tail-less source link
    head: str


@dataclass(frozen=True)
class MUNetwork:
    nodes: tuple[str, ...]
    links: tuple[Link, ...]
    pairs: tuple[tuple[str, str], ...]
    source_links: tuple[tuple[int, ...], ...]  # per pair, ids of its source links

    def __post_init__(self):
        for i, link in enumerate(self.links):
            if link.id != i:
                raise ValueError("link ids must be dense and in order")
        if len(self.pairs) != len(self.source_links):
            raise ValueError("one source-link group per pair required")

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def m(self) -> int:
        return len(self.links)

    def regular_links(self) -> tuple[Link, ...]:
        return tuple(e for e in self.links if e.tail is not None)


@dataclass(frozen=True)
class GnsCertificate:
    """A verified GNS cut: `permutation[i]` is the rank (1..k) assigned to
    pair i; every surviving source-to-destination path goes from a lower
    rank to a strictly higher one."""

    cut: frozenset[int]
    permutation: tuple[int, ...]


@dataclass(frozen=True)
class GnsRefusal:
    """Witness that a cut is not a GNS cut: a sequence of pair indices whose
    source-to-destination paths close a cycle (length 1 means a direct
    path from a pair's own source to its destination survives)."""

    cut: frozenset[int]
    witness: tuple[int, ...]


@dataclass(frozen=True)
class LinkGraphMap:
    """Bidirectional correspondence between link ids and line-graph vertices."""

    id_to_vertex: tuple[int, ...]
    vertex_to_id: tuple[int, ...]


def _check_name(name: str) -> str:
    if not name or "#" in name or any(c.isspace() for c in name):
        raise FormatError(f"bad node name {name!r}")
    return name


def _unit_maxflow(links: Sequence[Link], nodes: Sequence[str], s: str, t: str) -> int:
    """Max-flow value with unit capacity per link, BFS augmenting paths in
    link-id order."""
    index = {x: i for i, x in enumerate(nodes)}
    out: list[list[tuple[int, int]]] = [[] for _ in nodes]
    inn: list[list[tuple[int, int]]] = [[] for _ in nodes]
    for e in links:
        if e.tail is None:
            continue
        out[index[e.tail]].append((e.id, index[e.head]))
        inn[index[e.head]].append((e.id, index[e.tail]))
    si, ti = index[s], index[t]
    flow: dict[int, bool] = {e.id: False for e in links if e.tail is not None}
    value = 0
    while True:
        parent: dict[int, tuple[int, int, bool]] = {}  # node -> (prev, link, forward)
        queue = [si]
        seen = {si}
        found = False
        while queue and not found:
            u = queue.pop(0)
            for eid, v in out[u]:
                if not flow[eid] and v not in seen:
                    seen.add(v)
                    parent[v] = (u, eid, True)
                    if v == ti:
                        found = True
                        break
                    queue.append(v)
            if found:
                break
            for eid, v in inn[u]:
                if flow[eid] and v not in seen:
                    seen.add(v)
                    parent[v] = (u, eid, False)
                    if v == ti:
                        found = True
                        break
                    queue.append(v)
        if not found:
            return value
        v = ti
        while v != si:
            u, eid, forward = parent[v]
            flow[eid] = forward
            v = u
        value += 1


def build_network(
    nodes: Sequence[str],
    regular_links: Sequence[tuple[str, str]],
    pairs: Sequence[tuple[str, str]],
    require_reachable: bool = False,
) -> MUNetwork:
    """Validate and assemble a network; source links are always synthesized,
    one per unit of mincut between each pair, never user-specified."""
    node_list = [_check_name(x) for x in nodes]
    if len(set(node_list)) != len(node_list):
        raise FormatError("duplicate node name")
    node_set = set(node_list)
    for tail, head in regular_links:
        if tail not in node_set or head not in node_set:
            raise FormatError(f"link references unknown node: {tail} -> {head}")
        if tail == head:
            raise FormatError(f"link from {tail} to itself")
    # acyclicity of the regular-link digraph
    indeg = {x: 0 for x in node_list}
    out_nodes: dict[str, list[str]] = {x: [] for x in node_list}
    for tail, head in regular_links:
        out_nodes[tail].append(head)
        indeg[head] += 1
    queue = [x for x in node_list if indeg[x] == 0]
    visited = 0
    while queue:
        x = queue.pop()
        visited += 1
        for y in out_nodes[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    if visited != len(node_list):
        raise FormatError("regular links form a directed cycle")

    sources_seen: set[str] = set()
    dests_seen: set[str] = set()
    for s, t in pairs:
        if s not in node_set or t not in node_set:
            raise FormatError(f"pair references unknown node: {s} -> {t}")
        if s == t:
            raise FormatError(f"pair with identical source and destination {s}")
        if s in sources_seen:
            raise FormatError(f"duplicate source node {s}")
        if t in dests_seen:
            raise FormatError(f"duplicate destination node {t}")
        sources_seen.add(s)
        dests_seen.add(t)

    links = [Link(i, tail, head) for i, (tail, head) in enumerate(regular_links)]
    cuts = []
    for s, t in pairs:
        c = _unit_maxflow(links, node_list, s, t)
        if c == 0 and require_reachable:
            raise FormatError(f"pair {s} -> {t} is unreachable (mincut 0)")
        cuts.append(c)
    source_groups: list[tuple[int, ...]] = []
    next_id = len(links)
    for (s, t), c in zip(pairs, cuts):
        group = []
        for _ in range(c):
            links.append(Link(next_id, None, s))
            group.append(next_id)
            next_id += 1
        source_groups.append(tuple(group))
    return MUNetwork(tuple(node_list), tuple(links), tuple(pairs), tuple(source_groups))


def parse_network(text: str) -> MUNetwork:
    """Parse the ".mun" text format.

    A ``network`` header line, then ``node <name>``, ``link <tail> <head>``
    (repeat the line for parallel unit links) and ``pair <s> <t>`` lines in
    any order; ``#`` starts a comment. Link ids follow file order; source
    links are synthesized afterwards, grouped by pair. Rejected inputs
    include cyclic regular links, unknown node names, pairs with identical
    endpoints and unreachable pairs.
    """
    nodes: list[str] = []
    links: list[tuple[str, str]] = []
    pairs: list[tuple[str, str]] = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not saw_header:
            if parts != ["network"]:
                raise FormatError(f"line {lineno}: expected 'network' header")
            saw_header = True
            continue
        if parts[0] == "node" and len(parts) == 2:
            nodes.append(parts[1])
        elif parts[0] == "link" and len(parts) == 3:
            links.append((parts[1], parts[2]))
        elif parts[0] == "pair" and len(parts) == 3:
            pairs.append((parts[1], parts[2]))
        else:
            raise FormatError(f"line {lineno}: unrecognized line {line!r}")
    if not saw_header:
        raise FormatError("missing 'network' header")
    return build_network(nodes, links, pairs, require_reachable=True)


def serialize_network(net: MUNetwork, header_comments: Sequence[str] = ()) -> str:
    """Inverse of parse_network for any network whose pairs are reachable
    (source links are a function of the rest and are not written out)."""
    lines = [f"# {c}" for c in header_comments]
    lines.append("network")
    lines.extend(f"node {x}" for x in net.nodes)
    lines.extend(f"link {e.tail} {e.head}" for e in net.links if e.tail is not None)
    lines.extend(f"pair {s} {t}" for s, t in net.pairs)
    return "\n".join(lines) + "\n"


def mincut(net: MUNetwork, s: str, t: str) -> int:
    """Unit-capacity max-flow value from s to t over the regular links."""
    if s not in net.nodes or t not in net.nodes:
        raise ValueError(f"unknown node in mincut query: {s}, {t}")
    if s == t:
        raise ValueError("mincut endpoints must differ")
    return _unit_maxflow(net.links, net.nodes, s, t)


def closure_links(net: MUNetwork) -> tuple[Link, ...]:
    """The cyclic closure: every source link gets its pair's destination as
    tail, so delivered information feeds back and every residual cycle
    passes through a source node."""
    dest_of: dict[int, str] = {}
    for (s, t), group in zip(net.pairs, net.source_links):
        for eid in group:
            dest_of[eid] = t
    return tuple(
        Link(e.id, dest_of[e.id], e.head) if e.id in dest_of else e for e in net.links
    )


def to_index_graph(net: MUNetwork) -> tuple[Digraph, LinkGraphMap]:
    """The reversed line graph of the closure: one vertex per link, with an
    edge v -> w whenever link v's head is link w's closure tail. This is the
    side-information graph of the dual index-coding instance."""
    closed = closure_links(net)
    by_tail: dict[str, list[int]] = {}
    for w, e in enumerate(closed):
        by_tail.setdefault(e.tail, []).append(w)
    edges = []
    for v, e in enumerate(closed):
        for w in by_tail.get(e.head, ()):
            edges.append((v, w))
    labels = tuple(f"{e.id}:{e.tail}->{e.head}" for e in closed)
    g = Digraph(len(closed), edges, labels)
    ids = tuple(e.id for e in closed)
    return g, LinkGraphMap(id_to_vertex=ids, vertex_to_id=ids)


def tilde_transform(net: MUNetwork) -> MUNetwork:
    """Reroute each pair's source links behind a fresh staging node so they
    become regular (cuttable) links; fresh tail-less links of the same
    multiplicity feed the staging nodes, and pairs restart from them.

    Original link ids are preserved; only the new source links get new ids.
    """
    taken = set(net.nodes)
    stage_names: list[str] = []
    for i in range(net.k):
        name = f"~s{i + 1}"
        while name in taken:
            name = "~" + name
        taken.add(name)
        stage_names.append(name)

    links = [e for e in net.links if e.tail is not None]
    for i, (s, t) in enumerate(net.pairs):
        for eid in net.source_links[i]:
            links.append(Link(eid, stage_names[i], s))
    links.sort(key=lambda e: e.id)
    next_id = len(links)
    groups: list[tuple[int, ...]] = []
    for i in range(net.k):
        group = []
        for _ in net.source_links[i]:
            links.append(Link(next_id, None, stage_names[i]))
            group.append(next_id)
            next_id += 1
        groups.append(tuple(group))
    pairs = tuple((stage_names[i], t) for i, (s, t) in enumerate(net.pairs))
    result = MUNetwork(
        net.nodes + tuple(stage_names), tuple(links), pairs, tuple(groups)
    )
    for i, (s, t) in enumerate(result.pairs):
        if len(result.source_links[i]) != _unit_maxflow(result.links, result.nodes, s, t):
            raise ContractViolation("staging transform changed a pair's mincut")
    return result


def _adjacency(net: MUNetwork) -> tuple[dict[str, int], list[list[tuple[int, int]]]]:
    index = {x: i for i, x in enumerate(net.nodes)}
    out: list[list[tuple[int, int]]] = [[] for _ in net.nodes]
    for e in net.links:
        if e.tail is not None:
            out[index[e.tail]].append((e.id, index[e.head]))
    return index, out


def _reachable(
    out: list[list[tuple[int, int]]], start: int, cut: frozenset[int] | set[int]
) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for eid, v in out[u]:
            if eid not in cut and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _gns_verdict(
    out: list[list[tuple[int, int]]],
    pair_idx: list[tuple[int, int]],
    cut: frozenset[int] | set[int],
) -> tuple[tuple[int, ...] | None, tuple[int, ...] | None]:
    """Returns (permutation, None) when the cut works, else (None, witness).

    Builds the k-vertex pair digraph with an edge i -> j whenever a path
    survives from pair i's source to pair j's destination; the cut is a GNS
    cut exactly when that digraph is loop-free and acyclic, and any
    topological numbering is a valid permutation.
    """
    k = len(pair_idx)
    reach = [_reachable(out, si, cut) for si, _ in pair_idx]
    for i in range(k):
        if pair_idx[i][1] in reach[i]:
            return None, (i,)
    succ: list[list[int]] = [[] for _ in range(k)]
    indeg = [0] * k
    for i in range(k):
        for j in range(k):
            if i != j and pair_idx[j][1] in reach[i]:
                succ[i].append(j)
                indeg[j] += 1
    order: list[int] = []
    heap = [i for i in range(k) if indeg[i] == 0]
    heapq.heapify(heap)
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, j)
    if len(order) < k:
        live = set(range(k)) - set(order)
        cycle = _find_cycle({i: [j for j in succ[i] if j in live] for i in live})
        return None, cycle
    perm = [0] * k
    for rank, i in enumerate(order, start=1):
        perm[i] = rank
    return tuple(perm), None


def is_gns_cut(net: MUNetwork, cut: Iterable[int]) -> GnsCertificate | GnsRefusal:
    """Polynomial-time check of the GNS cut property for a set of link ids.

    Source links (tail-less) are not cuttable and are rejected; the staging
    transform is the way to expose them to cuts.
    """
    cutset = frozenset(cut)
    known = {e.id for e in net.links}
    unknown = cutset - known
    if unknown:
        raise ValueError(f"unknown link ids: {sorted(unknown)}")
    for eid in sorted(cutset):
        if net.links[eid].tail is None:
            raise ValueError(f"link {eid} is a source link and cannot be cut")
    index, out = _adjacency(net)
    pair_idx = [(index[s], index[t]) for s, t in net.pairs]
    perm, witness = _gns_verdict(out, pair_idx, cutset)
    if perm is not None:
        return GnsCertificate(cut=cutset, permutation=perm)
    return GnsRefusal(cut=cutset, witness=witness)


def min_gns_cut_exact(
    net: MUNetwork, cuttable_cap: int = DEFAULT_CAPS.gns_cuttable
) -> GnsCertificate:
    """Smallest GNS cut by subset enumeration in increasing size with early
    exit; ties go to the lexicographically smallest id tuple. Each candidate
    subset is verified by the polynomial checker, so the search is
    exponential only in the number of cuttable links."""
    cuttable = sorted(e.id for e in net.links if e.tail is not None)
    if len(cuttable) > cuttable_cap:
        raise CapacityError(
            f"{len(cuttable)} cuttable links exceed the exact-search cap of "
            f"{cuttable_cap}; use the subset feedback-edge-set approximation"
        )
    index, out = _adjacency(net)
    pair_idx = [(index[s], index[t]) for s, t in net.pairs]
    for size in range(len(cuttable) + 1):
        for combo in combinations(cuttable, size):
            perm, _ = _gns_verdict(out, pair_idx, frozenset(combo))
            if perm is not None:
                return GnsCertificate(cut=frozenset(combo), permutation=perm)
    raise ContractViolation("no GNS cut found even after cutting every link")


def _line_graph_cycle(g: Digraph, removed: frozenset[int]) -> tuple[int, ...] | None:
    """Deterministic residual cycle of g minus `removed`, if any."""
    live = {v: [w for w in g.out_neighbors(v) if w not in removed]
            for v in range(g.n) if v not in removed}
    return _find_cycle(live)


def fvs_to_gns_cut(net: MUNetwork, fvs: Iterable[int]) -> GnsCertificate:
    """Map a feedback vertex set of the index graph to a verified GNS cut of
    the staging-transformed network, of equal cardinality.

    Line-graph vertices are links; feedback links that were source links
    correspond to the staged links carrying the same id, so the cut is the
    id set itself. The input is re-verified to be a feedback vertex set
    first; the mapped cut is re-verified by the GNS checker.
    """
    g, lmap = to_index_graph(net)
    fvs_set = frozenset(fvs)
    bad = [v for v in fvs_set if not (0 <= v < g.n)]
    if bad:
        raise ValueError(f"vertices out of range: {sorted(bad)}")
    cycle = _line_graph_cycle(g, fvs_set)
    if cycle is not None:
        raise ContractViolation(
            "input is not a feedback vertex set of the index graph", witness=cycle
        )
    cut = frozenset(lmap.vertex_to_id[v] for v in fvs_set)
    tilde = tilde_transform(net)
    result = is_gns_cut(tilde, cut)
    if isinstance(result, GnsRefusal):
        raise ContractViolation(
            "mapped feedback set failed the GNS check", witness=result.witness
        )
    return result
