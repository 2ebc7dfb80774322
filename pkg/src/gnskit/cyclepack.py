"""Fractional cycle packing, its spreading-metric dual, and the
sphere-growing subset feedback-edge-set approximation.

All linear programming here is exact rational arithmetic (a dense primal
simplex with Bland's rule), because the surrounding test suites assert
exact equalities such as strong LP duality and the packing-versus-feedback
inequalities that a floating-point solver would blur.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .caps import DEFAULT_CAPS
from .digraph import Digraph, _find_cycle, enumerate_simple_cycles
from .errors import CapacityError, ContractViolation
from .network import Link, MUNetwork, closure_links, to_index_graph

F0 = Fraction(0)
F1 = Fraction(1)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class CyclePacking:
    """Rational weights on simple cycles with per-vertex load at most 1.

    `assignments` holds (cycle, weight) pairs with positive weight, cycles in
    canonical rotation, in enumeration order. `value` is the total weight.
    """

    assignments: tuple[tuple[tuple[int, ...], Fraction], ...]
    value: Fraction

    def weight_map(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self.assignments)


@dataclass(frozen=True)
class SpreadingMetric:
    """Non-negative rational link lengths under which every cycle through a
    terminal measures at least 1; `objective` is the capacity-weighted total
    (parallel links share one length)."""

    lengths: tuple[tuple[int, Fraction], ...]  # (link id, length), id order
    objective: Fraction

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.lengths)


def _simplex_max(
    num_vars: int,
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
    objective: Sequence[Fraction],
) -> tuple[Fraction, list[Fraction], list[Fraction]]:
    """Maximize objective*x subject to rows*x <= rhs, x >= 0, rhs >= 0.

    Dense tableau simplex, Bland's rule for both the entering column and
    ratio ties, so the optimum (and the returned vertex) is deterministic
    and cycling is impossible. Returns (value, primal x, dual y), the duals
    being the reduced costs of the slack columns.
    """
    m = len(rows)
    width = num_vars + m
    tableau: list[list[Fraction]] = []
    for i in range(m):
        row = list(rows[i]) + [F0] * m + [rhs[i]]
        row[num_vars + i] = F1
        tableau.append(row)
    cost = [-c for c in objective] + [F0] * (m + 1)
    basis = list(range(num_vars, width))

    while True:
        enter = -1
        for j in range(width):
            if cost[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best_ratio: Fraction | None = None
        for i in range(m):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise ContractViolation("unbounded packing LP; constraints are malformed")
        pivot_row = tableau[leave]
        inv = F1 / pivot_row[enter]
        for j in range(width + 1):
            pivot_row[j] *= inv
        for i in range(m):
            if i != leave and tableau[i][enter] != 0:
                factor = tableau[i][enter]
                row = tableau[i]
                for j in range(width + 1):
                    row[j] -= factor * pivot_row[j]
        if cost[enter] != 0:
            factor = cost[enter]
            for j in range(width + 1):
                cost[j] -= factor * pivot_row[j]
        basis[leave] = enter

    x = [F0] * num_vars
    for i, b in enumerate(basis):
        if b < num_vars:
            x[b] = tableau[i][-1]
    duals = [cost[num_vars + i] for i in range(m)]
    return cost[-1], x, duals


def rcp_exact(g: Digraph, cycle_cap: int = DEFAULT_CAPS.rcp_cycles) -> CyclePacking:
    """Optimal fractional cycle packing over the enumerated simple cycles."""
    try:
        cycles = enumerate_simple_cycles(g, cap=cycle_cap)
    except CapacityError as exc:
        raise CapacityError(
            f"{exc}; graph too cyclic for the exact packing LP, use the "
            "subset feedback-edge-set approximation instead"
        ) from None
    if not cycles:
        return CyclePacking(assignments=(), value=F0)
    touched = sorted({v for cyc in cycles for v in cyc})
    rows = []
    for v in touched:
        rows.append([F1 if v in cyc else F0 for cyc in cycles])
    rhs = [F1] * len(touched)
    objective = [F1] * len(cycles)
    value, weights, _ = _simplex_max(len(cycles), rows, rhs, objective)
    assignments = tuple(
        (cyc, w) for cyc, w in zip(cycles, weights) if w > 0
    )
    return CyclePacking(assignments=assignments, value=value)


def validate_packing(g: Digraph, packing: CyclePacking) -> None:
    """Raise ContractViolation unless every keyed cycle is a simple cycle of
    g in canonical rotation and every per-vertex load is at most 1."""
    load: dict[int, Fraction] = {}
    total = F0
    for cyc, w in packing.assignments:
        if w < 0:
            raise ContractViolation(f"negative weight on cycle {cyc}")
        if len(set(cyc)) != len(cyc) or len(cyc) < 2:
            raise ContractViolation(f"not a simple cycle: {cyc}")
        if cyc[0] != min(cyc):
            raise ContractViolation(f"cycle not in canonical rotation: {cyc}")
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if not g.has_edge(a, b):
                raise ContractViolation(f"cycle {cyc} uses missing edge ({a}, {b})")
        for v in cyc:
            load[v] = load.get(v, F0) + w
        total += w
    if total != packing.value:
        raise ContractViolation("packing value does not match its assignments")
    for v, amount in load.items():
        if amount > 1:
            raise ContractViolation(f"vertex {v} is overloaded: {amount}")


def _group_pairs(links: Sequence[Link]) -> dict[tuple[str, str], list[int]]:
    grouped: dict[tuple[str, str], list[int]] = {}
    for e in links:
        if e.tail is None:
            continue
        grouped.setdefault((e.tail, e.head), []).append(e.id)
    return grouped


def _shortest_cycle_through(
    terminal: str,
    out_pairs: dict[str, list[tuple[str, tuple[str, str]]]],
    lengths: dict[tuple[str, str], Fraction],
) -> tuple[Fraction, tuple[tuple[str, str], ...]] | None:
    """Shortest closed walk through `terminal` under the given lengths,
    treating the terminal as split into an exit side and an entry side.
    Returns its length and the pair sequence, or None if no cycle passes."""
    dist: dict[str, Fraction] = {}
    prev: dict[str, tuple[str, tuple[str, str]]] = {}
    heap: list[tuple[Fraction, str, str, tuple[str, str] | None]] = []
    for head, key in out_pairs.get(terminal, ()):  # leaving the exit side
        if head == terminal:
            continue
        heapq.heappush(heap, (lengths[key], head, terminal, key))
    while heap:
        d, node, parent, key = heapq.heappop(heap)
        if node in dist:
            continue
        dist[node] = d
        prev[node] = (parent, key)
        for head, k2 in out_pairs.get(node, ()):
            if head == terminal or head in dist:
                continue
            heapq.heappush(heap, (d + lengths[k2], head, node, k2))
    best: tuple[Fraction, str, tuple[str, str]] | None = None
    for node, d in dist.items():
        for head, key in out_pairs.get(node, ()):
            if head == terminal:
                cand = d + lengths[key]
                if best is None or cand < best[0] or (cand == best[0] and node < best[1]):
                    best = (cand, node, key)
    if best is None:
        return None
    total, node, closing = best
    seq = [closing]
    while node != terminal:
        parent, key = prev[node]
        seq.append(key)
        node = parent
    seq.reverse()
    return total, tuple(seq)


def solve_spreading_metric(
    links: Sequence[Link] | Sequence[tuple[int, str, str]],
    terminals: Iterable[str],
    iteration_cap: int = DEFAULT_CAPS.spreading_iterations,
) -> SpreadingMetric:
    """Minimum-total fractional edge lengths making every cycle through a
    terminal measure at least 1 (the relaxation of the subset feedback
    edge set problem), by cutting-plane generation.

    Parallel links are grouped into one capacitated variable. Each round
    solves the current covering LP exactly through its packing dual, then a
    shortest-closed-walk oracle per terminal either finds a violated cycle
    or proves feasibility, which by LP duality makes the metric optimal.
    """
    link_objs = [
        e if isinstance(e, Link) else Link(e[0], e[1], e[2]) for e in links
    ]
    grouped = _group_pairs(link_objs)
    pair_keys = sorted(grouped)
    pair_index = {key: i for i, key in enumerate(pair_keys)}
    costs = [Fraction(len(grouped[key])) for key in pair_keys]
    out_pairs: dict[str, list[tuple[str, tuple[str, str]]]] = {}
    for tail, head in pair_keys:
        out_pairs.setdefault(tail, []).append((head, (tail, head)))

    constraints: list[frozenset[int]] = []
    known: set[frozenset[int]] = set()
    x = [F0] * len(pair_keys)
    for _ in range(iteration_cap + 1):
        lengths = {key: x[pair_index[key]] for key in pair_keys}
        violated = []
        for t in sorted(set(terminals)):
            found = _shortest_cycle_through(t, out_pairs, lengths)
            if found is not None and found[0] < 1:
                row = frozenset(pair_index[key] for key in found[1])
                if row not in known:
                    violated.append(row)
                    known.add(row)
        if not violated:
            objective = sum((c * xi for c, xi in zip(costs, x)), start=F0)
            metric = tuple(
                (e.id, x[pair_index[(e.tail, e.head)]])
                for e in sorted(link_objs, key=lambda e: e.id)
                if e.tail is not None
            )
            return SpreadingMetric(lengths=metric, objective=objective)
        constraints.extend(violated)
        # packing dual of the covering LP: one variable per cycle constraint
        rows = [
            [F1 if i in cyc_set else F0 for cyc_set in constraints]
            for i in range(len(pair_keys))
        ]
        _, _, duals = _simplex_max(len(constraints), rows, costs, [F1] * len(constraints))
        x = duals
    raise CapacityError(
        f"spreading metric did not converge within {iteration_cap} generated constraints"
    )


@dataclass(frozen=True)
class ApproxDiagnostics:
    objective: Fraction
    weight: int
    ratio: float
    fallback_used: bool
    terminal_order: tuple[str, ...]


@dataclass(frozen=True)
class ApproxFes:
    fes: frozenset[int]
    diagnostics: ApproxDiagnostics


def _pair_graph(active: dict[tuple[str, str], list[int]]) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {}
    for tail, head in active:
        adj.setdefault(tail, set()).add(head)
        adj.setdefault(head, set())
    return adj


def _on_cycle(node: str, adj: dict[str, set[str]]) -> bool:
    if node not in adj:
        return False
    stack = [w for w in adj[node]]
    seen = set(stack)
    while stack:
        u = stack.pop()
        if u == node:
            return True
        for w in adj.get(u, ()):
            if w == node:
                return True
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def _greedy_fes(active: dict[tuple[str, str], list[int]], cycle_cap: int) -> set[tuple[str, str]]:
    """Fallback: repeatedly delete the capacitated link hitting the most
    surviving cycles (ties to the smallest key) until no cycle remains."""
    removed: set[tuple[str, str]] = set()
    while True:
        adj = _pair_graph({k: v for k, v in active.items() if k not in removed})
        cycle = _find_cycle({v: ws for v, ws in adj.items()})
        if cycle is None:
            return removed
        try:
            node_list = sorted(adj)
            node_idx = {x: i for i, x in enumerate(node_list)}
            g = Digraph(
                len(node_list),
                [
                    (node_idx[t], node_idx[h])
                    for (t, h) in active
                    if (t, h) not in removed
                ],
            )
            cycles = enumerate_simple_cycles(g, cap=cycle_cap)
            counts: dict[tuple[str, str], int] = {}
            for cyc in cycles:
                for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                    key = (node_list[a], node_list[b])
                    counts[key] = counts.get(key, 0) + 1
            target = max(sorted(counts), key=lambda key: counts[key])
        except CapacityError:
            target = (cycle[0], cycle[1])
        removed.add(target)


def subset_fes_approx(
    net: MUNetwork,
    iteration_cap: int = DEFAULT_CAPS.spreading_iterations,
    cycle_cap: int = DEFAULT_CAPS.cycles,
) -> ApproxFes:
    """Feedback edge set of the network closure by region growing on the
    spreading metric, always re-verified, with a greedy fallback.

    Every cycle of the closure passes through a source node, so terminals
    are processed one by one: the terminal is split into exit/entry sides,
    metric distances are swept over their breakpoints below 1/2, and the
    outgoing boundary of the cheapest ball (cut cost relative to ball volume
    plus an objective/(2k) credit) is cut. Parallel links are cut all or
    none since the variables are capacitated. A final acyclicity check
    guards the construction; if it ever failed, a greedy cycle-hitting
    fallback would still return a valid feedback edge set.
    """
    closed = closure_links(net)
    terminals = [s for s, _ in net.pairs]
    metric = solve_spreading_metric(closed, terminals, iteration_cap)
    grouped = _group_pairs(closed)
    lengths = {key: F0 for key in grouped}
    by_id = metric.as_dict()
    for key, ids in grouped.items():
        lengths[key] = by_id[ids[0]]

    # terminal order: decreasing number of incident surviving cycles, then name
    order: list[str]
    try:
        node_list = sorted({x for key in grouped for x in key})
        node_idx = {x: i for i, x in enumerate(node_list)}
        g0 = Digraph(len(node_list), [(node_idx[t], node_idx[h]) for t, h in grouped])
        counts = {t: 0 for t in terminals}
        for cyc in enumerate_simple_cycles(g0, cap=cycle_cap):
            for v in cyc:
                name = node_list[v]
                if name in counts:
                    counts[name] += 1
        order = sorted(terminals, key=lambda t: (-counts[t], t))
    except CapacityError:
        order = sorted(terminals)

    active: dict[tuple[str, str], list[int]] = {k: list(v) for k, v in grouped.items()}
    cut_pairs: set[tuple[str, str]] = set()
    credit = metric.objective / (2 * max(net.k, 1))
    for s in order:
        adj = _pair_graph({k: v for k, v in active.items() if k not in cut_pairs})
        if not _on_cycle(s, adj):
            continue
        # metric distances from the terminal's exit side (never re-entering s)
        dist: dict[str, Fraction] = {}
        heap: list[tuple[Fraction, str]] = []
        for (tail, head), ids in active.items():
            if (tail, head) in cut_pairs or tail != s or head == s:
                continue
            heapq.heappush(heap, (lengths[(tail, head)], head))
        while heap:
            d, node = heapq.heappop(heap)
            if node in dist:
                continue
            dist[node] = d
            for (tail, head), ids in active.items():
                if (tail, head) in cut_pairs or tail != node or head == s:
                    continue
                if head not in dist:
                    heapq.heappush(heap, (d + lengths[(tail, head)], head))
        radii = sorted({d for d in dist.values() if d < HALF} | {F0})
        best: tuple[Fraction, Fraction, frozenset[tuple[str, str]]] | None = None
        for rho in radii:
            ball = {v for v, d in dist.items() if d <= rho}
            boundary = set()
            volume = credit
            for key, ids in active.items():
                if key in cut_pairs:
                    continue
                tail, head = key
                inside_tail = tail == s or tail in ball
                if not inside_tail:
                    continue
                d_tail = F0 if tail == s else dist[tail]
                volume += len(ids) * max(F0, min(rho, d_tail + lengths[key]) - d_tail)
                outside_head = head == s or head not in ball
                if outside_head:
                    boundary.add(key)
            cost = Fraction(sum(len(active[key]) for key in boundary))
            ratio = cost / volume
            if best is None or ratio < best[0] or (ratio == best[0] and rho < best[1]):
                best = (ratio, rho, frozenset(boundary))
        if best is not None:
            cut_pairs |= best[2]

    fallback_used = False
    survivors = {k: v for k, v in active.items() if k not in cut_pairs}
    if _find_cycle(_pair_graph(survivors)) is not None:
        fallback_used = True
        cut_pairs |= _greedy_fes(survivors, cycle_cap)

    # minimality normalization: drop any capacitated cut that is not needed
    for key in sorted(cut_pairs):
        trial = {k: v for k, v in active.items() if k not in cut_pairs or k == key}
        if _find_cycle(_pair_graph(trial)) is None:
            cut_pairs.remove(key)

    survivors = {k: v for k, v in active.items() if k not in cut_pairs}
    if _find_cycle(_pair_graph(survivors)) is not None:
        raise ContractViolation("feedback edge set verification failed after fallback")

    fes = frozenset(eid for key in cut_pairs for eid in grouped[key])
    weight = len(fes)
    if metric.objective > 0:
        ratio_val = float(Fraction(weight) / metric.objective)
    else:
        ratio_val = 1.0 if weight == 0 else math.inf
    return ApproxFes(
        fes=fes,
        diagnostics=ApproxDiagnostics(
            objective=metric.objective,
            weight=weight,
            ratio=ratio_val,
            fallback_used=fallback_used,
            terminal_order=tuple(order),
        ),
    )


def fes_to_fvs(net: MUNetwork, fes: Iterable[int]) -> frozenset[int]:
    """Translate a feedback edge set of the closure into the corresponding
    feedback vertex set of the index graph (one vertex per link), verifying
    both directions."""
    fes_set = frozenset(fes)
    known = {e.id for e in net.links}
    unknown = fes_set - known
    if unknown:
        raise ValueError(f"unknown link ids: {sorted(unknown)}")
    closed = closure_links(net)
    live: dict[str, set[str]] = {}
    for e in closed:
        live.setdefault(e.tail, set())
        live.setdefault(e.head, set())
        if e.id not in fes_set:
            live[e.tail].add(e.head)
    cycle = _find_cycle(live)
    if cycle is not None:
        raise ContractViolation(
            "input is not a feedback edge set of the closure", witness=cycle
        )
    g, lmap = to_index_graph(net)
    fvs = frozenset(v for v, eid in enumerate(lmap.vertex_to_id) if eid in fes_set)
    residual = {
        v: [w for w in g.out_neighbors(v) if w not in fvs]
        for v in range(g.n)
        if v not in fvs
    }
    if _find_cycle(residual) is not None:
        raise ContractViolation("translated vertex set is not a feedback vertex set")
    return fvs


def vertex_split_links(g: Digraph) -> tuple[tuple[tuple[int, str, str], ...], tuple[str, ...]]:
    """Edge list of the vertex-split of g, plus terminals covering all cycles.

    Each vertex v becomes an internal link "v.i" -> "v.o"; each edge (u, v)
    becomes a connector "u.o" -> "v.i". Cycles of the split correspond one
    to one to cycles of g, every one passing through an entry node, so the
    spreading metric of the split equals the fractional cycle packing value
    of g; this is the bridge used to cross-check LP duality on plain
    digraphs.
    """
    links: list[tuple[int, str, str]] = []
    for v in range(g.n):
        links.append((len(links), f"{v}.i", f"{v}.o"))
    for u, v in sorted(g.edges):
        links.append((len(links), f"{u}.o", f"{v}.i"))
    terminals = tuple(f"{v}.i" for v in range(g.n))
    return tuple(links), terminals
