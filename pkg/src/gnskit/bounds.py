"""Exact combinatorial bound quantities and the assembled bound report.

Maximum acyclic induced subgraphs (and so minimum feedback vertex sets) are
found by branch and bound over extendable acyclic sets, exponential only in
practice-small quantities; independence numbers use a bitmask branch and
bound. Certificates are tie-broken to the lexicographically smallest optimal
vertex set. Roots of tensorized bounds are reported in floating point with
their exact integer radicands retained, and every inequality assertion
compares exact integers or rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .caps import Caps, DEFAULT_CAPS
from .cyclepack import (
    CyclePacking,
    rcp_exact,
    subset_fes_approx,
    fes_to_fvs,
)
from .digraph import Digraph, tensor_power
from .errors import CapacityError, ContractViolation, FormatError
from .indexcoding import (
    IndexCode,
    build_cycle_code,
    co_rate_from_beta,
    parse_index_code,
    serialize_index_code,
)
from .network import (
    GnsCertificate,
    MUNetwork,
    min_gns_cut_exact,
    tilde_transform,
    to_index_graph,
)


def _creates_cycle(out_adj, members: set[int], v: int) -> bool:
    """Does adding v to an acyclic induced set close a cycle (which would
    necessarily pass through v)?"""
    stack = [w for w in out_adj[v] if w in members]
    seen = set(stack)
    while stack:
        u = stack.pop()
        for w in out_adj[u]:
            if w == v:
                return True
            if w in members and w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def _max_acyclic(
    out_adj,
    candidates: Sequence[int],
    required: Sequence[int] = (),
    target: int | None = None,
) -> int:
    """Largest acyclic induced superset of `required` inside required plus
    `candidates`; returns -1 if `required` itself induces a cycle. With
    `target`, stops as soon as any set of that size is found."""
    members: set[int] = set()
    for v in required:
        if _creates_cycle(out_adj, members, v):
            return -1
        members.add(v)
    best = len(members)
    ncand = len(candidates)

    def rec(start: int, count: int) -> None:
        nonlocal best
        if count > best:
            best = count
        for i in range(start, ncand):
            if count + (ncand - i) <= best:
                return
            if target is not None and best >= target:
                return
            v = candidates[i]
            if not _creates_cycle(out_adj, members, v):
                members.add(v)
                rec(i + 1, count + 1)
                members.discard(v)

    if target is None or best < target:
        rec(0, best)
    return best


def _search_order(g: Digraph, excluded: set[int] | frozenset[int] = frozenset()) -> list[int]:
    deg = [len(g.out_neighbors(v)) + len(g.in_neighbors(v)) for v in range(g.n)]
    return sorted(
        (v for v in range(g.n) if v not in excluded), key=lambda v: (-deg[v], v)
    )


def _mais_size(g: Digraph) -> int:
    return _max_acyclic(g._out, _search_order(g))


def mais_exact(
    g: Digraph, vertex_cap: int = DEFAULT_CAPS.mais_vertices
) -> tuple[int, frozenset[int]]:
    """Maximum acyclic induced subgraph size with the lexicographically
    smallest witnessing vertex set."""
    if g.n > vertex_cap:
        raise CapacityError(f"{g.n} vertices exceed the exact-search cap of {vertex_cap}")
    size = _mais_size(g)
    chosen: list[int] = []
    for v in range(g.n):
        if len(chosen) == size:
            break
        trial = chosen + [v]
        cand = [c for c in _search_order(g, set(trial))]
        if _max_acyclic(g._out, cand, trial, target=size) >= size:
            chosen.append(v)
    return size, frozenset(chosen)


def min_fvs_exact(
    g: Digraph, vertex_cap: int = DEFAULT_CAPS.mais_vertices
) -> frozenset[int]:
    """Lexicographically smallest minimum feedback vertex set (complementary
    certificate of the maximum acyclic set)."""
    if g.n > vertex_cap:
        raise CapacityError(f"{g.n} vertices exceed the exact-search cap of {vertex_cap}")
    size = _mais_size(g)
    opt = g.n - size
    chosen: list[int] = []
    avoid: set[int] = set()
    for v in range(g.n):
        if len(chosen) == opt:
            break
        trial = avoid | {v}
        cand = _search_order(g, trial)
        if _max_acyclic(g._out, cand, (), target=size) >= size:
            chosen.append(v)
            avoid.add(v)
    return frozenset(chosen)


def _mis_size(masks: Sequence[int], allowed: int, target: int | None = None) -> int:
    best = 0

    def rec(remaining: int, count: int) -> None:
        nonlocal best
        if count > best:
            best = count
        if remaining == 0:
            return
        if count + remaining.bit_count() <= best:
            return
        if target is not None and best >= target:
            return
        # branch on the vertex of largest remaining degree, smallest index first
        pick = -1
        pick_deg = -1
        scan = remaining
        while scan:
            v = (scan & -scan).bit_length() - 1
            scan &= scan - 1
            d = (masks[v] & remaining).bit_count()
            if d > pick_deg:
                pick, pick_deg = v, d
        if pick_deg == 0:
            if count + remaining.bit_count() > best:
                best = count + remaining.bit_count()
            return
        bit = 1 << pick
        rec(remaining & ~(masks[pick] | bit), count + 1)
        rec(remaining & ~bit, count)

    rec(allowed, 0)
    return best


def alpha_exact(
    g: Digraph, vertex_cap: int = DEFAULT_CAPS.alpha_vertices
) -> tuple[int, frozenset[int]]:
    """Independence number (no edge in either direction) with the
    lexicographically smallest maximum independent set."""
    if g.n > vertex_cap:
        raise CapacityError(f"{g.n} vertices exceed the exact-search cap of {vertex_cap}")
    masks = [0] * g.n
    for u, v in g.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    full = (1 << g.n) - 1
    size = _mis_size(masks, full)
    chosen: list[int] = []
    allowed = full
    for v in range(g.n):
        if len(chosen) == size:
            break
        if not (allowed >> v) & 1:
            continue
        rest = allowed & ~(masks[v] | (1 << v))
        need = size - len(chosen) - 1
        if _mis_size(masks, rest, target=need) >= need:
            chosen.append(v)
            allowed = rest
    return size, frozenset(chosen)


class TensorBound(NamedTuple):
    q: int
    radicand: int  # exact acyclic-set maximum of the q-fold strong power
    value: float  # link count minus the q-th root


class ShannonBound(NamedTuple):
    power: int
    radicand: int  # exact independence number of the power
    value: float


def tensor_bound(
    g: Digraph,
    q: int,
    m_links: int,
    tensor_cap: int = DEFAULT_CAPS.tensor_vertices,
    vertex_cap: int = DEFAULT_CAPS.mais_vertices,
) -> TensorBound:
    """m_links minus the q-th root of the acyclic maximum of the q-fold
    strong power; tighter for larger powers on many graphs, though no
    monotonicity in q is claimed or asserted."""
    gq = tensor_power(g, q, tensor_cap)
    if gq.n > vertex_cap:
        raise CapacityError(
            f"power graph has {gq.n} vertices, exact-search cap is {vertex_cap}"
        )
    radicand = _mais_size(gq)
    return TensorBound(q=q, radicand=radicand, value=m_links - radicand ** (1.0 / q))


def shannon_capacity_lb(
    g: Digraph,
    power: int,
    tensor_cap: int = DEFAULT_CAPS.tensor_vertices,
    vertex_cap: int = DEFAULT_CAPS.alpha_vertices,
) -> ShannonBound:
    """Independence number of the strong power, taken to the 1/power; a
    finite-power lower bound on the broadcast rate."""
    gq = tensor_power(g, power, tensor_cap)
    if gq.n > vertex_cap:
        raise CapacityError(
            f"power graph has {gq.n} vertices, exact-search cap is {vertex_cap}"
        )
    size, _ = alpha_exact(gq, vertex_cap)
    return ShannonBound(power=power, radicand=size, value=size ** (1.0 / power))


@dataclass(frozen=True)
class BoundReport:
    """The assembled inequality chain for one network, with certificates.

    Optional fields are None when the matching computation was skipped for
    capacity reasons; `skipped` names them. All stored inequalities were
    re-verified exactly during assembly.
    """

    m: int
    k: int
    mais_value: int | None
    fvs: frozenset[int] | None
    rcp_value: Fraction | None
    packing: CyclePacking | None
    approx_weight: int | None
    approx_fvs: frozenset[int] | None
    gns_exact: GnsCertificate | None
    tensor_bounds: tuple[TensorBound, ...]
    shannon_lb: tuple[ShannonBound, ...]
    code_rate: Fraction | None
    code: IndexCode | None
    co_rate_lb: Fraction | None
    skipped: tuple[str, ...]


def bound_report(
    net: MUNetwork,
    qs: Sequence[int] = (1,),
    field: int = 2,
    exact_gns: bool = False,
    shannon_powers: Sequence[int] = (),
    ratio_constant: float = 8.0,
    caps: Caps = DEFAULT_CAPS,
) -> BoundReport:
    """Compute the full bound chain for a network and assert every
    inequality both of whose endpoints were computed.

    Chain: packing value <= m - mais == exact staged GNS cut <= approximate
    feedback weight; the cycle code achieves rate m - packing value, whose
    dual correlated-sources rate is the packing value itself. The
    approximation is also regression-checked against
    ratio_constant * ln(k+1)**2 times the packing value.
    """
    g, _ = to_index_graph(net)
    m, k = net.m, net.k
    skipped: list[str] = []

    mais_value: int | None = None
    fvs: frozenset[int] | None = None
    try:
        mais_value, _cert = mais_exact(g, caps.mais_vertices)
        fvs = min_fvs_exact(g, caps.mais_vertices)
    except CapacityError:
        skipped.append("mais")

    rcp: CyclePacking | None = None
    try:
        rcp = rcp_exact(g, caps.rcp_cycles)
    except CapacityError:
        skipped.append("rcp")

    approx = subset_fes_approx(net, caps.spreading_iterations, caps.cycles)
    approx_fvs = fes_to_fvs(net, approx.fes)
    approx_weight = approx.diagnostics.weight

    gns: GnsCertificate | None = None
    if exact_gns:
        try:
            gns = min_gns_cut_exact(tilde_transform(net), caps.gns_cuttable)
        except CapacityError:
            skipped.append("gns")

    tensors: list[TensorBound] = []
    for q in qs:
        try:
            tensors.append(tensor_bound(g, q, m, caps.tensor_vertices, caps.mais_vertices))
        except CapacityError:
            skipped.append(f"tensor:q={q}")
    shannon: list[ShannonBound] = []
    for power in shannon_powers:
        try:
            shannon.append(
                shannon_capacity_lb(g, power, caps.tensor_vertices, caps.alpha_vertices)
            )
        except CapacityError:
            skipped.append(f"shannon:power={power}")

    code: IndexCode | None = None
    code_rate: Fraction | None = None
    co_rate: Fraction | None = None
    if rcp is not None:
        try:
            code = build_cycle_code(g, rcp, field, caps.code_lcm)
            code_rate = code.rate
            co_rate = co_rate_from_beta(m, code_rate)
        except CapacityError:
            skipped.append("code")

    # exact chain assertions over whatever was computed
    if mais_value is not None and rcp is not None and rcp.value > m - mais_value:
        raise ContractViolation(
            f"packing value {rcp.value} exceeds m - mais = {m - mais_value}"
        )
    if mais_value is not None and approx_weight < m - mais_value:
        raise ContractViolation(
            f"approximate feedback weight {approx_weight} below m - mais"
        )
    if mais_value is not None and gns is not None and len(gns.cut) != m - mais_value:
        raise ContractViolation(
            f"staged GNS cut size {len(gns.cut)} differs from m - mais = {m - mais_value}"
        )
    if rcp is not None and code_rate is not None and code_rate != m - rcp.value:
        raise ContractViolation("cycle code rate must equal m minus the packing value")
    if rcp is not None and co_rate is not None and co_rate != rcp.value:
        raise ContractViolation("dual correlated rate must equal the packing value")
    if mais_value is not None:
        for tb in tensors:
            if tb.q == 1 and tb.radicand != mais_value:
                raise ContractViolation("first tensor bound disagrees with mais")
    if rcp is not None:
        if rcp.value == 0:
            if approx_weight != 0:
                raise ContractViolation("nonzero cut on an acyclic closure")
        else:
            limit = ratio_constant * math.log(k + 1) ** 2 * float(rcp.value)
            if approx_weight > limit:
                raise ContractViolation(
                    f"approximation weight {approx_weight} exceeds the regression "
                    f"bound {limit:.3f}"
                )

    return BoundReport(
        m=m,
        k=k,
        mais_value=mais_value,
        fvs=fvs,
        rcp_value=rcp.value if rcp is not None else None,
        packing=rcp,
        approx_weight=approx_weight,
        approx_fvs=approx_fvs,
        gns_exact=gns,
        tensor_bounds=tuple(tensors),
        shannon_lb=tuple(shannon),
        code_rate=code_rate,
        code=code,
        co_rate_lb=co_rate,
        skipped=tuple(skipped),
    )


def _frac(value: Fraction) -> str:
    return str(value)  # "a" or "a/b", both parse back exactly


def _ints(values) -> str:
    return " ".join(str(v) for v in sorted(values))


def serialize_report(report: BoundReport) -> str:
    """Line-oriented machine form: `key: value` lines, nested sections
    indented by two spaces, stable order, loss-free round trip."""
    lines = ["boundreport", f"m: {report.m}", f"k: {report.k}"]
    if report.skipped:
        lines.append("skipped: " + " ".join(report.skipped))
    if report.mais_value is not None:
        lines.append(f"mais: {report.mais_value}")
    if report.fvs is not None:
        lines.append(f"fvs: {_ints(report.fvs)}".rstrip())
    if report.rcp_value is not None:
        lines.append(f"rcp: {_frac(report.rcp_value)}")
    if report.approx_weight is not None:
        lines.append(f"approx_weight: {report.approx_weight}")
    if report.approx_fvs is not None:
        lines.append(f"approx_fvs: {_ints(report.approx_fvs)}".rstrip())
    if report.code_rate is not None:
        lines.append(f"code_rate: {_frac(report.code_rate)}")
    if report.co_rate_lb is not None:
        lines.append(f"co_rate_lb: {_frac(report.co_rate_lb)}")
    for tb in report.tensor_bounds:
        lines.append(f"tensor_bound: q={tb.q} radicand={tb.radicand} value={tb.value!r}")
    for sb in report.shannon_lb:
        lines.append(
            f"shannon_lb: power={sb.power} radicand={sb.radicand} value={sb.value!r}"
        )
    if report.gns_exact is not None:
        lines.append("gns:")
        lines.append(f"  size: {len(report.gns_exact.cut)}")
        lines.append(f"  cut: {_ints(report.gns_exact.cut)}".rstrip())
        lines.append(
            "  permutation: " + " ".join(str(x) for x in report.gns_exact.permutation)
        )
    if report.packing is not None:
        lines.append("packing:")
        lines.append(f"  value: {_frac(report.packing.value)}")
        for cyc, w in report.packing.assignments:
            lines.append(f"  assign: {_frac(w)} " + " ".join(str(v) for v in cyc))
    if report.code is not None:
        lines.append("code:")
        for code_line in serialize_index_code(report.code).strip().splitlines():
            lines.append(f"  {code_line}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> BoundReport:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "boundreport":
        raise FormatError("missing 'boundreport' header")
    scalars: dict[str, str] = {}
    tensors: list[TensorBound] = []
    shannon: list[ShannonBound] = []
    gns_fields: dict[str, str] = {}
    packing_value: Fraction | None = None
    assigns: list[tuple[tuple[int, ...], Fraction]] = []
    code_lines: list[str] = []
    section: str | None = None
    for raw in lines[1:]:
        if raw.startswith("  ") and section is not None:
            line = raw.strip()
            if section == "gns":
                key, _, value = line.partition(":")
                gns_fields[key.strip()] = value.strip()
            elif section == "packing":
                key, _, value = line.partition(":")
                key = key.strip()
                if key == "value":
                    packing_value = Fraction(value.strip())
                elif key == "assign":
                    parts = value.split()
                    assigns.append(
                        (tuple(int(x) for x in parts[1:]), Fraction(parts[0]))
                    )
                else:
                    raise FormatError(f"unknown packing line {line!r}")
            elif section == "code":
                code_lines.append(line)
            else:
                raise FormatError(f"unexpected indented line {line!r}")
            continue
        section = None
        key, sep, value = raw.partition(":")
        if not sep:
            raise FormatError(f"malformed line {raw!r}")
        key = key.strip()
        value = value.strip()
        if key in ("gns", "packing", "code") and not value:
            section = key
            continue
        if key == "tensor_bound":
            kv = dict(item.split("=", 1) for item in value.split())
            tensors.append(
                TensorBound(int(kv["q"]), int(kv["radicand"]), float(kv["value"]))
            )
        elif key == "shannon_lb":
            kv = dict(item.split("=", 1) for item in value.split())
            shannon.append(
                ShannonBound(int(kv["power"]), int(kv["radicand"]), float(kv["value"]))
            )
        else:
            scalars[key] = value

    def _opt_int(key: str) -> int | None:
        return int(scalars[key]) if key in scalars else None

    def _opt_frac(key: str) -> Fraction | None:
        return Fraction(scalars[key]) if key in scalars else None

    def _opt_set(key: str) -> frozenset[int] | None:
        if key not in scalars:
            return None
        raw = scalars[key]
        return frozenset(int(x) for x in raw.split()) if raw else frozenset()

    gns = None
    if gns_fields:
        cut_raw = gns_fields.get("cut", "")
        gns = GnsCertificate(
            cut=frozenset(int(x) for x in cut_raw.split()) if cut_raw else frozenset(),
            permutation=tuple(int(x) for x in gns_fields["permutation"].split()),
        )
    packing = None
    if packing_value is not None:
        packing = CyclePacking(assignments=tuple(assigns), value=packing_value)
    code = None
    if code_lines:
        code = parse_index_code("\n".join(code_lines) + "\n")
    return BoundReport(
        m=int(scalars["m"]),
        k=int(scalars["k"]),
        mais_value=_opt_int("mais"),
        fvs=_opt_set("fvs"),
        rcp_value=_opt_frac("rcp"),
        packing=packing,
        approx_weight=_opt_int("approx_weight"),
        approx_fvs=_opt_set("approx_fvs"),
        gns_exact=gns,
        tensor_bounds=tuple(tensors),
        shannon_lb=tuple(shannon),
        code_rate=_opt_frac("code_rate"),
        code=code,
        co_rate_lb=_opt_frac("co_rate_lb"),
        skipped=tuple(scalars.get("skipped", "").split()),
    )
