"""Numeric skeleton of an admissible degree-p cover's special fiber.

A skeleton is a Hurwitz graph plus per-component data (genus, degree of the
cover on the component, horizontal ramification points) and per-node data
(node degree ``n_e`` and the base node it lies over).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .annulus import NodeInvariants
from .errors import Disconnected, InvalidSkeleton, MissingWitness, SchemaError
from .hurwitz_graph import HurwitzGraph, is_good, reduce, validate
from .valuation_ring import INF, format_rational


@dataclass(frozen=True)
class RamPoint:
    """A point of ``supp(coker delta)`` with horizontal ramification degree ``n``."""

    n: int
    degree_p: bool = True


@dataclass(frozen=True)
class VertexData:
    genus: int
    degree: int
    horiz_ram: tuple[RamPoint, ...] = ()
    base: str | None = None
    base_genus: int | None = None


@dataclass(frozen=True)
class EdgeData:
    n: int
    base_node: str


@dataclass(frozen=True)
class CoverSkeleton:
    graph: HurwitzGraph
    vertex_data: Mapping[str, VertexData]
    edge_data: Mapping[str, EdgeData]
    target_genus: int
    p: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vertex_data", dict(self.vertex_data))
        object.__setattr__(self, "edge_data", dict(self.edge_data))
        p = self.p or self.graph.char
        if not p:
            raise InvalidSkeleton("cover degree p unknown: set 'p' for characteristic-0 graphs")
        object.__setattr__(self, "p", p)
        for v in self.graph.vertices:
            vd = self.vertex_data.get(v)
            if vd is None:
                raise InvalidSkeleton(f"vertex {v}: missing vertex_data")
            if vd.genus < 0:
                raise InvalidSkeleton(f"vertex {v}: negative genus")
            if not 1 <= vd.degree <= p:
                raise InvalidSkeleton(f"vertex {v}: degree {vd.degree} outside [1, {p}]")
            if any(pt.n < 1 for pt in vd.horiz_ram):
                raise InvalidSkeleton(f"vertex {v}: ramification degrees must be positive")
        for e in self.graph.edges:
            ed = self.edge_data.get(e.id)
            if ed is None:
                raise InvalidSkeleton(f"edge {e.id}: missing edge_data")
            if ed.n < 1:
                raise InvalidSkeleton(f"edge {e.id}: node degree must be >= 1")
        if self.target_genus < 0:
            raise InvalidSkeleton("negative target genus")

    def __hash__(self):
        return hash((self.graph, self.target_genus, self.p))

    def base_groups(self) -> dict[str, list[str]]:
        groups: dict[str, list[str]] = defaultdict(list)
        for e in self.graph.edges:
            groups[self.edge_data[e.id].base_node].append(e.id)
        return {k: sorted(v) for k, v in sorted(groups.items())}

    # serialization -------------------------------------------------------
    def to_json(self) -> dict:
        out = self.graph.to_json()
        out["p"] = self.p
        out["vertex_data"] = {}
        for v in self.graph.vertices:
            vd = self.vertex_data[v]
            item = {"genus": vd.genus, "degree": vd.degree,
                    "horiz_ram": [{"n": pt.n, "degree_p": pt.degree_p} for pt in vd.horiz_ram]}
            if vd.base is not None:
                item["base"] = vd.base
            if vd.base_genus is not None:
                item["base_genus"] = vd.base_genus
            out["vertex_data"][v] = item
        out["edge_data"] = {e.id: {"n": self.edge_data[e.id].n,
                                   "base_node": self.edge_data[e.id].base_node}
                            for e in self.graph.edges}
        out["target_genus"] = self.target_genus
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CoverSkeleton":
        graph = HurwitzGraph.from_json(data)
        p = data.get("p", graph.char)
        if not isinstance(p, int) or isinstance(p, bool):
            raise SchemaError("p: expected an integer")
        vdata, edata = {}, {}
        raw_v = data.get("vertex_data")
        raw_e = data.get("edge_data", {})
        if not isinstance(raw_v, dict):
            raise SchemaError("skeleton: missing field 'vertex_data'")
        if not isinstance(raw_e, dict):
            raise SchemaError("edge_data: expected an object")
        for vid, item in raw_v.items():
            try:
                genus, degree = int(item["genus"]), int(item["degree"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"vertex_data.{vid}: missing or bad field {exc}") from exc
            pts = []
            for k, pt in enumerate(item.get("horiz_ram", [])):
                if isinstance(pt, int) and not isinstance(pt, bool):
                    pts.append(RamPoint(pt, degree == p))
                elif isinstance(pt, dict) and "n" in pt:
                    pts.append(RamPoint(int(pt["n"]), bool(pt.get("degree_p", degree == p))))
                else:
                    raise SchemaError(f"vertex_data.{vid}.horiz_ram[{k}]: expected int or {{'n': ...}}")
            vdata[str(vid)] = VertexData(genus, degree, tuple(pts), item.get("base"),
                                         item.get("base_genus"))
        for eid, item in raw_e.items():
            try:
                edata[str(eid)] = EdgeData(int(item["n"]), str(item.get("base_node", eid)))
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"edge_data.{eid}: missing or bad field {exc}") from exc
        if "target_genus" not in data:
            raise SchemaError("skeleton: missing field 'target_genus'")
        return cls(graph, vdata, edata, int(data["target_genus"]), p)


class Kind(str, Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    INVALID = "invalid"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    witnesses: tuple[tuple[str, str], ...] = ()


def classify(sk: CoverSkeleton) -> Classification:
    """Finite, Infinite or Invalid.

    Finite: every degree-p ramification point has ``n < p`` and all ``r`` are
    finite.  Infinite: every such point has ``n >= p`` with ``n != -1 mod p``,
    the characteristic is ``p`` and ``r`` takes values in ``{0, inf}``.  When
    both descriptions apply (no wild points, ``r = 0``) Finite is reported.
    """
    p = sk.p
    g = sk.graph
    points = [(v, pt) for v in g.vertices for pt in sk.vertex_data[v].horiz_ram if pt.degree_p]
    r_values = [g.r[v] for v in g.vertices]

    finite_w = [(f"{v}:n={pt.n}", f"n={pt.n} >= p={p}") for v, pt in points if pt.n >= p]
    finite_w += [(v, "r=inf") for v in g.vertices if g.r[v] == INF]
    if not finite_w:
        return Classification(Kind.FINITE)

    inf_w = []
    for v, pt in points:
        if pt.n < p:
            inf_w.append((f"{v}:n={pt.n}", f"n={pt.n} < p={p}"))
        elif pt.n % p == p - 1:
            inf_w.append((f"{v}:n={pt.n}", f"n={pt.n} = -1 mod p"))
    if g.char != p:
        inf_w.append(("graph", f"characteristic {g.char} is not p={p}"))
    inf_w += [(v, f"r={format_rational(g.r[v])} not in {{0, inf}}")
              for v, rv in zip(g.vertices, r_values) if not (rv == 0 or rv == INF)]
    if not inf_w:
        return Classification(Kind.INFINITE)
    return Classification(Kind.INVALID, tuple(dict.fromkeys(finite_w + inf_w)))


@dataclass(frozen=True)
class Report:
    ok: bool
    failures: tuple[str, ...] = ()
    details: Mapping[str, object] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def check_admissible(sk: CoverSkeleton) -> Report:
    """Good reduced graph, and every genus-0 component meets the rest of the
    fiber in at least ``3 - #supp(coker delta)`` points."""
    failures = []
    red = reduce(sk.graph).graph
    if not is_good(red):
        failures.append("reduced Hurwitz graph is not good (directed cycle)")
    for v in sk.graph.vertices:
        vd = sk.vertex_data[v]
        if vd.genus != 0:
            continue
        meets = sk.graph.incident_endpoints(v)
        need = 3 - len(vd.horiz_ram)
        if meets < need:
            failures.append(f"genus-0 vertex {v} meets the rest in {meets} < {need} points")
    return Report(not failures, tuple(failures))


def base_degree_check(sk: CoverSkeleton) -> Report:
    """Node degrees over one base node sum to at most ``p``."""
    failures = []
    for node, eids in sk.base_groups().items():
        total = sum(sk.edge_data[e].n for e in eids)
        if total > sk.p:
            failures.append(f"base node {node}: node degrees sum to {total} > p={sk.p}")
    return Report(not failures, tuple(failures))


def _components(vertices, pairs) -> int:
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in pairs:
        parent[find(a)] = find(b)
    return len({find(v) for v in vertices})


def first_betti(vertices, pairs) -> int:
    """``|E| - |V| + #components`` of a multigraph."""
    pairs = list(pairs)
    return len(pairs) - len(vertices) + _components(vertices, pairs)


def source_genus(sk: CoverSkeleton) -> int:
    g = sk.graph
    pairs = [(e.origin, e.target) for e in g.edges]
    if _components(g.vertices, pairs) != 1:
        raise Disconnected("source curve is disconnected")
    return sum(sk.vertex_data[v].genus for v in g.vertices) + first_betti(g.vertices, pairs)


def target_genus_check(sk: CoverSkeleton) -> Report:
    """Compare ``target_genus`` with the arithmetic genus of the base dual graph.

    The base graph has one vertex per declared base component (``base`` in
    vertex_data, genus ``base_genus``) and one edge per base node.  Without
    base data the check is reported as skipped.
    """
    g = sk.graph
    bases = {v: sk.vertex_data[v].base for v in g.vertices}
    if any(b is None for b in bases.values()):
        return Report(True, (), {"checked": False, "reason": "no base component data"})
    base_genus: dict[str, int] = {}
    for v in g.vertices:
        b, bg = bases[v], sk.vertex_data[v].base_genus
        if bg is None:
            continue
        if base_genus.setdefault(b, bg) != bg:
            return Report(False, (f"base component {b} has conflicting genera",))
    base_vertices = sorted(set(bases.values()))
    node_ends: dict[str, tuple[str, str]] = {}
    for e in g.edges:
        node = sk.edge_data[e.id].base_node
        node_ends.setdefault(node, (bases[e.origin], bases[e.target]))
    pairs = list(node_ends.values())
    if _components(base_vertices, pairs) != 1:
        raise Disconnected("base curve is disconnected")
    computed = sum(base_genus.get(b, 0) for b in base_vertices) + first_betti(base_vertices, pairs)
    ok = computed == sk.target_genus
    fails = () if ok else (f"declared g'={sk.target_genus}, base graph gives {computed}",)
    return Report(ok, fails, {"checked": True, "computed": computed})


def hurwitz_inequality(sk: CoverSkeleton, source: int | None = None) -> Report:
    """``2 g(X) - 2 - p (2 g' - 2) >= 0``."""
    gx = source_genus(sk) if source is None else source
    value = 2 * gx - 2 - sk.p * (2 * sk.target_genus - 2)
    fails = () if value >= 0 else (f"2g-2-p(2g'-2) = {value} < 0",)
    return Report(value >= 0, fails, {"value": value, "g": gx, "g_target": sk.target_genus})


def wild_edges(sk: CoverSkeleton) -> list[str]:
    """Edges whose node degree is divisible by ``p``."""
    return [e.id for e in sk.graph.edges if sk.edge_data[e.id].n % sk.p == 0]


def check_local_conditions(sk: CoverSkeleton, node_witnesses: Mapping[str, NodeInvariants]) -> Report:
    """Cross-check annulus witnesses against the skeleton, edge by edge."""
    failures = []
    per_edge = {}
    for eid in wild_edges(sk):
        if eid not in node_witnesses:
            raise MissingWitness(f"wild edge {eid} has no node witness")
    for e in sk.graph.edges:
        problems = []
        w = node_witnesses.get(e.id)
        if w is not None:
            if w.m != e.m:
                problems.append(f"witness m={w.m} != graph m={e.m}")
            if w.n is not None and w.n != sk.edge_data[e.id].n:
                problems.append(f"witness degree {w.n} != node degree {sk.edge_data[e.id].n}")
        ro, rt = sk.graph.r[e.origin], sk.graph.r[e.target]
        if e.m == 0 and ro != rt:
            problems.append("m=0 but r(o) != r(t)")
        elif not ro <= rt:
            problems.append("r(o) > r(t)")
        per_edge[e.id] = not problems
        failures += [f"edge {e.id}: {msg}" for msg in problems]
    return Report(not failures, tuple(failures), {"edges": per_edge})


def graph_problems(sk: CoverSkeleton) -> list[str]:
    return [str(v) for v in validate(sk.graph)]
