"""Hurwitz graphs: directed dual graphs decorated with conductor and earnestness.

Only positive edges are stored; the opposite edge ``e_bar`` is implicit with
``m(e_bar) = -m(e)``, so the antisymmetry axiom holds by construction.
Earnestness degrees are ``Fraction`` values or ``INF``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .errors import NotGood, NotReduced, SchemaError
from .valuation_ring import INF, format_rational, parse_rational


@dataclass(frozen=True)
class Edge:
    id: str
    origin: str
    target: str
    m: int


@dataclass(frozen=True)
class Violation:
    axiom: int
    where: str
    message: str

    def __str__(self) -> str:
        return f"axiom {self.axiom} at {self.where}: {self.message}"


@dataclass(frozen=True)
class HurwitzGraph:
    """Vertices, positive edges with conductor ``m``, vertex degrees ``r``.

    ``char`` is the residue characteristic: a prime ``p`` or ``0``.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    r: Mapping[str, object]
    char: int

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "r", dict(self.r))
        if len(set(self.vertices)) != len(self.vertices):
            raise SchemaError("duplicate vertex id")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise SchemaError("duplicate edge id")
        known = set(self.vertices)
        for e in self.edges:
            if e.origin not in known or e.target not in known:
                raise SchemaError(f"edge {e.id} references an unknown vertex")
        for v in self.vertices:
            if v not in self.r:
                raise SchemaError(f"vertex {v} has no earnestness degree")

    def __hash__(self):
        return hash((self.vertices, self.edges, tuple(sorted(self.r.items(), key=str)), self.char))

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable, char: int = 0,
              r: Mapping | None = None) -> "HurwitzGraph":
        """Convenience constructor.

        ``edges`` holds ``(origin, target, m)`` or ``(id, origin, target, m)``; ids
        default to ``e1, e2, ...``.  ``r`` defaults to 0 everywhere.
        """
        vertices = [str(v) for v in vertices]
        built = []
        for k, item in enumerate(edges, start=1):
            if len(item) == 3:
                o, t, m = item
                eid = f"e{k}"
            else:
                eid, o, t, m = item
            built.append(Edge(str(eid), str(o), str(t), int(m)))
        rr = {v: Fraction(0) for v in vertices}
        for v, val in (r or {}).items():
            rr[str(v)] = parse_rational(val)
        return cls(tuple(vertices), tuple(built), rr, char)

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def incident_endpoints(self, v: str) -> int:
        """Number of edge-endpoints at ``v`` (a self-loop counts twice)."""
        return sum((e.origin == v) + (e.target == v) for e in self.edges)

    # serialization -------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "char": "0" if self.char == 0 else f"p={self.char}",
            "vertices": [{"id": v, "r": format_rational(self.r[v])} for v in self.vertices],
            "edges": [{"id": e.id, "from": e.origin, "to": e.target, "m": e.m} for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HurwitzGraph":
        if not isinstance(data, dict):
            raise SchemaError("graph must be an object")
        char = _parse_char(data.get("char", "0"))
        try:
            vertices = data["vertices"]
            edges = data.get("edges", [])
        except KeyError as exc:
            raise SchemaError(f"graph: missing field {exc}") from exc
        vids, r = [], {}
        for k, v in enumerate(vertices):
            if not isinstance(v, dict) or "id" not in v:
                raise SchemaError(f"vertices[{k}]: missing field 'id'")
            vid = str(v["id"])
            vids.append(vid)
            r[vid] = parse_rational(v.get("r", "0"))
        built = []
        for k, e in enumerate(edges):
            for key in ("from", "to", "m"):
                if not isinstance(e, dict) or key not in e:
                    raise SchemaError(f"edges[{k}]: missing field '{key}'")
            m = e["m"]
            if not isinstance(m, int) or isinstance(m, bool):
                raise SchemaError(f"edges[{k}].m: expected an integer")
            built.append(Edge(str(e.get("id", f"e{k + 1}")), str(e["from"]), str(e["to"]), m))
        return cls(tuple(vids), tuple(built), r, char)


def _parse_char(text) -> int:
    if isinstance(text, int) and not isinstance(text, bool):
        return text
    text = str(text).strip().replace(" ", "")
    if text == "0":
        return 0
    if text.startswith("p="):
        try:
            return int(text[2:])
        except ValueError:
            pass
    raise SchemaError(f"char: expected 'p=<prime>' or '0', got {text!r}")


def validate(g: HurwitzGraph) -> list[Violation]:
    """List every violated Hurwitz-graph axiom (empty means valid)."""
    out: list[Violation] = []
    p = g.char
    for v in g.vertices:
        rv = g.r[v]
        if rv != INF and rv < 0:
            out.append(Violation(3, v, f"r={format_rational(rv)} is negative"))
    for e in g.edges:
        # axiom 1 is structural: m on the opposite edge is -m(e)
        ro, rt = g.r[e.origin], g.r[e.target]
        if not ro <= rt:
            out.append(Violation(2, e.id, f"r(o)={format_rational(ro)} > r(t)={format_rational(rt)}"))
        elif e.m == 0 and ro != rt:
            out.append(Violation(2, e.id, "m=0 but r(o) != r(t)"))
        if e.m < 0:
            out.append(Violation(4, e.id, f"m={e.m} < 0 on a positive edge"))
        if p and e.m != 0 and gcd(e.m, p) != 1:
            out.append(Violation(5, e.id, f"m={e.m} is neither 0 nor prime to p={p}"))
        if p == 0 and e.m != 0:
            out.append(Violation(6, e.id, f"characteristic 0 requires m=0, got {e.m}"))
    values = [g.r[v] for v in g.vertices]
    in_unit = all(x != INF and 0 <= x <= 1 for x in values)
    in_zero_inf = all(x == 0 or x == INF for x in values)
    if not (in_unit or in_zero_inf):
        bad = [v for v in g.vertices if not (g.r[v] == INF or 0 <= g.r[v] <= 1)]
        bad = bad or [v for v in g.vertices if g.r[v] == INF]
        out.append(Violation(3, ",".join(bad), "Im r is neither in [0,1] nor in {0, inf}"))
    if p == 0:
        for v in g.vertices:
            if g.r[v] != 0:
                out.append(Violation(6, v, "characteristic 0 requires r=0"))
    return out


@dataclass(frozen=True)
class Reduction:
    graph: HurwitzGraph
    merge: dict[str, str] = field(default_factory=dict)


def _union_find(vertices, pairs):
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return find


def reduce(g: HurwitzGraph) -> Reduction:
    """Contract every ``m = 0`` edge; merged vertices are named ``A+B+...``.

    Edges with ``m != 0`` survive (self-loops included); contracted edges that
    become self-loops disappear.
    """
    find = _union_find(g.vertices, [(e.origin, e.target) for e in g.edges if e.m == 0])
    classes: dict[str, list[str]] = defaultdict(list)
    for v in g.vertices:
        classes[find(v)].append(v)
    name = {root: "+".join(sorted(members)) for root, members in classes.items()}
    merge = {v: name[find(v)] for v in g.vertices}
    new_vertices = []
    for v in g.vertices:
        if merge[v] not in new_vertices:
            new_vertices.append(merge[v])
    r = {}
    for v in g.vertices:
        r.setdefault(merge[v], g.r[v])
    edges = tuple(Edge(e.id, merge[e.origin], merge[e.target], e.m) for e in g.edges if e.m != 0)
    return Reduction(HurwitzGraph(tuple(new_vertices), edges, r, g.char), merge)


def _successors(g: HurwitzGraph) -> dict[str, list[str]]:
    succ = {v: [] for v in g.vertices}
    for e in g.edges:
        succ[e.origin].append(e.target)
    return succ


def topological_order(g: HurwitzGraph) -> list[str] | None:
    """Kahn's algorithm in vertex-list order; None if a directed cycle exists."""
    indeg = {v: 0 for v in g.vertices}
    for e in g.edges:
        indeg[e.target] += 1
    succ = _successors(g)
    ready = [v for v in g.vertices if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return order if len(order) == len(g.vertices) else None


def is_good(g_red: HurwitzGraph) -> bool:
    """True iff the orientation induces a strict order (no directed cycle, no loop)."""
    if any(e.m == 0 for e in g_red.edges):
        raise NotReduced("graph still has m=0 edges; reduce it first")
    return topological_order(g_red) is not None


def level_function(g_red: HurwitzGraph) -> dict[str, int]:
    """Longest directed path from a minimal vertex, per vertex."""
    if not is_good(g_red):
        raise NotGood("reduced graph has a directed cycle")
    level = {v: 0 for v in g_red.vertices}
    succ = _successors(g_red)
    for v in topological_order(g_red):
        for w in succ[v]:
            level[w] = max(level[w], level[v] + 1)
    return level


def minimal_vertices(g: HurwitzGraph) -> list[str]:
    targets = {e.target for e in g.edges}
    return [v for v in g.vertices if v not in targets]


def is_level_function(g_red: HurwitzGraph, level: Mapping[str, int]) -> bool:
    if any(level[v] < 0 for v in g_red.vertices):
        return False
    if any(level[e.target] <= level[e.origin] for e in g_red.edges):
        return False
    return all(level[v] == 0 for v in minimal_vertices(g_red))
