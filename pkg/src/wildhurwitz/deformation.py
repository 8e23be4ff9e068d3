"""Versal deformation-ring presentations and the smoothing construction.

A presentation lives over ``W(k)[p^r0]`` (finite case) or ``k[[t]]``
(infinite case), with one ``g[v]`` per vertex, one thickness ``w[e]`` per
positive edge and three families of monomial relations:

* ``g[v] = p^r(v)`` for every vertex with finite ``r(v)``;
* ``g[o] * w[e]^m = g[t]`` for every edge ``e: o -> t``;
* ``w[e]^n_e = w[e']^n_e'`` for edges over the same base node.

Assignments replace ring elements by rational exponents (``g[v] = pi^lambda``,
``w[e] = pi^eps``) for a base element ``pi`` of valuation 1, so verifying a
relation is exact arithmetic over Q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping

from . import cover_skeleton as cs
from .errors import BadR0, BaseNodeConflict, InvalidSkeleton, NotAdmissible, ZeroJump
from .hurwitz_graph import level_function, reduce, topological_order, validate
from .valuation_ring import INF, format_rational


def _p_power_text(r) -> str:
    if r == 0:
        return "1"
    if r == 1:
        return "p"
    if Fraction(r).denominator == 1:
        return f"p^{format_rational(r)}"
    return f"p^({format_rational(r)})"


def _power_text(var: str, k: int) -> str:
    return var if k == 1 else f"{var}^{k}"


@dataclass(frozen=True)
class PinRelation:
    vertex: str
    r: Fraction

    def text(self) -> str:
        return f"g[{self.vertex}] = {_p_power_text(self.r)}"


@dataclass(frozen=True)
class ChainRelation:
    edge: str
    origin: str
    target: str
    m: int

    def text(self) -> str:
        if self.m == 0:
            return f"g[{self.origin}] = g[{self.target}]"
        return f"g[{self.origin}]*{_power_text(f'w[{self.edge}]', self.m)} = g[{self.target}]"


@dataclass(frozen=True)
class BaseNodeRelation:
    edge: str
    n: int
    other: str
    other_n: int

    def text(self) -> str:
        return f"{_power_text(f'w[{self.edge}]', self.n)} = {_power_text(f'w[{self.other}]', self.other_n)}"


Relation = PinRelation | ChainRelation | BaseNodeRelation


@dataclass(frozen=True)
class Presentation:
    base: str
    r0: object
    vertex_vars: tuple[str, ...]
    edge_vars: tuple[str, ...]
    relations: tuple[Relation, ...]

    def text(self) -> str:
        lines = [f"base: {self.base}",
                 "variables: " + " ".join([f"g[{v}]" for v in self.vertex_vars]
                                          + [f"w[{e}]" for e in self.edge_vars]),
                 "relations:"]
        lines += [rel.text() for rel in self.relations]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"base": self.base, "r0": format_rational(self.r0),
                "variables": {"g": list(self.vertex_vars), "w": list(self.edge_vars)},
                "relations": [rel.text() for rel in self.relations]}


def _require_valid(sk: cs.CoverSkeleton):
    problems = validate(sk.graph)
    if problems:
        raise InvalidSkeleton("; ".join(str(v) for v in problems))


def default_r0(sk: cs.CoverSkeleton):
    """Infinite skeletons use ``INF``; otherwise the gcd of the nonzero degrees (1 if none)."""
    values = [sk.graph.r[v] for v in sk.graph.vertices]
    if any(x == INF for x in values) or cs.classify(sk).kind is cs.Kind.INFINITE:
        return INF
    nonzero = [Fraction(x) for x in values if x != 0]
    if not nonzero:
        return Fraction(1)
    num = 0
    den = 1
    for x in nonzero:
        num = gcd(num, x.numerator)
        den = lcm(den, x.denominator)
    return Fraction(num, den)


def emit_presentation(sk: cs.CoverSkeleton, r0=None) -> Presentation:
    _require_valid(sk)
    r0 = default_r0(sk) if r0 is None else r0
    if r0 != INF:
        r0 = Fraction(r0)
        if r0 <= 0:
            raise BadR0(f"r0={format_rational(r0)} must be positive")
        for v in sk.graph.vertices:
            rv = sk.graph.r[v]
            if rv != INF and (Fraction(rv) / r0).denominator != 1:
                raise BadR0(f"r({v})={format_rational(rv)} is not a multiple of r0={format_rational(r0)}")
    else:
        bad = [v for v in sk.graph.vertices if sk.graph.r[v] not in (0, INF)]
        if bad:
            raise BadR0(f"r0=inf but r is finite and nonzero at {', '.join(bad)}")
    g = sk.graph
    vertices = tuple(sorted(g.vertices))
    edges = tuple(sorted(e.id for e in g.edges))
    rels: list[Relation] = []
    for v in vertices:
        if g.r[v] != INF:
            rels.append(PinRelation(v, Fraction(g.r[v])))
    for eid in edges:
        e = g.edge(eid)
        rels.append(ChainRelation(e.id, e.origin, e.target, e.m))
    for _, group in sk.base_groups().items():
        for a, b in zip(group, group[1:]):
            rels.append(BaseNodeRelation(a, sk.edge_data[a].n, b, sk.edge_data[b].n))
    base = "k[[t]]" if r0 == INF else f"W(k)[{_p_power_text(r0)}]"
    return Presentation(base, r0, vertices, edges, tuple(rels))


@dataclass(frozen=True)
class ExponentAssignment:
    """``g[v] = pi^vertex_exp[v]``, ``w[e] = pi^edge_exp[e]``; ``p = pi^p_valuation``.

    ``p_valuation`` is None in equal characteristic, where ``p = 0``.
    """

    vertex_exp: Mapping[str, Fraction]
    edge_exp: Mapping[str, Fraction]
    p_valuation: Fraction | None = Fraction(1)
    kind: str = "finite"

    @property
    def N(self) -> int:
        values = list(self.vertex_exp.values()) + list(self.edge_exp.values())
        return lcm(1, *(Fraction(x).denominator for x in values))

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "g": {v: format_rational(x) for v, x in sorted(self.vertex_exp.items())},
                "w": {e: format_rational(x) for e, x in sorted(self.edge_exp.items())},
                "N": self.N}


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    failures: tuple[str, ...] = ()
    N: int = 1


def verify_assignment(pres: Presentation, asg: ExponentAssignment) -> VerifyReport:
    failures = []
    for v in pres.vertex_vars:
        if v not in asg.vertex_exp:
            failures.append(f"g[{v}] unassigned")
    for e in pres.edge_vars:
        if e not in asg.edge_exp:
            failures.append(f"w[{e}] unassigned")
        elif not asg.edge_exp[e] > 0:
            failures.append(f"w[{e}] has exponent {format_rational(asg.edge_exp[e])}: not smoothing")
    if failures:
        return VerifyReport(False, tuple(failures), asg.N)
    lam, eps = asg.vertex_exp, asg.edge_exp
    for rel in pres.relations:
        if isinstance(rel, PinRelation):
            if asg.p_valuation is None:
                ok = rel.r == 0 and lam[rel.vertex] == 0
            else:
                ok = lam[rel.vertex] == rel.r * asg.p_valuation
        elif isinstance(rel, ChainRelation):
            ok = lam[rel.origin] + rel.m * eps[rel.edge] == lam[rel.target]
        else:
            ok = rel.n * eps[rel.edge] == rel.other_n * eps[rel.other]
        if not ok:
            failures.append(f"relation fails: {rel.text()}")
    return VerifyReport(not failures, tuple(failures), asg.N)


def smooth_lift(sk: cs.CoverSkeleton) -> ExponentAssignment:
    """Exponents of a one-parameter smoothing with every thickness nonzero.

    Infinite case: ``g_v = pi^l(v)`` for the longest-path level function ``l``
    on the reduced graph and thickness ``pi^((l(t) - l(o)) / m)`` on reduced
    edges.  Finite case: the same with ``l = r``.  Contracted (tame) edges get
    thickness ``pi^(L / n_e)`` where ``L`` is the common value ``n_e * eps_e``
    of their base node, ``lcm`` of the node degrees when unconstrained (so a
    lone tame node gets exponent 1).
    """
    _require_valid(sk)
    adm = cs.check_admissible(sk)
    if not adm.ok:
        raise NotAdmissible("; ".join(adm.failures))
    g = sk.graph
    red = reduce(g)
    infinite = any(g.r[v] == INF for v in g.vertices) or cs.classify(sk).kind is cs.Kind.INFINITE
    if infinite:
        level = level_function(red.graph)
        lam = {v: Fraction(level[red.merge[v]]) for v in g.vertices}
        for v in g.vertices:
            if g.r[v] == 0 and lam[v] != 0:
                raise ZeroJump(f"vertex {v} has r=0 but is not minimal: its level is {lam[v]}")
        p_val = None
    else:
        lam = {v: Fraction(g.r[v]) for v in g.vertices}
        p_val = Fraction(1)
    eps: dict[str, Fraction] = {}
    for e in g.edges:
        if e.m == 0:
            continue
        jump = lam[e.target] - lam[e.origin]
        if jump <= 0:
            raise ZeroJump(f"edge {e.id}: level jump {format_rational(jump)} with m={e.m}")
        eps[e.id] = jump / e.m
    for node, group in sk.base_groups().items():
        fixed = {sk.edge_data[e].n * eps[e] for e in group if e in eps}
        if len(fixed) > 1:
            raise BaseNodeConflict(f"base node {node}: n_e * eps_e takes values "
                                   + ", ".join(sorted(format_rational(x) for x in fixed)))
        target = fixed.pop() if fixed else Fraction(lcm(*(sk.edge_data[e].n for e in group)))
        for e in group:
            if e not in eps:
                eps[e] = target / sk.edge_data[e].n
    return ExponentAssignment(lam, eps, p_val, "infinite" if infinite else "finite")


# singularity analysis -------------------------------------------------------

@dataclass
class _Monomial:
    p_exp: Fraction = Fraction(0)
    vars: dict = field(default_factory=dict)

    def times(self, var: str, k: int) -> "_Monomial":
        out = _Monomial(self.p_exp, dict(self.vars))
        if k:
            out.vars[var] = out.vars.get(var, 0) + k
        return out


def _side_text(p_exp, vars_: dict) -> str:
    parts = [_power_text(v, k) for v, k in sorted(vars_.items())]
    if p_exp != 0 or not parts:
        parts.insert(0, _p_power_text(p_exp))
    return "*".join(parts)


@dataclass(frozen=True)
class SingularityReport:
    determined: Mapping[str, str]
    residual: tuple[tuple[str, str], ...]
    free: tuple[str, ...]
    obstructed: tuple[str, ...] = ()

    @property
    def formally_smooth(self) -> bool:
        return not self.obstructed and all(kind == "linear" for _, kind in self.residual)

    def text(self) -> str:
        lines = [f"formally smooth: {'yes' if self.formally_smooth else 'no'}"]
        lines += [f"determined: {k} = {v}" for k, v in sorted(self.determined.items())]
        lines += [f"residual ({kind}): {rel}" for rel, kind in self.residual]
        lines += [f"obstructed: {rel}" for rel in self.obstructed]
        lines.append("free: " + (" ".join(self.free) if self.free else "none"))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"formally_smooth": self.formally_smooth,
                "determined": dict(sorted(self.determined.items())),
                "residual": [{"relation": r, "kind": k} for r, k in self.residual],
                "obstructed": list(self.obstructed), "free": list(self.free)}


def _classify_equation(lhs: dict, rhs: dict) -> str:
    exps = [k for k in lhs.values()] + [k for k in rhs.values()]
    return "linear" if 1 in exps else "monomial"


def singularity_report(pres: Presentation) -> SingularityReport:
    """Eliminate the ``g[v]`` and report what remains among the thicknesses."""
    g_expr: dict[str, _Monomial] = {}
    free: list[str] = []
    for rel in pres.relations:
        if isinstance(rel, PinRelation):
            g_expr[rel.vertex] = _Monomial(rel.r)
    chains = [rel for rel in pres.relations if isinstance(rel, ChainRelation)]
    used: set[str] = set()

    def propagate():
        changed = True
        while changed:
            changed = False
            for rel in chains:
                if rel.edge in used:
                    continue
                if rel.origin in g_expr and rel.target not in g_expr:
                    g_expr[rel.target] = g_expr[rel.origin].times(f"w[{rel.edge}]", rel.m)
                    used.add(rel.edge)
                    changed = True

    propagate()
    order = _vertex_order(pres, chains)
    for v in order:
        if v not in g_expr:
            g_expr[v] = _Monomial(Fraction(0), {f"g[{v}]": 1})
            free.append(f"g[{v}]")
            propagate()

    determined: dict[str, Fraction] = {}
    residual: list[tuple[str, str]] = []
    obstructed: list[str] = []
    for rel in chains:
        if rel.edge in used:
            continue
        lhs = g_expr[rel.origin].times(f"w[{rel.edge}]", rel.m)
        rhs = g_expr[rel.target]
        lv, rv = dict(lhs.vars), dict(rhs.vars)
        for var in set(lv) & set(rv):
            k = min(lv[var], rv[var])
            lv[var] -= k
            rv[var] -= k
        lv = {k: x for k, x in lv.items() if x}
        rv = {k: x for k, x in rv.items() if x}
        pe = lhs.p_exp - rhs.p_exp
        lp, rp = (pe, Fraction(0)) if pe > 0 else (Fraction(0), -pe)
        if not lv and not rv:
            if pe != 0:
                obstructed.append(rel.text())
            continue
        single = None
        if len(lv) == 1 and not rv and lp == 0:
            single = (next(iter(lv.items())), rp)
        elif len(rv) == 1 and not lv and rp == 0:
            single = (next(iter(rv.items())), lp)
        if single is not None and single[0][0].startswith("w["):
            (var, k), x = single
            if x == 0:
                obstructed.append(f"{rel.text()} forces {var} to be a unit")
            else:
                determined[var] = x / k
            continue
        text = f"{_side_text(lp, lv)} = {_side_text(rp, rv)}"
        residual.append((text, _classify_equation(lv, rv)))

    for rel in pres.relations:
        if not isinstance(rel, BaseNodeRelation):
            continue
        a, b = f"w[{rel.edge}]", f"w[{rel.other}]"
        if a in determined and b in determined:
            if rel.n * determined[a] != rel.other_n * determined[b]:
                obstructed.append(rel.text())
        elif a in determined:
            determined[b] = rel.n * determined[a] / rel.other_n
        elif b in determined:
            determined[a] = rel.other_n * determined[b] / rel.n
        else:
            kind = "linear" if 1 in (rel.n, rel.other_n) else "monomial"
            residual.append((rel.text(), kind))

    in_residual = {tok for text, _ in residual for tok in _tokens(text)}
    for e in pres.edge_vars:
        var = f"w[{e}]"
        if var not in determined and var not in free and var not in in_residual:
            free.append(var)
    det_text = {k: _p_power_text(v) for k, v in determined.items()}
    return SingularityReport(det_text, tuple(residual), tuple(free), tuple(obstructed))


def _tokens(text: str) -> set[str]:
    out = set()
    for part in text.replace("=", "*").split("*"):
        part = part.strip().split("^")[0]
        if part.startswith(("w[", "g[")):
            out.add(part)
    return out


def _vertex_order(pres: Presentation, chains) -> list[str]:
    """Topological order of the chain graph when acyclic, else sorted ids."""
    from .hurwitz_graph import Edge, HurwitzGraph
    graph = HurwitzGraph(pres.vertex_vars,
                         tuple(Edge(c.edge, c.origin, c.target, c.m) for c in chains),
                         {v: 0 for v in pres.vertex_vars}, 0)
    order = topological_order(graph)
    return order if order is not None else sorted(pres.vertex_vars)
