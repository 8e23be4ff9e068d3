"""Seeded random generators and the desk-scale property suites.

All randomness comes from one integer seed.  Each suite draws its own stream
``numpy.random.Generator(Philox(SeedSequence(seed).spawn(...)))``; Philox is
counter-based, so a suite's stream does not depend on which other suites ran
or in what order.
"""

from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import annulus as an
from . import cover_skeleton as cs
from . import deformation as de
from . import power_series as ps
from .hurwitz_graph import Edge, HurwitzGraph, is_good, reduce
from .valuation_ring import INF, Mode, RingElement, RingSpec

SUITES = ("earnest-roundtrip", "r0-degeneracy", "alternative-A", "goodness",
          "smooth-lift", "exactness", "classification")


def rng_for(seed: int, suite: str) -> np.random.Generator:
    key = SUITES.index(suite) if suite in SUITES else zlib.crc32(suite.encode())
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, key])))


def random_element(rng: np.random.Generator, spec: RingSpec, unit: bool = False) -> RingElement:
    digits = [int(d) for d in rng.integers(0, spec.p, spec.M)]
    if unit and digits[0] == 0:
        digits[0] = int(rng.integers(1, spec.p))
    return RingElement.make(spec, digits)


# earnestness ------------------------------------------------------------------

def random_earnest_case(rng: np.random.Generator, p: int, N: int, T: int = 32, M: int = 16):
    """``(delta, p_part, r)`` over ``Z_p[p^(1/N)]`` with ``r`` in ``{0, 1/N, ..., 1}``."""
    spec = RingSpec(p, Mode.MIXED, N, M)
    delta = ps.DifferentialForm(ps.Series(spec, tuple(random_element(rng, spec) for _ in range(T))))
    p_part = {i: random_element(rng, spec) for i in range(0, T, p) if rng.random() < 0.7}
    r = Fraction(int(rng.integers(0, N + 1)), N)
    return delta, p_part, r


def earnest_roundtrip(delta, p_part, r) -> bool:
    f = ps.lift_earnest(delta, p_part, r)
    return ps.is_pr_earnest(f, ps.augment_delta(delta, f, r), r).ok


# annulus covers -----------------------------------------------------------------

def random_cover_unit(rng: np.random.Generator, spec: RingSpec, T: int) -> an.AnnulusElement:
    """A unit ``alpha`` for which ``v^n alpha^(-1)`` is a genuine degree-n cover.

    With ``c = pi``, the lowest v-term prime to ``p`` sits at ``j0`` (``j0 <= N``
    in mixed characteristic, so that ``c^j0`` divides ``p``) and every u-term is
    divisible by ``c^j0``.  In mixed characteristic a third of the draws put
    all non-constant terms in ``p * R`` instead, exercising the ``m = 0`` branch.
    """
    p = spec.p
    c = RingElement.uniformizer(spec)
    zero = RingElement.zero(spec)
    u = [random_element(rng, spec, unit=True)]
    v = [zero] * (T - 1)
    if spec.is_mixed and rng.random() < 1 / 3:
        pe = RingElement.from_int(spec, p)
        for j in range(1, T):
            v[j - 1] = pe * random_element(rng, spec)
        scale = pe
    else:
        choices = [j for j in range(1, (spec.N if spec.is_mixed else 2 * p) + 1) if j % p]
        j0 = int(rng.choice(choices))
        v[j0 - 1] = random_element(rng, spec, unit=True)
        for j in range(j0 + 1, T):
            v[j - 1] = random_element(rng, spec)
        if not spec.is_mixed:
            for j in range(p, j0, p):
                v[j - 1] = random_element(rng, spec)
        scale = c ** j0
    u += [scale * random_element(rng, spec) for _ in range(1, T)]
    return an.AnnulusElement.build(spec, c, T, u, v)


def alternative_case(alpha: an.AnnulusElement, n: int) -> tuple[bool, str]:
    cover = an.make_cover(n, alpha)
    if not cover.relation_holds():
        return False, "x*y != c^n"
    try:
        inv = an.extract_m_d(an.log_differential(cover), n)
    except Exception as exc:  # reported, not raised: the suite counts failures
        return False, f"{type(exc).__name__}: {exc}"
    rep = an.check_alternative_A(inv, n, alpha.spec)
    return rep.ok, f"m={inv.m} val_d={inv.val_d}"


# graphs ------------------------------------------------------------------------

def all_multigraphs(max_vertices: int, max_edges: int):
    """Every directed multigraph on ``1..max_vertices`` labeled vertices with at
    most ``max_edges`` edges (self-loops allowed), all conductors 1."""
    for nv in range(1, max_vertices + 1):
        names = [chr(ord("A") + k) for k in range(nv)]
        pairs = [(a, b) for a in names for b in names]
        for ne in range(max_edges + 1):
            for combo in itertools.combinations_with_replacement(pairs, ne):
                edges = tuple(Edge(f"e{k + 1}", a, b, 1) for k, (a, b) in enumerate(combo))
                yield HurwitzGraph(tuple(names), edges, {v: 0 for v in names}, 3)


def brute_level_exists(g: HurwitzGraph) -> bool:
    """Search ``{0..|V|-1}^V`` for a strictly increasing level function."""
    verts = list(g.vertices)
    for values in itertools.product(range(len(verts)), repeat=len(verts)):
        lv = dict(zip(verts, values))
        if all(lv[e.target] > lv[e.origin] for e in g.edges):
            return True
    return False


def random_admissible_skeleton(rng: np.random.Generator, p: int = 3,
                               max_vertices: int = 6) -> cs.CoverSkeleton:
    """A valid admissible skeleton with a good reduced graph.

    Reduced classes are ordered; wild edges run forward between classes, each
    over its own base node; tame (``m = 0``) edges sit inside classes.  Half the
    draws are Infinite (``r = 0`` exactly on minimal classes, ``inf`` elsewhere),
    half Finite (``r`` strictly increasing along the class order).
    """
    nv = int(rng.integers(1, max_vertices + 1))
    names = [f"V{k}" for k in range(nv)]
    ncls = int(rng.integers(1, nv + 1))
    cls_of = {v: (k if k < ncls else int(rng.integers(0, ncls))) for k, v in enumerate(names)}
    members = {k: [v for v in names if cls_of[v] == k] for k in range(ncls)}
    conductors = [m for m in range(1, 2 * p) if m % p]
    edges: list[tuple[str, str, str, int]] = []
    edata: dict[str, cs.EdgeData] = {}

    def add(o, t, m, n, node=None):
        eid = f"e{len(edges) + 1}"
        edges.append((eid, o, t, m))
        edata[eid] = cs.EdgeData(n, node or eid)

    for k, group in members.items():
        for a, b in zip(group, group[1:]):
            add(a, b, 0, int(rng.integers(1, p)))
        if len(group) > 1 and rng.random() < 0.3:
            a, b = sorted(rng.choice(group, 2, replace=False).tolist())
            add(a, b, 0, int(rng.integers(1, p)))
    hit = set()
    for _ in range(int(rng.integers(0, 2 * ncls + 1))):
        if ncls < 2:
            break
        i, j = sorted(rng.choice(ncls, 2, replace=False).tolist())
        o = str(rng.choice(members[i]))
        t = str(rng.choice(members[j]))
        add(o, t, int(rng.choice(conductors)), p)
        hit.add(j)
    tame = [eid for eid, _, _, m in edges if m == 0]
    if len(tame) >= 2 and rng.random() < 0.5:
        a, b = tame[0], tame[1]
        if edata[a].n + edata[b].n <= p:
            edata[b] = cs.EdgeData(edata[b].n, edata[a].base_node)

    infinite = rng.random() < 0.5
    if infinite:
        r_cls = {k: (Fraction(0) if k not in hit else INF) for k in range(ncls)}
    else:
        D = int(rng.choice([6, 12]))
        vals = sorted(rng.choice(D + 1, ncls, replace=False).tolist())
        r_cls = {k: Fraction(vals[k], D) for k in range(ncls)}
    r = {v: r_cls[cls_of[v]] for v in names}
    graph = HurwitzGraph(tuple(names), tuple(Edge(*e) for e in edges), r, p)
    vdata = {}
    for v in names:
        genus = int(rng.integers(0, 3))
        pts = []
        if genus == 0:
            need = max(0, 3 - graph.incident_endpoints(v))
            for _ in range(need):
                n = int(rng.choice([p, p + 1])) if infinite else int(rng.integers(1, p))
                pts.append(cs.RamPoint(n, True))
        vdata[v] = cs.VertexData(genus, p, tuple(pts))
    return cs.CoverSkeleton(graph, vdata, edata, int(rng.integers(0, 3)), p)


def lift_sound(sk: cs.CoverSkeleton) -> tuple[bool, str]:
    pres = de.emit_presentation(sk)
    asg = de.smooth_lift(sk)
    rep = de.verify_assignment(pres, asg)
    if not rep.ok:
        return False, "; ".join(rep.failures)
    if not all(x > 0 for x in asg.edge_exp.values()):
        return False, "zero thickness"
    return True, f"N={rep.N}"


# exactness -----------------------------------------------------------------------

def termwise_exact(p: int, i: int, T: int) -> bool:
    """``u^i du`` is exact iff some ``a u^(i+1)`` has derivative ``u^i du`` over F_p."""
    return any((a * (i + 1)) % p == 1 for a in range(p)) if i + 1 < T else True


# classification fixtures -------------------------------------------------------------

def classification_fixtures(p: int = 3) -> list[tuple[str, cs.CoverSkeleton, cs.Kind]]:
    out = []
    for n, r_b, expect in [(2, Fraction(1, 2), cs.Kind.FINITE), (3, INF, cs.Kind.INFINITE),
                           (5, INF, cs.Kind.INVALID), (5, Fraction(1, 2), cs.Kind.INVALID),
                           (2, INF, cs.Kind.INVALID), (3, Fraction(1, 2), cs.Kind.INVALID)]:
        g = HurwitzGraph.build(["A", "B"], [("A", "B", 1)], char=p, r={"A": 0, "B": r_b})
        vd = {"A": cs.VertexData(1, p), "B": cs.VertexData(0, p, (cs.RamPoint(n),) * 2)}
        sk = cs.CoverSkeleton(g, vd, {"e1": cs.EdgeData(p, "e1")}, 0, p)
        out.append((f"n={n} r(B)={r_b}", sk, expect))
    return out


# runner ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    failures: int
    first_failure: str = ""

    @property
    def ok(self) -> bool:
        return self.failures == 0


def _tally(name: str, outcomes) -> SuiteResult:
    cases = failures = 0
    first = ""
    for case_id, ok, note in outcomes:
        cases += 1
        if not ok:
            failures += 1
            first = first or f"{case_id}: {note}"
    return SuiteResult(name, cases, failures, first)


def suite_earnest(seed: int, count: int = 60):
    rng = rng_for(seed, "earnest-roundtrip")
    for k in range(count):
        p, N = int(rng.choice([3, 5])), int(rng.choice([1, 2]))
        delta, p_part, r = random_earnest_case(rng, p, N)
        yield f"case{k}", earnest_roundtrip(delta, p_part, r), f"p={p} N={N} r={r}"


def suite_r0(seed: int, T: int = 4):
    spec = RingSpec(3, Mode.MIXED, 1, 4)
    for values in itertools.product(range(3), repeat=T):
        f = ps.Series.from_ints(spec, values)
        d = ps.derivative(f)
        plain = ps.is_pr_earnest(f, d, 0).ok
        shifted = ps.DifferentialForm.from_b(spec, T, {1: 1}) + d
        wrong = ps.is_pr_earnest(f, shifted, 0).ok
        yield f"f={values}", plain and not wrong, f"derivative={plain} shifted={wrong}"


def suite_alternative(seed: int, count: int = 15, T: int = 16):
    rng = rng_for(seed, "alternative-A")
    for label, spec in [("equal", RingSpec(3, Mode.EQUAL, 1, 8)),
                        ("mixed-N1", RingSpec(3, Mode.MIXED, 1, 8)),
                        ("mixed-N2", RingSpec(3, Mode.MIXED, 2, 8))]:
        for k in range(count):
            ok, note = alternative_case(random_cover_unit(rng, spec, T), 3)
            yield f"{label}-{k}", ok, note


def suite_goodness(seed: int):
    for k, g in enumerate(all_multigraphs(3, 3)):
        yield f"graph{k}", is_good(reduce(g).graph) == brute_level_exists(g), ""


def suite_smooth_lift(seed: int, count: int = 100):
    rng = rng_for(seed, "smooth-lift")
    for k in range(count):
        ok, note = lift_sound(random_admissible_skeleton(rng))
        yield f"skeleton{k}", ok, note


def suite_exactness(seed: int, T: int = 64):
    for p in (3, 5):
        spec = RingSpec(p, Mode.EQUAL, 1, 4)
        for i in range(T - 1):
            omega = ps.DifferentialForm.from_b(spec, T, {i + 1: 1})
            yield f"p={p} i={i}", ps.is_exact(omega) == termwise_exact(p, i, T), ""


def suite_classification(seed: int):
    for name, sk, expect in classification_fixtures():
        got = cs.classify(sk).kind
        yield name, got is expect, f"got {got.value}, expected {expect.value}"


RUNNERS: dict[str, Callable] = {
    "earnest-roundtrip": suite_earnest,
    "r0-degeneracy": suite_r0,
    "alternative-A": suite_alternative,
    "goodness": suite_goodness,
    "smooth-lift": suite_smooth_lift,
    "exactness": suite_exactness,
    "classification": suite_classification,
}


def run_all(seed: int) -> list[SuiteResult]:
    return [_tally(name, RUNNERS[name](seed)) for name in SUITES]


def format_table(seed: int, results: list[SuiteResult]) -> str:
    lines = [f"selftest seed={seed}", f"{'suite':<20} {'cases':>6} {'fail':>5}  status"]
    for res in results:
        lines.append(f"{res.name:<20} {res.cases:>6} {res.failures:>5}  {'pass' if res.ok else 'FAIL'}")
        if res.first_failure:
            lines.append(f"  first failure: {res.first_failure}")
    total = sum(not r.ok for r in results)
    lines.append("all suites pass" if total == 0 else f"{total} suite(s) failed")
    return "\n".join(lines) + "\n"
