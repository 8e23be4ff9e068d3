import itertools
from fractions import Fraction

import numpy as np
import pytest

from wildhurwitz.cover_skeleton import CoverSkeleton, EdgeData, VertexData
from wildhurwitz.deformation import (ExponentAssignment, default_r0, emit_presentation,
                                     singularity_report, smooth_lift, verify_assignment)
from wildhurwitz.errors import BadR0, BaseNodeConflict, InvalidSkeleton, NotAdmissible, ZeroJump
from wildhurwitz.hurwitz_graph import HurwitzGraph, is_good, reduce
from wildhurwitz.selftest import lift_sound, random_admissible_skeleton, rng_for
from wildhurwitz.valuation_ring import INF

F = Fraction


def skeleton(vertices, edges, r=None, n=None, base=None, p=3):
    g = HurwitzGraph.build(vertices, edges, char=p, r=r)
    vd = {v: VertexData(1, p) for v in g.vertices}
    ed = {e.id: EdgeData((n or {}).get(e.id, p), (base or {}).get(e.id, e.id)) for e in g.edges}
    return CoverSkeleton(g, vd, ed, 0, p)


def texts(pres):
    return [rel.text() for rel in pres.relations]


def test_emit_finite_edge():
    sk = skeleton("AB", [("A", "B", 1)], r={"B": "1/2"})
    pres = emit_presentation(sk, F(1, 2))
    assert pres.base == "W(k)[p^(1/2)]"
    assert texts(pres) == ["g[A] = 1", "g[B] = p^(1/2)", "g[A]*w[e1] = g[B]"]
    rep = singularity_report(pres)
    assert rep.determined == {"w[e1]": "p^(1/2)"} and rep.formally_smooth and not rep.residual


def test_emit_infinite_edge():
    sk = skeleton("AB", [("A", "B", 2)], r={"B": "inf"})
    pres = emit_presentation(sk)
    assert pres.base == "k[[t]]"
    assert texts(pres) == ["g[A] = 1", "g[A]*w[e1]^2 = g[B]"]


def test_emit_base_node_relation():
    sk = skeleton("ABCD", [("A", "B", 0), ("C", "D", 0)], n={"e1": 3, "e2": 1}, base={"e1": "P", "e2": "P"})
    assert "w[e1]^3 = w[e2]" in texts(emit_presentation(sk))


def test_emit_bad_r0():
    sk = skeleton("AB", [("A", "B", 1)], r={"B": "1/2"})
    with pytest.raises(BadR0):
        emit_presentation(sk, F(1, 3))
    with pytest.raises(BadR0):
        emit_presentation(sk, 0)
    with pytest.raises(BadR0):
        emit_presentation(sk, INF)
    with pytest.raises(InvalidSkeleton):
        emit_presentation(skeleton("AB", [("A", "B", 3)]))


def test_default_r0():
    assert default_r0(skeleton("ABC", [("A", "B", 1), ("B", "C", 1)], r={"B": "1/3", "C": "1/2"})) == F(1, 6)
    assert default_r0(skeleton("A", [])) == 1
    assert default_r0(skeleton("AB", [("A", "B", 1)], r={"B": "inf"})) == INF


def test_emit_is_deterministic():
    rng = rng_for(3, "emit-determinism")
    for _ in range(50):
        sk = random_admissible_skeleton(rng)
        first = emit_presentation(sk).text()
        again = CoverSkeleton.from_json(sk.to_json())
        assert emit_presentation(again).text() == first
        assert emit_presentation(sk).text().encode() == first.encode()


def test_verify_examples():
    sk = skeleton("ABC", [("A", "B", 1), ("B", "C", 1)], r={"B": "inf", "C": "inf"})
    pres = emit_presentation(sk)
    good = ExponentAssignment({"A": F(0), "B": F(1), "C": F(2)}, {"e1": F(1), "e2": F(1)}, None, "infinite")
    assert verify_assignment(pres, good).ok
    zero = ExponentAssignment({"A": F(0), "B": F(0), "C": F(1)}, {"e1": F(0), "e2": F(1)}, None, "infinite")
    rep = verify_assignment(pres, zero)
    assert not rep.ok and "not smoothing" in rep.failures[0]
    sk2 = skeleton("AB", [("A", "B", 2)], r={"B": "inf"})
    half = ExponentAssignment({"A": F(0), "B": F(1)}, {"e1": F(1, 2)}, None, "infinite")
    rep = verify_assignment(emit_presentation(sk2), half)
    assert rep.ok and rep.N == 2
    wrong = ExponentAssignment({"A": F(0), "B": F(1)}, {"e1": F(1)}, None, "infinite")
    assert not verify_assignment(emit_presentation(sk2), wrong).ok


def test_smooth_lift_examples():
    sk = skeleton("ABC", [("A", "B", 1), ("B", "C", 1)], r={"B": "inf", "C": "inf"})
    asg = smooth_lift(sk)
    assert asg.vertex_exp == {"A": 0, "B": 1, "C": 2}
    assert asg.edge_exp == {"e1": 1, "e2": 1} and asg.N == 1
    asg = smooth_lift(skeleton("AB", [("A", "B", 2)], r={"B": "inf"}))
    assert asg.vertex_exp == {"A": 0, "B": 1} and asg.edge_exp == {"e1": F(1, 2)} and asg.N == 2
    asg = smooth_lift(skeleton("AB", [("A", "B", 1)], r={"B": "1/2"}))
    assert asg.edge_exp == {"e1": F(1, 2)} and asg.N == 2


def test_smooth_lift_tame_edges_default_to_one():
    sk = skeleton("ABC", [("A", "B", 0), ("B", "C", 1)], r={"C": "1/2"}, n={"e1": 2})
    asg = smooth_lift(sk)
    assert asg.edge_exp["e1"] == 1
    assert verify_assignment(emit_presentation(sk), asg).ok


def test_smooth_lift_errors():
    with pytest.raises(NotAdmissible):
        smooth_lift(skeleton("AB", [("A", "B", 1), ("B", "A", 1)]))
    with pytest.raises(ZeroJump):
        smooth_lift(skeleton("AB", [("A", "B", 1)], r={"B": "0"}))
    conflict = skeleton("ABCD", [("A", "B", 1), ("C", "D", 2)], r={"B": "inf", "D": "inf"},
                        n={"e1": 3, "e2": 3}, base={"e1": "P", "e2": "P"})
    with pytest.raises(BaseNodeConflict):
        smooth_lift(conflict)


def test_smooth_lift_random():
    rng = rng_for(123, "smooth-lift-unit")
    for _ in range(200):
        ok, note = lift_sound(random_admissible_skeleton(rng))
        assert ok, note


def test_singularity_examples():
    tree = skeleton("ABC", [("A", "B", 1), ("A", "C", 2)], r={"B": "1/2", "C": "1/2"})
    rep = singularity_report(emit_presentation(tree))
    assert rep.formally_smooth and not rep.residual
    assert rep.determined == {"w[e1]": "p^(1/2)", "w[e2]": "p^(1/4)"}
    pair = skeleton("ABCD", [("A", "B", 0), ("C", "D", 0)], n={"e1": 1, "e2": 1}, base={"e1": "P", "e2": "P"})
    rep = singularity_report(emit_presentation(pair))
    assert rep.residual == (("w[e1] = w[e2]", "linear"),) and rep.formally_smooth
    cusp = skeleton("ABCD", [("A", "B", 0), ("C", "D", 0)], n={"e1": 2, "e2": 3}, base={"e1": "P", "e2": "P"})
    rep = singularity_report(emit_presentation(cusp))
    assert rep.residual == (("w[e1]^2 = w[e2]^3", "monomial"),) and not rep.formally_smooth


def test_singularity_cycle_residual():
    # two directed paths A -> D: the chain relations leave one toric relation
    sk = skeleton("ABCD", [("A", "B", 1), ("B", "D", 1), ("A", "C", 1), ("C", "D", 2)],
                  r={"B": "inf", "C": "inf", "D": "inf"})
    rep = singularity_report(emit_presentation(sk))
    assert len(rep.residual) == 1
    assert "w[e4]^2" in rep.residual[0][0]


def test_singularity_obstruction():
    sk = skeleton("AB", [("A", "B", 1)], r={"B": "0"})
    rep = singularity_report(emit_presentation(sk))
    assert rep.obstructed and not rep.formally_smooth


# oracle: exhaustive exponent search for graphs whose reduction is not good ---------

CANDIDATES = sorted({F(a, b) for a in range(1, 9) for b in range(1, 5)})


def exponents_exist(graph):
    wild = [e for e in graph.edges if e.m != 0]
    red = reduce(graph)
    for choice in itertools.product(CANDIDATES, repeat=len(wild)):
        pot = {}
        ok = True
        # propagate potentials lambda(t) = lambda(o) + m * eps along each wild edge
        for start in red.graph.vertices:
            if start in pot:
                continue
            pot[start] = F(0)
            frontier = [start]
            while frontier and ok:
                v = frontier.pop()
                for e, eps in zip(wild, choice):
                    o, t = red.merge[e.origin], red.merge[e.target]
                    for a, b, sign in ((o, t, 1), (t, o, -1)):
                        if a != v:
                            continue
                        val = pot[v] + sign * e.m * eps
                        if b in pot:
                            if pot[b] != val:
                                ok = False
                        else:
                            pot[b] = val
                            frontier.append(b)
            if not ok:
                break
        if ok:
            return True
    return False


def test_non_good_graphs_have_no_smoothing():
    names = "ABCD"
    checked = 0
    for nv in range(1, 5):
        verts = names[:nv]
        pairs = [(a, b) for a in verts for b in verts]
        for combo in itertools.combinations_with_replacement(pairs, 2):
            for ms in itertools.product([0, 1, 2], repeat=2):
                edges = [(o, t, m) for (o, t), m in zip(combo, ms)]
                g = HurwitzGraph.build(list(verts), edges, char=3)
                if is_good(reduce(g).graph):
                    continue
                checked += 1
                assert not exponents_exist(g)
                vd = {v: VertexData(1, 3) for v in verts}
                ed = {e.id: EdgeData(3, e.id) for e in g.edges}
                with pytest.raises(NotAdmissible):
                    smooth_lift(CoverSkeleton(g, vd, ed, 0, 3))
    assert checked > 0


def test_oracle_finds_smoothing_on_good_graphs():
    g = HurwitzGraph.build("ABC", [("A", "B", 1), ("B", "C", 2), ("A", "C", 1)], char=3)
    assert exponents_exist(g)
