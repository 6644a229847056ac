import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monicrep.algebra import bound_quiver_algebra, path_algebra
from monicrep.exactlin import GF2
from monicrep.homological import classify
from monicrep.quiver import (
    BoundQuiverPresentation,
    CyclicQuiver,
    Quiver,
    QuiverError,
    RelationElement,
    all_paths,
    is_acyclic,
    is_labelled,
    labelled,
    path_count_matrix,
    path_from_json,
    path_to_json,
    paths_between,
    tensor_hereditary_check,
    tensor_quiver,
    topological_label,
)


@st.composite
def acyclic_quivers(draw, max_vertices=6, max_arrows=8):
    n = draw(st.integers(1, max_vertices))
    pairs = [(j, i) for j in range(n) for i in range(n) if j != i]
    # orient every arrow along a random total order so the quiver is acyclic
    order = draw(st.permutations(range(n)))
    rank_of = {v: k for k, v in enumerate(order)}
    k = draw(st.integers(0, max_arrows if pairs else 0))
    chosen = [draw(st.sampled_from(pairs)) for _ in range(k)] if pairs else []
    arrows = []
    for idx, (j, i) in enumerate(chosen):
        s, t = (j, i) if rank_of[j] > rank_of[i] else (i, j)
        arrows.append((f"x{idx}", str(s + 1), str(t + 1)))
    return Quiver.build([str(v + 1) for v in range(n)], arrows)


def brute_path_count(q: Quiver, j: int, i: int) -> int:
    if j == i:
        return 1
    return sum(brute_path_count(q, a.target, i) for a in q.outgoing(j))


def test_build_validates():
    with pytest.raises(QuiverError):
        Quiver.build(["1", "1"])
    with pytest.raises(QuiverError):
        Quiver.build(["1", "2"], [("a", "1", "3")])
    with pytest.raises(QuiverError):
        Quiver.build(["1", "2"], [("a", "1", "2"), ("a", "2", "1")])


def test_linear_quiver_orientation():
    q = Quiver.linear(3)
    assert [(q.vertices[a.source], q.vertices[a.target]) for a in q.arrows] == [("2", "1"), ("3", "2")]
    assert is_labelled(q)


def test_cycles_detected():
    loop = Quiver.build(["1"], [("l", "1", "1")])
    assert not is_acyclic(loop)
    with pytest.raises(CyclicQuiver):
        paths_between(loop, 0, 0)
    with pytest.raises(CyclicQuiver):
        path_count_matrix(loop)
    assert len(paths_between(loop, 0, 0, max_len=3)) == 4


def test_paths_are_lexicographic_and_composable():
    q = Quiver.build(["1", "2", "3"], [("b", "3", "2"), ("a", "3", "2"), ("c", "2", "1")])
    ps = paths_between(q, 2, 0)
    assert [p.arrows for p in ps] == [("a", "c"), ("b", "c")]
    assert all(p.start == 2 and p.end == 0 for p in ps)
    first = q.arrow_path("a")
    assert first.then(q.arrow_path("c")).arrows == ("a", "c")
    assert first.then(first) is None


def test_path_json_round_trip_uses_written_order():
    q = Quiver.build(["1", "2", "3"], [("a", "3", "2"), ("c", "2", "1")])
    p = paths_between(q, 2, 0)[0]
    doc = path_to_json(q, p)
    assert doc == ["c", "a"]
    assert path_from_json(q, doc) == p
    assert path_from_json(q, {"vertex": "2"}) == q.trivial(1)


def test_relabelling_puts_a_source_last():
    q = Quiver.build(["x", "y", "z"], [("a", "x", "y"), ("b", "y", "z")])
    assert not is_labelled(q)
    lq = labelled(q)
    assert is_labelled(lq)
    assert lq.vertices[-1] == "x"
    assert not lq.incoming(lq.n - 1)


@settings(max_examples=100, deadline=None)
@given(acyclic_quivers())
def test_topological_label_is_valid(q):
    perm = topological_label(q)
    assert sorted(perm) == list(range(q.n))
    assert all(perm[a.source] > perm[a.target] for a in q.arrows)
    assert is_labelled(labelled(q))


@settings(max_examples=100, deadline=None)
@given(acyclic_quivers())
def test_path_counts_match_enumeration(q):
    m = path_count_matrix(q)
    for j in range(q.n):
        for i in range(q.n):
            assert m[j, i] == len(paths_between(q, j, i)) == brute_path_count(q, j, i)
    assert len(all_paths(q)) == int(np.sum(m))


def _pres(q, rels=()):
    return BoundQuiverPresentation(q, tuple(rels))


@settings(max_examples=60, deadline=None)
@given(acyclic_quivers(max_vertices=4, max_arrows=4), acyclic_quivers(max_vertices=4, max_arrows=4))
def test_tensor_quiver_counts(q1, q2):
    tq, rels = tensor_quiver(q1, q2)
    assert tq.n == q1.n * q2.n
    assert len(tq.arrows) == len(q1.arrows) * q2.n + q1.n * len(q2.arrows)
    assert len(rels) == len(q1.arrows) * len(q2.arrows)
    for r in rels:
        assert r.endpoints is not None


def test_tensor_lifts_relations():
    loop = Quiver.build(["1"], [("l", "1", "1")])
    sq = RelationElement(((1, loop.path_from_names(["l", "l"])),))
    a2 = Quiver.linear(2)
    tq, rels = tensor_quiver(loop, a2, [sq])
    assert tq.n == 2 and len(tq.arrows) == 3
    assert len(rels) == 1 + 2


def test_tensor_a2_a2_is_a_commutative_square():
    a2 = Quiver.linear(2)
    tq, rels = tensor_quiver(a2, a2)
    assert (tq.n, len(tq.arrows), len(rels)) == (4, 4, 1)
    alg = bound_quiver_algebra(BoundQuiverPresentation(tq, tuple(rels)), GF2)
    assert alg.dim == 9
    assert not tensor_hereditary_check(_pres(a2), _pres(a2))
    assert classify(alg).hereditary == "no"


def test_tensor_hereditary_check_against_classify():
    a2, a3 = Quiver.linear(2), Quiver.linear(3)
    point = Quiver.build(["p"])
    two_points = Quiver.build(["p", "q"])
    cases = [(a3, point), (a2, two_points), (point, a2), (a2, a3)]
    for q1, q2 in cases:
        tq, rels = tensor_quiver(q1, q2)
        alg = bound_quiver_algebra(BoundQuiverPresentation(tq, tuple(rels)), GF2) if rels else path_algebra(tq, GF2)
        want = classify(alg).hereditary == "yes"
        assert tensor_hereditary_check(_pres(q1), _pres(q2)) == want


def test_json_round_trip():
    q = Quiver.build(["1", "2"], [("a", "2", "1"), ("b", "2", "1")])
    assert Quiver.from_json(q.to_json()) == q
