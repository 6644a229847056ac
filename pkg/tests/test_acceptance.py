"""Acceptance criteria, one test group per criterion, each under its time limit."""

import random
import time

import numpy as np
import pytest

from monicrep.algebra import path_algebra, path_algebra_over
from monicrep.cli import fixture_dir, run
from monicrep.exactlin import GF2, Field, Matrix, kernel_basis, rank, rref, sum_is_direct_iterated
from monicrep.homological import Status, classify, is_projective
from monicrep.io import load_workspace
from monicrep.monic import (
    check_monic,
    coker_phi,
    collected_injective,
    gp_decide_path_algebra,
    gp_decide_triangular,
    m1_m2,
    path_images,
    perp_oracle,
    phi_injectivity_criterion,
    projectives_monic_bound_quiver,
    sink_module,
    theorem_5_1_harness,
    theorem_5_4_harness,
    triangular_data,
)
from monicrep.quiver import Quiver, tensor_quiver
from monicrep.repmod import split_top_vertex, to_flat_module
from monicrep.sampling import RepSampler
from monicrep.window import LiftFailed, complete_resolution_window, verify_window

from helpers import A, GF3, K, QUIVERS, example_x, example_y, k_algebra
from test_algebra import loop_square_zero
from test_quiver import brute_path_count

QQ = Field.rationals()


def criterion(n, title):
    return pytest.mark.criterion(n, title)


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


# -- 1 ------------------------------------------------------------------------


@criterion(1, "fixture verdicts GP / NotGP")
def test_fixture_verdicts(record_property):
    with Clock() as c:
        rx, code_x = run(["check-gp", str(fixture_dir() / "example_4_2_X.json")])
        ry, code_y = run(["check-gp", str(fixture_dir() / "example_4_2_Y.json")])
    assert rx["result"]["verdict"]["status"] == "GP" and code_x == 0
    assert ry["result"]["verdict"]["status"] == "NotGP" and code_y == 1
    assert c.seconds < 1.0
    record_property("detail", f"X GP, Y NotGP in {c.seconds:.2f} s")


@criterion(1, "fixture verdicts GP / NotGP")
def test_fixtures_match_independent_construction():
    for name, rep, built in [("example_4_2_X", "X", example_x()), ("example_4_2_Y", "Y", example_y())]:
        ws, _ = load_workspace(str(fixture_dir() / f"{name}.json"))
        ws.resolve_all()
        assert ws.representation(rep).to_json() == built.to_json()
    assert gp_decide_path_algebra(example_x()).status is Status.GP
    assert gp_decide_path_algebra(example_y()).status is Status.NOT_GP


# -- 2 and 4 ------------------------------------------------------------------


def _criterion_two_corpus():
    reps = []
    for field in (GF2, GF3):
        k = k_algebra(field)
        for name in sorted(QUIVERS):
            reps += RepSampler(k, QUIVERS[name], 3, seed=0).instances(1000)[0]
    for name in ("A2", "V"):
        reps += RepSampler(A, QUIVERS[name], 2, seed=0).instances(1000)[0]
    return reps


@pytest.fixture(scope="module")
def corpus():
    with Clock() as c:
        reps = _criterion_two_corpus()
    return reps, c.seconds


@criterion(2, "collected injectivity iff (m1) and (m2)")
def test_monic_definition_routes_agree(corpus, record_property):
    reps, gen_seconds = corpus
    assert len(reps) >= 10_000
    assert all(max(x.dims) <= 3 for x in reps)
    assert {x.algebra.field.p for x in reps} == {2, 3}
    disagreements = 0
    with Clock() as c:
        for x in reps:
            for i in range(x.quiver.n):
                inj, _, _ = collected_injective(x, i)
                m1, m2 = m1_m2(x, i)
                disagreements += inj != (all(m1.values()) and m2)
    assert disagreements == 0
    assert gen_seconds + c.seconds < 20
    record_property("detail", f"{len(reps)} representations, 0 disagreements")


@criterion(4, "lemma properties on monic instances")
def test_lemma_properties_on_corpus(corpus, record_property):
    reps, _ = corpus
    monic = [x for x in reps if check_monic(x).is_monic]
    assert monic
    violations = []
    for x in monic:
        s = split_top_vertex(x)
        n = s.vertex
        # images of the paths out of the top vertex form a direct sum
        for i in range(x.quiver.n):
            imgs = path_images(x, n, i)
            if imgs and not sum_is_direct_iterated(imgs, x.dims[i]):
                violations.append(("directness", x))
        if not check_monic(coker_phi(x)).is_monic:
            violations.append(("coker-monic", x))
        direct, crit = phi_injectivity_criterion(x)
        if direct != crit or not direct:
            violations.append(("phi-criterion", x))
        # every base algebra in the corpus is self-injective
        if gp_decide_path_algebra(s.domain).status is not Status.GP:
            violations.append(("tensor-gp", x))
    assert violations == []
    record_property("detail", f"{len(monic)} monic instances, 0 violations")


# -- 3 ------------------------------------------------------------------------


@criterion(3, "triangular decider vs path-algebra decider vs Ext oracle")
def test_triangular_cross_check(record_property):
    q = Quiver.linear(2)
    lam = path_algebra_over(A, q)
    cls = classify(lam)
    assert cls.gorenstein == "yes"
    with Clock() as c:
        reps, _ = RepSampler(A, q, 3, seed=0).instances(600)
        disagreements = 0
        counts = {"GP": 0, "NotGP": 0}
        for x in reps:
            t = triangular_data(split_top_vertex(x))
            verdicts = [
                gp_decide_triangular(t.a, t.b, t.m, t.x, t.y, t.phi),
                gp_decide_path_algebra(x),
                perp_oracle(x),
            ]
            exact = {v.status for v in verdicts if v.is_exact}
            disagreements += len(exact) > 1
            assert all(v.is_exact for v in verdicts)
            counts[verdicts[0].status.value] += 1
    assert len(reps) >= 500 and disagreements == 0
    assert c.seconds < 20
    record_property("detail", f"{len(reps)} triples ({counts['GP']} GP, {counts['NotGP']} NotGP), "
                              f"inj.dim {cls.left_inj_dim}/{cls.right_inj_dim}, 0 disagreements")


# -- 5 ------------------------------------------------------------------------


@criterion(5, "Mon = GP exactly for self-injective A")
def test_self_injective_harness_pair(record_property):
    q = Quiver.linear(2)
    with Clock() as c:
        r1 = theorem_5_1_harness(A, q)
        h = path_algebra(q, GF2)
        r2 = theorem_5_1_harness(h, q)
    assert r1.exhaustive and r1.mon_equals_gp and r1.self_injective == "yes"
    assert r2.self_injective == "no" and not r2.mon_equals_gp
    x = r2.counterexample
    assert check_monic(x).is_monic != gp_decide_path_algebra(x).is_gp
    assert r1.consistent and r2.consistent
    assert c.seconds < 10
    record_property("detail", f"{r1.instances} instances over F2[x]/x^2; counterexample over kA2 with dims {x.dims}")


# -- 6 ------------------------------------------------------------------------


@criterion(6, "projectives monic iff hereditary on bound quivers")
def test_projectives_and_hereditary(record_property):
    with Clock() as c:
        loop = projectives_monic_bound_quiver(loop_square_zero(GF2))
        free = [projectives_monic_bound_quiver(path_algebra(QUIVERS[n], GF2)) for n in sorted(QUIVERS)]
    assert (loop.all_monic, loop.hereditary) == (False, "no")
    assert all((r.all_monic, r.hereditary) == (True, "yes") for r in free)
    assert c.seconds < 1
    record_property("detail", f"loop: monic={loop.all_monic} hereditary={loop.hereditary}; {len(free)} free quivers")


# -- 7 ------------------------------------------------------------------------


@criterion(7, "Mon = projectives exactly for hereditary AQ")
def test_hereditary_harness_pair(record_property):
    q = Quiver.linear(2)
    with Clock() as c:
        r1 = theorem_5_4_harness(k_algebra(GF2), q)
        r2 = theorem_5_4_harness(A, q)
    assert r1.exhaustive and r1.hereditary == "yes" and r1.projectives_monic and r1.mon_equals_proj
    assert r2.hereditary == "no" and not r2.mon_equals_proj
    w = r2.counterexample
    assert w.to_json() == sink_module(K, q).to_json()
    assert check_monic(w).is_monic
    assert not is_projective(to_flat_module(w))
    assert c.seconds < 5
    record_property("detail", f"witness k at the sink, dims {w.dims}")


# -- 8 ------------------------------------------------------------------------


@criterion(8, "complete resolution window")
def test_resolution_windows(record_property):
    with Clock() as c:
        w = complete_resolution_window(example_x(), 3)
        check = verify_window(w)
        with pytest.raises(LiftFailed) as info:
            complete_resolution_window(example_y(), 3)
    assert check.d_squared_zero and check.interior_exact and check.hom_exact
    assert check.ok
    assert info.value.stage == "phi-injectivity"
    assert c.seconds < 2
    record_property("detail", f"N=3 term dims {[w.dims()[i] for i in w.degrees]}; Y stops at {info.value.stage}")


# -- 9 ------------------------------------------------------------------------


def random_acyclic_quiver(rng, max_vertices=6, max_arrows=8):
    n = rng.randint(1, max_vertices)
    arrows = []
    for idx in range(rng.randint(0, max_arrows) if n > 1 else 0):
        s, t = sorted(rng.sample(range(n), 2), reverse=True)
        arrows.append((f"x{idx}", str(s + 1), str(t + 1)))
    return Quiver.build([str(v + 1) for v in range(n)], arrows)


@criterion(9, "structural identities")
def test_path_algebra_dimension_formula(record_property):
    rng = random.Random(0)
    for _ in range(20):
        q = random_acyclic_quiver(rng)
        paths = sum(brute_path_count(q, j, i) for j in range(q.n) for i in range(q.n))
        assert path_algebra_over(A, q).dim == A.dim * paths
    record_property("detail", "20 quivers")


@criterion(9, "structural identities")
def test_tensor_counts_closed_form():
    rng = random.Random(1)
    for _ in range(20):
        q1, q2 = random_acyclic_quiver(rng, 4, 4), random_acyclic_quiver(rng, 4, 4)
        tq, rels = tensor_quiver(q1, q2)
        a1, a2 = len(q1.arrows), len(q2.arrows)
        assert (tq.n, len(tq.arrows), len(rels)) == (q1.n * q2.n, a1 * q2.n + q1.n * a2, a1 * a2)


@criterion(9, "structural identities")
def test_rank_nullity_and_rref_idempotence(record_property):
    rng = np.random.default_rng(0)
    fields = [GF2, GF3, Field(7), QQ]
    for t in range(1000):
        f = fields[t % len(fields)]
        r, c = rng.integers(0, 7, size=2)
        lo, hi = (0, f.p) if f.p is not None else (-5, 5)
        m = Matrix(f, rng.integers(lo, hi, size=(r, c)).tolist()) if r and c else Matrix.zeros(f, r, c)
        assert rank(m) + kernel_basis(m).cols == m.cols
        red, pivots = rref(m)
        again, pivots2 = rref(red)
        assert again == red and list(pivots2) == list(pivots) and len(pivots) == rank(m)
    record_property("detail", "1000 matrices over F2, F3, F7, Q")
