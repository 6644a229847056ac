import itertools
import json
from importlib import resources

import numpy as np
from hypothesis import given, settings, strategies as st

from monicrep.algebra import field_algebra, path_algebra, path_algebra_over, truncated_polynomial
from monicrep.exactlin import GF2, Field, Matrix, rank
from monicrep.homological import (
    Route,
    Status,
    classify,
    conjoin,
    dual_map,
    dual_star,
    evaluation_map,
    ext,
    ext_dims,
    gp_decide_base,
    hom_space,
    is_projective,
    is_reflexive,
    projective_cover,
    resolution,
    simple_module,
    syzygy,
)
from monicrep.io import Workspace
from monicrep.modules import AModule, direct_sum
from monicrep.quiver import Quiver
from monicrep.sampling import module_pool

GF3 = Field(3)


def non_gorenstein_algebra():
    doc = json.loads((resources.files("monicrep") / "fixtures" / "non_gorenstein.json").read_text())
    return Workspace(doc).algebra("B", "algebras")


def brute_hom_dim(x: AModule, y: AModule) -> int:
    """log_p of the number of A-linear maps, by enumerating every linear map."""
    f = x.algebra.field
    p = f.p
    count = 0
    for entries in itertools.product(range(p), repeat=x.dim * y.dim):
        m = Matrix(f, np.array(entries, dtype=np.int64).reshape(y.dim, x.dim))
        if x.is_linear_map_to(y, m):
            count += 1
    return round(np.log(count) / np.log(p))


def test_hom_space_against_enumeration():
    a = truncated_polynomial(GF2, 2)
    mods = module_pool(a, 2) + module_pool(a, 1)
    for x, y in itertools.product(mods, repeat=2):
        basis = hom_space(x, y)
        assert len(basis) == brute_hom_dim(x, y)
        for h in basis:
            assert x.is_linear_map_to(y, h)


def test_hom_space_over_path_algebra():
    a = path_algebra(Quiver.linear(2), GF3)
    reg = AModule.regular(a)
    # Hom(A, A) = A
    assert len(hom_space(reg, reg)) == a.dim
    s = [simple_module(a, i) for i in range(2)]
    assert [[len(hom_space(u, v)) for v in s] for u in s] == [[1, 0], [0, 1]]


def test_resolutions_over_truncated_polynomial():
    a = truncated_polynomial(GF3, 2)
    k = simple_module(a, 0)
    res = resolution(k)
    res.extend(5)
    assert [res.term(j).dim for j in range(5)] == [2] * 5
    assert ext_dims(k, k, 5) == [1] * 5
    assert ext_dims(k, AModule.regular(a), 4) == [0] * 4


def test_ext_between_simples_counts_arrows():
    q = Quiver.build(["1", "2", "3"], [("a", "2", "1"), ("b", "2", "1"), ("c", "3", "2")])
    a = path_algebra(q, GF2)
    s = [simple_module(a, i) for i in range(3)]
    total = sum(ext(u, v, 1).dim for u in s for v in s)
    assert total == len(q.arrows)
    assert all(ext(u, v, 2).dim == 0 for u in s for v in s)


def test_projective_cover_and_syzygy():
    a = path_algebra(Quiver.linear(3), GF2)
    for i in range(3):
        s = simple_module(a, i)
        P, eps = projective_cover(s)
        assert rank(eps) == s.dim
        assert syzygy(s).dim == P.dim - s.dim
    assert is_projective(AModule.regular(a))
    assert sum(is_projective(simple_module(a, i)) for i in range(3)) == 1


def test_dual_and_reflexivity():
    a = truncated_polynomial(GF2, 2)
    reg = AModule.regular(a)
    k = simple_module(a, 0)
    assert dual_star(reg).module.dim == 2
    assert dual_star(k).module.dim == len(hom_space(k, reg))
    assert is_reflexive(reg) and is_reflexive(k)
    bidual, ev = evaluation_map(direct_sum([reg, k]))
    assert bidual.dim == 3 and rank(ev) == 3


def test_dual_map_reverses_direction():
    a = truncated_polynomial(GF2, 2)
    k = simple_module(a, 0)
    reg = AModule.regular(a)
    sigma = hom_space(k, reg)[0]
    d = dual_map(sigma, k, reg)
    assert d.shape == (dual_star(k).module.dim, dual_star(reg).module.dim)


def test_classify_examples():
    r = classify(truncated_polynomial(GF2, 2))
    assert (r.self_injective, r.gorenstein, r.left_inj_dim, r.hereditary) == ("yes", "yes", 0, "no")
    r = classify(path_algebra(Quiver.linear(3), GF2))
    assert (r.hereditary, r.global_dim, r.self_injective) == ("yes", 1, "no")
    r = classify(field_algebra(GF3))
    assert (r.semisimple, r.global_dim, r.self_injective, r.hereditary) == ("yes", 0, "yes", "yes")


def test_classify_non_gorenstein():
    r = classify(non_gorenstein_algebra())
    assert r.gorenstein == "unknown"
    assert r.left_inj_dim == ">8" and r.right_inj_dim == ">8"
    assert r.global_dim == ">8"


def test_path_algebra_over_self_injective_is_gorenstein():
    lam = path_algebra_over(truncated_polynomial(GF2, 2), Quiver.linear(2))
    r = classify(lam)
    assert r.gorenstein == "yes" and r.left_inj_dim == 1 and r.self_injective == "no"


def test_gp_decide_base_routes():
    a = truncated_polynomial(GF2, 2)
    v = gp_decide_base(a, simple_module(a, 0))
    assert (v.status, v.route) == (Status.GP, Route.SELF_INJECTIVE)
    h = path_algebra(Quiver.linear(2), GF2)
    verdicts = [gp_decide_base(h, simple_module(h, i)) for i in range(2)]
    assert sorted(v.status.value for v in verdicts) == ["GP", "NotGP"]
    assert all(v.route is Route.FINITE_GLOBAL_DIM for v in verdicts)
    b = non_gorenstein_algebra()
    v = gp_decide_base(b, AModule.regular(b), bound=6)
    assert v.status is Status.BOUNDED and v.bound == 6
    s = [gp_decide_base(b, simple_module(b, i), bound=6) for i in range(2)]
    assert all(x.status is Status.NOT_GP for x in s)


def test_gp_base_agrees_with_ext_oracle_over_gorenstein_algebra():
    lam = path_algebra_over(truncated_polynomial(GF2, 2), Quiver.linear(2))
    reg = AModule.regular(lam)
    mods = [simple_module(lam, i) for i in range(2)] + [reg]
    for m in mods:
        v = gp_decide_base(lam, m)
        assert v.is_gp == (ext(m, reg, 1).dim == 0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([Status.GP, Status.NOT_GP, Status.BOUNDED]), max_size=5))
def test_conjoin_is_a_strict_ladder(statuses):
    out = conjoin(statuses)
    if Status.NOT_GP in statuses:
        assert out is Status.NOT_GP
    elif Status.BOUNDED in statuses:
        assert out is Status.BOUNDED
    else:
        assert out is Status.GP
