import pytest
from hypothesis import given, settings, strategies as st

from monicrep.algebra import path_algebra_over
from monicrep.exactlin import GF2, Matrix, inverse, rank
from monicrep.homological import hom_space, is_projective
from monicrep.modules import AModule
from monicrep.quiver import CyclicQuiver, Quiver
from monicrep.repmod import (
    RepMorphism,
    Representation,
    RepresentationError,
    cokernel,
    direct_sum,
    from_flat_module,
    indecomposable_projective,
    join_top_vertex,
    kernel,
    path_map,
    path_tensor_iso,
    relabelled,
    rep_hom_space,
    split_top_vertex,
    to_flat_module,
    validate,
)
from monicrep.sampling import RepSampler

from helpers import A, GF3, K, QUIVERS, V_QUIVER, example_x, example_y, k_algebra


def sampled(seed, q_name, field_name, max_dim=2):
    a = A if field_name == "A" else k_algebra(GF2 if field_name == "F2" else GF3)
    return RepSampler(a, QUIVERS[q_name], max_dim, seed).sample(1)[0]


reps = st.builds(sampled, st.integers(0, 10_000), st.sampled_from(sorted(QUIVERS)), st.sampled_from(["A", "F2", "F3"]))


def test_validate_catches_non_linear_arrow():
    x = Representation(A, Quiver.linear(2), [AModule.regular(A), K], {"a1": Matrix(GF2, [[1], [0]])})
    problem = validate(x)
    assert problem["axiom"] == "A-linearity" and problem["arrow"] == "a1"
    assert validate(example_x()) is None


def test_constructor_requires_all_arrows():
    with pytest.raises(RepresentationError):
        Representation(A, V_QUIVER, [K, K, K], {"alpha": Matrix(GF2, [[1]])})


def test_json_round_trip_and_missing_branches():
    x = example_x()
    assert Representation.from_json(A, V_QUIVER, x.to_json()).to_json() == x.to_json()
    z = Representation.from_json(A, Quiver.linear(2), {"branches": {"1": K.to_json()}, "arrows": {"a1": [[]]}})
    assert z.dims == [1, 0]


def test_flat_module_of_example_has_dimension_five():
    flat = to_flat_module(example_x())
    assert flat.algebra.dim == 10 and flat.dim == 5
    assert flat.violation() is None


@settings(max_examples=60, deadline=None)
@given(reps)
def test_flat_round_trip(x):
    flat = to_flat_module(x)
    assert flat.violation() is None
    assert from_flat_module(flat).to_json() == x.to_json()


@settings(max_examples=60, deadline=None)
@given(reps)
def test_split_and_join_are_inverse(x):
    s = split_top_vertex(x)
    assert not x.quiver.incoming(s.vertex)
    assert s.phi.violation() is None
    assert join_top_vertex(s).to_json() == x.to_json()


@settings(max_examples=40, deadline=None)
@given(reps)
def test_path_tensor_iso_is_an_isomorphism(x):
    s = split_top_vertex(x)
    iso = path_tensor_iso(s)
    assert iso.rows == iso.cols and rank(iso) == iso.rows
    inverse(iso)


def test_split_of_example_x():
    s = split_top_vertex(example_x())
    assert x_label(s) == "3"
    assert s.domain.dims == [1, 0]
    assert s.phi.components[0] == Matrix(GF2, [[0], [1], [1]])


def x_label(s):
    return s.quiver.vertices[s.vertex]


def test_split_rejects_non_source():
    with pytest.raises(RepresentationError):
        split_top_vertex(example_x(), n=0)


def test_hom_space_two_routes():
    x, y = example_x(), example_y()
    for u, v in [(x, x), (x, y), (y, x), (y, y)]:
        homs = rep_hom_space(u, v)
        assert all(h.violation() is None for h in homs)
        assert len(homs) == len(hom_space(to_flat_module(u), to_flat_module(v)))


def test_kernel_and_cokernel_dimensions():
    x, y = example_x(), example_y()
    for h in rep_hom_space(y, x):
        k, inc = kernel(h)
        c, proj = cokernel(h)
        assert inc.violation() is None and proj.violation() is None
        r = rank(h.flat())
        assert k.total_dim == y.total_dim - r
        assert c.total_dim == x.total_dim - r


def test_direct_sum_dims():
    s = direct_sum(example_x(), example_y())
    assert s.dims == [5, 2, 2]
    assert validate(s) is None


def test_projectives_are_projective():
    a_reg = AModule.regular(A)
    for q in QUIVERS.values():
        for i in range(q.n):
            p = indecomposable_projective(a_reg, q, i)
            assert validate(p) is None
            assert is_projective(to_flat_module(p))


def test_projective_needs_acyclic_quiver():
    loop = Quiver.build(["1"], [("l", "1", "1")])
    with pytest.raises(CyclicQuiver):
        indecomposable_projective(K, loop, 0)


def test_path_map_composes_in_traversal_order():
    x = sampled(3, "A3", "F3", 3)
    q = x.quiver
    p = q.path_from_names(["a1", "a2"])
    assert path_map(x, p) == x.arrows["a1"] @ x.arrows["a2"]


def test_relabelled_keeps_data():
    q = Quiver.build(["x", "y"], [("a", "x", "y")])
    x = Representation(A, q, [K, AModule.regular(A)], {"a": Matrix(GF2, [[0], [1]])})
    r, order = relabelled(x)
    assert r.quiver.vertices == ("y", "x")
    assert r.dims == [2, 1]
    assert path_algebra_over(A, r.quiver).dim == path_algebra_over(A, q).dim


def test_morphism_violation_reports_square():
    x = example_x()
    comps = [Matrix.identity(GF2, d) for d in x.dims]
    comps[1] = Matrix.zeros(GF2, 1, 1)
    assert "does not commute" in RepMorphism(x, x, comps).violation()
