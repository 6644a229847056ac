"""Monic representations and the Gorenstein-projective deciders built on them."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Any, Callable


from .algebra import Algebra, path_algebra_over, path_bimodule
from .exactlin import (
    Matrix,
    column_basis,
    hstack,
    is_injective,
    kernel_basis,
    rank,
    sum_is_direct,
    sum_is_direct_iterated,
)
from .homological import (
    DEFAULT_BOUND,
    GPVerdict,
    Route,
    Status,
    classify,
    conjoin,
    gp_decide_base,
    is_projective,
    simple_module,
)
from .modules import AModule, Bimodule, balanced_tensor
from .quiver import CyclicQuiver, Quiver, _kahn, is_acyclic, paths_between
from .repmod import (
    Representation,
    TopSplit,
    indecomposable_projective,
    path_map,
    path_tensor_iso,
    quotient_representation,
    split_top_vertex,
    to_flat_module,
)
from .sampling import DEFAULT_CAP, RepSampler


class NotMonic(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


class PreconditionUnknown(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


class InvariantViolation(AssertionError):
    """An identity that must hold for every input failed; this is a bug."""


def _vector(v: Matrix) -> list:
    """A column as a flat JSON list."""
    return [row[0] for row in v.to_json()]


# -- monic check --------------------------------------------------------------


@dataclass
class VertexMonic:
    vertex: str
    m1: dict[str, bool]
    m2: bool
    collected_rank: int
    collected_cols: int

    @property
    def injective(self) -> bool:
        return self.collected_rank == self.collected_cols

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "m1": self.m1,
            "m2": self.m2,
            "collected_rank": self.collected_rank,
            "collected_cols": self.collected_cols,
        }


@dataclass
class MonicReport:
    is_monic: bool
    per_vertex: list[VertexMonic]
    first_failure: dict | None

    def to_json(self) -> dict:
        return {
            "is_monic": self.is_monic,
            "per_vertex": [v.to_json() for v in self.per_vertex],
            "first_failure": self.first_failure,
        }


def vertex_order(q: Quiver) -> list[int]:
    """Topological label order when q is acyclic, else the stored order."""
    return _kahn(q) if is_acyclic(q) else list(range(q.n))


def collected_injective(x: Representation, i: int) -> tuple[bool, int, int]:
    """Injectivity of the collected incoming map at i, by one rank computation."""
    c = x.collected_map(i)
    r = rank(c)
    return r == c.cols, r, c.cols


def m1_m2(x: Representation, i: int) -> tuple[dict[str, bool], bool]:
    """(m1) per incoming arrow, and (m2) via iterated intersections of images."""
    maps = [m for _, m in x.incoming_maps(i)]
    m1 = {name: is_injective(m) for name, m in x.incoming_maps(i)}
    m2 = sum_is_direct_iterated(maps, x.branches[i].dim)
    return m1, m2


def check_monic(x: Representation) -> MonicReport:
    q = x.quiver
    per_vertex = []
    failure = None
    for i in vertex_order(q):
        inj, r, cols = collected_injective(x, i)
        m1, m2 = m1_m2(x, i)
        if inj != (all(m1.values()) and m2):
            raise InvariantViolation(f"collected-map injectivity and (m1)+(m2) disagree at vertex {q.vertices[i]}")
        per_vertex.append(VertexMonic(q.vertices[i], m1, m2, r, cols))
        if not inj and failure is None:
            bad = [name for name, ok in m1.items() if not ok]
            witness = kernel_basis(x.collected_map(i)).col(0)
            failure = {
                "vertex": q.vertices[i],
                "condition": "m1" if bad else "m2",
                "arrow": bad[0] if bad else None,
                "incoming": [name for name, _ in x.incoming_maps(i)],
                "witness": _vector(witness),
            }
    return MonicReport(failure is None, per_vertex, failure)


# -- condition (G) and the path-algebra decider -------------------------------


@dataclass
class VertexG:
    vertex: str
    branch: GPVerdict
    quotient: GPVerdict

    def to_json(self) -> dict:
        return {"vertex": self.vertex, "branch": self.branch.to_json(), "quotient": self.quotient.to_json()}


@dataclass
class ConditionGReport:
    per_vertex: list[VertexG]
    overall: str  # yes / no / bounded

    @property
    def status(self) -> Status:
        return {"yes": Status.GP, "no": Status.NOT_GP, "bounded": Status.BOUNDED}[self.overall]

    def to_json(self) -> dict:
        return {"overall": self.overall, "per_vertex": [v.to_json() for v in self.per_vertex]}


Oracle = Callable[[Algebra, AModule, int], GPVerdict]


def collected_cokernel(x: Representation, i: int) -> AModule:
    c = x.collected_map(i)
    img = column_basis(c) if c.cols else Matrix.zeros(x.algebra.field, c.rows, 0)
    return x.branches[i].quotient(img)[0]


def condition_G(x: Representation, bound: int = DEFAULT_BOUND, gp: Oracle = gp_decide_base) -> ConditionGReport:
    q = x.quiver
    rows = []
    statuses = []
    for i in vertex_order(q):
        vb = gp(x.algebra, x.branches[i], bound)
        vq = gp(x.algebra, collected_cokernel(x, i), bound)
        rows.append(VertexG(q.vertices[i], vb, vq))
        statuses += [vb.status, vq.status]
    s = conjoin(statuses)
    overall = {Status.GP: "yes", Status.NOT_GP: "no", Status.BOUNDED: "bounded"}[s]
    return ConditionGReport(rows, overall)


def gp_decide_path_algebra(x: Representation, bound: int = DEFAULT_BOUND) -> GPVerdict:
    route = Route.MONIC_THEOREM
    if not is_acyclic(x.quiver):
        raise CyclicQuiver("the monic criterion needs an acyclic quiver")
    mon = check_monic(x)
    if not mon.is_monic:
        return GPVerdict(Status.NOT_GP, route, bound, {"criterion": "monic", **mon.first_failure})
    g = condition_G(x, bound)
    if g.overall == "yes":
        return GPVerdict(Status.GP, route, bound)
    for v in g.per_vertex:
        for part, verdict in (("branch", v.branch), ("quotient", v.quotient)):
            if verdict.status is g.status:
                return GPVerdict(g.status, route, bound, {
                    "criterion": "G", "vertex": v.vertex, "part": part, "base": verdict.to_json(),
                })
    raise InvariantViolation("condition (G) reported a failure without a failing vertex")


# -- triangular criterion -----------------------------------------------------


def gp_decide_triangular(a: Algebra, b: Algebra, m: Bimodule, x: AModule, y: AModule, phi: Matrix,
                         bound: int = DEFAULT_BOUND) -> GPVerdict:
    """GP membership of (X, Y, phi) over the triangular extension (A M; 0 B).

    ``phi`` is given on the balanced tensor M (x)_B Y in the coordinates of
    :func:`balanced_tensor`.
    """
    route = Route.TRIANGULAR_THEOREM
    if m.left is not a or m.right is not b or x.algebra is not a or y.algebra is not b:
        raise ValueError("triangular data over mismatched algebras")
    if not is_projective(m.as_left_module()):
        raise HypothesisViolated("M is not projective as a left module")
    if not is_projective(m.as_right_module()):
        raise HypothesisViolated("M is not projective as a right module")
    tens, _, _ = balanced_tensor(m, y)
    if phi.shape != (x.dim, tens.dim) or not tens.is_linear_map_to(x, phi):
        raise ValueError("phi is not an A-map M (x) Y -> X")
    witness: dict[str, Any] = {}
    statuses = []
    k = kernel_basis(phi) if phi.cols else Matrix.zeros(a.field, 0, 0)
    if k.cols:
        statuses.append(Status.NOT_GP)
        witness["phi_injective"] = {"holds": False, "kernel_vector": _vector(k.col(0))}
    else:
        witness["phi_injective"] = {"holds": True}
    img = column_basis(phi) if phi.cols else Matrix.zeros(a.field, x.dim, 0)
    coker = x.quotient(img)[0]
    vc = gp_decide_base(a, coker, bound)
    vy = gp_decide_base(b, y, bound)
    statuses += [vc.status, vy.status]
    witness["coker_phi"] = vc.to_json()
    witness["y"] = vy.to_json()
    status = conjoin(statuses)
    if status is Status.GP:
        vx = gp_decide_base(a, x, bound)
        vt = gp_decide_base(a, tens, bound)
        if vx.is_exact and vt.is_exact:
            witness["last_assertion"] = {"x_gp": vx.is_gp, "tensor_gp": vt.is_gp, "holds": vx.is_gp == vt.is_gp}
    return GPVerdict(status, route, bound, witness)


@dataclass
class TriangularData:
    a: Algebra  # Lambda' = AQ'
    b: Algebra  # A
    m: Bimodule
    x: AModule
    y: AModule
    phi: Matrix


def triangular_data(split: TopSplit) -> TriangularData:
    """Lambda = AQ as the triangular extension (Lambda' P; 0 A) at the top vertex."""
    a = split.x_n.algebra
    P, lam_p, _ = path_bimodule(a, split.quiver, split.vertex)
    x_flat = to_flat_module(split.x_prime).over(lam_p)
    iso = path_tensor_iso(split)
    phi = split.phi.flat() @ iso
    return TriangularData(lam_p, a, P, x_flat, split.x_n, phi)


def gp_decide_by_split(x: Representation, bound: int = DEFAULT_BOUND) -> GPVerdict:
    """The triangular criterion applied at the top vertex; a cross-check of
    :func:`gp_decide_path_algebra`."""
    t = triangular_data(split_top_vertex(x))
    return gp_decide_triangular(t.a, t.b, t.m, t.x, t.y, t.phi, bound)


def perp_oracle(x: Representation, bound: int = DEFAULT_BOUND) -> GPVerdict:
    """GP test over Gorenstein Lambda as Ext^i(X, Lambda) = 0 for 1 <= i <= inj.dim."""
    from .homological import ext

    lam = path_algebra_over(x.algebra, x.quiver)
    rep = classify(lam, bound)
    if rep.gorenstein != "yes":
        return GPVerdict(Status.BOUNDED, Route.GORENSTEIN_PERP, bound, {"gorenstein": rep.gorenstein})
    d = rep.left_inj_dim
    flat = to_flat_module(x)
    reg = AModule.regular(lam)
    for i in range(1, d + 1):
        r = ext(flat, reg, i)
        if r.dim:
            return GPVerdict(Status.NOT_GP, Route.GORENSTEIN_PERP, bound, {"ext": r.to_json(), "inj_dim": d})
    return GPVerdict(Status.GP, Route.GORENSTEIN_PERP, bound, {"inj_dim": d})


# -- the top-vertex cokernel --------------------------------------------------


def path_images(x: Representation, n: int, i: int) -> list[Matrix]:
    return [path_map(x, p) for p in paths_between(x.quiver, n, i) if not p.is_trivial]


def coker_phi(x: Representation) -> Representation:
    """Quotient of X' by the images of the paths out of the top vertex."""
    if not check_monic(x).is_monic:
        raise NotMonic("coker_phi needs a monic representation")
    split = split_top_vertex(x)
    n, q = split.vertex, split.quiver
    f = x.algebra.field
    keep = [i for i in range(q.n) if i != n]
    subs = []
    for i in keep:
        maps = path_images(x, n, i)
        if not sum_is_direct(maps, x.branches[i].dim):
            raise InvariantViolation(f"path images at vertex {q.vertices[i]} are not direct for a monic input")
        img = hstack(f, maps, x.branches[i].dim)
        subs.append(column_basis(img) if img.cols else Matrix.zeros(f, x.branches[i].dim, 0))
    return quotient_representation(split.x_prime, subs)[0]


def phi_injectivity_criterion(x: Representation) -> tuple[bool, bool]:
    """(phi injective, arrows injective and path images direct), computed separately."""
    split = split_top_vertex(x)
    q, n = split.quiver, split.vertex
    for arr in split.sub_quiver.arrows:
        if not is_injective(x.arrows[arr.name]):
            raise HypothesisViolated(f"arrow {arr.name} of the subquiver is not injective")
    direct = is_injective(split.phi.flat())
    arrows_ok = all(is_injective(x.arrows[arr.name]) for arr in q.arrows)
    sums_ok = all(sum_is_direct_iterated(path_images(x, n, i), x.branches[i].dim) for i in range(q.n) if i != n)
    return direct, arrows_ok and sums_ok


# -- projectives of a bound quiver algebra ------------------------------------


@dataclass
class ProjectivesReport:
    all_monic: bool
    hereditary: str
    per_vertex: dict[str, bool]

    @property
    def consistent(self) -> bool:
        return self.all_monic == (self.hereditary == "yes")

    def to_json(self) -> dict:
        return {"all_projectives_monic": self.all_monic, "hereditary": self.hereditary,
                "per_vertex": self.per_vertex, "consistent": self.consistent}


def projectives_monic_bound_quiver(a: Algebra, bound: int = DEFAULT_BOUND) -> ProjectivesReport:
    """Is every P(j) = A e_j, as a bound representation over k, monic?

    At vertex i, P(j)_i = e_i A e_j and the arrow alpha acts by left multiplication.
    """
    pres = a.presentation
    if pres is None:
        raise ValueError("algebra has no bound-quiver presentation")
    q = pres.quiver
    f = a.field
    per_vertex = {}
    for j in range(q.n):
        spaces = [a.corner(i, j) for i in range(q.n)]
        ok = True
        for i in range(q.n):
            maps = []
            for arr in q.incoming(i):
                src = spaces[arr.source]
                alpha = a.element(q.arrow_path(arr.name).label(q))
                img = Matrix._wrap(f, a.left(alpha).dot(src.a)) if src.cols else Matrix.zeros(f, a.dim, 0)
                maps.append(img)
            c = hstack(f, maps, a.dim)
            if rank(c) != c.cols:
                ok = False
                break
        per_vertex[q.vertices[j]] = ok
    return ProjectivesReport(all(per_vertex.values()), classify(a, bound).hereditary, per_vertex)




# -- theorem-level harnesses --------------------------------------------------


def _check_51(x: Representation, bound: int) -> tuple[bool, Status]:
    mon = check_monic(x).is_monic
    v = gp_decide_path_algebra(x, bound)
    return mon, v.status


def _chunk_51(args):
    reps, bound = args
    return [_check_51(x, bound) for x in reps]


def _run_chunks(fn, reps: list, bound: int, jobs: int) -> list:
    if jobs <= 1 or len(reps) < 2 * jobs:
        return fn((reps, bound))
    size = -(-len(reps) // jobs)
    chunks = [(reps[k : k + size], bound) for k in range(0, len(reps), size)]
    out = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(fn, chunks):
            out.extend(part)
    return out


@dataclass
class SelfInjectiveHarnessReport:
    self_injective: str
    mon_equals_gp: bool
    exhaustive: bool
    instances: int
    bounded_instances: int
    counterexample: Representation | None = None
    counterexample_file: str | None = None

    @property
    def consistent(self) -> bool:
        return self.self_injective != "unknown" and self.mon_equals_gp == (self.self_injective == "yes")

    def to_json(self) -> dict:
        return {
            "self_injective": self.self_injective,
            "mon_equals_gp_on_explored": self.mon_equals_gp,
            "consistent": self.consistent,
            "exhaustive": self.exhaustive,
            "instances": self.instances,
            "bounded_instances": self.bounded_instances,
            "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
            "counterexample_file": self.counterexample_file,
        }


def sink_injective_test_module(a: Algebra, q: Quiver) -> Representation:
    """D(A) at a sink and zero elsewhere."""
    sink = vertex_order(q)[0]
    f = a.field
    branches = [AModule.coregular(a) if i == sink else AModule.zero(a) for i in range(q.n)]
    arrows = {arr.name: Matrix.zeros(f, branches[arr.target].dim, branches[arr.source].dim) for arr in q.arrows}
    return Representation(a, q, branches, arrows)


def _write_counterexample(directory: str | os.PathLike | None, name: str, x: Representation) -> str | None:
    if directory is None:
        return None
    path = FsPath(directory) / f"{name}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(x.to_json(), sort_keys=True, indent=1))
    return str(path)


def theorem_5_1_harness(a: Algebra, q: Quiver, dim_bound: int = 2, sample_budget: int = DEFAULT_CAP,
                        bound: int = DEFAULT_BOUND, seed: int = 0, jobs: int = 1,
                        counterexample_dir: str | None = None) -> SelfInjectiveHarnessReport:
    """Compare Mon(Q, A) with GP(AQ) on small representations."""
    if not is_acyclic(q):
        raise CyclicQuiver("the harness needs an acyclic quiver")
    sampler = RepSampler(a, q, dim_bound, seed)
    reps, exhaustive = sampler.instances(sample_budget)
    reps.append(sink_injective_test_module(a, q))
    results = _run_chunks(_chunk_51, reps, bound, jobs)
    mismatch = None
    bounded = 0
    for x, (mon, status) in zip(reps, results):
        if status is Status.BOUNDED:
            bounded += 1
            continue
        if mon != (status is Status.GP):
            mismatch = x
            break
    rep = SelfInjectiveHarnessReport(classify(a, bound).self_injective, mismatch is None, exhaustive, len(reps), bounded, mismatch)
    if mismatch is not None:
        rep.counterexample_file = _write_counterexample(counterexample_dir, "self_injective_counterexample", mismatch)
    return rep


@dataclass
class HereditaryHarnessReport:
    hereditary: str
    projectives_monic: bool
    mon_equals_proj: bool
    exhaustive: bool
    instances: int
    counterexample: Representation | None = None
    counterexample_file: str | None = None

    @property
    def consistent(self) -> bool:
        return self.projectives_monic and self.mon_equals_proj == (self.hereditary == "yes")

    def to_json(self) -> dict:
        return {
            "hereditary": self.hereditary,
            "projectives_monic": self.projectives_monic,
            "mon_equals_proj_on_explored": self.mon_equals_proj,
            "consistent": self.consistent,
            "exhaustive": self.exhaustive,
            "instances": self.instances,
            "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
            "counterexample_file": self.counterexample_file,
        }


def sink_module(m: AModule, q: Quiver) -> Representation:
    """M (x)_k P(sink): M at a sink and zero elsewhere."""
    a = m.algebra
    sink = vertex_order(q)[0]
    branches = [m if i == sink else AModule.zero(a) for i in range(q.n)]
    arrows = {arr.name: Matrix.zeros(a.field, branches[arr.target].dim, branches[arr.source].dim) for arr in q.arrows}
    return Representation(a, q, branches, arrows)


def _check_54(args):
    reps, _ = args
    out = []
    for x in reps:
        mon = check_monic(x).is_monic
        out.append((mon, is_projective(to_flat_module(x)) if mon else None))
    return out


def theorem_5_4_harness(a: Algebra, q: Quiver, dim_bound: int = 2, sample_budget: int = DEFAULT_CAP,
                        bound: int = DEFAULT_BOUND, seed: int = 0, jobs: int = 1,
                        counterexample_dir: str | None = None) -> HereditaryHarnessReport:
    """Compare P(AQ) with Mon(Q, A) on small representations."""
    if not q.arrows:
        raise PreconditionViolated("the quiver needs at least one arrow")
    if not is_acyclic(q):
        raise CyclicQuiver("the harness needs an acyclic quiver")
    rep_a = classify(a, bound)
    if "unknown" in (rep_a.basic, rep_a.connected, rep_a.semisimple):
        raise PreconditionUnknown("basic, connected or semisimple is unknown for this algebra")
    if rep_a.basic != "yes" or rep_a.connected != "yes":
        raise PreconditionViolated("the algebra must be basic and connected")
    if rep_a.semisimple == "yes" and a.dim != 1:
        raise PreconditionViolated("a semisimple algebra other than the ground field is not covered")
    lam = path_algebra_over(a, q)
    hered = classify(lam, bound).hereditary
    projs_monic = True
    reg = AModule.regular(a)
    for j in range(len(a.idempotents)):
        l = reg.submodule(column_basis(Matrix._wrap(a.field, a.right(a.idempotents[j]))))
        for i in range(q.n):
            if not check_monic(indecomposable_projective(l, q, i)).is_monic:
                projs_monic = False
    sampler = RepSampler(a, q, dim_bound, seed)
    reps, exhaustive = sampler.instances(sample_budget)
    # sink modules first so a non-projective simple at a sink is the reported witness
    reps = [sink_module(simple_module(a, s), q) for s in range(len(a.idempotents))] + reps
    results = _run_chunks(_check_54, reps, bound, jobs)
    witness = None
    for x, (mon, proj) in zip(reps, results):
        if mon and not proj:
            witness = x
            break
    rep = HereditaryHarnessReport(hered, projs_monic, witness is None, exhaustive, len(reps), witness)
    if witness is not None and hered == "yes":
        rep.counterexample_file = _write_counterexample(counterexample_dir, "hereditary_counterexample", witness)
    return rep
