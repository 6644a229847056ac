"""Representations of a quiver over an algebra and the module dictionary.

A representation stores one A-module per vertex and one matrix per arrow.  The
flat Lambda-module (Lambda = AQ) lives on the direct sum of the branches in
vertex order, with b (x) p acting on X_i as 0 if s(p) != i and as b X_p otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .algebra import Algebra, path_algebra_over, path_bimodule
from .exactlin import (
    Matrix,
    block_diag,
    column_basis,
    hstack,
    inverse,
    kernel_basis,
    rank,
)
from .homological import hom_space
from .modules import AModule, Bimodule, ModuleError, balanced_tensor
from .modules import direct_sum as module_direct_sum
from .quiver import Path, Quiver, _kahn, is_acyclic, paths_between, CyclicQuiver


class RepresentationError(ValueError):
    pass


class Representation:
    """Datum (X_i, X_alpha) of A-modules and A-maps.  Treat as immutable."""

    __slots__ = ("algebra", "quiver", "branches", "arrows", "_cache")

    def __init__(self, algebra: Algebra, quiver: Quiver, branches: Sequence[AModule], arrows: Mapping[str, Matrix]) -> None:
        if len(branches) != quiver.n:
            raise RepresentationError(f"expected {quiver.n} branches, got {len(branches)}")
        missing = [a.name for a in quiver.arrows if a.name not in arrows]
        if missing:
            raise RepresentationError(f"missing arrow maps for {missing}")
        self.algebra = algebra
        self.quiver = quiver
        self.branches = tuple(branches)
        self.arrows = {a.name: arrows[a.name] for a in quiver.arrows}
        self._cache: dict = {}

    @classmethod
    def zero(cls, algebra: Algebra, quiver: Quiver) -> "Representation":
        f = algebra.field
        z = AModule.zero(algebra)
        return cls(algebra, quiver, [z] * quiver.n, {a.name: Matrix.zeros(f, 0, 0) for a in quiver.arrows})

    @property
    def dims(self) -> list[int]:
        return [b.dim for b in self.branches]

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def arrow_map(self, name: str) -> Matrix:
        return self.arrows[name]

    def incoming_maps(self, i: int) -> list[tuple[str, Matrix]]:
        return [(a.name, self.arrows[a.name]) for a in self.quiver.incoming(i)]

    def collected_map(self, i: int) -> Matrix:
        """(X_alpha)_{e(alpha) = i} : (+) X_{s(alpha)} -> X_i."""
        f = self.algebra.field
        return hstack(f, [m for _, m in self.incoming_maps(i)], self.branches[i].dim)

    def __repr__(self) -> str:
        return f"Representation(dims={self.dims}, arrows={list(self.arrows)})"

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        q = self.quiver
        return {
            "branches": {q.vertices[i]: b.to_json() for i, b in enumerate(self.branches)},
            "arrows": {name: m.to_json() for name, m in self.arrows.items()},
        }

    @classmethod
    def from_json(cls, algebra: Algebra, quiver: Quiver, doc: Mapping) -> "Representation":
        f = algebra.field
        try:
            bdocs = doc["branches"]
            adocs = doc.get("arrows", {})
        except (KeyError, TypeError) as exc:
            raise RepresentationError(f"malformed representation document: {exc}") from None
        branches = []
        for v in quiver.vertices:
            if v not in bdocs:
                branches.append(AModule.zero(algebra))
                continue
            try:
                branches.append(AModule.from_json(algebra, bdocs[v]))
            except ModuleError as exc:
                raise RepresentationError(f"branch {v}: {exc}") from None
        arrows = {}
        for a in quiver.arrows:
            rows, cols = branches[a.target].dim, branches[a.source].dim
            m = adocs.get(a.name)
            if m is None:
                if rows and cols:
                    raise RepresentationError(f"arrow {a.name}: missing matrix")
                arrows[a.name] = Matrix.zeros(f, rows, cols)
                continue
            try:
                mm = Matrix.from_rows(f, m, cols) if rows else Matrix.zeros(f, 0, cols)
            except ValueError as exc:
                raise RepresentationError(f"arrow {a.name}: {exc}") from None
            if mm.shape != (rows, cols):
                raise RepresentationError(f"arrow {a.name}: expected a {rows}x{cols} matrix, got {mm.rows}x{mm.cols}")
            arrows[a.name] = mm
        unknown = set(adocs) - {a.name for a in quiver.arrows}
        if unknown:
            raise RepresentationError(f"unknown arrows {sorted(unknown)}")
        return cls(algebra, quiver, branches, arrows)


@dataclass
class RepMorphism:
    source: Representation
    target: Representation
    components: list[Matrix]

    def violation(self) -> str | None:
        q = self.source.quiver
        for i, c in enumerate(self.components):
            if c.shape != (self.target.branches[i].dim, self.source.branches[i].dim):
                return f"component at vertex {q.vertices[i]} has the wrong shape"
            if not self.source.branches[i].is_linear_map_to(self.target.branches[i], c):
                return f"component at vertex {q.vertices[i]} is not A-linear"
        for a in q.arrows:
            lhs = self.components[a.target] @ self.source.arrows[a.name]
            rhs = self.target.arrows[a.name] @ self.components[a.source]
            if lhs != rhs:
                return f"square at arrow {a.name} does not commute"
        return None

    def flat(self) -> Matrix:
        return block_diag(self.source.algebra.field, self.components)


# -- validation and the module dictionary -------------------------------------


def validate(x: Representation) -> dict | None:
    """None when x is a representation; else the first failing axiom."""
    q = x.quiver
    for i, b in enumerate(x.branches):
        if b.algebra is not x.algebra:
            return {"axiom": "branch algebra", "vertex": q.vertices[i]}
        problem = b.violation()
        if problem:
            return {"axiom": "module", "vertex": q.vertices[i], "detail": problem}
    f = x.algebra.field
    for a in q.arrows:
        m = x.arrows[a.name]
        src, tgt = x.branches[a.source], x.branches[a.target]
        if m.shape != (tgt.dim, src.dim):
            return {"axiom": "shape", "arrow": a.name}
        for u in range(x.algebra.dim):
            if np.any(f.reduce(m.a.dot(src.act[u])) != f.reduce(tgt.act[u].dot(m.a))):
                return {"axiom": "A-linearity", "arrow": a.name, "basis_element": x.algebra.labels[u]}
    return None


def path_map(x: Representation, p: Path) -> Matrix:
    """X_p = X_{alpha_l} ... X_{alpha_1}; the identity for a trivial path."""
    f = x.algebra.field
    m = Matrix.identity(f, x.branches[p.start].dim)
    for name in p.arrows:
        m = x.arrows[name] @ m
    return m


def offsets(x: Representation) -> list[int]:
    return np.cumsum([0] + x.dims).tolist()


def to_flat_module(x: Representation) -> AModule:
    if "flat" in x._cache:
        return x._cache["flat"]
    lam = path_algebra_over(x.algebra, x.quiver)
    info = lam.path_info
    f = x.algebra.field
    off = offsets(x)
    d = off[-1]
    da = x.algebra.dim
    act = f.zeros((lam.dim, d, d))
    if d:
        for kp, p in enumerate(info.paths):
            s, e = p.start, p.end
            if x.branches[s].dim == 0 or x.branches[e].dim == 0:
                continue
            Xp = path_map(x, p).a
            block = f.reduce(np.einsum("uij,jk->uik", x.branches[e].act, Xp))
            act[kp * da : (kp + 1) * da, off[e] : off[e + 1], off[s] : off[s + 1]] = block
    mod = AModule(lam, act, validate=False)
    x._cache["flat"] = mod
    return mod


def from_flat_module(m: AModule, algebra: Algebra | None = None, quiver: Quiver | None = None) -> Representation:
    """Branches X_i = (1 e_i) m and arrow maps from the action of 1 alpha."""
    lam = m.algebra
    info = lam.path_info
    if info is None:
        raise RepresentationError("module is not over a path algebra AQ")
    a, q = info.base, info.quiver
    f = a.field
    da = a.dim
    bases = []
    for i in range(q.n):
        k = info.index[q.trivial(i)]
        e = f.zeros(lam.dim)
        e[k * da : (k + 1) * da] = a.unit
        bases.append(column_basis(Matrix(f, m.rho(e), trusted=True)) if m.dim else Matrix.zeros(f, 0, 0))
    T = hstack(f, bases, m.dim)
    Ti = inverse(T) if m.dim else T
    off = np.cumsum([0] + [b.cols for b in bases]).tolist()
    branches = []
    for i in range(q.n):
        k = info.index[q.trivial(i)]
        B = bases[i]
        rows = Ti.a[off[i] : off[i + 1]]
        act = f.reduce(np.einsum("ij,ujk,kl->uil", rows, m.act[k * da : (k + 1) * da], B.a)) if B.cols else f.zeros((da, 0, 0))
        branches.append(AModule(a, act, validate=False))
    arrows = {}
    for arr in q.arrows:
        k = info.index[q.arrow_path(arr.name)]
        e = f.zeros(lam.dim)
        e[k * da : (k + 1) * da] = a.unit
        rows = Ti.a[off[arr.target] : off[arr.target + 1]]
        mat = f.reduce(rows.dot(m.rho(e)).dot(bases[arr.source].a)) if m.dim else f.zeros((0, 0))
        arrows[arr.name] = Matrix(f, mat.reshape(off[arr.target + 1] - off[arr.target], bases[arr.source].cols), trusted=True)
    return Representation(a, q, branches, arrows)


def direct_sum(x: Representation, y: Representation) -> Representation:
    if x.algebra is not y.algebra or x.quiver != y.quiver:
        raise RepresentationError("direct sum of representations over different data")
    f = x.algebra.field
    branches = [module_direct_sum([b, c], x.algebra) for b, c in zip(x.branches, y.branches)]
    arrows = {n: block_diag(f, [x.arrows[n], y.arrows[n]]) for n in x.arrows}
    return Representation(x.algebra, x.quiver, branches, arrows)


def relabelled(x: Representation) -> tuple[Representation, list[int]]:
    """Copy of x over the topologically labelled quiver, with the vertex order used."""
    order = _kahn(x.quiver)
    if order == list(range(x.quiver.n)):
        return x, order
    q = x.quiver.relabel(order)
    return Representation(x.algebra, q, [x.branches[o] for o in order], x.arrows), order


# -- kernels and cokernels ----------------------------------------------------


def subrepresentation(x: Representation, bases: Sequence[Matrix]) -> Representation:
    """Subrepresentation on invariant subspaces given by independent columns."""
    f = x.algebra.field
    from .exactlin import left_inverse

    branches = [x.branches[i].submodule(B) for i, B in enumerate(bases)]
    arrows = {}
    for a in x.quiver.arrows:
        Bs, Bt = bases[a.source], bases[a.target]
        if Bt.cols == 0 or Bs.cols == 0:
            arrows[a.name] = Matrix.zeros(f, Bt.cols, Bs.cols)
        else:
            arrows[a.name] = left_inverse(Bt) @ x.arrows[a.name] @ Bs
    return Representation(x.algebra, x.quiver, branches, arrows)


def quotient_representation(x: Representation, subs: Sequence[Matrix]) -> tuple[Representation, list[Matrix]]:
    """x divided by invariant subspaces ``subs``; returns (quotient, projections)."""
    branches, projs, sections = [], [], []
    for i, S in enumerate(subs):
        mod, proj, sec = x.branches[i].quotient(S)
        branches.append(mod)
        projs.append(proj)
        sections.append(sec)
    arrows = {a.name: projs[a.target] @ x.arrows[a.name] @ sections[a.source] for a in x.quiver.arrows}
    return Representation(x.algebra, x.quiver, branches, arrows), projs


def kernel(fm: RepMorphism) -> tuple[Representation, RepMorphism]:
    f = fm.source.algebra.field
    bases = [kernel_basis(c) if c.cols else Matrix.zeros(f, 0, 0) for c in fm.components]
    k = subrepresentation(fm.source, bases)
    return k, RepMorphism(k, fm.source, list(bases))


def cokernel(fm: RepMorphism) -> tuple[Representation, RepMorphism]:
    f = fm.source.algebra.field
    images = [column_basis(c) if c.rows and c.cols else Matrix.zeros(f, c.rows, 0) for c in fm.components]
    c, projs = quotient_representation(fm.target, images)
    return c, RepMorphism(fm.target, c, projs)


def rep_hom_space(x: Representation, y: Representation) -> list[RepMorphism]:
    """Basis of morphisms x -> y, computed on the flat modules."""
    fx, fy = to_flat_module(x), to_flat_module(y)
    ox, oy = offsets(x), offsets(y)
    out = []
    for h in hom_space(fx, fy):
        comps = [h.block(oy[i], oy[i + 1], ox[i], ox[i + 1]) for i in range(x.quiver.n)]
        out.append(RepMorphism(x, y, comps))
    return out


# -- projectives and path-shaped representations ------------------------------


def path_representation(a: Algebra, q: Quiver, start: int, z: AModule, include_trivial: bool) -> tuple[Representation, list[list[Path]]]:
    """Branch at t is z^{#paths start -> t} (nontrivial paths only unless
    ``include_trivial``); arrows shift the path-indexed blocks by identity maps.
    """
    f = a.field
    dz = z.dim
    plists = []
    for t in range(q.n):
        ps = paths_between(q, start, t)
        if not include_trivial:
            ps = [p for p in ps if not p.is_trivial]
        plists.append(ps)
    branches = [module_direct_sum([z] * len(ps), a) for ps in plists]
    arrows = {}
    for arr in q.arrows:
        src, tgt = plists[arr.source], plists[arr.target]
        m = f.zeros((len(tgt) * dz, len(src) * dz))
        tindex = {p: k for k, p in enumerate(tgt)}
        for k, p in enumerate(src):
            w = Path(p.start, arr.target, p.arrows + (arr.name,))
            kk = tindex[w]
            m[kk * dz : (kk + 1) * dz, k * dz : (k + 1) * dz] = f.eye(dz)
        arrows[arr.name] = Matrix(f, m, trusted=True)
    return Representation(a, q, branches, arrows), plists


def indecomposable_projective(l: AModule, q: Quiver, i: int) -> Representation:
    """L (x) P(i): branch at t is L^{#paths i -> t}."""
    if not is_acyclic(q):
        raise CyclicQuiver("projective representations need an acyclic quiver")
    return path_representation(l.algebra, q, i, l, True)[0]


# -- top-vertex split ---------------------------------------------------------


@dataclass
class TopSplit:
    """X = (X', X_n, phi) with phi : P (x)_A X_n -> X' over Q' = Q minus n."""

    vertex: int  # index of n in the original quiver
    quiver: Quiver  # original quiver
    sub_quiver: Quiver
    x_prime: Representation
    x_n: AModule
    domain: Representation  # P (x) X_n as a representation of Q'
    phi: RepMorphism
    paths: list[list[Path]]  # per Q' vertex, the paths n -> i in block order


def top_vertex(q: Quiver) -> int:
    """A source of largest topological label."""
    return _kahn(q)[-1]


def split_top_vertex(x: Representation, n: int | None = None) -> TopSplit:
    q = x.quiver
    if not is_acyclic(q):
        raise CyclicQuiver("the top-vertex split needs an acyclic quiver")
    if n is None:
        n = top_vertex(q)
    if q.incoming(n):
        raise RepresentationError(f"vertex {q.vertices[n]} is not a source")
    a = x.algebra
    f = a.field
    keep = [i for i in range(q.n) if i != n]
    qp = q.delete_vertex(n)
    x_prime = Representation(a, qp, [x.branches[i] for i in keep], {arr.name: x.arrows[arr.name] for arr in qp.arrows})
    xn = x.branches[n]
    # P (x) X_n over Q', built on Q and then restricted
    full, plists = path_representation(a, q, n, xn, False)
    domain = Representation(a, qp, [full.branches[i] for i in keep], {arr.name: full.arrows[arr.name] for arr in qp.arrows})
    comps = []
    for i in keep:
        maps = [path_map(x, p) for p in plists[i]]
        comps.append(hstack(f, maps, x.branches[i].dim))
    phi = RepMorphism(domain, x_prime, comps)
    return TopSplit(n, q, qp, x_prime, xn, domain, phi, [plists[i] for i in keep])


def join_top_vertex(split: TopSplit, x_prime: Representation | None = None, x_n: AModule | None = None,
                    phi_components: Sequence[Matrix] | None = None) -> Representation:
    """Reassemble X from (X', X_n, phi); arrows out of n are the length-one blocks of phi."""
    q, n = split.quiver, split.vertex
    xp = split.x_prime if x_prime is None else x_prime
    xn = split.x_n if x_n is None else x_n
    comps = split.phi.components if phi_components is None else list(phi_components)
    keep = [i for i in range(q.n) if i != n]
    pos = {old: new for new, old in enumerate(keep)}
    branches = [xn if i == n else xp.branches[pos[i]] for i in range(q.n)]
    arrows = {}
    dz = xn.dim
    for arr in q.arrows:
        if arr.source == n:
            j = pos[arr.target]
            k = split.paths[j].index(Path(n, arr.target, (arr.name,)))
            arrows[arr.name] = comps[j].col_slice(k * dz, (k + 1) * dz)
        else:
            arrows[arr.name] = xp.arrows[arr.name]
    return Representation(xp.algebra, q, branches, arrows)


def tensor_bimodule(m: Bimodule, y: AModule) -> AModule:
    """M (x)_B Y with its induced left action."""
    return balanced_tensor(m, y)[0]


def path_tensor_iso(split: TopSplit) -> Matrix:
    """Explicit Lambda'-isomorphism from P (x)_A X_n (balanced tensor of the path
    bimodule) onto the flat module of the phi-domain.
    """
    q, n = split.quiver, split.vertex
    a = split.x_n.algebra
    f = a.field
    P, lam_p, from_n = path_bimodule(a, q, n)
    z = split.x_n
    dz, da = z.dim, a.dim
    tens, proj, section = balanced_tensor(P, z)
    dom_flat = to_flat_module(split.domain)
    keep = [i for i in range(q.n) if i != n]
    pos = {old: new for new, old in enumerate(keep)}
    off = offsets(split.domain)
    F = f.zeros((dom_flat.dim, P.dim * dz))
    for kp, p in enumerate(from_n):
        j = pos[p.end]
        blk = split.paths[j].index(p)
        base = off[j] + blk * dz
        for u in range(da):
            for t in range(dz):
                F[base : base + dz, (kp * da + u) * dz + t] = z.act[u][:, t]
    Fm = Matrix(f, F, trusted=True)
    iso = Fm @ section
    if tens.dim != dom_flat.dim or rank(iso) != tens.dim:
        raise ArithmeticError("path tensor comparison is not an isomorphism")
    if not tens.over(dom_flat.algebra).is_linear_map_to(dom_flat, iso):
        raise ArithmeticError("path tensor comparison is not Lambda'-linear")
    return iso
