"""Windows of complete projective resolutions.

Over a base algebra R a Gorenstein-projective Z gets the window spliced from its
minimal projective resolution and the dual of the minimal resolution of Z*.  Over
Lambda = AQ the window is assembled at the top vertex n from windows of
C = Coker phi over Lambda' and of X_n over A:

    L^i = (P^i (+) F(Q^i), Q^i),   d_L^i = [[d^i, 0], [sigma^i, F(d'^i)]]  on the Q' part,

where F = P (x)_A - and the comparison maps sigma^i are found by solving linear
systems in Hom spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import Algebra
from .exactlin import Matrix, block_diag, column_basis, hstack, inverse, rank, solve, vstack
from .homological import (
    dual_map,
    dual_star,
    evaluation_map,
    hom_space,
    projective_cover,
    resolution,
)
from .modules import AModule
from .quiver import Quiver
from .repmod import (
    Representation,
    TopSplit,
    cokernel,
    direct_sum,
    join_top_vertex,
    path_representation,
    split_top_vertex,
    to_flat_module,
)


class LiftFailed(ArithmeticError):
    """A step of the window assembly has no solution; the input is not a certificate."""

    def __init__(self, stage: str, detail: str = "") -> None:
        super().__init__(f"{stage}: {detail}" if detail else stage)
        self.stage = stage
        self.detail = detail


class WindowTooShort(ValueError):
    pass


@dataclass
class ResolutionWindow:
    """Terms P^i for -N <= i <= N with d^i : P^i -> P^{i+1}.

    ``embed`` identifies the module Z with Ker d^0 and ``cover`` : P^{-1} -> Z
    satisfies d^{-1} = embed cover.
    """

    algebra: Algebra
    N: int
    module: AModule
    modules: dict[int, AModule]
    differentials: dict[int, Matrix]
    embed: Matrix
    cover: Matrix
    reps: dict[int, Representation] | None = None
    quiver: Quiver | None = None
    levels: list[str] = field(default_factory=list)

    @property
    def degrees(self) -> range:
        return range(-self.N, self.N + 1)

    def dims(self) -> dict[int, int]:
        return {i: m.dim for i, m in self.modules.items()}


# -- hom-space parametrization ------------------------------------------------


def _projective_homs(p: AModule, t: AModule) -> list[Matrix]:
    """Basis of Hom(p, t) for projective p, via generator images in e_i t."""
    f = p.algebra.field
    P, eps = projective_cover(p)
    if P.dim != p.dim:
        raise LiftFailed("projectivity", "a window term is not projective")
    if p.dim == 0:
        return []
    einv = inverse(eps)
    es = p.algebra.require_idempotents()
    zero = [f.zeros(t.dim) for _ in P.idems]
    out = []
    for k, i in enumerate(P.idems):
        if t.dim == 0:
            continue
        E = column_basis(Matrix(f, t.rho(es[i]), trusted=True))
        for c in range(E.cols):
            images = list(zero)
            images[k] = E.a[:, c].copy()
            out.append(P.map_to(t, images) @ einv)
    return out


def _solve_linear(stage: str, basis: list[Matrix], op: Callable[[Matrix], Matrix], target: Matrix,
                  shape: tuple[int, int]) -> Matrix:
    """The combination h of ``basis`` with op(h) = target."""
    f = target.field
    if target.rows * target.cols == 0:
        return Matrix.zeros(f, *shape)
    if not basis:
        if target.is_zero():
            return Matrix.zeros(f, *shape)
        raise LiftFailed(stage, "no maps available")
    A = Matrix._wrap(f, np.stack([op(b).a.reshape(-1) for b in basis], axis=1))
    rhs = Matrix(f, target.a.reshape(-1, 1).copy(), trusted=True)
    sol = solve(A, rhs)
    if sol is None:
        raise LiftFailed(stage, "linear system is inconsistent")
    acc = f.zeros(shape)
    for c, b in zip(sol.a[:, 0], basis):
        if c != 0:
            acc = acc + c * b.a
    return Matrix._wrap(f, acc)


# -- base window --------------------------------------------------------------


def _res_map(res, j: int, rows: int, cols: int, f) -> Matrix:
    res.extend(j)
    if j < len(res.maps):
        return res.maps[j]
    return Matrix.zeros(f, rows, cols)


def base_window(z: AModule, N: int) -> ResolutionWindow:
    """Splice the minimal resolution of z with the dual of that of z*."""
    if N < 1:
        raise WindowTooShort("a window needs N >= 1")
    a = z.algebra
    f = a.field
    bidual, ev = evaluation_map(z)
    if bidual.dim != z.dim or rank(ev) != z.dim:
        raise LiftFailed("base-reflexive", "the evaluation map is not an isomorphism")
    left = resolution(z)
    left.extend(N)
    modules: dict[int, AModule] = {}
    diffs: dict[int, Matrix] = {}
    for j in range(N):
        modules[-1 - j] = left.term(j).module
    for j in range(N - 1):
        src, tgt = modules[-2 - j], modules[-1 - j]
        diffs[-2 - j] = _res_map(left, j + 1, tgt.dim, src.dim, f)
    eps = _res_map(left, 0, z.dim, modules[-1].dim, f)

    zs = dual_star(z).module
    right = resolution(zs)
    right.extend(N + 1)
    qs = [right.term(j).module for j in range(N + 1)]
    for j in range(N + 1):
        d = dual_star(qs[j]).module
        if d.algebra is not a:
            d = d.over(a)
        modules[j] = d
    for j in range(N):
        dj = _res_map(right, j + 1, qs[j].dim, qs[j + 1].dim, f)
        diffs[j] = dual_map(dj, qs[j + 1], qs[j])
    eps_r = _res_map(right, 0, zs.dim, qs[0].dim, f)
    embed = dual_map(eps_r, qs[0], zs) @ ev
    diffs[-1] = embed @ eps
    return ResolutionWindow(a, N, z, modules, diffs, embed, eps, levels=["base"])


def _single_vertex(w: ResolutionWindow, x: Representation) -> ResolutionWindow:
    """Re-read a base window over A as a window of one-vertex representations."""
    a, q = x.algebra, x.quiver
    reps = {i: Representation(a, q, [m], {}) for i, m in w.modules.items()}
    modules = {i: to_flat_module(r) for i, r in reps.items()}
    return ResolutionWindow(modules[0].algebra, w.N, to_flat_module(x), modules, w.differentials,
                            w.embed, w.cover, reps, q, list(w.levels))


# -- assembly over AQ ---------------------------------------------------------


def _F(split: TopSplit, z: AModule) -> Representation:
    """P (x)_A z as a representation of Q'."""
    q, n = split.quiver, split.vertex
    full, _ = path_representation(z.algebra, q, n, z, False)
    keep = [i for i in range(q.n) if i != n]
    qp = split.sub_quiver
    return Representation(z.algebra, qp, [full.branches[i] for i in keep], {arr.name: full.arrows[arr.name] for arr in qp.arrows})


def _F_map(split: TopSplit, fmap: Matrix) -> Matrix:
    """F(f) in flat coordinates: one copy of f per path block."""
    blocks = []
    for plist in split.paths:
        blocks.extend([fmap] * len(plist))
    return block_diag(fmap.field, blocks) if blocks else Matrix.zeros(fmap.field, 0, 0)


def _components(m: Matrix, src: Representation, tgt: Representation) -> list[Matrix]:
    so = np.cumsum([0] + src.dims).tolist()
    to = np.cumsum([0] + tgt.dims).tolist()
    return [m.block(to[v], to[v + 1], so[v], so[v + 1]) for v in range(len(src.dims))]


def _glue(split: TopSplit, pc: Representation, fq: Representation, qn: AModule) -> Representation:
    """(P (+) F(Q), Q) with phi the inclusion of F(Q)."""
    f = qn.algebra.field
    xp = direct_sum(pc, fq)
    comps = []
    for v in range(len(pc.dims)):
        top = Matrix.zeros(f, pc.dims[v], fq.dims[v])
        comps.append(vstack(f, [top, Matrix.identity(f, fq.dims[v])], fq.dims[v]))
    return join_top_vertex(split, xp, qn, comps)


def _lambda_morphism(split: TopSplit, a_parts: list[Matrix], n_part: Matrix) -> list[Matrix]:
    """Per-vertex components over Q from Q'-components and the vertex-n map."""
    q, n = split.quiver, split.vertex
    out, k = [], 0
    for v in range(q.n):
        if v == n:
            out.append(n_part)
        else:
            out.append(a_parts[k])
            k += 1
    return out


def _two_by_two(f, tl: Matrix, tr: Matrix, bl: Matrix, br: Matrix) -> Matrix:
    top = hstack(f, [tl, tr], tl.rows)
    bot = hstack(f, [bl, br], bl.rows)
    return vstack(f, [top, bot], tl.cols + tr.cols)


def complete_resolution_window(x: Representation, N: int = 3) -> ResolutionWindow:
    """Window of a complete projective resolution of the flat module of x.

    Raises LiftFailed when some step has no solution, as happens when x is not
    Gorenstein-projective.
    """
    if N < 1:
        raise WindowTooShort("a window needs N >= 1")
    q = x.quiver
    if q.n == 1:
        return _single_vertex(base_window(x.branches[0], N), x)
    split = split_top_vertex(x)
    a = x.algebra
    f = a.field
    label = q.vertices[split.vertex]
    for v, c in enumerate(split.phi.components):
        if c.cols and rank(c) != c.cols:
            raise LiftFailed("phi-injectivity", f"phi is not injective at vertex {split.sub_quiver.vertices[v]} "
                                                f"after splitting off vertex {label}")
    C, proj = cokernel(split.phi)
    WC = complete_resolution_window(C, N)
    WY = base_window(split.x_n, N)

    Fq = {i: _F(split, WY.modules[i]) for i in WY.degrees}
    Fd = {i: _F_map(split, WY.differentials[i]) for i in range(-N, N)}
    Pm = WC.modules
    FQm = {i: to_flat_module(r) for i, r in Fq.items()}
    Xp = to_flat_module(split.x_prime)
    phi = split.phi.flat()
    qmap = proj.flat()

    # g : X' -> F(Q^0) with g phi = F(iota_Y)
    g = _solve_linear("extend-along-phi", hom_space(Xp, FQm[0]), lambda h: h @ phi,
                      _F_map(split, WY.embed), (FQm[0].dim, Xp.dim))
    sigma: dict[int, Matrix] = {}
    iq = WC.embed @ qmap
    sigma[0] = _solve_linear("sigma^0", _projective_homs(Pm[0], FQm[1]), lambda h: h @ iq,
                             -(Fd[0] @ g), (FQm[1].dim, Pm[0].dim))
    for i in range(1, N):
        d_prev = WC.differentials[i - 1]
        sigma[i] = _solve_linear(f"sigma^{i}", _projective_homs(Pm[i], FQm[i + 1]), lambda h, d=d_prev: h @ d,
                                 -(Fd[i] @ sigma[i - 1]), (FQm[i + 1].dim, Pm[i].dim))
    ell = _solve_linear("lift-cover", _projective_homs(Pm[-1], Xp), lambda h: qmap @ h,
                        WC.cover, (Xp.dim, Pm[-1].dim))
    sigma[-1] = g @ ell
    for i in range(-2, -N - 1, -1):
        fd = Fd[i + 1]
        sigma[i] = _solve_linear(f"sigma^{i}", _projective_homs(Pm[i], FQm[i + 1]), lambda h, d=fd: d @ h,
                                 -(sigma[i + 1] @ WC.differentials[i]), (FQm[i + 1].dim, Pm[i].dim))

    reps = {i: _glue(split, WC.reps[i], Fq[i], WY.modules[i]) for i in range(-N, N + 1)}
    modules = {i: to_flat_module(r) for i, r in reps.items()}
    diffs = {}
    for i in range(-N, N):
        big = _two_by_two(f, WC.differentials[i], Matrix.zeros(f, Pm[i + 1].dim, FQm[i].dim), sigma[i], Fd[i])
        src = _sum_rep_dims(WC.reps[i], Fq[i])
        tgt = _sum_rep_dims(WC.reps[i + 1], Fq[i + 1])
        parts = _components(_sum_coords(big, WC.reps[i], Fq[i], WC.reps[i + 1], Fq[i + 1]), src, tgt)
        comps = _lambda_morphism(split, parts, WY.differentials[i])
        diffs[i] = block_diag(f, comps)
    emb_top = vstack(f, [iq, g], Xp.dim)
    emb_parts = _components(_sum_coords_rows(emb_top, WC.reps[0], Fq[0]), split.x_prime, _sum_rep_dims(WC.reps[0], Fq[0]))
    embed = block_diag(f, _lambda_morphism(split, emb_parts, WY.embed))
    cov_top = hstack(f, [ell, phi @ _F_map(split, WY.cover)], Xp.dim)
    cov_parts = _components(_sum_coords_cols(cov_top, WC.reps[-1], Fq[-1]), _sum_rep_dims(WC.reps[-1], Fq[-1]), split.x_prime)
    cover = block_diag(f, _lambda_morphism(split, cov_parts, WY.cover))
    lam = modules[0].algebra
    return ResolutionWindow(lam, N, to_flat_module(x), modules, diffs, embed, cover, reps, q,
                            WC.levels + [f"split {label}"])


# The Q'-part of L^i is P^i (+) F(Q^i) with P^i block first; its flat module is
# ordered vertex by vertex.  These helpers permute between the two orders.


class _Dims:
    def __init__(self, dims: list[int]) -> None:
        self.dims = dims


def _sum_rep_dims(p: Representation, fq: Representation) -> _Dims:
    return _Dims([a + b for a, b in zip(p.dims, fq.dims)])


def _perm(p: Representation, fq: Representation) -> np.ndarray:
    """perm[k] = block-order index of the k-th vertex-order coordinate."""
    pd, fd = p.dims, fq.dims
    po = np.cumsum([0] + pd).tolist()
    fo = np.cumsum([0] + fd).tolist()
    total_p = po[-1]
    out = []
    for v in range(len(pd)):
        out.extend(range(po[v], po[v + 1]))
        out.extend(range(total_p + fo[v], total_p + fo[v + 1]))
    return np.array(out, dtype=np.int64)


def _sum_coords(m: Matrix, p: Representation, fq: Representation, p2: Representation, fq2: Representation) -> Matrix:
    cols = _perm(p, fq)
    rows = _perm(p2, fq2)
    return Matrix(m.field, m.a[np.ix_(rows, cols)].copy(), trusted=True)


def _sum_coords_rows(m: Matrix, p: Representation, fq: Representation) -> Matrix:
    rows = _perm(p, fq)
    return Matrix(m.field, m.a[rows, :].copy(), trusted=True)


def _sum_coords_cols(m: Matrix, p: Representation, fq: Representation) -> Matrix:
    cols = _perm(p, fq)
    return Matrix(m.field, m.a[:, cols].copy(), trusted=True)


# -- verification -------------------------------------------------------------


@dataclass
class WindowCheck:
    d_squared_zero: bool
    interior_exact: bool
    kernel_matches: bool
    projective_terms: bool
    hom_exact: bool

    @property
    def ok(self) -> bool:
        return all(self.__dict__.values())

    def to_json(self) -> dict:
        return dict(self.__dict__, ok=self.ok)


def _rk(m: Matrix) -> int:
    return rank(m) if m.rows and m.cols else 0


def verify_window(w: ResolutionWindow) -> WindowCheck:
    f = w.algebra.field
    N = w.N
    d = w.differentials
    dd = all((d[i + 1] @ d[i]).is_zero() for i in range(-N, N - 1))
    exact = all(_rk(d[i - 1]) + _rk(d[i]) == w.modules[i].dim for i in range(-N + 1, N))
    emb = w.embed
    kernel_ok = (
        _rk(emb) == w.module.dim
        and (d[0] @ emb).is_zero()
        and _rk(d[0]) + w.module.dim == w.modules[0].dim
        and (emb @ w.cover) == d[-1]
    )
    proj_ok = True
    homs = {}
    reg = AModule.regular(w.algebra)
    for i in w.degrees:
        try:
            homs[i] = _projective_homs(w.modules[i], reg)
        except LiftFailed:
            proj_ok = False
    hom_ok = False
    if proj_ok:
        # d^{i*} : Hom(P^{i+1}, Lambda) -> Hom(P^i, Lambda), h -> h d^i
        dual = {}
        for i in range(-N, N):
            src, tgt = homs[i + 1], homs[i]
            if not src or not tgt:
                dual[i] = Matrix.zeros(f, len(tgt), len(src))
                continue
            H = Matrix._wrap(f, np.stack([b.a.reshape(-1) for b in tgt], axis=1))
            imgs = Matrix._wrap(f, np.stack([(h @ d[i]).a.reshape(-1) for h in src], axis=1))
            sol = solve(H, imgs)
            if sol is None:
                raise ArithmeticError("dual differential leaves the Hom space")
            dual[i] = sol
        hom_ok = all(_rk(dual[i - 1]) + _rk(dual[i]) == len(homs[i]) for i in range(-N + 1, N))
    return WindowCheck(dd, exact, kernel_ok, proj_ok, hom_ok)

