"""Hom spaces, minimal projective resolutions, Ext, the duality (-)* = Hom_A(-, A),
algebra classification, and the Gorenstein-projective decision ladder.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .algebra import Algebra, MissingIdempotents, opposite
from .exactlin import (
    Matrix,
    block_diag,
    column_basis,
    hstack,
    in_span,
    kernel_basis,
    rank,
    solve,
)
from .modules import AModule, direct_sum, radical_image, submodule_generated

DEFAULT_BOUND = 8


# -- Hom ----------------------------------------------------------------------


def hom_space(x: AModule, y: AModule) -> list[Matrix]:
    """Basis of Hom_A(x, y); each map is a (dim y) x (dim x) matrix."""
    a = x.algebra
    if y.algebra is not a:
        raise ValueError("modules over different algebras")
    f = a.field
    m, n = y.dim, x.dim
    if m == 0 or n == 0:
        return []
    eye_m, eye_n = f.eye(m), f.eye(n)
    rows = [np.kron(y.act[g], eye_n) - np.kron(eye_m, x.act[g].T) for g in a.generators()]
    if not rows:
        K = Matrix.identity(f, m * n)
    else:
        K = kernel_basis(Matrix._wrap(f, np.concatenate(rows, axis=0)))
    return [Matrix(f, K.a[:, k].reshape(m, n).copy(), trusted=True) for k in range(K.cols)]


def _solve_in_span(basis: list[Matrix], target: Matrix) -> np.ndarray | None:
    """Coefficients c with sum c_k basis[k] = target, or None."""
    f = target.field
    if not basis:
        return np.zeros(0, dtype=f.dtype) if target.is_zero() else None
    B = Matrix(f, np.stack([b.a.reshape(-1) for b in basis], axis=1), trusted=True)
    sol = solve(B, Matrix(f, target.a.reshape(-1, 1).copy(), trusted=True))
    return None if sol is None else sol.a[:, 0]


def combine(basis: list[Matrix], coeffs: np.ndarray, shape: tuple[int, int], field_) -> Matrix:
    out = field_.zeros(shape)
    for c, b in zip(coeffs, basis):
        if c != 0:
            out = out + c * b.a
    return Matrix._wrap(field_, out)


# -- projectives --------------------------------------------------------------


@dataclass
class _IdemProjective:
    basis: Matrix  # columns span A e_i inside A
    module: AModule
    gen: np.ndarray  # coordinates of e_i in ``basis``


def idempotent_projective(a: Algebra, i: int) -> _IdemProjective:
    key = ("idem_projective", i)
    if key not in a._cache:
        f = a.field
        e = a.require_idempotents()[i]
        B = column_basis(Matrix(f, a.right(e), trusted=True))
        li = solve(B, Matrix(f, np.concatenate([e.reshape(-1, 1)], axis=1), trusted=True))
        mod = AModule.regular(a).submodule(B)
        a._cache[key] = _IdemProjective(B, mod, li.a[:, 0])
    return a._cache[key]


class ProjectiveSum:
    """P = A e_{i_1} (+) ... (+) A e_{i_r}, coordinates block by block."""

    def __init__(self, algebra: Algebra, idems: tuple[int, ...]) -> None:
        self.algebra = algebra
        self.idems = tuple(idems)
        parts = [idempotent_projective(algebra, i) for i in self.idems]
        self.parts = parts
        self.offsets = np.cumsum([0] + [p.basis.cols for p in parts]).tolist()
        self.module = direct_sum([p.module for p in parts], algebra)

    @property
    def dim(self) -> int:
        return self.module.dim

    def generator(self, k: int) -> np.ndarray:
        v = self.algebra.field.zeros(self.dim)
        v[self.offsets[k] : self.offsets[k + 1]] = self.parts[k].gen
        return v

    def components(self, v: np.ndarray) -> list[np.ndarray]:
        """A-coordinates of each summand component of ``v``."""
        f = self.algebra.field
        return [f.reduce(p.basis.a.dot(v[self.offsets[k] : self.offsets[k + 1]])) for k, p in enumerate(self.parts)]

    def map_to(self, y: AModule, images: list[np.ndarray]) -> Matrix:
        """The A-map P -> y sending generator k to images[k] (which must lie in e_{i_k} y)."""
        f = self.algebra.field
        cols = []
        for k, p in enumerate(self.parts):
            for c in range(p.basis.cols):
                cols.append(y.rho(p.basis.a[:, c]).dot(images[k]) if y.dim else f.zeros(0))
        if not cols:
            return Matrix.zeros(f, y.dim, 0)
        return Matrix._wrap(f, np.stack(cols, axis=1))


class MinimalResolution:
    """Minimal projective resolution ... -> P_1 -> P_0 -> x, extended lazily."""

    def __init__(self, x: AModule) -> None:
        self.x = x
        self.terms: list[ProjectiveSum] = []
        self.maps: list[Matrix] = []  # maps[0] = augmentation P_0 -> x, maps[j] = d_j : P_j -> P_{j-1}
        self._kernel: Matrix | None = None  # syzygy basis inside the last term
        self._last_target: AModule = x

    def extend(self, length: int) -> None:
        """Ensure terms P_0..P_length exist (or the resolution has terminated)."""
        f = self.x.algebra.field
        while len(self.terms) <= length:
            if self.terms and self._kernel is not None and self._kernel.cols == 0:
                return
            if not self.terms:
                target = self.x
            else:
                target = self.terms[-1].module.submodule(self._kernel)
            P, eps = projective_cover(target)
            if self.terms:
                d = Matrix._wrap(f, self._kernel.a.dot(eps.a)) if eps.cols else Matrix.zeros(f, self.terms[-1].dim, 0)
            else:
                d = eps
            self.terms.append(P)
            self.maps.append(d)
            self._kernel = kernel_basis(eps) if P.dim else Matrix.zeros(f, 0, 0)

    def length_bound(self, limit: int) -> int | None:
        """Projective dimension if it is at most ``limit``, else None."""
        self.extend(limit + 1)
        for j, P in enumerate(self.terms):
            if P.dim == 0:
                return max(j - 1, 0)
        if len(self.terms) <= limit + 1 and self._kernel is not None and self._kernel.cols == 0:
            return len(self.terms) - 1
        return None

    def term(self, j: int) -> ProjectiveSum:
        self.extend(j)
        if j < len(self.terms):
            return self.terms[j]
        return ProjectiveSum(self.x.algebra, ())


def resolution(x: AModule) -> MinimalResolution:
    if "resolution" not in x._cache:
        x._cache["resolution"] = MinimalResolution(x)
    return x._cache["resolution"]


def projective_cover(x: AModule) -> tuple[ProjectiveSum, Matrix]:
    """Minimal projective cover: one summand A e_i per simple summand S_i of the top."""
    a = x.algebra
    f = a.field
    es = a.require_idempotents()
    if x.dim == 0:
        return ProjectiveSum(a, ()), Matrix.zeros(f, 0, 0)
    covered = radical_image(x)
    idems: list[int] = []
    images: list[np.ndarray] = []
    for i, e in enumerate(es):
        ex = column_basis(Matrix(f, x.rho(e), trusted=True))
        for c in range(ex.cols):
            v = ex.col(c)
            if not in_span(covered, v):
                idems.append(i)
                images.append(v.a[:, 0].copy())
                covered = column_basis(hstack(f, [covered, submodule_generated(x, v)], x.dim))
        if covered.cols == x.dim:
            break
    P = ProjectiveSum(a, tuple(idems))
    return P, P.map_to(x, images)


def is_projective(x: AModule) -> bool:
    P, _ = projective_cover(x)
    return P.dim == x.dim


def syzygy(x: AModule) -> AModule:
    P, eps = projective_cover(x)
    return P.module.submodule(kernel_basis(eps))


def simple_module(a: Algebra, i: int) -> AModule:
    key = ("simple", i)
    if key not in a._cache:
        P = idempotent_projective(a, i).module
        a._cache[key] = P.quotient(radical_image(P))[0]
    return a._cache[key]


# -- Ext ----------------------------------------------------------------------


def _cochain_map(dmap: Matrix, src: ProjectiveSum, tgt: ProjectiveSum, y: AModule) -> np.ndarray:
    """Matrix of Hom(tgt, y) -> Hom(src, y), f -> f o dmap, in y^{r} coordinates."""
    f = y.algebra.field
    dy = y.dim
    out = f.zeros((len(src.idems) * dy, len(tgt.idems) * dy))
    for k in range(len(src.idems)):
        comps = tgt.components(f.reduce(dmap.a.dot(src.generator(k))))
        for l, c in enumerate(comps):
            if np.any(c != 0):
                out[k * dy : (k + 1) * dy, l * dy : (l + 1) * dy] = y.rho(c)
    return f.reduce(out)


def _hom_basis(P: ProjectiveSum, y: AModule) -> Matrix:
    """Columns spanning (+)_k e_{i_k} y inside y^{r}."""
    f = y.algebra.field
    es = y.algebra.require_idempotents()
    blocks = [Matrix(f, y.rho(es[i]), trusted=True) for i in P.idems]
    if not blocks:
        return Matrix.zeros(f, 0, 0)
    return column_basis(block_diag(f, blocks))


@dataclass
class ExtResult:
    degree: int
    dim: int
    cocycle: list | None = None  # witness coordinates in (+)_k e_{i_k} y when dim > 0

    def to_json(self) -> dict:
        return {"degree": self.degree, "dim": self.dim, "cocycle": self.cocycle}


def ext(x: AModule, y: AModule, i: int) -> ExtResult:
    """Ext^i_A(x, y) from the minimal projective resolution of x."""
    f = x.algebra.field
    res = resolution(x)
    res.extend(i + 1)
    Pi = res.term(i)
    if Pi.dim == 0 or y.dim == 0:
        return ExtResult(i, 0)
    Ei = _hom_basis(Pi, y)
    # outgoing: Hom(P_i, y) -> Hom(P_{i+1}, y)
    Pn = res.term(i + 1)
    if Pn.dim:
        Dout = Matrix._wrap(f, _cochain_map(res.maps[i + 1], Pn, Pi, y))
        Z = Dout @ Ei
        zk = kernel_basis(Z)
        cycles = Matrix._wrap(f, Ei.a.dot(zk.a)) if zk.cols else Matrix.zeros(f, Ei.rows, 0)
    else:
        cycles = Ei
    if i == 0:
        bounds = Matrix.zeros(f, Ei.rows, 0)
    else:
        Pp = res.term(i - 1)
        Din = Matrix._wrap(f, _cochain_map(res.maps[i], Pi, Pp, y))
        bounds = column_basis(Din @ _hom_basis(Pp, y)) if Pp.dim else Matrix.zeros(f, Ei.rows, 0)
    dim = cycles.cols - bounds.cols
    witness = None
    if dim > 0:
        for c in range(cycles.cols):
            v = cycles.col(c)
            if not in_span(bounds, v):
                witness = Matrix(f, v.a.T.copy(), trusted=True).to_json()[0]
                break
    return ExtResult(i, dim, witness)


def ext_dims(x: AModule, y: AModule, top: int, start: int = 1) -> list[int]:
    return [ext(x, y, i).dim for i in range(start, top + 1)]


# -- duality ------------------------------------------------------------------


@dataclass
class Dual:
    module: AModule  # over opposite(A)
    basis: list[Matrix]  # Hom_A(x, A) basis, each dim A x dim x


def dual_star(x: AModule) -> Dual:
    """x* = Hom_A(x, A) as a left A^op-module: (b^op . f)(v) = f(v) b."""
    if "dual" in x._cache:
        return x._cache["dual"]
    a = x.algebra
    f = a.field
    op = opposite(a)
    H = hom_space(x, AModule.regular(a))
    h = len(H)
    if h == 0:
        out = Dual(AModule.zero(op), [])
    else:
        Hm = Matrix(f, np.stack([m.a.reshape(-1) for m in H], axis=1), trusted=True)
        targets = [Matrix._wrap(f, np.stack([a.R[u].dot(m.a).reshape(-1) for m in H], axis=1)) for u in range(a.dim)]
        sol = solve(Hm, hstack(f, targets, Hm.rows))
        act = np.stack([sol.a[:, u * h : (u + 1) * h] for u in range(a.dim)])
        out = Dual(AModule(op, act, validate=False), H)
    x._cache["dual"] = out
    return out


def dual_map(fmap: Matrix, x: AModule, y: AModule) -> Matrix:
    """f* : y* -> x*, g -> g o f, in the hom bases of dual_star."""
    fld = x.algebra.field
    dx, dy = dual_star(x), dual_star(y)
    if not dx.basis or not dy.basis:
        return Matrix.zeros(fld, len(dx.basis), len(dy.basis))
    Hx = Matrix(fld, np.stack([m.a.reshape(-1) for m in dx.basis], axis=1), trusted=True)
    targets = Matrix._wrap(fld, np.stack([g.a.dot(fmap.a).reshape(-1) for g in dy.basis], axis=1))
    sol = solve(Hx, targets)
    if sol is None:
        raise ArithmeticError("dual map does not land in the dual module")
    return sol


def evaluation_map(x: AModule) -> tuple[AModule, Matrix]:
    """(x**, ev : x -> x**) with ev(v)(g) = g(v)."""
    a = x.algebra
    f = a.field
    d1 = dual_star(x)
    d2 = dual_star(d1.module)
    bidual = d2.module.over(a) if d2.module.algebra is not a else d2.module
    if not d2.basis or x.dim == 0:
        return bidual, Matrix.zeros(f, len(d2.basis), x.dim)
    H2 = Matrix(f, np.stack([m.a.reshape(-1) for m in d2.basis], axis=1), trusted=True)
    cols = []
    for v in range(x.dim):
        # ev_v sends the k-th basis map g_k to g_k(e_v) in A
        ev = np.stack([g.a[:, v] for g in d1.basis], axis=1)
        cols.append(ev.reshape(-1))
    sol = solve(H2, Matrix._wrap(f, np.stack(cols, axis=1)))
    if sol is None:
        raise ArithmeticError("evaluation does not land in the bidual")
    return bidual, sol


def is_reflexive(x: AModule) -> bool:
    bidual, ev = evaluation_map(x)
    return bidual.dim == x.dim and rank(ev) == x.dim


# -- classification -----------------------------------------------------------


@dataclass
class AlgebraClassReport:
    self_injective: str
    hereditary: str
    global_dim: int | str
    left_inj_dim: int | str
    right_inj_dim: int | str
    gorenstein: str
    basic: str
    connected: str
    semisimple: str
    bound_used: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _bounded(v: int | None, N: int) -> int | str:
    return f">{N}" if v is None else v


def _inj_dim(a: Algebra, N: int) -> int | None:
    """inj.dim of the regular left module if at most N, else None.

    inj.dim A <= n iff Ext^{n+1}(S, A) = 0 for every simple S.
    """
    reg = AModule.regular(a)
    simples = [simple_module(a, i) for i in range(len(a.idempotents))]
    best = 0
    for i in range(1, N + 2):
        nonzero = any(ext(s, reg, i).dim for s in simples)
        if nonzero:
            if i == N + 1:
                return None
            best = i
    return best


def classify(a: Algebra, bound: int = DEFAULT_BOUND) -> AlgebraClassReport:
    key = ("classify", bound)
    if key in a._cache:
        return a._cache[key]
    N = bound
    if a.idempotents is None or a.radical is None:
        semisimple = "unknown" if a.radical is None else ("yes" if a.radical.cols == 0 else "no")
        rep = AlgebraClassReport("unknown", "unknown", "unknown", "unknown", "unknown", "unknown",
                                 "unknown", "unknown" if a.idempotents is None else _connected(a), semisimple, N)
        a._cache[key] = rep
        return rep
    n_idem = len(a.idempotents)
    pds = [resolution(simple_module(a, i)).length_bound(N) for i in range(n_idem)]
    gl = None if any(p is None for p in pds) else max(pds, default=0)
    left = _inj_dim(a, N)
    right = _inj_dim(opposite(a), N)
    if left is not None and right is not None:
        gor = "yes"
    elif left is None and right is None:
        gor = "unknown"
    else:
        # finite injective dimensions on both sides coincide
        gor = "no"
    hered = "yes" if gl is not None and gl <= 1 else "no"
    rep = AlgebraClassReport(
        self_injective="yes" if left == 0 else "no",
        hereditary=hered,
        global_dim=_bounded(gl, N),
        left_inj_dim=_bounded(left, N),
        right_inj_dim=_bounded(right, N),
        gorenstein=gor,
        basic=_basic(a),
        connected=_connected(a),
        semisimple="yes" if a.radical.cols == 0 else "no",
        bound_used=N,
    )
    a._cache[key] = rep
    return rep


def _corner_outside_radical(a: Algebra, i: int, j: int) -> bool:
    c = a.corner(i, j)
    return c.cols > 0 and not in_span(a.radical, c)


def _basic(a: Algebra) -> str:
    n = len(a.idempotents)
    for i in range(n):
        for j in range(i + 1, n):
            # A e_i and A e_j are isomorphic iff e_j A e_i is not inside the radical
            if _corner_outside_radical(a, j, i):
                return "no"
    return "yes"


def _connected(a: Algebra) -> str:
    n = len(a.idempotents)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j not in seen and (a.corner(i, j).cols or a.corner(j, i).cols):
                seen.add(j)
                stack.append(j)
    return "yes" if len(seen) == n else "no"


# -- GP decisions -------------------------------------------------------------


class Status(str, enum.Enum):
    GP = "GP"
    NOT_GP = "NotGP"
    BOUNDED = "GPUpToBound"


class Route(str, enum.Enum):
    SELF_INJECTIVE = "SelfInjective"
    FINITE_GLOBAL_DIM = "FiniteGlobalDim"
    GORENSTEIN_PERP = "GorensteinPerp"
    BOUNDED_AUSLANDER_BRIDGER = "BoundedAuslanderBridger"
    MONIC_THEOREM = "MonicTheorem"
    TRIANGULAR_THEOREM = "TriangularTheorem"


@dataclass
class GPVerdict:
    status: Status
    route: Route
    bound: int
    witness: dict[str, Any] = field(default_factory=dict)

    @property
    def is_gp(self) -> bool:
        return self.status is Status.GP

    @property
    def is_exact(self) -> bool:
        return self.status is not Status.BOUNDED

    def to_json(self) -> dict:
        return {"status": self.status.value, "route": self.route.value, "bound": self.bound, "witness": self.witness}


def conjoin(statuses: list[Status]) -> Status:
    """NotGP dominates; a bounded verdict poisons GP."""
    if any(s is Status.NOT_GP for s in statuses):
        return Status.NOT_GP
    if any(s is Status.BOUNDED for s in statuses):
        return Status.BOUNDED
    return Status.GP


def _first_nonzero_ext(x: AModule, y: AModule, top: int) -> ExtResult | None:
    for i in range(1, top + 1):
        r = ext(x, y, i)
        if r.dim:
            return r
    return None


def gp_decide_base(a: Algebra, x: AModule, bound: int = DEFAULT_BOUND) -> GPVerdict:
    """Gorenstein-projectivity of x over a, exact where a class shortcut applies."""
    if x.algebra is not a:
        raise ValueError("module is not over the given algebra")
    N = bound
    rep = classify(a, N)
    if rep.self_injective == "unknown":
        raise MissingIdempotents("no decision route without idempotents and radical")
    if rep.self_injective == "yes":
        return GPVerdict(Status.GP, Route.SELF_INJECTIVE, N)
    if isinstance(rep.global_dim, int):
        P, eps = projective_cover(x)
        if P.dim == x.dim:
            return GPVerdict(Status.GP, Route.FINITE_GLOBAL_DIM, N)
        k = kernel_basis(eps)
        return GPVerdict(Status.NOT_GP, Route.FINITE_GLOBAL_DIM, N, {
            "condition": "not projective",
            "syzygy_dim": k.cols,
            "global_dim": rep.global_dim,
        })
    reg = AModule.regular(a)
    if rep.gorenstein == "yes":
        d = rep.left_inj_dim
        bad = _first_nonzero_ext(x, reg, d)
        if bad is None:
            return GPVerdict(Status.GP, Route.GORENSTEIN_PERP, N, {"inj_dim": d})
        return GPVerdict(Status.NOT_GP, Route.GORENSTEIN_PERP, N, {"condition": "Ext(x, A) nonzero", "ext": bad.to_json(), "inj_dim": d})
    route = Route.BOUNDED_AUSLANDER_BRIDGER
    bad = _first_nonzero_ext(x, reg, N)
    if bad is not None:
        return GPVerdict(Status.NOT_GP, route, N, {"condition": "Ext(x, A) nonzero", "ext": bad.to_json()})
    xs = dual_star(x).module
    bad = _first_nonzero_ext(xs, AModule.regular(xs.algebra), N)
    if bad is not None:
        return GPVerdict(Status.NOT_GP, route, N, {"condition": "Ext(x*, A) nonzero", "ext": bad.to_json()})
    bidual, ev = evaluation_map(x)
    if bidual.dim != x.dim or rank(ev) != x.dim:
        return GPVerdict(Status.NOT_GP, route, N, {
            "condition": "not reflexive", "dim": x.dim, "bidual_dim": bidual.dim, "evaluation_rank": rank(ev),
        })
    return GPVerdict(Status.BOUNDED, route, N, {"checked_degrees": N})
