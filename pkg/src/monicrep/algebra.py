"""Finite-dimensional algebras given by structure constants on a fixed basis.

``C[u, v, w]`` is the coefficient of ``b_w`` in ``b_u * b_v``.  Constructors
cover truncated polynomial rings, bound quiver algebras kQ/I, path algebras AQ
over a base algebra, triangular extensions and opposite algebras.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exactlin import (
    Field,
    Matrix,
    column_basis,
    hstack,
    in_span,
    kernel_basis,
    rref,
    solve,
)
from .quiver import (
    BoundQuiverPresentation,
    CyclicQuiver,
    Path,
    Quiver,
    RelationElement,
    all_paths,
    is_acyclic,
)


class AlgebraError(ValueError):
    pass


class NotAssociative(AlgebraError):
    pass


class BadUnit(AlgebraError):
    pass


class BadIdempotents(AlgebraError):
    pass


class BadRadical(AlgebraError):
    pass


class NotAdmissible(AlgebraError):
    pass


class MissingIdempotents(AlgebraError):
    pass


class BadBimodule(AlgebraError):
    pass


@dataclass(frozen=True)
class PathInfo:
    """Back-references of a path algebra AQ: basis index = path_index * dim A + u."""

    base: "Algebra"
    quiver: Quiver
    paths: tuple[Path, ...]
    index: dict = field(compare=False, hash=False)

    def basis_index(self, path: Path, u: int) -> int:
        return self.index[path] * self.base.dim + u


class Algebra:
    """An associative unital algebra with a distinguished basis.  Treat as immutable."""

    def __init__(
        self,
        field_: Field,
        table: np.ndarray,
        unit: np.ndarray,
        *,
        labels: Sequence[str] | None = None,
        idempotents: Sequence[np.ndarray] | None = None,
        radical: Matrix | None = None,
        presentation: BoundQuiverPresentation | None = None,
        path_info: PathInfo | None = None,
        source: dict | None = None,
        validate: bool = True,
    ) -> None:
        d = table.shape[0]
        if table.shape != (d, d, d):
            raise AlgebraError(f"structure constants must have shape (d, d, d), got {table.shape}")
        self.field = field_
        self.dim = d
        self.C = field_.reduce(table.astype(field_.dtype) if field_.dtype is not object else table)
        self.C.flags.writeable = False
        self.unit = field_.reduce(np.asarray(unit, dtype=field_.dtype))
        self.labels = tuple(labels) if labels is not None else tuple(f"b{u}" for u in range(d))
        if len(set(self.labels)) != d:
            raise AlgebraError("basis labels must be unique and match the dimension")
        # left multiplication by b_u has (w, v) entry C[u, v, w]
        self.L = np.ascontiguousarray(np.transpose(self.C, (0, 2, 1)))
        # right multiplication by b_v has (w, u) entry C[u, v, w]
        self.R = np.ascontiguousarray(np.transpose(self.C, (1, 2, 0)))
        self.idempotents = None if idempotents is None else [field_.reduce(np.asarray(e, dtype=field_.dtype)) for e in idempotents]
        self.radical = radical
        self.presentation = presentation
        self.path_info = path_info
        self.source = source
        self._cache: dict = {}
        if validate:
            self._validate()

    # -- validation ------------------------------------------------------

    def _validate(self) -> None:
        f, C, d = self.field, self.C, self.dim
        if d == 0:
            raise AlgebraError("the zero algebra is not allowed")
        # (b_u b_v) b_w versus b_u (b_v b_w)
        lhs = f.reduce(np.tensordot(C, C, axes=([2], [0])))  # (b_u b_v) b_w, indexed [u, v, w, :]
        # b_u (b_v b_w) = sum_x C[v, w, x] C[u, x, :]
        rhs = np.transpose(f.reduce(np.tensordot(C, C, axes=([2], [1]))), (2, 0, 1, 3))
        bad = np.argwhere(np.any(lhs != rhs, axis=3))
        if bad.size:
            u, v, w = (int(t) for t in bad[0])
            raise NotAssociative(f"(b{u} b{v}) b{w} != b{u} (b{v} b{w})")
        eye = f.eye(d)
        if np.any(self.left(self.unit) != eye) or np.any(self.right(self.unit) != eye):
            raise BadUnit("unit does not act as the identity")
        if self.idempotents is not None:
            self._check_idempotents()
        if self.radical is not None:
            self._check_radical()

    def _check_idempotents(self) -> None:
        f = self.field
        es = self.idempotents
        total = f.zeros(self.dim)
        for i, e in enumerate(es):
            total = f.reduce(total + e)
            for j, g in enumerate(es):
                prod = self.mul(e, g)
                want = e if i == j else f.zeros(self.dim)
                if np.any(prod != want):
                    raise BadIdempotents(f"idempotents {i} and {j} are not orthogonal idempotents")
            if not np.any(e != 0):
                raise BadIdempotents(f"idempotent {i} is zero")
        if np.any(total != self.unit):
            raise BadIdempotents("idempotents do not sum to 1")

    def _check_radical(self) -> None:
        J = self.radical
        if J.rows != self.dim:
            raise BadRadical("radical basis has the wrong length")
        J = column_basis(J)
        self.radical = J
        if J.cols == 0:
            return
        for u in range(self.dim):
            if not in_span(J, self.left_matrix(u) @ J) or not in_span(J, self.right_matrix(u) @ J):
                raise BadRadical("radical is not a two-sided ideal")
        power = J
        for _ in range(self.dim + 1):
            power = self.product_space(power, J)
            if power.cols == 0:
                return
        raise BadRadical("radical is not nilpotent")

    # -- arithmetic ------------------------------------------------------

    def basis_vector(self, u: int) -> np.ndarray:
        v = self.field.zeros(self.dim)
        v[u] = self.field.element(1)
        return v

    def element(self, label: str) -> np.ndarray:
        return self.basis_vector(self.labels.index(label))

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.field.reduce(self.left(x).dot(y))

    def left(self, x: np.ndarray) -> np.ndarray:
        """Matrix of left multiplication by the element with coordinates ``x``."""
        return self.field.reduce(np.tensordot(x, self.L, axes=1))

    def right(self, x: np.ndarray) -> np.ndarray:
        return self.field.reduce(np.tensordot(x, self.R, axes=1))

    def left_matrix(self, u: int) -> Matrix:
        return Matrix(self.field, self.L[u].copy(), trusted=True)

    def right_matrix(self, u: int) -> Matrix:
        return Matrix(self.field, self.R[u].copy(), trusted=True)

    def product_space(self, U: Matrix, V: Matrix) -> Matrix:
        """Basis of span{u v : u in U, v in V} for column-spanned subspaces."""
        f = self.field
        cols = []
        for i in range(U.cols):
            Lu = self.left(U.a[:, i])
            cols.append(Matrix._wrap(f, Lu.dot(V.a)))
        if not cols:
            return Matrix.zeros(f, self.dim, 0)
        return column_basis(hstack(f, cols, self.dim))

    @property
    def is_commutative(self) -> bool:
        return bool(np.all(self.C == np.transpose(self.C, (1, 0, 2))))

    # -- generators ------------------------------------------------------

    def generators(self) -> list[int]:
        """Basis indices generating the algebra (with 1), chosen greedily."""
        if "generators" in self._cache:
            return self._cache["generators"]
        f = self.field
        gens: list[int] = []
        span = column_basis(Matrix(f, self.unit.reshape(-1, 1).copy(), trusted=True))
        for u in range(self.dim):
            if span.cols == self.dim:
                break
            if in_span(span, Matrix(f, self.basis_vector(u).reshape(-1, 1), trusted=True)):
                continue
            gens.append(u)
            span = self._closure(gens)
        self._cache["generators"] = gens
        return gens

    def _closure(self, gens: Sequence[int]) -> Matrix:
        f = self.field
        span = column_basis(Matrix(f, self.unit.reshape(-1, 1).copy(), trusted=True))
        while True:
            new = [span] + [Matrix._wrap(f, self.L[g].dot(span.a)) for g in gens]
            nxt = column_basis(hstack(f, new, self.dim))
            if nxt.cols == span.cols:
                return span
            span = nxt

    def word_expansion(self) -> tuple[list[tuple[int, ...]], Matrix]:
        """Words in the generators spanning the algebra, and coefficients expressing each
        basis element: ``b_u = sum_k coeffs[k, u] * word_k``."""
        if "words" in self._cache:
            return self._cache["words"]
        f = self.field
        gens = self.generators()
        words: list[tuple[int, ...]] = [()]
        vecs = [self.unit]
        frontier = [((), self.unit)]
        span = column_basis(Matrix(f, self.unit.reshape(-1, 1).copy(), trusted=True))
        while frontier and span.cols < self.dim:
            nxt = []
            for w, vec in frontier:
                for g in gens:
                    v2 = self.field.reduce(self.L[g].dot(vec))
                    col = Matrix(f, v2.reshape(-1, 1), trusted=True)
                    if not in_span(span, col):
                        span = column_basis(hstack(f, [span, col], self.dim))
                        words.append((g,) + w)
                        vecs.append(v2)
                        nxt.append(((g,) + w, v2))
            frontier = nxt
        W = Matrix(f, np.stack(vecs, axis=1), trusted=True)
        coeffs = solve(W, Matrix.identity(f, self.dim))
        if coeffs is None:
            raise AlgebraError("generators do not span the algebra")
        self._cache["words"] = (words, coeffs)
        return words, coeffs

    # -- idempotent data -------------------------------------------------

    def require_idempotents(self) -> list[np.ndarray]:
        if self.idempotents is None:
            raise MissingIdempotents("algebra carries no complete set of primitive idempotents")
        return self.idempotents

    def require_radical(self) -> Matrix:
        if self.radical is None:
            raise MissingIdempotents("algebra carries no radical")
        return self.radical

    def corner(self, i: int, j: int) -> Matrix:
        """Basis of e_i A e_j."""
        key = ("corner", i, j)
        if key not in self._cache:
            es = self.require_idempotents()
            m = self.field.reduce(self.left(es[i]).dot(self.right(es[j])))
            self._cache[key] = column_basis(Matrix(self.field, m, trusted=True))
        return self._cache[key]

    def __repr__(self) -> str:
        return f"Algebra(dim={self.dim}, field={self.field})"


# -- constructors -------------------------------------------------------------


def from_structure_constants(
    field_: Field,
    dim: int,
    table,
    unit,
    idempotents=None,
    radical=None,
    labels: Sequence[str] | None = None,
) -> Algebra:
    """Validated algebra from a dim x dim x dim nested table.

    Without a supplied radical, the trace-form radical is used when the
    characteristic is 0 or exceeds ``dim`` (where it is exact).  A local algebra
    (radical of codimension 1) gets the single idempotent 1.
    """
    arr = np.empty((dim, dim, dim), dtype=field_.dtype)
    try:
        for u in range(dim):
            for v in range(dim):
                for w in range(dim):
                    arr[u, v, w] = field_.element(table[u][v][w])
        unit_v = np.array([field_.element(c) for c in unit], dtype=field_.dtype)
    except (IndexError, TypeError) as exc:
        raise AlgebraError(f"structure constants do not match dimension {dim}: {exc}") from None
    if unit_v.shape != (dim,):
        raise AlgebraError("unit has the wrong length")
    idem = None if idempotents is None else [np.array([field_.element(c) for c in e], dtype=field_.dtype) for e in idempotents]
    rad = None
    if radical is not None:
        cols = [[field_.element(c) for c in r] for r in radical]
        rad = Matrix.from_rows(field_, cols, dim).T if cols else Matrix.zeros(field_, dim, 0)
    alg = Algebra(field_, arr, unit_v, labels=labels, idempotents=idem, radical=rad)
    if alg.radical is None:
        alg.radical = trace_radical(alg)
    if alg.idempotents is None and alg.radical is not None and alg.radical.cols == dim - 1:
        alg.idempotents = [alg.unit.copy()]
    return alg


def trace_radical(a: Algebra) -> Matrix | None:
    """{x : tr(L_{xy}) = 0 for all y}; returns None where this is not the radical."""
    p = a.field.p
    if p is not None and p <= a.dim:
        return None
    f = a.field
    traces = np.array([np.trace(a.L[w]) for w in range(a.dim)], dtype=f.dtype)
    # form[u, v] = tr(L_{b_u b_v}) = sum_w C[u, v, w] tr(L_w)
    form = f.reduce(np.tensordot(a.C, traces, axes=([2], [0])))
    J = kernel_basis(Matrix._wrap(f, form))
    a.radical = J
    try:
        a._check_radical()
    except BadRadical:
        a.radical = None
        return None
    return a.radical


def field_algebra(field_: Field) -> Algebra:
    arr = field_.zeros((1, 1, 1))
    arr[0, 0, 0] = field_.element(1)
    return Algebra(
        field_, arr, np.array([field_.element(1)], dtype=field_.dtype), labels=["1"],
        idempotents=[np.array([field_.element(1)], dtype=field_.dtype)], radical=Matrix.zeros(field_, 1, 0),
        source={"type": "truncated_poly", "n": 1},
    )


def truncated_polynomial(field_: Field, n: int) -> Algebra:
    """k[x]/(x^n) with basis 1, x, ..., x^{n-1}."""
    if n < 1:
        raise AlgebraError("n must be at least 1")
    arr = field_.zeros((n, n, n))
    one = field_.element(1)
    for u in range(n):
        for v in range(n):
            if u + v < n:
                arr[u, v, u + v] = one
    unit = field_.zeros(n)
    unit[0] = one
    labels = ["1"] + ["x" if k == 1 else f"x^{k}" for k in range(1, n)]
    rad = Matrix.identity(field_, n).col_slice(1, n)
    return Algebra(field_, arr, unit, labels=labels, idempotents=[unit.copy()], radical=rad,
                   source={"type": "truncated_poly", "n": n})


def _relation_vector(field_: Field, rel: RelationElement, index: dict[Path, int], size: int):
    vec = field_.zeros(size)
    for c, p in rel.terms:
        if p in index:
            vec[index[p]] = field_.reduce(np.array([vec[index[p]] + field_.element(c)], dtype=field_.dtype))[0]
    return vec


def bound_quiver_algebra(pres: BoundQuiverPresentation, field_: Field) -> Algebra:
    """kQ/I for an admissible I, with J^N contained in I for N = nilpotency_bound.

    The quotient is computed on paths of length < N.  Admissibility is verified
    as: every relation term has length >= 2 and every path of length N lies in
    I modulo paths of length > N (exact when the relations are homogeneous).
    """
    q = pres.quiver
    N = pres.nilpotency_bound
    if N is None:
        if not is_acyclic(q):
            raise NotAdmissible("a nilpotency bound is required for cyclic quivers")
        N = max((p.length for p in all_paths(q)), default=0) + 1
    if N < 1:
        raise NotAdmissible("nilpotency bound must be positive")
    for r in pres.relations:
        if any(p.length < 2 for c, p in r.terms if field_.element(c) != 0):
            raise NotAdmissible("relation terms must have length at least 2")

    def ideal_span(max_len: int) -> tuple[list[Path], Matrix, dict]:
        paths = all_paths(q, max_len)
        # columns ordered longest first so pivots fall on long paths
        order = sorted(range(len(paths)), key=lambda k: (-paths[k].length, paths[k].end, paths[k].arrows))
        cols = [paths[k] for k in order]
        idx = {p: k for k, p in enumerate(cols)}
        by_end: dict[int, list[Path]] = {}
        by_start: dict[int, list[Path]] = {}
        for p in paths:
            by_end.setdefault(p.end, []).append(p)
            by_start.setdefault(p.start, []).append(p)
        rows = []
        for r in pres.relations:
            ends = r.endpoints
            if ends is None:
                continue
            s, e = ends
            for left in by_start.get(e, []):
                for right in by_end.get(s, []):
                    terms = []
                    for c, p in r.terms:
                        w = right.then(p).then(left)
                        if w.length <= max_len:
                            terms.append((c, w))
                    if terms:
                        rows.append(_relation_vector(field_, RelationElement(tuple(terms)), idx, len(cols)))
        I = Matrix(field_, np.stack(rows) if rows else field_.zeros((0, len(cols))), trusted=True)
        return cols, I, idx

    # admissibility check on paths of length <= N
    cols_n, I_n, idx_n = ideal_span(N)
    top = [p for p in cols_n if p.length == N]
    if top and I_n.rows:
        R, piv = rref(I_n)
        pivset = set(piv)
        for p in top:
            k = idx_n[p]
            if k not in pivset:
                raise NotAdmissible(f"path {p.label(q)} of length {N} is not in the ideal")
            # its row must be supported on length >= N columns only
            row = piv.index(k)
            support = np.flatnonzero(R.a[row] != 0)
            if any(cols_n[c].length < N for c in support):
                raise NotAdmissible(f"path {p.label(q)} of length {N} is not in the ideal")
    elif top:
        raise NotAdmissible(f"paths of length {N} do not vanish")

    cols, I, idx = ideal_span(N - 1)
    if I.rows:
        R, piv = rref(I)
    else:
        R, piv = Matrix.zeros(field_, 0, len(cols)), []
    pivset = set(piv)
    normal = [p for k, p in enumerate(cols) if k not in pivset]
    normal.sort(key=lambda p: (p.end, p.length, p.arrows))
    nidx = {p: k for k, p in enumerate(normal)}
    d = len(normal)

    def reduce_path(w: Path) -> np.ndarray:
        out = field_.zeros(d)
        if w.length >= N:
            return out
        if w in nidx:
            out[nidx[w]] = field_.element(1)
            return out
        row = piv.index(idx[w])
        for c in np.flatnonzero(R.a[row] != 0):
            if c != idx[w]:
                out[nidx[cols[c]]] = field_.reduce(np.array([out[nidx[cols[c]]] - R.a[row, c]], dtype=field_.dtype))[0]
        return out

    table = field_.zeros((d, d, d))
    for u, pu in enumerate(normal):
        for v, pv in enumerate(normal):
            w = pv.then(pu)  # pu * pv: first pv then pu
            if w is not None:
                table[u, v] = reduce_path(w)
    unit = field_.zeros(d)
    idems = []
    for i in range(q.n):
        e = field_.zeros(d)
        e[nidx[q.trivial(i)]] = field_.element(1)
        idems.append(e)
        unit[nidx[q.trivial(i)]] = field_.element(1)
    rad_cols = [k for k, p in enumerate(normal) if p.length >= 1]
    radical = Matrix.identity(field_, d).columns(rad_cols)
    labels = [p.label(q) for p in normal]
    return Algebra(field_, table, unit, labels=labels, idempotents=idems, radical=radical,
                   presentation=BoundQuiverPresentation(q, tuple(pres.relations), N),
                   source={"type": "bound_quiver"})


def path_algebra(q: Quiver, field_: Field) -> Algebra:
    """kQ for an acyclic quiver."""
    return bound_quiver_algebra(BoundQuiverPresentation(q, (), None), field_)


def path_algebra_over(a: Algebra, q: Quiver) -> Algebra:
    """Lambda = AQ: basis b_u (x) p, path-major, paths ordered by (end, length, names).

    Cached on ``a`` per quiver.
    """
    key = ("path_algebra_over", q)
    if key in a._cache:
        return a._cache[key]
    if not is_acyclic(q):
        raise CyclicQuiver("AQ is infinite-dimensional for a cyclic quiver")
    a_idems = a.require_idempotents()
    f = a.field
    paths = tuple(all_paths(q))
    pidx = {p: k for k, p in enumerate(paths)}
    da = a.dim
    d = da * len(paths)
    table = f.zeros((d, d, d))
    for kp, p in enumerate(paths):
        for kq, qq in enumerate(paths):
            w = qq.then(p)  # p * qq
            if w is None:
                continue
            kw = pidx[w]
            table[kp * da : (kp + 1) * da, kq * da : (kq + 1) * da, kw * da : (kw + 1) * da] = a.C
    unit = f.zeros(d)
    idems = []
    for i in range(q.n):
        k = pidx[q.trivial(i)]
        unit[k * da : (k + 1) * da] = a.unit
        for e in a_idems:
            v = f.zeros(d)
            v[k * da : (k + 1) * da] = e
            idems.append(v)
    rad_blocks = []
    a_rad = a.require_radical()
    for kp, p in enumerate(paths):
        if p.is_trivial:
            blk = f.zeros((d, a_rad.cols))
            blk[kp * da : (kp + 1) * da, :] = a_rad.a
        else:
            blk = f.zeros((d, da))
            blk[kp * da : (kp + 1) * da, :] = f.eye(da)
        rad_blocks.append(Matrix(f, blk, trusted=True))
    radical = hstack(f, rad_blocks, d)
    labels = [f"{a.labels[u]}|{p.label(q)}" for p in paths for u in range(da)]
    info = PathInfo(a, q, paths, pidx)
    lam = Algebra(f, table, unit, labels=labels, idempotents=idems, radical=radical, path_info=info,
                  source={"type": "path_algebra_over"}, validate=d <= 40)
    a._cache[key] = lam
    return lam


def triangular_extension(a: Algebra, b: Algebra, m) -> Algebra:
    """[[A, M], [0, B]] with basis A ++ M ++ B."""
    from .modules import Bimodule

    if not isinstance(m, Bimodule) or m.left is not a or m.right is not b:
        raise BadBimodule("bimodule does not match the algebras")
    m.validate()
    f = a.field
    da, dm, db = a.dim, m.dim, b.dim
    d = da + dm + db
    table = f.zeros((d, d, d))
    sa, sm, sb = slice(0, da), slice(da, da + dm), slice(da + dm, d)
    table[sa, sa, sa] = a.C
    table[sb, sb, sb] = b.C
    # a_u * m_s = sum_t left[u][t, s] m_t
    for u in range(da):
        table[u, sm, sm] = m.left_action[u].T
    # m_s * b_v = sum_t right[v][t, s] m_t
    for v in range(db):
        table[sm, da + dm + v, sm] = m.right_action[v].T
    unit = np.concatenate([a.unit, f.zeros(dm), b.unit])
    idems = None
    if a.idempotents is not None and b.idempotents is not None:
        idems = [np.concatenate([e, f.zeros(dm + db)]) for e in a.idempotents]
        idems += [np.concatenate([f.zeros(da + dm), e]) for e in b.idempotents]
    radical = None
    if a.radical is not None and b.radical is not None:
        blocks = [
            np.vstack([a.radical.a, f.zeros((dm + db, a.radical.cols))]),
            np.vstack([f.zeros((da, dm)), f.eye(dm), f.zeros((db, dm))]),
            np.vstack([f.zeros((da + dm, b.radical.cols)), b.radical.a]),
        ]
        radical = Matrix(f, np.concatenate(blocks, axis=1), trusted=True)
    labels = [f"A:{l}" for l in a.labels] + [f"M:{k}" for k in range(dm)] + [f"B:{l}" for l in b.labels]
    return Algebra(f, table, unit, labels=labels, idempotents=idems, radical=radical,
                   source={"type": "triangular"}, validate=d <= 40)


def opposite(a: Algebra) -> Algebra:
    """A^op: b_u * b_v in A^op is b_v b_u in A.  opposite(opposite(a)) is a."""
    if "opposite" in a._cache:
        return a._cache["opposite"]
    op = Algebra(
        a.field, np.ascontiguousarray(np.transpose(a.C, (1, 0, 2))), a.unit.copy(), labels=a.labels,
        idempotents=None if a.idempotents is None else [e.copy() for e in a.idempotents],
        radical=a.radical, validate=False, source={"type": "opposite"},
    )
    op._cache["opposite"] = a
    a._cache["opposite"] = op
    return op


def product_algebra(a: Algebra, b: Algebra) -> Algebra:
    """A x B, the triangular extension with M = 0."""
    from .modules import Bimodule

    return triangular_extension(a, b, Bimodule.zero(a, b))


def path_bimodule(a: Algebra, q: Quiver, n: int):
    """P = A (x) rad P(n) as a Lambda'-A bimodule, Lambda' = A Q' with Q' = Q minus n.

    Basis: nontrivial paths from n, ordered by (end, length, names), algebra-minor.
    Returns (bimodule, Lambda', list of paths).
    """
    from .modules import Bimodule

    qp = q.delete_vertex(n)
    lam_p = path_algebra_over(a, qp)
    info = lam_p.path_info
    keep = [i for i in range(q.n) if i != n]
    pos = {old: new for new, old in enumerate(keep)}
    from_n = [p for p in all_paths(q) if p.start == n and not p.is_trivial]
    pidx = {p: k for k, p in enumerate(from_n)}
    f = a.field
    da = a.dim
    dm = da * len(from_n)
    left = np.stack([f.zeros((dm, dm)) for _ in range(lam_p.dim)]) if lam_p.dim else f.zeros((0, dm, dm))
    for kq, qq in enumerate(info.paths):
        # qq is a path of Q' (indices relative to Q'); translate to Q indices by name
        for kp, p in enumerate(from_n):
            if pos.get(p.end) != qq.start:
                continue
            w = Path(p.start, keep[qq.end], p.arrows + qq.arrows)
            kw = pidx[w]
            for u in range(da):
                # (b_u (x) qq)(b_v (x) p) = sum_w C[u, v, w] b_w (x) w
                left[kq * da + u][kw * da : (kw + 1) * da, kp * da : (kp + 1) * da] = a.L[u]
    right = np.stack([f.zeros((dm, dm)) for _ in range(da)])
    for kp in range(len(from_n)):
        for v in range(da):
            right[v][kp * da : (kp + 1) * da, kp * da : (kp + 1) * da] = a.R[v]
    return Bimodule(lam_p, a, dm, left, right), lam_p, from_n
