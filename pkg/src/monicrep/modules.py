"""Left modules and bimodules over :class:`~monicrep.algebra.Algebra` objects.

A module of dimension d stores one d x d matrix per algebra basis element;
``act[u]`` is the action of ``b_u``.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .algebra import Algebra, BadBimodule, opposite
from .exactlin import (
    Field,
    Matrix,
    column_basis,
    complement_columns,
    hstack,
    inverse,
    left_inverse,
)


class ModuleError(ValueError):
    pass


def _stack(field_: Field, mats: Sequence[np.ndarray], d: int) -> np.ndarray:
    if not mats:
        return field_.zeros((0, d, d))
    return np.stack(mats)


class AModule:
    """Finite-dimensional left module.  Treat as immutable."""

    __slots__ = ("algebra", "dim", "act", "_cache")

    def __init__(self, algebra: Algebra, act: np.ndarray, *, validate: bool = True) -> None:
        f = algebra.field
        act = np.asarray(act)
        if act.ndim != 3 or act.shape[0] != algebra.dim or act.shape[1] != act.shape[2]:
            raise ModuleError(f"action array has shape {act.shape}, expected ({algebra.dim}, d, d)")
        if act.dtype != f.dtype:
            act = np.stack([f.coerce(m) for m in act]) if act.shape[1] else f.zeros(act.shape)
        self.algebra = algebra
        self.dim = act.shape[1]
        self.act = f.reduce(act)
        self.act.flags.writeable = False
        self._cache: dict = {}
        if validate:
            problem = self.violation()
            if problem:
                raise ModuleError(problem)

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, algebra: Algebra) -> "AModule":
        return cls(algebra, algebra.field.zeros((algebra.dim, 0, 0)), validate=False)

    @classmethod
    def regular(cls, algebra: Algebra) -> "AModule":
        if "regular" not in algebra._cache:
            algebra._cache["regular"] = cls(algebra, algebra.L.copy(), validate=False)
        return algebra._cache["regular"]

    @classmethod
    def coregular(cls, algebra: Algebra) -> "AModule":
        """D(A) = Hom_k(A, k) with (a f)(b) = f(b a), in the dual basis."""
        # (b_u f)_v = f(b_v b_u) = sum_w C[v, u, w] f_w
        act = np.transpose(algebra.C, (1, 0, 2)).copy()
        return cls(algebra, act, validate=False)

    @classmethod
    def from_generators(cls, algebra: Algebra, images: Mapping[int, np.ndarray], dim: int, *, validate: bool = True) -> "AModule":
        """Module determined by the action of the algebra generators."""
        f = algebra.field
        words, coeffs = algebra.word_expansion()
        word_mats = []
        eye = f.eye(dim)
        for w in words:
            m = eye
            for g in reversed(w):
                m = f.reduce(images[g].dot(m)) if dim else m
            word_mats.append(m)
        W = np.stack(word_mats) if words else f.zeros((0, dim, dim))
        # act[u] = sum_k coeffs[k, u] * W[k]
        act = f.reduce(np.tensordot(coeffs.a.T, W, axes=1)) if dim else f.zeros((algebra.dim, 0, 0))
        return cls(algebra, act, validate=validate)

    # -- structure -------------------------------------------------------

    def violation(self) -> str | None:
        """First failing module axiom, or None."""
        a, f = self.algebra, self.algebra.field
        if self.dim == 0:
            return None
        if np.any(self.rho(a.unit) != f.eye(self.dim)):
            return "the unit does not act as the identity"
        lhs = f.reduce(np.einsum("uij,vjk->uvik", self.act, self.act))
        rhs = f.reduce(np.tensordot(a.C, self.act, axes=([2], [0])))
        bad = np.argwhere(np.any(lhs != rhs, axis=(2, 3)))
        if bad.size:
            u, v = (int(t) for t in bad[0])
            return f"action of {a.labels[u]}*{a.labels[v]} is not the product of the actions"
        return None

    def rho(self, x: np.ndarray) -> np.ndarray:
        """Action matrix of the algebra element with coordinates ``x``."""
        if self.dim == 0:
            return self.algebra.field.zeros((0, 0))
        return self.algebra.field.reduce(np.tensordot(x, self.act, axes=1))

    def action_matrix(self, u: int) -> Matrix:
        return Matrix(self.algebra.field, self.act[u].copy(), trusted=True)

    def is_linear_map_to(self, other: "AModule", f: Matrix) -> bool:
        """Whether ``f`` (other.dim x self.dim) commutes with the action."""
        if f.shape != (other.dim, self.dim):
            return False
        fld = self.algebra.field
        for g in self.algebra.generators():
            if np.any(fld.reduce(other.act[g].dot(f.a)) != fld.reduce(f.a.dot(self.act[g]))):
                return False
        return True

    def submodule(self, basis: Matrix) -> "AModule":
        """Submodule spanned by the (independent, invariant) columns of ``basis``."""
        if basis.cols == 0:
            return AModule.zero(self.algebra)
        f = self.algebra.field
        li = left_inverse(basis).a
        act = f.reduce(np.einsum("ij,ujk,kl->uil", li, self.act, basis.a))
        return AModule(self.algebra, act, validate=False)

    def quotient(self, sub: Matrix) -> tuple["AModule", Matrix, Matrix]:
        """Quotient by the invariant subspace spanned by ``sub``.

        Returns (module, projection onto it, section of the projection).
        """
        f = self.algebra.field
        sub = column_basis(sub) if sub.cols else sub
        comp = complement_columns(sub)
        full = hstack(f, [sub, comp], self.dim)
        proj = inverse(full).row_slice(sub.cols, self.dim)
        if comp.cols == 0:
            return AModule.zero(self.algebra), proj, comp
        act = f.reduce(np.einsum("ij,ujk,kl->uil", proj.a, self.act, comp.a))
        return AModule(self.algebra, act, validate=False), proj, comp

    def transported(self, t: Matrix) -> "AModule":
        """Same module in new coordinates: new vector = t^-1 * old vector (t invertible)."""
        f = self.algebra.field
        ti = inverse(t).a
        return AModule(self.algebra, f.reduce(np.einsum("ij,ujk,kl->uil", ti, self.act, t.a)), validate=False)

    def over(self, algebra: Algebra) -> "AModule":
        """Same action reinterpreted over an algebra with identical structure constants."""
        return AModule(algebra, self.act, validate=False)

    def to_json(self) -> dict:
        a = self.algebra
        return {
            "dim": self.dim,
            "action": {a.labels[u]: Matrix(a.field, self.act[u], trusted=True).to_json() for u in range(a.dim)},
        }

    @classmethod
    def from_json(cls, algebra: Algebra, doc: Mapping) -> "AModule":
        f = algebra.field
        try:
            dim = int(doc["dim"])
            action = doc.get("action", {})
        except (KeyError, TypeError, ValueError) as exc:
            raise ModuleError(f"malformed module document: {exc}") from None
        mats = {}
        for label, m in action.items():
            if label not in algebra.labels:
                raise ModuleError(f"unknown basis label {label!r}")
            mm = Matrix.from_rows(f, m, dim) if dim else Matrix.zeros(f, 0, 0)
            if mm.shape != (dim, dim):
                raise ModuleError(f"action of {label!r} is not {dim}x{dim}")
            mats[algebra.labels.index(label)] = mm.a
        if len(mats) == algebra.dim:
            return cls(algebra, _stack(f, [mats[u] for u in range(algebra.dim)], dim))
        gens = algebra.generators()
        missing = [algebra.labels[g] for g in gens if g not in mats]
        if missing and dim:
            raise ModuleError(f"action missing for generator(s) {missing}")
        mod = cls.from_generators(algebra, {g: mats.get(g, f.zeros((dim, dim))) for g in gens}, dim)
        for u, m in mats.items():
            if np.any(mod.act[u] != m):
                raise ModuleError(f"action of {algebra.labels[u]!r} is inconsistent with the generators")
        return mod

    def __repr__(self) -> str:
        return f"AModule(dim={self.dim}, algebra_dim={self.algebra.dim})"


def direct_sum(mods: Sequence[AModule], algebra: Algebra | None = None) -> AModule:
    if not mods:
        if algebra is None:
            raise ModuleError("empty direct sum needs an algebra")
        return AModule.zero(algebra)
    a = mods[0].algebra
    f = a.field
    d = sum(m.dim for m in mods)
    act = f.zeros((a.dim, d, d))
    k = 0
    for m in mods:
        if m.algebra is not a:
            raise ModuleError("direct sum of modules over different algebras")
        act[:, k : k + m.dim, k : k + m.dim] = m.act
        k += m.dim
    return AModule(a, act, validate=False)


def submodule_generated(x: AModule, vectors: Matrix) -> Matrix:
    """Basis of the submodule generated by the columns of ``vectors``."""
    f = x.algebra.field
    if vectors.cols == 0 or x.dim == 0:
        return Matrix.zeros(f, x.dim, 0)
    span = column_basis(vectors)
    gens = x.algebra.generators()
    while True:
        new = [span] + [Matrix._wrap(f, x.act[g].dot(span.a)) for g in gens]
        nxt = column_basis(hstack(f, new, x.dim))
        if nxt.cols == span.cols:
            return span
        span = nxt


def radical_image(x: AModule) -> Matrix:
    """Basis of J X."""
    key = "radical_image"
    if key in x._cache:
        return x._cache[key]
    a = x.algebra
    f = a.field
    J = a.require_radical()
    if x.dim == 0 or J.cols == 0:
        out = Matrix.zeros(f, x.dim, 0)
    else:
        mats = [Matrix(f, x.rho(J.a[:, k]), trusted=True) for k in range(J.cols)]
        out = column_basis(hstack(f, mats, x.dim))
    x._cache[key] = out
    return out


class Bimodule:
    """A-B bimodule: ``left_action[u]`` acts by a_u on the left, ``right_action[v]``
    is the matrix of m -> m b_v."""

    def __init__(self, left: Algebra, right: Algebra, dim: int, left_action: np.ndarray, right_action: np.ndarray) -> None:
        f = left.field
        if right.field != f:
            raise BadBimodule("algebras over different fields")
        self.left = left
        self.right = right
        self.dim = dim
        self.left_action = f.reduce(np.asarray(left_action, dtype=f.dtype).reshape(left.dim, dim, dim))
        self.right_action = f.reduce(np.asarray(right_action, dtype=f.dtype).reshape(right.dim, dim, dim))

    @classmethod
    def zero(cls, a: Algebra, b: Algebra) -> "Bimodule":
        f = a.field
        return cls(a, b, 0, f.zeros((a.dim, 0, 0)), f.zeros((b.dim, 0, 0)))

    @classmethod
    def regular(cls, a: Algebra) -> "Bimodule":
        return cls(a, a, a.dim, a.L.copy(), a.R.copy())

    def as_left_module(self) -> AModule:
        return AModule(self.left, self.left_action, validate=False)

    def as_right_module(self) -> AModule:
        """M_B viewed as a left module over B^op."""
        return AModule(opposite(self.right), self.right_action, validate=False)

    def validate(self) -> None:
        problem = AModule(self.left, self.left_action, validate=False).violation()
        if problem:
            raise BadBimodule(f"left action: {problem}")
        problem = self.as_right_module().violation()
        if problem:
            raise BadBimodule(f"right action: {problem}")
        f = self.left.field
        for u in range(self.left.dim):
            for v in range(self.right.dim):
                lr = f.reduce(self.left_action[u].dot(self.right_action[v]))
                rl = f.reduce(self.right_action[v].dot(self.left_action[u]))
                if np.any(lr != rl):
                    raise BadBimodule(f"left {self.left.labels[u]} and right {self.right.labels[v]} do not commute")

    def to_json(self) -> dict:
        f = self.left.field
        return {
            "dim": self.dim,
            "left": {self.left.labels[u]: Matrix(f, self.left_action[u], trusted=True).to_json() for u in range(self.left.dim)},
            "right": {self.right.labels[v]: Matrix(f, self.right_action[v], trusted=True).to_json() for v in range(self.right.dim)},
        }

    @classmethod
    def from_json(cls, a: Algebra, b: Algebra, doc: Mapping) -> "Bimodule":
        dim = int(doc["dim"])
        left = AModule.from_json(a, {"dim": dim, "action": doc.get("left", {})})
        right = AModule.from_json(opposite(b), {"dim": dim, "action": doc.get("right", {})})
        m = cls(a, b, dim, left.act, right.act)
        m.validate()
        return m


def balanced_tensor(m: Bimodule, y: AModule) -> tuple[AModule, Matrix, Matrix]:
    """M (x)_B Y as the quotient of M (x)_k Y by span{mb (x) y - m (x) by}.

    Coordinates of M (x)_k Y: index s * dim Y + t for m_s (x) y_t.  Returns
    (module over the left algebra, projection, section).
    """
    if y.algebra is not m.right:
        raise ModuleError("module is not over the right algebra of the bimodule")
    f = m.left.field
    dm, dy = m.dim, y.dim
    n = dm * dy
    eye_m, eye_y = f.eye(dm), f.eye(dy)
    blocks = []
    for g in m.right.generators():
        blocks.append(Matrix._wrap(f, np.kron(m.right_action[g], eye_y) - np.kron(eye_m, y.act[g])))
    balance = column_basis(hstack(f, blocks, n)) if blocks and n else Matrix.zeros(f, n, 0)
    ambient_act = np.stack([np.kron(m.left_action[u], eye_y) for u in range(m.left.dim)]) if n else f.zeros((m.left.dim, 0, 0))
    ambient = AModule(m.left, ambient_act, validate=False)
    return ambient.quotient(balance)
