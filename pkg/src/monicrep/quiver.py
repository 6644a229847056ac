"""Finite quivers, paths, topological labelling, and quiver tensor products.

Paths compose right to left: the path ``beta*alpha`` first traverses
``alpha`` and then ``beta``.  Internally a :class:`Path` stores its arrows in
traversal order; the written form (and the JSON form) lists them in
composition order, last arrow first.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class CyclicQuiver(ValueError):
    pass


class QuiverError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int


@dataclass(frozen=True)
class Path:
    """A path given by its start vertex, end vertex and arrows in traversal order."""

    start: int
    end: int
    arrows: tuple[str, ...] = ()

    @property
    def length(self) -> int:
        return len(self.arrows)

    @property
    def is_trivial(self) -> bool:
        return not self.arrows

    def written(self) -> tuple[str, ...]:
        """Arrow names in composition (right-to-left) order."""
        return tuple(reversed(self.arrows))

    def then(self, other: "Path") -> "Path | None":
        """The path ``other * self`` (first self, then other), or None if not composable."""
        if self.end != other.start:
            return None
        return Path(self.start, other.end, self.arrows + other.arrows)

    def label(self, q: "Quiver") -> str:
        if self.is_trivial:
            return f"e{q.vertices[self.start]}"
        return "*".join(self.written())

    def sort_key(self) -> tuple:
        return (self.length, self.arrows)


@dataclass(frozen=True)
class RelationElement:
    """A linear combination of parallel paths, coefficients as integers or Fractions."""

    terms: tuple[tuple[object, Path], ...]

    def __post_init__(self) -> None:
        ends = {(p.start, p.end) for _, p in self.terms}
        if len(ends) > 1:
            raise QuiverError("relation terms are not parallel")

    @property
    def endpoints(self) -> tuple[int, int] | None:
        if not self.terms:
            return None
        p = self.terms[0][1]
        return (p.start, p.end)

    def min_length(self) -> int:
        return min((p.length for _, p in self.terms), default=0)


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...] = ()
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("vertex labels must be unique")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise QuiverError("arrow names must be unique")
        n = len(self.vertices)
        for a in self.arrows:
            if not (0 <= a.source < n and 0 <= a.target < n):
                raise QuiverError(f"arrow {a.name} has an invalid endpoint")
            if "*" in a.name:
                raise QuiverError("arrow names may not contain '*'")
        object.__setattr__(self, "_index", {a.name: a for a in self.arrows})

    @classmethod
    def build(cls, vertices: Sequence, arrows: Iterable[tuple[str, object, object]] = ()) -> "Quiver":
        """Build from vertex labels and (name, source label, target label) triples."""
        labels = tuple(str(v) for v in vertices)
        pos = {v: i for i, v in enumerate(labels)}
        arr = []
        for name, s, t in arrows:
            try:
                arr.append(Arrow(str(name), pos[str(s)], pos[str(t)]))
            except KeyError as exc:
                raise QuiverError(f"arrow {name} refers to unknown vertex {exc.args[0]}") from None
        return cls(labels, tuple(arr))

    @classmethod
    def linear(cls, n: int) -> "Quiver":
        """A_n labelled n -> n-1 -> ... -> 1, arrow a_j : j+1 -> j."""
        return cls.build([str(i) for i in range(1, n + 1)], [(f"a{j}", str(j + 1), str(j)) for j in range(1, n)])

    @property
    def n(self) -> int:
        return len(self.vertices)

    def arrow(self, name: str) -> Arrow:
        return self._index[name]

    def vertex(self, label) -> int:
        try:
            return self.vertices.index(str(label))
        except ValueError:
            raise QuiverError(f"unknown vertex {label!r}") from None

    def incoming(self, i: int) -> list[Arrow]:
        return [a for a in self.arrows if a.target == i]

    def outgoing(self, i: int) -> list[Arrow]:
        return [a for a in self.arrows if a.source == i]

    def trivial(self, i: int) -> Path:
        return Path(i, i, ())

    def arrow_path(self, name: str) -> Path:
        a = self.arrow(name)
        return Path(a.source, a.target, (name,))

    def path_from_names(self, written: Sequence[str]) -> Path:
        """Path from arrow names in composition order (last arrow first)."""
        names = list(reversed(list(written)))
        if not names:
            raise QuiverError("use trivial() for trivial paths")
        arrs = [self.arrow(nm) for nm in names]
        for a, b in zip(arrs, arrs[1:]):
            if a.target != b.source:
                raise QuiverError(f"arrows {a.name} and {b.name} do not compose")
        return Path(arrs[0].source, arrs[-1].target, tuple(names))

    def parse_path(self, text: str) -> Path:
        text = text.strip()
        if text.startswith("e") and text[1:] in self.vertices and text not in self._index:
            return self.trivial(self.vertex(text[1:]))
        return self.path_from_names([t.strip() for t in text.split("*")])

    def relabel(self, order: Sequence[int]) -> "Quiver":
        """Quiver with vertex ``order[k]`` moved to position k."""
        pos = {old: new for new, old in enumerate(order)}
        return Quiver(
            tuple(self.vertices[o] for o in order),
            tuple(Arrow(a.name, pos[a.source], pos[a.target]) for a in self.arrows),
        )

    def delete_vertex(self, v: int) -> "Quiver":
        keep = [i for i in range(self.n) if i != v]
        pos = {old: new for new, old in enumerate(keep)}
        return Quiver(
            tuple(self.vertices[i] for i in keep),
            tuple(Arrow(a.name, pos[a.source], pos[a.target]) for a in self.arrows if v not in (a.source, a.target)),
        )

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [
                {"name": a.name, "source": self.vertices[a.source], "target": self.vertices[a.target]} for a in self.arrows
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Quiver":
        try:
            return cls.build(doc["vertices"], [(a["name"], a["source"], a["target"]) for a in doc.get("arrows", [])])
        except (KeyError, TypeError) as exc:
            raise QuiverError(f"malformed quiver document: {exc}") from None


def path_to_json(q: Quiver, p: Path):
    if p.is_trivial:
        return {"vertex": q.vertices[p.start]}
    return list(p.written())


def path_from_json(q: Quiver, doc) -> Path:
    if isinstance(doc, dict):
        return q.trivial(q.vertex(doc["vertex"]))
    if isinstance(doc, str):
        return q.parse_path(doc)
    return q.path_from_names(doc)


# -- acyclicity and labelling -------------------------------------------------


def is_acyclic(q: Quiver) -> bool:
    try:
        _kahn(q)
    except CyclicQuiver:
        return False
    return True


def _kahn(q: Quiver) -> list[int]:
    """Vertices ordered sinks first: every arrow goes from a later to an earlier vertex."""
    out_deg = [0] * q.n
    for a in q.arrows:
        out_deg[a.source] += 1
    ready = sorted(i for i in range(q.n) if out_deg[i] == 0)
    order: list[int] = []
    heapq.heapify(ready)
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for a in q.incoming(v):
            out_deg[a.source] -= 1
            if out_deg[a.source] == 0:
                heapq.heappush(ready, a.source)
    if len(order) != q.n:
        raise CyclicQuiver("quiver has an oriented cycle")
    return order


def topological_label(q: Quiver) -> list[int]:
    """Permutation ``perm`` (0-based) with ``perm[v]`` = new label - 1 of vertex v.

    Every arrow j -> i ends up with label(j) > label(i); the last label is a source.
    Among admissible labellings the smallest current index is preferred, so an
    already-correct labelling is returned unchanged.
    """
    order = _kahn(q)
    perm = [0] * q.n
    for new, old in enumerate(order):
        perm[old] = new
    return perm


def is_labelled(q: Quiver) -> bool:
    return all(a.source > a.target for a in q.arrows)


def labelled(q: Quiver) -> Quiver:
    """Copy of ``q`` with vertices reordered to a topological labelling."""
    return q.relabel(_kahn(q))


# -- paths --------------------------------------------------------------------


def paths_between(q: Quiver, j: int, i: int, max_len: int | None = None) -> list[Path]:
    """All paths j -> i, sorted lexicographically by traversal-order arrow names."""
    if max_len is None and not is_acyclic(q):
        raise CyclicQuiver("unbounded path enumeration on a cyclic quiver")
    found: list[Path] = []
    stack = [Path(j, j, ())]
    while stack:
        p = stack.pop()
        if p.end == i:
            found.append(p)
        if max_len is not None and p.length >= max_len:
            continue
        for a in q.outgoing(p.end):
            stack.append(Path(p.start, a.target, p.arrows + (a.name,)))
    found.sort(key=lambda p: p.arrows)
    return found


def all_paths(q: Quiver, max_len: int | None = None) -> list[Path]:
    """Every path of ``q`` (bounded by ``max_len`` when given), ordered by
    (end vertex, length, arrow names)."""
    if max_len is None and not is_acyclic(q):
        raise CyclicQuiver("infinitely many paths")
    out: list[Path] = []
    layer = [q.trivial(v) for v in range(q.n)]
    while layer:
        out.extend(layer)
        if max_len is not None and layer[0].length >= max_len:
            break
        layer = [Path(p.start, a.target, p.arrows + (a.name,)) for p in layer for a in q.outgoing(p.end)]
    out.sort(key=lambda p: (p.end, p.length, p.arrows))
    return out


def path_count_matrix(q: Quiver) -> np.ndarray:
    """Matrix ``m`` with ``m[j, i]`` = number of paths j -> i (0-based indices).

    Computed as the sum of powers of the adjacency matrix; upper triangular in the
    row=target convention when the quiver is labelled.
    """
    if not is_acyclic(q):
        raise CyclicQuiver("path counts are infinite on a cyclic quiver")
    adj = np.zeros((q.n, q.n), dtype=object)
    for a in q.arrows:
        adj[a.source, a.target] += 1
    total = np.identity(q.n, dtype=object) * 1
    power = total.copy()
    for _ in range(q.n):
        power = power.dot(adj)
        if not np.any(power != 0):
            break
        total = total + power
    return total.astype(object)


# -- tensor products ----------------------------------------------------------


@dataclass(frozen=True)
class BoundQuiverPresentation:
    """kQ/I with I spanned (as an ideal) by ``relations``; paths of length >= N vanish."""

    quiver: Quiver
    relations: tuple[RelationElement, ...] = ()
    nilpotency_bound: int | None = None

    def relation_free(self) -> bool:
        return all(all(c == 0 for c, _ in r.terms) for r in self.relations)


def _vertex_pair(q: Quiver, q2: Quiver, i: int, t: int) -> str:
    return f"({q.vertices[i]},{q2.vertices[t]})"


def tensor_quiver(
    q: Quiver,
    q2: Quiver,
    relations: Sequence[RelationElement] = (),
    relations2: Sequence[RelationElement] = (),
) -> tuple[Quiver, list[RelationElement]]:
    """Product quiver Q (x) Q' with commutativity relations and lifted relations.

    Vertex (i, t') sits at index i * |Q'_0| + t'.  Arrows (alpha, t') come first,
    then (i, beta').
    """
    n2 = q2.n

    def vid(i: int, t: int) -> int:
        return i * n2 + t

    verts = tuple(_vertex_pair(q, q2, i, t) for i in range(q.n) for t in range(n2))
    arrows: list[Arrow] = []
    for a in q.arrows:
        for t in range(n2):
            arrows.append(Arrow(f"({a.name},{q2.vertices[t]})", vid(a.source, t), vid(a.target, t)))
    for i in range(q.n):
        for b in q2.arrows:
            arrows.append(Arrow(f"({q.vertices[i]},{b.name})", vid(i, b.source), vid(i, b.target)))
    tq = Quiver(verts, tuple(arrows))

    rels: list[RelationElement] = []
    for a in q.arrows:
        i, j = a.source, a.target
        for b in q2.arrows:
            s, t = b.source, b.target
            # (alpha, t')(i, beta') - (j, beta')(alpha, s'), both from (i,s') to (j,t')
            lhs = Path(vid(i, s), vid(j, t), (f"({q.vertices[i]},{b.name})", f"({a.name},{q2.vertices[t]})"))
            rhs = Path(vid(i, s), vid(j, t), (f"({a.name},{q2.vertices[s]})", f"({q.vertices[j]},{b.name})"))
            rels.append(RelationElement(((1, lhs), (-1, rhs))))
    for r in relations:
        for t in range(n2):
            terms = []
            for c, p in r.terms:
                names = tuple(f"({nm},{q2.vertices[t]})" for nm in p.arrows)
                terms.append((c, Path(vid(p.start, t), vid(p.end, t), names)))
            rels.append(RelationElement(tuple(terms)))
    for r in relations2:
        for i in range(q.n):
            terms = []
            for c, p in r.terms:
                names = tuple(f"({q.vertices[i]},{nm})" for nm in p.arrows)
                terms.append((c, Path(vid(i, p.start), vid(i, p.end), names)))
            rels.append(RelationElement(tuple(terms)))
    return tq, rels


def tensor_hereditary_check(a: BoundQuiverPresentation, b: BoundQuiverPresentation) -> bool:
    """Whether kQ/I (x) kQ'/I' is hereditary: one factor is a product of copies of k
    (no arrows) while the other has no relations."""
    a_semisimple = not a.quiver.arrows
    b_semisimple = not b.quiver.arrows
    return (a_semisimple and b.relation_free()) or (b_semisimple and a.relation_free())
