"""Deterministic enumeration and seeded sampling of small representations."""

from __future__ import annotations

import itertools
import random
from typing import Iterator, Sequence

import numpy as np

from .algebra import Algebra
from .exactlin import Matrix
from .homological import hom_space
from .modules import AModule, ModuleError
from .quiver import Quiver
from .repmod import Representation

DEFAULT_CAP = 100_000
_POOL_TUPLES = 20_000


def module_pool(a: Algebra, d: int, seed: int = 0) -> list[AModule]:
    """Modules of dimension d, given by generator images.

    Exhaustive when the number of generator tuples is at most 20000; otherwise the
    valid tuples among a seeded sample, which may be empty.
    """
    key = ("pool", d, seed)
    if key in a._cache:
        return a._cache[key]
    f = a.field
    gens = a.generators()
    entries = len(gens) * d * d
    pool: list[AModule] = []
    if d == 0:
        pool = [AModule.zero(a)]
    elif f.p is not None and f.p ** entries <= _POOL_TUPLES:
        for flat in itertools.product(range(f.p), repeat=entries):
            m = _module_from_flat(a, gens, d, flat)
            if m is not None:
                pool.append(m)
    else:
        rng = random.Random(seed)
        elems = f.elements()
        for _ in range(_POOL_TUPLES):
            flat = [rng.choice(elems) for _ in range(entries)]
            m = _module_from_flat(a, gens, d, flat)
            if m is not None:
                pool.append(m)
    a._cache[key] = pool
    return pool


def _module_from_flat(a: Algebra, gens: Sequence[int], d: int, flat: Sequence[int]) -> AModule | None:
    f = a.field
    arr = np.asarray(flat, dtype=f.dtype).reshape(len(gens), d, d) if gens else f.zeros((0, d, d))
    try:
        return AModule.from_generators(a, {g: arr[k] for k, g in enumerate(gens)}, d)
    except ModuleError:
        return None


class RepSampler:
    """Representations of q over a with branch dimensions at most ``max_dim``."""

    def __init__(self, a: Algebra, q: Quiver, max_dim: int, seed: int = 0) -> None:
        if a.field.p is None:
            raise ValueError("enumeration needs a finite field")
        self.a, self.q, self.max_dim, self.seed = a, q, max_dim, seed
        self.pools = [module_pool(a, d, seed) for d in range(max_dim + 1)]
        self._homs: dict[tuple[int, int], list[Matrix]] = {}

    def homs(self, x: AModule, y: AModule) -> list[Matrix]:
        key = (id(x), id(y))
        if key not in self._homs:
            self._homs[key] = hom_space(x, y)
        return self._homs[key]

    def _module_choices(self) -> Iterator[tuple[AModule, ...]]:
        everything = [m for pool in self.pools for m in pool]
        return itertools.product(everything, repeat=self.q.n)

    def count(self, limit: int = DEFAULT_CAP) -> int:
        """Number of instances, or limit + 1 once it is exceeded."""
        p = self.a.field.p
        total = 0
        for mods in self._module_choices():
            e = sum(len(self.homs(mods[arr.source], mods[arr.target])) for arr in self.q.arrows)
            total += p ** e
            if total > limit:
                return limit + 1
        return total

    def exhaustive(self) -> Iterator[Representation]:
        f = self.a.field
        for mods in self._module_choices():
            bases = [self.homs(mods[arr.source], mods[arr.target]) for arr in self.q.arrows]
            for coeffs in itertools.product(*[itertools.product(range(f.p), repeat=len(b)) for b in bases]):
                arrows = {}
                for arr, b, c in zip(self.q.arrows, bases, coeffs):
                    arrows[arr.name] = _combo(f, b, c, mods[arr.target].dim, mods[arr.source].dim)
                yield Representation(self.a, self.q, list(mods), arrows)

    def sample(self, n: int, rng: random.Random | None = None) -> list[Representation]:
        rng = rng or random.Random(self.seed)
        f = self.a.field
        out = []
        for _ in range(n):
            mods = []
            for _v in range(self.q.n):
                pool = rng.choice([p for p in self.pools if p])
                mods.append(rng.choice(pool))
            arrows = {}
            for arr in self.q.arrows:
                b = self.homs(mods[arr.source], mods[arr.target])
                c = [rng.randrange(f.p) for _ in b]
                arrows[arr.name] = _combo(f, b, c, mods[arr.target].dim, mods[arr.source].dim)
            out.append(Representation(self.a, self.q, mods, arrows))
        return out

    def instances(self, budget: int = DEFAULT_CAP) -> tuple[list[Representation], bool]:
        """All instances when there are at most ``budget``, else a seeded sample."""
        if self.count(budget) <= budget:
            return list(self.exhaustive()), True
        return self.sample(budget), False


def _combo(f, basis: Sequence[Matrix], coeffs: Sequence[int], rows: int, cols: int) -> Matrix:
    acc = f.zeros((rows, cols))
    for c, m in zip(coeffs, basis):
        if c:
            acc = acc + c * m.a
    return Matrix._wrap(f, acc)
