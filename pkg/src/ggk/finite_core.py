"""Finite groups given by multiplication tables.

Elements are the integers ``0..order-1``.  Products follow the table:
``mul(a, b) == table[a][b]``.  All checks are exhaustive; groups here are tiny.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .errors import (
    NoIdentity,
    NoInverse,
    NotAssociative,
    NotAutomorphism,
    NotHomomorphism,
    NotNormal,
    OrderBoundExceeded,
)

SUBGROUP_ORDER_BOUND = 48


class FiniteGroup:
    """A validated finite group.  Use :func:`make_finite_group` to build one."""

    def __init__(self, table: np.ndarray, identity: int, inverse: Sequence[int],
                 generators: Sequence[int] | None = None):
        self.table = table
        self.identity = identity
        self.inverse = tuple(inverse)
        self._generators = None if generators is None else tuple(generators)
        self._rows = table.tolist()

    @property
    def order(self) -> int:
        return len(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self._rows == other._rows and self._generators == other._generators

    def __hash__(self) -> int:
        return hash((self.table.tobytes(), self._generators))

    def mul(self, a: int, b: int) -> int:
        return self._rows[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def prod(self, elements: Iterable[int]) -> int:
        x = self.identity
        rows = self._rows
        for y in elements:
            x = rows[x][y]
        return x

    def power(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inverse[a], -n
        result, base = self.identity, a
        while n:
            if n & 1:
                result = self._rows[result][base]
            base = self._rows[base][base]
            n >>= 1
        return result

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self._rows[x][a]
            k += 1
        return k

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """The declared generating set, or a greedy canonical one."""
        if self._generators is not None:
            return self._generators
        gens: list[int] = []
        members = {self.identity}
        for x in range(self.order):
            if x not in members:
                gens.append(x)
                members = set(_accel.closure(self.table, gens, self.identity))
        return tuple(gens)

    @cached_property
    def words(self) -> tuple[tuple[int, ...], ...]:
        """Shortest words (generator positions) for every element, BFS order."""
        gens = self.generators
        words: list[tuple[int, ...] | None] = [None] * self.order
        words[self.identity] = ()
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for k, g in enumerate(gens):
                y = self._rows[x][g]
                if words[y] is None:
                    words[y] = words[x] + (k,)
                    queue.append(y)
        return tuple(words)  # type: ignore[arg-type]

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def trivial_subgroup(self) -> FiniteSubgroup:
        return FiniteSubgroup(self, (self.identity,))

    def whole(self) -> FiniteSubgroup:
        return FiniteSubgroup(self, tuple(range(self.order)))

    def generated(self, gens: Iterable[int]) -> FiniteSubgroup:
        return FiniteSubgroup(self, tuple(_accel.closure(self.table, list(gens), self.identity)))


@dataclass(frozen=True)
class FiniteSubgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return x in self._set

    def __len__(self) -> int:
        return len(self.members)

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.members)

    def is_trivial(self) -> bool:
        return len(self.members) == 1

    def issubset(self, other: FiniteSubgroup) -> bool:
        return self._set <= other._set

    def is_closed(self) -> bool:
        g = self.parent
        s = self._set
        return g.identity in s and all(g.mul(a, b) in s for a in s for b in s) and all(
            g.inv(a) in s for a in s)


class FiniteHom:
    """Homomorphism between finite groups given by the image of every element."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, images: Sequence[int]):
        images = tuple(int(i) for i in images)
        if len(images) != source.order or any(not 0 <= i < target.order for i in images):
            raise NotHomomorphism("image array has wrong length or out-of-range entries")
        bad = _accel.find_nonhomomorphic(source.table, target.table,
                                         np.asarray(images, dtype=np.int64))
        if bad is not None:
            a, b = bad
            raise NotHomomorphism(f"f({a}*{b}) != f({a})*f({b})", witness=list(bad))
        self.source = source
        self.target = target
        self.images = images

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteHom):
            return NotImplemented
        return (self.source, self.target, self.images) == (other.source, other.target, other.images)

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"FiniteHom({self.source.order}->{self.target.order}, {list(self.images)})"

    @classmethod
    def identity(cls, group: FiniteGroup) -> FiniteHom:
        return cls(group, group, range(group.order))

    def compose(self, other: FiniteHom) -> FiniteHom:
        """``self ∘ other``."""
        return FiniteHom(other.source, self.target, [self.images[i] for i in other.images])

    def is_bijective(self) -> bool:
        return self.source.order == self.target.order and len(set(self.images)) == self.source.order

    def inverse_map(self) -> FiniteHom:
        inv = [0] * self.source.order
        for x, y in enumerate(self.images):
            inv[y] = x
        return FiniteHom(self.target, self.source, inv)


@dataclass(frozen=True)
class HomProperties:
    injective: bool
    kernel: FiniteSubgroup
    image: FiniteSubgroup


def make_finite_group(table: Sequence[Sequence[int]] | np.ndarray,
                      generators: Sequence[int] | None = None) -> FiniteGroup:
    arr = np.ascontiguousarray(np.asarray(table, dtype=np.int64))
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError("table must be a non-empty square array")
    n = arr.shape[0]
    if arr.min() < 0 or arr.max() >= n:
        raise ValueError("table entries out of range")
    bad = _accel.find_nonassociative(arr)
    if bad is not None:
        raise NotAssociative("table is not associative at (a,b,c)=%s" % (bad,), witness=list(bad))
    ident = None
    ar = np.arange(n)
    for e in range(n):
        if (arr[e] == ar).all() and (arr[:, e] == ar).all():
            ident = e
            break
    if ident is None:
        raise NoIdentity("no two-sided identity element")
    inverse = []
    for a in range(n):
        cands = np.nonzero(arr[a] == ident)[0]
        b = next((int(c) for c in cands if arr[c, a] == ident), None)
        if b is None:
            raise NoInverse(f"element {a} has no two-sided inverse", witness=a)
        inverse.append(b)
    arr.setflags(write=False)
    group = FiniteGroup(arr, ident, inverse, generators)
    if generators is not None:
        gens = [int(g) for g in generators]
        if any(not 0 <= g < n for g in gens):
            raise ValueError("generator index out of range")
        if len(_accel.closure(arr, gens, ident)) != n:
            raise ValueError("declared generators do not generate the group")
    return group


def _compose_perm(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    # (p·q)(i) = p(q(i))
    return tuple(p[i] for i in q)


def permutation_group(perm_gens: Sequence[Sequence[int]]) -> tuple[FiniteGroup, list[tuple[int, ...]]]:
    """Close permutations (0-based image arrays) under composition.

    Returns the group and the permutation labelling each element index; the
    identity is element 0, and the declared generators are the images of
    ``perm_gens``.
    """
    gens = [tuple(int(i) for i in g) for g in perm_gens]
    degree = len(gens[0]) if gens else 1
    for g in gens:
        if len(g) != degree or sorted(g) != list(range(degree)):
            raise ValueError(f"not a permutation of {degree} points: {list(g)}")
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = _compose_perm(x, g)
            if y not in index:
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)
    table = [[index[_compose_perm(p, q)] for q in elements] for p in elements]
    return make_finite_group(table, [index[g] for g in gens] or None), elements


def cyclic_group(n: int) -> FiniteGroup:
    return make_finite_group([[(i + j) % n for j in range(n)] for i in range(n)],
                             [1 % n] if n > 1 else None)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Element ``(a, b)`` has index ``a * |h| + b``."""
    m = h.order
    table = [[g.mul(i // m, j // m) * m + h.mul(i % m, j % m)
              for j in range(g.order * m)] for i in range(g.order * m)]
    return make_finite_group(table)


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = [(i + 1) % n for i in range(n)]
    ref = [(-i) % n for i in range(n)]
    return permutation_group([rot, ref])[0]


def symmetric_group(n: int) -> FiniteGroup:
    if n == 1:
        return cyclic_group(1)
    gens = [[1, 0] + list(range(2, n))]
    if n > 2:
        gens.append(list(range(1, n)) + [0])
    return permutation_group(gens)[0]


def quaternion_group() -> FiniteGroup:
    # Q8 as permutations of {±1,±i,±j,±k} encoded 0..7 via left multiplication
    i_perm = [2, 3, 1, 0, 6, 7, 5, 4]
    j_perm = [4, 5, 7, 6, 1, 0, 2, 3]
    return permutation_group([i_perm, j_perm])[0]


def alternating_group(n: int) -> FiniteGroup:
    if n < 3:
        return cyclic_group(1)
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(p)
    return permutation_group(gens)[0]


def subgroup_as_group(h: FiniteSubgroup) -> tuple[FiniteGroup, FiniteHom]:
    """Relabel ``h`` as a standalone group; returns it with the inclusion map."""
    members = list(h.members)
    pos = {x: i for i, x in enumerate(members)}
    g = h.parent
    table = [[pos[g.mul(a, b)] for b in members] for a in members]
    sub = make_finite_group(table)
    return sub, FiniteHom(sub, g, members)


def all_subgroups(g: FiniteGroup, bound: int = SUBGROUP_ORDER_BOUND) -> list[FiniteSubgroup]:
    """Every subgroup, by joining subgroups with cyclic subgroups until stable."""
    if g.order > bound:
        raise OrderBoundExceeded(f"group order {g.order} exceeds subgroup bound {bound}",
                                 witness=g.order)
    cyclic: dict[tuple[int, ...], int] = {}
    for x in range(g.order):
        members = tuple(_accel.closure(g.table, [x], g.identity))
        cyclic.setdefault(members, x)
    found: dict[tuple[int, ...], tuple[int, ...]] = {m: (x,) for m, x in cyclic.items()}
    frontier = list(found)
    while frontier:
        new = []
        for members in frontier:
            mset = set(members)
            gens = found[members]
            for cmem, x in cyclic.items():
                if x in mset:
                    continue
                joined = tuple(_accel.closure(g.table, gens + (x,), g.identity))
                if joined not in found:
                    found[joined] = gens + (x,)
                    new.append(joined)
        frontier = new
    return [FiniteSubgroup(g, m) for m in sorted(found, key=lambda m: (len(m), m))]


def is_normal(g: FiniteGroup, h: FiniteSubgroup) -> bool:
    return _accel.find_nonnormal(g.table, np.asarray(g.inverse, dtype=np.int64),
                                 list(h.members), list(g.generators)) is None


def normal_subgroups(g: FiniteGroup, bound: int = SUBGROUP_ORDER_BOUND) -> list[FiniteSubgroup]:
    return [h for h in all_subgroups(g, bound) if is_normal(g, h)]


def quotient(g: FiniteGroup, n: FiniteSubgroup) -> tuple[FiniteGroup, FiniteHom]:
    """Quotient by a normal subgroup; cosets are labelled by their least element."""
    if not is_normal(g, n):
        raise NotNormal("subgroup is not normal", witness=list(n.members))
    reps = []
    coset_of = [0] * g.order
    rep_index: dict[int, int] = {}
    for x in range(g.order):
        rep = min(g.mul(x, h) for h in n.members)
        if rep not in rep_index:
            rep_index[rep] = len(reps)
            reps.append(rep)
        coset_of[x] = rep_index[rep]
    table = [[coset_of[g.mul(a, b)] for b in reps] for a in reps]
    q = make_finite_group(table)
    return q, FiniteHom(g, q, coset_of)


def hom_properties(f: FiniteHom) -> HomProperties:
    kernel = FiniteSubgroup(f.source, tuple(x for x in range(f.source.order)
                                            if f.images[x] == f.target.identity))
    image = FiniteSubgroup(f.target, tuple(set(f.images)))
    return HomProperties(kernel.order == 1, kernel, image)


def automorphism_order(alpha: FiniteHom) -> int:
    if alpha.source != alpha.target or not alpha.is_bijective():
        raise NotAutomorphism("map is not a bijective endomorphism")
    images = alpha.images
    current = images
    k = 1
    ident = tuple(range(len(images)))
    while current != ident:
        current = tuple(images[i] for i in current)
        k += 1
    return k


def find_isomorphism(g: FiniteGroup, h: FiniteGroup) -> FiniteHom | None:
    """Some isomorphism ``g -> h`` by backtracking over generator images, or None."""
    if g.order != h.order:
        return None
    gens = g.generators
    orders = [g.element_order(x) for x in gens]
    cands = [[y for y in range(h.order) if h.element_order(y) == o] for o in orders]
    for choice in itertools.product(*cands):
        images = _extend_on_words(g, h, choice)
        if images is None or len(set(images)) != g.order:
            continue
        try:
            return FiniteHom(g, h, images)
        except NotHomomorphism:
            continue
    return None


def _extend_on_words(g: FiniteGroup, h: FiniteGroup, gen_images: Sequence[int]) -> list[int] | None:
    images = []
    for word in g.words:
        images.append(h.prod(gen_images[k] for k in word))
    return images


def hom_from_generator_images(g: FiniteGroup, h: FiniteGroup,
                              gen_images: Sequence[int]) -> FiniteHom:
    """Extend images of ``g.generators`` to a homomorphism (validated exhaustively)."""
    if len(gen_images) != len(g.generators):
        raise NotHomomorphism(
            f"expected {len(g.generators)} generator images, got {len(gen_images)}")
    images = _extend_on_words(g, h, [int(x) for x in gen_images])
    return FiniteHom(g, h, images)  # type: ignore[arg-type]


def automorphisms(g: FiniteGroup, limit: int | None = None) -> list[FiniteHom]:
    """Automorphisms of ``g`` (identity first), found by mapping generators."""
    gens = g.generators
    cands = [[y for y in range(g.order) if g.element_order(y) == g.element_order(x)]
             for x in gens]
    out = [FiniteHom.identity(g)]
    seen = {out[0].images}
    for choice in itertools.product(*cands):
        if limit is not None and len(out) >= limit:
            break
        images = _extend_on_words(g, g, choice)
        if images is None or len(set(images)) != g.order or tuple(images) in seen:
            continue
        try:
            f = FiniteHom(g, g, images)
        except NotHomomorphism:
            continue
        seen.add(f.images)
        out.append(f)
    return out
