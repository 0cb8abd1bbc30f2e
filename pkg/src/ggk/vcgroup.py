"""Virtually cyclic groups in canonical form, with exact element arithmetic.

Three variants:

``FiniteVC(F)``
    elements are indices of ``F``.
``OrientableVC(F, alpha)``
    the split extension ``F ⋊_alpha Z``; element ``(f, n)`` means ``f·t^n`` and
    ``t f t⁻¹ = alpha(f)``.
``NonorientableVC(C, A, B, emb_a, emb_b, a, b)``
    the amalgam ``A *_C B`` with ``[A:C] = [B:C] = 2``.  Put ``T = b·a``; element
    ``(c, (n, eps))`` means ``c·T^n·a^eps``.  Modulo ``C`` this is the dihedral
    word ``(n, eps)`` of ``D∞ = Z ⋊ Z/2``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Callable, Iterator, Sequence

from .errors import (
    EdgeCosetEnumerationCapExceeded,
    ElementOutOfRange,
    InvalidVCGroup,
    NotHomomorphism,
    NotWellDefined,
    NotZorDinfty,
    PreimageNotFinite,
    RelationViolated,
    ClaimViolated,
)
from .finite_core import (
    FiniteGroup,
    FiniteHom,
    FiniteSubgroup,
    automorphism_order,
    cyclic_group,
    hom_properties,
    is_normal,
)

INFINITE = math.inf

Element = Any  # int | (int, int) | (int, (int, int))
Word = tuple[tuple[int, int], ...]  # (generator position, ±1)

DEFAULT_COSET_CAP = 10_000


# ---------------------------------------------------------------------------
# D∞ arithmetic


def dmul(x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
    """(n₁,ε₁)(n₂,ε₂) = (n₁ + (−1)^ε₁ n₂, ε₁ ⊕ ε₂)."""
    n1, e1 = x
    n2, e2 = y
    return (n1 - n2 if e1 else n1 + n2, e1 ^ e2)


def dinv(x: tuple[int, int]) -> tuple[int, int]:
    n, e = x
    return (n, 1) if e else (-n, 0)


def dpow(x: tuple[int, int], k: int) -> tuple[int, int]:
    n, e = x
    if e:
        return x if k % 2 else (0, 0)
    return (n * k, 0)


# ---------------------------------------------------------------------------
# Groups


class VCGroup:
    """Common interface.  Concrete variants below."""

    kind: str = ""
    finite_part: FiniteGroup

    # elements ------------------------------------------------------------
    @property
    def identity(self) -> Element:
        raise NotImplementedError

    def check(self, x: Element) -> Element:
        raise NotImplementedError

    def mul(self, x: Element, y: Element) -> Element:
        raise NotImplementedError

    def inv(self, x: Element) -> Element:
        raise NotImplementedError

    def prod(self, xs) -> Element:
        r = self.identity
        for x in xs:
            r = self.mul(r, x)
        return r

    def pow(self, x: Element, n: int) -> Element:
        if n < 0:
            x, n = self.inv(x), -n
        result, base = self.identity, x
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def conj(self, g: Element, x: Element) -> Element:
        """g·x·g⁻¹"""
        return self.mul(self.mul(g, x), self.inv(g))

    @property
    def is_infinite(self) -> bool:
        return self.kind != "finite"

    def key(self, x: Element) -> tuple:
        """Total order used for canonical representatives: translation length,
        sign, dihedral bit, finite-part index."""
        raise NotImplementedError

    def elements_by_key(self) -> Iterator[Element]:
        raise NotImplementedError

    def translation(self, x: Element):
        """Image in the quotient model: None, an integer, or a dihedral word."""
        raise NotImplementedError

    # generators ----------------------------------------------------------
    @cached_property
    def generator_names(self) -> tuple[str, ...]:
        raise NotImplementedError

    @cached_property
    def generator_elements(self) -> tuple[Element, ...]:
        raise NotImplementedError

    def element_word(self, x: Element) -> Word:
        raise NotImplementedError

    def eval_word(self, word: Word, images: Sequence[Element] | None = None,
                  target: VCGroup | None = None) -> Element:
        """Evaluate a word over ``generator_elements`` (or over ``images`` in ``target``)."""
        grp = target or self
        gens = images if images is not None else self.generator_elements
        r = grp.identity
        for k, s in word:
            g = gens[k]
            r = grp.mul(r, g if s > 0 else grp.inv(g))
        return r

    @cached_property
    def relators(self) -> tuple[tuple[str, Word], ...]:
        """Defining relators of the canonical presentation, as (name, word)."""
        raise NotImplementedError

    def finite_relators(self, offset: int = 0, prefix: str = "f") -> list[tuple[str, Word]]:
        f = self.finite_part
        words = f.words
        out = []
        for x in range(f.order):
            for k, g in enumerate(f.generators):
                y = f.mul(x, g)
                if words[x] + (k,) == words[y]:
                    continue
                w = tuple((offset + i, 1) for i in words[x]) + ((offset + k, 1),)
                w += tuple((offset + i, -1) for i in reversed(words[y]))
                out.append((f"{prefix}: w({x})*{prefix}{k} = w({y})", w))
        return out

    def _finite_word(self, f: int, offset: int = 0) -> Word:
        return tuple((offset + i, 1) for i in self.finite_part.words[f])

    # misc ----------------------------------------------------------------
    def order(self, x: Element) -> int | float:
        return vc_order(self, x)

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.describe()


class FiniteVC(VCGroup):
    kind = "finite"

    def __init__(self, F: FiniteGroup):
        self.finite_part = F

    def __eq__(self, other):
        return isinstance(other, FiniteVC) and self.finite_part == other.finite_part

    def __hash__(self):
        return hash(("finite", self.finite_part))

    @property
    def identity(self):
        return self.finite_part.identity

    def check(self, x):
        if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < self.finite_part.order:
            raise ElementOutOfRange(f"{x!r} is not an element of {self.describe()}", witness=x)
        return x

    def mul(self, x, y):
        return self.finite_part.mul(x, y)

    def inv(self, x):
        return self.finite_part.inv(x)

    def pow(self, x, n):
        return self.finite_part.power(x, n)

    def key(self, x):
        return (0, 0, 0, x)

    def elements_by_key(self):
        yield from range(self.finite_part.order)

    def translation(self, x):
        return None

    @cached_property
    def generator_names(self):
        return tuple(f"f{k}" for k in range(len(self.finite_part.generators)))

    @cached_property
    def generator_elements(self):
        return tuple(self.finite_part.generators)

    def element_word(self, x):
        return self._finite_word(x)

    @cached_property
    def relators(self):
        return tuple(self.finite_relators())

    def describe(self):
        return f"Finite(|F|={self.finite_part.order})"


class OrientableVC(VCGroup):
    kind = "orientable"

    def __init__(self, F: FiniteGroup, alpha: FiniteHom):
        if alpha.source != F or alpha.target != F or not alpha.is_bijective():
            raise InvalidVCGroup("alpha must be an automorphism of the finite part")
        self.finite_part = F
        self.alpha = alpha
        self.alpha_order = automorphism_order(alpha)
        powers = [tuple(range(F.order))]
        for _ in range(self.alpha_order - 1):
            powers.append(tuple(alpha.images[i] for i in powers[-1]))
        self._alpha_pow = powers

    def __eq__(self, other):
        return (isinstance(other, OrientableVC) and self.finite_part == other.finite_part
                and self.alpha.images == other.alpha.images)

    def __hash__(self):
        return hash(("orientable", self.finite_part, self.alpha.images))

    def alpha_power(self, n: int) -> tuple[int, ...]:
        return self._alpha_pow[n % self.alpha_order]

    @property
    def identity(self):
        return (self.finite_part.identity, 0)

    def check(self, x):
        try:
            f, n = x
            ok = isinstance(f, int) and isinstance(n, int) and 0 <= f < self.finite_part.order
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise ElementOutOfRange(f"{x!r} is not an element of {self.describe()}", witness=x)
        return (f, n)

    def mul(self, x, y):
        f1, n1 = x
        f2, n2 = y
        return (self.finite_part.mul(f1, self._alpha_pow[n1 % self.alpha_order][f2]), n1 + n2)

    def inv(self, x):
        f, n = x
        return (self._alpha_pow[(-n) % self.alpha_order][self.finite_part.inv(f)], -n)

    def key(self, x):
        f, n = x
        return (abs(n), 1 if n < 0 else 0, 0, f)

    def elements_by_key(self):
        level = 0
        while True:
            for n in ((0,) if level == 0 else (level, -level)):
                for f in range(self.finite_part.order):
                    yield (f, n)
            level += 1

    def translation(self, x):
        return x[1]

    @property
    def t(self):
        return (self.finite_part.identity, 1)

    @cached_property
    def generator_names(self):
        return tuple(f"f{k}" for k in range(len(self.finite_part.generators))) + ("t",)

    @cached_property
    def generator_elements(self):
        return tuple((g, 0) for g in self.finite_part.generators) + (self.t,)

    def element_word(self, x):
        f, n = x
        t = len(self.finite_part.generators)
        return self._finite_word(f) + ((t, 1 if n > 0 else -1),) * abs(n)

    @cached_property
    def relators(self):
        rels = self.finite_relators()
        t = len(self.finite_part.generators)
        for k, g in enumerate(self.finite_part.generators):
            w = ((t, 1), (k, 1), (t, -1))
            target = self._finite_word(self.alpha.images[g])
            rels.append((f"t*f{k}*t^-1 = alpha(f{k})", w + _inverse_word(target)))
        return tuple(rels)

    def describe(self):
        ident = self.alpha.images == tuple(range(self.finite_part.order))
        return f"Orientable(|F|={self.finite_part.order}, {'id' if ident else 'alpha'})"


class NonorientableVC(VCGroup):
    kind = "nonorientable"

    def __init__(self, C: FiniteGroup, A: FiniteGroup, B: FiniteGroup,
                 emb_a: FiniteHom, emb_b: FiniteHom, refl_a: int, refl_b: int):
        for name, emb, big, r in (("A", emb_a, A, refl_a), ("B", emb_b, B, refl_b)):
            if emb.source != C or emb.target != big:
                raise InvalidVCGroup(f"embedding into {name} has wrong source/target")
            props = hom_properties(emb)
            if not props.injective:
                raise InvalidVCGroup(f"C -> {name} is not injective")
            if big.order != 2 * C.order:
                raise InvalidVCGroup(f"[{name}:C] must be 2, got {big.order}/{C.order}")
            if not is_normal(big, props.image):
                raise InvalidVCGroup(f"image of C is not normal in {name}")
            if not 0 <= r < big.order or r in props.image:
                raise InvalidVCGroup(f"reflection representative of {name} lies in C")
        self.finite_part = C
        self.A, self.B = A, B
        self.emb_a, self.emb_b = emb_a, emb_b
        self.refl_a, self.refl_b = refl_a, refl_b
        back_a = {y: x for x, y in enumerate(emb_a.images)}
        back_b = {y: x for x, y in enumerate(emb_b.images)}
        ainv, binv = A.inv(refl_a), B.inv(refl_b)
        self.phi_a = tuple(back_a[A.prod((refl_a, emb_a.images[c], ainv))] for c in range(C.order))
        self.phi_b = tuple(back_b[B.prod((refl_b, emb_b.images[c], binv))] for c in range(C.order))
        self.a2 = back_a[A.mul(refl_a, refl_a)]
        self.b2 = back_b[B.mul(refl_b, refl_b)]
        # tau = conjugation by T = b·a on C
        tau = tuple(self.phi_b[self.phi_a[c]] for c in range(C.order))
        powers = [tuple(range(C.order))]
        while True:
            nxt = tuple(tau[i] for i in powers[-1])
            if nxt == powers[0]:
                break
            powers.append(nxt)
        self._tau_pow = powers
        self.tau_order = len(powers)
        # a·T·a⁻¹ = k·T⁻¹ with k = a2·tau⁻¹(b2)
        self._k = C.mul(self.a2, self.tau_power(-1)[self.b2])
        self._psi_cache: dict[int, tuple[int, int]] = {}

    def __eq__(self, other):
        return (isinstance(other, NonorientableVC) and self.finite_part == other.finite_part
                and self.A == other.A and self.B == other.B
                and self.emb_a.images == other.emb_a.images
                and self.emb_b.images == other.emb_b.images
                and (self.refl_a, self.refl_b) == (other.refl_a, other.refl_b))

    def __hash__(self):
        return hash(("nonorientable", self.finite_part, self.A, self.B, self.emb_a.images,
                     self.emb_b.images, self.refl_a, self.refl_b))

    def tau_power(self, n: int) -> tuple[int, ...]:
        return self._tau_pow[n % self.tau_order]

    # the orientable index-2 subgroup C ⋊_tau <T>, elements (c, n) = c·T^n
    def _g0_mul(self, x, y):
        c1, n1 = x
        c2, n2 = y
        return (self.finite_part.mul(c1, self._tau_pow[n1 % self.tau_order][c2]), n1 + n2)

    def _g0_inv(self, x):
        c, n = x
        return (self._tau_pow[(-n) % self.tau_order][self.finite_part.inv(c)], -n)

    def _g0_pow(self, x, n):
        if n < 0:
            x, n = self._g0_inv(x), -n
        result, base = (self.finite_part.identity, 0), x
        while n:
            if n & 1:
                result = self._g0_mul(result, base)
            base = self._g0_mul(base, base)
            n >>= 1
        return result

    def _psi_T(self, n: int) -> tuple[int, int]:
        """a·T^n·a⁻¹ = (k·T⁻¹)^n."""
        hit = self._psi_cache.get(n)
        if hit is None:
            hit = self._g0_pow((self._k, -1), n)
            if len(self._psi_cache) < 4096:
                self._psi_cache[n] = hit
        return hit

    def _psi(self, x):
        c, n = x
        return self._g0_mul((self.phi_a[c], 0), self._psi_T(n))

    @property
    def identity(self):
        return (self.finite_part.identity, (0, 0))

    def check(self, x):
        try:
            c, (n, e) = x
            ok = (isinstance(c, int) and isinstance(n, int) and e in (0, 1)
                  and 0 <= c < self.finite_part.order)
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise ElementOutOfRange(f"{x!r} is not an element of {self.describe()}", witness=x)
        return (c, (n, int(e)))

    def mul(self, x, y):
        c1, (n1, e1) = x
        c2, (n2, e2) = y
        g2 = (c2, n2)
        if e1:
            g2 = self._psi(g2)
        c, n = self._g0_mul((c1, n1), g2)
        if e1 and e2:
            c, n = self._g0_mul((c, n), (self.a2, 0))
            return (c, (n, 0))
        return (c, (n, e1 ^ e2))

    def inv(self, x):
        c, (n, e) = x
        gi = self._g0_inv((c, n))
        if not e:
            return (gi[0], (gi[1], 0))
        r = self._g0_mul((self.finite_part.inv(self.a2), 0), self._psi(gi))
        return (r[0], (r[1], 1))

    def key(self, x):
        c, (n, e) = x
        return (abs(n), 1 if n < 0 else 0, e, c)

    def elements_by_key(self):
        level = 0
        while True:
            for n in ((0,) if level == 0 else (level, -level)):
                for e in (0, 1):
                    for c in range(self.finite_part.order):
                        yield (c, (n, e))
            level += 1

    def translation(self, x):
        return x[1]

    @property
    def a(self):
        return (self.finite_part.identity, (0, 1))

    @property
    def T(self):
        return (self.finite_part.identity, (1, 0))

    @cached_property
    def b(self):
        return self.mul(self.T, self.inv(self.a))

    @cached_property
    def generator_names(self):
        return tuple(f"c{k}" for k in range(len(self.finite_part.generators))) + ("a", "b")

    @cached_property
    def generator_elements(self):
        e = (0, 0)
        return tuple((g, e) for g in self.finite_part.generators) + (self.a, self.b)

    def element_word(self, x):
        c, (n, e) = x
        k = len(self.finite_part.generators)
        a, b = k, k + 1
        # c·T^n·a^e with T = b·a and T⁻¹ = a⁻¹·b⁻¹; the C-part is recovered exactly
        core = ((b, 1), (a, 1)) * n if n > 0 else ((a, -1), (b, -1)) * (-n)
        tail = ((a, 1),) if e else ()
        rest = self.eval_word(core + tail)
        cpart = self.mul(x, self.inv(rest))
        assert cpart[1] == (0, 0)
        return self._finite_word(cpart[0]) + core + tail

    @cached_property
    def relators(self):
        rels = self.finite_relators(prefix="c")
        k = len(self.finite_part.generators)
        a, b = k, k + 1
        for name, r, phi, sq in (("a", a, self.phi_a, self.a2), ("b", b, self.phi_b, self.b2)):
            for i, g in enumerate(self.finite_part.generators):
                w = ((r, 1), (i, 1), (r, -1)) + _inverse_word(self._finite_word(phi[g]))
                rels.append((f"{name}*c{i}*{name}^-1 = phi_{name}(c{i})", w))
            rels.append((f"{name}^2 = {name}2", ((r, 1), (r, 1)) + _inverse_word(self._finite_word(sq))))
        return tuple(rels)

    def describe(self):
        return f"Nonorientable(|C|={self.finite_part.order}, |A|={self.A.order}, |B|={self.B.order})"


def _inverse_word(w: Word) -> Word:
    return tuple((k, -s) for k, s in reversed(w))


# ---------------------------------------------------------------------------
# Constructors and models


def finite_vc(F: FiniteGroup) -> FiniteVC:
    return FiniteVC(F)


def orientable(F: FiniteGroup, alpha: FiniteHom | Sequence[int] | None = None) -> OrientableVC:
    if alpha is None:
        alpha = FiniteHom.identity(F)
    elif not isinstance(alpha, FiniteHom):
        alpha = FiniteHom(F, F, alpha)
    return OrientableVC(F, alpha)


def nonorientable(C: FiniteGroup, A: FiniteGroup, B: FiniteGroup,
                  c_in_a: FiniteHom | Sequence[int], c_in_b: FiniteHom | Sequence[int],
                  refl_a: int, refl_b: int) -> NonorientableVC:
    if not isinstance(c_in_a, FiniteHom):
        c_in_a = FiniteHom(C, A, c_in_a)
    if not isinstance(c_in_b, FiniteHom):
        c_in_b = FiniteHom(C, B, c_in_b)
    return NonorientableVC(C, A, B, c_in_a, c_in_b, refl_a, refl_b)


@lru_cache(maxsize=None)
def trivial_model() -> FiniteVC:
    return FiniteVC(cyclic_group(1))


@lru_cache(maxsize=None)
def z2_group() -> FiniteVC:
    return FiniteVC(cyclic_group(2))


@lru_cache(maxsize=None)
def z_model() -> OrientableVC:
    return orientable(cyclic_group(1))


@lru_cache(maxsize=None)
def dinfty_model() -> NonorientableVC:
    one, two = cyclic_group(1), cyclic_group(2)
    return nonorientable(one, two, two, [0], [0], 1, 1)


def is_z_model(G: VCGroup) -> bool:
    return G.kind == "orientable" and G.finite_part.order == 1


def is_dinfty_model(G: VCGroup) -> bool:
    return G.kind == "nonorientable" and G.finite_part.order == 1


def model_name(G: VCGroup) -> str:
    if G.kind == "finite":
        return "Trivial" if G.finite_part.order == 1 else "Finite"
    if is_z_model(G):
        return "Z"
    if is_dinfty_model(G):
        return "Dinfty"
    return G.kind.capitalize()


# ---------------------------------------------------------------------------
# Order, balls, subgroups


def vc_order(G: VCGroup, x: Element) -> int | float:
    x = G.check(x)
    if G.kind == "orientable" and x[1] != 0:
        return INFINITE
    if G.kind == "nonorientable" and x[1][1] == 0 and x[1][0] != 0:
        return INFINITE
    extra = getattr(G, "alpha_order", None) or getattr(G, "tau_order", 1)
    bound = 2 * G.finite_part.order * max(1, extra)
    y, k = x, 1
    while y != G.identity:
        y = G.mul(y, x)
        k += 1
        assert k <= bound, "order iteration bound exceeded"
    return k


def vc_ball(G: VCGroup, radius: int) -> list[Element]:
    """Elements of word length ≤ radius over the generators and their inverses."""
    gens = list(G.generator_elements) + [G.inv(g) for g in G.generator_elements]
    seen = {G.identity}
    out = [G.identity]
    frontier = [G.identity]
    for _ in range(radius):
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    out.append(y)
                    nxt.append(y)
        frontier = nxt
    return out


@dataclass(frozen=True)
class VCFiniteSubgroup:
    """A finite subgroup of a VCGroup, listed element by element."""

    group: VCGroup
    elements: frozenset

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def sorted_elements(self) -> list:
        return sorted(self.elements, key=self.group.key)

    def __eq__(self, other):
        return (isinstance(other, VCFiniteSubgroup) and self.group == other.group
                and self.elements == other.elements)

    def __hash__(self):
        return hash(self.elements)


@dataclass(frozen=True)
class MaxFiniteNormal:
    subgroup: VCFiniteSubgroup
    cls: str  # finite | orientable | nonorientable


def max_finite_normal(G: VCGroup) -> MaxFiniteNormal:
    F = G.finite_part
    if G.kind == "finite":
        elems = frozenset(range(F.order))
    elif G.kind == "orientable":
        elems = frozenset((f, 0) for f in range(F.order))
    else:
        elems = frozenset((c, (0, 0)) for c in range(F.order))
    return MaxFiniteNormal(VCFiniteSubgroup(G, elems), G.kind)


def _finite_closure(G: VCGroup, seeds, cap: int, conjugators=()) -> frozenset | None:
    """Subgroup generated by the conjugation orbit of ``seeds``; None if larger than cap."""
    orbit = set(seeds)
    queue = deque(orbit)
    while queue:
        x = queue.popleft()
        for g in conjugators:
            y = G.conj(g, x)
            if y not in orbit:
                if len(orbit) >= cap:
                    return None
                orbit.add(y)
                queue.append(y)
    members = {G.identity}
    queue = deque([G.identity])
    gens = list(orbit)
    while queue:
        x = queue.popleft()
        for g in gens:
            y = G.mul(x, g)
            if y not in members:
                if len(members) >= cap:
                    return None
                members.add(y)
                queue.append(y)
    return frozenset(members)


@dataclass(frozen=True)
class OracleResult:
    maximum: frozenset
    family: tuple[frozenset, ...]
    unique_top: bool


def brute_force_max_finite_normal(G: VCGroup, radius: int = 4) -> OracleResult:
    """Independent oracle: normal closures of torsion elements of the radius ball.

    Torsion is detected by powering (no use of the translation structure);
    finite normal subgroups found this way and their joins form the family.
    """
    cap = 2 * G.finite_part.order
    conjugators = list(G.generator_elements) + [G.inv(g) for g in G.generator_elements]
    family: set[frozenset] = set()
    for x in vc_ball(G, radius):
        y, k = x, 1
        while y != G.identity and k <= cap:
            y = G.mul(y, x)
            k += 1
        if y != G.identity:
            continue
        n = _finite_closure(G, [x], cap, conjugators)
        if n is not None:
            family.add(n)
    joined = set(family)
    changed = True
    while changed:
        changed = False
        for p in list(joined):
            for q in list(joined):
                if p <= q or q <= p:
                    continue
                j = _finite_closure(G, p | q, cap, conjugators)
                if j is not None and j not in joined:
                    joined.add(j)
                    changed = True
    tops = [s for s in joined if not any(s < o for o in joined)]
    top = max(joined, key=len)
    return OracleResult(top, tuple(sorted(joined, key=len)), len(tops) == 1)


@dataclass(frozen=True)
class InfiniteCyclicSubgroup:
    group: VCGroup
    generator: Element

    def __contains__(self, x) -> bool:
        tr = self.group.translation(x)
        return isinstance(tr, int) or (isinstance(tr, tuple) and tr[1] == 0)


def max_infinite_cyclic(G: VCGroup) -> InfiniteCyclicSubgroup:
    if is_z_model(G):
        return InfiniteCyclicSubgroup(G, G.t)
    if is_dinfty_model(G):
        return InfiniteCyclicSubgroup(G, G.T)
    raise NotZorDinfty(f"{G.describe()} is neither Z nor D∞", witness=G.describe())


# ---------------------------------------------------------------------------
# Homomorphisms


class VCHom:
    """Homomorphism given on the canonical generating set of the source.

    Finite source: images of all elements.  Orientable: images of the
    finite-part generators then ``t``.  Nonorientable: images of the
    C-generators then ``a``, ``b``.
    """

    def __init__(self, source: VCGroup, target: VCGroup, images: Sequence[Element]):
        self.source = source
        self.target = target
        images = [target.check(target_norm(target, y)) for y in images]
        if source.kind == "finite":
            if len(images) != source.finite_part.order:
                raise RelationViolated(
                    f"finite source needs {source.finite_part.order} images, got {len(images)}")
            F = source.finite_part
            for x in range(F.order):
                for y in range(F.order):
                    if target.mul(images[x], images[y]) != images[F.mul(x, y)]:
                        raise RelationViolated(f"f({x})*f({y}) != f({x}*{y})", witness=[x, y])
            self.images = tuple(images)
            self.finite_images = tuple(images)
        else:
            if len(images) != len(source.generator_elements):
                raise RelationViolated(
                    f"expected {len(source.generator_elements)} generator images "
                    f"{list(source.generator_names)}, got {len(images)}")
            self.images = tuple(images)
            for name, w in source.relators:
                if source.eval_word(w, self.images, target) != target.identity:
                    raise RelationViolated(f"relation {name} fails under the map", witness=name)
            k = len(source.finite_part.generators)
            fimgs = self.images[:k]
            self.finite_images = tuple(
                target.prod(fimgs[i] for i in w) for w in source.finite_part.words)
        self._inverse_cache: dict = {}
        self._rep_cache: dict = {}

    def __eq__(self, other):
        return (isinstance(other, VCHom) and self.source == other.source
                and self.target == other.target and self.images == other.images)

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"VCHom({self.source.describe()} -> {self.target.describe()}, {list(self.images)})"

    def __call__(self, x: Element) -> Element:
        G, H = self.source, self.target
        if G.kind == "finite":
            return self.images[x]
        if G.kind == "orientable":
            f, n = x
            return H.mul(self.finite_images[f], H.pow(self.images[-1], n))
        c, (n, e) = x
        r = H.mul(self.finite_images[c], H.pow(self.image_T, n))
        return H.mul(r, self.images[-2]) if e else r

    @cached_property
    def image_T(self):
        return self.target.mul(self.images[-1], self.images[-2])

    @cached_property
    def infinite_generator_image(self):
        """Image of t (orientable) or T = b·a (nonorientable)."""
        if self.source.kind == "orientable":
            return self.images[-1]
        if self.source.kind == "nonorientable":
            return self.image_T
        return None

    # preimages and cosets ----------------------------------------------
    def preimage(self, y: Element) -> Element | None:
        """The unique source element mapping to ``y`` (requires injectivity), or None."""
        if y in self._inverse_cache:
            return self._inverse_cache[y]
        r = self._preimage(y)
        if len(self._inverse_cache) < 100_000:
            self._inverse_cache[y] = r
        return r

    @cached_property
    def _finite_lookup(self) -> dict:
        return {y: x for x, y in enumerate(self.finite_images)}

    def _preimage(self, y):
        G, H = self.source, self.target
        if G.kind == "finite":
            return self._finite_lookup.get(y)
        u = self.infinite_generator_image
        pu = H.translation(u)
        tails = [(0, H.identity)] if G.kind == "orientable" else [
            (0, H.identity), (1, self.images[-2])]
        for e, tail in tails:
            z = H.mul(y, H.inv(tail))
            for c, fc in enumerate(self.finite_images):
                w = H.mul(H.inv(fc), z)  # must equal u^n
                n = solve_power(pu, H.translation(w))
                if n is None:
                    continue
                if H.mul(fc, H.pow(u, n)) == z:
                    return (c, n) if G.kind == "orientable" else (c, (n, e))
        return None

    @cached_property
    def _image_set_finite(self) -> tuple | None:
        if self.source.kind == "finite":
            return tuple(self.images)
        return None

    def coset_rep(self, y: Element, cap: int | None = None) -> Element:
        """Least element (by ``key``) of the left coset ``y·image``."""
        if y in self._rep_cache:
            return self._rep_cache[y]
        H = self.target
        fin = self._image_set_finite
        if fin is not None:
            rep = min((H.mul(y, h) for h in fin), key=H.key)
        else:
            cap = cap or coset_cap()
            yinv = H.inv(y)
            for i, z in enumerate(H.elements_by_key()):
                if i >= cap:
                    raise EdgeCosetEnumerationCapExceeded(
                        f"no coset representative among the first {cap} elements", witness=cap)
                if self.preimage(H.mul(yinv, z)) is not None:
                    rep = z
                    break
        if len(self._rep_cache) < 100_000:
            self._rep_cache[y] = rep
        return rep

    def decompose(self, y: Element) -> tuple[Element, Element]:
        """Write ``y = s·f(h)`` with ``s`` the canonical coset representative."""
        s = self.coset_rep(y)
        h = self.preimage(self.target.mul(self.target.inv(s), y))
        assert h is not None
        return s, h

    def transversal(self, limit: int) -> tuple[list[Element], bool]:
        """Canonical coset representatives in key order; flag is True if truncated."""
        idx = subgroup_index(self)
        reps: list = []
        cap = coset_cap()
        for i, z in enumerate(self.target.elements_by_key()):
            if idx is not None and len(reps) == idx:
                return reps, False
            if len(reps) >= limit:
                return reps, True
            if i >= cap:
                raise EdgeCosetEnumerationCapExceeded(
                    f"transversal enumeration exceeded {cap} elements", witness=cap)
            if self.coset_rep(z) == z:
                reps.append(z)
        return reps, False  # pragma: no cover - finite target exhausted


def target_norm(G: VCGroup, y):
    """Normalize JSON-ish element encodings (lists) to tuples."""
    if G.kind == "finite":
        return y
    if G.kind == "orientable":
        return tuple(y) if isinstance(y, list) else y
    if isinstance(y, list):
        c, d = y
        return (c, tuple(d))
    return y


def coset_cap() -> int:
    import os
    try:
        return int(os.environ.get("GGK_COSET_CAP", DEFAULT_COSET_CAP))
    except ValueError:
        return DEFAULT_COSET_CAP


def solve_power(u, w) -> int | None:
    """n with u^n = w in a quotient model (u of infinite order); None if none."""
    if u is None or w is None:
        return None
    if isinstance(u, int):
        if u == 0:
            raise PreimageNotFinite("generator image has finite order")
        return w // u if w % u == 0 else None
    m, eps = u
    if eps or m == 0:
        raise PreimageNotFinite("generator image has finite order")
    p, e = w
    if e or p % m:
        return None
    return p // m


def vc_hom(source: VCGroup, target: VCGroup, images: Sequence[Element]) -> VCHom:
    return VCHom(source, target, images)


def identity_hom(G: VCGroup) -> VCHom:
    if G.kind == "finite":
        return VCHom(G, G, list(range(G.finite_part.order)))
    return VCHom(G, G, list(G.generator_elements))


def vc_hom_is_injective(f: VCHom) -> bool:
    G, H = f.source, f.target
    if G.kind == "finite":
        return len(set(f.images)) == G.finite_part.order
    if len(set(f.finite_images)) != G.finite_part.order:
        return False
    return vc_order(H, f.infinite_generator_image) == INFINITE


def injective_on_ball(f: VCHom, radius: int = 8) -> bool:
    """Brute-force oracle: images of the radius ball are pairwise distinct."""
    ball = vc_ball(f.source, radius)
    return len({f(x) for x in ball}) == len(ball)


def kernel_witness(f: VCHom) -> Element | None:
    """A nontrivial kernel element, if the map is not injective."""
    G, H = f.source, f.target
    if G.kind == "finite" or len(set(f.finite_images)) != G.finite_part.order:
        seen: dict = {}
        for x, y in enumerate(f.finite_images):
            if y in seen:
                d = G.finite_part.mul(G.finite_part.inv(seen[y]), x)
                if G.kind == "finite":
                    return d
                return (d, 0) if G.kind == "orientable" else (d, (0, 0))
            seen[y] = x
        return None
    u = f.infinite_generator_image
    k = vc_order(H, u)
    if k == INFINITE:
        return None
    return (G.finite_part.identity, int(k)) if G.kind == "orientable" else (
        G.finite_part.identity, (int(k), 0))


def subgroup_index(f: VCHom) -> int | None:
    """[target : f(source)] for injective f; None when infinite."""
    G, H = f.source, f.target
    if H.kind == "finite":
        return H.finite_part.order // G.finite_part.order
    if G.kind == "finite":
        return None
    w = {"orientable": 1, "nonorientable": 2}
    tr = H.translation(f.infinite_generator_image)
    m = abs(tr if isinstance(tr, int) else tr[0])
    num = w[H.kind] * H.finite_part.order * m
    den = w[G.kind] * G.finite_part.order
    assert num % den == 0
    return num // den


# ---------------------------------------------------------------------------
# Quotients by the maximal finite normal subgroup


@dataclass(frozen=True)
class QuotientModel:
    name: str  # Trivial | Z | Dinfty
    model: VCGroup
    projection: VCHom


def quotient_by_max_finite(G: VCGroup) -> QuotientModel:
    if G.kind == "finite":
        M = trivial_model()
        return QuotientModel("Trivial", M, VCHom(G, M, [0] * G.finite_part.order))
    k = len(G.finite_part.generators)
    if G.kind == "orientable":
        M = z_model()
        return QuotientModel("Z", M, VCHom(G, M, [M.identity] * k + [M.t]))
    M = dinfty_model()
    images = [M.identity] * k + [(0, G.a[1]), (0, G.b[1])]
    return QuotientModel("Dinfty", M, VCHom(G, M, images))


def quotient_by_max_infinite_cyclic(G: VCGroup) -> QuotientModel:
    """Z → trivial, D∞ → Z/2 (the reflection bit)."""
    max_infinite_cyclic(G)
    if is_z_model(G):
        M = trivial_model()
        return QuotientModel("Trivial", M, VCHom(G, M, [0]))
    M = z2_group()
    return QuotientModel("Z/2", M, VCHom(G, M, [G.a[1][1], G.b[1][1]]))


def preimage_of_subgroup(f: VCHom, S: VCFiniteSubgroup) -> VCFiniteSubgroup:
    """{x : f(x) ∈ S} for a finite normal subgroup S of the target."""
    G, H = f.source, f.target
    mfn = max_finite_normal(H).subgroup
    if not S.elements <= mfn.elements:
        raise ClaimViolated("S is not contained in the maximal finite normal subgroup",
                            witness=[repr(x) for x in S.elements - mfn.elements])
    if G.kind == "finite":
        return VCFiniteSubgroup(G, frozenset(x for x in range(G.finite_part.order) if f(x) in S))
    proj = quotient_by_max_finite(H).projection
    M = proj.target
    u = proj(f.infinite_generator_image)
    pu = M.translation(u)
    if M.kind == "finite" or (isinstance(pu, int) and pu == 0) or (
            isinstance(pu, tuple) and (pu[1] or pu[0] == 0)):
        raise PreimageNotFinite("an infinite-order source element maps into S",
                                witness=repr(f.infinite_generator_image))
    out = set()
    tails = [0] if G.kind == "orientable" else [0, 1]
    for e in tails:
        tail = proj(f(G.a)) if e else M.identity
        for c, fc in enumerate(f.finite_images):
            # proj(f(c))·u^n·tail = 1  ⇔  u^n = proj(f(c))⁻¹·tail⁻¹
            need = M.mul(M.inv(proj(fc)), M.inv(tail))
            n = solve_power(pu, M.translation(need))
            if n is None:
                continue
            x = (c, n) if G.kind == "orientable" else (c, (n, e))
            if f(x) in S:
                out.add(x)
    return VCFiniteSubgroup(G, frozenset(out))


@dataclass(frozen=True)
class InducedQuotientHom:
    hom: VCHom
    source_quotient: QuotientModel
    target_quotient: QuotientModel
    injective: bool


def induced_hom_on_quotients(f: VCHom) -> InducedQuotientHom:
    """The map source/f⁻¹(F_target) → target/F_target between quotient models."""
    qs, qt = quotient_by_max_finite(f.source), quotient_by_max_finite(f.target)
    pre = preimage_of_subgroup(f, max_finite_normal(f.target).subgroup)
    if pre != max_finite_normal(f.source).subgroup:
        raise NotWellDefined("preimage of the target's finite normal part is not the source's",
                             witness=sorted(map(repr, pre.elements)))
    for x in max_finite_normal(f.source).subgroup.elements:
        if qt.projection(f(x)) != qt.model.identity:
            raise NotWellDefined(f"{x!r} is killed in the source quotient but not the target")
    return _induced(f, qs, qt)


def induced_hom_mod_max_infinite_cyclic(f: VCHom) -> InducedQuotientHom:
    """Induced map after quotienting both sides by their maximal infinite cyclic subgroups."""
    qs, qt = quotient_by_max_infinite_cyclic(f.source), quotient_by_max_infinite_cyclic(f.target)
    gen = max_infinite_cyclic(f.source).generator
    if qt.projection(f(gen)) != qt.model.identity:
        raise NotWellDefined("maximal infinite cyclic subgroup not mapped into its counterpart")
    return _induced(f, qs, qt)


def _induced(f: VCHom, qs: QuotientModel, qt: QuotientModel) -> InducedQuotientHom:
    S, T = qs.model, qt.model
    if S.kind == "finite":
        # lift each quotient element through the projection, map, project
        lifts: dict = {}
        for x in _lift_candidates(f.source):
            lifts.setdefault(qs.projection(x), x)
        images = [qt.projection(f(lifts[i])) for i in range(S.finite_part.order)]
    elif S.kind == "orientable":
        images = [qt.projection(f(f.source.generator_elements[-1]))]
    else:
        images = [qt.projection(f(f.source.a)), qt.projection(f(f.source.b))]
    try:
        h = VCHom(S, T, images)
    except (RelationViolated, NotHomomorphism) as exc:
        raise NotWellDefined(f"induced map violates a relation: {exc}") from exc
    for g in f.source.generator_elements:
        if h(qs.projection(g)) != qt.projection(f(g)):
            raise NotWellDefined(f"induced map does not commute with projections at {g!r}")
    return InducedQuotientHom(h, qs, qt, vc_hom_is_injective(h))


def _lift_candidates(G: VCGroup):
    if G.kind == "finite":
        return range(G.finite_part.order)
    return vc_ball(G, 2)


def random_element(G: VCGroup, rng, length: int = 6) -> Element:
    gens = G.generator_elements
    x = G.identity
    if not gens:
        return x
    for _ in range(rng.randint(0, length)):
        g = gens[rng.randrange(len(gens))]
        x = G.mul(x, g if rng.random() < 0.5 else G.inv(g))
    return x
