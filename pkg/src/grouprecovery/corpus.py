"""Named groups and small test corpora.

Subgroups of S_n for n <= 6 are enumerated by brute force: grow subgroups by
adjoining one element at a time (one element per coset suffices), and collapse
conjugates by computing whole conjugacy classes of subgroups.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .group import (
    GroupError,
    PermutationGroup,
    alternating_group,
    cyclic_group,
    dihedral_group,
    symmetric_group,
    wreath_subgroup,
    young_subgroup,
)
from .perm import Permutation, compose, inverse, parse_cycles

WE6_GENERATORS = (
    "(1,10,13)(2,24,6)(3,17,11)(4,23,8)(5,26,25)(7,18,12)(9,20,16)(14,27,19)(15,21,22)",
    "(1,18,13,22,10,11)(2,4,21,27,9,15)(3,20,26,5,14,7)(6,25,23)(8,12,17,24,16,19)",
)


def weyl_e6() -> PermutationGroup:
    """W(E6) acting on the 27 lines of a cubic surface (order 51840)."""
    return PermutationGroup([parse_cycles(s, 27) for s in WE6_GENERATORS], 27)


def z2sq_x_d8() -> PermutationGroup:
    """Rectangle symmetries on {1,2,3,4} times square symmetries on {5,6,7,8}."""
    gens = ["(1,2)(3,4)", "(1,4)(2,3)", "(5,6,7,8)", "(6,8)"]
    return PermutationGroup([parse_cycles(s, 8) for s in gens], 8)


def builtin_group(name: str) -> PermutationGroup:
    """Resolve names like ``WE6``, ``D6``, ``C5``, ``Z2^2xD8``, ``S7``, ``A5``.

    Also ``young:3,2,1`` (Young subgroup with consecutive parts) and
    ``wreath:2x3`` (S_2 wr S_3 on 6 points, blocks of size 2).
    """
    key = name.strip()
    low = key.lower().replace("_", "").replace("(", "").replace(")", "")
    if low in ("we6", "w(e6)", "weyle6"):
        return weyl_e6()
    if low in ("z2^2xd8", "z2xz2xd8", "z2sqxd8"):
        return z2sq_x_d8()
    if low.startswith("young:"):
        sizes = [int(x) for x in low[6:].split(",")]
        blocks, start = [], 1
        for s in sizes:
            blocks.append(range(start, start + s))
            start += s
        return young_subgroup([list(b) for b in blocks])
    if low.startswith("wreath:"):
        m, k = (int(x) for x in low[7:].split("x"))
        blocks = [list(range(1 + b * m, 1 + (b + 1) * m)) for b in range(k)]
        return wreath_subgroup(blocks)
    makers = {"s": symmetric_group, "a": alternating_group, "c": cyclic_group, "d": dihedral_group}
    if low[:1] in makers and low[1:].isdigit():
        n = int(low[1:])
        if n < 1:
            raise GroupError(f"bad degree in {name!r}")
        return makers[low[0]](n)
    raise GroupError(f"unknown builtin group {name!r}")


BUILTIN_NAMES = ("WE6", "D6", "C5", "Z2^2xD8", "S<n>", "A<n>", "C<n>", "D<n>",
                 "young:<sizes>", "wreath:<m>x<k>")


# brute-force subgroup enumeration

class _SymmetricTable:
    """Multiplication table of S_n with elements in lexicographic order."""

    def __init__(self, n: int):
        self.n = n
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
        self.perms = perms
        self.size = len(perms)
        weights = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
        codes = perms @ weights
        prod = perms[:, perms]  # prod[a, b, i] = a[b[i]]
        self.mul = np.searchsorted(codes, prod @ weights)
        self.inv = np.argmax(self.mul == 0, axis=1)

    def perm(self, idx: int) -> Permutation:
        return Permutation(self.perms[idx].tolist(), check=False)

    def closure(self, gens) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        mask[0] = True
        frontier = np.array([0])
        gens = np.asarray(gens, dtype=np.int64)
        if gens.size == 0:
            return mask
        while frontier.size:
            new = np.unique(self.mul[np.ix_(frontier, gens)].ravel())
            new = new[~mask[new]]
            mask[new] = True
            frontier = new
        return mask

    def conjugate(self, mask: np.ndarray, g: int) -> np.ndarray:
        idx = np.flatnonzero(mask)
        out = np.zeros(self.size, dtype=bool)
        out[self.mul[self.mul[g, idx], self.inv[g]]] = True
        return out


@dataclass
class SubgroupClass:
    label: str
    representative: PermutationGroup
    order: int
    class_size: int
    members: list  # generator lists (as element indices) of every conjugate


@lru_cache(maxsize=8)
def _table(n: int) -> _SymmetricTable:
    return _SymmetricTable(n)


@lru_cache(maxsize=8)
def _enumerate_classes(n: int):
    if not 1 <= n <= 6:
        raise GroupError("brute-force subgroup enumeration supports 1 <= n <= 6")
    T = _table(n)
    trivial = T.closure([])
    known: dict[bytes, int] = {}
    classes = []  # (mask, gens, conjugates as {key: gens})

    def register(mask, gens):
        members = {}
        for g in range(T.size):
            c = T.conjugate(mask, g)
            key = c.tobytes()
            if key not in members:
                cg = [int(T.mul[T.mul[g, x], T.inv[g]]) for x in gens]
                members[key] = cg
                known[key] = len(classes)
        classes.append((mask, gens, members))

    register(trivial, [])
    k = 0
    while k < len(classes):
        mask, gens, _ = classes[k]
        k += 1
        idx = np.flatnonzero(mask)
        done = mask.copy()
        for g in range(T.size):
            if done[g]:
                continue
            done[T.mul[g, idx]] = True  # the coset gH gives the same join
            K = T.closure(gens + [g])
            if K.tobytes() not in known:
                register(K, gens + [g])
    return T, classes


def _class_list(n: int) -> list[SubgroupClass]:
    T, classes = _enumerate_classes(n)
    out = []
    for mask, gens, members in classes:
        G = PermutationGroup([T.perm(x) for x in gens], n)
        out.append(SubgroupClass("", G, int(mask.sum()), len(members), list(members.values())))
    out.sort(key=lambda c: (c.order, c.class_size, sorted(tuple(g) for g in c.representative.generators)))
    for i, c in enumerate(out):
        c.label = f"S{n}.{i + 1}"
    return out


@lru_cache(maxsize=8)
def subgroup_classes(n: int) -> tuple[SubgroupClass, ...]:
    """Conjugacy classes of subgroups of S_n (n <= 6), sorted by order."""
    return tuple(_class_list(n))


def subgroup_class_representatives(n: int) -> list[PermutationGroup]:
    return [c.representative for c in subgroup_classes(n)]


def all_subgroups(n: int) -> list[PermutationGroup]:
    T, _ = _enumerate_classes(n)
    out = []
    for c in subgroup_classes(n):
        for gens in c.members:
            out.append(PermutationGroup([T.perm(x) for x in gens], n))
    return out


def class_label(G: PermutationGroup) -> str:
    if G.is_primitive():
        return "primitive"
    if G.is_transitive():
        return "transitive"
    return "intransitive"


def _affine_mod(p: int, mults) -> PermutationGroup:
    gens = [Permutation([(x + 1) % p for x in range(p)])]
    gens += [Permutation([(m * x) % p for x in range(p)]) for m in mults]
    return PermutationGroup(gens, p)


@lru_cache(maxsize=1)
def _fano_group() -> PermutationGroup:
    lines = {frozenset((x % 7, (x + 1) % 7, (x + 3) % 7)) for x in range(7)}
    base = _affine_mod(7, [2])  # 7:3 preserves the lines
    for img in itertools.permutations(range(7)):
        g = Permutation(img, check=False)
        if {frozenset(g[x] for x in ln) for ln in lines} == lines and not base.contains(g):
            return PermutationGroup(base.generators + [g], 7)
    raise AssertionError("Fano automorphism search failed")


def transitive_groups_degree7() -> list[PermutationGroup]:
    """The seven transitive groups of degree 7."""
    return [
        _affine_mod(7, []),
        _affine_mod(7, [6]),
        _affine_mod(7, [2]),
        _affine_mod(7, [3]),
        _fano_group(),
        alternating_group(7),
        symmetric_group(7),
    ]


def _gf8_mul(a: int, b: int) -> int:
    r = 0
    for i in range(3):
        if b >> i & 1:
            r ^= a << i
    for i in (4, 3):
        if r >> i & 1:
            r ^= 0b1011 << (i - 3)
    return r


def transitive_groups_degree8_sample() -> list[PermutationGroup]:
    """A selection of transitive groups of degree 8 (not the full list of 50)."""
    out = [cyclic_group(8), dihedral_group(8)]
    xor = [Permutation([x ^ t for x in range(8)]) for t in (1, 2, 4)]
    out.append(PermutationGroup(xor, 8))  # C2^3 regular
    out.append(PermutationGroup([Permutation([(x + 1) % 4 + 4 * (x // 4) for x in range(8)]),
                                 Permutation([(x + 4) % 8 for x in range(8)])], 8))  # C4 x C2
    # Q8 regular: elements (sign, unit) with units 1,i,j,k encoded 0..3
    table = {(0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
             (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
             (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
             (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0)}

    def left(u):
        img = []
        for x in range(8):
            sign, v = (1 if x < 4 else -1), x % 4
            s, w = table[(u, v)]
            img.append(w + (0 if s * sign > 0 else 4))
        return Permutation(img)

    out.append(PermutationGroup([left(1), left(2)], 8))
    gen = 0b010  # the class of x, a primitive element of GF(8)
    affine = xor + [Permutation([_gf8_mul(gen, x) for x in range(8)])]
    out.append(PermutationGroup(affine, 8))  # AGL(1,8)
    frob = Permutation([_gf8_mul(x, x) for x in range(8)])
    out.append(PermutationGroup(affine + [frob], 8))  # AGammaL(1,8)
    lin = [Permutation([((x << 1) & 7) | (x >> 2) for x in range(8)]),  # cyclic shift of bits
           Permutation([x ^ ((x & 1) << 1) for x in range(8)])]  # transvection
    out.append(PermutationGroup(xor + lin, 8))  # AGL(3,2)
    # projective line over GF(7): points 0..6 and infinity = 7
    def mobius(f):
        return Permutation([f(x) for x in range(8)])

    shift = mobius(lambda x: 7 if x == 7 else (x + 1) % 7)
    square = mobius(lambda x: 7 if x == 7 else (2 * x) % 7)
    flip = mobius(lambda x: 0 if x == 7 else 7 if x == 0 else (-pow(x, 5, 7)) % 7)
    out.append(PermutationGroup([shift, square, flip], 8))  # PSL(2,7)
    out.append(PermutationGroup([shift, mobius(lambda x: 7 if x == 7 else (3 * x) % 7), flip], 8))
    out.append(wreath_subgroup([[1, 2], [3, 4], [5, 6], [7, 8]]))
    out.append(wreath_subgroup([[1, 2, 3, 4], [5, 6, 7, 8]]))
    out.append(alternating_group(8))
    out.append(symmetric_group(8))
    return out


@lru_cache(maxsize=1)
def transitive_groups_up_to(max_degree: int = 7) -> tuple[PermutationGroup, ...]:
    """Every transitive group of degree <= max_degree (max_degree <= 7), one per class."""
    if max_degree > 7:
        raise GroupError("the complete list is only available up to degree 7")
    out = []
    for n in range(1, min(max_degree, 6) + 1):
        out += [G for G in subgroup_class_representatives(n) if G.is_transitive()]
    if max_degree >= 7:
        out += transitive_groups_degree7()
    return tuple(out)


def element_list(G: PermutationGroup) -> list[Permutation]:
    """Elements of a small group in a deterministic order (closure by BFS)."""
    e = Permutation(range(G.degree), check=False)
    seen = {e: None}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in G.generators:
                y = compose(g, x)
                if y not in seen:
                    seen[y] = None
                    nxt.append(y)
        frontier = nxt
    return list(seen)


def conjugate_group(G: PermutationGroup, c: Permutation) -> PermutationGroup:
    ci = inverse(c)
    return PermutationGroup([compose(compose(c, g), ci) for g in G.generators], G.degree)


def factorial_ratio(G: PermutationGroup) -> float:
    return G.order() / math.factorial(G.degree)
