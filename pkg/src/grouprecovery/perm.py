"""Permutations of {1..n}.

A ``Permutation`` is an immutable tuple of 0-based images: ``p[i]`` is the
image of the 0-based point ``i``.  Everything that faces a user (parsing,
formatting, ``p(i)``, the ``point`` arguments of the helpers below) speaks
1-based points.

Composition applies the right factor first: ``compose(a, b)(i) == a(b(i))``.
"""
from __future__ import annotations

import math
import re
from functools import lru_cache
from operator import eq, itemgetter
from typing import Iterable, Sequence


class PermutationError(ValueError):
    pass


class Permutation(tuple):
    __slots__ = ()

    def __new__(cls, images: Iterable[int] = (), check: bool = True):
        self = tuple.__new__(cls, images)
        if check:
            n = len(self)
            if sorted(self) != list(range(n)):
                raise PermutationError(f"not a bijection of 0..{n - 1}: {tuple(self)!r}")
        return self

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "Permutation":
        """Build from 1-based one-line notation, e.g. ``[2, 1, 3]``."""
        return cls(x - 1 for x in images)

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Permutation":
        """Build from 1-based disjoint cycles."""
        img = list(range(n))
        seen = set()
        for cyc in cycles:
            for x in cyc:
                if not 1 <= x <= n:
                    raise PermutationError(f"point {x} out of range 1..{n}")
                if x in seen:
                    raise PermutationError(f"point {x} repeated")
                seen.add(x)
            for a, b in zip(cyc, list(cyc[1:]) + list(cyc[:1])):
                img[a - 1] = b - 1
        return cls(img, check=False)

    @property
    def degree(self) -> int:
        return len(self)

    @property
    def images(self) -> list[int]:
        """1-based one-line notation."""
        return [x + 1 for x in self]

    def __call__(self, point: int) -> int:
        _check_point(point, len(self))
        return self[point - 1] + 1

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        return inverse(self)

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        return cycles(self, include_fixed)

    def order(self) -> int:
        return math.lcm(*cycle_type(self)) if len(self) else 1

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r}, n={len(self)})"

    def __str__(self) -> str:
        return format_cycles(self)


def _check_point(point: int, n: int) -> None:
    if not 1 <= point <= n:
        raise PermutationError(f"point {point} out of range 1..{n}")


def identity(n: int) -> Permutation:
    if n < 1:
        raise PermutationError("degree must be at least 1")
    return _identity(n)


@lru_cache(maxsize=None)
def _identity(n: int) -> Permutation:
    return Permutation(range(n), check=False)


def compose(a: Permutation, b: Permutation) -> Permutation:
    """``a`` after ``b``: the result sends i to a(b(i))."""
    if len(a) != len(b):
        raise PermutationError(f"degree mismatch: {len(a)} vs {len(b)}")
    if len(b) > 1:
        return Permutation(itemgetter(*b)(a), check=False)
    return Permutation(a, check=False)


def inverse(p: Permutation) -> Permutation:
    return Permutation(sorted(range(len(p)), key=p.__getitem__), check=False)


def is_identity(p: Permutation) -> bool:
    return p == _identity(len(p))


def cycles(p: Permutation, include_fixed: bool = False) -> list[tuple[int, ...]]:
    """Disjoint cycles as 1-based tuples, each starting at its smallest point."""
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x + 1)
            x = p[x]
        if len(cyc) > 1 or include_fixed:
            out.append(tuple(cyc))
    return out


def cycle_type(p: Permutation) -> list[int]:
    """Cycle lengths (fixed points included), in order of smallest point."""
    seen = [False] * len(p)
    lengths = []
    for start in range(len(p)):
        if seen[start]:
            continue
        k = 0
        x = start
        while not seen[x]:
            seen[x] = True
            k += 1
            x = p[x]
        lengths.append(k)
    return lengths


def cycle_labels(p: Permutation) -> list[int]:
    """label[i] = index of the cycle containing 0-based point i."""
    label = [-1] * len(p)
    c = 0
    for start in range(len(p)):
        if label[start] >= 0:
            continue
        x = start
        while label[x] < 0:
            label[x] = c
            x = p[x]
        c += 1
    return label


def is_even(p: Permutation) -> bool:
    return (len(p) - len(cycle_type(p))) % 2 == 0


def parity(p: Permutation) -> str:
    return "even" if is_even(p) else "odd"


def fix_count(p: Permutation) -> int:
    return sum(map(eq, p, range(len(p))))


def fix_k_count(p: Permutation, k: int) -> int:
    """Number of ordered k-tuples of distinct points fixed pointwise by p."""
    if not 1 <= k <= len(p):
        raise PermutationError(f"k={k} outside 1..{len(p)}")
    return math.perm(fix_count(p), k)


def same_cycle(p: Permutation, i: int, j: int) -> bool:
    n = len(p)
    _check_point(i, n)
    _check_point(j, n)
    a, b = i - 1, j - 1
    x = a
    while True:
        if x == b:
            return True
        x = p[x]
        if x == a:
            return False


# Ordered pairs (i, j), i != j, are numbered lexicographically: for n = 3 the
# order is (1,2), (1,3), (2,1), (2,3), (3,1), (3,2).

def ordered_pairs(n: int) -> list[tuple[int, int]]:
    """The 1-based ordered pairs in the order used by ``pair_lift``."""
    return [(i + 1, j + 1) for i, j in zero_based_pairs(n)]


def pair_index(i: int, j: int, n: int) -> int:
    """1-based index of the ordered pair (i, j)."""
    _check_point(i, n)
    _check_point(j, n)
    if i == j:
        raise PermutationError("pair points must differ")
    return (i - 1) * (n - 1) + (j - 1 if j < i else j - 2) + 1


@lru_cache(maxsize=64)
def zero_based_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(n) if i != j)


@lru_cache(maxsize=64)
def _pair_table(n: int) -> tuple[int, ...]:
    # flat n*n table: entry i*n+j holds the 0-based index of pair (i, j)
    table = [-1] * (n * n)
    for idx, (i, j) in enumerate(zero_based_pairs(n)):
        table[i * n + j] = idx
    return tuple(table)


def pair_lift(p: Permutation) -> Permutation:
    """The action of p on ordered pairs of distinct points."""
    n = len(p)
    if n < 2:
        raise PermutationError("pair action needs degree at least 2")
    table = _pair_table(n)
    return Permutation([table[p[i] * n + p[j]] for i, j in zero_based_pairs(n)], check=False)


def random_permutation(n: int, rng) -> Permutation:
    img = list(range(n))
    rng.shuffle(img)
    return Permutation(img, check=False)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int) -> Permutation:
    """Parse cycle notation ``(1,2)(3,4)`` or one-line notation ``[2,1,4,3]``.

    Whitespace is ignored. The empty string and ``()`` denote the identity.
    """
    s = "".join(text.split())
    if s.startswith("["):
        if not s.endswith("]"):
            raise PermutationError(f"unterminated image list: {text!r}")
        body = s[1:-1]
        try:
            imgs = [int(x) for x in body.split(",")] if body else []
        except ValueError:
            raise PermutationError(f"malformed image list: {text!r}") from None
        if len(imgs) != n:
            raise PermutationError(f"expected {n} images, got {len(imgs)}")
        try:
            return Permutation.from_images(imgs)
        except PermutationError:
            raise PermutationError(f"image list is not a permutation of 1..{n}: {text!r}") from None
    pos = 0
    cyc_list = []
    for m in _CYCLE_RE.finditer(s):
        if m.start() != pos:
            raise PermutationError(f"malformed cycle notation: {text!r}")
        pos = m.end()
        body = m.group(1)
        if not body:
            continue
        try:
            cyc_list.append([int(x) for x in body.split(",")])
        except ValueError:
            raise PermutationError(f"malformed cycle {m.group(0)!r}") from None
    if pos != len(s):
        raise PermutationError(f"malformed cycle notation: {text!r}")
    return Permutation.from_cycles(cyc_list, n)


def format_cycles(p: Permutation) -> str:
    cyc = cycles(p)
    if not cyc:
        return "()"
    return "".join("(" + ",".join(map(str, c)) + ")" for c in cyc)


def format_images(p: Permutation) -> str:
    return "[" + ",".join(str(x + 1) for x in p) + "]"
