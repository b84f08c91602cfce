"""Exact permutation-group computations.

The workhorse is a deterministic Schreier-Sims stabilizer chain.  Base points
are the smallest point moved by the element that forces a new level, so the
chain shape (and the stream of ``uniform_element`` under a fixed seed) only
depends on the generator list.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Iterable, Sequence

from .perm import (
    Permutation,
    PermutationError,
    compose,
    cycle_type,
    format_cycles,
    identity,
    inverse,
    is_even,
    parse_cycles,
)


class GroupError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    pass


def _compose3(uinv: Permutation, s: Permutation, u: Permutation) -> Permutation:
    # uinv * s * u, right factor first
    if len(u) > 1:
        return Permutation(itemgetter(*itemgetter(*u)(s))(uinv), check=False)
    return Permutation(uinv, check=False)


def _smallest_moved(p: Permutation) -> int:
    for i, x in enumerate(p):
        if i != x:
            return i
    return -1


class StabilizerChain:
    """Base, strong generators per level and explicit transversals."""

    def __init__(self, degree: int):
        self.degree = degree
        self.base: list[int] = []
        self.gens: list[list[Permutation]] = []
        self.orbits: list[list[int]] = []
        self.reps: list[dict[int, Permutation]] = []
        self._inv: list[dict[int, Permutation]] = []
        self._id = identity(degree)

    def _add_level(self, point: int) -> None:
        self.base.append(point)
        self.gens.append([])
        self.orbits.append([point])
        self.reps.append({point: self._id})
        self._inv.append({point: self._id})

    def _add_gen(self, level: int, g: Permutation) -> None:
        gens = self.gens[level]
        gens.append(g)
        orbit = self.orbits[level]
        reps = self.reps[level]
        old = len(orbit)
        for k in range(old):
            x = orbit[k]
            y = g[x]
            if y not in reps:
                reps[y] = compose(g, reps[x])
                orbit.append(y)
        k = old
        while k < len(orbit):
            x = orbit[k]
            ux = reps[x]
            for s in gens:
                y = s[x]
                if y not in reps:
                    reps[y] = compose(s, ux)
                    orbit.append(y)
            k += 1

    def inverse_rep(self, level: int, point: int) -> Permutation:
        inv = self._inv[level]
        u = inv.get(point)
        if u is None:
            u = inverse(self.reps[level][point])
            inv[point] = u
        return u

    def sift(self, g: Permutation, start: int = 0) -> tuple[Permutation, int]:
        """Strip g through the levels from ``start``.

        Returns the residue and the level where sifting stopped
        (``len(base)`` if it went all the way through).
        """
        for level in range(start, len(self.base)):
            y = g[self.base[level]]
            if y not in self.reps[level]:
                return g, level
            g = compose(self.inverse_rep(level, y), g)
        return g, len(self.base)

    def contains(self, g: Permutation) -> bool:
        h, level = self.sift(g)
        return level == len(self.base) and h == self._id

    def order(self) -> int:
        return math.prod(len(o) for o in self.orbits)

    def transversal_sizes(self) -> list[int]:
        return [len(o) for o in self.orbits]

    def strong_generators(self) -> list[Permutation]:
        out = []
        seen = set()
        for gens in self.gens:
            for g in gens:
                if g not in seen:
                    seen.add(g)
                    out.append(g)
        return out

    def random_element(self, rng) -> Permutation:
        g = self._id
        for level in range(len(self.base) - 1, -1, -1):
            orbit = self.orbits[level]
            u = self.reps[level][orbit[rng.randrange(len(orbit))]]
            g = compose(u, g)
        return g


def schreier_sims(gens: Sequence[Permutation], degree: int,
                  stop_at: int | None = None) -> tuple[StabilizerChain, bool]:
    """Build a stabilizer chain for <gens>.

    With ``stop_at`` the construction stops as soon as the partial order
    (a lower bound on |G|) reaches it; the flag returned is False in that case.
    """
    chain = StabilizerChain(degree)
    ident = chain._id
    nontrivial = [g for g in gens if g != ident]
    for g in nontrivial:
        if all(g[b] == b for b in chain.base):
            chain._add_level(_smallest_moved(g))
    for g in nontrivial:
        for level, b in enumerate(chain.base):
            chain._add_gen(level, g)
            if g[b] != b:
                break
    if stop_at is not None and chain.order() >= stop_at:
        return chain, False
    checked: list[dict[int, int]] = [dict() for _ in chain.base]
    i = len(chain.base) - 1
    while i >= 0:
        jumped = False
        orbit = chain.orbits[i]
        gens_i = chain.gens[i]
        reps = chain.reps[i]
        done_i = checked[i]
        for x in orbit:
            start = done_i.get(x, 0)
            if start >= len(gens_i):
                continue
            ux = reps[x]
            for s_idx in range(start, len(gens_i)):
                s = gens_i[s_idx]
                done_i[x] = s_idx + 1
                sch = _compose3(chain.inverse_rep(i, s[x]), s, ux)
                if sch == ident:
                    continue
                h, j = chain.sift(sch, i + 1)
                if h == ident:
                    continue
                if j == len(chain.base):
                    chain._add_level(_smallest_moved(h))
                    checked.append({})
                for level in range(i + 1, j + 1):
                    chain._add_gen(level, h)
                if stop_at is not None and chain.order() >= stop_at:
                    return chain, False
                i = j
                jumped = True
                break
            if jumped:
                break
        if not jumped:
            i -= 1
    return chain, True


@dataclass(frozen=True)
class OrbitPartition:
    """A partition of {1..n} into blocks, kept in canonical order.

    Blocks are sorted tuples of 1-based points, ordered by their minimum.
    Used both for orbit partitions and for block systems.
    """
    blocks: tuple[tuple[int, ...], ...]
    degree: int
    report: object = field(default=None, compare=False, repr=False)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], degree: int | None = None,
                    report=None) -> "OrbitPartition":
        bl = [tuple(sorted(set(b))) for b in blocks]
        bl = [b for b in bl if b]
        pts = [x for b in bl for x in b]
        n = len(pts) if degree is None else degree
        if len(pts) != len(set(pts)):
            raise GroupError("blocks are not disjoint")
        if sorted(pts) != list(range(1, n + 1)):
            raise GroupError(f"blocks do not cover 1..{n}")
        bl.sort(key=lambda b: b[0])
        return cls(tuple(bl), n, report)

    @classmethod
    def from_labels(cls, labels: Sequence[int], report=None) -> "OrbitPartition":
        """From 0-based point labels (equal label = same block)."""
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i + 1)
        return cls.from_blocks(groups.values(), len(labels), report)

    @property
    def sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]

    def __len__(self) -> int:
        return len(self.blocks)

    def labels(self) -> list[int]:
        """0-based point -> block index."""
        lab = [0] * self.degree
        for k, b in enumerate(self.blocks):
            for x in b:
                lab[x - 1] = k
        return lab

    def block_of(self, point: int) -> tuple[int, ...]:
        for b in self.blocks:
            if point in b:
                return b
        raise GroupError(f"point {point} not in partition")

    def is_trivial(self) -> bool:
        return len(self.blocks) in (1, self.degree)

    def refines(self, other: "OrbitPartition") -> bool:
        """True if every block of self lies inside a block of other."""
        lab = other.labels()
        return all(len({lab[x - 1] for x in b}) == 1 for b in self.blocks)

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def _as_partition(part, degree: int | None = None) -> OrbitPartition:
    if isinstance(part, OrbitPartition):
        return part
    return OrbitPartition.from_blocks(part, degree)


def in_young(p: Permutation, part) -> bool:
    """Does p map every part of the partition into itself?"""
    part = _as_partition(part, len(p))
    if part.degree != len(p):
        raise GroupError("partition degree does not match permutation")
    lab = part.labels()
    return all(lab[y] == lab[x] for x, y in enumerate(p))


def in_wreath(p: Permutation, blocks) -> bool:
    """Does p permute the (equal-size) blocks among themselves?"""
    blocks = _as_partition(blocks, len(p))
    if blocks.degree != len(p):
        raise GroupError("partition degree does not match permutation")
    if len(set(blocks.sizes)) != 1:
        raise GroupError("wreath blocks must have equal sizes")
    lab = blocks.labels()
    for b in blocks.blocks:
        target = lab[p[b[0] - 1]]
        if any(lab[p[x - 1]] != target for x in b):
            return False
    return True


def restrict_to_orbit(p: Permutation, orbit: Iterable[int]) -> Permutation:
    """Action of p on an invariant point set, re-indexed in sorted order."""
    pts = sorted(orbit)
    index = {x - 1: k for k, x in enumerate(pts)}
    try:
        return Permutation([index[p[x - 1]] for x in pts], check=False)
    except KeyError:
        raise GroupError("point set is not invariant under the permutation") from None


def _orbit_labels(gens: Sequence[Permutation], n: int) -> list[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x, y in enumerate(g):
            rx, ry = find(x), find(y)
            if rx != ry:
                if rx < ry:
                    parent[ry] = rx
                else:
                    parent[rx] = ry
    return [find(x) for x in range(n)]


def _primes_in(lo: int, hi: int) -> list[int]:
    return [q for q in range(max(lo, 2), hi + 1)
            if all(q % d for d in range(2, math.isqrt(q) + 1))]


class PermutationGroup:
    """A permutation group given by generators, with a lazily built chain."""

    JORDAN_TRIES = 64

    def __init__(self, generators: Iterable[Permutation], degree: int | None = None):
        gens = [g if isinstance(g, Permutation) else Permutation(g) for g in generators]
        if degree is None:
            if not gens:
                raise GroupError("degree required for an empty generator list")
            degree = len(gens[0])
        for g in gens:
            if len(g) != degree:
                raise GroupError(f"degree mismatch: generator of degree {len(g)} in degree {degree}")
        self.degree = degree
        self.generators: list[Permutation] = gens
        self._chain: StabilizerChain | None = None
        self._order: int | None = None
        self._giant: str | None | bool = None  # "A", "S", False, or None=unknown
        self._labels: list[int] | None = None

    def __repr__(self) -> str:
        gens = ", ".join(format_cycles(g) for g in self.generators)
        return f"PermutationGroup([{gens}], degree={self.degree})"

    # chain, order, membership

    @property
    def chain(self) -> StabilizerChain:
        if self._chain is None:
            chain, _ = schreier_sims(self.generators, self.degree)
            self._chain = chain
            self._order = chain.order()
        return self._chain

    def order(self) -> int:
        if self._order is None:
            if self._giant is None and self.degree >= 8:
                self.is_giant()
            if self._order is None:
                self._order = self.chain.order()
        return self._order

    def order_at_most(self, bound: int) -> int:
        """Exact order, assuming the caller knows |G| <= bound.

        The chain construction stops once its lower bound reaches ``bound``.
        """
        if self._order is not None:
            return self._order
        chain, complete = schreier_sims(self.generators, self.degree, stop_at=bound)
        if complete or chain.order() == bound:
            self._chain = chain
            self._order = chain.order()
            return self._order
        raise GroupError("order bound violated")

    def contains(self, p: Permutation) -> bool:
        if len(p) != self.degree:
            raise GroupError("degree mismatch")
        if self._giant:
            return self._giant == "S" or is_even(p)
        return self.chain.contains(p)

    __contains__ = contains

    def uniform_element(self, rng) -> Permutation:
        if self._giant:
            img = list(range(self.degree))
            rng.shuffle(img)
            p = Permutation(img, check=False)
            if self._giant == "A" and not is_even(p):
                img[0], img[1] = img[1], img[0]
                p = Permutation(img, check=False)
            return p
        return self.chain.random_element(rng)

    def is_subgroup_of(self, other) -> bool:
        return all(other.contains(g) for g in self.generators)

    def equals(self, other: "PermutationGroup") -> bool:
        if self.degree != other.degree or not self.is_subgroup_of(other):
            return False
        return self.order_at_most(other.order()) == other.order()

    # orbits and transitivity

    def orbit_labels(self) -> list[int]:
        if self._labels is None:
            self._labels = _orbit_labels(self.generators, self.degree)
        return self._labels

    def orbits(self) -> OrbitPartition:
        return OrbitPartition.from_labels(self.orbit_labels())

    def orbit_of(self, point: int) -> tuple[int, ...]:
        lab = self.orbit_labels()
        r = lab[point - 1]
        return tuple(i + 1 for i, x in enumerate(lab) if x == r)

    def is_transitive(self) -> bool:
        return len(set(self.orbit_labels())) == 1

    def is_k_transitive(self, k: int, limit: int = 2_000_000) -> bool:
        n = self.degree
        if not 1 <= k <= n:
            raise GroupError(f"k={k} outside 1..{n}")
        target = math.perm(n, k)
        if target > limit:
            raise ResourceLimitError(f"action on {target} tuples exceeds limit {limit}")
        start = tuple(range(k))
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for t in frontier:
                for g in self.generators:
                    u = tuple(g[x] for x in t)
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        return len(seen) == target

    # blocks and primitivity

    def minimal_block_systems(self) -> list[OrbitPartition]:
        if not self.is_transitive():
            raise GroupError("block systems need a transitive group")
        return minimal_partitions(_orbital_block_systems(self.generators, self.degree))

    def is_primitive(self) -> bool:
        if not self.is_transitive():
            return False
        if self.degree <= 3:
            return True
        return not _orbital_block_systems(self.generators, self.degree, first_only=True)

    # giants

    def is_giant(self) -> bool:
        return bool(self.giant_kind() != "neither")

    def giant_kind(self) -> str:
        """"A_n", "S_n" or "neither"."""
        if self._giant is None:
            self._giant = self._decide_giant()
            if self._giant:
                f = math.factorial(self.degree)
                self._order = f if self._giant == "S" else max(1, f // 2)
        if not self._giant:
            return "neither"
        return "S_n" if self._giant == "S" else "A_n"

    def _decide_giant(self):
        n = self.degree
        all_even = all(is_even(g) for g in self.generators)
        kind = "A" if all_even else "S"
        if n <= 2:
            # every subgroup of S_1, S_2 is A_n or S_n
            return kind
        if not self.is_transitive():
            return False
        if self._chain is None and self._jordan_certificate():
            return kind
        if self._chain is not None:
            order = self._order
        else:
            half = math.factorial(n) // 2
            chain, complete = schreier_sims(self.generators, n, stop_at=half)
            if not complete:
                return kind
            self._chain = chain
            self._order = order = chain.order()
        f = math.factorial(n)
        if order == f or order == f // 2:
            return kind
        return False

    def _jordan_certificate(self) -> bool:
        # A transitive group holding an element with a cycle of prime length
        # q, n/2 < q <= n-3, is primitive and then contains A_n (Jordan).
        n = self.degree
        primes = set(_primes_in(n // 2 + 1, n - 3))
        if not primes:
            return False
        for g in self.generators:
            if primes.intersection(cycle_type(g)):
                return True
        rng = random.Random(n)
        state = list(self.generators)
        while len(state) < 8:
            state += self.generators
        acc = identity(n)
        for _ in range(self.JORDAN_TRIES):
            a, b = rng.sample(range(len(state)), 2)
            state[a] = compose(state[a], state[b]) if rng.random() < 0.5 else compose(state[b], state[a])
            acc = compose(acc, state[a])
            if primes.intersection(cycle_type(acc)):
                return True
        return False

    # export

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "generators": [[x + 1 for x in g] for g in self.generators],
            "order": str(self.order()),
            "orbits": self.orbits().to_json(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def from_generators(gens: Sequence[Permutation], degree: int | None = None) -> PermutationGroup:
    return PermutationGroup(gens, degree)


def orbits(G: PermutationGroup) -> OrbitPartition:
    return G.orbits()


def orbit_of(G: PermutationGroup, point: int) -> tuple[int, ...]:
    return G.orbit_of(point)


def order(G: PermutationGroup) -> int:
    return G.order()


def contains(G: PermutationGroup, p: Permutation) -> bool:
    return G.contains(p)


def uniform_element(G: PermutationGroup, rng) -> Permutation:
    return G.uniform_element(rng)


def is_k_transitive(G: PermutationGroup, k: int) -> bool:
    return G.is_k_transitive(k)


def minimal_block_systems(G: PermutationGroup) -> list[OrbitPartition]:
    return G.minimal_block_systems()


def is_primitive(G: PermutationGroup) -> bool:
    return G.is_primitive()


def is_giant(G: PermutationGroup) -> bool:
    return G.is_giant()


def giant_kind(G: PermutationGroup) -> str:
    return G.giant_kind()


def connected_components(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return [find(x) for x in range(n)]


def _orbit_of_pair(gens, pair):
    seen = {pair}
    frontier = [pair]
    while frontier:
        nxt = []
        for a, b in frontier:
            for g in gens:
                q = (g[a], g[b])
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def orbital_partitions(orbitals: Iterable[Iterable[tuple[int, int]]], n: int) -> list[OrbitPartition]:
    """Component partitions of disconnected orbital graphs (0-based pairs)."""
    found = {}
    for orb in orbitals:
        lab = connected_components(n, orb)
        if len(set(lab)) > 1:
            part = OrbitPartition.from_labels(lab)
            found.setdefault(part.blocks, part)
    return list(found.values())


def _orbital_block_systems(gens, n, first_only=False) -> list[OrbitPartition]:
    # every orbital contains a pair (0, j); the component of 0 in its graph is
    # the smallest block holding 0 and j
    done = set()
    orbitals = []
    for j in range(1, n):
        if (0, j) in done:
            continue
        orb = _orbit_of_pair(gens, (0, j))
        done.update(orb)
        if first_only:
            if len(set(connected_components(n, orb))) > 1:
                return [None]
            continue
        orbitals.append(orb)
    if first_only:
        return []
    return orbital_partitions(orbitals, n)


def minimal_partitions(parts: Sequence[OrbitPartition]) -> list[OrbitPartition]:
    """Keep the refinement-minimal partitions of the list."""
    keep = []
    for p in parts:
        if not any(q.blocks != p.blocks and q.refines(p) for q in parts):
            keep.append(p)
    keep.sort(key=lambda p: p.blocks)
    return keep


# standard constructions

def symmetric_group(n: int) -> PermutationGroup:
    if n == 1:
        return PermutationGroup([], 1)
    gens = [Permutation.from_cycles([(1, 2)], n)]
    if n > 2:
        gens.append(Permutation.from_cycles([tuple(range(1, n + 1))], n))
    return PermutationGroup(gens, n)


def alternating_group(n: int) -> PermutationGroup:
    if n < 3:
        return PermutationGroup([], n)
    gens = [Permutation.from_cycles([(i, i + 1, i + 2)], n) for i in range(1, n - 1)]
    return PermutationGroup(gens, n)


def cyclic_group(n: int) -> PermutationGroup:
    if n == 1:
        return PermutationGroup([], 1)
    return PermutationGroup([Permutation.from_cycles([tuple(range(1, n + 1))], n)], n)


def dihedral_group(n: int) -> PermutationGroup:
    """Symmetries of the n-gon with vertices 1..n (order 2n)."""
    if n < 3:
        return symmetric_group(n)
    rot = Permutation.from_cycles([tuple(range(1, n + 1))], n)
    refl = Permutation.from_cycles([(i, n + 2 - i) for i in range(2, n + 1) if i < n + 2 - i], n)
    return PermutationGroup([rot, refl], n)


def young_subgroup(part) -> PermutationGroup:
    part = _as_partition(part)
    n = part.degree
    gens = []
    for b in part.blocks:
        if len(b) > 1:
            gens.append(Permutation.from_cycles([b[:2]], n))
        if len(b) > 2:
            gens.append(Permutation.from_cycles([b], n))
    return PermutationGroup(gens, n)


def wreath_subgroup(blocks) -> PermutationGroup:
    """All permutations preserving an equal-size block system."""
    blocks = _as_partition(blocks)
    n = blocks.degree
    if len(set(blocks.sizes)) != 1:
        raise GroupError("wreath blocks must have equal sizes")
    gens = young_subgroup(blocks).generators
    bl = blocks.blocks
    if len(bl) > 1:
        swap = [tuple(pair) for pair in zip(bl[0], bl[1])]
        gens.append(Permutation.from_cycles(swap, n))
    if len(bl) > 2:
        img = list(range(n))
        for k, b in enumerate(bl):
            nb = bl[(k + 1) % len(bl)]
            for x, y in zip(b, nb):
                img[x - 1] = y - 1
        gens.append(Permutation(img))
    return PermutationGroup(gens, n)


def young_order(part) -> int:
    part = _as_partition(part)
    return math.prod(math.factorial(s) for s in part.sizes)


def wreath_order(blocks) -> int:
    blocks = _as_partition(blocks)
    k = len(blocks)
    m = blocks.degree // k
    return math.factorial(m) ** k * math.factorial(k)


class MembershipSubgroup:
    """A subgroup of S_n known by a fast membership predicate and its order."""

    def __init__(self, name: str, degree: int, order: int, predicate, builder=None):
        self.name = name
        self.degree = degree
        self._order = order
        self._predicate = predicate
        self._builder = builder

    def order(self) -> int:
        return self._order

    def contains(self, p: Permutation) -> bool:
        return self._predicate(p)

    __contains__ = contains

    def as_group(self) -> PermutationGroup:
        return self._builder()

    def __repr__(self) -> str:
        return f"<{self.name} of degree {self.degree}, order {self._order}>"


def alternating_subgroup(n: int) -> MembershipSubgroup:
    return MembershipSubgroup(f"A_{n}", n, max(1, math.factorial(n) // 2), is_even,
                              lambda: alternating_group(n))


def young_membership(part) -> MembershipSubgroup:
    part = _as_partition(part)
    lab = part.labels()

    def pred(p):
        return all(lab[y] == lab[x] for x, y in enumerate(p))

    return MembershipSubgroup(f"S_{part}", part.degree, young_order(part), pred,
                              lambda: young_subgroup(part))


def wreath_membership(blocks) -> MembershipSubgroup:
    blocks = _as_partition(blocks)
    if len(set(blocks.sizes)) != 1:
        raise GroupError("wreath blocks must have equal sizes")
    return MembershipSubgroup(f"Wr{blocks}", blocks.degree, wreath_order(blocks),
                              lambda p: in_wreath(p, blocks), lambda: wreath_subgroup(blocks))


# group files

def parse_group_text(text: str) -> PermutationGroup:
    """Parse ``degree n`` followed by one generator per line.  ``#`` starts a comment."""
    degree = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if degree is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "degree":
                raise GroupError(f"line {lineno}: expected 'degree n'")
            try:
                degree = int(parts[1])
            except ValueError:
                raise GroupError(f"line {lineno}: bad degree {parts[1]!r}") from None
            if degree < 1:
                raise GroupError(f"line {lineno}: degree must be positive")
            continue
        try:
            gens.append(parse_cycles(line, degree))
        except PermutationError as e:
            raise GroupError(f"line {lineno}: {e}") from None
    if degree is None:
        raise GroupError("missing 'degree n' header")
    return PermutationGroup(gens, degree)


def format_group_text(G: PermutationGroup) -> str:
    lines = [f"degree {G.degree}"]
    lines += [format_cycles(g) for g in G.generators]
    return "\n".join(lines) + "\n"


def load_group(path) -> PermutationGroup:
    with open(path) as fh:
        return parse_group_text(fh.read())


def save_group(G: PermutationGroup, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_group_text(G))


def brute_force_elements(G: PermutationGroup, limit: int = 100_000) -> set[Permutation]:
    """All elements by closure under the generators (small groups only)."""
    e = identity(G.degree)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in G.generators:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > limit:
                        raise ResourceLimitError("group too large for enumeration")
        frontier = nxt
    return seen

