"""Slow, independent reference computations used to check the library.

Nothing here calls the group module's chain, orbit or block code; elements are
found by plain breadth-first closure on image tuples.
"""
from __future__ import annotations

import math
from itertools import permutations


def mul(a, b):
    """a after b, on 0-based image tuples."""
    return tuple(a[x] for x in b)


def closure(gens, n):
    e = tuple(range(n))
    seen = {e}
    todo = [e]
    gens = [tuple(g) for g in gens]
    while todo:
        x = todo.pop()
        for g in gens:
            y = mul(g, x)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def orbit_blocks(elements, n):
    """Orbits as sorted 1-based tuples, ordered by minimum."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in elements:
        for i in range(n):
            a, b = find(i), find(g[i])
            if a != b:
                parent[a] = b
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i + 1)
    return tuple(sorted((tuple(v) for v in groups.values()), key=lambda b: b[0]))


def burnside_orbit_count(elements, k):
    """Number of orbits on ordered k-tuples of distinct points: mean of Fix_k."""
    total = 0
    for g in elements:
        f = sum(1 for i, x in enumerate(g) if i == x)
        total += math.perm(f, k) if f >= k else 0
    return total // len(elements)


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def invariant_partitions(gens, n):
    """All nontrivial partitions of {0..n-1} preserved by every generator."""
    out = []
    for part in set_partitions(range(n)):
        if len(part) in (1, n):
            continue
        lab = [0] * n
        for k, b in enumerate(part):
            for x in b:
                lab[x] = k
        ok = True
        for g in gens:
            for b in part:
                t = lab[g[b[0]]]
                if any(lab[g[x]] != t for x in b):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(frozenset(frozenset(b) for b in part))
    return out


def minimal_block_systems(gens, n):
    """Minimal nontrivial invariant partitions, as sets of 1-based blocks."""
    parts = invariant_partitions(gens, n)

    def finer(a, b):
        return a != b and all(any(x <= y for y in b) for x in a)

    mins = [p for p in parts if not any(finer(q, p) for q in parts)]
    return {frozenset(frozenset(x + 1 for x in b) for b in p) for p in mins}


def symmetric_elements(n):
    return list(permutations(range(n)))
