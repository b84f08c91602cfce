"""Error-prone sample sources.

Every hypothesis test only ever sees a ``SampleSource``: something with a
``degree``, a ``next(rng)`` method and a ``draws`` counter of raw draws
consumed from the underlying stream.  ``MixtureSampler`` is the model source
(uniform on G with probability 1-p, uniform on S_n otherwise); the other
classes wrap a source or replay a fixed list.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

from .group import OrbitPartition, PermutationGroup, restrict_to_orbit
from .perm import Permutation, PermutationError, format_cycles, parse_cycles, pair_lift, random_permutation
from .stats import SourceExhausted

PAIR_ACTION_CAVEAT = "pair-action source is not a uniform mixture; confidence bounds may not apply"


class RetryCapExceeded(RuntimeError):
    pass


class SampleSource:
    degree: int
    caveats: tuple[str, ...] = ()

    def next(self, rng) -> Permutation:
        raise NotImplementedError

    @property
    def draws(self) -> int:
        raise NotImplementedError

    def take(self, k: int, rng) -> list[Permutation]:
        return [self.next(rng) for _ in range(k)]


class MixtureSampler(SampleSource):
    """Uniform on G with probability 1-p, uniform on S_n with probability p."""

    def __init__(self, group: PermutationGroup, p: float):
        if not 0 <= p <= 1:
            raise ValueError(f"p must lie in [0,1], got {p}")
        self.group = group
        self.p = p
        self.degree = group.degree
        self._draws = 0

    @property
    def draws(self) -> int:
        return self._draws

    def next(self, rng) -> Permutation:
        self._draws += 1
        if self.p and rng.random() < self.p:
            return random_permutation(self.degree, rng)
        return self.group.uniform_element(rng)


def mixture_sample(s: MixtureSampler, rng) -> Permutation:
    return s.next(rng)


def default_retry_cap(p_tilde: float) -> int:
    return 64 * math.ceil(1 / (1 - p_tilde)) if p_tilde < 1 else 64 * 1024


class FilteredSampler(SampleSource):
    """Redraw from ``inner`` until ``predicate`` holds."""

    def __init__(self, inner: SampleSource, predicate: Callable[[Permutation], bool],
                 retry_cap: int | None = None, p_tilde: float = 0.5, name: str = "filter"):
        self.inner = inner
        self.predicate = predicate
        self.retry_cap = retry_cap if retry_cap is not None else default_retry_cap(p_tilde)
        self.degree = inner.degree
        self.caveats = inner.caveats
        self.name = name
        self.emitted = 0

    @property
    def draws(self) -> int:
        return self.inner.draws

    def next(self, rng) -> Permutation:
        for _ in range(self.retry_cap):
            x = self.inner.next(rng)
            if self.predicate(x):
                self.emitted += 1
                return x
        raise RetryCapExceeded(f"{self.name}: no accepted draw in {self.retry_cap} tries")


def filtered_sample(f: FilteredSampler, rng) -> Permutation:
    return f.next(rng)


class ConstituentSource(SampleSource):
    """Action on an orbit of draws that preserve the orbit."""

    def __init__(self, inner: SampleSource, orbit: Iterable[int], p_tilde: float = 0.5,
                 retry_cap: int | None = None):
        pts = sorted(set(orbit))
        if not pts:
            raise ValueError("orbit must be nonempty")
        n = inner.degree
        if pts[0] < 1 or pts[-1] > n:
            raise ValueError("orbit points out of range")
        self.orbit = tuple(pts)
        self.degree = len(pts)
        self.caveats = inner.caveats
        if len(pts) == n:
            self._src = inner
        else:
            rest = [x for x in range(1, n + 1) if x not in set(pts)]
            part = OrbitPartition.from_blocks([pts, rest], n)
            lab = part.labels()
            self._src = FilteredSampler(
                inner, lambda p: all(lab[y] == lab[x] for x, y in enumerate(p)),
                retry_cap, p_tilde, name=f"constituent {pts}")
        self._full = len(pts) == n

    @property
    def draws(self) -> int:
        return self._src.draws

    def next(self, rng) -> Permutation:
        x = self._src.next(rng)
        return x if self._full else restrict_to_orbit(x, self.orbit)


def constituent_source(s: SampleSource, orbit: Iterable[int], p_tilde: float = 0.5) -> ConstituentSource:
    return ConstituentSource(s, orbit, p_tilde)


class PairSource(SampleSource):
    """Draws lifted to the action on ordered pairs of distinct points."""

    def __init__(self, inner: SampleSource):
        if inner.degree < 2:
            raise ValueError("pair action needs degree at least 2")
        self.inner = inner
        self.base_degree = inner.degree
        self.degree = inner.degree * (inner.degree - 1)
        self.caveats = tuple(inner.caveats) + (PAIR_ACTION_CAVEAT,)

    @property
    def draws(self) -> int:
        return self.inner.draws

    def next(self, rng) -> Permutation:
        return pair_lift(self.inner.next(rng))


def pair_source(s: SampleSource) -> PairSource:
    return PairSource(s)


class FixedSampleSource(SampleSource):
    """Replays a fixed list of permutations; ``rng`` is ignored."""

    def __init__(self, perms: Sequence[Permutation], degree: int | None = None):
        perms = list(perms)
        if degree is None:
            if not perms:
                raise ValueError("degree required for an empty sample")
            degree = len(perms[0])
        for p in perms:
            if len(p) != degree:
                raise ValueError("sample degree mismatch")
        self.perms = perms
        self.degree = degree
        self._pos = 0

    @property
    def draws(self) -> int:
        return self._pos

    def remaining(self) -> int:
        return len(self.perms) - self._pos

    def next(self, rng=None) -> Permutation:
        if self._pos >= len(self.perms):
            raise SourceExhausted(f"fixed sample of size {len(self.perms)} exhausted")
        p = self.perms[self._pos]
        self._pos += 1
        return p


class CallableSource(SampleSource):
    """Adapter for an external sampler ``fn(rng) -> Permutation``."""

    def __init__(self, fn: Callable, degree: int):
        self.fn = fn
        self.degree = degree
        self._draws = 0

    @property
    def draws(self) -> int:
        return self._draws

    def next(self, rng) -> Permutation:
        self._draws += 1
        p = self.fn(rng)
        if len(p) != self.degree:
            raise ValueError("external sampler returned wrong degree")
        return p


# closed forms

def _check_prob(name: str, x: float) -> None:
    if not 0 <= x <= 1:
        raise ValueError(f"{name} must lie in [0,1], got {x}")


def q_of(p: float, order_G: int, n: int) -> float:
    """Probability that a mixture draw falls outside G."""
    _check_prob("p", p)
    return p * (1 - order_G / math.factorial(n))


def q_filtered(p: float, A: float, B: float) -> float:
    """Error probability after filtering by a detector of density B (A = |G|/n!)."""
    _check_prob("p", p)
    _check_prob("A", A)
    _check_prob("B", B)
    if A > B:
        raise ValueError("need A <= B")
    denom = 1 - p * (1 - B)
    if denom == 0:
        # p = 1 and B = 0: nothing ever passes; only possible when A = 0 too
        return 0.0
    return (B - A) * p / denom


def reduction_factor(p: float, A: float, B: float) -> float:
    """q / q_P; infinite when the filter removes every error."""
    qp = q_filtered(p, A, B)
    q = p * (1 - A)
    if qp == 0:
        return math.inf if q > 0 else 1.0
    return q / qp


def expected_tries(p: float, B: float) -> float:
    _check_prob("p", p)
    _check_prob("B", B)
    return 1 / (1 - p * (1 - B))


# sample files

def parse_samples(text: str) -> FixedSampleSource:
    degree = None
    perms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if degree is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "degree":
                raise ValueError(f"line {lineno}: expected 'degree n'")
            degree = int(parts[1])
            continue
        try:
            perms.append(parse_cycles(line, degree))
        except PermutationError as e:
            raise ValueError(f"line {lineno}: {e}") from None
    if degree is None:
        raise ValueError("missing 'degree n' header")
    return FixedSampleSource(perms, degree)


def format_samples(perms: Sequence[Permutation], degree: int) -> str:
    return "".join([f"degree {degree}\n"] + [format_cycles(p) + "\n" for p in perms])


def load_samples(path) -> FixedSampleSource:
    with open(path) as fh:
        return parse_samples(fh.read())


def save_samples(perms: Sequence[Permutation], degree: int, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_samples(perms, degree))
