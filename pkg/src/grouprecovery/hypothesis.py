"""Statistical tests for properties of the hidden group G behind a source.

Each test draws fresh samples, reduces each draw to a value in [0,1] and feeds
the values to the mean-threshold distinguisher with the two candidate means
the property predicts.  Sample sizes come from ``required_samples``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .group import (
    OrbitPartition,
    PermutationGroup,
    connected_components,
    alternating_subgroup,
    minimal_partitions,
    orbital_partitions,
    wreath_membership,
    young_membership,
)
from .perm import cycle_labels, fix_k_count, zero_based_pairs
from .sampling import ConstituentSource, FilteredSampler, PairSource, SampleSource
from .stats import DEFAULT_SAMPLE_CAP, BudgetExceeded, TestReport, distinguish, required_samples


class OrbitRecoveryError(RuntimeError):
    """Recovered orbits overlap: some statistical decision was wrong."""


class AdaptiveRoundsExhausted(RuntimeError):
    pass


# giant test constants

def ell(n: int) -> float:
    """Lower bound on Pr(two uniform elements of S_n generate a giant)."""
    return 1 - 1 / n - 8.8 / n ** 2


def upper_u(n: int) -> float:
    """Upper bound on the same probability."""
    return 1 - 1 / n - 0.93 / n ** 2


def b_n(n: int) -> float:
    """Largest p for which the giant test's two candidate means separate."""
    if n < 5:
        raise ValueError("the giant test needs degree at least 5")
    disc = n ** 4 + 2 * n ** 3 + 50.08 * n ** 2 - 13.88 * n - 199.584
    return (3 * n ** 2 - n - 8.8 - math.sqrt(disc)) / (4 * n ** 2 - 15.74)


@dataclass(frozen=True)
class GiantTestConstants:
    n: int
    p_tilde: float

    @property
    def ell(self) -> float:
        return ell(self.n)

    @property
    def u(self) -> float:
        return upper_u(self.n)

    @property
    def L(self) -> float:
        p = self.p_tilde
        return (1 - p + p * p) * self.ell

    @property
    def U(self) -> float:
        p = self.p_tilde
        return 2 * p * (1 - p) + p * p * self.u

    @property
    def b(self) -> float:
        return b_n(self.n)

    @property
    def threshold(self) -> float:
        return (self.L + self.U) / 2

    @property
    def margin(self) -> float:
        return (self.L - self.U) / 2

    def required_samples(self, alpha: float) -> int:
        return required_samples(alpha, self.margin)


def _check_cap(n: int, cap: int, what: str) -> None:
    if n > cap:
        raise BudgetExceeded(n, cap, what)


def _finish(report: TestReport, src: SampleSource, start: int, alpha, extra=None) -> TestReport:
    report.alpha = alpha
    report.raw_draws = src.draws - start
    report.caveats = list(src.caveats)
    if extra:
        report.extra.update(extra)
    return report


def giant_test(src: SampleSource, p_tilde: float, alpha: float, rng,
               cap: int = DEFAULT_SAMPLE_CAP) -> TestReport:
    """Is G the alternating or symmetric group?  outcome True means giant."""
    n = src.degree
    if n < 5:
        raise ValueError("the giant test needs degree at least 5")
    const = GiantTestConstants(n, p_tilde)
    if not 0 <= p_tilde < const.b:
        raise ValueError(f"p_tilde={p_tilde} must be below b_n={const.b:.5f}")
    N = const.required_samples(alpha)
    _check_cap(N, cap, "giant test")
    start = src.draws

    def trial():
        return 1.0 if PermutationGroup([src.next(rng), src.next(rng)], n).is_giant() else 0.0

    r = distinguish(trial, const.U, const.L, N, test="giant")
    return _finish(r, src, start, alpha, {"n": n, "p_tilde": p_tilde, "L": const.L, "U": const.U})


def subgroup_test(src: SampleSource, H, p_tilde: float, alpha: float, rng,
                  n_samples: int | None = None, test: str = "subgroup",
                  cap: int = DEFAULT_SAMPLE_CAP) -> TestReport:
    """Is G a subgroup of H?  ``H`` needs ``order()`` and ``contains()``.

    Under G <= H the membership rate is at least 1 - p(1 - |H|/n!); otherwise
    at most 1/2.  The margin is half the gap between those two means.
    """
    n = src.degree
    nf = math.factorial(n)
    order_h = H.order()
    if order_h >= nf:
        raise ValueError("H must be a proper subgroup of S_n")
    if not 0 <= p_tilde <= 0.5:
        raise ValueError(f"p_tilde={p_tilde} must lie in [0, 1/2]")
    h = order_h / nf
    b = 1 - p_tilde * (1 - h)
    a = 0.5
    N = n_samples if n_samples is not None else required_samples(alpha, (b - a) / 2)
    _check_cap(N, cap, "subgroup test")
    start = src.draws
    contains = H.contains
    r = distinguish(lambda: 1.0 if contains(src.next(rng)) else 0.0, a, b, N, test=test)
    r.payload = H
    return _finish(r, src, start, alpha, {"H_order": str(order_h), "H_density": h, "p_tilde": p_tilde})


def alternating_test(src: SampleSource, p_tilde: float, alpha: float, rng, **kw) -> TestReport:
    """Is G inside A_n?"""
    return subgroup_test(src, alternating_subgroup(src.degree), p_tilde, alpha, rng,
                         test="alternating", **kw)


def block_test(src: SampleSource, blocks, p_tilde: float, alpha: float, rng, **kw) -> TestReport:
    """Does G preserve the given equal-size block system?"""
    return subgroup_test(src, wreath_membership(blocks), p_tilde, alpha, rng, test="block", **kw)


def orbit_refining_test(src: SampleSource, part, p_tilde: float, alpha: float, rng, **kw) -> TestReport:
    """Is every part of ``part`` a union of orbits of G?"""
    return subgroup_test(src, young_membership(part), p_tilde, alpha, rng, test="orbit_refining", **kw)


def k_transitivity_test(src: SampleSource, k: int, p_tilde: float, alpha: float, rng,
                        cap: int = DEFAULT_SAMPLE_CAP) -> TestReport:
    """Is G k-transitive?  outcome True means k-transitive.

    The mean number of fixed k-tuples is 1 for a k-transitive group and at
    least 2 - p otherwise; values are divided by n(n-1)...(n-k+1).
    """
    n = src.degree
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    if not 0 <= p_tilde < 1:
        raise ValueError("p_tilde must lie in [0,1)")
    ff = math.perm(n, k)
    if ff < 2:
        raise ValueError("degree 1 is trivially transitive; nothing to test")
    if k > 2:
        warnings.warn(f"{k}-transitivity test needs very many samples", stacklevel=2)
    delta = (1 - p_tilde) / (2 * ff)
    N = required_samples(alpha, delta)
    _check_cap(N, cap, f"{k}-transitivity test")
    start = src.draws
    r = distinguish(lambda: fix_k_count(src.next(rng), k) / ff, 1 / ff, (2 - p_tilde) / ff, N,
                    test="transitivity")
    r.outcome = not r.decision
    return _finish(r, src, start, alpha, {
        "k": k, "p_tilde": p_tilde, "raw_mean": r.sample_mean * ff,
        "raw_threshold": (3 - p_tilde) / 2})


def orbit_agreement(src: SampleSource, i: int, j: int, p_tilde: float, alpha: float, rng,
                    cap: int = DEFAULT_SAMPLE_CAP) -> TestReport:
    """Do points i and j lie in the same orbit?  (1-based points)"""
    n = src.degree
    if i == j:
        raise ValueError("orbit agreement needs two different points")
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError("point out of range")
    N = required_samples(alpha, (1 - p_tilde) / (2 * n))
    _check_cap(N, cap, "orbit agreement")
    start = src.draws
    a, b = i - 1, j - 1
    r = distinguish(lambda: 1.0 if src.next(rng)[a] == b else 0.0, p_tilde / n, 1 / n, N,
                    test="orbit_agreement")
    return _finish(r, src, start, alpha, {"i": i, "j": j, "p_tilde": p_tilde})


@dataclass
class OrbitEvidence:
    """What an orbit or orbital recovery run saw."""
    method: str
    samples_used: int
    raw_draws: int
    alpha: float | None = None
    threshold: float | None = None
    matrix: Any = field(default=None, repr=False)
    declared_distinct: list = field(default_factory=list, repr=False)
    caveats: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    payload: Any = field(default=None, repr=False)

    @property
    def test(self) -> str:
        return self.method

    def to_dict(self) -> dict:
        d = {"test": self.method, "N": self.samples_used, "raw_draws": self.raw_draws,
             "alpha": self.alpha, "threshold": self.threshold, "caveats": list(self.caveats)}
        if self.extra:
            d["extra"] = self.extra
        return d


def _single_orbit(src, i, p_tilde, alpha, rng, cap):
    n = src.degree
    N = required_samples(alpha / n, (1 - p_tilde) / (2 * n))
    _check_cap(N, cap, "single orbit recovery")
    a = i - 1
    counts = [0] * n
    for _ in range(N):
        counts[src.next(rng)[a]] += 1
    c = (1 + p_tilde) / (2 * n)
    pts = {j + 1 for j, u in enumerate(counts) if u / N > c}
    pts.add(i)
    return tuple(sorted(pts)), N


def single_orbit_recovery(src: SampleSource, i: int, p_tilde: float, alpha: float, rng,
                          cap: int = DEFAULT_SAMPLE_CAP) -> tuple[int, ...]:
    """Estimate the orbit of point i (1-based)."""
    if not 1 <= i <= src.degree:
        raise ValueError("point out of range")
    return _single_orbit(src, i, p_tilde, alpha, rng, cap)[0]


def orbit_recovery(src: SampleSource, p_tilde: float, alpha: float, rng,
                   cap: int = DEFAULT_SAMPLE_CAP) -> OrbitPartition:
    """Recover the orbit partition, correct with probability >= 1 - alpha.

    The number of orbits is unknown in advance, so every single-orbit call
    gets the share 1 - (1-alpha)^(1/n) meant for the worst case of n orbits.
    """
    n = src.degree
    per_call = -math.expm1(math.log1p(-alpha) / n)
    start = src.draws
    labels = [-1] * n
    todo = list(range(1, n + 1))
    used = 0
    k = 0
    while len(todo) > 1:
        i = todo[0]
        orb, N = _single_orbit(src, i, p_tilde, per_call, rng, cap)
        used += N
        if any(labels[j - 1] >= 0 for j in orb):
            raise OrbitRecoveryError(f"orbit of {i} overlaps an earlier orbit: {orb}")
        for j in orb:
            labels[j - 1] = k
        k += 1
        todo = [x for x in todo if labels[x - 1] < 0]
    for x in todo:
        labels[x - 1] = k
    ev = OrbitEvidence("orbit_recovery", used, src.draws - start, alpha,
                       caveats=list(src.caveats), extra={"per_call_alpha": per_call})
    part = OrbitPartition.from_labels(labels, report=ev)
    ev.extra["orbits"] = part.to_json()
    ev.payload = part
    return part


def orbit_confirmation(src: SampleSource, candidate: Iterable[int], p_tilde: float, alpha: float,
                       rng, cap: int = DEFAULT_SAMPLE_CAP) -> TestReport:
    """Is ``candidate`` exactly one orbit of G?

    Phase one checks that the candidate is a union of orbits; phase two checks
    that G acts transitively on it.  Each phase runs at 1 - sqrt(1 - alpha).
    """
    n = src.degree
    cand = sorted(set(candidate))
    if not cand or cand[0] < 1 or cand[-1] > n:
        raise ValueError("candidate must be a nonempty set of points")
    a2 = -math.expm1(0.5 * math.log1p(-alpha))
    start = src.draws
    children = []
    failed = None
    if len(cand) < n:
        rest = [x for x in range(1, n + 1) if x not in set(cand)]
        part = OrbitPartition.from_blocks([cand, rest], n)
        r1 = orbit_refining_test(src, part, p_tilde, a2, rng, cap=cap)
        children.append(r1)
        if not r1.outcome:
            failed = "refinement"
    if failed is None and len(cand) > 1:
        cs = ConstituentSource(src, cand, p_tilde)
        r2 = k_transitivity_test(cs, 1, p_tilde, a2, rng, cap=cap)
        children.append(r2)
        if not r2.outcome:
            failed = "transitivity"
    if children:
        last = children[-1]
        r = TestReport("orbit_confirmation", last.decision, failed is None, last.sample_mean,
                       last.threshold, last.margin, last.samples_used)
    else:
        # a single point in degree 1: nothing to test
        r = TestReport("orbit_confirmation", True, True, 1.0, 0.5, 0.5, 1)
    r.children = children
    r = _finish(r, src, start, alpha, {"candidate": cand, "failed_phase": failed})
    return r


def same_cycle_counts(perms, n: int) -> np.ndarray:
    """T[i, j] = number of draws in which points i and j share a cycle."""
    T = np.zeros((n, n), dtype=np.int64)
    if not perms:
        return T
    L = np.array([cycle_labels(p) for p in perms], dtype=np.int32)
    for lab in L:
        T += lab[:, None] == lab[None, :]
    return T


def _declared_distinct(T: np.ndarray, t: float) -> list[tuple[int, int]]:
    n = T.shape[0]
    iu, ju = np.triu_indices(n, 1)
    sel = T[iu, ju] < t
    return list(zip(iu[sel].tolist(), ju[sel].tolist()))


def _distinct_cycles_predicate(pairs):
    if not pairs:
        return lambda p: True
    a = np.array([i for i, _ in pairs])
    b = np.array([j for _, j in pairs])

    def pred(p):
        lab = np.array(cycle_labels(p))
        return bool(np.all(lab[a] != lab[b]))

    return pred


def _components_above(T2: np.ndarray, cutoff: float) -> list[int]:
    n = T2.shape[0]
    iu, ju = np.triu_indices(n, 1)
    sel = T2[iu, ju] > cutoff
    return connected_components(n, zip(iu[sel].tolist(), ju[sel].tolist()))


def heuristic_orbits_from_sample(perms, p_tilde: float, t: float | None = None) -> OrbitPartition:
    """Same-cycle orbit heuristic on one fixed sample.

    The second pass keeps the members of the same sample that put every
    declared-distinct pair into different cycles.
    """
    perms = list(perms)
    n = len(perms[0])
    N = len(perms)
    T = same_cycle_counts(perms, n)
    t = N * p_tilde / 2 if t is None else t
    declared = _declared_distinct(T, t)
    pred = _distinct_cycles_predicate(declared)
    second = [p for p in perms if pred(p)]
    T2 = same_cycle_counts(second, n)
    lab = _components_above(T2, len(second) * p_tilde / 2)
    ev = OrbitEvidence("heuristic_orbits_fixed", N, N, threshold=t, matrix=T,
                       declared_distinct=declared, extra={"second_pass": len(second)})
    return OrbitPartition.from_labels(lab, report=ev)


def heuristic_orbit_recovery(src: SampleSource, N: int, t: float | None = None,
                             mode: str = "non-adaptive", p_tilde: float = 0.25, rng=None,
                             alpha: float = 0.05, max_rounds: int = 8) -> OrbitPartition:
    """Orbit partition from same-cycle frequencies, without a confidence bound.

    Pass one counts, for every pair of points, the draws in which both share a
    cycle; pairs seen together fewer than t times are declared distinct.  Pass
    two samples again, keeping only draws that separate every declared pair,
    and joins pairs seen together more than N*p_tilde/2 times.  The answer is
    the connected components.  In adaptive mode each component is checked with
    ``orbit_confirmation`` and t is halved (a component splits an orbit) or
    doubled (a component spans several orbits) before trying again.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if mode not in ("adaptive", "non-adaptive"):
        raise ValueError(f"unknown mode {mode!r}")
    n = src.degree
    start = src.draws
    T = same_cycle_counts(src.take(N, rng), n)
    t = N * p_tilde / 2 if t is None else t
    cutoff = N * p_tilde / 2
    confirmations = []
    for rnd in range(max_rounds if mode == "adaptive" else 1):
        declared = _declared_distinct(T, t)
        filt = FilteredSampler(src, _distinct_cycles_predicate(declared), p_tilde=p_tilde,
                               name="declared pairs in distinct cycles")
        T2 = same_cycle_counts(filt.take(N, rng), n)
        ev = OrbitEvidence("heuristic_orbit_recovery", 2 * N, 0, alpha, t, T, declared,
                           caveats=list(src.caveats) + ["heuristic: no confidence bound"],
                           extra={"mode": mode, "round": rnd + 1})
        part = OrbitPartition.from_labels(_components_above(T2, cutoff), report=ev)
        if mode == "non-adaptive":
            ev.raw_draws = src.draws - start
            return part
        per_block = -math.expm1(math.log1p(-alpha) / len(part))
        adjusted = False
        for block in part.blocks:
            rep = orbit_confirmation(src, block, p_tilde, per_block, rng)
            confirmations.append(rep)
            if not rep.outcome:
                t = t / 2 if rep.extra["failed_phase"] == "refinement" else t * 2
                adjusted = True
                break
        if not adjusted:
            ev.raw_draws = src.draws - start
            ev.extra["confirmations"] = len(confirmations)
            return part
    raise AdaptiveRoundsExhausted(f"no confirmed partition after {max_rounds} rounds")


def _blocks_from_orbitals(orbital_part: OrbitPartition, n: int) -> list[OrbitPartition]:
    pairs = zero_based_pairs(n)
    orbitals = [[pairs[idx - 1] for idx in block] for block in orbital_part.blocks]
    return minimal_partitions(orbital_partitions(orbitals, n))


def minimal_block_recovery(src: SampleSource, n_budget: int | None = None, p_tilde: float = 0.25,
                           alpha: float = 0.05, rng=None, mode: str = "rigorous",
                           cap: int = DEFAULT_SAMPLE_CAP) -> list[OrbitPartition]:
    """Minimal block systems of a (presumed transitive) G.

    Orbits of the action on ordered pairs are recovered from the lifted source,
    either with ``orbit_recovery`` (``mode="rigorous"``, ``n_budget`` is then a
    cap on any single sample size) or with ``heuristic_orbit_recovery``
    (``n_budget`` samples per pass).  Each orbital graph that falls apart into
    several components yields a block system.
    """
    n = src.degree
    ps = PairSource(src)
    start = src.draws
    if mode == "heuristic":
        orbitals = heuristic_orbit_recovery(ps, n_budget or 200, None, "non-adaptive", p_tilde, rng)
    elif mode == "rigorous":
        orbitals = orbit_recovery(ps, p_tilde, alpha, rng, cap=min(cap, n_budget or cap))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    systems = _blocks_from_orbitals(orbitals, n)
    ev = OrbitEvidence("block_recovery", orbitals.report.samples_used, src.draws - start, alpha,
                       caveats=list(ps.caveats), extra={
                           "mode": mode, "orbitals": len(orbitals),
                           "block_systems": [s.to_json() for s in systems]})
    out = [OrbitPartition(s.blocks, s.degree, ev) for s in systems]
    ev.payload = out
    return out


def primitivity_test(src: SampleSource, n_budget: int | None = None, p_tilde: float = 0.25,
                     alpha: float = 0.05, rng=None, mode: str = "rigorous",
                     cap: int = DEFAULT_SAMPLE_CAP) -> TestReport:
    """Is G primitive?  True iff no block system is found.

    The report's mean is the number of block systems found (threshold 1/2),
    and its confidence is the nominal 1 - alpha of the orbital recovery.
    """
    start = src.draws
    systems = minimal_block_recovery(src, n_budget, p_tilde, alpha, rng, mode, cap)
    found = float(len(systems))
    r = TestReport("primitivity", found >= 0.5, not systems, found, 0.5, 0.5, 0,
                   declared_confidence=1 - alpha)
    r.payload = systems
    r = _finish(r, src, start, alpha, {"block_systems": [s.to_json() for s in systems],
                                       "mode": mode})
    r.caveats = list(PairSource(src).caveats)
    if mode == "heuristic":
        r.caveats.append("heuristic: no confidence bound")
    r.samples_used = r.raw_draws
    return r
