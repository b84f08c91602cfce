"""Recovering G itself from an error-prone source.

``naive_recover`` returns the group generated by k draws.  Group detectors Q
reject outputs known to be wrong, permutation detectors P filter draws, and
``niagra`` takes the most frequent group over N detected runs.  ``main_recover``
alternates between checking whether the current bounds already guarantee that
the mode is G and running another property test to tighten those bounds.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .group import (
    OrbitPartition,
    PermutationGroup,
    alternating_group,
    restrict_to_orbit,
    symmetric_group,
    wreath_order,
    young_order,
)
from .hypothesis import (
    OrbitRecoveryError,
    alternating_test,
    b_n,
    ell,
    giant_test,
    k_transitivity_test,
    orbit_recovery,
    primitivity_test,
    subgroup_test,
)
from .perm import Permutation, cycle_type, format_cycles
from .sampling import ConstituentSource, FilteredSampler, RetryCapExceeded, SampleSource
from .stats import BudgetExceeded, SourceExhausted, hoeffding_epsilon, required_samples

log = logging.getLogger(__name__)


class TriesExhausted(RuntimeError):
    pass


class DrawBudgetExhausted(RuntimeError):
    pass


def ceil_log2(x: int) -> int:
    """Smallest M with 2^M >= x, for a positive integer x."""
    if x < 1:
        raise ValueError("need a positive integer")
    return (int(x) - 1).bit_length()


# basic recovery

def naive_recover(src: SampleSource, k: int, rng) -> PermutationGroup:
    if k < 1:
        raise ValueError("k must be at least 1")
    return PermutationGroup(src.take(k, rng), src.degree)


def _q_detected(src, k, Q, max_tries, rng):
    for tries in range(1, max_tries + 1):
        G = naive_recover(src, k, rng)
        if Q is None or Q(G):
            return G, tries
    raise TriesExhausted(f"no output passed the group detector in {max_tries} tries")


def q_detected_recover(src: SampleSource, k: int, Q: Callable[[PermutationGroup], bool] | None,
                       max_tries: int, rng) -> PermutationGroup:
    """Repeat ``naive_recover`` until the output satisfies Q."""
    return _q_detected(src, k, Q, max_tries, rng)[0]


def success_rate_check(p_tilde: float, M: float, B: float, k: int) -> float:
    """Lower bound on the probability that one detected run returns G.

    Valid when p <= p_tilde, |G| <= 2^M and the permutation detector has
    density at most B.  The second factor is vacuous (clamped to 0) for
    k <= M + 3.
    """
    if not 0 <= p_tilde <= 1:
        raise ValueError("p_tilde must lie in [0,1]")
    if not 0 < B <= 1:
        raise ValueError("B must lie in (0,1]")
    if M < 0 or k < 1:
        raise ValueError("need M >= 0 and k >= 1")
    first = (1 - 2 * p_tilde / (B + 1 / B)) ** k
    second = max(0.0, 1 - 8 / 2 ** (k - M))
    return first * second


def pak_lower_bound(M: int, k: int) -> float:
    """phi_k of the elementary abelian group of order 2^M, a floor for any |G| <= 2^M."""
    if k < M:
        return 0.0
    return math.prod(1 - 2.0 ** -i for i in range(k - M + 1, k + 1))


def omega(delta: float, phi_k: float, k: int) -> float:
    """Largest error rate at which k-generator recovery still succeeds w.p. 1/2 + delta."""
    return 1 - ((0.5 + delta) / phi_k) ** (1 / k)


def majority_failure_probability(gamma: float, N: int) -> float:
    """Pr(at most half of N independent runs succeed), success rate gamma each."""
    return sum(math.comb(N, i) * gamma ** i * (1 - gamma) ** (N - i) for i in range(N // 2 + 1))


@dataclass
class RecoveryOutcome:
    group: PermutationGroup | None
    mode_count: int
    runs: int
    histogram: list[dict]
    raw_draws: int
    k: int | None = None
    confidence: float | None = None
    verified: bool = False
    flags: list[str] = field(default_factory=list)
    ledger: dict | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "group": None if self.group is None else {
                "degree": self.group.degree,
                "generators": [[x + 1 for x in g] for g in self.group.generators],
                "generators_cycles": [format_cycles(g) for g in self.group.generators],
                "order": str(self.group.order()),
            },
            "mode_count": self.mode_count,
            "runs": self.runs,
            "histogram": self.histogram,
            "raw_draws": self.raw_draws,
            "k": self.k,
            "confidence": self.confidence,
            "verified": self.verified,
            "flags": list(self.flags),
        }
        if self.ledger is not None:
            d["ledger"] = self.ledger
        if self.extra:
            d["extra"] = self.extra
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def mode_of(groups: Sequence[PermutationGroup]) -> tuple[int | None, list[dict], list[list[int]]]:
    """Bucket equal groups; returns (index of the mode bucket, histogram, members).

    Groups are equal when they have the same order and one contains the
    other's generators.  Ties go to the smaller order, then to the bucket
    seen first.
    """
    reps: list[PermutationGroup] = []
    orders: list[int] = []
    members: list[list[int]] = []
    for idx, G in enumerate(groups):
        o = G.order()
        for b, (R, ro) in enumerate(zip(reps, orders)):
            if ro == o and G.is_subgroup_of(R):
                members[b].append(idx)
                break
        else:
            reps.append(G)
            orders.append(o)
            members.append([idx])
    if not reps:
        return None, [], []
    best = min(range(len(reps)), key=lambda b: (-len(members[b]), orders[b], members[b][0]))
    hist = [{"order": str(orders[b]), "count": len(members[b]),
             "generators": [format_cycles(g) for g in reps[b].generators]} for b in range(len(reps))]
    return best, hist, members


def niagra(src: SampleSource, k: int, N: int, P: Callable[[Permutation], bool] | None = None,
           Q: Callable[[PermutationGroup], bool] | None = None, rng=None,
           max_tries: int = 1000, p_tilde: float = 0.5) -> RecoveryOutcome:
    """Mode of N detected recovery runs on the P-filtered source."""
    if N < 1:
        raise ValueError("N must be at least 1")
    start = src.draws
    s = src if P is None else FilteredSampler(src, P, p_tilde=p_tilde, name="permutation detector")
    groups = []
    tries = 0
    for _ in range(N):
        G, t = _q_detected(s, k, Q, max_tries, rng)
        groups.append(G)
        tries += t
    best, hist, members = mode_of(groups)
    count = len(members[best])
    runner_up = max((len(m) for b, m in enumerate(members) if b != best), default=0)
    return RecoveryOutcome(groups[members[best][0]], count, N, hist, src.draws - start, k,
                           extra={"mode_margin": (count - runner_up) / N, "tries": tries})


def amplify(run_once: Callable[[], Any], N: int, same: Callable[[Any, Any], bool] = lambda a, b: a == b):
    """Mode of N calls of run_once under an equality test; returns (value, count)."""
    buckets: list[list] = []
    for _ in range(N):
        x = run_once()
        for bk in buckets:
            if same(bk[0], x):
                bk[1] += 1
                break
        else:
            buckets.append([x, 1])
    best = max(buckets, key=lambda bk: bk[1])
    return best[0], best[1]


# find supergroup and constituents

def _find_supergroup(src, Qbar, p_tilde, alpha, rng, max_draws):
    n = src.degree
    nf = math.factorial(n)
    start = src.draws
    gens: list[Permutation] = []
    reports = []
    while True:
        if src.draws - start >= max_draws:
            raise DrawBudgetExhausted(f"find_supergroup used {src.draws - start} draws")
        gens.append(src.next(rng))
        H = PermutationGroup(list(gens), n)
        if Qbar is not None and not Qbar(H):
            continue
        if H.order() == nf:
            return H, None, reports
        rep = subgroup_test(src, H, p_tilde, alpha, rng, test="supergroup")
        reports.append(rep)
        if rep.outcome:
            return H, rep, reports


def find_supergroup(src: SampleSource, Qbar: Callable[[PermutationGroup], bool] | None,
                    p_tilde: float, alpha: float, rng, max_draws: int = 1_000_000) -> PermutationGroup:
    """Grow <draws> until a candidate passes the subgroup test (or is S_n).

    ``Qbar`` must be inherited by supergroups (transitivity, primitivity);
    candidates failing it are skipped without spending samples on a test.
    """
    return _find_supergroup(src, Qbar, p_tilde, alpha, rng, max_draws)[0]


def transitive_constituent_recovery(src: SampleSource, orbits: OrbitPartition,
                                    inner: Callable[[SampleSource, Any], PermutationGroup],
                                    rng, p_tilde: float = 0.5) -> list[PermutationGroup]:
    """Recover the action of G on each orbit.

    These constituents do not determine G in general; the result is partial
    information (G lies inside their direct product).
    """
    out = []
    for block in orbits.blocks:
        if len(block) == 1:
            out.append(PermutationGroup([], 1))
            continue
        out.append(inner(ConstituentSource(src, block, p_tilde), rng))
    return out


# the ledger

@dataclass
class Detector:
    name: str
    predicate: Callable
    density: float | None
    source: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "density": self.density, "source": self.source.get("test")}


@dataclass
class KnowledgeLedger:
    degree: int
    p_upper: float
    M: int
    B: float = 1.0
    p_lower: float = 0.0
    perm_detectors: list[Detector] = field(default_factory=list)
    group_detectors: list[Detector] = field(default_factory=list)
    facts: dict = field(default_factory=dict)
    audit: list[dict] = field(default_factory=list)
    inconsistent: bool = False

    @classmethod
    def initial(cls, n: int, p_tilde: float, M: int | None = None, B: float = 1.0) -> "KnowledgeLedger":
        M0 = ceil_log2(math.factorial(n))
        return cls(n, p_tilde, M0 if M is None else min(M, M0), B)

    def _log(self, what: str, source: dict, **info) -> None:
        self.audit.append({"update": what, "source": source, **info})

    def tighten_p(self, lo: float, hi: float, source: dict) -> None:
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        new_lo, new_hi = max(self.p_lower, lo), min(self.p_upper, hi)
        if new_lo > new_hi:
            self.inconsistent = True
            log.warning("p-interval (%g, %g) misses current (%g, %g); keeping current",
                        lo, hi, self.p_lower, self.p_upper)
            self._log("p-interval conflict", source, interval=[lo, hi])
            return
        if (new_lo, new_hi) != (self.p_lower, self.p_upper):
            self.p_lower, self.p_upper = new_lo, new_hi
            self._log("p", source, interval=[new_lo, new_hi])

    def bound_order(self, bound: int, source: dict) -> None:
        M = ceil_log2(bound)
        if M < self.M:
            self.M = M
            self._log("M", source, M=M)

    def add_perm_detector(self, name: str, predicate, density: float, source: dict) -> None:
        self.perm_detectors.append(Detector(name, predicate, density, source))
        if density < self.B:
            self.B = density
        self._log("P", source, name=name, density=density)

    def add_group_detector(self, name: str, predicate, source: dict) -> None:
        self.group_detectors.append(Detector(name, predicate, None, source))
        self._log("Q", source, name=name)

    def permutation_predicate(self):
        preds = [d.predicate for d in self.perm_detectors]
        if not preds:
            return None
        return lambda p: all(f(p) for f in preds)

    def group_predicate(self):
        preds = [d.predicate for d in self.group_detectors]
        if not preds:
            return None
        return lambda G: all(f(G) for f in preds)

    def supergroup_predicate(self):
        """Conjunction of the known facts that every supergroup of G inherits."""
        checks = []
        if self.facts.get("transitive"):
            checks.append(PermutationGroup.is_transitive)
        if self.facts.get("primitive"):
            checks.append(PermutationGroup.is_primitive)
        if not checks:
            return None
        return lambda H: all(c(H) for c in checks)

    def snapshot(self) -> dict:
        facts = {}
        for k, v in self.facts.items():
            if isinstance(v, OrbitPartition):
                facts[k] = v.to_json()
            elif isinstance(v, list) and v and isinstance(v[0], OrbitPartition):
                facts[k] = [x.to_json() for x in v]
            elif isinstance(v, (bool, int, float, str)) or v is None:
                facts[k] = v
        return {
            "p_interval": [self.p_lower, self.p_upper],
            "M": self.M,
            "B": self.B,
            "perm_detectors": [d.to_dict() for d in self.perm_detectors],
            "group_detectors": [d.to_dict() for d in self.group_detectors],
            "facts": facts,
            "audit": self.audit,
            "inconsistent": self.inconsistent,
        }


def _not_n_cycle(n):
    return lambda p: len(cycle_type(p)) != 1 if n > 1 else True


def _young_predicate(part: OrbitPartition):
    lab = part.labels()
    return lambda p: all(lab[y] == lab[x] for x, y in enumerate(p))


def _wreath_predicate(systems: list[OrbitPartition]):
    labs = [(s.labels(), s.blocks) for s in systems]

    def pred(p):
        for lab, blocks in labs:
            for b in blocks:
                t = lab[p[b[0] - 1]]
                if any(lab[p[x - 1]] != t for x in b):
                    return False
        return True

    return pred


def _largest_wreath_order(n: int) -> int:
    best = 1
    for d in range(2, n):
        if n % d == 0:
            best = max(best, math.factorial(d) ** (n // d) * math.factorial(n // d))
    return best


def _apply_transitivity_interval(ledger: KnowledgeLedger, source: dict) -> None:
    rep = ledger.facts.get("_transitivity_report")
    orbits = ledger.facts.get("orbits")
    if rep is None or orbits is None or len(orbits) < 2 or rep.extra.get("k") != 1:
        return
    m = len(orbits)
    n = ledger.degree
    eps = n * hoeffding_epsilon(rep.alpha, rep.samples_used)
    mu = rep.extra["raw_mean"]
    # raw mean = (1-p) m + p, so p = (m - mean) / (m - 1)
    ledger.tighten_p((m - mu - eps) / (m - 1), (m - mu + eps) / (m - 1), source)


def update_ledger(ledger: KnowledgeLedger, report) -> KnowledgeLedger:
    """Fold one test report (or recovery evidence) into the ledger."""
    n = ledger.degree
    nf = math.factorial(n)
    test = report.test
    src = report.to_dict()
    alpha = report.alpha if report.alpha is not None else 0.05
    if test == "giant":
        ledger.facts["giant"] = report.outcome
        if report.outcome:
            ledger.add_group_detector("giant", PermutationGroup.is_giant, src)
        else:
            ledger.add_group_detector("non-giant", lambda G: not G.is_giant(), src)
            ledger.bound_order(math.factorial(n - 1), src)
            eps = hoeffding_epsilon(alpha, report.samples_used)
            ledger.tighten_p(0.0, math.sqrt(max(0.0, report.sample_mean + eps) / ell(n)), src)
    elif test in ("subgroup", "alternating", "block", "orbit_refining", "supergroup"):
        H = report.payload
        h = H.order() / nf
        eps = hoeffding_epsilon(alpha, report.samples_used)
        mu = report.sample_mean
        if report.outcome:
            ledger.add_group_detector(f"<= {test} H", lambda G, H=H: G.is_subgroup_of(H), src)
            ledger.add_perm_detector(f"in {test} H", H.contains, h, src)
            ledger.bound_order(H.order(), src)
            ledger.tighten_p((1 - (mu + eps)) / (1 - h), (1 - (mu - eps)) / (1 - h), src)
            ledger.facts.setdefault("supergroups", 0)
            ledger.facts["supergroups"] += 1
            if test == "alternating":
                ledger.facts["even"] = True
        else:
            ledger.add_group_detector(f"not <= {test} H", lambda G, H=H: not G.is_subgroup_of(H), src)
            if h < 0.5:
                ledger.tighten_p(0.0, (0.5 - (mu - eps)) / (0.5 - h), src)
    elif test == "transitivity":
        k = report.extra.get("k", 1)
        if k == 1:
            ledger.facts["transitive"] = report.outcome
            if report.outcome:
                ledger.add_group_detector("transitive", PermutationGroup.is_transitive, src)
            else:
                ledger.add_group_detector("intransitive", lambda G: not G.is_transitive(), src)
                ledger.add_perm_detector("not an n-cycle", _not_n_cycle(n), 1 - 1 / n, src)
                ledger.bound_order(math.factorial(n - 1), src)
                ledger.facts["_transitivity_report"] = report
                _apply_transitivity_interval(ledger, src)
        else:
            ledger.facts[f"{k}-transitive"] = report.outcome
            if report.outcome:
                ledger.add_group_detector(f"{k}-transitive",
                                          lambda G, k=k: G.is_k_transitive(k), src)
                ledger.facts["transitive"] = True
                _learn_primitive(ledger, src)
            else:
                ledger.add_group_detector(f"not {k}-transitive",
                                          lambda G, k=k: not G.is_k_transitive(k), src)
    elif test == "orbit_agreement":
        i, j = report.extra["i"], report.extra["j"]
        if report.outcome:
            ledger.add_group_detector(f"{i}~{j}", lambda G, i=i, j=j: j in G.orbit_of(i), src)
        else:
            ledger.add_group_detector(f"{i}!~{j}", lambda G, i=i, j=j: j not in G.orbit_of(i), src)
            a, b = i - 1, j - 1
            from .perm import cycle_labels
            ledger.add_perm_detector(f"{i},{j} in distinct cycles",
                                     lambda p, a=a, b=b: (lambda L: L[a] != L[b])(cycle_labels(p)), 0.5, src)
            ledger.bound_order(math.factorial(n - 1), src)
    elif test == "orbit_recovery":
        part: OrbitPartition = report.payload
        ledger.facts["orbits"] = part
        ledger.facts["transitive"] = len(part) == 1
        if len(part) > 1:
            target = part.blocks
            ledger.add_group_detector("orbits equal the recovered partition",
                                      lambda G, t=target: G.orbits().blocks == t, src)
            ledger.add_perm_detector("cycles refine the orbits", _young_predicate(part),
                                     young_order(part) / nf, src)
            ledger.bound_order(young_order(part), src)
            _apply_transitivity_interval(ledger, src)
    elif test in ("primitivity", "block_recovery"):
        systems = report.payload or []
        ledger.facts["block_systems"] = list(systems)
        if systems:
            ledger.facts["primitive"] = False
            ledger.add_group_detector("imprimitive", lambda G: not G.is_primitive(), src)
            bound = min(wreath_order(s) for s in systems)
            ledger.add_perm_detector("respects the block systems", _wreath_predicate(systems),
                                     bound / nf, src)
            ledger.bound_order(bound, src)
        else:
            _learn_primitive(ledger, src)
    elif test == "constituents":
        part, groups = report.payload
        ledger.facts["constituent_orders"] = [str(G.order()) for G in groups]
        pred = _constituent_predicate(part, groups)
        bound = math.prod(G.order() for G in groups)
        ledger.add_perm_detector("restrictions lie in the constituents", pred, bound / nf, src)
        ledger.bound_order(bound, src)
    else:
        raise ValueError(f"no ledger rule for test {test!r}")
    return ledger


def _learn_primitive(ledger: KnowledgeLedger, src: dict) -> None:
    n = ledger.degree
    if ledger.facts.get("primitive"):
        return
    ledger.facts["primitive"] = True
    ledger.facts["transitive"] = True
    ledger.add_group_detector("primitive", PermutationGroup.is_primitive, src)
    if ledger.facts.get("giant") is False:
        # primitive groups other than A_n, S_n have order at most 4^n
        ledger.bound_order(4 ** n, src)


def _constituent_predicate(part: OrbitPartition, groups: list[PermutationGroup]):
    pieces = [(b, G) for b, G in zip(part.blocks, groups) if len(b) > 1]

    def pred(p):
        for b, G in pieces:
            try:
                r = restrict_to_orbit(p, b)
            except ValueError:
                return False
            if not G.contains(r):
                return False
        return True

    return pred


# the main pipeline

DEFAULT_PRIORITY = ("transitivity", "orbits", "constituents", "blocks", "primitivity", "supergroup")


@dataclass
class RecoveryConfig:
    p_tilde: float = 0.25
    alpha: float = 0.05
    M: int | None = None
    B: float = 1.0
    P: Callable | None = None
    P_density: float | None = None
    Q: Callable | None = None
    max_draws: int = 10_000_000
    test_cap: int = 10_000_000
    k_window: tuple[int, int] = (4, 16)
    priority: tuple[str, ...] = DEFAULT_PRIORITY
    supergroup_rounds: int = 3
    block_mode: str = "rigorous"
    block_samples: int = 300
    max_tries: int = 1000
    fallback_runs: int = 25
    constituent_depth: int = 1
    # while steps remain, a bound needing more amplification runs than this earns another property first
    max_runs: int | None = 2000


@dataclass
class _Evidence:
    """Minimal report shape for ledger updates that are not TestReports."""
    test: str
    payload: Any
    alpha: float | None = None
    samples_used: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"test": self.test, "alpha": self.alpha, "N": self.samples_used, "extra": self.extra}


def best_k(ledger: KnowledgeLedger, window=(4, 16)) -> tuple[int, float]:
    lo, hi = window
    ks = range(ledger.M + lo, ledger.M + hi + 1)
    vals = [(success_rate_check(ledger.p_upper, ledger.M, ledger.B, k), k) for k in ks]
    bound, k = max(vals, key=lambda v: (v[0], -v[1]))
    return k, bound


def main_recover(src: SampleSource, config: RecoveryConfig | None = None, rng=None) -> RecoveryOutcome:
    """Recover G, earning properties until the success bound clears 1/2."""
    cfg = config or RecoveryConfig()
    n = src.degree
    start = src.draws
    ledger = KnowledgeLedger.initial(n, cfg.p_tilde, cfg.M, cfg.B)
    user = {"test": "configuration"}
    if cfg.P is not None:
        ledger.add_perm_detector("user P", cfg.P, cfg.P_density if cfg.P_density is not None else cfg.B, user)
    if cfg.Q is not None:
        ledger.add_group_detector("user Q", cfg.Q, user)
    planned = 2 + len(cfg.priority) + 1
    a_phase = cfg.alpha / planned
    alphas_spent = 0.0
    flags: list[str] = []
    log.info("alpha split: %d phases at %g each", planned, a_phase)

    def finish(out: RecoveryOutcome) -> RecoveryOutcome:
        out.raw_draws = src.draws - start
        out.flags = flags + out.flags
        out.ledger = ledger.snapshot()
        out.extra["alpha_per_phase"] = a_phase
        if ledger.inconsistent and "inconsistent" not in out.flags:
            out.flags.append("inconsistent")
        return out

    if n == 1:
        return finish(RecoveryOutcome(PermutationGroup([], 1), 0, 0, [], 0, confidence=1.0, verified=True))

    # giant phase
    if n >= 5 and cfg.p_tilde < b_n(n):
        try:
            rep = giant_test(src, cfg.p_tilde, a_phase, rng, cap=cfg.test_cap)
        except BudgetExceeded as e:
            flags.append(f"giant test skipped: {e}")
            rep = None
        if rep is not None:
            alphas_spent += a_phase
            update_ledger(ledger, rep)
            if rep.outcome:
                alt = alternating_test(src, cfg.p_tilde, a_phase, rng, cap=cfg.test_cap)
                alphas_spent += a_phase
                update_ledger(ledger, alt)
                G = alternating_group(n) if alt.outcome else symmetric_group(n)
                return finish(RecoveryOutcome(G, 0, 0, [], 0, confidence=1 - alphas_spent, verified=True))
    elif n >= 5:
        log.warning("p_tilde=%g is not below b_n=%g; giant phase skipped", cfg.p_tilde, b_n(n))
        flags.append("giant phase skipped")

    queue = list(cfg.priority)
    supergroup_left = cfg.supergroup_rounds
    budget_hit = False
    while True:
        if src.draws - start >= cfg.max_draws:
            budget_hit = True
            break
        k, bound = best_k(ledger, cfg.k_window)
        N = required_samples(a_phase, bound - 0.5) if bound > 0.5 else None
        if N is not None and queue and cfg.max_runs is not None and N > cfg.max_runs:
            log.info("bound %.4f needs %d runs; earning another property first", bound, N)
            N = None
        if N is not None:
            try:
                out = niagra(src, k, N, ledger.permutation_predicate(), ledger.group_predicate(), rng,
                             cfg.max_tries, ledger.p_upper)
            except (TriesExhausted, RetryCapExceeded) as e:
                flags.append(f"amplification failed: {e}")
                ledger.inconsistent = True
                return finish(RecoveryOutcome(None, 0, 0, [], 0, k, flags=["unverified"]))
            alphas_spent += a_phase
            out.confidence = max(0.0, 1 - alphas_spent)
            out.verified = True
            out.extra["success_bound"] = bound
            return finish(out)
        if not queue:
            break
        step = queue.pop(0)
        if step == "supergroup":
            supergroup_left -= 1
            if supergroup_left > 0:
                queue.append("supergroup")
        try:
            spent = _run_step(step, src, ledger, cfg, a_phase, rng, start)
            alphas_spent += spent
        except (BudgetExceeded, RetryCapExceeded, DrawBudgetExhausted, SourceExhausted) as e:
            flags.append(f"{step}: {e}")
            if isinstance(e, (DrawBudgetExhausted, SourceExhausted)):
                budget_hit = True
                break
        except OrbitRecoveryError as e:
            flags.append(f"{step}: {e}")
            ledger.inconsistent = True

    # best effort: no guarantee
    k, bound = best_k(ledger, cfg.k_window)
    if budget_hit:
        flags.append("budget exhausted")
        return finish(RecoveryOutcome(None, 0, 0, [], 0, k, flags=["unverified"],
                                      extra={"success_bound": bound}))
    out = niagra(src, k, cfg.fallback_runs, ledger.permutation_predicate(), ledger.group_predicate(),
                 rng, cfg.max_tries, ledger.p_upper)
    out.flags.append("unverified")
    out.extra["success_bound"] = bound
    return finish(out)


def _run_step(step, src, ledger, cfg, a_phase, rng, start) -> float:
    """Run one property-earning step; returns the alpha it spent (0 if skipped)."""
    facts = ledger.facts
    n = src.degree
    remaining = cfg.max_draws - (src.draws - start)
    if step == "transitivity":
        if "transitive" in facts:
            return 0.0
        update_ledger(ledger, k_transitivity_test(src, 1, cfg.p_tilde, a_phase, rng, cap=cfg.test_cap))
        return a_phase
    if step == "orbits":
        if facts.get("transitive") or "orbits" in facts:
            return 0.0
        part = orbit_recovery(src, cfg.p_tilde, a_phase, rng, cap=cfg.test_cap)
        update_ledger(ledger, part.report)
        return a_phase
    if step == "constituents":
        part = facts.get("orbits")
        if part is None or len(part) < 2 or cfg.constituent_depth < 1 or "constituent_orders" in facts:
            return 0.0
        blocks = [b for b in part.blocks if len(b) > 1]
        a_each = a_phase / max(1, len(blocks))
        inner_cfg = RecoveryConfig(p_tilde=cfg.p_tilde, alpha=a_each, max_draws=remaining,
                                   test_cap=cfg.test_cap, block_mode=cfg.block_mode,
                                   block_samples=cfg.block_samples, max_tries=cfg.max_tries,
                                   fallback_runs=cfg.fallback_runs,
                                   constituent_depth=cfg.constituent_depth - 1,
                                   priority=tuple(s for s in cfg.priority if s != "constituents"))
        outcomes = []

        def inner(s, r):
            o = main_recover(s, inner_cfg, r)
            outcomes.append(o)
            if o.group is None:
                raise DrawBudgetExhausted("constituent recovery gave no group")
            return o.group

        groups = transitive_constituent_recovery(src, part, inner, rng, cfg.p_tilde)
        if any(not o.verified for o in outcomes):
            # an unverified constituent could be too small and would reject good draws
            ledger._log("constituents unverified; not used", {"test": "constituents"})
            facts["constituent_orders"] = None
            return a_phase
        update_ledger(ledger, _Evidence("constituents", (part, groups), a_phase,
                                        sum(o.raw_draws for o in outcomes)))
        return a_phase
    if step in ("blocks", "primitivity"):
        if not facts.get("transitive") or "block_systems" in facts or n < 4:
            return 0.0
        rep = primitivity_test(src, cfg.block_samples if cfg.block_mode == "heuristic" else None,
                               cfg.p_tilde, a_phase, rng, mode=cfg.block_mode, cap=cfg.test_cap)
        update_ledger(ledger, rep)
        return a_phase
    if step == "supergroup":
        if cfg.p_tilde > 0.5:
            return 0.0
        H, rep, reports = _find_supergroup(src, ledger.supergroup_predicate(), cfg.p_tilde,
                                           a_phase, rng, remaining)
        if rep is not None:
            update_ledger(ledger, rep)
        return a_phase
    raise ValueError(f"unknown pipeline step {step!r}")
