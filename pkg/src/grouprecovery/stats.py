"""Hoeffding sample sizes and the mean-threshold distinguisher."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import islice
from typing import Any, Callable, Iterable

DEFAULT_SAMPLE_CAP = 10_000_000


class SourceExhausted(RuntimeError):
    pass


class BudgetExceeded(RuntimeError):
    """A test would need more samples than the configured cap."""

    def __init__(self, required: int, cap: int, what: str = "test"):
        super().__init__(f"{what} needs {required} samples, cap is {cap}")
        self.required = required
        self.cap = cap


def required_samples(alpha: float, delta: float) -> int:
    """Smallest N with exp(-2 delta^2 N) <= alpha."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return max(1, math.ceil(-math.log(alpha) / (2 * delta * delta)))


def hoeffding_epsilon(alpha: float, n: int) -> float:
    """Two-sided half-width: |mean - mu| < eps with probability >= 1 - alpha."""
    return math.sqrt(math.log(2 / alpha) / (2 * n))


@dataclass
class Distinguisher:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if not 0 <= self.a < self.b <= 1:
            raise ValueError(f"need 0 <= a < b <= 1, got a={self.a}, b={self.b}")
        if self.n < 1:
            raise ValueError("N must be at least 1")

    @property
    def threshold(self) -> float:
        return (self.a + self.b) / 2

    @property
    def margin(self) -> float:
        return (self.b - self.a) / 2

    @classmethod
    def for_alpha(cls, a: float, b: float, alpha: float) -> "Distinguisher":
        return cls(a, b, required_samples(alpha, (b - a) / 2))


@dataclass
class TestReport:
    """Outcome of one hypothesis test.

    ``decision`` is the raw distinguisher answer (mean >= threshold); ``outcome``
    is the answer to the question the test asks (e.g. "is G transitive?"),
    which for some tests is the negation of ``decision``.
    """
    test: str
    decision: bool
    outcome: bool
    sample_mean: float
    threshold: float
    margin: float
    samples_used: int
    alpha: float | None = None
    raw_draws: int = 0
    caveats: list[str] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)
    children: list["TestReport"] = field(default_factory=list)
    declared_confidence: float | None = None
    payload: Any = field(default=None, repr=False, compare=False)

    __test__ = False  # keep pytest from collecting this class

    @property
    def confidence(self) -> float:
        if self.declared_confidence is not None:
            return self.declared_confidence
        return 1 - math.exp(-2 * self.margin ** 2 * self.samples_used)

    def to_dict(self) -> dict:
        d = {
            "test": self.test,
            "decision": self.decision,
            "outcome": self.outcome,
            "mean": self.sample_mean,
            "threshold": self.threshold,
            "margin": self.margin,
            "N": self.samples_used,
            "alpha": self.alpha,
            "confidence": self.confidence,
            "raw_draws": self.raw_draws,
            "caveats": list(self.caveats),
        }
        if self.extra:
            d["extra"] = self.extra
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _take(values, n: int) -> list[float]:
    if callable(values):
        out = [values() for _ in range(n)]
    else:
        out = list(islice(iter(values), n))
    if len(out) < n:
        raise SourceExhausted(f"needed {n} values, source gave {len(out)}")
    return out


def distinguish(values: Iterable[float] | Callable[[], float], a: float, b: float,
                n: int, test: str = "distinguish") -> TestReport:
    """Decide between "mean <= a" and "mean >= b" from n values in [0,1].

    ``values`` is an iterable or a zero-argument callable.  Exactly n values are
    consumed.  A sum landing exactly on the threshold counts as "mean >= b".
    """
    d = Distinguisher(a, b, n)
    xs = _take(values, n)
    lo, hi = min(xs), max(xs)
    if lo < 0 or hi > 1:
        raise ValueError(f"value outside [0,1]: {lo if lo < 0 else hi}")
    mean = math.fsum(xs) / n
    decision = mean >= d.threshold
    return TestReport(test, decision, decision, mean, d.threshold, d.margin, n)
