"""Batch experiments over small group corpora.

An experiment is described by a JSON document (see ``ExperimentSpec``).  The
work is split into cells, one per (group, grid point); every cell draws from
its own ``random.Random`` seeded by the master seed and the cell index, so the
output does not depend on the number of workers.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .corpus import builtin_group, class_label, subgroup_classes
from .group import PermutationGroup, load_group
from .hypothesis import GiantTestConstants, heuristic_orbits_from_sample
from .perm import Permutation, fix_count, random_permutation
from .recovery import DrawBudgetExhausted, _find_supergroup
from .sampling import MixtureSampler

FIXED_SAMPLE_TESTS = ("giant", "transitivity", "heuristic_orbits")
FIXED_SAMPLE_FIELDS = ("group_id", "order", "class_label", "q", "N", "test", "successes", "trials", "seed")
SUPERGROUP_FIELDS = ("group_id", "order", "class_label", "p", "trials", "giant", "exact", "between",
                     "other", "mean_draws", "seed")


@dataclass
class ExperimentSpec:
    experiment: str = "fixed_sample"
    groups: object = "S6-classes"
    q_grid: list = field(default_factory=lambda: [0.01, 0.25])
    q_exact: bool = True
    p_grid: list = field(default_factory=lambda: [0.2])
    N_grid: list = field(default_factory=lambda: [50, 100])
    trials: int = 50
    tests: list = field(default_factory=lambda: list(FIXED_SAMPLE_TESTS))
    p_tilde: float = 0.25
    alpha: float = 0.2
    supergroup_filter: str = "none"
    max_draws: int = 100_000
    seed: int = 0
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        if self.experiment not in ("fixed_sample", "supergroup"):
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        grids = [self.N_grid, self.q_grid if self.q_exact else self.p_grid] \
            if self.experiment == "fixed_sample" else [self.p_grid]
        if any(not g for g in grids):
            raise ValueError("experiment grids must be nonempty")
        bad = set(self.tests) - set(FIXED_SAMPLE_TESTS)
        if bad:
            raise ValueError(f"unknown tests {sorted(bad)}")
        if self.supergroup_filter not in ("none", "transitive", "primitive"):
            raise ValueError(f"unknown supergroup filter {self.supergroup_filter!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown spec fields {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)


def resolve_groups(groups, base_dir=None) -> list[tuple[str, PermutationGroup]]:
    """``"S<n>-classes"`` or a list of builtin names / group files."""
    if isinstance(groups, str):
        if groups.lower().endswith("-classes") and groups[:1].upper() == "S":
            n = int(groups[1:groups.index("-")])
            return [(c.label, c.representative) for c in subgroup_classes(n)]
        groups = [groups]
    out = []
    for g in groups:
        path = Path(base_dir or ".") / g
        if path.suffix and path.exists():
            out.append((path.stem, load_group(path)))
        else:
            out.append((g, builtin_group(g)))
    return out


# fixed samples

def error_count(q: float, N: int) -> int:
    return math.ceil(round(q * N, 9))


def fixed_sample(G: PermutationGroup, q: float, N: int, rng) -> list[Permutation]:
    """N draws: exactly ceil(qN) uniform from S_n - G, the rest uniform from G.

    For G = S_n there is nothing outside G; those draws come from S_n.
    """
    n = G.degree
    m = error_count(q, N)
    full = G.order() == math.factorial(n)
    out = []
    for _ in range(m):
        x = random_permutation(n, rng)
        while not full and G.contains(x):
            x = random_permutation(n, rng)
        out.append(x)
    out.extend(G.uniform_element(rng) for _ in range(N - m))
    rng.shuffle(out)
    return out


@lru_cache(maxsize=4)
def _rank_table(n: int) -> dict:
    return {Permutation(p, check=False): i for i, p in enumerate(itertools.permutations(range(n)))}


class PairGiantCache:
    """Memo of is_giant(<a, b>); a dense table when n! is small."""

    def __init__(self, n: int):
        self.n = n
        self.dense = math.factorial(n) <= 5040
        if self.dense:
            self.rank = _rank_table(n)
            size = len(self.rank)
            self.table = np.full((size, size), -1, dtype=np.int8)
        else:
            self.memo = {}

    def _compute(self, a, b) -> int:
        return int(PermutationGroup([a, b], self.n).is_giant())

    def pair_mean(self, perms) -> float:
        N = len(perms)
        if N < 2:
            raise ValueError("need at least two draws")
        if not self.dense:
            total = 0
            for i, j in itertools.combinations(range(N), 2):
                key = (perms[i], perms[j])
                if key not in self.memo:
                    self.memo[key] = self.memo[key[::-1]] = self._compute(*key)
                total += self.memo[key]
            return total / (N * (N - 1) // 2)
        r = np.array([self.rank[p] for p in perms])
        iu, ju = np.triu_indices(N, 1)
        ri, rj = r[iu], r[ju]
        vals = self.table[ri, rj]
        for k in np.flatnonzero(vals < 0):
            a, b = ri[k], rj[k]
            if self.table[a, b] < 0:
                v = self._compute(perms[iu[k]], perms[ju[k]])
                self.table[a, b] = self.table[b, a] = v
            vals[k] = self.table[a, b]
        return float(vals.mean())


def _fixed_sample_cell(args):
    spec, gid, G, q, N, seed = args
    rng = random.Random(seed)
    n = G.degree
    giant, transitive, orbits = G.is_giant(), G.is_transitive(), G.orbits()
    const = GiantTestConstants(n, spec["p_tilde"]) if n >= 5 else None
    raw_threshold = (3 - spec["p_tilde"]) / 2
    cache = PairGiantCache(n) if "giant" in spec["tests"] and const is not None else None
    wins = dict.fromkeys(spec["tests"], 0)
    for _ in range(spec["trials"]):
        if spec["q_exact"]:
            sample = fixed_sample(G, q, N, rng)
        else:
            src = MixtureSampler(G, q)
            sample = src.take(N, rng)
        for test in spec["tests"]:
            if test == "giant":
                if cache is None:
                    continue
                said = cache.pair_mean(sample) >= const.threshold
                wins[test] += said == giant
            elif test == "transitivity":
                mean = sum(fix_count(p) for p in sample) / N
                wins[test] += (mean < raw_threshold) == transitive
            else:
                part = heuristic_orbits_from_sample(sample, spec["p_tilde"])
                wins[test] += part.blocks == orbits.blocks
    label = class_label(G)
    return [{"group_id": gid, "order": G.order(), "class_label": label, "q": q, "N": N,
             "test": t, "successes": wins[t], "trials": spec["trials"], "seed": seed}
            for t in spec["tests"] if not (t == "giant" and const is None)]


def _supergroup_cell(args):
    spec, gid, G, p, seed = args
    rng = random.Random(seed)
    n = G.degree
    nf = math.factorial(n)
    filt = {"none": None, "transitive": PermutationGroup.is_transitive,
            "primitive": PermutationGroup.is_primitive}[spec["supergroup_filter"]]
    counts = {"giant": 0, "exact": 0, "between": 0, "other": 0}
    draws = 0
    for _ in range(spec["trials"]):
        src = MixtureSampler(G, p)
        try:
            H = _find_supergroup(src, filt, spec["p_tilde"], spec["alpha"], rng, spec["max_draws"])[0]
        except DrawBudgetExhausted:
            H = None
        draws += src.draws
        if H is None or not G.is_subgroup_of(H):
            counts["other"] += 1
        elif H.is_giant() and G.order() < H.order():
            counts["giant"] += 1
        elif H.order() == G.order():
            counts["exact"] += 1
        else:
            counts["between"] += 1
    t = spec["trials"]
    row = {"group_id": gid, "order": G.order(), "class_label": class_label(G), "p": p, "trials": t}
    row.update({k: v / t for k, v in counts.items()})
    row["mean_draws"] = draws / t
    row["seed"] = seed
    return [row]


def _run_cells(fn, cells, workers: int):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(fn, cells, chunksize=1))
    else:
        results = [fn(c) for c in cells]
    return [row for rows in results for row in rows]


def run_fixed_sample_experiment(spec: ExperimentSpec, groups=None) -> list[dict]:
    """Success counts of the giant, transitivity and heuristic-orbit tests on fixed samples.

    Rows are ordered by group, then q, then N, then test.
    """
    groups = groups if groups is not None else resolve_groups(spec.groups)
    s = spec.to_dict()
    grid = spec.q_grid if spec.q_exact else spec.p_grid
    cells = []
    for gid, G in groups:
        for q in grid:
            for N in spec.N_grid:
                seed = f"{spec.seed}:{len(cells)}"
                cells.append((s, gid, G, q, N, seed))
    return _run_cells(_fixed_sample_cell, cells, spec.workers)


def run_supergroup_experiment(spec: ExperimentSpec, groups=None) -> list[dict]:
    """Proportions of find_supergroup outputs that are giants, G, or strictly between.

    ``other`` counts outputs that are not supergroups of G (or budget failures).
    """
    groups = groups if groups is not None else resolve_groups(spec.groups)
    s = spec.to_dict()
    cells = []
    for gid, G in groups:
        for p in spec.p_grid:
            cells.append((s, gid, G, p, f"{spec.seed}:{len(cells)}"))
    return _run_cells(_supergroup_cell, cells, spec.workers)


def run_experiment(spec: ExperimentSpec) -> list[dict]:
    if spec.experiment == "fixed_sample":
        return run_fixed_sample_experiment(spec)
    return run_supergroup_experiment(spec)


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def rows_to_csv(rows: list[dict], fields) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r[f]) for f in fields])
    return buf.getvalue()


def experiment_csv(spec: ExperimentSpec, rows: list[dict]) -> str:
    fields = FIXED_SAMPLE_FIELDS if spec.experiment == "fixed_sample" else SUPERGROUP_FIELDS
    return rows_to_csv(rows, fields)


def cell_rates(rows: list[dict]) -> dict:
    """Pooled success rate per (q, N, test) over all groups."""
    acc: dict = {}
    for r in rows:
        key = (r["q"], r["N"], r["test"])
        s, t = acc.get(key, (0, 0))
        acc[key] = (s + r["successes"], t + r["trials"])
    return {k: s / t for k, (s, t) in acc.items()}
