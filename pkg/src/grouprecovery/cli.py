"""Command-line interface.

Exit codes: 0 ok, 2 usage error, 3 sample or draw budget exhausted,
4 statistically inconsistent evidence.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from .corpus import BUILTIN_NAMES, builtin_group
from .experiments import ExperimentSpec, experiment_csv, run_experiment
from .group import GroupError, OrbitPartition, PermutationGroup, alternating_subgroup, load_group
from .hypothesis import (
    AdaptiveRoundsExhausted,
    GiantTestConstants,
    OrbitRecoveryError,
    b_n,
    giant_test,
    heuristic_orbit_recovery,
    k_transitivity_test,
    minimal_block_recovery,
    orbit_agreement,
    orbit_recovery,
    primitivity_test,
    subgroup_test,
)
from .perm import PermutationError, format_cycles
from .recovery import (
    DrawBudgetExhausted,
    RecoveryConfig,
    TriesExhausted,
    _find_supergroup,
    main_recover,
    niagra,
    transitive_constituent_recovery,
)
from .sampling import MixtureSampler, RetryCapExceeded, SampleSource, format_samples, load_samples
from .stats import BudgetExceeded, SourceExhausted, required_samples

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INCONSISTENT = 0, 2, 3, 4


class UsageError(Exception):
    pass


class BudgetedSource(SampleSource):
    """Stops with SourceExhausted after ``budget`` raw draws."""

    def __init__(self, inner: SampleSource, budget: int):
        self.inner = inner
        self.budget = budget
        self.degree = inner.degree
        self.caveats = inner.caveats

    @property
    def draws(self) -> int:
        return self.inner.draws

    def next(self, rng):
        if self.inner.draws >= self.budget:
            raise SourceExhausted(f"draw budget of {self.budget} exhausted")
        return self.inner.next(rng)


def get_group(spec: str) -> PermutationGroup:
    path = Path(spec)
    if path.exists():
        return load_group(path)
    try:
        return builtin_group(spec)
    except GroupError:
        raise UsageError(f"{spec!r} is neither a group file nor a builtin ({', '.join(BUILTIN_NAMES)})") from None


def get_source(args) -> SampleSource:
    if getattr(args, "samples", None):
        src = load_samples(args.samples)
    elif getattr(args, "group", None):
        src = MixtureSampler(get_group(args.group), args.p)
    else:
        raise UsageError("need --group (with --p) or --samples")
    if args.budget is not None:
        src = BudgetedSource(src, args.budget)
    return src


def _group_dict(G: PermutationGroup) -> dict:
    return {"degree": G.degree, "order": str(G.order()),
            "generators": [format_cycles(g) for g in G.generators]}


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _report_text(rep) -> str:
    return (f"{rep.test}: outcome={rep.outcome} mean={rep.sample_mean:.5f} "
            f"threshold={rep.threshold:.5f} N={rep.samples_used} confidence={rep.confidence:.4f}")


# subcommands

def cmd_recover(args, rng) -> int:
    src = get_source(args)
    if args.method == "main":
        cfg = RecoveryConfig(p_tilde=args.p_tilde, alpha=args.alpha, block_mode=args.block_mode,
                             max_draws=args.budget or RecoveryConfig.max_draws)
        out = main_recover(src, cfg, rng)
    else:
        if args.k is None:
            raise UsageError("--k is required for --method niagra")
        out = niagra(src, args.k, args.runs, rng=rng, p_tilde=args.p_tilde)
    G = out.group
    text = "no group recovered" if G is None else \
        f"order {G.order()}\n" + "\n".join(format_cycles(g) for g in G.generators)
    if out.flags:
        text += "\nflags: " + "; ".join(out.flags)
    _emit(args, out.to_dict(), text)
    if "budget exhausted" in out.flags:
        return EXIT_BUDGET
    if "inconsistent" in out.flags:
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_test(args, rng) -> int:
    src = get_source(args)
    kw = {"cap": args.cap}
    if args.which == "giant":
        rep = giant_test(src, args.p_tilde, args.alpha, rng, **kw)
    elif args.which == "subgroup":
        if args.subgroup is None:
            raise UsageError("--subgroup is required")
        H = alternating_subgroup(src.degree) if args.subgroup.lower() in ("a_n", "alternating") \
            else get_group(args.subgroup)
        rep = subgroup_test(src, H, args.p_tilde, args.alpha, rng, **kw)
    elif args.which == "transitivity":
        rep = k_transitivity_test(src, args.k, args.p_tilde, args.alpha, rng, **kw)
    elif args.which == "orbit-agree":
        if args.i is None or args.j is None:
            raise UsageError("--i and --j are required")
        rep = orbit_agreement(src, args.i, args.j, args.p_tilde, args.alpha, rng, **kw)
    else:
        rep = primitivity_test(src, args.n_budget, args.p_tilde, args.alpha, rng, args.mode, **kw)
    _emit(args, rep.to_dict(), _report_text(rep))
    return EXIT_OK


def _partition_payload(part: OrbitPartition) -> dict:
    d = {"partition": part.to_json()}
    if part.report is not None:
        d["evidence"] = part.report.to_dict()
    return d


def cmd_orbits(args, rng) -> int:
    src = get_source(args)
    if args.method == "rigorous":
        part = orbit_recovery(src, args.p_tilde, args.alpha, rng)
    else:
        mode = "adaptive" if args.method == "adaptive" else "non-adaptive"
        part = heuristic_orbit_recovery(src, args.N, args.t, mode, args.p_tilde, rng, args.alpha)
    _emit(args, _partition_payload(part), " ".join("{" + ",".join(map(str, b)) + "}" for b in part.blocks))
    return EXIT_OK


def cmd_blocks(args, rng) -> int:
    src = get_source(args)
    systems = minimal_block_recovery(src, args.N, args.p_tilde, args.alpha, rng, args.mode)
    lines = [" ".join("{" + ",".join(map(str, b)) + "}" for b in s.blocks) for s in systems]
    payload = {"block_systems": [s.to_json() for s in systems], "primitive": not systems}
    _emit(args, payload, "\n".join(lines) if lines else "no block systems (primitive)")
    return EXIT_OK


def cmd_find_supergroup(args, rng) -> int:
    src = get_source(args)
    filt = {"none": None, "transitive": PermutationGroup.is_transitive,
            "primitive": PermutationGroup.is_primitive}[args.filter]
    H, rep, reports = _find_supergroup(src, filt, args.p_tilde, args.alpha, rng,
                                       args.budget or 1_000_000)
    payload = {"group": _group_dict(H), "tests": [r.to_dict() for r in reports], "raw_draws": src.draws}
    _emit(args, payload, f"order {H.order()}\n" + "\n".join(format_cycles(g) for g in H.generators))
    return EXIT_OK


def cmd_constituents(args, rng) -> int:
    src = get_source(args)
    part = orbit_recovery(src, args.p_tilde, args.alpha, rng)
    cfg = RecoveryConfig(p_tilde=args.p_tilde, alpha=args.alpha / max(1, len(part)),
                         block_mode=args.block_mode)
    flags = []

    def inner(s, r):
        out = main_recover(s, cfg, r)
        flags.extend(out.flags)
        if out.group is None:
            raise DrawBudgetExhausted("constituent recovery failed")
        return out.group

    groups = transitive_constituent_recovery(src, part, inner, rng, args.p_tilde)
    payload = {"orbits": part.to_json(), "partial": True, "flags": flags,
               "constituents": [_group_dict(G) for G in groups]}
    text = "\n".join(f"{{{','.join(map(str, b))}}}: order {G.order()}" for b, G in zip(part.blocks, groups))
    _emit(args, payload, text + "\n(constituents need not determine G)")
    return EXIT_OK


def cmd_sample(args, rng) -> int:
    src = get_source(args)
    perms = src.take(args.count, rng)
    text = format_samples(perms, src.degree)
    if args.out:
        Path(args.out).write_text(text)
        if args.json:
            print(json.dumps({"path": args.out, "count": len(perms), "degree": src.degree}))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_experiment(args, rng) -> int:
    spec = ExperimentSpec.load(args.spec)
    overrides = {"seed": args.seed, "workers": args.workers, "output": args.out}
    for k, v in overrides.items():
        if v is not None:
            setattr(spec, k, v)
    if isinstance(spec.groups, list):
        spec.groups = [str(Path(args.spec).parent / g) if (Path(args.spec).parent / g).exists() else g
                       for g in spec.groups]
    rows = run_experiment(spec)
    text = experiment_csv(spec, rows)
    if spec.output:
        Path(spec.output).write_text(text)
    if args.json:
        print(json.dumps({"rows": rows, "spec": spec.to_dict()}, sort_keys=True))
    elif not spec.output:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bounds(args, rng) -> int:
    rows = []
    for n in args.n:
        row = {"n": n, "b_n": b_n(n) if n >= 5 else None}
        if n >= 5 and args.p_tilde < b_n(n):
            c = GiantTestConstants(n, args.p_tilde)
            row.update(U=c.U, L=c.L, c=c.threshold, delta=c.margin, N=c.required_samples(args.alpha))
        rows.append(row)
    lines = []
    for r in rows:
        s = f"n={r['n']}"
        if r["b_n"] is not None:
            s += f" b_n={r['b_n']:.5f}"
        if "U" in r:
            s += (f" U={r['U']:.4f} L={r['L']:.4f} c={r['c']:.4f} delta={r['delta']:.5f}"
                  f" N({args.alpha:g})={r['N']}")
        elif r["b_n"] is not None:
            s += " (p_tilde >= b_n: giant test unavailable)"
        lines.append(s)
    if args.delta is not None:
        lines.append(f"N({args.alpha:g}, {args.delta:g}) = {required_samples(args.alpha, args.delta)}")
    payload = {"p_tilde": args.p_tilde, "alpha": args.alpha, "rows": rows}
    if args.delta is not None:
        payload["required_samples"] = required_samples(args.alpha, args.delta)
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _probability(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= x <= 1:
        raise argparse.ArgumentTypeError(f"must lie in [0,1]: {text}")
    return x


def _positive(text: str) -> int:
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--p", type=_probability, default=0.0, help="error probability of the mixture source")
    common.add_argument("--p-tilde", type=_probability, default=0.25, help="assumed upper bound on p")
    common.add_argument("--alpha", type=_probability, default=0.05, help="allowed failure probability")
    common.add_argument("--json", action="store_true", help="print JSON")
    common.add_argument("--budget", type=_positive, default=None, help="cap on raw draws")
    common.add_argument("-v", "--verbose", action="store_true")
    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--group", help="group file or builtin name (WE6, D6, C5, Z2^2xD8, S5, ...)")
    src.add_argument("--samples", help="file of draws to replay instead of a mixture source")

    ap = argparse.ArgumentParser(prog="grouprecovery", description="Recover permutation groups from noisy samples.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recover", parents=[common, src], help="recover G")
    p.add_argument("--method", choices=["main", "niagra"], default="main")
    p.add_argument("--k", type=_positive)
    p.add_argument("--runs", type=_positive, default=25)
    p.add_argument("--block-mode", choices=["rigorous", "heuristic"], default="rigorous")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("test", parents=[common, src], help="run one hypothesis test")
    p.add_argument("which", choices=["giant", "subgroup", "transitivity", "orbit-agree", "primitivity"])
    p.add_argument("--subgroup", help="H for the subgroup test: group file, builtin, or A_n")
    p.add_argument("--k", type=_positive, default=1)
    p.add_argument("--i", type=_positive)
    p.add_argument("--j", type=_positive)
    p.add_argument("--mode", choices=["rigorous", "heuristic"], default="rigorous")
    p.add_argument("--n-budget", type=_positive)
    p.add_argument("--cap", type=_positive, default=10_000_000, help="largest sample size allowed")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("orbits", parents=[common, src], help="recover the orbit partition")
    p.add_argument("--method", choices=["rigorous", "heuristic", "adaptive"], default="rigorous")
    p.add_argument("--N", type=_positive, default=100)
    p.add_argument("--t", type=float)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("blocks", parents=[common, src], help="recover minimal block systems")
    p.add_argument("--mode", choices=["rigorous", "heuristic"], default="rigorous")
    p.add_argument("--N", type=_positive)
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("find-supergroup", parents=[common, src], help="grow a certified supergroup of G")
    p.add_argument("--filter", choices=["none", "transitive", "primitive"], default="none")
    p.set_defaults(func=cmd_find_supergroup)

    p = sub.add_parser("constituents", parents=[common, src], help="recover the transitive constituents")
    p.add_argument("--block-mode", choices=["rigorous", "heuristic"], default="rigorous")
    p.set_defaults(func=cmd_constituents)

    p = sub.add_parser("sample", parents=[common, src], help="write raw draws to a file")
    p.add_argument("--count", type=_positive, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("experiment", parents=[common], help="run a batch experiment")
    p.add_argument("--spec", required=True, help="experiment JSON")
    p.add_argument("--out", help="CSV path (overrides the output in the JSON)")
    p.add_argument("--workers", type=_positive)
    p.set_defaults(func=cmd_experiment, seed=None)

    p = sub.add_parser("bounds", parents=[common], help="print giant-test constants and sample sizes")
    p.add_argument("--n", type=_positive, nargs="+", default=[5, 10, 27, 50])
    p.add_argument("--delta", type=float, help="also print N(alpha, delta)")
    p.set_defaults(func=cmd_bounds, alpha=0.01)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    rng = random.Random(args.seed)
    try:
        return args.func(args, rng)
    except (UsageError, GroupError, PermutationError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, SourceExhausted, DrawBudgetExhausted, RetryCapExceeded, TriesExhausted) as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (OrbitRecoveryError, AdaptiveRoundsExhausted) as e:
        print(f"inconsistent evidence: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
