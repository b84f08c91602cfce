from __future__ import annotations

import math
import random
from collections import Counter

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.stats import chisquare

from grouprecovery.corpus import weyl_e6, z2sq_x_d8
from grouprecovery.group import PermutationGroup, alternating_group, dihedral_group, symmetric_group
from grouprecovery.perm import fix_count, is_even, parse_cycles
from grouprecovery.sampling import (
    PAIR_ACTION_CAVEAT,
    CallableSource,
    ConstituentSource,
    FilteredSampler,
    FixedSampleSource,
    MixtureSampler,
    PairSource,
    RetryCapExceeded,
    default_retry_cap,
    expected_tries,
    format_samples,
    load_samples,
    parse_samples,
    q_filtered,
    q_of,
    reduction_factor,
    save_samples,
)
from grouprecovery.stats import SourceExhausted

from .oracles import closure


def test_p_zero_stays_in_group():
    rng = random.Random(0)
    G = dihedral_group(6)
    src = MixtureSampler(G, 0.0)
    assert all(G.contains(src.next(rng)) for _ in range(500))
    assert src.draws == 500


def test_p_one_fix_mean():
    rng = random.Random(1)
    src = MixtureSampler(PermutationGroup([], 10), 1.0)
    mean = sum(fix_count(src.next(rng)) for _ in range(100_000)) / 100_000
    assert abs(mean - 1) <= 0.03


def test_we6_membership_rate():
    rng = random.Random(2)
    W = weyl_e6()
    src = MixtureSampler(W, 0.25)
    rate = sum(W.contains(src.next(rng)) for _ in range(20_000)) / 20_000
    expected = 1 - q_of(0.25, 51840, 27)
    assert expected == pytest.approx(0.75, abs=1e-20)
    assert abs(rate - expected) < 4 * math.sqrt(0.75 * 0.25 / 20_000)


def test_degree_and_counter():
    rng = random.Random(3)
    src = MixtureSampler(symmetric_group(5), 0.5)
    before = src.draws
    for _ in range(20):
        assert len(src.next(rng)) == 5
        assert src.draws > before
        before = src.draws
    with pytest.raises(ValueError):
        MixtureSampler(symmetric_group(3), 1.5)


def test_filter_true_is_passthrough():
    G = dihedral_group(5)
    a = MixtureSampler(G, 0.3).take(50, random.Random(4))
    b = FilteredSampler(MixtureSampler(G, 0.3), lambda p: True).take(50, random.Random(4))
    assert a == b


def test_filtered_parity_even_error_rate_and_tries():
    rng = random.Random(5)
    G = alternating_group(5)
    inner = MixtureSampler(G, 0.25)
    f = FilteredSampler(inner, is_even)
    n_emit = 100_000
    for _ in range(n_emit):
        assert is_even(f.next(rng))
    assert inner.draws / n_emit == pytest.approx(expected_tries(0.25, 0.5), abs=0.02)
    assert expected_tries(0.25, 0.5) == pytest.approx(8 / 7)
    H = PermutationGroup([parse_cycles("(1,2,3,4,5)", 5)])
    inner = MixtureSampler(H, 0.25)
    f = FilteredSampler(inner, is_even)
    errors = 0
    for _ in range(50_000):
        errors += not H.contains(f.next(rng))
    qp = q_filtered(0.25, 5 / 120, 0.5)
    se = math.sqrt(qp * (1 - qp) / 50_000)
    assert abs(errors / 50_000 - qp) < 3 * se


def test_retry_cap():
    f = FilteredSampler(MixtureSampler(symmetric_group(4), 0.0), lambda p: False, retry_cap=10)
    with pytest.raises(RetryCapExceeded):
        f.next(random.Random(0))
    assert f.draws == 10
    assert default_retry_cap(0.25) == 128


def test_closed_form_edges():
    assert q_of(0, 10, 5) == 0 and q_filtered(0, 0.1, 0.5) == 0
    assert q_filtered(0.3, 0.1, 1.0) == pytest.approx(0.3 * 0.9)
    assert reduction_factor(0.3, 0.1, 1.0) == pytest.approx(1.0)
    assert reduction_factor(0.3, 0.1, 0.1) == math.inf
    with pytest.raises(ValueError):
        q_filtered(0.3, 0.5, 0.2)


@given(st.floats(0, 0.5), st.floats(0, 1), st.floats(1e-6, 1))
def test_reduction_factor_bound(p, A, B):
    assume(A <= B and A < 1)
    R = reduction_factor(p, A, B)
    assert R >= (B + 1 / B) / 2 - 1e-9 or p == 0


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_filtering_never_raises_error(p, A, B):
    assume(A <= B)
    assert q_filtered(p, A, B) <= p * (1 - A) + 1e-12


def test_constituent_passthrough_and_uniformity():
    rng = random.Random(6)
    G = z2sq_x_d8()
    full = ConstituentSource(MixtureSampler(G, 0.0), range(1, 9))
    assert full.degree == 8
    src = ConstituentSource(MixtureSampler(G, 0.25), [5, 6, 7, 8], p_tilde=0.25)
    D8 = PermutationGroup([parse_cycles("(1,2,3,4)", 4), parse_cycles("(2,4)", 4)])
    draws = src.take(40_000, rng)
    inside = [d for d in draws if D8.contains(d)]
    counts = Counter(inside)
    assert len(counts) == 8
    assert chisquare(list(counts.values())).pvalue > 1e-3


def test_constituent_closure_at_p_zero():
    rng = random.Random(7)
    G = z2sq_x_d8()
    for orbit, order in (((1, 2, 3, 4), 4), ((5, 6, 7, 8), 8)):
        src = ConstituentSource(MixtureSampler(G, 0.0), orbit)
        draws = src.take(10 * order, rng)
        assert len(closure(draws, 4)) == order


def test_pair_source_caveat_and_degree():
    src = PairSource(MixtureSampler(symmetric_group(4), 0.0))
    assert src.degree == 12
    assert PAIR_ACTION_CAVEAT in src.caveats
    assert len(src.next(random.Random(0))) == 12


def test_fixed_source_and_files(tmp_path):
    rng = random.Random(8)
    perms = MixtureSampler(dihedral_group(6), 0.3).take(25, rng)
    path = tmp_path / "s.txt"
    save_samples(perms, 6, path)
    src = load_samples(path)
    assert src.take(25, None) == perms
    with pytest.raises(SourceExhausted):
        src.next(None)
    assert parse_samples(format_samples(perms, 6)).perms == perms
    with pytest.raises(ValueError):
        parse_samples("(1,2)\n")
    with pytest.raises(ValueError):
        FixedSampleSource([parse_cycles("(1,2)", 3)], degree=4)


def test_callable_source():
    src = CallableSource(lambda r: parse_cycles("(1,2)", 3), 3)
    assert src.next(None) == parse_cycles("(1,2)", 3) and src.draws == 1
    bad = CallableSource(lambda r: parse_cycles("(1,2)", 2), 3)
    with pytest.raises(ValueError):
        bad.next(None)
