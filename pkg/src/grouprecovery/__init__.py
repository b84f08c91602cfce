"""Recovering permutation groups from error-prone random samples."""
from __future__ import annotations

from .group import OrbitPartition, PermutationGroup, from_generators
from .hypothesis import (
    giant_test,
    k_transitivity_test,
    minimal_block_recovery,
    orbit_agreement,
    orbit_recovery,
    primitivity_test,
    subgroup_test,
)
from .perm import Permutation, format_cycles, parse_cycles
from .recovery import RecoveryConfig, main_recover, naive_recover, niagra, q_detected_recover
from .sampling import FilteredSampler, FixedSampleSource, MixtureSampler
from .stats import TestReport, distinguish, required_samples

__all__ = [
    "FilteredSampler", "FixedSampleSource", "MixtureSampler", "OrbitPartition", "Permutation",
    "PermutationGroup", "RecoveryConfig", "TestReport", "distinguish", "format_cycles",
    "from_generators", "giant_test", "k_transitivity_test", "main_recover", "minimal_block_recovery",
    "naive_recover", "niagra", "orbit_agreement", "orbit_recovery", "parse_cycles",
    "primitivity_test", "q_detected_recover", "required_samples", "subgroup_test",
]
