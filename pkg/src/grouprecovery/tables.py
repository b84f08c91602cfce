"""Proportions of Jordan, giant and primitive permutations in S_n, n <= 34.

A permutation is Jordan if the only primitive groups containing it are giants,
giant if the only transitive groups containing it are giants, and primitive if
every transitive group containing it is primitive.  The numbers are rounded to
three decimals.
"""
from __future__ import annotations

_JORDAN = (1.00, 1.00, 1.00, 1.00, 0.417, 0.368, 0.468, 0.426, 0.501, 0.660, 0.690, 0.602,
           0.773, 0.791, 0.910, 0.853, 0.810, 0.843, 0.885, 0.861, 0.920, 0.977, 0.896, 0.858,
           0.920, 0.933, 0.943, 0.938, 0.927, 0.911, 0.921, 0.889, 0.953, 1.00)
_GIANT = (1.00, 1.00, 1.00, 0.333, 0.417, 0.000, 0.468, 0.200, 0.315, 0.254, 0.690, 0.168,
          0.773, 0.313, 0.467, 0.325, 0.810, 0.247, 0.885, 0.318, 0.567, 0.467, 0.896, 0.276,
          0.745, 0.506, 0.615, 0.426, 0.927, 0.310, 0.921, 0.458, 0.656, 0.552)
_PRIMITIVE = (1.00, 1.00, 1.00, 0.333, 1.00, 0.200, 1.00, 0.343, 0.543, 0.316, 1.00, 0.259,
              1.00, 0.390, 0.477, 0.393, 1.00, 0.306, 1.00, 0.370, 0.585, 0.478, 1.00, 0.319,
              0.791, 0.507, 0.657, 0.426, 1.00, 0.345, 1.00, 0.490, 0.672, 0.552)

MAX_N = len(_JORDAN)


def permutation_class_proportions(n: int) -> dict[str, float]:
    """Fractions of S_n that are Jordan, giant and primitive permutations."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"table covers 1 <= n <= {MAX_N}")
    return {"jordan": _JORDAN[n - 1], "giant": _GIANT[n - 1], "primitive": _PRIMITIVE[n - 1]}
