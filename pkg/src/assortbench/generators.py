"""Instance generators and lower-bound diagnostics.

``generate_synthetic`` draws the benchmark family (revenues uniform on
[0.4, 0.5], utilities uniform on [10/N, 20/N]); ``generate_lower_bound``
builds the hard two-item pair P0/P1 whose purchase distributions are nearly
indistinguishable at horizon T; ``lower_bound_tester`` is the binary
identity test applied to an episode's assortment sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Instance

__all__ = [
    "GeneratorSpec",
    "generate_synthetic",
    "generate_lower_bound",
    "lower_bound_tester",
    "GENERATOR_NAMES",
]

GENERATOR_NAMES = ("synthetic", "lower_bound_p0", "lower_bound_p1", "file")


@dataclass(frozen=True)
class GeneratorSpec:
    """Ranges for the synthetic family. Utility bounds are scales divided
    by N, so total utility concentrates regardless of item count."""

    revenue_low: float = 0.4
    revenue_high: float = 0.5
    utility_scale_low: float = 10.0
    utility_scale_high: float = 20.0

    def __post_init__(self):
        if not 0.0 <= self.revenue_low <= self.revenue_high <= 1.0:
            raise ValueError("revenue range must satisfy 0 <= low <= high <= 1")
        if not 0.0 <= self.utility_scale_low <= self.utility_scale_high:
            raise ValueError("utility scales must satisfy 0 <= low <= high")


def generate_synthetic(n: int, spec: GeneratorSpec | None = None, seed=None) -> Instance:
    """Draw an N-item instance: r_i ~ U[rev_low, rev_high] and
    v_i ~ U[scale_low/N, scale_high/N], i.i.d. per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    spec = spec or GeneratorSpec()
    rng = np.random.default_rng(seed)
    revenues = rng.uniform(spec.revenue_low, spec.revenue_high, size=n)
    utilities = rng.uniform(
        spec.utility_scale_low / n, spec.utility_scale_high / n, size=n
    )
    return Instance(revenues, utilities)


def generate_lower_bound(variant: str, n: int, horizon: int) -> Instance:
    """Hard instance pair: r = (1, 1/2, 0, ..., 0) with v2 = 1 and
    v1 = 1 - 1/(4 sqrt(T)) for P0, 1 + 1/(4 sqrt(T)) for P1; other items
    have zero utility."""
    if variant not in ("P0", "P1"):
        raise ValueError("variant must be 'P0' or 'P1'")
    if n < 2:
        raise ValueError("lower-bound instances need n >= 2")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    bump = 1.0 / (4.0 * math.sqrt(horizon))
    revenues = np.zeros(n)
    revenues[0] = 1.0
    revenues[1] = 0.5
    utilities = np.zeros(n)
    utilities[0] = 1.0 - bump if variant == "P0" else 1.0 + bump
    utilities[1] = 1.0
    return Instance(revenues, utilities)


def lower_bound_tester(assortments) -> int:
    """Identity test over an assortment sequence: return 0 if at least half
    of the periods offered item 1 without item 2, else 1."""
    assortments = list(assortments)
    if not assortments:
        raise ValueError("assortment sequence is empty")
    hits = sum(1 for s in assortments if 1 in s and 2 not in s)
    return 0 if hits / len(assortments) >= 0.5 else 1
