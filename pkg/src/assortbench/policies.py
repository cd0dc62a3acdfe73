"""Assortment-selection policies.

All policies see only the item revenues, the horizon T, and the stream of
purchase outcomes; utilities stay hidden. A policy alternates strictly
between ``next_assortment()`` and ``observe(outcome)`` and emits at most T
assortments.

Included: the trisection policy and its adaptive-confidence variant,
epoch-based UCB and Thompson-sampling baselines, golden-ratio search over
revenue levels, and a static reference policy.
"""

from __future__ import annotations

import math

import numpy as np

from .concentration import adaptive_ci, fixed_ci
from .core import Instance, PurchaseOutcome, level_set_from_revenues, oracle_optimal

__all__ = [
    "Policy",
    "PolicyProtocolError",
    "HorizonExhaustedError",
    "TrisectionPolicy",
    "AdaptiveTrisectionPolicy",
    "UcbPolicy",
    "ThompsonPolicy",
    "GoldenRatioSearchPolicy",
    "StaticPolicy",
    "make_policy",
    "POLICY_NAMES",
    "trisection_inner_budget",
    "adaptive_inner_budget",
]


class PolicyProtocolError(RuntimeError):
    """next_assortment/observe were called out of order."""


class HorizonExhaustedError(RuntimeError):
    """The policy already emitted all T assortments."""


class Policy:
    """Base class driving a decision generator.

    Subclasses implement ``_run()``, an infinite generator that yields
    assortments and receives the corresponding ``PurchaseOutcome`` via
    ``send``.
    """

    def __init__(self, revenues, horizon: int):
        r = np.array(revenues, dtype=float)
        if r.ndim != 1 or r.size < 1:
            raise ValueError("revenues must be a nonempty vector")
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        r.setflags(write=False)
        self.revenues = r
        self.horizon = int(horizon)
        self._offers = 0
        self._awaiting_observe = False
        self._level_set_cache: dict = {}
        self._gen = self._run()
        self._pending = next(self._gen)

    # -- protocol ---------------------------------------------------------

    def next_assortment(self) -> tuple:
        if self._awaiting_observe:
            raise PolicyProtocolError("observe() must be called before the next offer")
        if self._offers >= self.horizon:
            raise HorizonExhaustedError(f"all {self.horizon} offers already emitted")
        self._offers += 1
        self._awaiting_observe = True
        return self._pending

    def observe(self, outcome: PurchaseOutcome) -> None:
        if not self._awaiting_observe:
            raise PolicyProtocolError("observe() without a preceding next_assortment()")
        self._awaiting_observe = False
        self._pending = self._gen.send(outcome)

    @property
    def offers_emitted(self) -> int:
        return self._offers

    # -- helpers ----------------------------------------------------------

    def _level_set(self, theta: float) -> tuple:
        cached = self._level_set_cache.get(theta)
        if cached is None:
            cached = level_set_from_revenues(self.revenues, theta)
            self._level_set_cache[theta] = cached
        return cached

    def _run(self):
        raise NotImplementedError


def trisection_inner_budget(gap: float, horizon: int, log_exponent: float = 2.0) -> int:
    """Inner-iteration count 16 * ceil(gap^-2 * ln(T^log_exponent))."""
    if gap <= 0.0:
        raise ValueError("gap must be positive")
    return 16 * math.ceil(gap**-2 * log_exponent * math.log(horizon))


def adaptive_inner_budget(gap: float, horizon: int) -> int:
    """Inner-iteration count 8 * ceil(gap^-2 * ln(8 T gap^2)), at least 1."""
    if gap <= 0.0:
        raise ValueError("gap must be positive")
    arg = 8.0 * horizon * gap * gap
    if arg <= 1.0:
        return 1
    return max(1, 8 * math.ceil(gap**-2 * math.log(arg)))


class TrisectionPolicy(Policy):
    """Trisection over revenue levels with fixed-level confidence intervals.

    Keeps an interval [a, b] containing the potential fixed point. Each
    epoch probes the right trisection point y = (a + 2b)/3 with a level-set
    assortment until the interval around its mean revenue excludes y, while
    exploiting the left endpoint a in every inner iteration; the interval
    then shrinks to two thirds of its length. Confidence level is 1/T^2.

    ``interval_history`` records (a, b) at the start of every epoch.
    """

    def __init__(self, revenues, horizon, *, log_exponent: float = 2.0):
        self.log_exponent = float(log_exponent)
        self.interval_history: list = []
        super().__init__(revenues, horizon)

    def _inner_budget(self, gap: float) -> int:
        return trisection_inner_budget(gap, self.horizon, self.log_exponent)

    def _make_ci(self, total: float, count: int):
        return fixed_ci(total, count, 1.0 / self.horizon**2)

    def _run(self):
        a, b = 0.0, 1.0
        while True:
            self.interval_history.append((a, b))
            x = (2.0 * a + b) / 3.0
            y = (a + 2.0 * b) / 3.0
            budget = self._inner_budget(y - x)
            explore_set = self._level_set(y)
            exploit_set = self._level_set(a)
            total, count = 0.0, 0
            lower, upper = 0.0, 1.0
            for _ in range(budget):
                if lower <= y <= upper:
                    outcome = yield explore_set
                    total += outcome.revenue
                    count += 1
                    ci = self._make_ci(total, count)
                    lower, upper = ci.lower, ci.upper
                yield exploit_set
            if upper < y:
                b = y
            else:
                a = x


class AdaptiveTrisectionPolicy(TrisectionPolicy):
    """Trisection with adaptive-level confidence intervals (delta = 1/T).

    Inner-iteration budgets shrink to 8 * ceil(gap^-2 ln(8 T gap^2)) and the
    interval half-width is sqrt(ci_scale * ln(8/(delta t)) / t). ``ci_scale``
    defaults to the theoretical value 2; 0.1 is the empirically tuned option.
    """

    def __init__(self, revenues, horizon, *, ci_scale: float = 2.0):
        self.ci_scale = float(ci_scale)
        super().__init__(revenues, horizon)

    def _inner_budget(self, gap: float) -> int:
        return adaptive_inner_budget(gap, self.horizon)

    def _make_ci(self, total: float, count: int):
        return adaptive_ci(total, count, 1.0 / self.horizon, self.ci_scale)


class _EpochEstimatorPolicy(Policy):
    """Shared epoch structure for the UCB and Thompson baselines.

    The current assortment is offered repeatedly until a no-purchase
    outcome closes the epoch; per-epoch purchase counts are unbiased
    estimates of the item utilities.
    """

    def _pick_assortment(self) -> tuple:
        raise NotImplementedError

    def _run(self):
        n = self.revenues.size
        self.epoch_counts = np.zeros(n)  # epochs in which item i was offered
        self.purchase_totals = np.zeros(n)  # purchases of item i across those epochs
        self.epochs_closed = 0
        while True:
            assortment = self._pick_assortment()
            idx = np.asarray(assortment, dtype=np.int64) - 1
            epoch_purchases = np.zeros(n)
            while True:
                outcome = yield assortment
                if outcome.item == 0:
                    break
                epoch_purchases[outcome.item - 1] += 1.0
            self.epoch_counts[idx] += 1.0
            self.purchase_totals[idx] += epoch_purchases[idx]
            self.epochs_closed += 1

    def _plug_in_optimum(self, utilities: np.ndarray, force_include: np.ndarray) -> tuple:
        """Level-set optimum under estimated utilities, with untried items
        forced into the offer so they get explored."""
        plug_in = Instance(self.revenues, utilities)
        assortment, _ = oracle_optimal(plug_in)
        if force_include.any():
            merged = set(assortment)
            merged.update(int(i) + 1 for i in np.flatnonzero(force_include))
            return tuple(sorted(merged))
        return assortment


# Stand-in utility for items that were never offered; large enough to make
# their inclusion dominate any plug-in optimization.
_OPTIMISTIC_UTILITY = 1e9


class UcbPolicy(_EpochEstimatorPolicy):
    """Epoch-based UCB over item utilities with level-set reoptimization.

    Optimistic index: vbar + c1 sqrt(vbar ln(sqrt(N) l + 1) / T_i)
    + c2 ln(sqrt(N) l + 1) / T_i, where T_i counts epochs containing item i
    and l is the current epoch number. Defaults c1 = sqrt(48), c2 = 48.
    """

    def __init__(self, revenues, horizon, *, c1: float = math.sqrt(48.0), c2: float = 48.0):
        self.c1 = float(c1)
        self.c2 = float(c2)
        super().__init__(revenues, horizon)

    def utility_ucb(self) -> np.ndarray:
        """Current optimistic utility index (inf for never-offered items)."""
        tried = self.epoch_counts > 0
        out = np.full(self.revenues.size, np.inf)
        if tried.any():
            t_i = self.epoch_counts[tried]
            vbar = self.purchase_totals[tried] / t_i
            log_term = math.log(math.sqrt(self.revenues.size) * (self.epochs_closed + 1) + 1.0)
            out[tried] = (
                vbar
                + self.c1 * np.sqrt(vbar * log_term / t_i)
                + self.c2 * log_term / t_i
            )
        return out

    def _pick_assortment(self) -> tuple:
        index = self.utility_ucb()
        untried = ~np.isfinite(index)
        utilities = np.where(untried, _OPTIMISTIC_UTILITY, index)
        return self._plug_in_optimum(utilities, untried)


class ThompsonPolicy(_EpochEstimatorPolicy):
    """Epoch-based Thompson sampling over item utilities.

    For item i with n_i closed epochs and V_i total purchases, sample
    B ~ Beta(n_i, V_i + 1) — the posterior of the epoch-stopping
    probability 1/(1 + v_i) — and use 1/B - 1 as the utility;
    never-offered items get the optimistic draw 1.
    """

    def __init__(self, revenues, horizon, *, rng=None):
        self.rng = rng if rng is not None else np.random.default_rng()
        super().__init__(revenues, horizon)

    def _pick_assortment(self) -> tuple:
        tried = self.epoch_counts > 0
        utilities = np.ones(self.revenues.size)
        if tried.any():
            beta = self.rng.beta(
                self.epoch_counts[tried], self.purchase_totals[tried] + 1.0
            )
            beta = np.maximum(beta, 1e-12)
            utilities[tried] = 1.0 / beta - 1.0
        return self._plug_in_optimum(utilities, ~tried)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class GoldenRatioSearchPolicy(Policy):
    """Golden-section search over revenue levels.

    Each probe level is explored for ceil(sqrt(T)) periods with its level
    set; empirical means decide which bracket endpoint is dropped. Once the
    bracket collapses below 1/sqrt(T), the best probe so far is exploited
    for the remaining horizon.
    """

    def __init__(self, revenues, horizon):
        super().__init__(revenues, horizon)

    def _probe(self, theta: float):
        assortment = self._level_set(theta)
        count = math.ceil(math.sqrt(self.horizon))
        total = 0.0
        for _ in range(count):
            outcome = yield assortment
            total += outcome.revenue
        return total / count

    def _run(self):
        lo, hi = 0.0, 1.0
        collapse = 1.0 / math.sqrt(self.horizon)
        left = hi - _GOLDEN * (hi - lo)
        right = lo + _GOLDEN * (hi - lo)
        left_mean = yield from self._probe(left)
        right_mean = yield from self._probe(right)
        best_theta, best_mean = (
            (left, left_mean) if left_mean >= right_mean else (right, right_mean)
        )
        while hi - lo >= collapse:
            if left_mean < right_mean:
                lo = left
                left, left_mean = right, right_mean
                right = lo + _GOLDEN * (hi - lo)
                right_mean = yield from self._probe(right)
                candidate = (right, right_mean)
            else:
                hi = right
                right, right_mean = left, left_mean
                left = hi - _GOLDEN * (hi - lo)
                left_mean = yield from self._probe(left)
                candidate = (left, left_mean)
            if candidate[1] > best_mean:
                best_theta, best_mean = candidate
        incumbent = self._level_set(best_theta)
        while True:
            yield incumbent


class StaticPolicy(Policy):
    """Always offers one fixed assortment (reference policy)."""

    def __init__(self, revenues, horizon, assortment):
        items = tuple(int(i) for i in assortment)
        if any(items[k] >= items[k + 1] for k in range(len(items) - 1)):
            raise ValueError("assortment indices must be strictly increasing")
        if items and (items[0] < 1 or items[-1] > len(revenues)):
            raise ValueError("assortment indices out of range")
        self.assortment = items
        super().__init__(revenues, horizon)

    def _run(self):
        while True:
            yield self.assortment


POLICY_NAMES = (
    "trisection",
    "adaptive-trisection",
    "ucb",
    "thompson",
    "grs",
    "static",
)


def make_policy(name: str, revenues, horizon: int, *, rng=None, params=None) -> Policy:
    """Build a policy by name with an optional parameter map."""
    params = dict(params or {})
    if name == "trisection":
        return TrisectionPolicy(revenues, horizon, **params)
    if name == "adaptive-trisection":
        return AdaptiveTrisectionPolicy(revenues, horizon, **params)
    if name == "ucb":
        return UcbPolicy(revenues, horizon, **params)
    if name == "thompson":
        return ThompsonPolicy(revenues, horizon, rng=rng, **params)
    if name == "grs":
        return GoldenRatioSearchPolicy(revenues, horizon, **params)
    if name == "static":
        if "assortment" not in params:
            raise ValueError("static policy requires an 'assortment' parameter")
        return StaticPolicy(revenues, horizon, params["assortment"])
    raise ValueError(f"unknown policy {name!r}; choose from {POLICY_NAMES}")
