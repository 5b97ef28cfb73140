"""Monte Carlo validation of the analytic chain and a per-disk farm model.

Two simulators share the estimator machinery:

* ``simulate_chain`` races the chain's exponential clocks state by state
  until absorption, a stochastic oracle for the analytic solvers.
* ``simulate_farm`` is an event-driven model of individual disks with a
  priority queue of failure and repair events, so multi-year horizons
  cost only per-event work. Lifetimes may be exponential, Weibull, or a
  competing-risks mix of both (the drawn lifetime is the smaller of an
  intrinsic exponential draw and a wear-out Weibull draw). Replacement
  disks always start at age zero. Repairs are exponential with the given
  mean; a fixed-duration mode exists for sensitivity checks only.

Every trial owns a substream split from the master seed by trial index,
so results are a pure function of (spec, seed, trials, event_cap) no
matter how trials are scheduled. Trials that reach the event cap without
a loss are censored: they are excluded from the mean, counted in the
result, and a censored fraction above 1% flags the estimate unreliable
rather than silently biased.
"""

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import AllCensoredError
from .markov import MarkovChain
from .scheme import ProtectionScheme

__all__ = [
    "CompetingMixture",
    "DiskFarm",
    "Exponential",
    "SimResult",
    "Weibull",
    "simulate_chain",
    "simulate_farm",
    "summarize",
]

_Z95 = 1.959963984540054
_UNRELIABLE_CENSORING = 0.01

_FAIL = 0
_REPAIR = 1


@dataclass(frozen=True)
class Exponential:
    """Memoryless lifetime with the given hourly rate."""

    rate_per_hour: float

    def __post_init__(self):
        if not self.rate_per_hour > 0.0:
            raise ValueError(f"rate must be positive, got {self.rate_per_hour}")

    def draw(self, take: Callable[[], float]) -> float:
        return -math.log1p(-take()) / self.rate_per_hour


@dataclass(frozen=True)
class Weibull:
    """Wear-out lifetime; shape 1 degenerates to Exponential(1 / scale)."""

    scale_hours: float
    shape: float

    def __post_init__(self):
        if not self.scale_hours > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale_hours}")
        if not self.shape > 0.0:
            raise ValueError(f"shape must be positive, got {self.shape}")

    def draw(self, take: Callable[[], float]) -> float:
        return self.scale_hours * (-math.log1p(-take())) ** (1.0 / self.shape)


@dataclass(frozen=True)
class CompetingMixture:
    """Competing risks: an intrinsic exponential clock racing a wear-out clock.

    The exponential draw is taken first, then the Weibull draw; the disk
    fails at whichever comes sooner.
    """

    exponential_rate: float
    weibull_scale: float
    weibull_shape: float

    def __post_init__(self):
        if not self.exponential_rate > 0.0:
            raise ValueError(f"exponential rate must be positive, got {self.exponential_rate}")
        if not (self.weibull_scale > 0.0 and self.weibull_shape > 0.0):
            raise ValueError("weibull scale and shape must be positive")

    def draw(self, take: Callable[[], float]) -> float:
        intrinsic = -math.log1p(-take()) / self.exponential_rate
        wear = self.weibull_scale * (-math.log1p(-take())) ** (1.0 / self.weibull_shape)
        return min(intrinsic, wear)


LifetimeDistribution = Exponential | Weibull | CompetingMixture


@dataclass(frozen=True)
class DiskFarm:
    """A protected farm plus the failure/repair behaviour of its disks."""

    scheme: ProtectionScheme
    lifetime: LifetimeDistribution
    repair_mean_hours: float
    tpr: float = 0.0
    fixed_repair: bool = False  # sensitivity mode, excluded from acceptance gates

    def __post_init__(self):
        if not self.repair_mean_hours > 0.0:
            raise ValueError(f"repair mean must be positive, got {self.repair_mean_hours}")
        if not 0.0 <= self.tpr <= 1.0:
            raise ValueError(f"tpr must lie in [0, 1], got {self.tpr}")


@dataclass(frozen=True)
class SimResult:
    """Trial statistics; an all-censored run reports an unbounded mean."""

    trials: int
    mean_ttdl_hours: float
    std_error_hours: float
    ci95_hours: tuple[float, float]
    seed: int
    censored_trials: int = 0

    @property
    def censoring_fraction(self) -> float:
        return self.censored_trials / self.trials

    @property
    def unreliable(self) -> bool:
        return not self.is_infinite and self.censoring_fraction > _UNRELIABLE_CENSORING

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.mean_ttdl_hours)


class _UniformStream:
    """Buffered scalar uniforms in [0, 1) from one generator."""

    __slots__ = ("_rng", "_block", "_buf", "_i")

    def __init__(self, rng: np.random.Generator, block: int = 512):
        self._rng = rng
        self._block = block
        self._buf: list[float] = []
        self._i = 0

    def __call__(self) -> float:
        if self._i >= len(self._buf):
            self._buf = self._rng.random(self._block).tolist()
            self._i = 0
        value = self._buf[self._i]
        self._i += 1
        return value


def _trial_stream(seed: int, trial: int) -> _UniformStream:
    # counter-based split: substream identity depends only on (seed, trial)
    sequence = np.random.SeedSequence(seed, spawn_key=(trial,))
    return _UniformStream(np.random.default_rng(sequence))


def _check_run_arguments(seed: int, trials: int, event_cap: int) -> None:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if event_cap < 1:
        raise ValueError(f"event_cap must be >= 1, got {event_cap}")


def summarize(samples: Sequence[float], *, seed: int = 0, censored: int = 0) -> SimResult:
    """Mean, standard error and normal 95% interval for uncensored trials.

    Needs at least two uncensored samples for the interval. An empty,
    fully censored input is reported distinctly from an empty input.
    """
    n = len(samples)
    if n == 0:
        if censored > 0:
            raise AllCensoredError(f"all {censored} trials were censored at the event cap")
        raise ValueError("no samples to summarize")
    if n == 1:
        raise ValueError("need at least two uncensored samples for a confidence interval")
    mean = math.fsum(samples) / n
    variance = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    std_error = math.sqrt(variance / n)
    half = _Z95 * std_error
    return SimResult(
        trials=n + censored,
        mean_ttdl_hours=mean,
        std_error_hours=std_error,
        ci95_hours=(mean - half, mean + half),
        seed=seed,
        censored_trials=censored,
    )


def _all_censored(trials: int, seed: int) -> SimResult:
    return SimResult(
        trials=trials,
        mean_ttdl_hours=math.inf,
        std_error_hours=0.0,
        ci95_hours=(math.inf, math.inf),
        seed=seed,
        censored_trials=trials,
    )


def simulate_chain(
    chain: MarkovChain, seed: int, trials: int, event_cap: int = 1_000_000
) -> SimResult:
    """Estimate MTTDL by racing the chain's exponential clocks to absorption."""
    _check_run_arguments(seed, trials, event_cap)

    n = chain.total_disks
    lam = chain.failure_rate
    mu = chain.repair_rate
    k = chain.saturation
    exit_rate = [0.0] * (k + 1)
    loss_cut = [0.0] * (k + 1)
    up_cut = [0.0] * (k + 1)
    for i in range(k + 1):
        a_i = chain.loss.prob(i)
        exit_rate[i] = i * mu + (n - i) * lam
        loss_cut[i] = a_i * (n - i) * lam / exit_rate[i]
        up_cut[i] = loss_cut[i] + (1.0 - a_i) * (n - i) * lam / exit_rate[i]

    samples: list[float] = []
    censored = 0
    for trial in range(trials):
        take = _trial_stream(seed, trial)
        t = 0.0
        state = 0
        for _ in range(event_cap):
            t += -math.log1p(-take()) / exit_rate[state]
            u = take()
            if u < loss_cut[state]:
                samples.append(t)
                break
            if u < up_cut[state]:
                state += 1
            else:
                state -= 1
        else:
            censored += 1

    if not samples:
        return _all_censored(trials, seed)
    return summarize(samples, seed=seed, censored=censored)


def simulate_farm(farm: DiskFarm, seed: int, trials: int, event_cap: int) -> SimResult:
    """Discrete-event estimate of the farm's time to data loss.

    Every disk draws a lifetime at installation. A predicted failure is
    swapped for a fresh disk on the spot with probability tpr; an
    unpredicted one degrades its array until its repair completes with a
    fresh disk. The trial ends the moment any array holds more concurrent
    failures than it tolerates, or is censored at the event cap.
    """
    _check_run_arguments(seed, trials, event_cap)

    scheme = farm.scheme
    per_array = scheme.disks_per_array
    tolerance = scheme.fault_tolerance
    total = scheme.total_disks
    lifetime = farm.lifetime
    mean_repair = farm.repair_mean_hours
    tpr = farm.tpr

    samples: list[float] = []
    censored = 0
    for trial in range(trials):
        take = _trial_stream(seed, trial)
        failed = [0] * scheme.arrays
        heap: list[tuple[float, int, int, int]] = []
        seq = 0
        for disk in range(total):
            heap.append((lifetime.draw(take), seq, _FAIL, disk))
            seq += 1
        heapq.heapify(heap)

        loss_at = None
        for _ in range(event_cap):
            t, _, kind, disk = heapq.heappop(heap)
            if kind == _FAIL:
                if take() < tpr:
                    # intercepted: fresh disk takes over at the failure instant
                    heapq.heappush(heap, (t + lifetime.draw(take), seq, _FAIL, disk))
                else:
                    array = disk // per_array
                    failed[array] += 1
                    if failed[array] > tolerance:
                        loss_at = t
                        break
                    repair = (
                        mean_repair
                        if farm.fixed_repair
                        else -mean_repair * math.log1p(-take())
                    )
                    heapq.heappush(heap, (t + repair, seq, _REPAIR, disk))
            else:
                failed[disk // per_array] -= 1
                heapq.heappush(heap, (t + lifetime.draw(take), seq, _FAIL, disk))
            seq += 1

        if loss_at is None:
            censored += 1
        else:
            samples.append(loss_at)

    if not samples:
        return _all_censored(trials, seed)
    return summarize(samples, seed=seed, censored=censored)
