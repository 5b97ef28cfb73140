"""Protection-scheme geometry and per-state data-loss probabilities.

A disk farm is `l` independent arrays of ``n + m`` disks: n data disks
plus m redundancy disks per array. An array survives m concurrent
failures; one more inside the same array loses data. Given ``i`` failed
disks farm-wide, the chance that the next failure lands badly, i.e.
completes ``m + 1`` concurrent failures inside one array, is a loss
probability indexed by i. Counting subsets of failed disks gives the
base value at i = m; each further concurrent failure scales the odds by
(i + 2), clamped at certainty. The vector stops at the first index that
reaches 1 because the chain is absorbed there.

Binomial ratios are evaluated in log space so farm sizes of 100,000
disks stay well inside double range.
"""

import math
from dataclasses import dataclass

__all__ = [
    "LossVector",
    "ProtectionScheme",
    "extend_until_certain",
    "log_binomial",
    "raid6_loss_vector",
    "raid_tp_loss_vector",
    "rs_loss_vector",
]


def log_binomial(a: int, b: int) -> float:
    """Natural log of the binomial coefficient C(a, b).

    Thin coefficients (min(b, a - b) small) sum logs of the falling
    factorial directly, because differencing log-gamma values near a
    cancels the result away; fat coefficients use log-gamma, where the
    result is large enough to absorb that rounding. Exact for b in
    {0, a}, relative error under 1e-12 elsewhere.
    """
    if a < 0 or b < 0:
        raise ValueError(f"binomial arguments must be non-negative, got ({a}, {b})")
    if b > a:
        raise ValueError(f"binomial requires b <= a, got ({a}, {b})")
    small = min(b, a - b)
    if small == 0:
        return 0.0
    if small <= 10_000:
        return math.fsum(math.log(a - j) for j in range(small)) - math.lgamma(small + 1)
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


@dataclass(frozen=True)
class LossVector:
    """Per-state data-loss probabilities of the failure chain.

    ``values[i - 1]`` is the probability that, with i disks already
    failed, the next failure causes data loss. The vector ends at the
    first certain-loss state (the saturation index); the very first
    failure is always survivable, so a leading value of 0 is implicit.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("loss vector needs at least one probability")
        for v in self.values:
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"loss probability {v} outside [0, 1]")
        for lo, hi in zip(self.values, self.values[1:]):
            if hi < lo:
                raise ValueError("loss probabilities must be non-decreasing")
        if self.values[-1] != 1.0:
            raise ValueError("loss vector must end at probability 1")
        if any(v == 1.0 for v in self.values[:-1]):
            raise ValueError("only the final loss probability may equal 1")

    @property
    def saturation(self) -> int:
        """Index of the first certain-loss state, the chain's last transient state."""
        return len(self.values)

    def prob(self, failed: int) -> float:
        """Loss probability for the next failure with `failed` disks already down."""
        if failed < 0 or failed > self.saturation:
            raise IndexError(f"state {failed} outside 0..{self.saturation}")
        if failed == 0:
            return 0.0
        return self.values[failed - 1]


def extend_until_certain(base_index: int, base_value: float) -> LossVector:
    """Grow a loss vector from its first non-zero entry.

    Starting from probability `base_value` at state `base_index`, every
    additional concurrent failure multiplies the previous probability by
    (i + 2), clamped at 1; the clamp index becomes the saturation point.
    A zero base would never saturate, so it is rejected as a degenerate
    scheme.
    """
    if base_index < 1:
        raise ValueError(f"base index must be >= 1, got {base_index}")
    if not base_value > 0.0:
        raise ValueError("base loss probability must be positive; zero never saturates")
    if base_value > 1.0:
        raise ValueError(f"base loss probability {base_value} exceeds 1")
    values = [0.0] * (base_index - 1) + [base_value]
    i = base_index
    while values[-1] < 1.0:
        values.append(min(1.0, (i + 2) * values[-1]))
        i += 1
    return LossVector(tuple(values))


def _base_loss_probability(disks_per_array: int, tolerance: int, arrays: int) -> float:
    """Probability that tolerance + 1 uniformly placed failures sit in one array."""
    total = disks_per_array * arrays
    log_p = (
        math.log(arrays)
        + log_binomial(disks_per_array, tolerance + 1)
        - log_binomial(total, tolerance + 1)
    )
    return math.exp(log_p)


def raid6_loss_vector(data_disks: int, arrays: int) -> LossVector:
    """Loss vector for arrays of n data + 2 parity disks (two-failure tolerant).

    Three concurrent failures in one array lose data; the fourth failure
    can join any of the exposed triples in four ways, and later failures
    follow the shared (i + 2) growth rule.
    """
    if data_disks < 1 or arrays < 1:
        raise ValueError("data_disks and arrays must both be >= 1")
    base = _base_loss_probability(data_disks + 2, 2, arrays)
    values = [0.0, base]
    if base < 1.0:
        values.append(min(1.0, 4.0 * base))
        i = 3
        while values[-1] < 1.0:
            values.append(min(1.0, (i + 2) * values[-1]))
            i += 1
    return LossVector(tuple(values))


def raid_tp_loss_vector(data_disks: int, arrays: int) -> LossVector:
    """Loss vector for arrays of n data + 3 parity disks (three-failure tolerant)."""
    if data_disks < 1 or arrays < 1:
        raise ValueError("data_disks and arrays must both be >= 1")
    return extend_until_certain(3, _base_loss_probability(data_disks + 3, 3, arrays))


def rs_loss_vector(data_disks: int, code_disks: int, arrays: int) -> LossVector:
    """Loss vector for an erasure code of n data + m code disks per array.

    Any m concurrent failures in an array are recoverable; m + 1 lose
    data. The two parity layouts are the m = 2 and m = 3 special cases.
    """
    if data_disks < 1 or code_disks < 1 or arrays < 1:
        raise ValueError("data_disks, code_disks and arrays must all be >= 1")
    base = _base_loss_probability(data_disks + code_disks, code_disks, arrays)
    return extend_until_certain(code_disks, base)


@dataclass(frozen=True)
class ProtectionScheme:
    """Geometry of a protected farm: `arrays` arrays of n data + m redundancy disks."""

    data_disks: int
    redundancy_disks: int
    arrays: int

    def __post_init__(self):
        if self.data_disks < 1:
            raise ValueError(f"data_disks must be >= 1, got {self.data_disks}")
        if self.redundancy_disks < 1:
            raise ValueError(f"redundancy_disks must be >= 1, got {self.redundancy_disks}")
        if self.arrays < 1:
            raise ValueError(f"arrays must be >= 1, got {self.arrays}")

    @property
    def disks_per_array(self) -> int:
        return self.data_disks + self.redundancy_disks

    @property
    def total_disks(self) -> int:
        return self.disks_per_array * self.arrays

    @property
    def fault_tolerance(self) -> int:
        """Concurrent failures one array survives."""
        return self.redundancy_disks

    def loss_vector(self) -> LossVector:
        return rs_loss_vector(self.data_disks, self.redundancy_disks, self.arrays)
