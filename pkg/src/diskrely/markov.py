"""Mean time to data loss of the absorbing disk-failure chain.

State i counts concurrently failed disks. With N disks, per-disk failure
rate lam and per-repair rate mu, state i moves up at (1 - a_i)(N - i) lam,
is absorbed into the loss state at a_i (N - i) lam, and repairs down at
i mu, where a_i comes from the scheme's loss vector (a_0 = 0, a_K = 1).
Repairs proceed in parallel without limit.

Two independent solvers are provided and must agree:

* ``mttdl_laplace`` works in the transform domain. The trailing principal
  minors of the transient rate matrix obey a three-term continuant
  recursion; the matching absorption-flux numerator folds each
  (N - j) lam factor as it goes so intermediates stay near unity even at
  N = 100,000. First derivatives are propagated exactly alongside the
  values (never by finite differences), and the expected absorption time
  falls out of the quotient rule at the origin. The signed quotient is
  asserted positive; a sign flip is a hard error, not silently absorbed.
* ``mttdl_hitting_time`` solves the expected-absorption-time balance
  equations, a tridiagonal linear system, by direct elimination.

The continuant recursion can cancel heavily when repairs are much faster
than failures; an absolute-value shadow recursion estimates the loss and
attaches conditioning warnings. With ``extended=True`` any warned result
is recomputed at 50 significant digits.
"""

import math
from dataclasses import dataclass

import mpmath

from .errors import ConditioningError, DegenerateChainError
from .scheme import LossVector

__all__ = [
    "MarkovChain",
    "MttdlResult",
    "mttdl_hitting_time",
    "mttdl_laplace",
    "trailing_minors_at_zero",
]

_EPS = 2.22e-16
_WARN_RELATIVE_LOSS = 1e-10
_EXTENDED_DIGITS = 50


@dataclass(frozen=True)
class MarkovChain:
    """Failure chain of a farm: N disks, exponential failures and repairs."""

    total_disks: int
    failure_rate: float  # per disk per hour
    repair_rate: float  # per failed disk per hour
    loss: LossVector

    def __post_init__(self):
        if not (self.failure_rate > 0.0 and math.isfinite(self.failure_rate)):
            raise ValueError(f"failure_rate must be positive, got {self.failure_rate}")
        # repair_rate 0 is the no-repair limit, still a valid absorbing chain
        if not (self.repair_rate >= 0.0 and math.isfinite(self.repair_rate)):
            raise ValueError(f"repair_rate must be non-negative, got {self.repair_rate}")
        if self.total_disks < self.loss.saturation + 1:
            raise ValueError(
                f"need at least {self.loss.saturation + 1} disks for this loss vector, "
                f"got {self.total_disks}"
            )

    @property
    def saturation(self) -> int:
        return self.loss.saturation


@dataclass(frozen=True)
class MttdlResult:
    """MTTDL estimate with the solver used and its diagnostics."""

    mttdl_hours: float
    method: str
    saturation: int
    loss_values: tuple[float, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.method not in ("laplace", "hitting_time"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.mttdl_hours > 0.0:
            raise ValueError(f"mttdl must be positive, got {self.mttdl_hours}")

    @property
    def mttdl_days(self) -> float:
        return self.mttdl_hours / 24.0

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.mttdl_hours)


def _minor_recursion(chain: MarkovChain) -> tuple[list[tuple[float, float]], float]:
    """Backward continuant over trailing minors, with a condition estimate.

    Returns (value, derivative) pairs for indices 0..K+1 plus the ratio of
    the all-positive shadow recursion to |minor 0|, which bounds the
    relative precision lost to cancellation.
    """
    n = chain.total_disks
    lam = chain.failure_rate
    mu = chain.repair_rate
    k = chain.saturation

    pairs = [(0.0, 0.0)] * (k + 2)
    pairs[k + 1] = (1.0, 0.0)
    val_next, der_next = 1.0, 0.0  # index i + 1
    val_after, der_after = 0.0, 0.0  # index i + 2
    abs_next, abs_after = 1.0, 0.0
    abs_head = 1.0
    for i in range(k, -1, -1):
        a_i = chain.loss.prob(i)
        diag = i * mu + (n - i) * lam
        coupling = (i + 1) * (n - i) * (1.0 - a_i) * mu * lam
        val = diag * val_next - coupling * val_after
        der = val_next + diag * der_next - coupling * der_after
        abs_head = diag * abs_next + coupling * abs_after
        pairs[i] = (val, der)
        val_next, val_after = val, val_next
        der_next, der_after = der, der_next
        abs_next, abs_after = abs_head, abs_next

    head = abs(pairs[0][0])
    condition = math.inf if head == 0.0 else abs_head / head
    return pairs, condition


def trailing_minors_at_zero(chain: MarkovChain) -> list[tuple[float, float]]:
    """Trailing principal minors of the transient rate matrix at the origin.

    Entry i is (value, first derivative) of the determinant of the chain
    restricted to states i..K; entry K+1 is the boundary pair (1, 0).
    Derivatives are carried through the recursion exactly.
    """
    pairs, _ = _minor_recursion(chain)
    return pairs


def _flux_numerator(chain: MarkovChain, pairs) -> tuple[float, float]:
    """Absorption-flux numerator and derivative at the origin.

    Each term couples the loss rate out of state i with the minor below
    it; the i + 1 factors of (N - j) lam are folded one by one so the
    running product stays near (N lam)^(i+1) instead of splitting into a
    huge integer product against a tiny rate power.
    """
    n = chain.total_disks
    lam = chain.failure_rate
    rate_product = n * lam
    survival = 1.0
    num = 0.0
    dnum = 0.0
    for i in range(1, chain.saturation + 1):
        rate_product *= (n - i) * lam
        a_i = chain.loss.prob(i)
        coeff = a_i * rate_product * survival
        val, der = pairs[i + 1]
        num += coeff * val
        dnum += coeff * der
        survival *= 1.0 - a_i
    return num, dnum


def _laplace_extended(chain: MarkovChain) -> float:
    """Same quotient evaluated with 50-digit arithmetic."""
    with mpmath.workdps(_EXTENDED_DIGITS):
        n = mpmath.mpf(chain.total_disks)
        lam = mpmath.mpf(chain.failure_rate)
        mu = mpmath.mpf(chain.repair_rate)
        k = chain.saturation
        alphas = [mpmath.mpf(v) for v in chain.loss.values]

        def a(i):
            return alphas[i - 1] if i else mpmath.mpf(0)

        vals = [mpmath.mpf(0)] * (k + 3)
        ders = [mpmath.mpf(0)] * (k + 3)
        vals[k + 1] = mpmath.mpf(1)
        for i in range(k, -1, -1):
            diag = i * mu + (n - i) * lam
            coupling = (i + 1) * (n - i) * (1 - a(i)) * mu * lam
            vals[i] = diag * vals[i + 1] - coupling * vals[i + 2]
            ders[i] = vals[i + 1] + diag * ders[i + 1] - coupling * ders[i + 2]

        rate_product = n * lam
        survival = mpmath.mpf(1)
        num = mpmath.mpf(0)
        dnum = mpmath.mpf(0)
        for i in range(1, k + 1):
            rate_product *= (n - i) * lam
            coeff = a(i) * rate_product * survival
            num += coeff * vals[i + 1]
            dnum += coeff * ders[i + 1]
            survival *= 1 - a(i)

        det = vals[0]
        if det == 0:
            raise DegenerateChainError("transient determinant vanished at extended precision")
        value = (num * ders[0] - dnum * det) / (det * det)
        return float(value)


def mttdl_laplace(chain: MarkovChain, *, extended: bool = False) -> MttdlResult:
    """MTTDL from the transform-domain quotient at the origin.

    The absorption-time transform is a ratio of flux numerator to
    transient determinant; minus its derivative at the origin is the
    expected absorption time. Certain absorption makes numerator and
    determinant equal at the origin, which doubles as a mass-balance
    diagnostic. Set `extended` to re-verify any warned result at 50
    digits (the re-checked value is returned).
    """
    pairs, condition = _minor_recursion(chain)
    det, ddet = pairs[0]
    if not (math.isfinite(det) and math.isfinite(ddet)):
        raise ConditioningError(
            f"non-finite determinant recursion (det={det}, derivative={ddet})"
        )
    if det == 0.0:
        raise DegenerateChainError(
            "transient determinant vanished; rates may have underflowed"
        )

    num, dnum = _flux_numerator(chain, pairs)
    if not (math.isfinite(num) and math.isfinite(dnum)):
        raise ConditioningError(f"non-finite flux numerator (num={num}, derivative={dnum})")

    warnings: list[str] = []
    k = chain.saturation
    det_loss = condition * (k + 1) * _EPS
    if det_loss > _WARN_RELATIVE_LOSS:
        warnings.append(
            f"determinant recursion cancellation: estimated relative error {det_loss:.1e}"
        )
    balance = abs(num - det) / max(abs(det), abs(num))
    if balance > 1e-9:
        warnings.append(f"flux/determinant mass balance off by {balance:.1e}")

    numerator = num * ddet - dnum * det
    magnitude = abs(num * ddet) + abs(dnum * det)
    if numerator != 0.0 and magnitude / abs(numerator) * _EPS > _WARN_RELATIVE_LOSS:
        warnings.append("quotient numerator cancellation")

    value = numerator / (det * det)
    if extended and warnings:
        checked = _laplace_extended(chain)
        deviation = abs(checked - value) / abs(checked) if checked else math.inf
        if deviation > 1e-9:
            warnings.append(
                f"re-checked at {_EXTENDED_DIGITS} digits, double result was off by {deviation:.1e}"
            )
        else:
            warnings.append(f"re-checked at {_EXTENDED_DIGITS} digits, double result confirmed")
        value = checked

    if not math.isfinite(value):
        raise ConditioningError(f"MTTDL quotient is not finite ({value})")
    if value <= 0.0:
        raise ConditioningError(
            f"MTTDL quotient came out non-positive ({value}); sign contract violated"
        )
    return MttdlResult(
        mttdl_hours=value,
        method="laplace",
        saturation=k,
        loss_values=chain.loss.values,
        warnings=tuple(warnings),
    )


def mttdl_hitting_time(chain: MarkovChain) -> MttdlResult:
    """MTTDL as the expected absorption time, by tridiagonal elimination.

    Each transient state's expected time to absorption balances one unit
    of dwell against its neighbours' expectations. Forward elimination
    expresses t_i = p_i + q_i t_{i+1}; the saturated state closes the
    system and back-substitution returns the all-healthy expectation.
    Completely independent of the transform route.
    """
    n = chain.total_disks
    lam = chain.failure_rate
    mu = chain.repair_rate
    k = chain.saturation

    p = [0.0] * (k + 1)
    q = [0.0] * (k + 1)
    for i in range(k + 1):
        a_i = chain.loss.prob(i)
        exit_rate = i * mu + (n - i) * lam
        up = (1.0 - a_i) * (n - i) * lam if i < k else 0.0
        down = i * mu
        if i == 0:
            p[i] = 1.0 / exit_rate
            q[i] = up / exit_rate
        else:
            denom = exit_rate - down * q[i - 1]
            if denom <= 0.0 or not math.isfinite(denom):
                raise ConditioningError(f"elimination pivot failed at state {i} ({denom})")
            p[i] = (1.0 + down * p[i - 1]) / denom
            q[i] = up / denom

    t = p[k]
    for i in range(k - 1, -1, -1):
        t = p[i] + q[i] * t

    if not math.isfinite(t) or t <= 0.0:
        raise ConditioningError(f"hitting-time solve produced {t}")
    return MttdlResult(
        mttdl_hours=t,
        method="hitting_time",
        saturation=k,
        loss_values=chain.loss.values,
        warnings=(),
    )
