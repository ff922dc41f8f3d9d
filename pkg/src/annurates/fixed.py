"""Accumulated values of annuities-due at a fixed annual rate.

Payments land at the start of each year and the accumulated value is taken
at the end of year k, so a payment made in year i grows by (1+j)^(k-i+1).
Each accumulator offers a closed form, a one-step recursion and a direct
summation; mode "auto" (the default) uses the closed form except inside the
singular band of its denominator, where it falls back to the recursion.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

from .errors import DomainError, PaymentPositivityError
from .rates import SINGULARITY_EPS, FixedRate, fixed_rate

_MODES = ("auto", "closed", "recursive", "sum")
# increasing_squared_due also accepts the quadratic-denominator relationship
_SQ_MODES = _MODES + ("relation",)


def _as_rate(rate) -> FixedRate:
    if isinstance(rate, FixedRate):
        return rate
    return fixed_rate(rate)


def _check_k(k, name: str = "k") -> int:
    if isinstance(k, bool) or not isinstance(k, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {k!r}")
    k = int(k)
    if k < 0:
        raise DomainError(f"{name} must be nonnegative, got {k}")
    return k


def _route(mode: str, singular: bool, allowed=_MODES) -> str:
    if mode not in allowed:
        raise DomainError(f"mode must be one of {allowed}, got {mode!r}")
    if mode == "auto":
        return "recursive" if singular else "closed"
    if mode in ("closed", "relation") and singular:
        raise DomainError(
            "closed form is singular for |j| < 1e-9; use mode 'auto' or 'recursive'"
        )
    return mode


def _gross_powers(g: float, k: int) -> list[float]:
    """g^1 .. g^k by iterated multiplication."""
    out = []
    x = 1.0
    for _ in range(k):
        x *= g
        out.append(x)
    return out


def _power_diff_quotient(g: float, q: float, k: int) -> float:
    """(g^k - q^k) / (g - q), kept accurate when g is close to q."""
    if g == q:
        return k * g ** (k - 1)
    if q > 0.0:
        delta = (g - q) / q
        if abs(delta) < 0.5:
            # g - q is exact for nearby floats; expm1/log1p avoid the
            # catastrophic cancellation of the plain difference.
            return q ** (k - 1) * math.expm1(k * math.log1p(delta)) / delta
    return (g**k - q**k) / (g - q)


def level_due(k, rate, mode: str = "auto") -> float:
    """Accumulated value of k unit payments.

    Closed form ((1+j)^k - 1)/d with d = j/(1+j); recursion
    value_k = (1+j)(1 + value_{k-1}).
    """
    rate = _as_rate(rate)
    k = _check_k(k)
    path = _route(mode, abs(rate.j) < SINGULARITY_EPS)
    if k == 0:
        return 0.0
    g = 1.0 + rate.j
    if path == "closed":
        # expm1/log1p keeps (1+j)^k - 1 accurate to a couple of ulps even
        # when the numerator nearly cancels, which downstream closed forms
        # divide by d up to three more times
        return math.expm1(k * math.log1p(rate.j)) / rate.d
    if path == "recursive":
        value = 0.0
        for _ in range(k):
            value = g * (1.0 + value)
        return value
    return math.fsum(_gross_powers(g, k))


def increasing_due(k, rate, mode: str = "auto") -> float:
    """Accumulated value of payments 1, 2, ..., k.

    Closed form (level - k)/d; recursion value_k = (1+j)(k + value_{k-1}).
    """
    rate = _as_rate(rate)
    k = _check_k(k)
    path = _route(mode, abs(rate.j) < SINGULARITY_EPS)
    if k == 0:
        return 0.0
    g = 1.0 + rate.j
    if path == "closed":
        return (level_due(k, rate, mode="closed") - k) / rate.d
    if path == "recursive":
        value = 0.0
        for i in range(1, k + 1):
            value = g * (i + value)
        return value
    powers = _gross_powers(g, k)
    return math.fsum((k - e + 1) * powers[e - 1] for e in range(1, k + 1))


def increasing_squared_due(k, rate, mode: str = "auto") -> float:
    """Accumulated value of payments 1, 4, 9, ..., k^2.

    Closed form (2*increasing - level - k^2)/d; recursion
    value_k = (1+j)(k^2 + value_{k-1}); mode "relation" evaluates the
    equivalent ((1+v)(level + k^2) - 2k - 2k^2)/d^2.
    """
    rate = _as_rate(rate)
    k = _check_k(k)
    path = _route(mode, abs(rate.j) < SINGULARITY_EPS, allowed=_SQ_MODES)
    if k == 0:
        return 0.0
    g = 1.0 + rate.j
    if path == "closed":
        s = level_due(k, rate, mode="closed")
        inc = increasing_due(k, rate, mode="closed")
        return (2.0 * inc - s - k * k) / rate.d
    if path == "relation":
        s = level_due(k, rate, mode="closed")
        return ((1.0 + rate.v) * (s + k * k) - 2.0 * k - 2.0 * k * k) / (rate.d * rate.d)
    if path == "recursive":
        value = 0.0
        for i in range(1, k + 1):
            value = g * (i * i + value)
        return value
    powers = _gross_powers(g, k)
    return math.fsum((k - e + 1) ** 2 * powers[e - 1] for e in range(1, k + 1))


def decreasing_due(n, k, rate, mode: str = "auto") -> float:
    """Accumulated value after k years of payments n, n-1, ..., n-k+1.

    Requires 0 <= k <= n.  Closed form (n+1)*level - increasing; recursion
    value_k = (1+j)(value_{k-1} + n - k + 1).
    """
    rate = _as_rate(rate)
    n = _check_k(n, name="n")
    k = _check_k(k)
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if k > n:
        raise DomainError(f"k must not exceed n, got k={k}, n={n}")
    path = _route(mode, abs(rate.j) < SINGULARITY_EPS)
    if k == 0:
        return 0.0
    g = 1.0 + rate.j
    if path == "closed":
        return (n + 1) * level_due(k, rate, mode="closed") - increasing_due(
            k, rate, mode="closed"
        )
    if path == "recursive":
        value = 0.0
        for i in range(1, k + 1):
            value = g * (value + n - i + 1)
        return value
    powers = _gross_powers(g, k)
    return math.fsum((n - k + e) * powers[e - 1] for e in range(1, k + 1))


def arithmetic_due(p, q, k, rate, mode: str = "auto", strict: bool = True) -> float:
    """Accumulated value of payments p, p+q, p+2q, ..., p+(k-1)q.

    Closed form (p-q)*level + q*increasing.  Strict mode requires every
    payment positive: p > 0 and p + (k-1)q > 0.
    """
    rate = _as_rate(rate)
    k = _check_k(k)
    p = float(p)
    q = float(q)
    if strict and k >= 1:
        if not p > 0.0 or not p + (k - 1) * q > 0.0:
            raise PaymentPositivityError(
                f"arithmetic payments must stay positive in strict mode "
                f"(p={p}, q={q}, k={k}); pass strict=False to override"
            )
    path = _route(mode, abs(rate.j) < SINGULARITY_EPS)
    if k == 0:
        return 0.0
    g = 1.0 + rate.j
    if path == "closed":
        return (p - q) * level_due(k, rate, mode="closed") + q * increasing_due(
            k, rate, mode="closed"
        )
    if path == "recursive":
        value = 0.0
        for i in range(1, k + 1):
            value = g * (value + p + (i - 1) * q)
        return value
    powers = _gross_powers(g, k)
    return math.fsum((p + (k - e) * q) * powers[e - 1] for e in range(1, k + 1))


def geometric_due(p, q, k, rate, mode: str = "auto", strict: bool = True) -> float:
    """Accumulated value of payments p, pq, pq^2, ..., pq^(k-1).

    Closed form p(1+j)((1+j)^k - q^k)/(1+j-q), with limit p*k*(1+j)^k at
    q = 1+j.  Mode "auto" switches to direct summation inside the band
    |1+j-q| < 1e-9*max(1,q).  Strict mode requires p > 0 and q > 0.
    """
    rate = _as_rate(rate)
    k = _check_k(k)
    p = float(p)
    q = float(q)
    if strict and k >= 1:
        if not p > 0.0 or not q > 0.0:
            raise PaymentPositivityError(
                f"geometric payments require p > 0 and q > 0 in strict mode "
                f"(p={p}, q={q}); pass strict=False to override"
            )
    if mode not in _MODES:
        raise DomainError(f"mode must be one of {_MODES}, got {mode!r}")
    g = 1.0 + rate.j
    near_singular = abs(g - q) < SINGULARITY_EPS * max(1.0, q)
    path = mode
    if mode == "auto":
        path = "sum" if near_singular else "closed"
    if k == 0:
        return 0.0
    if path == "closed":
        return p * g * _power_diff_quotient(g, q, k)
    if path == "recursive":
        value = 0.0
        qpow = 1.0
        for _ in range(k):
            value = g * (value + p * qpow)
            qpow *= q
        return value
    powers = _gross_powers(g, k)
    return math.fsum(p * q ** (k - e) * powers[e - 1] for e in range(1, k + 1))


def growth_due(u, k, rate, mode: str = "auto") -> float:
    """Accumulated value of payments growing at rate u: 1, 1+u, (1+u)^2, ...

    Equals geometric_due(1, 1+u, ...); also equals
    (1+j)^k * level(k at rate t)/(1+t) where (1+u) = (1+j)(1+t).
    """
    u = float(u)
    if not u > -1.0:
        raise DomainError(f"growth rate must exceed -1, got {u}")
    return geometric_due(1.0, 1.0 + u, k, rate, mode=mode)


_KINDS = (
    "level",
    "increasing",
    "increasing-squared",
    "decreasing",
    "arithmetic",
    "geometric",
    "growth",
)


@dataclass(frozen=True)
class Accumulator:
    """A payment pattern bound to a fixed rate, valued at any horizon k >= 0."""

    kind: str
    rate: FixedRate
    p: float = 1.0
    q: float = 0.0
    n: int = 1
    u: float = 0.0
    strict: bool = True

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"kind must be one of {_KINDS}, got {self.kind!r}")

    def value(self, k, mode: str = "auto") -> float:
        if self.kind == "level":
            return level_due(k, self.rate, mode=mode)
        if self.kind == "increasing":
            return increasing_due(k, self.rate, mode=mode)
        if self.kind == "increasing-squared":
            return increasing_squared_due(k, self.rate, mode=mode)
        if self.kind == "decreasing":
            return decreasing_due(self.n, k, self.rate, mode=mode)
        if self.kind == "arithmetic":
            return arithmetic_due(self.p, self.q, k, self.rate, mode=mode, strict=self.strict)
        if self.kind == "geometric":
            return geometric_due(self.p, self.q, k, self.rate, mode=mode, strict=self.strict)
        return growth_due(self.u, k, self.rate, mode=mode)
