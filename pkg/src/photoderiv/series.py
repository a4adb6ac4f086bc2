"""Extended-precision evaluation of Z(y1) = 1/sqrt(1 - 4 y1^2) and friends.

Three evaluation paths are provided:

* ``z_derivative``   -- the j-th derivative via the three-term recurrence
  Z^(j+1) = [4 y (2j+1) Z^(j) + 4 j^2 Z^(j-1)] / (1 - 4 y^2), seeded by
  Z^(0) = Z and Z^(1) = 4 y Z^3.  The recurrence follows from the defining
  ODE (1 - 4y^2) Z' = 4 y Z; every term is non-negative, so the evaluation
  is cancellation-free and costs O(j).
* ``z_derivative_series`` -- the same quantity via the truncated Taylor sum
  sum_{2n >= j} C(2n,n) * (2n)!/(2n-j)! * y^(2n-j), with a certified
  geometric tail bound.  Kept as an in-repo oracle for the recurrence.
* ``euler_apply``    -- (y d/dy)^n applied to y * Z^(l)(y), evaluated
  termwise ((y d/dy) y^p = p y^p) with the same tail certification.

All public functions compute under ``PrecisionPolicy.mantissa_bits`` of
working precision and return a ``SeriesValue`` carrying the value, its
natural log (usable beyond double range), the certified truncation error
and the number of series terms consumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import NotFinite, OutOfRange, TruncationFailure

__all__ = [
    "PrecisionPolicy",
    "SeriesValue",
    "DEFAULT_POLICY",
    "z_value",
    "z_derivative",
    "z_derivative_series",
    "euler_apply",
]


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision and truncation budget for series evaluation."""

    mantissa_bits: int = 256
    tail_epsilon: float = 1e-30
    max_terms: int = 100_000

    def __post_init__(self):
        if self.mantissa_bits < 64:
            raise OutOfRange(f"mantissa_bits must be >= 64, got {self.mantissa_bits}")
        if not 0 < self.tail_epsilon < 1:
            raise OutOfRange(f"tail_epsilon must lie in (0, 1), got {self.tail_epsilon}")
        if self.max_terms < 1:
            raise OutOfRange(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_POLICY = PrecisionPolicy()


@dataclass(frozen=True)
class SeriesValue:
    """An evaluated series: value, log |value|, certified tail, terms used."""

    value: mpf
    log_value: float
    tail_bound: float
    terms_used: int

    def __float__(self) -> float:
        return float(self.value)


def _log_of(value) -> float:
    if value == 0:
        return float("-inf")
    return float(mp.log(abs(value)))


def _validate_y1(y1) -> None:
    y1f = float(y1)
    if not math.isfinite(y1f):
        raise NotFinite(f"y1 must be finite, got {y1!r}")
    if y1f < 0 or y1f >= 0.5:
        raise OutOfRange(f"y1 must lie in [0, 0.5), got {y1!r}")


def z_value(y1, policy: PrecisionPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Z(y1) = (1 - 4 y1^2)^(-1/2) by the closed form (tail bound 0)."""
    _validate_y1(y1)
    with mp.workprec(policy.mantissa_bits):
        y = mpf(y1)
        value = 1 / mp.sqrt(1 - 4 * y * y)
        return SeriesValue(value, _log_of(value), 0.0, 1)


# Recurrence cache: (mpf key of y1, mantissa bits) -> growing list [Z^(0), Z^(1), ...].
# Purely a memoization of a deterministic computation; bounded FIFO.
_DERIV_CACHE: dict = {}
_DERIV_CACHE_MAX_KEYS = 64


def _z_derivs_upto(j: int, y, bits: int) -> list:
    key = (y._mpf_, bits)
    seq = _DERIV_CACHE.get(key)
    if seq is None:
        if len(_DERIV_CACHE) >= _DERIV_CACHE_MAX_KEYS:
            _DERIV_CACHE.pop(next(iter(_DERIV_CACHE)))
        seq = []
        _DERIV_CACHE[key] = seq
    with mp.workprec(bits):
        d = 1 - 4 * y * y
        if not seq:
            seq.append(1 / mp.sqrt(d))
        if j >= 1 and len(seq) == 1:
            seq.append(4 * y * seq[0] ** 3)
        for i in range(len(seq) - 1, j):
            seq.append((4 * y * (2 * i + 1) * seq[i] + 4 * i * i * seq[i - 1]) / d)
    return seq


def z_derivative(j: int, y1, policy: PrecisionPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Z^(j)(y1) via the cancellation-free ODE recurrence.

    The result is exact up to working-precision rounding (tail bound 0);
    ``log_value`` is always populated so orders j ~ 100 remain reportable
    even when the value exceeds double range.
    """
    if j < 0:
        raise OutOfRange(f"derivative order j must be >= 0, got {j}")
    _validate_y1(y1)
    with mp.workprec(policy.mantissa_bits):
        y = mpf(y1)
        value = _z_derivs_upto(j, y, policy.mantissa_bits)[j]
        return SeriesValue(value, _log_of(value), 0.0, j + 1)


def z_derivative_series(j: int, y1, policy: PrecisionPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Z^(j)(y1) by direct Taylor summation with a certified tail bound.

    Terms run over n >= ceil(j/2); the term ratio

        r(n) = 4 y1^2 (2n+1)^2 / ((2n+2-j)(2n+1-j))

    approaches 4 y1^2 monotonically (from above for j >= 1, from below for
    j = 0), so every later ratio is at most rho = max(r(n), 4 y1^2) and the
    remaining tail is bounded by last_term * rho / (1 - rho).
    """
    if j < 0:
        raise OutOfRange(f"derivative order j must be >= 0, got {j}")
    _validate_y1(y1)
    bits = policy.mantissa_bits
    with mp.workprec(bits):
        y = mpf(y1)
        n0 = (j + 1) // 2
        if y == 0:
            value = mpf(math.comb(j, j // 2) * math.factorial(j)) if j % 2 == 0 else mpf(0)
            return SeriesValue(value, _log_of(value), 0.0, 1)
        y2_4 = 4 * y * y
        term = mpf(math.comb(2 * n0, n0) * math.factorial(2 * n0) // math.factorial(2 * n0 - j))
        term *= y ** (2 * n0 - j)
        total = term
        terms = 1
        n = n0
        while True:
            ratio = y2_4 * ((2 * n + 1) ** 2) / ((2 * n + 2 - j) * (2 * n + 1 - j))
            rho = max(ratio, y2_4)
            if rho < 1:
                bound = term * rho / (1 - rho)
                if bound <= policy.tail_epsilon:
                    return SeriesValue(total, _log_of(total), float(bound), terms)
            if terms >= policy.max_terms:
                raise TruncationFailure(
                    f"Z^({j})({float(y)}) series did not reach tail {policy.tail_epsilon} "
                    f"within {policy.max_terms} terms"
                )
            term *= ratio
            total += term
            terms += 1
            n += 1


def _euler_terms(powers: tuple[int, ...], l: int, y, policy: PrecisionPolicy,
                 rel_stop: bool = False) -> tuple:
    """Evaluate (y d/dy)^n (y Z^(l)(y)) termwise for every n in ``powers``.

    Shares one pass over the Taylor terms: the base term for exponent
    p = 2q - l + 1 is multiplied by p^n (exact integer) for each requested
    n.  With ``rel_stop`` the budget is tail_epsilon * max(1, value), which
    the distribution assembly uses at high l where the values are huge and
    an absolute 1e-30 tail would cost thousands of extra terms.  Returns
    (values, tail bounds, terms used).  Requires y > 0.
    """
    bits = policy.mantissa_bits
    nmax = max(powers)
    with mp.workprec(bits):
        q = (l + 1) // 2
        p = 2 * q - l + 1
        y2_4 = 4 * y * y
        base = mpf(math.comb(2 * q, q) * math.factorial(2 * q) // math.factorial(2 * q - l))
        base *= y ** p
        totals = [base * (p ** n) for n in powers]
        terms = 1
        while True:
            # term ratio including the (p+2)^nmax / p^nmax Euler damping for
            # the largest power; monotone decreasing, so once below one the
            # tail closes geometrically at the current ratio.
            num = (2 * q + 1) ** 2 * (p + 2) ** nmax
            den = (2 * q + 2 - l) * (2 * q + 1 - l) * p ** nmax
            ratio = y2_4 * num / den
            if ratio < 1:
                geo = ratio / (1 - ratio)
                bounds = tuple(float(base * (p ** n) * geo) for n in powers)
                if rel_stop:
                    ok = all(
                        b <= policy.tail_epsilon * max(1.0, float(t))
                        for b, t in zip(bounds, totals))
                else:
                    ok = all(b <= policy.tail_epsilon for b in bounds)
                if ok:
                    return tuple(totals), bounds, terms
            if terms >= policy.max_terms:
                raise TruncationFailure(
                    f"Euler series (n={powers}, l={l}, y1={float(y)}) did not reach "
                    f"tail {policy.tail_epsilon} within {policy.max_terms} terms"
                )
            base *= y2_4 * ((2 * q + 1) ** 2) / ((2 * q + 2 - l) * (2 * q + 1 - l))
            q += 1
            p += 2
            for i, n in enumerate(powers):
                totals[i] += base * (p ** n)
            terms += 1


def euler_apply(n: int, l: int, y1, policy: PrecisionPolicy = DEFAULT_POLICY) -> SeriesValue:
    """(y1 d/dy1)^n applied to y1 * Z^(l)(y1).

    n = 0 reduces exactly to y1 * Z^(l)(y1) and is dispatched to the
    recurrence; n >= 1 is evaluated termwise with a certified tail.
    """
    if n < 0 or l < 0:
        raise OutOfRange(f"Euler power n and derivative order l must be >= 0, got ({n}, {l})")
    _validate_y1(y1)
    if n == 0:
        zd = z_derivative(l, y1, policy)
        with mp.workprec(policy.mantissa_bits):
            value = mpf(y1) * zd.value
        return SeriesValue(value, _log_of(value), zd.tail_bound, zd.terms_used)
    with mp.workprec(policy.mantissa_bits):
        y = mpf(y1)
        if y == 0:
            # every term carries a strictly positive power of y1
            return SeriesValue(mpf(0), float("-inf"), 0.0, 1)
        values, bounds, terms = _euler_terms((n,), l, y, policy)
        return SeriesValue(values[0], _log_of(values[0]), bounds[0], terms)
