"""Full analytic outcome distributions P_l^(k)(y1, B) with certified tails.

The tail certificate never assumes unit normalization (that identity is
what the test suite verifies); it comes from termwise domination of every
Taylor coefficient:

    Z^(j)(y1)              <= 2^j j! / (1-2 y1)^(j+1)
    (y d/dy)^n (y Z^(j))   <= 2^j (j+n)! y1 / (1-2 y1)^(j+n+1)

(coefficientwise, using C(2n,n) <= 4^n and, for the Euler bound,
(y d/dy) [y (1-2y)^q] <= |q| ... applied under y < 1/2).  Substituting the
bounds into the weight/normalization products yields per-outcome envelopes
a_l = phi^l * (polynomial of degree <= 2 in l) with the geometric rate

    phi = 2 y1 B / (1 - 2 y1) < 1   whenever  (1+B) y1 < 1/2,

so the mass above L is at most a_(L+1) / (1 - phi * e^(3/(L+1))) once that
effective ratio is below one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from mpmath import mp, mpf

from .errors import OutOfRange, TruncationFailure, UnsupportedK
from .formats import json_document, rows_to_csv
from .functions import FamilyPoint, norm_g, weight_f
from .params import ReducedScheme
from .series import DEFAULT_POLICY, PrecisionPolicy

__all__ = ["OutcomeDistribution", "outcome_probability", "analytic_distribution"]

_HARD_L_CAP = 4096
_ENVELOPE_POLY_DEGREE = 3  # provable degree is <= 2; one extra for margin


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities over photon counts l = 0..L_max plus certified tail mass.

    ``probs_mp`` holds the extended-precision values; ``probs`` their
    64-bit exports; ``log_probs`` natural logs (finite even when the float
    export underflows).  ``tail_mass`` bounds the probability of any
    outcome above L_max (for oracle-derived distributions it is the
    dropped input mass instead, see ``fock_oracle.mode2_marginal``).
    """

    k: Optional[int]
    rs: Optional[ReducedScheme]
    probs_mp: tuple
    tail_mass: float
    policy: PrecisionPolicy
    source: str = "analytic"

    def __post_init__(self):
        tol = 10 * max(self.policy.tail_epsilon, self.tail_mass)
        total = mp.fsum(self.probs_mp)
        for l, p in enumerate(self.probs_mp):
            if not (-mpf("1e-20") <= p <= 1 + mpf("1e-20")):
                raise OutOfRange(f"probability P_{l} = {float(p)} outside [0, 1]")
        if abs(total + self.tail_mass - 1) > tol:
            raise OutOfRange(
                f"distribution mass {float(total)} + tail {self.tail_mass} "
                f"deviates from 1 beyond tolerance {tol}"
            )

    @property
    def l_max(self) -> int:
        return len(self.probs_mp) - 1

    @property
    def probs(self) -> tuple:
        return tuple(min(1.0, float(p)) for p in self.probs_mp)

    @property
    def log_probs(self) -> tuple:
        return tuple(float(mp.log(p)) if p > 0 else float("-inf") for p in self.probs_mp)

    def total_mass(self) -> float:
        return float(mp.fsum(self.probs_mp) + mpf(self.tail_mass))

    def rows(self) -> list:
        logs = self.log_probs
        return [
            {"l": l, "probability": p, "log_probability": logs[l]}
            for l, p in enumerate(self.probs)
        ]

    def _meta(self, extra: Optional[dict] = None) -> dict:
        meta = {"source": self.source, "k": self.k}
        if self.rs is not None:
            meta.update({"y1": self.rs.y1, "B": self.rs.b})
        meta.update({
            "l_max": self.l_max,
            "tail_mass": self.tail_mass,
            "precision_bits": self.policy.mantissa_bits,
            "tail_epsilon": self.policy.tail_epsilon,
        })
        if extra:
            meta.update(extra)
        return meta

    def to_csv(self, meta: Optional[dict] = None) -> str:
        return rows_to_csv(self.rows(), ["l", "probability", "log_probability"],
                           self._meta(meta))

    def to_json(self, meta: Optional[dict] = None) -> str:
        return json_document(self.rows(), self._meta(meta))


def outcome_probability(k: int, l: int, rs: ReducedScheme,
                        policy: PrecisionPolicy = DEFAULT_POLICY) -> mpf:
    """P_l^(k) = f_l * G_l at (y1, B), with analytic limits at y1 = 0, k = 2.

    At y1 = 0 the k=2 weights for l in {0, 1} are singular but the products
    have finite limits r^4 and 2 r^2 t^2 (plain two-photon splitting); those
    limits are returned directly.
    """
    if k not in (0, 1, 2):
        raise UnsupportedK(f"closed forms exist only for k in {{0, 1, 2}}, got k = {k}")
    if l < 0:
        raise OutOfRange(f"outcome photon number l must be >= 0, got {l}")
    rs = ReducedScheme(rs.y1, rs.b, k)
    with mp.workprec(policy.mantissa_bits):
        if k == 2 and rs.y1 == 0 and l in (0, 1):
            b = mpf(rs.b)
            return (b / (1 + b)) ** 2 if l == 0 else 2 * b / (1 + b) ** 2
        point = FamilyPoint(rs, l, policy)
        return weight_f(point).value * norm_g(point).value


def _envelope(k: int, l: int, y1: mpf, b: mpf, root: mpf) -> mpf:
    """Certified upper bound on P_l^(k) for l >= k + 1 (general-m branches)."""
    one_m = 1 - 2 * y1

    def zb(j):
        return mpf(2) ** j * math.factorial(j) / one_m ** (j + 1)

    def eb(j, n):
        return mpf(2) ** j * math.factorial(j + n) * y1 / one_m ** (j + n + 1)

    if k == 0:
        return root * (2 * y1 * b) ** l / one_m ** (l + 1)
    if k == 1:
        f = root / (1 + b) * (y1 * b) ** (l - 1) * l * l / math.factorial(l)
        g_even = 2 * (eb(l, 0) + (b / l) ** 2 * eb(l, 2))
        g_odd = 2 * (zb(l - 1) + (b / l) ** 2 * eb(l, 1))
        return f * max(g_even, g_odd)
    f = (root / (2 * (1 + b) ** 2) * (y1 * b) ** (l - 2)
         * (l - 1) ** 2 * l * l / math.factorial(l))
    g = 3 * (zb(l - 2) + (2 * b / (l - 1)) ** 2 * eb(l - 1, 1)
             + (b * b / ((l - 1) * l)) ** 2 * eb(l - 1, 3))
    return f * g


def _tail_bound(k: int, rs: ReducedScheme, L: int,
                policy: PrecisionPolicy) -> Optional[mpf]:
    """Certified bound on sum_{l > L} P_l^(k), or None if not certifiable at L."""
    with mp.workprec(policy.mantissa_bits):
        y1 = mpf(rs.y1)
        b = mpf(rs.b)
        if y1 * b == 0:
            # f_l carries (y1 B)^(l-k): every outcome above l = k vanishes
            return mpf(0) if L >= k else None
        root = mp.sqrt(1 - 4 * ((1 + b) * y1) ** 2)
        phi = 2 * y1 * b / (1 - 2 * y1)
        phi_eff = phi * mp.exp(mpf(_ENVELOPE_POLY_DEGREE) / (L + 1))
        if phi_eff >= 1:
            return None
        return _envelope(k, L + 1, y1, b, root) / (1 - phi_eff)


def analytic_distribution(k: int, rs: ReducedScheme,
                          policy: PrecisionPolicy = DEFAULT_POLICY,
                          l_cap: Optional[int] = None) -> OutcomeDistribution:
    """Assemble P_l for l = 0..L_max with a certified tail.

    L_max is ``l_cap`` when given; otherwise it doubles from 8 until the
    tail certificate drops below ``policy.tail_epsilon`` (hard cap 4096).

    Raises TruncationFailure when the requested cap leaves the tail
    uncertifiable, or when the adaptive search hits the hard cap.
    """
    if k not in (0, 1, 2):
        raise UnsupportedK(f"closed forms exist only for k in {{0, 1, 2}}, got k = {k}")
    rs = ReducedScheme(rs.y1, rs.b, k)
    if l_cap is not None:
        if l_cap < k:
            raise TruncationFailure(
                f"l_cap = {l_cap} cannot certify a tail below the input photon number {k}"
            )
        L = l_cap
        tail = _tail_bound(k, rs, L, policy)
        if tail is None or tail >= 1:
            raise TruncationFailure(
                f"tail above l_cap = {l_cap} is not certifiable at (y1={rs.y1}, B={rs.b})"
            )
    else:
        L = 8
        while True:
            tail = _tail_bound(k, rs, L, policy)
            if tail is not None and tail <= policy.tail_epsilon:
                break
            if L >= _HARD_L_CAP:
                raise TruncationFailure(
                    f"adaptive L_max exceeded the hard cap {_HARD_L_CAP} "
                    f"at (y1={rs.y1}, B={rs.b})"
                )
            L *= 2
    probs = tuple(outcome_probability(k, l, rs, policy) for l in range(L + 1))
    return OutcomeDistribution(k=k, rs=rs, probs_mp=probs, tail_mass=float(tail),
                               policy=policy, source="analytic")
