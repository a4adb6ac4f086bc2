"""Shot sampling and function recovery: the measurement-emulation layer.

``sample_outcomes`` draws photon-count shots from an outcome distribution by
inverse CDF; ``estimate_functions`` divides the empirical frequencies by the
precomputed weights f_l to recover the polynomial differential functions,
with binomial standard errors.

Determinism contract: shots are partitioned into fixed-size chunks by index
and each chunk uses a Philox stream keyed by (seed, chunk index), so counts
are a pure function of (distribution, shots, seed) regardless of how chunks
would be scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from mpmath import mp, mpf

from .distribution import OutcomeDistribution, analytic_distribution
from .errors import OutOfRange
from .functions import FamilyPoint, norm_g, weight_f
from .params import ReducedScheme
from .series import DEFAULT_POLICY, PrecisionPolicy

__all__ = [
    "EmpiricalCounts",
    "FunctionEstimate",
    "GENERATOR_ID",
    "sample_outcomes",
    "estimate_functions",
    "estimate_exact",
    "sweep",
]

GENERATOR_ID = "philox4x64 keyed (seed, partition); inverse CDF on float64 probabilities"
_PARTITION_SHOTS = 1 << 20
_MIN_RELIABLE_COUNT = 25


@dataclass(frozen=True)
class EmpiricalCounts:
    """Outcome counts from seeded sampling; the overflow bucket collects
    draws that landed in the certified tail beyond l_max."""

    counts: dict
    shots: int
    seed: int
    source: str
    l_max: int
    overflow: int = 0


@dataclass(frozen=True)
class FunctionEstimate:
    """A recovered function value with its statistical uncertainty.

    ``estimate``/``exact`` are 64-bit exports and may overflow to inf in
    the steep regime; ``log_estimate``/``log_exact`` stay finite there.
    ``reliable`` is False when the observed count is below the normal-
    approximation floor or the weight underflows the output precision.
    """

    k: int
    l: int
    target_name: str
    estimate: float
    std_error: float
    log_estimate: Optional[float]
    reliable: bool
    exact: Optional[float] = None
    log_exact: Optional[float] = None


def _target_name(k: int, l: int) -> str:
    if k == 0:
        return f"Z^({l})"
    if k == 1 and l == 0:
        return "Z^3"
    if k == 2 and l == 0:
        return "(y1 d/dy1)(y1 Z^(1))"
    return f"G_{l}^({k})"


def sample_outcomes(dist: OutcomeDistribution, shots: int, seed: int) -> EmpiricalCounts:
    """Draw ``shots`` outcomes by inverse CDF over the distribution.

    Uniforms falling into the tail mass beyond l_max land in the overflow
    bucket, which is excluded from estimation and reported separately.
    """
    if shots < 1:
        raise OutOfRange(f"shots must be >= 1, got {shots}")
    probs = np.asarray(dist.probs, dtype=np.float64)
    cdf = np.cumsum(probs)
    l_max = dist.l_max
    total = np.zeros(l_max + 2, dtype=np.int64)
    n_parts = (shots + _PARTITION_SHOTS - 1) // _PARTITION_SHOTS
    for part in range(n_parts):
        part_shots = min(_PARTITION_SHOTS, shots - part * _PARTITION_SHOTS)
        key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(part)],
                       dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        u = rng.random(part_shots)
        idx = np.searchsorted(cdf, u, side="right")
        total += np.bincount(idx, minlength=l_max + 2)
    counts = {l: int(total[l]) for l in range(l_max + 1)}
    return EmpiricalCounts(counts=counts, shots=shots, seed=seed, source=dist.source,
                           l_max=l_max, overflow=int(total[l_max + 1]))


def _single_estimate(k: int, l: int, freq, count: int, shots: int, rs: ReducedScheme,
                     policy: PrecisionPolicy, exact: bool) -> FunctionEstimate:
    with mp.workprec(policy.mantissa_bits):
        point = FamilyPoint(rs, l, policy)
        f = weight_f(point).value
        exact_v = exact_log = None
        if exact:
            g = norm_g(point).value
            exact_v = float(g)
            exact_log = float(mp.log(g)) if g > 0 else None
        if f == 0 or count == 0:
            return FunctionEstimate(
                k=k, l=l, target_name=_target_name(k, l), estimate=0.0, std_error=0.0,
                log_estimate=None, reliable=False, exact=exact_v, log_exact=exact_log)
        freq = mpf(freq)
        est = freq / f
        se = mp.sqrt(freq * (1 - freq) / shots) / f
        reliable = count >= _MIN_RELIABLE_COUNT and float(f) != 0.0
        return FunctionEstimate(
            k=k, l=l, target_name=_target_name(k, l), estimate=float(est),
            std_error=float(se), log_estimate=float(mp.log(est)), reliable=reliable,
            exact=exact_v, log_exact=exact_log)


def estimate_functions(emp: EmpiricalCounts, rs: ReducedScheme, k: int,
                       policy: PrecisionPolicy = DEFAULT_POLICY,
                       exact: bool = True) -> list:
    """Convert empirical frequencies into function estimates, one per outcome.

    estimate = (counts[l]/shots) / f_l, with the binomial standard error of
    the frequency propagated through the same weight.  The ``exact`` flag
    fills in the analytically computed target for comparison.
    """
    if k != rs.k:
        rs = ReducedScheme(rs.y1, rs.b, k)
    out = []
    for l in sorted(emp.counts):
        count = emp.counts[l]
        out.append(_single_estimate(k, l, mpf(count) / emp.shots, count, emp.shots,
                                    rs, policy, exact))
    return out


def estimate_exact(dist: OutcomeDistribution,
                   policy: PrecisionPolicy = DEFAULT_POLICY) -> list:
    """Infinite-shot mode: frequencies replaced by the exact probabilities.

    Recovers the norm_g values identically (up to working precision); used
    as the estimator's self-check.
    """
    rs, k = dist.rs, dist.k
    out = []
    for l, p in enumerate(dist.probs_mp):
        est = _single_estimate(k, l, p, 1 if p > 0 else 0, 1, rs, policy, exact=True)
        out.append(FunctionEstimate(
            k=k, l=l, target_name=est.target_name, estimate=est.estimate,
            std_error=0.0, log_estimate=est.log_estimate, reliable=p > 0,
            exact=est.exact, log_exact=est.log_exact))
    return out


def sweep(k: int, b: float, y1_grid: list, l_list: list, mode: str = "exact",
          policy: PrecisionPolicy = DEFAULT_POLICY, shots: Optional[int] = None,
          seed: Optional[int] = None) -> list:
    """Tabulate targets (or sampled estimates) over a y1 grid at fixed B.

    Returns rows of dicts with keys (y1, l, value, std_error, log_value,
    reliable).  ``mode`` is "exact" (closed-form norm_g values, the steep
    high-derivative curves) or "sampled" (shots and seed required; each grid
    point is sampled with the same seed).
    """
    if mode not in ("exact", "sampled"):
        raise OutOfRange(f"sweep mode must be 'exact' or 'sampled', got {mode!r}")
    if mode == "sampled" and (shots is None or seed is None):
        raise OutOfRange("sampled mode requires shots and seed")
    for y1 in y1_grid:
        if not (0 <= y1 and (1 + b) * y1 < 0.5):
            raise OutOfRange(f"grid point y1 = {y1} outside [0, 0.5/(1+B))")
    rows = []
    for y1 in y1_grid:
        rs = ReducedScheme(y1, b, k)
        if mode == "exact":
            for l in l_list:
                g = norm_g(FamilyPoint(rs, l, policy))
                rows.append({
                    "y1": y1, "l": l, "value": float(g.value), "std_error": 0.0,
                    "log_value": g.log_value, "reliable": True,
                })
        else:
            dist = analytic_distribution(k, rs, policy, l_cap=None)
            if dist.l_max < max(l_list):
                dist = analytic_distribution(k, rs, policy, l_cap=max(l_list))
            emp = sample_outcomes(dist, shots, seed)
            by_l = {e.l: e for e in estimate_functions(emp, rs, k, policy, exact=False)}
            for l in l_list:
                e = by_l.get(l)
                if e is None:
                    e = _single_estimate(k, l, mpf(0), 0, shots, rs, policy, False)
                rows.append({
                    "y1": y1, "l": l, "value": e.estimate, "std_error": e.std_error,
                    "log_value": e.log_estimate if e.log_estimate is not None
                    else float("-inf"),
                    "reliable": e.reliable,
                })
    return rows
