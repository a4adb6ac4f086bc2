"""Brute-force two-mode Fock-space oracle.

Builds |SMSV> (x) |k> in a truncated basis, applies the beam splitter

    a1+ -> t a1+ - r a2+,      a2+ -> r a1+ + t a2+

exactly within each total-photon sector (the transformation never mixes
sectors), and extracts measured-mode marginals and heralded conditional
states.  Every closed form in the package is validated against this path.

The input photon number k is arbitrary here; only the closed forms are
limited to k <= 2.

An exact-rational mode is provided for regression fixtures: with rational
y and a Pythagorean splitter (t, r both rational, t^2 + r^2 = 1) the
quantities q_l = P_l * k! * cosh(s) are exact fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from mpmath import mp, mpf

from .distribution import OutcomeDistribution
from .errors import (
    IncompatibleTruncation,
    OutOfRange,
    TruncationTooSmall,
    UnsupportedK,
    ZeroProbabilityOutcome,
)
from .formats import json_document, rows_to_csv
from .functions import FamilyPoint, _norm_g_raw
from .params import ReducedScheme, SplitterSpec, SqueezeSpec
from .series import DEFAULT_POLICY, PrecisionPolicy, _z_derivs_upto

__all__ = [
    "TwoModeState",
    "HeraldedState",
    "build_two_mode_input",
    "apply_beam_splitter",
    "mode2_marginal",
    "oracle_state",
    "oracle_distribution",
    "heralded_state",
    "analytic_heralded_state",
    "fidelity",
    "exact_input",
    "exact_beam_splitter",
    "exact_marginal",
]

DEFAULT_N_MAX = 60
INPUT_TAIL_GATE = 1e-10


@dataclass(frozen=True)
class TwoModeState:
    """Truncated two-mode Fock state with real extended-precision amplitudes.

    ``amps`` maps (n1, n2) with n1 + n2 <= n_max to the amplitude; absent
    keys are exact zeros.  ``dropped_mass`` is the norm deficit of the
    truncated input (propagated unchanged by the unitary splitter).
    """

    n_max: int
    amps: dict
    dropped_mass: mpf
    policy: PrecisionPolicy = DEFAULT_POLICY
    k: Optional[int] = None
    input_y: Optional[float] = None
    rs: Optional[ReducedScheme] = None

    def norm_sq(self) -> mpf:
        with mp.workprec(self.policy.mantissa_bits):
            return mp.fsum(a * a for a in self.amps.values())

    def rows(self) -> list:
        return [
            {"n1": n1, "n2": n2, "amplitude": float(a)}
            for (n1, n2), a in sorted(self.amps.items())
        ]

    def _meta(self) -> dict:
        return {
            "n_max": self.n_max,
            "dropped_mass": float(self.dropped_mass),
            "precision_bits": self.policy.mantissa_bits,
        }

    def to_csv(self) -> str:
        return rows_to_csv(self.rows(), ["n1", "n2", "amplitude"], self._meta())

    def to_json(self) -> str:
        return json_document(self.rows(), self._meta())


@dataclass(frozen=True)
class HeraldedState:
    """Normalized mode-1 state conditioned on measuring l photons in mode 2."""

    l: int
    amps: dict  # n1 -> amplitude
    parity: Optional[str]  # "even" | "odd" | None when indefinite
    source: str  # "oracle" | "analytic"
    n_max: int
    policy: PrecisionPolicy = DEFAULT_POLICY

    def norm_sq(self) -> mpf:
        with mp.workprec(self.policy.mantissa_bits):
            return mp.fsum(a * a for a in self.amps.values())


def _support_parity(amps: dict) -> Optional[str]:
    parities = {n % 2 for n, a in amps.items() if a != 0}
    if parities == {0}:
        return "even"
    if parities == {1}:
        return "odd"
    return None


def _fix_phase(amps: dict) -> dict:
    """Make the lowest nonzero Fock amplitude positive (global phase pick)."""
    for n in sorted(amps):
        if amps[n] != 0:
            if amps[n] < 0:
                return {m: -a for m, a in amps.items()}
            break
    return amps


def _build_input_from_y(y, k: int, n_max: int, policy: PrecisionPolicy,
                        max_dropped: float) -> TwoModeState:
    if k < 0 or k > n_max:
        raise OutOfRange(f"need 0 <= k <= n_max, got k = {k}, n_max = {n_max}")
    bits = policy.mantissa_bits
    with mp.workprec(bits):
        y = mpf(y)
        cosh_s = 1 / mp.sqrt(1 - 4 * y * y)
        amps = {}
        kept = mpf(0)
        for n in range(0, (n_max - k) // 2 + 1):
            a = y ** n * mp.sqrt(mpf(math.factorial(2 * n))) / math.factorial(n)
            a /= mp.sqrt(cosh_s)
            amps[(2 * n, k)] = a
            kept += a * a
        dropped = 1 - kept
        if dropped > max_dropped:
            raise TruncationTooSmall(
                f"SMSV tail beyond n_max = {n_max} holds {float(dropped):.3e} "
                f"of the input mass (> {max_dropped:.1e}); increase n_max"
            )
        return TwoModeState(n_max=n_max, amps=amps, dropped_mass=dropped,
                            policy=policy, k=k, input_y=float(y))


def build_two_mode_input(sq: SqueezeSpec, k: int, n_max: int = DEFAULT_N_MAX,
                         policy: PrecisionPolicy = DEFAULT_POLICY,
                         max_dropped: float = INPUT_TAIL_GATE) -> TwoModeState:
    """|SMSV(y)>_1 (x) |k>_2 truncated to total photon number n_max.

    The SMSV amplitude on |2n> is y^n sqrt((2n)!) / (n! sqrt(cosh s));
    ``dropped_mass`` is the exact tail of the squared-amplitude series.

    Raises TruncationTooSmall when dropped_mass exceeds ``max_dropped``.
    """
    return _build_input_from_y(sq.y, k, n_max, policy, max_dropped)


def minimal_n_max(sq: SqueezeSpec, k: int, max_dropped: float,
                  policy: PrecisionPolicy = DEFAULT_POLICY,
                  floor: int = DEFAULT_N_MAX) -> int:
    """Smallest even-aligned n_max whose input tail is below ``max_dropped``."""
    with mp.workprec(policy.mantissa_bits):
        y = mpf(sq.y)
        if y == 0:
            return max(floor, k)
        target = (1 - mpf(max_dropped)) / mp.sqrt(1 - 4 * y * y)  # kept sum of C(2n,n) y^(2n)
        total = mpf(1)
        term = mpf(1)
        n = 0
        while total < target:
            ratio = 4 * y * y * (2 * n + 1) / (2 * n + 2)
            term *= ratio
            total += term
            n += 1
        return max(floor, 2 * n + k)


def apply_beam_splitter(st: TwoModeState, bs: SplitterSpec) -> TwoModeState:
    """Exact unitary image of the state under the beam splitter.

    Works sector by sector: the image of |n1, n2> on |p, q> (p + q = n1 + n2)
    is the binomial convolution of (t a1+ - r a2+)^n1 (r a1+ + t a2+)^n2
    with factorial normalization.  The transmittance amplitude t is taken
    as truth and r recomputed as sqrt(1 - t^2) at working precision, so the
    pair is exactly unitary and total norm is preserved to working
    precision; ``dropped_mass`` carries over unchanged.
    """
    return _apply_bs_exact(st, mpf(bs.t), bsp_hint=bs.bsp)


def _apply_bs_exact(st: TwoModeState, t_mp, bsp_hint: Optional[float] = None) -> TwoModeState:
    bits = st.policy.mantissa_bits
    with mp.workprec(bits):
        t = mpf(t_mp)
        if not 0 < t <= 1:
            raise OutOfRange(f"transmittance amplitude t must lie in (0, 1], got {float(t)}")
        r = mp.sqrt(1 - t * t)
        tp = [mpf(1)]
        rp = [mpf(1)]
        for _ in range(st.n_max + 1):
            tp.append(tp[-1] * t)
            rp.append(rp[-1] * r)
        sqf = [mp.sqrt(mpf(math.factorial(i))) for i in range(st.n_max + 1)]
        out: dict = {}
        for (n1, n2), a in st.amps.items():
            if a == 0:
                continue
            norm_in = sqf[n1] * sqf[n2]
            big = n1 + n2
            for p in range(big + 1):
                q = big - p
                acc = mpf(0)
                for i in range(max(0, p - n2), min(n1, p) + 1):
                    j = p - i
                    term = (math.comb(n1, i) * math.comb(n2, j)) * tp[i + n2 - j] * rp[n1 - i + j]
                    acc += -term if (n1 - i) % 2 else term
                if acc == 0:
                    continue
                contrib = a * acc * sqf[p] * sqf[q] / norm_in
                key = (p, q)
                prev = out.get(key)
                out[key] = contrib if prev is None else prev + contrib
        rs = None
        if st.k is not None and st.input_y is not None:
            bsp = bsp_hint if bsp_hint is not None else float((1 - t * t) / (t * t))
            rs = ReducedScheme(float(t * t * st.input_y), bsp, st.k)
        return TwoModeState(n_max=st.n_max, amps=out, dropped_mass=st.dropped_mass,
                            policy=st.policy, k=st.k, input_y=st.input_y, rs=rs)


def mode2_marginal(st: TwoModeState) -> OutcomeDistribution:
    """P_l = sum_n1 |amp(n1, l)|^2 for l = 0..n_max.

    The reported ``tail_mass`` equals the dropped input mass: every kept
    sector is represented exactly, so the only unaccounted probability is
    whatever the input truncation removed.
    """
    bits = st.policy.mantissa_bits
    with mp.workprec(bits):
        probs = [mpf(0)] * (st.n_max + 1)
        for (n1, n2), a in st.amps.items():
            probs[n2] += a * a
        return OutcomeDistribution(k=st.k, rs=st.rs, probs_mp=tuple(probs),
                                   tail_mass=float(st.dropped_mass), policy=st.policy,
                                   source="oracle")


def oracle_state(rs: ReducedScheme, n_max: int = DEFAULT_N_MAX,
                 policy: PrecisionPolicy = DEFAULT_POLICY,
                 max_dropped: float = INPUT_TAIL_GATE) -> TwoModeState:
    """Post-splitter state for a reduced point, derived at working precision.

    The input parameters y = (1+B) y1 and t = sqrt(1/(1+B)) are formed in
    extended precision directly from (y1, B), so the oracle evaluates
    exactly the same point as the closed forms (no double-rounding skew).
    """
    bits = policy.mantissa_bits
    with mp.workprec(bits):
        y1 = mpf(rs.y1)
        b = mpf(rs.b)
        st = _build_input_from_y((1 + b) * y1, rs.k, n_max, policy, max_dropped)
        st = _apply_bs_exact(st, mp.sqrt(1 / (1 + b)), bsp_hint=rs.b)
        # pin the reported reduced point to the requested one exactly
        return TwoModeState(n_max=st.n_max, amps=st.amps, dropped_mass=st.dropped_mass,
                            policy=st.policy, k=st.k, input_y=st.input_y, rs=rs)


def oracle_distribution(rs: ReducedScheme, n_max: int = DEFAULT_N_MAX,
                        policy: PrecisionPolicy = DEFAULT_POLICY,
                        max_dropped: float = INPUT_TAIL_GATE) -> OutcomeDistribution:
    """Brute-force marginal for a reduced point (build + split + marginal)."""
    return mode2_marginal(oracle_state(rs, n_max, policy, max_dropped))


def heralded_state(st: TwoModeState, l: int) -> HeraldedState:
    """Normalized mode-1 state conditioned on outcome l, phase-fixed."""
    if not 0 <= l <= st.n_max:
        raise OutOfRange(f"outcome l must lie in [0, n_max], got {l}")
    bits = st.policy.mantissa_bits
    with mp.workprec(bits):
        amps = {n1: a for (n1, n2), a in st.amps.items() if n2 == l and a != 0}
        prob = mp.fsum(a * a for a in amps.values())
        if prob == 0:
            raise ZeroProbabilityOutcome(f"outcome l = {l} has zero probability")
        scale = 1 / mp.sqrt(prob)
        amps = _fix_phase({n: a * scale for n, a in amps.items()})
        return HeraldedState(l=l, amps=amps, parity=_support_parity(amps),
                             source="oracle", n_max=st.n_max, policy=st.policy)


def analytic_heralded_state(k: int, l: int, rs: ReducedScheme, n_max: int = DEFAULT_N_MAX,
                            policy: PrecisionPolicy = DEFAULT_POLICY) -> HeraldedState:
    """Closed-form heralded state, normalized with the norm_g value.

    Fock support has parity (k + l) mod 2.  The structure factors are:

        k=0, even l=2m :  y1^n / sqrt((2n)!)   * (2(n+m))!/(n+m)!
        k=0, odd  l=2m+1: sqrt(y1) y1^n / sqrt((2n+1)!) * (2(n+m+1))!/(n+m+1)!
        k=1, l=0:         y1^n sqrt((2n+1)!) / n!
        k=1, even l=2m :  ... * (1 - B (2n+1) / (2m))
        k=1, odd  l=2m+1: ... * (1 - 2 B n / (2m+1))
        k=2, l=0:         2 n y1^n sqrt((2n)!) / n!
        k=2, l=1:         ... (2n+1) (1 - B n)
        k=2, even l=2m :  ... (1 - 4Bn/(2m-1) + B^2 n(2n-1)/(m(2m-1)))
        k=2, odd  l=2m+1: ... (1 - B(2n+1)/m + B^2 n(2n+1)/(m(2m+1)))

    all divided by sqrt(G) (times sqrt(y1) bookkeeping for odd-support
    states), with G = norm_g except for (k=2, l=0) where the state
    normalization is norm_g / 4.
    """
    if k not in (0, 1, 2):
        raise UnsupportedK(f"closed-form heralded states exist only for k <= 2, got {k}")
    if l < 0:
        raise OutOfRange(f"outcome l must be >= 0, got {l}")
    rs = ReducedScheme(rs.y1, rs.b, k)
    bits = policy.mantissa_bits
    with mp.workprec(bits):
        y1 = mpf(rs.y1)
        b = mpf(rs.b)
        g, _ = _norm_g_raw(FamilyPoint(rs, l, policy))
        if g <= 0:
            raise ZeroProbabilityOutcome(
                f"heralded state (k={k}, l={l}) has zero normalization at "
                f"(y1={rs.y1}, B={rs.b})"
            )
        amps = {}
        odd_support = (k + l) % 2 == 1
        if odd_support:
            ns = range(0, (n_max - 1) // 2 + 1)
        else:
            ns = range(0, n_max // 2 + 1)
        for n in ns:
            if k == 0:
                if l % 2 == 0:
                    m = l // 2
                    c = (y1 ** n / mp.sqrt(mpf(math.factorial(2 * n)))
                         * math.factorial(2 * (n + m)) / math.factorial(n + m))
                else:
                    m = (l - 1) // 2
                    c = (mp.sqrt(y1) * y1 ** n / mp.sqrt(mpf(math.factorial(2 * n + 1)))
                         * math.factorial(2 * (n + m + 1)) / math.factorial(n + m + 1))
            elif k == 1:
                if l == 0:
                    c = y1 ** n * mp.sqrt(mpf(math.factorial(2 * n + 1))) / math.factorial(n)
                elif l % 2 == 0:
                    c = (mp.sqrt(y1) * y1 ** n / mp.sqrt(mpf(math.factorial(2 * n + 1)))
                         * math.factorial(2 * (n + l // 2)) / math.factorial(n + l // 2)
                         * (1 - b * (2 * n + 1) / l))
                else:
                    m = (l - 1) // 2
                    c = (y1 ** n / mp.sqrt(mpf(math.factorial(2 * n)))
                         * math.factorial(2 * (n + m)) / math.factorial(n + m)
                         * (1 - b * 2 * n / l))
            else:
                if l == 0:
                    c = (2 * n * y1 ** n * mp.sqrt(mpf(math.factorial(2 * n)))
                         / math.factorial(n))
                elif l == 1:
                    c = (mp.sqrt(y1) * y1 ** n / mp.sqrt(mpf(math.factorial(2 * n + 1)))
                         * math.factorial(2 * n) / math.factorial(n)
                         * (2 * n + 1) * (1 - b * n))
                elif l % 2 == 0:
                    m = l // 2
                    c = (y1 ** n / mp.sqrt(mpf(math.factorial(2 * n)))
                         * math.factorial(2 * (n + m - 1)) / math.factorial(n + m - 1)
                         * (1 - 4 * b * n / (2 * m - 1)
                            + b * b * n * (2 * n - 1) / (m * (2 * m - 1))))
                else:
                    m = (l - 1) // 2
                    c = (mp.sqrt(y1) * y1 ** n / mp.sqrt(mpf(math.factorial(2 * n + 1)))
                         * math.factorial(2 * (n + m)) / math.factorial(n + m)
                         * (1 - b * (2 * n + 1) / m
                            + b * b * n * (2 * n + 1) / (m * (2 * m + 1))))
            if c != 0:
                amps[2 * n + 1 if odd_support else 2 * n] = c
        if not amps:
            raise ZeroProbabilityOutcome(
                f"heralded state (k={k}, l={l}) vanishes at (y1={rs.y1}, B={rs.b})"
            )
        scale = 1 / mp.sqrt(g if not (k == 2 and l == 0) else g / 4)
        amps = _fix_phase({n: a * scale for n, a in amps.items()})
        return HeraldedState(l=l, amps=amps, parity=_support_parity(amps),
                             source="analytic", n_max=n_max, policy=policy)


def fidelity(a: HeraldedState, b: HeraldedState) -> float:
    """|<a|b>|^2.  States on the shorter truncation embed with zero padding.

    Raises IncompatibleTruncation for empty states (no common basis can be
    chosen); finite amplitude maps are always embeddable.
    """
    if not a.amps or not b.amps:
        raise IncompatibleTruncation("cannot embed an empty state")
    bits = max(a.policy.mantissa_bits, b.policy.mantissa_bits)
    with mp.workprec(bits):
        overlap = mp.fsum(amp * b.amps[n] for n, amp in a.amps.items() if n in b.amps)
        return float(min(mpf(1), overlap * overlap))


# ---------------------------------------------------------------------------
# Exact-rational mode.
#
# States are carried as polynomial coefficients d(n1, n2) in the creation
# operators, state = g * sum d(n1,n2) a1+^n1 a2+^n2 |00>, with the single
# irrational global factor g = 1/sqrt(cosh s * k!) kept symbolic.  With y,
# t, r all rational the d coefficients stay in Q and the scaled
# probabilities q_l = P_l * k! * cosh s are exact fractions.
# ---------------------------------------------------------------------------


def exact_input(y: Fraction, k: int, n_max: int) -> dict:
    """d-coefficients of the truncated SMSV (x) |k> (n_max <= 20 intended)."""
    y = Fraction(y)
    if not 0 <= y < Fraction(1, 2):
        raise OutOfRange(f"y must lie in [0, 1/2), got {y}")
    if k < 0 or k > n_max:
        raise OutOfRange(f"need 0 <= k <= n_max, got k = {k}")
    d = {}
    for n in range(0, (n_max - k) // 2 + 1):
        d[(2 * n, k)] = y ** n / math.factorial(n)
    return d


def exact_beam_splitter(d: dict, t: Fraction, r: Fraction) -> dict:
    """Substitute a1+ -> t a1+ - r a2+, a2+ -> r a1+ + t a2+ over Q."""
    t = Fraction(t)
    r = Fraction(r)
    if t * t + r * r != 1:
        raise OutOfRange(f"exact mode needs a Pythagorean pair, got t={t}, r={r}")
    out: dict = {}
    for (n1, n2), c in d.items():
        for i in range(n1 + 1):
            ci = c * math.comb(n1, i) * t ** i * (-r) ** (n1 - i)
            for j in range(n2 + 1):
                cij = ci * math.comb(n2, j) * r ** j * t ** (n2 - j)
                key = (i + j, n1 - i + n2 - j)
                out[key] = out.get(key, Fraction(0)) + cij
    return {key: c for key, c in out.items() if c != 0}


def exact_marginal(d: dict, n_max: int) -> list:
    """q_l = P_l * k! * cosh(s) as exact fractions, l = 0..n_max."""
    q = [Fraction(0)] * (n_max + 1)
    for (n1, n2), c in d.items():
        q[n2] += c * c * math.factorial(n1) * math.factorial(n2)
    return q
