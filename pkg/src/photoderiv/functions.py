"""Closed-form weight functions f, normalization factors G and amplitudes C.

For input photon number k in {0, 1, 2} and outcome photon number l, the
measured-mode probabilities factorize as P_l = f_l * G_l, where the weight
f_l depends only on (y1, B) and elementary factors, and G_l is the
"polynomial differential function": a combination of Z derivatives and
Euler-operator terms (y1 d/dy1)^n (y1 Z^(j)(y1)).

``norm_g`` returns the quantity the statistical estimator recovers (the
right-hand side of the inversion identities); heralded-state normalization
constants that differ from it by fixed factors (such as the 1/4 attached
to the k=2, l=0 state) are derived from it where needed.

Branch map for G (m >= 1 throughout):

    k=0:  G_l = Z^(l)
    k=1:  G_0 = Z^3
          G_2m   = Z^(2m-1) - (B/m) E0 + (B/2m)^2 E1,          E_j on y1 Z^(2m)
          G_2m+1 = Z^(2m)  - (2B/(2m+1)) E0 + (B/(2m+1))^2 E1, E_j on y1 Z^(2m+1)
    k=2:  G_0 = (y1 d/dy1)(y1 Z^(1))
          G_1 = (1+B+B^2/4) E1 - B(1+B/2) E2 + (B/2)^2 E3,     E_j on y1 Z^(0)
          G_2m, G_2m+1: four-term combinations on y1 Z^(l-1) with the
          B-dependent coefficients below, plus Z^(l-2).

The l in {0, 1} cases are dispatched explicitly because several general-m
coefficients carry 1/m factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import OutOfRange, SingularPoint, UnsupportedK
from .params import ReducedScheme
from .series import DEFAULT_POLICY, PrecisionPolicy, _euler_terms, _log_of, _z_derivs_upto

__all__ = ["FamilyPoint", "FamilyValue", "weight_f", "norm_g", "amplitude_c"]


@dataclass(frozen=True)
class FamilyPoint:
    """Evaluation point for one outcome: reduced scheme, outcome l, precision."""

    rs: ReducedScheme
    l: int
    policy: PrecisionPolicy = DEFAULT_POLICY

    def __post_init__(self):
        if self.l < 0:
            raise OutOfRange(f"outcome photon number l must be >= 0, got {self.l}")


@dataclass(frozen=True)
class FamilyValue:
    """A weight / normalization / amplitude value with log-domain companion.

    ``value`` is the magnitude (all three families are non-negative by
    construction; amplitudes carry their phase in ``sign``).
    """

    value: mpf
    log_value: float
    kind: str  # weight_f | norm_g | amplitude_c
    sign: int = 1
    tail_bound: float = 0.0

    def __float__(self) -> float:
        return float(self.value)


def _require_supported_k(k: int) -> None:
    if k not in (0, 1, 2):
        raise UnsupportedK(f"closed forms exist only for k in {{0, 1, 2}}, got k = {k}")


def _sqrt_1m4y2(rs: ReducedScheme):
    """sqrt(1 - 4 y^2) = 1/cosh(s) at the reconstructed y = (1+B) y1."""
    y = mpf(rs.y1) * (1 + mpf(rs.b))
    return mp.sqrt(1 - 4 * y * y)


def weight_f(p: FamilyPoint) -> FamilyValue:
    """The precomputable weight f_l^(k)(y1, B) with P_l = f_l * G_l.

    Raises SingularPoint for k=2 at y1=0 with l in {0, 1}: those weights
    carry 1/y1^2 and 1/y1 factors (the probabilities themselves stay finite
    through the matching zeros of G; the distribution module returns the
    analytic limits).
    """
    k, l = p.rs.k, p.l
    _require_supported_k(k)
    bits = p.policy.mantissa_bits
    with mp.workprec(bits):
        y1 = mpf(p.rs.y1)
        b = mpf(p.rs.b)
        root = _sqrt_1m4y2(p.rs)
        if k == 0:
            value = root * (y1 * b) ** l / math.factorial(l)
        elif k == 1:
            if l == 0:
                value = root * b / (1 + b)
            else:
                value = root / (1 + b) * (y1 * b) ** (l - 1) * l * l / math.factorial(l)
        else:
            if l == 0:
                if y1 == 0:
                    raise SingularPoint("f_0^(2) has a 1/y1^2 factor; undefined at y1 = 0")
                value = root / 2 * (b / (2 * y1 * (1 + b))) ** 2
            elif l == 1:
                if y1 == 0:
                    raise SingularPoint("f_1^(2) has a 1/y1 factor; undefined at y1 = 0")
                value = root * 2 * b / (y1 * (1 + b) ** 2)
            else:
                value = (root / (2 * (1 + b) ** 2) * (y1 * b) ** (l - 2)
                         * (l - 1) ** 2 * l * l / math.factorial(l))
        return FamilyValue(value, _log_of(value), "weight_f")


def _euler_set(powers: tuple[int, ...], l: int, y1, policy: PrecisionPolicy):
    """Euler terms (y d/dy)^n (y Z^(l)) for several n, sharing one term pass.

    Tails are certified relative to the values (see ``_euler_terms``): the
    weights multiplying these G components shrink as fast as the values
    grow, so a relative budget is the meaningful one for probabilities.
    """
    with mp.workprec(policy.mantissa_bits):
        y = mpf(y1)
        out = {}
        tails = {}
        if 0 in powers:
            zd = _z_derivs_upto(l, y, policy.mantissa_bits)[l]
            out[0] = y * zd
            tails[0] = 0.0
        rest = tuple(n for n in powers if n != 0)
        if rest:
            if y == 0:
                for n in rest:
                    out[n] = mpf(0)
                    tails[n] = 0.0
            else:
                values, bounds, _ = _euler_terms(rest, l, y, policy, rel_stop=True)
                for n, v, t in zip(rest, values, bounds):
                    out[n] = v
                    tails[n] = t
        return out, tails


def _norm_g_raw(p: FamilyPoint):
    """(value, tail) of G_l^(k); shared by norm_g and amplitude_c."""
    k, l = p.rs.k, p.l
    bits = p.policy.mantissa_bits
    with mp.workprec(bits):
        y1 = mpf(p.rs.y1)
        b = mpf(p.rs.b)
        if k == 0:
            value = _z_derivs_upto(l, y1, bits)[l]
            return value, 0.0
        if k == 1:
            if l == 0:
                z = _z_derivs_upto(0, y1, bits)[0]
                return z ** 3, 0.0
            e, tails = _euler_set((0, 1), l, y1, p.policy)
            zlow = _z_derivs_upto(l - 1, y1, bits)[l - 1]
            if l % 2 == 0:
                m = l // 2
                value = zlow - (b / m) * e[0] + (b / l) ** 2 * e[1]
            else:
                value = zlow - (2 * b / l) * e[0] + (b / l) ** 2 * e[1]
            tail = float(abs(b / l) * 2 * tails[0] + (b / l) ** 2 * tails[1])
            return value, tail
        # k == 2
        if l == 0:
            e, tails = _euler_set((1,), 1, y1, p.policy)
            return e[1], tails[1]
        if l == 1:
            e, tails = _euler_set((1, 2, 3), 0, y1, p.policy)
            c1 = 1 + b + b * b / 4
            c2 = b * (1 + b / 2)
            c3 = (b / 2) ** 2
            value = c1 * e[1] - c2 * e[2] + c3 * e[3]
            tail = float(c1 * tails[1] + c2 * tails[2] + c3 * tails[3])
            return value, tail
        e, tails = _euler_set((0, 1, 2, 3), l - 1, y1, p.policy)
        zlow = _z_derivs_upto(l - 2, y1, bits)[l - 2]
        if l % 2 == 0:
            m = l // 2
            c1 = -(4 * b / (2 * m - 1)) * (1 + b / (4 * m))
            c2 = (4 * b ** 2 / (2 * m - 1) ** 2) * (
                1 + b ** 2 / (16 * m ** 2) + mpf(2 * m - 1) / (4 * m) + b / (2 * m))
            c3 = -(2 * b ** 3 / (m * (2 * m - 1) ** 2)) * (1 + b / (4 * m))
            c4 = b ** 4 / (4 * m ** 2 * (2 * m - 1) ** 2)
        else:
            m = (l - 1) // 2
            c1 = -(2 * b / m) * (1 + b / (2 * (2 * m + 1)))
            c2 = (b ** 2 / m ** 2) * (
                1 + b ** 2 / (4 * (2 * m + 1) ** 2) + mpf(m) / (2 * m + 1) + b / (2 * m + 1))
            c3 = -(b ** 3 / (m ** 2 * (2 * m + 1))) * (1 + b / (2 * (2 * m + 1)))
            c4 = b ** 4 / ((2 * m) ** 2 * (2 * m + 1) ** 2)
        value = zlow + c1 * e[0] + c2 * e[1] + c3 * e[2] + c4 * e[3]
        tail = float(sum(abs(c) * t for c, t in zip((c1, c2, c3, c4),
                                                    (tails[0], tails[1], tails[2], tails[3]))))
        return value, tail


def norm_g(p: FamilyPoint) -> FamilyValue:
    """The polynomial differential function G_l^(k)(y1, B).

    This is the estimator target: dividing the outcome-l probability by
    ``weight_f`` recovers it.  Non-negative on the whole domain (each G is
    a termwise-positive series weighted by squared structure factors).
    """
    _require_supported_k(p.rs.k)
    value, tail = _norm_g_raw(p)
    return FamilyValue(value, _log_of(value), "norm_g", tail_bound=tail)


def _amp_sign(k: int, l: int) -> int:
    """Sign of the hybrid-state amplitude in the paper's BS convention.

    Only probabilities are contracted downstream; the signs are recorded
    for completeness ((-1)^l for k=0; branch signs of the k=1 and k=2
    hybrid expansions otherwise).
    """
    if k == 0:
        return -1 if l % 2 else 1
    if k == 1:
        return -1 if (l % 2 == 0 and l >= 2) else 1
    return -1 if (l % 2 == 1 and l >= 3) else 1


def amplitude_c(p: FamilyPoint) -> FamilyValue:
    """Magnitude of the hybrid-state amplitude C_l^(k)(y1, B), with sign flag.

    Satisfies |C_l|^2 / (k! cosh s) = f_l * G_l to working precision.
    """
    k, l = p.rs.k, p.l
    _require_supported_k(k)
    bits = p.policy.mantissa_bits
    with mp.workprec(bits):
        y1 = mpf(p.rs.y1)
        b = mpf(p.rs.b)
        g, gtail = _norm_g_raw(p)
        if k == 0:
            value = (b * y1) ** (mpf(l) / 2) / mp.sqrt(math.factorial(l)) * mp.sqrt(g)
        elif k == 1:
            if l == 0:
                value = mp.sqrt(b / (1 + b) * g)
            elif l % 2 == 0:
                m = l // 2
                value = ((b * y1) ** (m - mpf(1) / 2) / mp.sqrt(math.factorial(l))
                         * l * mp.sqrt(g / (1 + b)))
            else:
                m = (l - 1) // 2
                value = ((b * y1) ** m / mp.sqrt(math.factorial(l))
                         * l * mp.sqrt(g / (1 + b)))
        else:
            if l == 0:
                if y1 == 0:
                    raise SingularPoint("C_0^(2) has a 1/y1 factor; undefined at y1 = 0")
                value = b / (2 * y1 * (1 + b)) * mp.sqrt(g)
            elif l == 1:
                if y1 == 0:
                    raise SingularPoint("C_1^(2) has a 1/sqrt(y1) factor; undefined at y1 = 0")
                value = 2 / (1 + b) * mp.sqrt(b / y1) * mp.sqrt(g)
            elif l % 2 == 0:
                m = l // 2
                value = ((b * y1) ** (m - 1) / mp.sqrt(math.factorial(l))
                         * (l - 1) * l / (1 + b) * mp.sqrt(g))
            else:
                m = (l - 1) // 2
                value = ((b * y1) ** (m - mpf(1) / 2) / mp.sqrt(math.factorial(l))
                         * (l - 1) * l / (1 + b) * mp.sqrt(g))
        return FamilyValue(value, _log_of(value), "amplitude_c",
                           sign=_amp_sign(k, l), tail_bound=float(gtail))
