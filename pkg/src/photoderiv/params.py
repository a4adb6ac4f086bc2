"""Scheme parameterizations: squeezing, beam splitter, and the reduced point.

Conventions:
    y      = tanh(s) / 2, so 0 <= y < 0.5 for finite squeezing amplitude s,
    S_dB   = 20 * s / ln(10)        (decibel measure of the quadrature squeezing),
    mean_n = sinh(s)^2              (mean photon number of the squeezed vacuum),
    B      = (1 - t^2) / t^2        (beam-splitter parameter, r^2/t^2),
    y1     = t^2 * y                (reduced argument all closed forms consume).

All types are immutable and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NotFinite, OutOfRange

_SQUEEZE_KINDS = ("amplitude", "series_parameter", "decibels", "mean_photons")


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise NotFinite(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class SqueezeSpec:
    """Single-mode squeezed vacuum parameterization.

    Attributes
    ----------
    s : float
        Squeezing amplitude, s >= 0.
    y : float
        Series parameter tanh(s)/2, in [0, 0.5).
    s_db : float
        Squeezing in decibels, 20*s/ln(10).
    mean_n : float
        Mean photon number sinh(s)^2.
    """

    s: float
    y: float
    s_db: float
    mean_n: float

    @property
    def cosh_s(self) -> float:
        """cosh(s), equal to 1/sqrt(1 - 4 y^2)."""
        return math.cosh(self.s)


def make_squeeze(kind: str, value: float) -> SqueezeSpec:
    """Build a SqueezeSpec from any one of its four parameterizations.

    ``kind`` is one of ``amplitude`` (s), ``series_parameter`` (y),
    ``decibels`` (S_dB) or ``mean_photons`` (mean_n).

    Raises
    ------
    OutOfRange
        If the value violates the physical range of the chosen kind
        (s < 0, y outside [0, 0.5), S_dB < 0, mean_n < 0).
    NotFinite
        If the value is NaN or infinite.
    """
    if kind not in _SQUEEZE_KINDS:
        raise OutOfRange(f"unknown squeeze kind {kind!r}; expected one of {_SQUEEZE_KINDS}")
    value = _check_finite(kind, value)
    if kind == "amplitude":
        if value < 0:
            raise OutOfRange(f"squeezing amplitude must be >= 0, got {value}")
        s = value
    elif kind == "series_parameter":
        if not 0 <= value < 0.5:
            raise OutOfRange(f"series parameter y must lie in [0, 0.5), got {value}")
        s = math.atanh(2 * value)
    elif kind == "decibels":
        if value < 0:
            raise OutOfRange(f"squeezing in dB must be >= 0, got {value}")
        s = value * math.log(10) / 20
    else:  # mean_photons
        if value < 0:
            raise OutOfRange(f"mean photon number must be >= 0, got {value}")
        s = math.asinh(math.sqrt(value))
    y = math.tanh(s) / 2
    return SqueezeSpec(s=s, y=y, s_db=20 * s / math.log(10), mean_n=math.sinh(s) ** 2)


@dataclass(frozen=True)
class SplitterSpec:
    """Lossless beam splitter with real, non-negative t and r (t^2 + r^2 = 1)."""

    t: float
    r: float

    def __post_init__(self):
        t = _check_finite("t", self.t)
        r = _check_finite("r", self.r)
        if not 0 < t <= 1:
            raise OutOfRange(f"transmittance amplitude t must lie in (0, 1], got {t}")
        if not 0 <= r < 1:
            raise OutOfRange(f"reflectance amplitude r must lie in [0, 1), got {r}")
        if abs(t * t + r * r - 1) > 1e-12:
            raise OutOfRange(f"t^2 + r^2 = {t * t + r * r} violates unitarity")

    @property
    def transmittance(self) -> float:
        """Intensity transmittance T = t^2."""
        return self.t * self.t

    @property
    def bsp(self) -> float:
        """Beam-splitter parameter B = (1 - t^2)/t^2 = r^2/t^2."""
        return self.r * self.r / (self.t * self.t)

    @classmethod
    def from_transmittance(cls, t2: float) -> "SplitterSpec":
        t2 = _check_finite("t2", t2)
        if not 0 < t2 <= 1:
            raise OutOfRange(f"intensity transmittance t^2 must lie in (0, 1], got {t2}")
        return cls(t=math.sqrt(t2), r=math.sqrt(1 - t2))

    @classmethod
    def from_bsp(cls, b: float) -> "SplitterSpec":
        b = _check_finite("B", b)
        if b < 0:
            raise OutOfRange(f"beam-splitter parameter B must be >= 0, got {b}")
        return cls.from_transmittance(1 / (1 + b))


@dataclass(frozen=True)
class ReducedScheme:
    """Effective computation point (y1, B, k) consumed by all closed forms.

    The physical domain is 0 <= y1 < 0.5/(1+B); the closed upper boundary of
    the parameter range corresponds to infinite squeezing and is excluded.
    y1 = 0 (vacuum input in mode 1) is allowed.
    """

    y1: float
    b: float
    k: int

    def __post_init__(self):
        y1 = _check_finite("y1", self.y1)
        b = _check_finite("B", self.b)
        if b < 0:
            raise OutOfRange(f"beam-splitter parameter B must be >= 0, got {b}")
        if not isinstance(self.k, int) or self.k < 0:
            raise OutOfRange(f"input photon number k must be a non-negative integer, got {self.k}")
        if y1 < 0 or (1 + b) * y1 >= 0.5:
            raise OutOfRange(
                f"y1 = {y1} outside [0, 0.5/(1+B)) = [0, {0.5 / (1 + b)}) for B = {b}"
            )

    @property
    def y(self) -> float:
        """Reconstructed input series parameter y = (1+B) * y1."""
        return (1 + self.b) * self.y1


def reduce_scheme(sq: SqueezeSpec, bs: SplitterSpec, k: int) -> ReducedScheme:
    """Map (squeezing, splitter, input photons) to the reduced point (y1, B, k)."""
    return ReducedScheme(y1=bs.transmittance * sq.y, b=bs.bsp, k=k)


def invert_scheme(rs: ReducedScheme) -> tuple[SqueezeSpec, SplitterSpec]:
    """Recover the (SqueezeSpec, SplitterSpec) pair realizing a reduced point.

    Raises OutOfRange if (1+B)*y1 >= 0.5 (only possible for hand-built,
    invalid reduced points; `ReducedScheme` enforces the bound itself).
    """
    y = rs.y
    if y >= 0.5:
        raise OutOfRange(f"reconstructed y = {y} >= 0.5 is unphysical")
    return make_squeeze("series_parameter", y), SplitterSpec.from_bsp(rs.b)
