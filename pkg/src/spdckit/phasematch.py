"""Relative SPDC pair-generation rate versus crystal thickness.

All rates are relative: the prefactor that carries pump power and chi(2) is
fixed to 1, so a rate has units of nm^2.  Geometry is collinear.

The absorbing-crystal rate is

    R(L) = |(exp(i dk L) - 1) / (i dk)|^2

with complex ``dk = k_p - k_s - k_i``.  For real ``dk`` it reduces to
``L^2 sinc^2(dk L / 2)`` with the unnormalised ``sinc(x) = sin(x) / x``.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._errors import (
    DegenerateOrInverted,
    EnergyNotConserved,
    NegativeAmplitude,
    NegativeThickness,
    NonPositiveWavelength,
    UsageError,
    ZeroMismatch,
)
from .dispersion import Axis, complex_wavenumber, index_at

SERIES_THRESHOLD = 1e-6
GOLDEN_TOL_NM = 0.01
# refined local maxima within this relative margin of the best count as ties;
# the thinnest one wins (the "first" peak)
PEAK_TIE_RTOL = 1e-6

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def idler_wavelength(lambda_p, lambda_s):
    """Idler wavelength from energy conservation, ``1/lp = 1/ls + 1/li``."""
    if not lambda_p > 0:
        raise NonPositiveWavelength("pump wavelength must be > 0", "lambda_p")
    if not lambda_s > lambda_p:
        raise DegenerateOrInverted(
            f"signal wavelength ({lambda_s} nm) must exceed the pump wavelength ({lambda_p} nm)",
            "lambda_s",
        )
    return lambda_p * lambda_s / (lambda_s - lambda_p)


@dataclass(frozen=True)
class SpdcConfig:
    lambda_p: float
    lambda_s: float
    lambda_i: float
    pol_p: Axis = Axis.Y
    pol_s: Axis = Axis.Y
    pol_i: Axis = Axis.Y

    def __post_init__(self):
        for name in ("lambda_p", "lambda_s", "lambda_i"):
            if not getattr(self, name) > 0:
                raise NonPositiveWavelength(f"{name} must be > 0", name)
        for name in ("pol_p", "pol_s", "pol_i"):
            object.__setattr__(self, name, Axis.parse(getattr(self, name)))
        lhs = 1.0 / self.lambda_p
        rhs = 1.0 / self.lambda_s + 1.0 / self.lambda_i
        if abs(lhs - rhs) > 1e-9 * lhs:
            raise EnergyNotConserved(
                f"1/{self.lambda_p} != 1/{self.lambda_s} + 1/{self.lambda_i}", "lambda_i"
            )

    @classmethod
    def from_pump_signal(cls, lambda_p, lambda_s, pol_p="y", pol_s="y", pol_i="y"):
        return cls(lambda_p, lambda_s, idler_wavelength(lambda_p, lambda_s), pol_p, pol_s, pol_i)

    @classmethod
    def degenerate(cls, lambda_p, pol="y"):
        return cls.from_pump_signal(lambda_p, 2.0 * lambda_p, pol, pol, pol)


@dataclass(frozen=True)
class PhaseMismatch:
    value: complex

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag


def phase_mismatch(config, table):
    k = []
    for lam, pol in ((config.lambda_p, config.pol_p), (config.lambda_s, config.pol_s), (config.lambda_i, config.pol_i)):
        k.append(complex_wavenumber(index_at(table, pol, lam), lam))
    return PhaseMismatch(k[0] - k[1] - k[2])


def _dk_value(dk):
    return complex(dk.value if isinstance(dk, PhaseMismatch) else dk)


def _check_thickness(L):
    L = float(L)
    if not L >= 0:
        raise NegativeThickness(f"thickness must be >= 0, got {L}", "L")
    return L


def rate_absorbing(dk, L):
    """``|(exp(i dk L) - 1) / (i dk)|^2`` for complex ``dk`` (rad/nm) and ``L`` (nm)."""
    L = _check_thickness(L)
    dk = _dk_value(dk)
    if abs(dk) * L < SERIES_THRESHOLD:
        # (e^u - 1)/u = 1 + u/2 + u^2/6 + u^3/24 + ..., u = i dk L
        u = 1j * dk * L
        s = 1.0 + u / 2.0 + u * u / 6.0 + u * u * u / 24.0
        return L * L * (s.real * s.real + s.imag * s.imag)
    a, b = dk.real, dk.imag
    # |e^{iaL - bL} - 1|^2 = (e^{-bL} - 1)^2 + 4 e^{-bL} sin^2(aL/2), no cancellation at b = 0
    num = math.expm1(-b * L) ** 2 + 4.0 * math.exp(-b * L) * math.sin(0.5 * a * L) ** 2
    return num / (a * a + b * b)


def sinc(x):
    return 1.0 if x == 0 else math.sin(x) / x


def rate_transparent(dk_real, L):
    """``L^2 sinc^2(dk L / 2)``."""
    L = _check_thickness(L)
    return L * L * sinc(0.5 * float(dk_real) * L) ** 2


def coherence_length(dk_real):
    dk_real = float(dk_real)
    if dk_real == 0:
        raise ZeroMismatch("coherence length is infinite for zero phase mismatch", "dk")
    return math.pi / abs(dk_real)


def pump_projection_rate(theta, theta0, amplitude, offset):
    """``offset + amplitude * cos^2(theta - theta0)``, angles in degrees."""
    if amplitude < 0:
        raise NegativeAmplitude("amplitude must be >= 0", "amplitude")
    if offset < 0:
        raise NegativeAmplitude("offset must be >= 0", "offset")
    c = np.cos(np.deg2rad(np.asarray(theta, dtype=float) - theta0))
    out = offset + amplitude * c * c
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ThicknessSweep:
    thicknesses: np.ndarray
    rates: np.ndarray
    peak_thickness: float
    peak_rate: float
    absorbing: bool

    def to_csv(self, path):
        lines = ["thickness_nm,rate_rel"]
        lines += [f"{L!r},{r!r}" for L, r in zip(self.thicknesses.tolist(), self.rates.tolist())]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def sidecar(self):
        return {
            "peak_thickness_nm": self.peak_thickness,
            "peak_rate_rel": self.peak_rate,
            "absorbing": self.absorbing,
        }

    def write(self, csv_path, json_path=None, extra=None):
        self.to_csv(csv_path)
        json_path = Path(json_path) if json_path else Path(csv_path).with_suffix(".json")
        payload = self.sidecar()
        if extra:
            payload.update(extra)
        json_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        return json_path


def golden_section_max(f, lo, hi, tol=GOLDEN_TOL_NM):
    """Maximise a unimodal ``f`` on ``[lo, hi]`` until the bracket is narrower than ``tol``."""
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def thickness_sweep(config, table, L_min, L_max, steps, absorbing=True):
    """Evaluate the rate on a uniform thickness grid and locate the first maximum.

    Every interior grid local maximum is refined by golden-section search on
    its two neighbouring intervals; the thinnest refined peak whose rate is
    within ``PEAK_TIE_RTOL`` of the best is reported.
    """
    L_min, L_max, steps = float(L_min), float(L_max), int(steps)
    if not 0 <= L_min < L_max:
        raise UsageError(f"need 0 <= L_min < L_max, got [{L_min}, {L_max}]", "L_max")
    if steps < 2:
        raise UsageError("steps must be >= 2", "steps")

    dk = phase_mismatch(config, table).value
    if absorbing:
        def rate(L):
            return rate_absorbing(dk, L)
    else:
        dk_real = dk.real

        def rate(L):
            return rate_transparent(dk_real, L)

    grid = np.linspace(L_min, L_max, steps)
    rates = np.array([rate(L) for L in grid])

    candidates = [
        i for i in range(steps)
        if (i == 0 or rates[i] >= rates[i - 1]) and (i == steps - 1 or rates[i] >= rates[i + 1])
    ]
    refined = []
    for i in candidates:
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, steps - 1)]
        refined.append(golden_section_max(rate, lo, hi))
    best = max(r for _, r in refined)
    peak_L, peak_r = min(
        ((L, r) for L, r in refined if r >= best * (1.0 - PEAK_TIE_RTOL)), key=lambda p: p[0]
    )
    return ThicknessSweep(grid, rates, float(peak_L), float(peak_r), bool(absorbing))
