"""Figures of merit for pair sources and the fits behind them.

Error bars are 1-sigma, first-order propagated, with Poisson sqrt(N) on counts.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from ._errors import (
    DegenerateAbscissa,
    InsufficientAngularSpan,
    NonPositiveSingles,
    ZeroAccidentals,
)

# one-sided 95 % upper limit on a Poisson mean after observing zero events
ZERO_COUNT_UPPER_LIMIT = 2.996

# Table of four fiber-integrated devices: normalized coincidence rate (Hz/mW),
# dark-subtracted geometric-mean singles rate (Hz/mW) and the printed pair
# collection efficiency (%).
DEVICE_TABLE = (
    {"device": 1, "pump_fiber": "free-space", "collection_fiber": "MMF (NA=0.1)", "w_p_um": 2.55, "w_c_um": 12.5,
     "coincidence_hz_per_mw": 0.16, "coincidence_err": 0.03, "singles_hz_per_mw": 209.0, "singles_err": 0.78,
     "efficiency_pct": 0.077, "efficiency_err_pct": 0.014, "car_max": 365, "car_max_err": 65, "car_power_mw": 4.0},
    {"device": 2, "pump_fiber": "free-space", "collection_fiber": "SMF (NA=0.12)", "w_p_um": 2.55, "w_c_um": 2.3,
     "coincidence_hz_per_mw": 0.17, "coincidence_err": 0.01, "singles_hz_per_mw": 82.5, "singles_err": 0.46,
     "efficiency_pct": 0.21, "efficiency_err_pct": 0.012, "car_max": 2842, "car_max_err": 802, "car_power_mw": 5.0},
    {"device": 3, "pump_fiber": "FMF", "collection_fiber": "SMF (NA=0.12)", "w_p_um": 1.60, "w_c_um": 2.3,
     "coincidence_hz_per_mw": 0.43, "coincidence_err": 0.03, "singles_hz_per_mw": 216.0, "singles_err": 0.78,
     "efficiency_pct": 0.20, "efficiency_err_pct": 0.014, "car_max": 4643, "car_max_err": 2774, "car_power_mw": 0.68},
    {"device": 4, "pump_fiber": "SMF", "collection_fiber": "SMF (NA=0.12)", "w_p_um": 1.25, "w_c_um": 2.3,
     "coincidence_hz_per_mw": 0.38, "coincidence_err": 0.03, "singles_hz_per_mw": 393.0, "singles_err": 1.1,
     "efficiency_pct": 0.097, "efficiency_err_pct": 0.008, "car_max": 2211, "car_max_err": 968, "car_power_mw": 0.68},
)


def pair_efficiency(r_cc, r1, r2):
    """``R_cc / sqrt(R1 R2)``."""
    if not (r1 > 0 and r2 > 0):
        raise NonPositiveSingles("singles rates must be > 0", "r1" if not r1 > 0 else "r2")
    if r_cc < 0:
        raise NonPositiveSingles("coincidence rate must be >= 0", "r_cc")
    return r_cc / math.sqrt(r1 * r2)


@dataclass(frozen=True)
class Car:
    value: float
    error: float


def car(coincidences, accidentals, accidentals_error=None):
    """Coincidence-to-accidental ratio with first-order Poisson error.

    ``accidentals_error`` defaults to ``sqrt(accidentals)``; pass it explicitly
    when the accidental level comes from the analytic singles product.
    Zero accidentals raise :class:`ZeroAccidentals` carrying a lower bound.
    """
    if not accidentals > 0:
        raise ZeroAccidentals(
            "no accidental counts; CAR is only bounded from below",
            lower_bound=coincidences / ZERO_COUNT_UPPER_LIMIT,
        )
    value = coincidences / accidentals
    sig_a = math.sqrt(accidentals) if accidentals_error is None else accidentals_error
    rel2 = (1.0 / coincidences if coincidences > 0 else 0.0) + (sig_a / accidentals) ** 2
    return Car(value, value * math.sqrt(rel2))


def subtract_darks(singles, dark_rate):
    """Return ``(max(singles - dark_rate, 0), clamped)``."""
    value = singles - dark_rate
    if value < 0:
        return 0.0, True
    return value, False


@dataclass(frozen=True)
class PairMetrics:
    singles_1: float
    singles_2: float
    singles_1_raw: float
    singles_2_raw: float
    singles_geomean: float
    coincidence_rate: float
    accidental_rate: float
    car: float | None
    car_error: float | None
    car_lower_bound: float | None
    pair_efficiency: float
    pair_efficiency_error: float
    singles_1_error: float
    singles_2_error: float
    coincidence_rate_error: float
    accidental_rate_error: float
    window_ps: int
    duration_ps: int
    dark_clamped: bool = False

    def to_report(self):
        return {
            "singles_1_hz": self.singles_1,
            "singles_2_hz": self.singles_2,
            "singles_geomean_hz": self.singles_geomean,
            "coincidence_rate_hz": self.coincidence_rate,
            "accidental_rate_hz": self.accidental_rate,
            "car": self.car,
            "car_error": self.car_error,
            "pair_efficiency": self.pair_efficiency,
            "pair_efficiency_error": self.pair_efficiency_error,
            "window_ps": self.window_ps,
            "duration_ps": self.duration_ps,
            "singles_1_raw_hz": self.singles_1_raw,
            "singles_2_raw_hz": self.singles_2_raw,
            "singles_1_error_hz": self.singles_1_error,
            "singles_2_error_hz": self.singles_2_error,
            "coincidence_rate_error_hz": self.coincidence_rate_error,
            "accidental_rate_error_hz": self.accidental_rate_error,
            "car_lower_bound": self.car_lower_bound,
            "dark_clamped": self.dark_clamped,
            "error_convention": "1-sigma, first-order Poisson propagation",
        }


def pair_metrics(coincidences, accidentals, n1, n2, duration_ps, window_ps, dark1=0.0, dark2=0.0,
                 accidentals_error=None):
    """Rates and figures of merit from raw counts over ``duration_ps``.

    Singles used for the efficiency are dark-subtracted when dark rates are given.
    """
    T = duration_ps * 1e-12
    raw1, raw2 = n1 / T, n2 / T
    s1, c1 = subtract_darks(raw1, dark1)
    s2, c2 = subtract_darks(raw2, dark2)
    if not (s1 > 0 and s2 > 0):
        raise NonPositiveSingles("singles rate is zero after dark subtraction", "singles")
    e1, e2 = math.sqrt(n1) / T, math.sqrt(n2) / T
    r_cc = coincidences / T
    e_cc = math.sqrt(coincidences) / T
    sig_a = math.sqrt(accidentals) if accidentals_error is None else accidentals_error

    eta = pair_efficiency(r_cc, s1, s2)
    eta_err = math.sqrt(
        (e_cc / math.sqrt(s1 * s2)) ** 2 + (0.5 * eta * e1 / s1) ** 2 + (0.5 * eta * e2 / s2) ** 2
    )
    try:
        c = car(coincidences, accidentals, accidentals_error)
        car_value, car_err, car_lb = c.value, c.error, None
    except ZeroAccidentals as exc:
        car_value, car_err, car_lb = None, None, exc.lower_bound

    return PairMetrics(
        singles_1=s1, singles_2=s2, singles_1_raw=raw1, singles_2_raw=raw2,
        singles_geomean=math.sqrt(s1 * s2),
        coincidence_rate=r_cc, accidental_rate=accidentals / T,
        car=car_value, car_error=car_err, car_lower_bound=car_lb,
        pair_efficiency=eta, pair_efficiency_error=eta_err,
        singles_1_error=e1, singles_2_error=e2,
        coincidence_rate_error=e_cc, accidental_rate_error=sig_a / T,
        window_ps=int(window_ps), duration_ps=int(duration_ps),
        dark_clamped=c1 or c2,
    )


# ---------------------------------------------------------------- fits


def _split_points(points, min_points):
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError("points must be an (n, 2) or (n, 3) array of (x, y[, y_error])")
    if arr.shape[0] < min_points:
        return arr[:, 0], arr[:, 1], None, False
    err = arr[:, 2] if arr.shape[1] == 3 else None
    if err is not None and np.any(~(err > 0)):
        raise ValueError("y errors must be > 0")
    return arr[:, 0], arr[:, 1], err, True


def _weighted_lstsq(design, y, err):
    """Solve the weighted problem; returns coefficients, covariance, weighted residual sum and rank."""
    w = np.ones_like(y) if err is None else 1.0 / err**2
    sw = np.sqrt(w)
    a = design * sw[:, None]
    b = y * sw
    coef, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    resid = b - a @ coef
    chi2 = float(resid @ resid)
    if rank < design.shape[1]:
        return coef, None, chi2, rank, w
    cov = np.linalg.inv(a.T @ a)
    dof = y.size - design.shape[1]
    if err is None:
        # no error bars: scale by the residual variance
        cov = cov * (chi2 / dof) if dof > 0 else np.full_like(cov, np.nan)
    return coef, cov, chi2, rank, w


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    slope_error: float
    intercept_error: float
    r_squared: float
    chi2: float
    dof: int

    def predict(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=float)

    def to_dict(self):
        return asdict(self)


def fit_linear(points):
    """Weighted straight-line fit to ``(x, y[, y_error])`` rows, weights ``1 / y_error^2``."""
    x, y, err, enough = _split_points(points, 2)
    if not enough or np.unique(x).size < 2:
        raise DegenerateAbscissa("need at least two distinct x values", "x")
    design = np.column_stack([np.ones_like(x), x])
    coef, cov, chi2, _, w = _weighted_lstsq(design, y, err)
    ybar = np.sum(w * y) / np.sum(w)
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    r2 = 1.0 if ss_tot == 0 else min(max(1.0 - chi2 / ss_tot, 0.0), 1.0)
    return LinearFit(
        slope=float(coef[1]),
        intercept=float(coef[0]),
        slope_error=float(math.sqrt(cov[1, 1])) if np.isfinite(cov[1, 1]) else math.nan,
        intercept_error=float(math.sqrt(cov[0, 0])) if np.isfinite(cov[0, 0]) else math.nan,
        r_squared=r2,
        chi2=chi2,
        dof=int(y.size - 2),
    )


@dataclass(frozen=True)
class PolarizationFit:
    amplitude: float
    offset: float
    theta0: float  # degrees in [0, 180)
    amplitude_error: float
    offset_error: float
    theta0_error: float
    residual_norm: float
    degenerate: bool

    def predict(self, theta):
        c = np.cos(np.deg2rad(np.asarray(theta, dtype=float) - self.theta0))
        return self.offset + self.amplitude * c * c

    def to_dict(self):
        return asdict(self)


def fit_polarization(points):
    """Fit ``offset + amplitude cos^2(theta - theta0)`` to ``(theta_deg, rate[, error])`` rows.

    Linear in the basis ``{1, cos 2theta, sin 2theta}``.  A flat scan gives
    amplitude 0, theta0 0 and ``degenerate=True``.  The offset is reported as
    fitted and can come out slightly negative on noisy data.
    """
    theta, y, err, enough = _split_points(points, 4)
    if not enough:
        raise InsufficientAngularSpan("need at least 4 angles", "theta")
    if np.ptp(theta) < 90.0:
        raise InsufficientAngularSpan("angles must span at least 90 degrees", "theta")
    t2 = np.deg2rad(2.0 * theta)
    design = np.column_stack([np.ones_like(t2), np.cos(t2), np.sin(t2)])
    coef, cov, chi2, rank, _ = _weighted_lstsq(design, y, err)
    if rank < 3:
        raise InsufficientAngularSpan("angles do not determine cos(2 theta) and sin(2 theta)", "theta")
    c0, c1, c2 = (float(v) for v in coef)
    r = math.hypot(c1, c2)
    amplitude = 2.0 * r
    scale = max(abs(c0), float(np.max(np.abs(y))), np.finfo(float).tiny)
    degenerate = amplitude <= 1e-12 * scale
    if degenerate:
        amplitude, theta0 = 0.0, 0.0
        offset = c0
        amp_err = 2.0 * math.sqrt(max(cov[1, 1], cov[2, 2])) if np.all(np.isfinite(cov)) else math.nan
        return PolarizationFit(0.0, offset, 0.0, amp_err, math.sqrt(cov[0, 0]), math.nan,
                               math.sqrt(chi2), True)

    theta0 = math.degrees(0.5 * math.atan2(c2, c1)) % 180.0
    if theta0 >= 180.0:
        theta0 = 0.0
    offset = c0 - r
    jac = np.array([
        [0.0, 2.0 * c1 / r, 2.0 * c2 / r],
        [1.0, -c1 / r, -c2 / r],
        [0.0, math.degrees(-0.5 * c2 / r**2), math.degrees(0.5 * c1 / r**2)],
    ])
    pcov = jac @ cov @ jac.T
    errs = np.sqrt(np.diag(pcov))
    return PolarizationFit(
        amplitude=amplitude,
        offset=offset,
        theta0=theta0,
        amplitude_error=float(errs[0]),
        offset_error=float(errs[1]),
        theta0_error=float(errs[2]),
        residual_norm=math.sqrt(chi2),
        degenerate=False,
    )
