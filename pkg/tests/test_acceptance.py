"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or
``python tests/test_acceptance.py`` for the summary alone.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from montecarlo import linear_coverage, polarization_coverage  # noqa: E402
from oracles import brute_force_vectorized, clustered_brute_force, quadrature_rate  # noqa: E402

from spdckit.dispersion import synthetic_table  # noqa: E402
from spdckit.metrics import DEVICE_TABLE, fit_linear, fit_polarization, pair_efficiency, pair_metrics  # noqa: E402
from spdckit.modecoupling import emission_waist, gaussian_overlap, optimal_pump_waist  # noqa: E402
from spdckit.phasematch import (  # noqa: E402
    SpdcConfig,
    phase_mismatch,
    pump_projection_rate,
    rate_absorbing,
    rate_transparent,
    thickness_sweep,
)
from spdckit.simulator import SourceModel, analytic_expectations, simulate  # noqa: E402
from spdckit.tcspc import (  # noqa: E402
    TimestampStream,
    chunked_coincidence_count,
    coincidence_count,
    g2_histogram,
    measure_coincidences,
)

S = 10**12


def report(number, title, passed, detail, elapsed):
    print(f"[{'PASS' if passed else 'FAIL'}] {number}. {title}: {detail} ({elapsed:.2f} s)")
    return passed


def criterion_1():
    worst = 0.0
    parts = []
    for row in DEVICE_TABLE:
        s = row["singles_hz_per_mw"]
        pct = 100 * pair_efficiency(row["coincidence_hz_per_mw"], s, s)
        dev = abs(pct - row["efficiency_pct"])
        worst = max(worst, dev)
        parts.append(f"D{row['device']} {pct:.4f}% vs {row['efficiency_pct']}%")
    return worst <= 0.005, "; ".join(parts) + f"; max dev {worst:.4f} pp (tol 0.005)"


def criterion_2():
    sweep = thickness_sweep(SpdcConfig.degenerate(405.0), synthetic_table(), 0.0, 2000.0, 2001, absorbing=False)
    return abs(sweep.peak_thickness - 424.0) <= 0.1, f"transparent peak {sweep.peak_thickness:.4f} nm (424 +- 0.1)"


def criterion_3():
    rng = np.random.default_rng(3)
    worst_t = 0.0
    for dk, L in zip(rng.uniform(-0.1, 0.1, 10_000), rng.uniform(0.0, 1e4, 10_000)):
        t = rate_transparent(dk, L)
        a = rate_absorbing(complex(dk, 0.0), L)
        if t > 0:
            worst_t = max(worst_t, abs(a - t) / t)
    worst_q = 0.0
    for _ in range(1000):
        dk = complex(rng.uniform(-0.05, 0.05), rng.uniform(0.0, 0.02))
        L = rng.uniform(1.0, 2000.0)
        q = quadrature_rate(dk, L)
        worst_q = max(worst_q, abs(rate_absorbing(dk, L) - q) / q)
    ok = worst_t < 1e-9 and worst_q < 1e-6
    return ok, f"kappa=0 vs sinc^2 max rel {worst_t:.2e} (<1e-9); vs Simpson max rel {worst_q:.2e} (<1e-6)"


def criterion_4():
    table = synthetic_table()
    config = SpdcConfig.degenerate(405.0)
    sweep = thickness_sweep(config, table, 0.0, 2000.0, 2001, absorbing=True)
    dk = phase_mismatch(config, table).value
    limit = 1.0 / abs(dk) ** 2
    rel = abs(rate_absorbing(dk, 20_000.0) - limit) / limit
    ok = abs(sweep.peak_thickness - 299.0) <= 1.0 and rel < 1e-6
    return ok, f"absorbing peak {sweep.peak_thickness:.3f} nm (299 +- 1); R(20 um) vs 1/|dk|^2 rel {rel:.2e} (<1e-6)"


def criterion_5():
    rng = np.random.default_rng(5)
    mismatches = 0
    for _ in range(1000):
        window = int(rng.choice([2, 101, 1500]))
        span = int(rng.choice([10, 50, 500]) * window)
        t1 = np.sort(rng.integers(0, span, rng.integers(0, 501)))
        t2 = np.sort(rng.integers(0, span, rng.integers(0, 501)))
        offset = int(rng.integers(-window, window + 1))
        ref = brute_force_vectorized(t1, t2, window, offset)
        fast = coincidence_count(t1, t2, window, offset)
        chunk = chunked_coincidence_count(t1, t2, window, offset, chunk_span=10 * window + 1 + int(rng.integers(0, span)),
                                          threads=int(rng.integers(1, 5)))
        mismatches += not (ref == fast == chunk)
    model = SourceModel(2e5, 0.5, 0.5, 1e4, 1e4, 350.0, 22_000, 10 * S, seed=2025)
    s0, s1, _ = simulate(model)
    big_fast = coincidence_count(s0, s1, 1500)
    big_chunk = chunked_coincidence_count(s0, s1, 1500, 0, chunk_span=S)
    big_ref = clustered_brute_force(s0.times, s1.times, 1500)
    ok = mismatches == 0 and big_fast == big_chunk == big_ref
    return ok, (f"1000 random instances, {mismatches} mismatches; {len(s0) + len(s1)} events "
                f"({len(s0)} + {len(s1)}): two-pointer {big_fast}, chunked(1 s) {big_chunk}, brute force {big_ref}")


def criterion_6():
    names = ("R1", "R2", "R_CC", "CAR", "eta")
    excursions = {k: 0 for k in names}
    for seed in range(30):
        model = SourceModel(1000.0, 0.1, 0.1, 100.0, 100.0, 50.0, 22_000, 120 * S, seed=1000 + seed)
        exp = analytic_expectations(model, 1500)
        s0, s1, _ = simulate(model)
        res = measure_coincidences(s0, s1, 1500, method="analytic")
        n1, n2 = len(s0), len(s1)
        acc_err = res.accidentals * math.sqrt(1 / n1 + 1 / n2)
        m = pair_metrics(res.coincidences, res.accidentals, n1, n2, res.duration, 1500, accidentals_error=acc_err)
        checks = {
            "R1": (m.singles_1, exp.r1, m.singles_1_error),
            "R2": (m.singles_2, exp.r2, m.singles_2_error),
            "R_CC": (m.coincidence_rate, exp.r_cc, m.coincidence_rate_error),
            "CAR": (m.car, exp.car, m.car_error),
            "eta": (m.pair_efficiency, exp.eta, m.pair_efficiency_error),
        }
        for k, (value, expected, sigma) in checks.items():
            excursions[k] += abs(value - expected) > 3 * sigma
    total = sum(excursions.values())
    detail = ", ".join(f"{k} {v}" for k, v in excursions.items())
    return total <= 2, f"30 seeds x 5 quantities, 3-sigma excursions: {detail}; total {total} (<= 2)"


def criterion_7():
    s0, s1, truth = simulate(SourceModel(1000.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0, 10 * S, seed=7))
    h = g2_histogram(s0, s1, 60, 30_000)
    zero = h.counts[h.zero_bin()]
    delta_ok = zero == truth.true_coincidences and h.counts.sum() - zero <= 0.01 * zero

    rng = np.random.default_rng(77)
    T = 2 * S
    streams = []
    for ch in (0, 1):
        n = rng.poisson(1e6 * T * 1e-12)
        streams.append(TimestampStream(ch, np.sort(rng.integers(0, T + 1, n)), T))
    flat = g2_histogram(*streams, 60, 6000)
    z = np.abs(flat.g2 - 1.0) / (np.sqrt(flat.normalization) / flat.normalization)
    ok = delta_ok and bool(np.all(z <= 4.0))
    return ok, (f"zero-jitter: {zero}/{truth.true_coincidences} pairs in tau=0 bin, {h.counts.sum() - zero} elsewhere; "
                f"independent streams: max |g2-1| = {z.max():.2f} sigma over {z.size} bins (<= 4)")


def criterion_8():
    wp = optimal_pump_waist(2.3)
    overlap = gaussian_overlap(emission_waist(wp), 2.3)
    neighbours = max(gaussian_overlap(emission_waist(wp * f), 2.3) for f in (0.999, 1.001))
    ok = round(wp, 3) == 1.626 and round(wp, 2) == 1.63 and overlap == 1.0 and neighbours < 1.0
    return ok, f"w_p = {wp:.6f} um (1.626 / 1.63 printed); overlap at rule {overlap!r}, at +-0.1% {neighbours:.9f}"


def criterion_9():
    x = np.linspace(0.0, 9.0, 10)
    lf = fit_linear(np.column_stack([x, 3.0 * x + 1.0]))
    lin_err = max(abs(lf.slope - 3.0), abs(lf.intercept - 1.0))
    theta = np.arange(0.0, 360.0, 15.0)
    pf = fit_polarization(np.column_stack([theta, pump_projection_rate(theta, 30.0, 10.0, 1.0)]))
    pol_err = max(abs(pf.amplitude - 10.0), abs(pf.offset - 1.0), abs(pf.theta0 - 30.0))
    lc = linear_coverage(1000, 9)
    pc = polarization_coverage(1000, 9)
    worst = min(*lc.values(), *pc.values())
    ok = lin_err < 1e-9 and pol_err < 1e-9 and worst >= 0.99
    cov = ", ".join(f"{k} {v:.3f}" for k, v in {**lc, **pc}.items())
    return ok, f"noiseless errors linear {lin_err:.1e}, polarization {pol_err:.1e} (<1e-9); 3-sigma coverage {cov} (>= 0.99)"


CRITERIA = [
    (1, "Table-1 efficiency arithmetic", criterion_1),
    (2, "Coherence-length peak", criterion_2),
    (3, "Absorbing-limit convergence", criterion_3),
    (4, "Absorbing optimum and saturation", criterion_4),
    (5, "Correlator oracle equivalence", criterion_5),
    (6, "Closed-loop statistics", criterion_6),
    (7, "g2 shape", criterion_7),
    (8, "Mode-matching rule", criterion_8),
    (9, "Fit correctness", criterion_9),
]


def _run(number, title, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return report(number, title, ok, detail, time.perf_counter() - t0)


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn):
    assert _run(number, title, fn)


if __name__ == "__main__":
    results = [_run(*c) for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
