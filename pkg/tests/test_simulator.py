import math

import numpy as np
import pytest

from spdckit._errors import InvalidModel
from spdckit.simulator import (
    RNG_ALGORITHM,
    SourceModel,
    analytic_expectations,
    rng_metadata,
    simulate,
    write_ground_truth,
)
from spdckit.tcspc import coincidence_count

S = 10**12


def model(**kw):
    base = dict(pair_rate=1000.0, eta1=0.1, eta2=0.1, dark1=0.0, dark2=0.0, jitter_sigma=0.0, dead_time=0,
                duration=120 * S, seed=1)
    base.update(kw)
    return SourceModel(**base)


def test_lossless_limit():
    s0, s1, truth = simulate(model(eta1=1.0, eta2=1.0, duration=10 * S))
    np.testing.assert_array_equal(s0.times, s1.times)
    assert (s0.channel, s1.channel) == (0, 1)
    assert truth.true_coincidences == truth.generated_pairs == len(s0)
    assert coincidence_count(s0, s1, 1) == truth.generated_pairs


def test_counting_statistics():
    _, _, truth = simulate(model(seed=2))
    for n, mean in ((truth.detected_1, 12_000), (truth.detected_2, 12_000), (truth.true_coincidences, 1200)):
        assert abs(n - mean) <= 3 * math.sqrt(mean)
    assert truth.true_coincidences <= min(truth.detected_1, truth.detected_2)


def test_determinism():
    m = model(jitter_sigma=350.0, dark1=100.0, dark2=100.0, dead_time=22_000, seed=99)
    a, b = simulate(m), simulate(m)
    assert a[0] == b[0] and a[1] == b[1] and a[2] == b[2]
    c = simulate(model(jitter_sigma=350.0, dark1=100.0, dark2=100.0, dead_time=22_000, seed=100))
    assert c[0] != a[0]


def test_dead_time_exclusion():
    m = model(pair_rate=2e7, eta1=0.5, eta2=0.5, dark1=1e5, dark2=1e5, jitter_sigma=350.0,
              dead_time=22_000, duration=S // 100, seed=4)
    s0, s1, truth = simulate(m)
    for s in (s0, s1):
        assert np.all(np.diff(s.times) >= 22_000)
        assert s.times[0] >= 0 and s.times[-1] <= m.duration
    # non-paralysable survival r / (1 + r tau) at r tau ~ 0.22
    r = 2e7 * 0.5 + 1e5
    expect = r / (1 + r * 22e-9) * 0.01
    assert abs(len(s0) - expect) <= 4 * math.sqrt(expect)
    assert len(s0) < 0.9 * r * 0.01


def test_streams_sorted_and_bounded():
    m = model(pair_rate=1e5, eta1=0.7, eta2=0.7, jitter_sigma=2000.0, dark1=1e3, dark2=1e3, duration=S // 10)
    s0, s1, _ = simulate(m)
    for s in (s0, s1):
        assert np.all(np.diff(s.times) >= 0)
        assert s.times.min() >= 0 and s.times.max() <= m.duration


def test_invalid_models():
    with pytest.raises(InvalidModel):
        model(eta1=1.5)
    with pytest.raises(InvalidModel):
        model(pair_rate=-1.0)
    with pytest.raises(InvalidModel):
        model(duration=0)


def test_analytic_examples():
    e = analytic_expectations(model(), 1500)
    assert e.car == pytest.approx(10 / 1.5e-5, rel=1e-12)
    assert e.car == pytest.approx(6.67e5, rel=1e-3)
    assert e.eta == pytest.approx(0.1, rel=1e-15)
    e = analytic_expectations(model(eta1=0.3, eta2=0.12), 1500)
    assert e.eta == pytest.approx(math.sqrt(0.3 * 0.12), rel=1e-14)
    e = analytic_expectations(model(pair_rate=0.0, dark1=10.0, dark2=10.0), 1500)
    assert e.r_cc == 0.0 and e.car == 0.0


def test_efficiency_invariant_under_pair_rate_scaling():
    etas = []
    for rate, seed in ((2000.0, 5), (8000.0, 6)):
        m = model(pair_rate=rate, eta1=0.2, eta2=0.2, jitter_sigma=50.0, duration=20 * S, seed=seed)
        s0, s1, _ = simulate(m)
        n = coincidence_count(s0, s1, 1500)
        etas.append((n / math.sqrt(len(s0) * len(s1)), math.sqrt(n) / math.sqrt(len(s0) * len(s1))))
    (a, ea), (b, eb) = etas
    assert abs(a - b) <= 3 * math.hypot(ea, eb)


def test_ground_truth_sidecar(tmp_path):
    import json

    m = model(duration=S)
    _, _, truth = simulate(m)
    write_ground_truth(tmp_path / "gt.json", m, truth)
    d = json.loads((tmp_path / "gt.json").read_text())
    assert d["rng"] == RNG_ALGORITHM == rng_metadata()["rng"]
    assert d["ground_truth"]["generated_pairs"] == truth.generated_pairs
    assert d["source_model"]["seed"] == 1
