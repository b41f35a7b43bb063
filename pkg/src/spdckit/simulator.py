"""Monte Carlo two-detector timestamp generator for a CW pair source.

Pairs are a homogeneous Poisson process.  Each photon reaches its detector
with probability ``eta``, picks up Gaussian timing jitter, is merged with
Poisson dark counts and is finally thinned by a non-paralysable dead time.
Everything is drawn from one seeded ``numpy.random.PCG64`` stream in a fixed
order, so a seed reproduces the output bit for bit.
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numba
import numpy as np

from . import __version__
from ._errors import InvalidModel
from .tcspc import TimestampStream

RNG_ALGORITHM = "numpy.random.PCG64"
# placeholders for typical SPCMs; always passed explicitly
DEFAULT_DEAD_TIME_PS = 22_000
DEFAULT_JITTER_SIGMA_PS = 350.0


@dataclass(frozen=True)
class SourceModel:
    pair_rate: float  # Hz
    eta1: float
    eta2: float
    dark1: float  # Hz
    dark2: float  # Hz
    jitter_sigma: float  # ps, per detector
    dead_time: int  # ps, per detector
    duration: int  # ps
    seed: int

    def __post_init__(self):
        for name in ("pair_rate", "dark1", "dark2", "jitter_sigma", "dead_time"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise InvalidModel(f"{name} must be finite and >= 0, got {value}", name)
        for name in ("eta1", "eta2"):
            if not 0 <= getattr(self, name) <= 1:
                raise InvalidModel(f"{name} must lie in [0, 1]", name)
        if not self.duration > 0:
            raise InvalidModel("duration must be > 0", "duration")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidModel("seed must be a 64-bit unsigned integer", "seed")

    @property
    def duration_s(self):
        return self.duration * 1e-12

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class GroundTruth:
    generated_pairs: int
    detected_1: int
    detected_2: int
    true_coincidences: int

    def to_dict(self):
        return asdict(self)


@numba.njit(cache=True)
def _dead_time_mask(times, dead_time):
    keep = np.zeros(times.shape[0], dtype=np.bool_)
    last = 0
    have_last = False
    for k in range(times.shape[0]):
        if not have_last or times[k] - last >= dead_time:
            keep[k] = True
            last = times[k]
            have_last = True
    return keep


def _arm(rng, pair_times, eta, dark_rate, jitter, dead_time, duration):
    n_pairs = pair_times.size
    survive = rng.random(n_pairs) < eta
    ids = np.flatnonzero(survive)
    t = pair_times[survive]
    if jitter > 0:
        t = t + rng.normal(0.0, jitter, t.size)
    n_dark = rng.poisson(dark_rate * duration * 1e-12)
    t_dark = rng.uniform(0.0, duration, n_dark)

    times = np.rint(np.concatenate([t, t_dark])).astype(np.int64)
    labels = np.concatenate([ids, np.full(n_dark, -1, dtype=np.int64)])
    inside = (times >= 0) & (times <= duration)
    times, labels = times[inside], labels[inside]
    order = np.argsort(times, kind="stable")
    times, labels = times[order], labels[order]
    if dead_time > 0:
        keep = _dead_time_mask(times, np.int64(dead_time))
        times, labels = times[keep], labels[keep]
    return times, labels


def simulate(model):
    """Return ``(stream_0, stream_1, ground_truth)`` for ``model``."""
    rng = np.random.Generator(np.random.PCG64(int(model.seed)))
    duration = int(model.duration)
    n_pairs = int(rng.poisson(model.pair_rate * model.duration_s))
    pair_times = np.sort(rng.uniform(0.0, duration, n_pairs))

    t1, l1 = _arm(rng, pair_times, model.eta1, model.dark1, model.jitter_sigma, model.dead_time, duration)
    t2, l2 = _arm(rng, pair_times, model.eta2, model.dark2, model.jitter_sigma, model.dead_time, duration)

    both = np.intersect1d(l1[l1 >= 0], l2[l2 >= 0]).size
    truth = GroundTruth(n_pairs, int(t1.size), int(t2.size), int(both))
    return TimestampStream(0, t1, duration), TimestampStream(1, t2, duration), truth


@dataclass(frozen=True)
class Expectations:
    r1: float
    r2: float
    r_cc: float
    accidental_rate: float
    car: float
    eta: float
    window: int
    duration: int

    def counts(self):
        """Expected counts over the model duration."""
        T = self.duration * 1e-12
        return {
            "singles_1": self.r1 * T,
            "singles_2": self.r2 * T,
            "coincidences": self.r_cc * T,
            "accidentals": self.accidental_rate * T,
        }


def analytic_expectations(model, window):
    """Closed-form rates, neglecting dead time and jitter.

    Valid when ``rate * dead_time << 1`` and ``jitter << window``.
    """
    w = float(window) * 1e-12
    r1 = model.pair_rate * model.eta1 + model.dark1
    r2 = model.pair_rate * model.eta2 + model.dark2
    r_cc = model.pair_rate * model.eta1 * model.eta2
    acc = r1 * r2 * w
    car = r_cc / acc if acc > 0 else 0.0
    eta = r_cc / np.sqrt(r1 * r2) if r1 > 0 and r2 > 0 else 0.0
    return Expectations(r1, r2, r_cc, acc, car, float(eta), int(window), int(model.duration))


def rng_metadata():
    return {"rng": RNG_ALGORITHM, "numpy": np.__version__, "tool_version": __version__}


def write_ground_truth(path, model, truth):
    payload = {"source_model": model.to_dict(), "ground_truth": truth.to_dict(), **rng_metadata()}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
