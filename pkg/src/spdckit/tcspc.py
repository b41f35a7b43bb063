"""Photon timestamp streams, coincidence counting and g2 histograms.

Times are 64-bit integer picoseconds.

Coincidence rule
----------------
A pair ``(t1, t2)`` is a coincidence when ``|t2 - t1 - offset| <= window / 2``.
Each event is used at most once.  Channel-1 events are visited in time order
and each takes the earliest unused channel-2 event inside its window.  On a
line this greedy choice yields a maximum matching, so the count does not
depend on which stream is called "first" (swap the streams and negate the
offset) and the whole pass needs one forward pointer into each stream.
"""

import csv
import io
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from ._errors import (
    ChunkTooSmall,
    InvalidBinning,
    InvalidStream,
    NonPositiveWindow,
    OffsetTooSmall,
    UnsortedStream,
)

DEFAULT_WINDOW_PS = 1500
DEFAULT_BIN_PS = 60
DEFAULT_ACCIDENTAL_OFFSET_PS = 100_000
PTS_MAGIC = b"PTS1"
PTS_VERSION = 1
_PTS_HEADER = struct.Struct("<4sHBQ")
_PTS_RECORD = np.dtype([("channel", "u1"), ("time", "<u8")])


@dataclass(frozen=True, eq=False)
class TimestampStream:
    channel: int
    times: np.ndarray
    duration: int

    def __post_init__(self):
        times = np.asarray(self.times)
        if times.ndim != 1:
            raise InvalidStream("times must be one-dimensional", "times")
        if times.size and not np.issubdtype(times.dtype, np.integer):
            if not np.all(times == np.floor(times)):
                raise InvalidStream("timestamps must be whole picoseconds", "times")
        times = np.array(times, dtype=np.int64)
        times.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "duration", int(self.duration))
        object.__setattr__(self, "channel", int(self.channel))
        if self.duration <= 0:
            raise InvalidStream("duration must be > 0", "duration")
        if times.size:
            if np.any(np.diff(times) < 0):
                raise UnsortedStream(f"channel {self.channel} timestamps are not sorted", "times")
            if times[0] < 0 or times[-1] > self.duration:
                raise InvalidStream(
                    f"channel {self.channel} has timestamps outside [0, {self.duration}] ps", "times"
                )

    def __len__(self):
        return int(self.times.size)

    def __eq__(self, other):
        if not isinstance(other, TimestampStream):
            return NotImplemented
        return (
            self.channel == other.channel
            and self.duration == other.duration
            and np.array_equal(self.times, other.times)
        )

    @property
    def rate_hz(self):
        return len(self) / (self.duration * 1e-12)

    def shifted(self, delta, duration=None):
        return TimestampStream(self.channel, self.times + int(delta), duration or self.duration + int(delta))


def _times(stream, name="stream"):
    if isinstance(stream, TimestampStream):
        return stream.times
    times = np.asarray(stream, dtype=np.int64)
    if times.size and np.any(np.diff(times) < 0):
        raise UnsortedStream(f"{name} timestamps are not sorted", name)
    return times


def _check_window(window):
    if not window > 0:
        raise NonPositiveWindow(f"coincidence window must be > 0 ps, got {window}", "window")
    return int(window)


# ---------------------------------------------------------------- matching kernels


@numba.njit(cache=True, nogil=True)
def _greedy_span(t1, u, half, i0, i1, j0, j_after, cum):
    """Run the matcher over ``t1[i0:i1]`` starting at pointer ``j0``.

    Records the pointer and running count after every event when the output
    arrays are non-empty.
    """
    j = j0
    m = u.shape[0]
    n = 0
    record = j_after.shape[0] > 0
    for i in range(i0, i1):
        lo = t1[i] - half
        while j < m and u[j] < lo:
            j += 1
        if j < m and u[j] <= t1[i] + half:
            n += 1
            j += 1
        if record:
            j_after[i] = j
            cum[i] = n
    return n, j


@numba.njit(cache=True, nogil=True)
def _resume(t1, u, half, i0, i1, j, j_after, cum):
    """Re-run a chunk from the true pointer ``j`` until it rejoins the speculative trajectory."""
    m = u.shape[0]
    n = 0
    for i in range(i0, i1):
        lo = t1[i] - half
        while j < m and u[j] < lo:
            j += 1
        if j < m and u[j] <= t1[i] + half:
            n += 1
            j += 1
        if j == j_after[i]:
            return n + (cum[i1 - 1] - cum[i]), j_after[i1 - 1]
    return n, j


_EMPTY = np.zeros(0, dtype=np.int64)


def coincidence_count(s1, s2, window=DEFAULT_WINDOW_PS, offset=0):
    """Number of coincidences between two sorted streams."""
    half = _check_window(window) // 2
    t1 = _times(s1, "s1")
    u = _times(s2, "s2") - np.int64(offset)
    n, _ = _greedy_span(t1, u, half, 0, t1.size, 0, _EMPTY, _EMPTY)
    return int(n)


def chunked_coincidence_count(s1, s2, window=DEFAULT_WINDOW_PS, offset=0, chunk_span=10**12, threads=None):
    """Same result as :func:`coincidence_count`, computed over time chunks in parallel.

    Each chunk is first matched independently, assuming no channel-2 event
    inside its leading window was consumed by the previous chunk.  A sequential
    pass then corrects every chunk whose true starting pointer differs,
    re-running it only until its pointer rejoins the independent run.
    """
    window = _check_window(window)
    if not chunk_span > 10 * window:
        raise ChunkTooSmall(f"chunk span must exceed 10 windows ({10 * window} ps)", "chunk_span")
    half = window // 2
    t1 = _times(s1, "s1")
    u = _times(s2, "s2") - np.int64(offset)
    if t1.size == 0 or u.size == 0:
        return 0

    first, last = int(t1[0]), int(t1[-1])
    edges = np.arange(first, last + 1, int(chunk_span), dtype=np.int64)
    starts = np.searchsorted(t1, edges, side="left")
    bounds = [(int(a), int(b)) for a, b in zip(starts, list(starts[1:]) + [t1.size]) if b > a]

    j_after = np.empty(t1.size, dtype=np.int64)
    cum = np.empty(t1.size, dtype=np.int64)

    def run(bound):
        i0, i1 = bound
        j0 = int(np.searchsorted(u, t1[i0] - half, side="left"))
        return _greedy_span(t1, u, half, i0, i1, j0, j_after, cum)

    if threads is None or threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partial = list(pool.map(run, bounds))
    else:
        partial = [run(b) for b in bounds]

    total = 0
    j_true = 0
    for (i0, i1), (n_spec, j_spec_end) in zip(bounds, partial):
        j_spec_start = int(np.searchsorted(u, t1[i0] - half, side="left"))
        if j_true <= j_spec_start:
            n, j_true = n_spec, j_spec_end
        else:
            n, j_true = _resume(t1, u, half, i0, i1, j_true, j_after, cum)
        total += int(n)
    return total


@dataclass(frozen=True)
class AccidentalEstimate:
    shifted: int
    analytic: float
    offset: int


def analytic_accidentals(n1, n2, window, duration):
    """Expected uncorrelated coincidences ``N1 N2 window / T`` for Poisson streams."""
    return float(n1) * float(n2) * float(window) / float(duration)


def _common_duration(s1, s2):
    durations = [s.duration for s in (s1, s2) if isinstance(s, TimestampStream)]
    if not durations:
        raise InvalidStream("a duration is needed; pass TimestampStream objects", "duration")
    return min(durations)


def accidental_estimate(s1, s2, window=DEFAULT_WINDOW_PS, offset=DEFAULT_ACCIDENTAL_OFFSET_PS, delay=0):
    """Accidental coincidences from a window shifted by ``offset`` away from the true delay."""
    window = _check_window(window)
    if abs(offset) < 10 * window:
        raise OffsetTooSmall(f"accidental offset must be at least 10 windows ({10 * window} ps)", "offset")
    duration = _common_duration(s1, s2)
    if abs(offset) + window > duration:
        raise OffsetTooSmall("accidental offset plus window exceeds the acquisition span", "offset")
    shifted = coincidence_count(s1, s2, window, delay + offset)
    analytic = analytic_accidentals(len(_times(s1)), len(_times(s2)), window, duration)
    return AccidentalEstimate(shifted, analytic, int(offset))


@dataclass(frozen=True)
class CoincidenceResult:
    coincidences: int
    accidentals: float
    window: int
    offset_used: int
    duration: int
    accidentals_shifted: int | None
    accidentals_analytic: float
    method: str
    delay: int = 0

    def to_dict(self):
        return {
            "coincidences": self.coincidences,
            "accidentals": self.accidentals,
            "accidentals_shifted": self.accidentals_shifted,
            "accidentals_analytic": self.accidentals_analytic,
            "accidental_method": self.method,
            "window_ps": self.window,
            "delay_ps": self.delay,
            "offset_used_ps": self.offset_used,
            "duration_ps": self.duration,
        }


def measure_coincidences(
    s1,
    s2,
    window=DEFAULT_WINDOW_PS,
    delay=0,
    accidental_offset=DEFAULT_ACCIDENTAL_OFFSET_PS,
    method="shifted",
    chunk_span=None,
    threads=None,
):
    if method not in ("shifted", "analytic"):
        raise ValueError("method must be 'shifted' or 'analytic'")
    window = _check_window(window)
    if chunk_span is None:
        count = coincidence_count(s1, s2, window, delay)
    else:
        count = chunked_coincidence_count(s1, s2, window, delay, chunk_span, threads)
    duration = _common_duration(s1, s2)
    if method == "shifted":
        est = accidental_estimate(s1, s2, window, accidental_offset, delay)
        shifted, analytic, accidentals = est.shifted, est.analytic, float(est.shifted)
    else:
        shifted = None
        analytic = analytic_accidentals(len(s1), len(s2), window, duration)
        accidentals = analytic
    return CoincidenceResult(
        coincidences=count,
        accidentals=accidentals,
        window=window,
        offset_used=int(accidental_offset) if method == "shifted" else 0,
        duration=duration,
        accidentals_shifted=shifted,
        accidentals_analytic=analytic,
        method=method,
        delay=int(delay),
    )


# ---------------------------------------------------------------- g2


@numba.njit(cache=True, nogil=True)
def _histogram_kernel(t1, t2, tau_max, bin_width, nbins):
    counts = np.zeros(nbins, dtype=np.int64)
    lo = 0
    m = t2.shape[0]
    for i in range(t1.shape[0]):
        start = t1[i] - tau_max
        while lo < m and t2[lo] < start:
            lo += 1
        j = lo
        stop = t1[i] + tau_max
        while j < m and t2[j] <= stop:
            b = (t2[j] - t1[i] + tau_max) // bin_width
            if b == nbins:
                b = nbins - 1
            counts[b] += 1
            j += 1
    return counts


@dataclass(frozen=True, eq=False)
class G2Histogram:
    bin_width: int
    tau_min: int
    tau_max: int
    counts: np.ndarray
    normalization: float

    @property
    def edges(self):
        return np.arange(self.tau_min, self.tau_max + 1, self.bin_width, dtype=np.int64)

    @property
    def centers(self):
        return self.edges[:-1] + 0.5 * self.bin_width

    @property
    def g2(self):
        if self.normalization > 0:
            return self.counts / self.normalization
        return np.full(self.counts.shape, np.nan)

    @property
    def g2_error(self):
        if self.normalization > 0:
            return np.sqrt(self.counts) / self.normalization
        return np.full(self.counts.shape, np.nan)

    def zero_bin(self):
        """Index of the bin that contains tau = 0."""
        return int((0 - self.tau_min) // self.bin_width)

    def to_csv(self, path=None):
        buf = io.StringIO()
        buf.write("tau_lo_ps,tau_hi_ps,counts,g2\n")
        edges = self.edges
        for k, (c, g) in enumerate(zip(self.counts.tolist(), self.g2.tolist())):
            buf.write(f"{edges[k]},{edges[k + 1]},{c},{g!r}\n")
        if path is None:
            return buf.getvalue()
        Path(path).write_text(buf.getvalue(), encoding="utf-8")


def g2_histogram(s1, s2, bin_width=DEFAULT_BIN_PS, tau_max=30_000):
    """Histogram of all differences ``t2 - t1`` with ``|t2 - t1| <= tau_max``.

    Bins are half-open ``[lo, lo + bin_width)`` except the last, which also
    holds ``tau = tau_max``.  The normalisation is the mean count of bins whose
    centre lies beyond ``0.8 * tau_max``.
    """
    bin_width, tau_max = int(bin_width), int(tau_max)
    if bin_width <= 0:
        raise InvalidBinning("bin width must be > 0", "bin_width")
    if tau_max <= 0 or tau_max % bin_width:
        raise InvalidBinning("tau_max must be a positive multiple of the bin width", "tau_max")
    t1 = _times(s1, "s1")
    t2 = _times(s2, "s2")
    nbins = 2 * tau_max // bin_width
    counts = _histogram_kernel(t1, t2, np.int64(tau_max), np.int64(bin_width), nbins)
    centers = -tau_max + bin_width * (np.arange(nbins) + 0.5)
    wings = np.abs(centers) > 0.8 * tau_max
    normalization = float(counts[wings].mean()) if wings.any() else 0.0
    return G2Histogram(bin_width, -tau_max, tau_max, counts, normalization)


# ---------------------------------------------------------------- file formats


def write_pts(path, streams, duration=None):
    """Write streams with channel ids ``0..len(streams)-1`` to a ``.pts`` file."""
    streams = list(streams)
    for k, s in enumerate(streams):
        if s.channel != k:
            raise InvalidStream(".pts channels must be numbered 0..N-1 in order", "channel")
    if duration is None:
        duration = max(s.duration for s in streams)
    channels = np.concatenate([np.full(len(s), s.channel, dtype=np.uint8) for s in streams])
    times = np.concatenate([s.times for s in streams])
    order = np.lexsort((channels, times))
    records = np.empty(times.size, dtype=_PTS_RECORD)
    records["channel"] = channels[order]
    records["time"] = times[order].astype(np.uint64)
    with open(path, "wb") as fh:
        fh.write(_PTS_HEADER.pack(PTS_MAGIC, PTS_VERSION, len(streams), int(duration)))
        fh.write(records.tobytes())


def read_pts(path):
    data = Path(path).read_bytes()
    if len(data) < _PTS_HEADER.size:
        raise InvalidStream("file too short for a .pts header", "path")
    magic, version, n_channels, duration = _PTS_HEADER.unpack_from(data)
    if magic != PTS_MAGIC:
        raise InvalidStream(f"bad magic {magic!r}; not a .pts file", "path")
    if version != PTS_VERSION:
        raise InvalidStream(f"unsupported .pts version {version}", "path")
    body = data[_PTS_HEADER.size:]
    if len(body) % _PTS_RECORD.itemsize:
        raise InvalidStream("truncated .pts record", "path")
    records = np.frombuffer(body, dtype=_PTS_RECORD)
    times = records["time"]
    if times.size and times.max() > np.iinfo(np.int64).max:
        raise InvalidStream("timestamp overflows int64", "path")
    times = times.astype(np.int64)
    if np.any(np.diff(times) < 0):
        raise UnsortedStream(".pts records are not sorted by time", "path")
    chans = records["channel"]
    if chans.size and chans.max() >= n_channels:
        raise InvalidStream("record channel id exceeds the header channel count", "path")
    return [TimestampStream(c, times[chans == c], duration) for c in range(n_channels)]


def write_csv(path, streams, duration=None):
    streams = list(streams)
    if duration is None:
        duration = max(s.duration for s in streams)
    channels = np.concatenate([np.full(len(s), s.channel, dtype=np.int64) for s in streams])
    times = np.concatenate([s.times for s in streams])
    order = np.lexsort((channels, times))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# duration_ps={int(duration)}\n")
        fh.write("channel,time_ps\n")
        for c, t in zip(channels[order].tolist(), times[order].tolist()):
            fh.write(f"{c},{t}\n")


def read_csv(path):
    """Read ``channel,time_ps`` CSV; ``# duration_ps=N`` sets the duration, else the last time is used."""
    duration = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh]
    body = []
    for ln in lines:
        s = ln.strip()
        if s.startswith("#"):
            key, _, value = s[1:].partition("=")
            if key.strip() == "duration_ps":
                duration = int(value)
            continue
        if s:
            body.append(s)
    if not body or tuple(h.strip() for h in body[0].split(",")) != ("channel", "time_ps"):
        raise InvalidStream("CSV header must be channel,time_ps", "header")
    for k, row in enumerate(csv.reader(body[1:]), start=2):
        try:
            rows.append((int(row[0]), int(row[1])))
        except (ValueError, IndexError):
            raise InvalidStream(f"row {k}: expected integer channel,time_ps", f"row {k}") from None
    arr = np.array(rows, dtype=np.int64).reshape(-1, 2)
    if arr.size and np.any(np.diff(arr[:, 1]) < 0):
        raise UnsortedStream("CSV records are not sorted by time", "path")
    if duration is None:
        duration = int(arr[:, 1].max()) if arr.size else 0
    n_channels = int(arr[:, 0].max()) + 1 if arr.size else 0
    return [TimestampStream(c, arr[arr[:, 0] == c, 1], duration) for c in range(n_channels)]


def read_streams(path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_csv(path)
    return read_pts(path)
