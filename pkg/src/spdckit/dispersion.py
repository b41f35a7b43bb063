"""Anisotropic complex refractive index tables.

A :class:`DispersionTable` holds ``n_i(lambda)`` and ``kappa_i(lambda)`` for the
three principal axes on a common wavelength grid (nm).  Lookups interpolate
piecewise-linearly and never extrapolate.

Sign convention: fields propagate as ``exp(+i k z)`` with ``k = 2 pi (n + i kappa) / lambda``,
so an absorbing medium has ``Im(k) >= 0`` and the field decays along ``+z``.
"""

import csv
import enum
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ._errors import (
    MalformedRow,
    NegativeKappa,
    NonMonotonicGrid,
    NonPositiveWavelength,
    OutOfRange,
)

HEADER = ("wavelength_nm", "n_x", "k_x", "n_y", "k_y", "n_z", "k_z")


class Axis(enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"axis must be one of x, y, z; got {value!r}") from None


@dataclass(frozen=True)
class ComplexIndex:
    n: float
    kappa: float

    def __post_init__(self):
        if not self.kappa >= 0:
            raise NegativeKappa(f"extinction coefficient must be >= 0, got {self.kappa}", "kappa")

    @property
    def value(self):
        return complex(self.n, self.kappa)


def _frozen(values):
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DispersionTable:
    """Per-axis complex refractive index on an ascending wavelength grid (nm)."""

    wavelengths: np.ndarray
    n_x: np.ndarray
    k_x: np.ndarray
    n_y: np.ndarray
    k_y: np.ndarray
    n_z: np.ndarray
    k_z: np.ndarray

    def __post_init__(self):
        for name in HEADER:
            attr = "wavelengths" if name == "wavelength_nm" else name
            object.__setattr__(self, attr, _frozen(getattr(self, attr)))
        wl = self.wavelengths
        if wl.ndim != 1 or wl.size < 2:
            raise NonMonotonicGrid("a dispersion table needs at least two wavelengths", "wavelength_nm")
        for name in HEADER[1:]:
            col = getattr(self, name)
            if col.shape != wl.shape:
                raise MalformedRow(f"column {name} has {col.size} entries, expected {wl.size}", name)
            if not np.all(np.isfinite(col)):
                raise MalformedRow(f"column {name} contains non-finite values", name)
        if not np.all(np.isfinite(wl)) or not np.all(np.diff(wl) > 0):
            raise NonMonotonicGrid("wavelengths must be strictly ascending", "wavelength_nm")
        if wl[0] <= 0:
            raise NonPositiveWavelength("wavelengths must be positive", "wavelength_nm")
        for axis in "xyz":
            if np.any(getattr(self, f"n_{axis}") <= 0):
                raise MalformedRow(f"n_{axis} must be positive", f"n_{axis}")
            if np.any(getattr(self, f"k_{axis}") < 0):
                raise NegativeKappa(f"k_{axis} must be >= 0", f"k_{axis}")

    def __eq__(self, other):
        if not isinstance(other, DispersionTable):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, a), getattr(other, a))
            for a in ("wavelengths",) + HEADER[1:]
        )

    @property
    def wavelength_range(self):
        return float(self.wavelengths[0]), float(self.wavelengths[-1])

    def columns(self, axis):
        axis = Axis.parse(axis)
        return getattr(self, f"n_{axis.value}"), getattr(self, f"k_{axis.value}")

    def index_at(self, axis, wavelength):
        return index_at(self, axis, wavelength)


def load_table(source):
    """Read a dispersion CSV from a path, an open text file, or a string of CSV text.

    ``#`` comment lines are allowed before the header.
    """
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and "\n" in source:
        text = source
    else:
        text = Path(source).read_text(encoding="utf-8")

    lines = text.splitlines()
    pos = 0
    while pos < len(lines) and (not lines[pos].strip() or lines[pos].lstrip().startswith("#")):
        pos += 1
    if pos == len(lines):
        raise MalformedRow("missing header line", "header")
    header = tuple(h.strip() for h in lines[pos].split(","))
    if header != HEADER:
        raise MalformedRow(f"header must be {','.join(HEADER)}; got {lines[pos]!r}", "header")

    rows = []
    for lineno, row in enumerate(csv.reader(lines[pos + 1:]), start=pos + 2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(HEADER):
            raise MalformedRow(f"line {lineno}: expected {len(HEADER)} fields, got {len(row)}", f"line {lineno}")
        try:
            rows.append([float(cell) for cell in row])
        except ValueError:
            raise MalformedRow(f"line {lineno}: non-numeric field in {row!r}", f"line {lineno}") from None
    if len(rows) < 2:
        raise MalformedRow("a dispersion table needs at least two data rows", "rows")

    data = np.array(rows)
    return DispersionTable(*(data[:, i] for i in range(len(HEADER))))


def save_table(table, dest=None, comments=()):
    """Write ``table`` as CSV; returns the text when ``dest`` is None.

    Values are written with ``repr`` precision so that load/save round-trips exactly.
    """
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    buf.write(",".join(HEADER) + "\n")
    cols = [table.wavelengths] + [getattr(table, name) for name in HEADER[1:]]
    for row in zip(*cols):
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    text = buf.getvalue()
    if dest is None:
        return text
    Path(dest).write_text(text, encoding="utf-8")
    return text


def index_at(table, axis, wavelength):
    """Complex index along ``axis`` at ``wavelength`` (nm); exact at grid nodes."""
    wl = table.wavelengths
    lam = float(wavelength)
    if not (wl[0] <= lam <= wl[-1]):
        raise OutOfRange(
            f"wavelength {lam} nm outside table range [{wl[0]}, {wl[-1]}] nm", "wavelength"
        )
    n_col, k_col = table.columns(axis)
    j = int(np.searchsorted(wl, lam, side="right")) - 1
    if wl[j] == lam:
        return ComplexIndex(float(n_col[j]), float(k_col[j]))
    t = (lam - wl[j]) / (wl[j + 1] - wl[j])
    n = n_col[j] + t * (n_col[j + 1] - n_col[j])
    k = k_col[j] + t * (k_col[j + 1] - k_col[j])
    return ComplexIndex(float(n), max(float(k), 0.0))


def complex_wavenumber(index, wavelength):
    """``2 pi (n + i kappa) / lambda`` in rad/nm."""
    lam = float(wavelength)
    if not lam > 0:
        raise NonPositiveWavelength(f"wavelength must be > 0, got {lam}", "wavelength")
    return 2.0 * np.pi * complex(index.n, index.kappa) / lam


def synthetic_table():
    """The bundled illustrative NbOI2-like table (not measured data)."""
    ref = resources.files("spdckit.data").joinpath("synthetic_nboi2.csv")
    return load_table(ref.read_text(encoding="utf-8"))
