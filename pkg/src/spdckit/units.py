"""Parsing of quantities with explicit unit suffixes (``1.5ns``, ``60ps``, ``2.3um``).

Internal units: lengths in nm (thickness, wavelength) or um (waists), times in
integer-friendly ps, rates in Hz.  A bare number is rejected on purpose.
"""

import re

from ._errors import UsageError

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-zµμ]+)\s*$")

TIME_PS = {"ps": 1.0, "ns": 1e3, "us": 1e6, "µs": 1e6, "μs": 1e6, "ms": 1e9, "s": 1e12}
LENGTH_NM = {"pm": 1e-3, "nm": 1.0, "um": 1e3, "µm": 1e3, "μm": 1e3, "mm": 1e6, "m": 1e9}
RATE_HZ = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
ANGLE_DEG = {"deg": 1.0, "rad": 180.0 / 3.141592653589793}

_KINDS = {"time": TIME_PS, "length": LENGTH_NM, "rate": RATE_HZ, "angle": ANGLE_DEG}


def parse_quantity(text, kind, parameter=None):
    """Return ``text`` converted to the base unit of ``kind``.

    ``kind`` is one of ``time`` (ps), ``length`` (nm), ``rate`` (Hz), ``angle`` (deg).
    """
    table = _KINDS[kind]
    match = _NUMBER.match(str(text))
    if match is None:
        raise UsageError(
            f"{text!r} is not a number with a unit suffix (e.g. {_example(kind)})",
            parameter,
        )
    value, unit = match.groups()
    key = unit.lower() if kind == "rate" else unit
    if key not in table:
        raise UsageError(
            f"unknown {kind} unit {unit!r}; expected one of {sorted(table)}", parameter
        )
    return float(value) * table[key]


def parse_time_ps(text, parameter=None):
    """Parse a time and round it to whole picoseconds."""
    value = parse_quantity(text, "time", parameter)
    rounded = round(value)
    if abs(value - rounded) > 1e-6 * max(1.0, abs(value)):
        raise UsageError(f"{text!r} is not a whole number of picoseconds", parameter)
    return int(rounded)


def parse_length_um(text, parameter=None):
    return parse_quantity(text, "length", parameter) / 1e3


def _example(kind):
    return {"time": "1.5ns", "length": "424nm", "rate": "100Hz", "angle": "30deg"}[kind]
