"""Gaussian-mode bookkeeping for fiber-coupled pair sources.

Waists are 1/e^2 intensity radii in um, wavelengths in nm.  The pair emission
mode is modelled with waist ``sqrt(2) * w_p`` for a pump of waist ``w_p``, so the
design rule ``w_p = w_c / sqrt(2)`` matches it to a collection mode ``w_c``.
"""

import enum
import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from ._errors import InvalidFiberSpec, InvalidNA, NonPositiveWaist


class Modality(str, enum.Enum):
    SINGLE_MODE = "single-mode"
    FEW_MODE = "few-mode"
    MULTI_MODE = "multi-mode"


@dataclass(frozen=True)
class FiberSpec:
    name: str
    mode_field_diameter: float  # um, at reference_wavelength
    reference_wavelength: float  # nm
    numerical_aperture: float
    core_diameter: float | None  # um; None when the source gives no value
    modality: Modality
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "modality", Modality(self.modality))
        for name in ("mode_field_diameter", "reference_wavelength"):
            if not getattr(self, name) > 0:
                raise InvalidFiberSpec(f"{self.name}: {name} must be > 0", name)
        if self.core_diameter is not None and not self.core_diameter > 0:
            raise InvalidFiberSpec(f"{self.name}: core_diameter must be > 0", "core_diameter")
        if not 0 < self.numerical_aperture < 1:
            raise InvalidNA(f"{self.name}: numerical aperture must lie in (0, 1)", "numerical_aperture")

    @property
    def mode_waist(self):
        """Fundamental-mode waist (um) at the reference wavelength."""
        return self.mode_field_diameter / 2.0

    def mode(self):
        return GaussianMode(self.mode_waist, self.reference_wavelength)

    def to_dict(self):
        d = asdict(self)
        d["modality"] = self.modality.value
        return d


@dataclass(frozen=True)
class GaussianMode:
    waist: float  # um
    wavelength: float  # nm

    def __post_init__(self):
        if not self.waist > 0:
            raise NonPositiveWaist(f"waist must be > 0, got {self.waist}", "waist")
        if not self.wavelength > 0:
            raise NonPositiveWaist(f"wavelength must be > 0, got {self.wavelength}", "wavelength")


def optimal_pump_waist(collection_waist):
    if not collection_waist > 0:
        raise NonPositiveWaist("collection waist must be > 0", "collection_waist")
    return collection_waist / math.sqrt(2.0)


def emission_waist(pump_waist):
    """Waist of the pair emission mode driven by a Gaussian pump of waist ``pump_waist``."""
    if not pump_waist > 0:
        raise NonPositiveWaist("pump waist must be > 0", "pump_waist")
    return math.sqrt(2.0) * pump_waist


def _waist(m):
    return m.waist if isinstance(m, GaussianMode) else float(m)


def gaussian_overlap(a, b):
    """Power overlap of two co-located, co-axial Gaussian modes.

    Accepts :class:`GaussianMode` objects or bare waists.
    """
    wa, wb = _waist(a), _waist(b)
    if not (wa > 0 and wb > 0):
        raise NonPositiveWaist("waists must be > 0", "waist")
    return (2.0 * wa * wb / (wa * wa + wb * wb)) ** 2


def acceptance_half_angle(fiber):
    na = fiber.numerical_aperture if isinstance(fiber, FiberSpec) else float(fiber)
    if not 0 < na < 1:
        raise InvalidNA(f"numerical aperture must lie in (0, 1), got {na}", "numerical_aperture")
    return math.degrees(math.asin(na))


def load_catalog(path=None):
    """Fiber catalog as ``{name: FiberSpec}``; the bundled one when ``path`` is None."""
    if path is None:
        text = resources.files("spdckit.data").joinpath("fibers.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    records = json.loads(text)
    if not isinstance(records, list):
        raise InvalidFiberSpec("fiber catalog must be a JSON array", "catalog")
    fibers = {}
    for rec in records:
        try:
            spec = FiberSpec(**rec)
        except TypeError as exc:
            raise InvalidFiberSpec(f"bad fiber record {rec!r}: {exc}", "catalog") from None
        fibers[spec.name] = spec
    return fibers
