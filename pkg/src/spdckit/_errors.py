"""Exception hierarchy.

Every error carries the CLI exit code it maps to and, where known, the name of
the offending parameter so the command line can emit structured error JSON.
"""


class SpdcError(ValueError):
    """Base class for all domain errors raised by the toolkit."""

    code = "domain_error"
    exit_code = 4

    def __init__(self, message, offending_parameter=None):
        super().__init__(message)
        self.message = message
        self.offending_parameter = offending_parameter

    def to_dict(self):
        return {
            "code": self.code,
            "message": self.message,
            "offending_parameter": self.offending_parameter,
        }


class DataFormatError(SpdcError):
    code = "data_format_error"
    exit_code = 3


# dispersion
class NonMonotonicGrid(DataFormatError):
    code = "non_monotonic_grid"


class NegativeKappa(DataFormatError):
    code = "negative_kappa"


class MalformedRow(DataFormatError):
    code = "malformed_row"


class OutOfRange(SpdcError):
    code = "out_of_range"


class NonPositiveWavelength(SpdcError):
    code = "non_positive_wavelength"


# phase matching
class DegenerateOrInverted(SpdcError):
    code = "degenerate_or_inverted"


class EnergyNotConserved(SpdcError):
    code = "energy_not_conserved"


class NegativeThickness(SpdcError):
    code = "negative_thickness"


class ZeroMismatch(SpdcError):
    code = "zero_mismatch"


class NegativeAmplitude(SpdcError):
    code = "negative_amplitude"


# mode coupling
class NonPositiveWaist(SpdcError):
    code = "non_positive_waist"


class InvalidNA(SpdcError):
    code = "invalid_na"


class InvalidFiberSpec(SpdcError):
    code = "invalid_fiber_spec"


# tcspc
class UnsortedStream(DataFormatError):
    code = "unsorted_stream"


class InvalidStream(DataFormatError):
    code = "invalid_stream"


class NonPositiveWindow(SpdcError):
    code = "non_positive_window"


class OffsetTooSmall(SpdcError):
    code = "offset_too_small"


class ChunkTooSmall(SpdcError):
    code = "chunk_too_small"


class InvalidBinning(SpdcError):
    code = "invalid_binning"


# metrics
class NonPositiveSingles(SpdcError):
    code = "non_positive_singles"


class ZeroAccidentals(SpdcError):
    """No accidental counts: CAR is only bounded from below."""

    code = "zero_accidentals"

    def __init__(self, message, lower_bound=None, offending_parameter="accidentals"):
        super().__init__(message, offending_parameter)
        self.lower_bound = lower_bound


class DegenerateAbscissa(SpdcError):
    code = "degenerate_abscissa"


class InsufficientAngularSpan(SpdcError):
    code = "insufficient_angular_span"


# simulator
class InvalidModel(SpdcError):
    code = "invalid_model"


class UsageError(SpdcError):
    code = "usage_error"
    exit_code = 2
