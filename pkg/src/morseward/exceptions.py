"""Exception hierarchy shared by the library and the command line."""


class MorsewardError(Exception):
    """Base class for every error raised by morseward."""


class DimensionMismatchError(MorsewardError, ValueError):
    """Operands have incompatible shapes or ambient dimensions."""


class ContainmentError(MorsewardError, ValueError):
    """A sublattice was expected to be contained in another one."""


class ComplexMismatchError(MorsewardError, ValueError):
    """Two reductions or maps do not share the expected complex."""


class FiltrationError(MorsewardError, ValueError):
    """A filtration index is out of range or a boundary breaks monotonicity."""


class InvalidComplexError(MorsewardError, ValueError):
    """A chain complex fails validation (d∘d, filtration, basis)."""


class ComplexFormatError(MorsewardError, ValueError):
    """A serialized complex cannot be parsed."""


class MalformedFieldError(MorsewardError, ValueError):
    """A vector field breaks bounds, the unit-entry rule or distinctness."""


class InadmissibleFieldError(MorsewardError, ValueError):
    """A discrete vector field contains a loop.

    The offending loop is stored in ``cycle`` as a list of row indices
    ``[a1, a2, ..., a1]``.
    """

    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = cycle


class TransferError(MorsewardError, ValueError):
    """Persistence transfer refused because the homotopy order is too large."""

    def __init__(self, message, measured_order=None):
        super().__init__(message)
        self.measured_order = measured_order


class InvariantViolation(MorsewardError, RuntimeError):
    """An internal mathematical invariant failed; this is always a bug."""


class ImageFormatError(MorsewardError, ValueError):
    """Base class for image parsing failures."""


class HeaderError(ImageFormatError):
    """Missing or malformed image header."""


class ImageDimensionError(ImageFormatError):
    """Pixel data does not match the declared dimensions."""


class IllegalCharacterError(ImageFormatError):
    """Unexpected character in an ascii grid or a plain PGM body."""


class PixelValueError(ImageFormatError):
    """A pixel value lies outside ``[0, maxval]``."""


class FrameNestingError(FiltrationError):
    """Frames of a filtration are not nested or differ in size."""

    def __init__(self, message, pixel=None):
        super().__init__(message)
        self.pixel = pixel
