"""Input coercion shared by the estimators and the command line."""

from __future__ import annotations

import os
from typing import Sequence, Union

from .chain import FilteredComplex, validate_complex
from .exceptions import InvalidComplexError
from .image import DigitalImage, parse_image, read_image

__all__ = ["check_image", "check_frames", "check_complex"]

ImageLike = Union[DigitalImage, bytes, str, os.PathLike, Sequence[Sequence[object]]]


def _from_grid(grid) -> DigitalImage:
    rows = [list(row) for row in grid]
    if not rows:
        return DigitalImage(0, 0, (), 1)
    flat = [v for row in rows for v in row]
    if all(isinstance(v, bool) or type(v).__name__ == "bool_" for v in flat):
        return DigitalImage.from_mask(rows)
    try:
        values = [[int(v) for v in row] for row in rows]
    except (TypeError, ValueError):
        raise TypeError("pixel grid must hold booleans or integers") from None
    top = max((v for row in values for v in row), default=0)
    return DigitalImage(len(values[0]), len(values), values, 1 if top <= 1 else (255 if top <= 255 else 65535))


def check_image(X: ImageLike) -> DigitalImage:
    """Coerce an image, encoded bytes, a file path or a 2-D grid to a :class:`DigitalImage`.

    Boolean grids mark foreground with ``True``; integer grids are gray
    values where darker (smaller) means foreground.
    """
    if isinstance(X, DigitalImage):
        return X
    if isinstance(X, bytes):
        return parse_image(X)
    if isinstance(X, (str, os.PathLike)):
        if isinstance(X, str) and ("\n" in X or not os.path.exists(X)):
            return parse_image(X)
        return read_image(X)
    if hasattr(X, "tolist"):
        X = X.tolist()
    if isinstance(X, Sequence):
        return _from_grid(X)
    raise TypeError(f"cannot interpret {type(X).__name__} as an image")


def _is_grid(X) -> bool:
    if hasattr(X, "ndim"):
        return X.ndim == 2
    try:
        first = X[0][0]
    except (TypeError, IndexError, KeyError):
        return False
    return not isinstance(first, (Sequence, DigitalImage)) and not hasattr(first, "ndim")


def check_frames(X) -> list:
    """A non-empty list of images."""
    if isinstance(X, (DigitalImage, bytes, str, os.PathLike)) or _is_grid(X):
        return [check_image(X)]
    frames = [check_image(x) for x in X]
    if not frames:
        raise ValueError("no frames given")
    return frames


def check_complex(C, validate: bool = True) -> FilteredComplex:
    """Type check and, optionally, full structural validation of a complex."""
    if not isinstance(C, FilteredComplex):
        raise TypeError(f"expected a FilteredComplex, got {type(C).__name__}")
    if validate:
        report = validate_complex(C)
        if not report.ok:
            shown = "; ".join(report.violations[:5])
            raise InvalidComplexError(f"invalid complex ({len(report.violations)} problems): {shown}")
    return C
