"""Digital images, their filtrations and the cell complexes built from them.

Pixels hold gray values in ``[0, maxval]``; darker pixels are foreground.
A binary image has ``maxval = 1`` with 0 marking the object, which is how
an ascii grid's ``'#'`` is stored. Cell ``(r, c)`` is the unit square with
corners ``(r, c)`` and ``(r + 1, c + 1)`` in vertex coordinates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .chain import Cell, FilteredComplex
from .exceptions import (
    FiltrationError,
    FrameNestingError,
    HeaderError,
    IllegalCharacterError,
    ImageDimensionError,
    PixelValueError,
)
from .intlinalg import IntMatrix

__all__ = [
    "DigitalImage",
    "FiltrationSpec",
    "parse_image",
    "read_image",
    "single_step_filtration",
    "sweep_filtration",
    "frames_filtration",
    "graylevel_filtration",
    "build_simplicial",
    "build_cubical",
    "FORMATS",
]

Pixel = Tuple[int, int]
FORMATS = ("ascii-grid", "pgm-plain", "pgm-binary")


@dataclass(frozen=True)
class DigitalImage:
    width: int
    height: int
    pixels: Tuple[Tuple[int, ...], ...]
    maxval: int = 1

    def __post_init__(self):
        pixels = tuple(tuple(int(v) for v in row) for row in self.pixels)
        object.__setattr__(self, "pixels", pixels)
        if self.width < 0 or self.height < 0:
            raise ImageDimensionError("image dimensions must be non-negative")
        if len(pixels) != self.height or any(len(row) != self.width for row in pixels):
            raise ImageDimensionError(
                f"pixel grid does not match the declared {self.width}x{self.height} size"
            )
        if not 1 <= self.maxval <= 65535:
            raise HeaderError(f"maxval {self.maxval} outside [1, 65535]")
        for r, row in enumerate(pixels):
            for c, v in enumerate(row):
                if not 0 <= v <= self.maxval:
                    raise PixelValueError(f"pixel ({r}, {c}) has value {v} outside [0, {self.maxval}]")

    @classmethod
    def from_mask(cls, mask: Sequence[Sequence[object]]) -> "DigitalImage":
        """Binary image whose truthy entries are foreground."""
        rows = [[0 if v else 1 for v in row] for row in mask]
        width = len(rows[0]) if rows else 0
        return cls(width, len(rows), rows, 1)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    @property
    def default_threshold(self) -> int:
        return (self.maxval - 1) // 2

    def foreground(self, threshold: Optional[int] = None) -> List[Pixel]:
        """Foreground pixels in row-major order: values at most ``threshold``."""
        t = self.default_threshold if threshold is None else threshold
        return [(r, c) for r, row in enumerate(self.pixels) for c, v in enumerate(row) if v <= t]

    def mask(self, threshold: Optional[int] = None) -> List[List[bool]]:
        t = self.default_threshold if threshold is None else threshold
        return [[v <= t for v in row] for row in self.pixels]

    def to_ascii(self, threshold: Optional[int] = None) -> str:
        return "".join("".join("#" if v else "." for v in row) + "\n" for row in self.mask(threshold))

    def to_pgm_plain(self) -> str:
        lines = ["P2", f"{self.width} {self.height}", str(self.maxval)]
        lines.extend(" ".join(str(v) for v in row) for row in self.pixels)
        return "\n".join(lines) + "\n"

    def to_pgm_binary(self) -> bytes:
        head = f"P5\n{self.width} {self.height}\n{self.maxval}\n".encode("ascii")
        wide = self.maxval > 255
        body = bytearray()
        for row in self.pixels:
            for v in row:
                body.extend(v.to_bytes(2, "big") if wide else bytes((v,)))
        return head + bytes(body)

    def serialize(self, fmt: str) -> bytes:
        if fmt == "ascii-grid":
            return self.to_ascii().encode("ascii")
        if fmt == "pgm-plain":
            return self.to_pgm_plain().encode("ascii")
        if fmt == "pgm-binary":
            return self.to_pgm_binary()
        raise ValueError(f"unknown image format {fmt!r}")


# ---------------------------------------------------------------------------
# Parsing


def _detect(data: bytes) -> str:
    head = data.lstrip()[:2]
    if head == b"P2":
        return "pgm-plain"
    if head == b"P5":
        return "pgm-binary"
    return "ascii-grid"


def _parse_ascii(text: str) -> DigitalImage:
    lines = text.replace("\r\n", "\n").split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise HeaderError("empty ascii grid")
    width = len(lines[0])
    rows = []
    for r, line in enumerate(lines):
        if len(line) != width:
            raise ImageDimensionError(f"row {r + 1} has {len(line)} characters, expected {width}")
        row = []
        for c, ch in enumerate(line):
            if ch == "#":
                row.append(0)
            elif ch == ".":
                row.append(1)
            else:
                raise IllegalCharacterError(f"illegal character {ch!r} at row {r + 1}, column {c + 1}")
        rows.append(row)
    return DigitalImage(width, len(rows), rows, 1)


_COMMENT = re.compile(rb"#[^\n]*")


def _pgm_header(data: bytes, magic: bytes) -> Tuple[int, int, int, int]:
    """Parse magic, width, height, maxval; return them and the raster offset."""
    pos = 0
    tokens: List[bytes] = []
    n = len(data)
    while len(tokens) < 4:
        while pos < n and (data[pos:pos + 1].isspace() or data[pos:pos + 1] == b"#"):
            if data[pos:pos + 1] == b"#":
                m = _COMMENT.match(data, pos)
                pos = m.end()
            else:
                pos += 1
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise HeaderError("truncated PGM header")
        tokens.append(data[start:pos])
    if tokens[0] != magic:
        raise HeaderError(f"expected magic {magic.decode()}, found {tokens[0][:8]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise HeaderError("non-numeric PGM header field") from None
    if width <= 0 or height <= 0:
        raise HeaderError(f"invalid PGM size {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise HeaderError(f"invalid PGM maxval {maxval}")
    return width, height, maxval, pos


def _parse_pgm_plain(data: bytes) -> DigitalImage:
    width, height, maxval, pos = _pgm_header(data, b"P2")
    body = _COMMENT.sub(b" ", data[pos:]).split()
    values = []
    for tok in body:
        if not tok.isdigit():
            raise IllegalCharacterError(f"illegal token {tok[:16]!r} in PGM body")
        values.append(int(tok))
    if len(values) != width * height:
        raise ImageDimensionError(f"PGM body has {len(values)} values, expected {width * height}")
    rows = [values[r * width:(r + 1) * width] for r in range(height)]
    return DigitalImage(width, height, rows, maxval)


def _parse_pgm_binary(data: bytes) -> DigitalImage:
    width, height, maxval, pos = _pgm_header(data, b"P5")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise HeaderError("missing whitespace after PGM header")
    raster = data[pos + 1:]
    size = 2 if maxval > 255 else 1
    need = width * height * size
    if len(raster) < need:
        raise ImageDimensionError(f"PGM raster has {len(raster)} bytes, expected {need}")
    if size == 1:
        values = list(raster[:need])
    else:
        values = [int.from_bytes(raster[k:k + 2], "big") for k in range(0, need, 2)]
    rows = [values[r * width:(r + 1) * width] for r in range(height)]
    return DigitalImage(width, height, rows, maxval)


def parse_image(data: Union[bytes, str], fmt: Optional[str] = None) -> DigitalImage:
    """Parse an ascii grid or a plain/binary PGM; ``fmt=None`` sniffs the magic."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    if not data.strip():
        raise HeaderError("empty image file")
    fmt = fmt or _detect(data)
    if fmt == "ascii-grid":
        try:
            text = data.decode("ascii")
        except UnicodeDecodeError:
            raise IllegalCharacterError("non-ascii byte in ascii grid") from None
        return _parse_ascii(text)
    if fmt == "pgm-plain":
        return _parse_pgm_plain(data)
    if fmt == "pgm-binary":
        return _parse_pgm_binary(data)
    raise ValueError(f"unknown image format {fmt!r}; expected one of {FORMATS}")


def read_image(path, fmt: Optional[str] = None) -> DigitalImage:
    with open(path, "rb") as fh:
        return parse_image(fh.read(), fmt)


# ---------------------------------------------------------------------------
# Filtrations


@dataclass(frozen=True)
class FiltrationSpec:
    """Filtration index of every foreground pixel; pixels absent are background."""

    mode: str
    steps: int
    assignment: Dict[Pixel, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.steps < 1:
            raise FiltrationError("a filtration needs at least one step")
        for p, i in self.assignment.items():
            if not 1 <= i <= self.steps:
                raise FiltrationError(f"pixel {p} has index {i} outside [1, {self.steps}]")

    def frame(self, i: int) -> List[Pixel]:
        return sorted(p for p, k in self.assignment.items() if k <= i)


def single_step_filtration(img: DigitalImage, threshold: Optional[int] = None) -> FiltrationSpec:
    return FiltrationSpec("single", 1, {p: 1 for p in img.foreground(threshold)})


def sweep_filtration(img: DigitalImage, axis: str = "rows", steps: int = 1,
                     threshold: Optional[int] = None) -> FiltrationSpec:
    """Contiguous bands of rows (or columns); band ``k`` holds indices ``x`` with ``x*steps//L == k-1``."""
    if axis not in ("rows", "cols"):
        raise ValueError("axis must be 'rows' or 'cols'")
    length = img.height if axis == "rows" else img.width
    if steps < 1:
        raise FiltrationError("steps must be at least 1")
    if steps > length:
        raise FiltrationError(f"{steps} steps exceed the {length} {axis} of the image")
    k = 0 if axis == "rows" else 1
    assignment = {p: p[k] * steps // length + 1 for p in img.foreground(threshold)}
    return FiltrationSpec("row-sweep" if axis == "rows" else "col-sweep", steps, assignment)


def frames_filtration(frames: Sequence[DigitalImage],
                      threshold: Optional[int] = None) -> Tuple[DigitalImage, FiltrationSpec]:
    """Merge nested frames; a pixel's index is the first frame containing it."""
    if not frames:
        raise FiltrationError("at least one frame is required")
    shape = frames[0].shape
    assignment: Dict[Pixel, int] = {}
    prev: set = set()
    for i, img in enumerate(frames, start=1):
        if img.shape != shape:
            raise FrameNestingError(f"frame {i} has size {img.shape}, expected {shape}", pixel=None)
        cur = set(img.foreground(threshold))
        missing = sorted(prev - cur)
        if missing:
            raise FrameNestingError(
                f"pixel {missing[0]} of frame {i - 1} is missing from frame {i}", pixel=missing[0]
            )
        for p in sorted(cur - prev):
            assignment[p] = i
        prev = cur
    return frames[-1], FiltrationSpec("frames", len(frames), assignment)


def graylevel_filtration(img: DigitalImage, thresholds: Sequence[int]) -> FiltrationSpec:
    """Sublevel filtration: index of the first threshold a pixel value does not exceed."""
    if not thresholds:
        raise FiltrationError("threshold list is empty")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise FiltrationError("thresholds must be strictly increasing")
    assignment: Dict[Pixel, int] = {}
    for r, row in enumerate(img.pixels):
        for c, v in enumerate(row):
            for k, t in enumerate(thresholds, start=1):
                if v <= t:
                    assignment[(r, c)] = k
                    break
    return FiltrationSpec("graylevel", len(thresholds), assignment)


# ---------------------------------------------------------------------------
# Complexes


def _resolve(img: DigitalImage, filt: Optional[FiltrationSpec]) -> FiltrationSpec:
    return single_step_filtration(img) if filt is None else filt


def _assemble(verts, edges, faces, steps: int, face_boundary) -> FilteredComplex:
    vkeys = sorted(verts)
    ekeys = sorted(edges)
    fkeys = sorted(faces)
    vpos = {v: k for k, v in enumerate(vkeys)}
    epos = {e: k for k, e in enumerate(ekeys)}
    nv, ne = len(vkeys), len(ekeys)
    vcells = [Cell(k, 0, verts[v], v) for k, v in enumerate(vkeys)]
    ecells = [Cell(nv + k, 1, edges[e], e) for k, e in enumerate(ekeys)]
    fcells = [Cell(nv + ne + k, 2, faces[f], f) for k, f in enumerate(fkeys)]
    d1 = [{vpos[u]: -1, vpos[w]: 1} for u, w in ekeys]
    d2 = [{epos[e]: s for e, s in face_boundary(f)} for f in fkeys]
    bounds = {
        1: IntMatrix._wrap(nv, ne, d1),
        2: IntMatrix._wrap(ne, len(fkeys), d2),
    }
    return FilteredComplex([vcells, ecells, fcells], bounds, steps=steps)


def _lower(table: Dict, key, i: int) -> None:
    old = table.get(key)
    if old is None or i < old:
        table[key] = i


def build_simplicial(img: DigitalImage, filt: Optional[FiltrationSpec] = None) -> FilteredComplex:
    """Two triangles per foreground pixel, split along the (r,c)-(r+1,c+1) diagonal.

    Simplices are tuples of vertices in lexicographic order and each degree
    is listed in lexicographic order. A cell's filtration index is the
    smallest index of a foreground pixel whose closure contains it.
    """
    filt = _resolve(img, filt)
    verts: Dict = {}
    edges: Dict = {}
    tris: Dict = {}
    for (r, c), i in filt.assignment.items():
        a, b, p, q = (r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)
        for v in (a, b, p, q):
            _lower(verts, v, i)
        for e in ((a, b), (a, p), (a, q), (b, q), (p, q)):
            _lower(edges, e, i)
        tris[(a, b, q)] = i
        tris[(a, p, q)] = i

    def boundary(t):
        x, y, z = t
        return (((y, z), 1), ((x, z), -1), ((x, y), 1))

    return _assemble(verts, edges, tris, filt.steps, boundary)


def build_cubical(img: DigitalImage, filt: Optional[FiltrationSpec] = None) -> FilteredComplex:
    """One square per foreground pixel with ``d = top + right - bottom - left``.

    Edges run from their smaller to their larger vertex; a square is keyed
    by its four corners in lexicographic order.
    """
    filt = _resolve(img, filt)
    verts: Dict = {}
    edges: Dict = {}
    squares: Dict = {}
    for (r, c), i in filt.assignment.items():
        a, b, p, q = (r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)
        for v in (a, b, p, q):
            _lower(verts, v, i)
        for e in ((a, b), (a, p), (b, q), (p, q)):
            _lower(edges, e, i)
        squares[(a, b, p, q)] = i

    def boundary(s):
        a, b, p, q = s
        return (((a, b), 1), ((b, q), 1), ((p, q), -1), ((a, p), -1))

    return _assemble(verts, edges, squares, filt.steps, boundary)


def cell_type_names(complex_kind: str) -> Tuple[str, str, str]:
    return ("vertices", "edges", "triangles" if complex_kind == "simplicial" else "squares")

