"""Reading and writing image datasets.

Two on-disk formats are supported:

* the classic big-endian IDX layout (magic 2051 for image files, 2049 for
  label files, 32-bit dimension sizes, then raw unsigned bytes), and
* a plain line-text layout with one image per line, pixels written as
  space-separated decimal intensities.

Line-text round trips are bit-exact: writing a dataset and reading it back
reproduces every pixel value.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Optional, Union

import numpy as np

IDX_IMAGE_MAGIC = 2051
IDX_LABEL_MAGIC = 2049

# Guard against running off a corrupt header: no sane dataset here declares
# more elements than this.
_MAX_DECLARED = 1 << 31


class IdxFormatError(ValueError):
    """Base class for malformed IDX input."""


class BadMagicError(IdxFormatError):
    """Magic number does not match the expected file kind."""


class TruncatedStreamError(IdxFormatError):
    """Header promises more payload bytes than the stream holds."""


class DimensionOverflowError(IdxFormatError):
    """Declared dimensions are implausibly large or overflow."""


class LabelRangeError(IdxFormatError):
    """A label byte falls outside 0..9."""


class LineTextError(ValueError):
    """Malformed line-text input."""


@dataclass(frozen=True)
class PixelImage:
    """One grayscale image, row-major, intensities 0..255."""

    pixels: tuple[int, ...]
    width: int
    height: int
    label: Optional[int] = None

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")
        if len(self.pixels) != self.width * self.height:
            raise ValueError(
                f"expected {self.width * self.height} pixels, got {len(self.pixels)}"
            )
        for p in self.pixels:
            if not 0 <= p <= 255:
                raise ValueError(f"pixel value {p} outside 0..255")
        if self.label is not None and not 0 <= self.label <= 9:
            raise LabelRangeError(f"label {self.label} outside 0..9")


@dataclass(frozen=True)
class LabeledDataset:
    """An ordered collection of images, optionally all labeled."""

    images: tuple[PixelImage, ...]

    def __len__(self) -> int:
        return len(self.images)

    def __iter__(self):
        return iter(self.images)

    def __getitem__(self, i: int) -> PixelImage:
        return self.images[i]

    @property
    def labels(self) -> tuple[Optional[int], ...]:
        return tuple(img.label for img in self.images)


def _as_bytes(data: Union[bytes, bytearray, BinaryIO]) -> bytes:
    if isinstance(data, (bytes, bytearray)):
        return bytes(data)
    return data.read()


def read_idx_images(data: Union[bytes, bytearray, BinaryIO]) -> LabeledDataset:
    """Parse an IDX image file into an unlabeled dataset.

    Raises ``BadMagicError``, ``DimensionOverflowError`` or
    ``TruncatedStreamError`` on malformed input; trailing bytes after the
    declared payload are ignored.
    """
    raw = _as_bytes(data)
    if len(raw) < 16:
        raise TruncatedStreamError(f"image header needs 16 bytes, stream has {len(raw)}")
    magic, count, rows, cols = struct.unpack(">iiii", raw[:16])
    if magic != IDX_IMAGE_MAGIC:
        raise BadMagicError(f"expected image magic {IDX_IMAGE_MAGIC}, got {magic}")
    for name, dim in (("count", count), ("rows", rows), ("cols", cols)):
        if dim < 0 or dim > _MAX_DECLARED:
            raise DimensionOverflowError(f"declared {name} {dim} out of range")
    need = count * rows * cols
    if need > _MAX_DECLARED:
        raise DimensionOverflowError(f"declared payload of {need} bytes is implausible")
    body = raw[16:]
    if len(body) < need:
        raise TruncatedStreamError(f"payload needs {need} bytes, stream has {len(body)}")
    pix = np.frombuffer(body[:need], dtype=np.uint8).reshape(count, rows * cols)
    images = tuple(
        PixelImage(pixels=tuple(int(v) for v in row), width=cols, height=rows)
        for row in pix
    )
    return LabeledDataset(images=images)


def read_idx_labels(
    data: Union[bytes, bytearray, BinaryIO], check_range: bool = True
) -> tuple[int, ...]:
    """Parse an IDX label file into a tuple of integer labels.

    With ``check_range`` (the default) any byte outside 0..9 raises
    ``LabelRangeError``.
    """
    raw = _as_bytes(data)
    if len(raw) < 8:
        raise TruncatedStreamError(f"label header needs 8 bytes, stream has {len(raw)}")
    magic, count = struct.unpack(">ii", raw[:8])
    if magic != IDX_LABEL_MAGIC:
        raise BadMagicError(f"expected label magic {IDX_LABEL_MAGIC}, got {magic}")
    if count < 0 or count > _MAX_DECLARED:
        raise DimensionOverflowError(f"declared count {count} out of range")
    body = raw[8:]
    if len(body) < count:
        raise TruncatedStreamError(f"payload needs {count} bytes, stream has {len(body)}")
    labels = tuple(int(b) for b in body[:count])
    if check_range:
        for i, lab in enumerate(labels):
            if lab > 9:
                raise LabelRangeError(f"label {lab} at index {i} outside 0..9")
    return labels


def write_idx_images(dataset: LabeledDataset, stream: BinaryIO) -> None:
    """Write images back out in IDX layout (inverse of ``read_idx_images``)."""
    if not dataset.images:
        raise ValueError("cannot write an empty dataset")
    first = dataset.images[0]
    for img in dataset.images:
        if (img.width, img.height) != (first.width, first.height):
            raise ValueError("all images in an IDX file must share dimensions")
    stream.write(struct.pack(">iiii", IDX_IMAGE_MAGIC, len(dataset.images), first.height, first.width))
    for img in dataset.images:
        stream.write(bytes(img.pixels))


def write_idx_labels(labels: Iterable[int], stream: BinaryIO) -> None:
    labs = list(labels)
    for i, lab in enumerate(labs):
        if not 0 <= lab <= 9:
            raise LabelRangeError(f"label {lab} at index {i} outside 0..9")
    stream.write(struct.pack(">ii", IDX_LABEL_MAGIC, len(labs)))
    stream.write(bytes(labs))


def attach_labels(dataset: LabeledDataset, labels: Iterable[int]) -> LabeledDataset:
    """Pair each image with its label; counts must match."""
    labs = tuple(labels)
    if len(labs) != len(dataset.images):
        raise ValueError(f"{len(dataset.images)} images but {len(labs)} labels")
    images = tuple(
        PixelImage(pixels=img.pixels, width=img.width, height=img.height, label=lab)
        for img, lab in zip(dataset.images, labs)
    )
    return LabeledDataset(images=images)


def write_linetext(dataset: LabeledDataset, stream: io.TextIOBase) -> None:
    """Write one image per line as space-separated decimal intensities."""
    for img in dataset.images:
        stream.write(" ".join(str(p) for p in img.pixels))
        stream.write("\n")


def read_linetext(
    stream: io.TextIOBase, width: int, height: int
) -> LabeledDataset:
    """Read a line-text file; every line must hold ``width * height`` pixels."""
    expected = width * height
    images = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            vals = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise LineTextError(f"line {lineno}: {exc}") from None
        if len(vals) != expected:
            raise LineTextError(
                f"line {lineno}: expected {expected} pixels, got {len(vals)}"
            )
        for v in vals:
            if not 0 <= v <= 255:
                raise LineTextError(f"line {lineno}: pixel value {v} outside 0..255")
        images.append(PixelImage(pixels=tuple(vals), width=width, height=height))
    return LabeledDataset(images=tuple(images))
