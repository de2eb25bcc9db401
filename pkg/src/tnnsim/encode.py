"""Spike-time encoding of pixel intensities.

Three encoder families convert 8-bit intensities into spike times inside a
gamma cycle of ``period`` clock steps. Every family produces a positive and
a negative channel per pixel, the negative channel encoding the reflected
intensity, so an encoded volley always carries ``2 * pixel_count`` lines
(the positive block first, then the negative block).

Reference formulas
------------------
posneg
    pos = 1 iff intensity > threshold, neg = 1 otherwise (equal intensity
    joins the negative side so the channels stay exact complements). A set
    bit spikes at time 0; a clear bit never spikes.
linear
    intensity 0 never spikes; otherwise the intensity is quantized to a
    level ``ceil(v * period / 256)`` in ``1..period`` and the spike lands at
    ``period - level``. Level 1 (the dimmest) spikes at ``period - 1`` and a
    full-scale intensity spikes at time 0.
log
    intensity 0 never spikes; otherwise
    ``time = min(period - 1, floor(log2(255 / v) * (period - 1) / 8))``,
    so each halving of brightness delays the spike by about an eighth of
    the usable window.

Both graded codes are monotone: a brighter pixel never spikes later than a
dimmer one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

INF = float("inf")

SpikeTime = Union[int, float]
"""A spike time is a finite cycle index, or ``INF`` when no spike occurs."""


def is_spike(t: SpikeTime) -> bool:
    """True when ``t`` is a real (finite) spike."""
    return t != INF


@dataclass(frozen=True)
class PosNeg:
    """Threshold binarizer; both channels spike at time 0 or never."""

    threshold: int = 127

    def __post_init__(self):
        if not 0 <= self.threshold <= 255:
            raise ValueError(f"threshold must be in 0..255, got {self.threshold}")


@dataclass(frozen=True)
class Linear:
    period: int = 16

    def __post_init__(self):
        if self.period < 2:
            raise ValueError(f"period must be >= 2, got {self.period}")


@dataclass(frozen=True)
class Log:
    period: int = 16

    def __post_init__(self):
        if self.period < 2:
            raise ValueError(f"period must be >= 2, got {self.period}")


EncoderKind = Union[PosNeg, Linear, Log]


@dataclass(frozen=True)
class SpikeVolley:
    """Spike times presented to a layer in one gamma cycle.

    ``times[:pixel_count]`` is the positive channel and the remainder the
    negative channel, one line per pixel in each block.
    """

    times: tuple[SpikeTime, ...]
    pixel_count: int

    def __post_init__(self):
        if len(self.times) != 2 * self.pixel_count:
            raise ValueError(
                f"volley must hold 2 * {self.pixel_count} lines, got {len(self.times)}"
            )

    @property
    def positive(self) -> tuple[SpikeTime, ...]:
        return self.times[: self.pixel_count]

    @property
    def negative(self) -> tuple[SpikeTime, ...]:
        return self.times[self.pixel_count :]


def posneg_bits(pixel: int, threshold: int) -> tuple[int, int]:
    """Return the (positive, negative) bit pair for one pixel.

    Exactly one of the two bits is set: the positive bit when the pixel
    exceeds the threshold, the negative bit otherwise.
    """
    pos = 1 if pixel > threshold else 0
    return pos, 1 - pos


def bit_to_spiketime(bit: int) -> SpikeTime:
    """A set bit is a spike at time 0; a clear bit is no spike at all."""
    return 0 if bit else INF


def level_to_time(level: int, period: int) -> SpikeTime:
    """Map a quantized brightness level to its spike time.

    Level 0 never spikes; level 1 spikes last (``period - 1``) and levels at
    or above ``period`` spike at time 0.
    """
    if level <= 0:
        return INF
    return max(0, period - level)


def scalar_encode(value: int, kind: EncoderKind) -> SpikeTime:
    """Encode one intensity under a graded (linear or log) code."""
    if not isinstance(kind, (Linear, Log)):
        raise TypeError(f"scalar_encode requires a Linear or Log encoder, got {kind!r}")
    if value == 0:
        return INF
    if isinstance(kind, Linear):
        level = math.ceil(value * kind.period / 256)
        return level_to_time(level, kind.period)
    steps = math.floor(math.log2(255 / value) * (kind.period - 1) / 8)
    return min(kind.period - 1, steps)


def negate_then_encode(value: int, kind: EncoderKind) -> SpikeTime:
    """Encode the reflected intensity ``|value - 255|`` for the negative channel."""
    return scalar_encode(abs(value - 255), kind)


def encode_image(image, kind: EncoderKind) -> SpikeVolley:
    """Encode an image into a dual-channel volley.

    Accepts a ``dataio.PixelImage`` or any plain iterable of intensities
    (a flat list, a numpy row). The positive block comes first, then the
    negative block, so synapse line indices are stable across modules.
    """
    px = list(getattr(image, "pixels", image))
    if isinstance(kind, PosNeg):
        bits = [posneg_bits(p, kind.threshold) for p in px]
        pos = [bit_to_spiketime(b[0]) for b in bits]
        neg = [bit_to_spiketime(b[1]) for b in bits]
    else:
        pos = [scalar_encode(p, kind) for p in px]
        neg = [negate_then_encode(p, kind) for p in px]
    return SpikeVolley(times=tuple(pos + neg), pixel_count=len(px))


def format_spike_time(t: SpikeTime) -> str:
    return "inf" if t == INF else str(int(t))


def parse_spike_time(token: str) -> SpikeTime:
    if token == "inf":
        return INF
    return int(token)


def volley_to_line(volley: SpikeVolley) -> str:
    """One volley as a line of space-separated times, ``inf`` for no spike."""
    return " ".join(format_spike_time(t) for t in volley.times)


def volley_from_line(line: str, pixel_count: int) -> SpikeVolley:
    times = tuple(parse_spike_time(tok) for tok in line.split())
    return SpikeVolley(times=times, pixel_count=pixel_count)
