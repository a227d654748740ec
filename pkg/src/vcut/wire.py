"""Bit-exact wire vocabulary: vertex IDs, sized counters and flags."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union


class WidthError(ValueError):
    """A field value does not fit its declared width."""


def id_width(n: int) -> int:
    """Bits of one vertex-ID field: ceil(log2(n + 1))."""
    return max(1, n.bit_length()) if n >= 1 else 1


@dataclass(frozen=True)
class Bits:
    """A bit string; ``value`` holds the bits MSB-first in ``length`` bits."""

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0 or self.value < 0 or self.value >> self.length:
            raise WidthError(f"value {self.value} does not fit {self.length} bits")

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def __len__(self) -> int:
        return self.length

    def hex(self) -> str:
        digits = max(1, (self.length + 3) // 4)
        return format(self.value, f"0{digits}x")

    def __add__(self, other: "Bits") -> "Bits":
        return Bits((self.value << other.length) | other.value, self.length + other.length)


class Id(NamedTuple):
    value: int


class Flag(NamedTuple):
    value: bool


class Counter(NamedTuple):
    value: int
    width: int


Field = Union[Id, Flag, Counter]


def pack(values: Sequence[int], widths: Sequence[int]) -> int:
    out = 0
    for v, w in zip(values, widths):
        if v < 0 or v >> w:
            raise WidthError(f"value {v} does not fit {w} bits")
        out = (out << w) | v
    return out


def unpack(payload: int, widths: Sequence[int]) -> list[int]:
    out = []
    for w in reversed(widths):
        out.append(payload & ((1 << w) - 1))
        payload >>= w
    out.reverse()
    return out


def measure_bits(payload: Sequence[Field], n: int) -> Bits:
    """Canonical encoding of a structured payload."""
    wid = id_width(n)
    bits = Bits(0, 0)
    for f in payload:
        if isinstance(f, Id):
            if not 0 <= f.value <= n:
                raise WidthError(f"id {f.value} outside [0, {n}]")
            bits = bits + Bits(f.value, wid)
        elif isinstance(f, Flag):
            bits = bits + Bits(1 if f.value else 0, 1)
        elif isinstance(f, Counter):
            if f.value < 0 or f.value >> f.width:
                raise WidthError(f"counter {f.value} does not fit {f.width} bits")
            bits = bits + Bits(f.value, f.width)
        else:
            raise TypeError(f"not a wire field: {f!r}")
    return bits
