"""Cut verdicts and their bit-exact encoding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .wire import Bits, id_width, unpack

KAPPA_BITS = 16


@dataclass(frozen=True)
class CutResult:
    """``Cut(S)`` with ``|S| <= kappa``, ``NoCutWithin(kappa)`` or a timeout."""

    kind: str  # "cut", "none" or "timeout"
    kappa: int
    vertices: tuple[int, ...] = ()

    @staticmethod
    def cut(kappa: int, vertices: Iterable[int]) -> "CutResult":
        return CutResult("cut", kappa, tuple(sorted(vertices)))

    @staticmethod
    def none(kappa: int) -> "CutResult":
        return CutResult("none", kappa)

    @staticmethod
    def timeout(kappa: int) -> "CutResult":
        return CutResult("timeout", kappa)

    @property
    def is_cut(self) -> bool:
        return self.kind == "cut"

    def encode(self, n: int) -> Bits:
        if self.kind == "timeout":
            raise ValueError("a timeout has no wire encoding")
        bits = Bits(1 if self.is_cut else 0, 1) + Bits(self.kappa, KAPPA_BITS)
        w = id_width(n)
        for v in self.vertices:
            bits = bits + Bits(v, w)
        return bits

    @staticmethod
    def decode(bits: Bits, n: int) -> "CutResult":
        w = id_width(n)
        count = (bits.length - 1 - KAPPA_BITS) // w
        fields = unpack(bits.value, [1, KAPPA_BITS] + [w] * count)
        if fields[0] == 0:
            return CutResult.none(fields[1])
        return CutResult.cut(fields[1], fields[2:])

    def label(self) -> str:
        return {"cut": "cut", "none": "none", "timeout": "timeout"}[self.kind]
