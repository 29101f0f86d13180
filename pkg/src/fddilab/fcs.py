"""GF(2) polynomial arithmetic and the 32-bit frame check sequence.

Polynomials are Python integers (bit i is the coefficient of x^i) wrapped in
:class:`GfPoly`. Frame bits map to exponents the way the FCS is defined: the
last data-bit before the ending delimiter is x^0, earlier bits get higher
powers, so a bit sequence in transmission order reads most significant first.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

# x^32 + x^26 + x^23 + x^22 + x^16 + x^12 + x^11 + x^10 + x^8 + x^7 + x^5 + x^4 + x^2 + x + 1
FCS_EXPONENTS = (32, 26, 23, 22, 16, 12, 11, 10, 8, 7, 5, 4, 2, 1, 0)


class ZeroModulus(ZeroDivisionError):
    pass


class TooShort(ValueError):
    pass


@dataclass(frozen=True)
class GfPoly:
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("coefficient mask must be non-negative")

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> "GfPoly":
        bits = 0
        for e in exponents:
            bits ^= 1 << e
        return cls(bits)

    @classmethod
    def from_bits(cls, bits: Sequence[int] | np.ndarray) -> "GfPoly":
        """Bit sequence in transmission order (first bit = highest power)."""
        arr = np.asarray(bits, dtype=np.uint8)
        if len(arr) == 0:
            return cls(0)
        pad = (-len(arr)) % 8
        packed = np.packbits(np.concatenate([np.zeros(pad, np.uint8), arr]))
        return cls(int.from_bytes(packed.tobytes(), "big"))

    @property
    def degree(self) -> int:
        """Highest exponent; -1 for the zero polynomial."""
        return self.bits.bit_length() - 1

    @property
    def weight(self) -> int:
        return bin(self.bits).count("1")

    def exponents(self) -> list[int]:
        out = []
        bits, e = self.bits, 0
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    def __bool__(self) -> bool:
        return self.bits != 0

    def __add__(self, other: "GfPoly") -> "GfPoly":
        return GfPoly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "GfPoly") -> "GfPoly":
        return GfPoly(clmul(self.bits, other.bits))

    def __mod__(self, other: "GfPoly") -> "GfPoly":
        return poly_mod(self, other)

    def shift(self, k: int) -> "GfPoly":
        return GfPoly(self.bits << k)

    def __str__(self) -> str:
        if not self.bits:
            return "0"
        terms = []
        for e in sorted(self.exponents()):
            terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
        return " + ".join(terms)


G = GfPoly.from_exponents(FCS_EXPONENTS)


def clmul(a: int, b: int) -> int:
    """Carry-less product of two coefficient masks."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    return out


@lru_cache(maxsize=64)
def _reduction_table(g: int) -> tuple[int, ...]:
    d = g.bit_length() - 1
    return tuple(_long_mod(t << d, g) for t in range(256))


def _long_mod(f: int, g: int) -> int:
    dg = g.bit_length() - 1
    while f.bit_length() - 1 >= dg:
        f ^= g << (f.bit_length() - 1 - dg)
    return f


def _bytes_mod(data: bytes, g: int, acc: int = 0) -> int:
    d = g.bit_length() - 1
    table = _reduction_table(g)
    mask = (1 << d) - 1
    for byte in data:
        acc = (acc << 8) | byte
        acc = (acc & mask) ^ table[acc >> d]
    return acc


def poly_mod(f: GfPoly | int, g: GfPoly | int = G) -> GfPoly:
    """Remainder of f divided by g over GF(2)."""
    fb = f.bits if isinstance(f, GfPoly) else f
    gb = g.bits if isinstance(g, GfPoly) else g
    if gb == 0:
        raise ZeroModulus("division by the zero polynomial")
    d = gb.bit_length() - 1
    if fb.bit_length() <= d:
        return GfPoly(fb)
    if d < 8 or fb.bit_length() < 64:
        return GfPoly(_long_mod(fb, gb))
    return GfPoly(_bytes_mod(fb.to_bytes((fb.bit_length() + 7) // 8, "big"), gb))


def mulmod(a: int, b: int, g: int = G.bits) -> int:
    return poly_mod(clmul(a, b), g).bits


@lru_cache(maxsize=4096)
def _xpow(k: int, g: int) -> int:
    d = g.bit_length() - 1
    if k < d:
        return 1 << k
    half = _xpow(k // 2, g)
    r = mulmod(half, half, g)
    if k & 1:
        r = _long_mod(r << 1, g)
    return r


def xpow_mod(k: int, g: GfPoly = G) -> GfPoly:
    """x^k mod g by square-and-multiply."""
    if k < 0:
        raise ValueError("exponent must be non-negative")
    return GfPoly(_xpow(k, g.bits))


def residue(exponents: Iterable[int], g: GfPoly = G) -> int:
    """Remainder of a sparse polynomial given by its exponents."""
    r = 0
    for e in exponents:
        r ^= _xpow(e, g.bits)
    return r


def is_codeword(e: GfPoly | Iterable[int], g: GfPoly = G) -> bool:
    """True when g divides e, i.e. the error pattern e escapes the check."""
    if isinstance(e, GfPoly):
        return not poly_mod(e, g)
    return residue(e, g) == 0


def powers_table(count: int, step: int = 1, g: GfPoly = G) -> list[int]:
    """[x^(step*i) mod g for i in range(count)], computed incrementally."""
    out = []
    r = 1
    mult = xpow_mod(step, g).bits
    for _ in range(count):
        out.append(r)
        r = mulmod(r, mult, g.bits)
    return out


_REV8 = bytes(int(format(i, "08b")[::-1], 2) for i in range(256))


def _reverse32(v: int) -> int:
    return int(format(v, "032b")[::-1], 2)


class Crc:
    """A frame check over generator ``g`` with the complementing convention.

    The check value C of payload M (k bits) is chosen so that the whole frame
    f = x^w M + C satisfies Mod(x^n I + x^w (f + I), g) = 0, where w = deg g,
    n = k + w and I = 1 + x + ... + x^(w-1). This is ordinary MSB-first CRC with
    an all-ones preset and a complemented result.
    """

    def __init__(self, g: GfPoly, name: str | None = None):
        self.g = g
        self.width = g.degree
        self.name = name or f"crc{self.width}"
        self._ones = (1 << self.width) - 1
        self._table = None
        if self.width >= 8:
            self._table = tuple(_long_mod(t << self.width, g.bits) for t in range(256))

    def __repr__(self) -> str:
        return f"Crc({self.name}, g={self.g})"

    @property
    def field_bits(self) -> int:
        return self.width

    def compute_bits(self, payload: Sequence[int] | np.ndarray) -> int:
        """Check value for an arbitrary-length data-bit sequence (polynomial route)."""
        m = GfPoly.from_bits(payload)
        k = len(payload)
        value = poly_mod(GfPoly((m.bits << self.width) ^ (self._ones << k)), self.g).bits
        return value ^ self._ones

    def check_bits(self, frame: Sequence[int] | np.ndarray) -> bool:
        n = len(frame)
        if n < self.width:
            raise TooShort(f"{n} bits cannot hold a {self.width}-bit check")
        f = GfPoly.from_bits(frame)
        total = (self._ones << n) ^ ((f.bits ^ self._ones) << self.width)
        return not poly_mod(GfPoly(total), self.g)

    def compute(self, payload: bytes | Sequence[int] | np.ndarray) -> int:
        if not isinstance(payload, (bytes, bytearray)):
            return self.compute_bits(payload)
        if self._table is None:
            return self.compute_bits(np.unpackbits(np.frombuffer(payload, np.uint8)))
        w = self.width
        mask = self._ones
        table = self._table
        reg = mask
        for byte in payload:
            reg = ((reg << 8) & mask) ^ table[((reg >> (w - 8)) ^ byte) & 0xFF]
        return reg ^ mask

    def check(self, frame: bytes | Sequence[int] | np.ndarray) -> bool:
        if not isinstance(frame, (bytes, bytearray)):
            return self.check_bits(frame)
        nbytes = self.width // 8
        if self.width % 8 or len(frame) < nbytes:
            if len(frame) * 8 < self.width:
                raise TooShort(f"{len(frame)} octets cannot hold a {self.width}-bit check")
            return self.check_bits(np.unpackbits(np.frombuffer(bytes(frame), np.uint8)))
        return self.compute(bytes(frame[:-nbytes])) == int.from_bytes(frame[-nbytes:], "big")

    def append(self, payload: bytes) -> bytes:
        return bytes(payload) + self.compute(bytes(payload)).to_bytes(self.width // 8, "big")


class _Fcs32(Crc):
    """The 32-bit FCS; octet input goes through zlib's reflected CRC-32."""

    def compute(self, payload):
        if isinstance(payload, (bytes, bytearray)):
            return _reverse32(zlib.crc32(bytes(payload).translate(_REV8)))
        return super().compute(payload)


FCS32 = _Fcs32(G, "fcs32")
# x^8 + x^4 + x^3 + x^2 + 1 (primitive): a deliberately weak check for desk-scale
# statistics. A primitive generator has no (x + 1) factor, so random errors
# slip through at close to 2^-8 regardless of their parity.
CRC8 = Crc(GfPoly.from_exponents((8, 4, 3, 2, 0)), "crc8")
# x^16 + x^12 + x^5 + 1
CRC16 = Crc(GfPoly.from_exponents((16, 12, 5, 0)), "crc16")
CHECKS = {c.name: c for c in (FCS32, CRC16, CRC8)}


def fcs_compute(payload: bytes | Sequence[int] | np.ndarray) -> int:
    return FCS32.compute(payload)


def fcs_check(frame: bytes | Sequence[int] | np.ndarray) -> bool:
    return FCS32.check(frame)
