"""4B/5B symbol alphabet and NRZI modulation.

Symbols are single characters so that a symbol stream is an ordinary ``str``:
hex digits for data, ``Q I H`` for line states, ``J K T R S`` for control,
``V`` for a violation and ``v`` for a violation that a receiver treats as Halt.

Code groups are 5-bit integers whose most significant bit is the first
transmitted code-bit (bit position 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

LOW, HIGH = 0, 1


class Symbol(str, Enum):
    D0 = "0"
    D1 = "1"
    D2 = "2"
    D3 = "3"
    D4 = "4"
    D5 = "5"
    D6 = "6"
    D7 = "7"
    D8 = "8"
    D9 = "9"
    DA = "A"
    DB = "B"
    DC = "C"
    DD = "D"
    DE = "E"
    DF = "F"
    Q = "Q"
    I = "I"  # noqa: E741
    H = "H"
    J = "J"
    K = "K"
    T = "T"
    R = "R"
    S = "S"
    V = "V"
    VH = "v"

    def __str__(self) -> str:
        return self.value

    @property
    def kind(self) -> str:
        return SYMBOL_KIND[self.value]

    @property
    def is_data(self) -> bool:
        return self.value in DATA_SYMBOLS

    @property
    def data_value(self) -> int:
        if not self.is_data:
            raise ValueError(f"{self.name} carries no data-bits")
        return int(self.value, 16)

    @property
    def code_group(self) -> int:
        return _GROUP_OF[self.value]

    @classmethod
    def data(cls, value: int) -> "Symbol":
        return cls(format(value, "X"))


DATA_SYMBOLS = "0123456789ABCDEF"
LINE_STATE_SYMBOLS = "QIH"
CONTROL_SYMBOLS = "JKTRS"
VIOLATION_SYMBOLS = "Vv"

SYMBOL_KIND = {
    **{c: "data" for c in DATA_SYMBOLS},
    **{c: "line_state" for c in LINE_STATE_SYMBOLS},
    **{c: "control" for c in CONTROL_SYMBOLS},
    **{c: "violation" for c in VIOLATION_SYMBOLS},
}

# code group -> symbol, transcribed from the FDDI 4B/5B assignment
_TABLE = {
    0b11110: "0", 0b01001: "1", 0b10100: "2", 0b10101: "3",
    0b01010: "4", 0b01011: "5", 0b01110: "6", 0b01111: "7",
    0b10010: "8", 0b10011: "9", 0b10110: "A", 0b10111: "B",
    0b11010: "C", 0b11011: "D", 0b11100: "E", 0b11101: "F",
    0b00000: "Q", 0b11111: "I", 0b00100: "H",
    0b11000: "J", 0b10001: "K", 0b01101: "T", 0b00111: "R", 0b11001: "S",
    0b00001: "v", 0b00010: "v", 0b01000: "v", 0b10000: "v",
    0b00011: "V", 0b00101: "V", 0b00110: "V", 0b01100: "V",
}
_GROUP_OF = {sym: group for group, sym in _TABLE.items() if sym not in VIOLATION_SYMBOLS}
# one representative group per violation so Symbol.code_group is total
_GROUP_OF["V"] = 0b00011
_GROUP_OF["v"] = 0b00001

# 32-entry decode table usable with bytes.translate
DECODE_TABLE = bytes(ord(_TABLE[g]) for g in range(32)) + bytes(224)
_ENCODE_TABLE = bytearray(256)
for _sym, _group in _GROUP_OF.items():
    _ENCODE_TABLE[ord(_sym)] = _group
_ENCODE_TABLE = bytes(_ENCODE_TABLE)
_SHIFTS = np.array([4, 3, 2, 1, 0], dtype=np.uint8)
_WEIGHTS = np.array([16, 8, 4, 2, 1], dtype=np.uint8)


class AttemptToTransmitViolation(ValueError):
    """Raised when a V or VH symbol is handed to the encoder."""


def group_bits(group: int) -> tuple[int, ...]:
    return tuple((group >> (4 - i)) & 1 for i in range(5))


def bits_group(bits: Sequence[int]) -> int:
    group = 0
    for b in bits:
        group = (group << 1) | (int(b) & 1)
    return group


def encode_symbol(s: Symbol | str) -> tuple[int, ...]:
    """Return the five code-bits for a transmittable symbol, first bit first."""
    s = Symbol(s)
    if s.kind == "violation":
        raise AttemptToTransmitViolation(f"{s.name} must never be transmitted")
    return group_bits(_GROUP_OF[s.value])


def decode_group(group: int | Sequence[int]) -> Symbol:
    if not isinstance(group, (int, np.integer)):
        group = bits_group(group)
    if not 0 <= group < 32:
        raise ValueError(f"code group out of range: {group}")
    return Symbol(_TABLE[int(group)])


def encode_stream(symbols: str | Iterable[Symbol]) -> np.ndarray:
    """Symbol stream -> code-bit array (uint8, five bits per symbol)."""
    text = symbols if isinstance(symbols, str) else "".join(Symbol(s).value for s in symbols)
    bad = set(text) & set(VIOLATION_SYMBOLS)
    if bad:
        raise AttemptToTransmitViolation(f"stream contains violation symbols {sorted(bad)}")
    unknown = set(text) - set(_GROUP_OF)
    if unknown:
        raise ValueError(f"unknown symbol characters {sorted(unknown)}")
    groups = np.frombuffer(text.encode("ascii").translate(_ENCODE_TABLE), dtype=np.uint8)
    return ((groups[:, None] >> _SHIFTS) & 1).astype(np.uint8).reshape(-1)


def decode_stream(bits: Sequence[int] | np.ndarray) -> str:
    """Code-bit array -> symbol stream. Trailing bits short of a group are dropped."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = len(bits) // 5
    groups = bits[: 5 * n].reshape(n, 5) @ _WEIGHTS
    return groups.astype(np.uint8).tobytes().translate(DECODE_TABLE).decode("ascii")


@dataclass(frozen=True)
class LevelStream:
    """Received optical levels, one per code cell.

    ``leading`` is the level of the cell just before the first one.
    """

    levels: np.ndarray
    leading: int = LOW

    def __len__(self) -> int:
        return len(self.levels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LevelStream):
            return NotImplemented
        return self.leading == other.leading and np.array_equal(self.levels, other.levels)

    def __hash__(self) -> int:
        return hash((self.leading, self.levels.tobytes()))

    def inverted(self) -> "LevelStream":
        return LevelStream(self.levels ^ 1, self.leading ^ 1)


def nrzi_modulate(bits: Sequence[int] | np.ndarray, leading: int = LOW) -> LevelStream:
    bits = np.asarray(bits, dtype=np.uint8)
    levels = (np.cumsum(bits, dtype=np.int64) + leading) & 1
    return LevelStream(levels.astype(np.uint8), int(leading))


def nrzi_demodulate(stream: LevelStream) -> np.ndarray:
    levels = stream.levels
    if len(levels) == 0:
        return np.zeros(0, dtype=np.uint8)
    return np.diff(levels, prepend=np.uint8(stream.leading)).astype(np.uint8) & 1


def symbols_to_text(symbols: Iterable[Symbol | str]) -> str:
    return "".join(Symbol(s).value for s in symbols)


def parse_symbol_text(text: str) -> str:
    """Validate a user-supplied symbol string and return it normalised."""
    text = "".join(c if c == "v" else c.upper() for c in "".join(text.split()))
    unknown = set(text) - set(SYMBOL_KIND)
    if unknown:
        raise ValueError(f"unknown symbol characters {sorted(unknown)}")
    return text
