"""Single noise events and their effect on data symbols.

A noise event inverts the received level of one code cell. Under NRZI that
changes the code-bit of the struck cell and of the cell after it, so every
event touches at most two symbols.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from functools import lru_cache

from .coding import DATA_SYMBOLS, LevelStream, Symbol, decode_group

# Changed code-bit positions for each of the six ways noise can touch a symbol.
POSITION_SETS = ((1,), (1, 2), (2, 3), (3, 4), (4, 5), (5,))
VIOLATION_CLASS = frozenset("QIHVv")


class IndexOutOfRange(IndexError):
    pass


@dataclass(frozen=True)
class NoiseEvent:
    """A misjudged level in one code cell; index -1 is the cell before the stream."""

    cell_index: int


def apply_noise(stream: LevelStream, event: NoiseEvent | int) -> LevelStream:
    index = event.cell_index if isinstance(event, NoiseEvent) else int(event)
    if not -1 <= index < len(stream):
        raise IndexOutOfRange(f"cell {index} outside [-1, {len(stream)})")
    if index == -1:
        return LevelStream(stream.levels.copy(), stream.leading ^ 1)
    levels = stream.levels.copy()
    levels[index] ^= 1
    return LevelStream(levels, stream.leading)


@dataclass(frozen=True, order=True)
class ErrorPattern:
    """XOR mask over the data-bits of one symbol (4 bits) or two adjacent symbols (8 bits).

    For an 8-bit pattern the high nibble belongs to the symbol transmitted first.
    """

    value: int
    width: int = 4

    def __post_init__(self):
        if self.width not in (4, 8) or not 0 < self.value < (1 << self.width):
            raise ValueError(f"bad error pattern {self.value:#x}/{self.width}")

    @classmethod
    def parse(cls, text: str) -> "ErrorPattern":
        digits = text.replace("-", "")
        return cls(int(digits, 2), len(digits))

    @property
    def symbols(self) -> int:
        return self.width // 4

    def __str__(self) -> str:
        bits = format(self.value, f"0{self.width}b")
        return bits if self.width == 4 else f"{bits[:4]}-{bits[4:]}"


def _mask(positions: tuple[int, ...]) -> int:
    return sum(1 << (5 - p) for p in positions)


def symbol_effect(s: Symbol | str, changed_positions: tuple[int, ...]) -> Symbol:
    s = Symbol(s)
    if not s.is_data:
        raise ValueError(f"{s.name} is not a data symbol")
    positions = tuple(sorted(changed_positions))
    if positions not in POSITION_SETS:
        raise ValueError(f"one noise event cannot change positions {positions}")
    return decode_group(s.code_group ^ _mask(positions))


def pair_effect(a: Symbol | str, b: Symbol | str) -> tuple[Symbol, Symbol]:
    """Noise on the boundary between ``a`` and ``b``: last bit of a, first bit of b."""
    return symbol_effect(a, (5,)), symbol_effect(b, (1,))


def percent(count: int, total: int) -> str:
    value = Decimal(count) * 100 / Decimal(total)
    return str(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _intra_category(sym: Symbol) -> str:
    if sym.value in VIOLATION_CLASS:
        return "violation"
    return "data" if sym.is_data else sym.value


def _inter_category(first: Symbol, second: Symbol) -> str:
    if first.value in VIOLATION_CLASS or second.value in VIOLATION_CLASS:
        return "violation"
    return f"{_intra_category(first)}-{_intra_category(second)}"


@dataclass(frozen=True)
class EffectTabulation:
    """Exhaustive effect of one noise event on uniformly random data symbols.

    Intrasymbol outcomes weigh 1/(16*5) each and intersymbol outcomes
    1/(256*5), so the two blocks together cover every noise event that can
    strike a data symbol.
    """

    effects: dict[str, tuple[Symbol, ...]]
    error_patterns: dict[str, tuple[str | None, ...]]
    intra_counts: dict[str, int]
    inter_counts: dict[str, int]
    pattern_counts: dict[str, int]
    pattern_weights: dict[str, Fraction] = field(repr=False)

    def intra_percent(self, category: str) -> str:
        return percent(self.intra_counts.get(category, 0), 16 * 5)

    def inter_percent(self, category: str) -> str:
        return percent(self.inter_counts.get(category, 0), 256 * 5)

    def pattern_percent(self, pattern: str) -> str:
        return percent(self.pattern_counts[pattern], 16 * 5 if "-" not in pattern else 256 * 5)

    def fraction(self, outcome: str, rounded: bool = True) -> float:
        """Share of all data-symbol noise events ending in ``outcome``.

        ``outcome`` is an intrasymbol category ("data", "T", ...), an
        intersymbol one ("data-T", ...), or an error pattern. With ``rounded``
        the share is taken from the two-decimal percentage, as printed.
        """
        if outcome in self.pattern_counts:
            exact = self.pattern_weights[outcome]
            text = self.pattern_percent(outcome)
        elif outcome in self.inter_counts:
            exact = Fraction(self.inter_counts[outcome], 256 * 5)
            text = self.inter_percent(outcome)
        else:
            exact = Fraction(self.intra_counts.get(outcome, 0), 16 * 5)
            text = self.intra_percent(outcome)
        return float(Decimal(text) / 100) if rounded else float(exact)

    @property
    def symbol_violation_share(self) -> Fraction:
        return Fraction(self.intra_counts["violation"], 80) + Fraction(self.inter_counts["violation"], 1280)

    @property
    def data_share(self) -> Fraction:
        return Fraction(self.intra_counts["data"], 80) + Fraction(self.inter_counts.get("data-data", 0), 1280)

    @property
    def control_share(self) -> Fraction:
        return 1 - self.symbol_violation_share - self.data_share


@lru_cache(maxsize=1)
def tabulate_effects() -> EffectTabulation:
    effects = {}
    error_patterns = {}
    intra = Counter()
    patterns = Counter()
    for s in DATA_SYMBOLS:
        row = tuple(symbol_effect(s, pos) for pos in POSITION_SETS)
        effects[s] = row
        error_patterns[s] = tuple(
            format(int(s, 16) ^ r.data_value, "04b") if r.is_data else None for r in row
        )
        for r, pattern in zip(row[1:5], error_patterns[s][1:5]):
            intra[_intra_category(r)] += 1
            if pattern is not None:
                patterns[pattern] += 1

    inter = Counter()
    for a in DATA_SYMBOLS:
        for b in DATA_SYMBOLS:
            ra, rb = pair_effect(a, b)
            category = _inter_category(ra, rb)
            inter[category] += 1
            if category == "data-data":
                first = int(a, 16) ^ ra.data_value
                second = int(b, 16) ^ rb.data_value
                patterns[f"{first:04b}-{second:04b}"] += 1

    weights = {
        p: Fraction(c, 80 if "-" not in p else 1280) for p, c in patterns.items()
    }
    return EffectTabulation(
        effects=effects,
        error_patterns=error_patterns,
        intra_counts=dict(intra),
        inter_counts=dict(inter),
        pattern_counts=dict(sorted(patterns.items(), key=lambda kv: ("-" in kv[0], kv[0]))),
        pattern_weights=weights,
    )


def error_patterns() -> tuple[ErrorPattern, ...]:
    """The data error patterns a single noise event can produce."""
    return tuple(ErrorPattern.parse(p) for p in tabulate_effects().pattern_counts)
