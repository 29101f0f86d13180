"""Residue searches for error patterns that slip past the frame check.

Symbol positions count backwards from the end of the data: position s holds
data-bits 4s..4s+3 of the frame polynomial, so a 4-bit pattern v at s is
v*x^(4s) and an 8-bit pattern at s covers symbols s and s+1, its high nibble
(transmitted first) at s+1.

Every search is meet-in-the-middle: residues of one side are sorted in a
numpy array and the other side is looked up with ``searchsorted``. Residues
are exact remainders, so a lookup hit is a codeword, not a hash collision.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import golden
from .fcs import CRC8, FCS32, G, Crc, GfPoly, is_codeword, poly_mod, xpow_mod
from .noise import ErrorPattern, error_patterns, tabulate_effects

MAX_SYMBOLS = {1: 9000, 2: 9000, 3: 3700}


class BoundExceeded(ValueError):
    pass


class NotFoundWithinBound(LookupError):
    pass


@lru_cache(maxsize=16)
def _powers(g_bits: int, count: int) -> np.ndarray:
    """x^t mod g for t < count, as uint64."""
    d = g_bits.bit_length() - 1
    top = 1 << d
    out = np.empty(count, dtype=np.uint64)
    r = 1
    for t in range(count):
        out[t] = r
        r <<= 1
        if r & top:
            r ^= g_bits
    out.setflags(write=False)
    return out


def _residue_rows(patterns, n_symbols: int, g: GfPoly) -> np.ndarray:
    """rows[i, s] = residue of pattern i placed at symbol s (s < n_symbols)."""
    xp = _powers(g.bits, 4 * n_symbols + 8)
    rows = np.zeros((len(patterns), n_symbols), dtype=np.uint64)
    base = 4 * np.arange(n_symbols)
    for i, pat in enumerate(patterns):
        for j in range(pat.width):
            if pat.value >> j & 1:
                rows[i] ^= xp[base + j]
    return rows


@dataclass(frozen=True, order=True)
class PlacedPattern:
    symbol_position: int
    pattern: ErrorPattern
    residue: GfPoly = field(compare=False, default=None)

    @classmethod
    def place(cls, pattern: ErrorPattern | str, position: int, g: GfPoly = G) -> "PlacedPattern":
        if isinstance(pattern, str):
            pattern = ErrorPattern.parse(pattern)
        if position < 0:
            raise ValueError("symbol positions are non-negative")
        poly = GfPoly(pattern.value << (4 * position))
        return cls(position, pattern, poly % g)

    @property
    def polynomial(self) -> GfPoly:
        return GfPoly(self.pattern.value << (4 * self.symbol_position))

    @property
    def last_symbol(self) -> int:
        return self.symbol_position + self.pattern.symbols - 1

    def to_dict(self) -> dict:
        return {"position": self.symbol_position, "pattern": str(self.pattern)}


def combined_polynomial(placed) -> GfPoly:
    bits = 0
    for p in placed:
        bits ^= p.pattern.value << (4 * p.symbol_position)
    return GfPoly(bits)


def extent(placed) -> int:
    """Highest minus lowest symbol touched."""
    return max(p.last_symbol for p in placed) - min(p.symbol_position for p in placed)


@dataclass
class SearchResult:
    k: int
    frame_data_symbols: int
    hits: list[tuple[PlacedPattern, ...]]
    check: str = "fcs32"
    elapsed: float = 0.0

    @property
    def min_span(self) -> int | None:
        return min((extent(h) for h in self.hits), default=None)

    def offset_classes(self) -> list[tuple[tuple[int, str], ...]]:
        return [tuple((p.symbol_position, str(p.pattern)) for p in h) for h in self.hits]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "frame_data_symbols": self.frame_data_symbols,
            "check": self.check,
            "min_span": self.min_span,
            "hits": [
                {
                    "placements": [p.to_dict() for p in h],
                    "span": extent(h),
                    "exponents": sorted(combined_polynomial(h).exponents()),
                }
                for h in self.hits
            ],
        }


def _canonical(placements) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(placements))


def _finish(raw, patterns, n_symbols, g) -> list[tuple[PlacedPattern, ...]]:
    """Drop placements that overflow the frame or cancel to zero; dedupe."""
    seen = set()
    out = []
    for combo in raw:
        key = _canonical(combo)
        if key in seen:
            continue
        seen.add(key)
        placed = tuple(PlacedPattern.place(patterns[i], s, g) for s, i in key)
        if max(p.last_symbol for p in placed) >= n_symbols:
            continue
        poly = combined_polynomial(placed)
        if not poly:
            continue
        assert is_codeword(poly, g)
        out.append(placed)
    out.sort(key=lambda h: (extent(h), h))
    return out


def _lookup(table: np.ndarray, queries: np.ndarray):
    """Pairs (query index, table index) with equal values; ``table`` sorted."""
    lo = np.searchsorted(table, queries, "left")
    hi = np.searchsorted(table, queries, "right")
    qi = np.nonzero(hi > lo)[0]
    for q in qi:
        for t in range(lo[q], hi[q]):
            yield int(q), int(t)


def _search_leading(a: int, k: int, n_symbols: int, g_bits: int, pattern_specs) -> list:
    """All zero-residue combinations with pattern ``a`` at symbol 0."""
    g = GfPoly(g_bits)
    patterns = [ErrorPattern(v, w) for v, w in pattern_specs]
    rows = _residue_rows(patterns, n_symbols, g)
    npat = len(patterns)
    flat = rows.ravel()
    order = np.argsort(flat, kind="stable")
    table = flat[order]
    head = rows[a, 0]
    raw = []
    if k == 1:
        if head == 0:
            raw.append(((0, a),))
    elif k == 2:
        for q, t in _lookup(table, np.array([head], dtype=np.uint64)):
            i, s = divmod(int(order[t]), n_symbols)
            raw.append(((0, a), (s, i)))
    else:
        queries = (rows ^ head).ravel()  # pattern b at s1
        for q, t in _lookup(table, queries):
            b, s1 = divmod(q, n_symbols)
            c, s2 = divmod(int(order[t]), n_symbols)
            raw.append(((0, a), (s1, b), (s2, c)))
    return raw


def find_undetected(
    k: int,
    data_symbols: int,
    *,
    check: Crc = FCS32,
    patterns=None,
    workers: int = 1,
    enforce_bound: bool = True,
) -> SearchResult:
    """Every placement of k error patterns in a frame of ``data_symbols`` that the check misses.

    Placements are reported translated so the lowest touched symbol is 0.
    """
    if k not in MAX_SYMBOLS:
        raise BoundExceeded(f"exhaustive search is limited to k <= 3, got {k}")
    if data_symbols < 1:
        raise ValueError("need at least one data symbol")
    if enforce_bound and data_symbols > MAX_SYMBOLS[k]:
        raise BoundExceeded(f"k={k} searches are limited to {MAX_SYMBOLS[k]} data symbols")
    patterns = list(patterns or error_patterns())
    specs = tuple((p.value, p.width) for p in patterns)
    t0 = time.perf_counter()
    args = [(a, k, data_symbols, check.g.bits, specs) for a in range(len(patterns))]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_search_leading, *zip(*args)))
    else:
        chunks = [_search_leading(*x) for x in args]
    raw = [c for chunk in chunks for c in chunk]
    hits = _finish(raw, patterns, data_symbols, check.g)
    return SearchResult(k, data_symbols, hits, check.name, time.perf_counter() - t0)


def naive_undetected(k: int, data_symbols: int, *, check: Crc = FCS32, patterns=None) -> SearchResult:
    """Brute-force oracle over all k-tuples; only for small frames."""
    patterns = list(patterns or error_patterns())
    g = check.g
    rows = _residue_rows(patterns, data_symbols, g)
    n = data_symbols
    raw = []
    idx = range(len(patterns))
    for a in idx:
        if k == 1:
            if rows[a, 0] == 0:
                raw.append(((0, a),))
            continue
        for b in idx:
            for s1 in range(n):
                r = int(rows[a, 0] ^ rows[b, s1])
                if k == 2:
                    if r == 0:
                        raw.append(((0, a), (s1, b)))
                    continue
                for c in idx:
                    for s2 in range(n):
                        if r == int(rows[c, s2]):
                            raw.append(((0, a), (s1, b), (s2, c)))
    hits = _finish(raw, patterns, n, g)
    return SearchResult(k, n, hits, check.name)


def min_undetected_span(k: int, data_symbols: int, *, check: Crc = FCS32, patterns=None) -> int | None:
    """Smallest extent of any undetected k-event combination fitting in ``data_symbols``."""
    hits = undetected_combinations(k, data_symbols, check=check, patterns=patterns)
    return min((extent(h) for h in hits), default=None)


def undetected_combinations(k: int, data_symbols: int, *, check: Crc = FCS32, patterns=None):
    """Undetected k-event combinations (k <= 5) anchored at symbol 0.

    For k > 3 the events split into a leading group anchored at symbol 0 and a
    free pair; this is practical for frames of a few hundred symbols.
    """
    if not 1 <= k <= 5:
        raise BoundExceeded("k must be between 1 and 5")
    if k <= 3:
        return find_undetected(k, data_symbols, check=check, patterns=patterns, enforce_bound=False).hits
    patterns = list(patterns or error_patterns())
    n = data_symbols
    rows = _residue_rows(patterns, n, check.g)
    npat = len(patterns)
    # free group: two patterns at s1 <= s2 anywhere
    s1, s2 = np.triu_indices(n)
    pi, pj = np.meshgrid(np.arange(npat), np.arange(npat), indexing="ij")
    pi, pj = pi.ravel(), pj.ravel()
    right = (rows[pi][:, s1] ^ rows[pj][:, s2]).ravel()
    order = np.argsort(right)
    table = right[order]
    m = len(s1)
    # leading group: pattern at 0 plus (k-3) more anywhere
    lead = [((0, a),) for a in range(npat)]
    lead_res = [rows[a, 0] for a in range(npat)]
    for _ in range(k - 3):
        lead2, res2 = [], []
        for pl, r in zip(lead, lead_res):
            for b in range(npat):
                for s in range(n):
                    lead2.append(pl + ((s, b),))
                    res2.append(r ^ rows[b, s])
        lead, lead_res = lead2, res2
    queries = np.array(lead_res, dtype=np.uint64)
    raw = []
    for q, t in _lookup(table, queries):
        pair, pos = divmod(int(order[t]), m)
        raw.append(lead[q] + ((int(s1[pos]), int(pi[pair])), (int(s2[pos]), int(pj[pair]))))
    return _finish(raw, patterns, n, check.g)


def verify_table8(rng: np.random.Generator | None = None, g: GfPoly = G) -> list[dict]:
    """Codeword check of each printed triple at i=0 and one random i, plus its probability."""
    from .analytics import RingParams, triple_probability

    rng = rng or np.random.default_rng()
    params = RingParams()
    out = []
    for row, printed in golden.TABLE8:
        i = int(rng.integers(1, 9000))
        at0 = is_codeword(combined_polynomial(PlacedPattern.place(p, s, g) for s, p in row), g)
        ati = is_codeword(combined_polynomial(PlacedPattern.place(p, s + i, g) for s, p in row), g)
        prob = triple_probability(params, row)
        out.append({
            "row": [(s, p) for s, p in row],
            "codeword_at_0": at0,
            "random_i": i,
            "codeword_at_i": ati,
            "probability": prob,
            "printed": printed,
            "relative_error": prob / printed - 1,
            "ok": at0 and ati and abs(prob / printed - 1) <= 0.02,
        })
    return out


def verify_table6(g: GfPoly = G) -> list[dict]:
    return [
        {"weight": w, "exponents": list(exps), "codeword": is_codeword(exps, g)}
        for w, exps in golden.TABLE6.items()
    ]


def _combos(n_terms: int, lo: int, hi: int):
    """All strictly increasing n_terms-tuples from [lo, hi) as an index array."""
    if n_terms == 1:
        return np.arange(lo, hi)[:, None]
    if n_terms == 2:
        a, b = np.triu_indices(hi - lo, 1)
        return np.stack([a + lo, b + lo], axis=1)
    raise ValueError("at most two terms per side")


def min_degree_multiple(weight: int, degree_bound: int, g: GfPoly = G) -> GfPoly:
    """Lowest-degree multiple of g with constant term 1 and exactly ``weight`` terms.

    Every exponent set with degree <= degree_bound is covered, so the first
    hit is minimal.
    """
    if not 2 <= weight <= 6:
        raise ValueError("weights 2..6 are supported")
    xp = _powers(g.bits, degree_bound + 1)
    free = weight - 1  # terms besides the constant
    left_n = free // 2  # terms strictly below the top one, looked up
    right_n = free - left_n  # includes the top term
    if left_n == 0:
        # weight 2: 1 + x^D
        hits = np.nonzero(xp[1:] == 1)[0]
        if not len(hits):
            raise NotFoundWithinBound(f"no weight-{weight} multiple up to degree {degree_bound}")
        return GfPoly.from_exponents((0, int(hits[0]) + 1))

    left = _combos(left_n, 1, degree_bound)
    left_res = np.bitwise_xor.reduce(xp[left], axis=1)
    order = np.argsort(left_res)
    table = left_res[order]

    # Walk the top degree upward in chunks so the right side stays small.
    per_top = max(1, degree_bound ** (right_n - 1) // math.factorial(right_n - 1))
    step = max(1, 4_000_000 // per_top)
    for top_lo in range(right_n, degree_bound + 1, step):
        top_hi = min(degree_bound + 1, top_lo + step)
        parts = []
        for t in range(top_lo, top_hi):
            rest = _combos(right_n - 1, 1, t) if right_n > 1 else np.empty((1, 0), dtype=np.int64)
            parts.append(np.column_stack([rest, np.full(len(rest), t)]))
        right = np.concatenate(parts)
        right_res = np.bitwise_xor.reduce(xp[right], axis=1) ^ np.uint64(1)
        best = None
        for q, t in _lookup(table, right_res):
            exps = set(right[q].tolist())
            lx = left[order[t]].tolist()
            if max(lx) >= right[q][-1] or exps & set(lx):
                continue
            cand = tuple(sorted(exps | set(lx) | {0}))
            if best is None or (cand[-1], cand) < (best[-1], best):
                best = cand
        if best is not None:
            poly = GfPoly.from_exponents(best)
            assert is_codeword(poly, g)
            return poly
    raise NotFoundWithinBound(f"no weight-{weight} multiple up to degree {degree_bound}")


def verify_table9() -> list[dict]:
    """Measured detection thresholds against the printed frame sizes.

    A row's claim is that every k-event combination is detected in frames of
    the printed data-symbol count, i.e. the smallest undetected span is at
    least that count. ``tight`` says whether the printed count is exactly the
    measured threshold.
    """
    out = []
    for k, (data, nondata, total, octets) in golden.TABLE9.items():
        if k == 3:
            span = find_undetected(3, 3700).min_span
        else:
            span = min_undetected_span(k, data + 20)
        holds = span is None or span >= data
        out.append({
            "events": k,
            "printed_data_symbols": data,
            "measured_min_span": span,
            "arithmetic_ok": data + nondata == total and total == 2 * octets,
            "claim_holds": holds,
            "tight": span == data,
        })
    return out


def burst_report(frame_bits: int = 512, g: GfPoly = G, exhaustive_width: int = 16) -> dict:
    """Undetected bursts by length.

    A burst of length b at offset i is x^i B(x) with B(0) = 1 and deg B = b-1.
    Since g(0) = 1, x is a unit mod g and x^i B is a codeword iff B is. For
    b <= deg g that never happens; for b = deg g + 1 only B = g does.
    """
    w = g.degree
    xp = _powers(g.bits, frame_bits + 1)
    # Direct residues of every burst up to exhaustive_width bits, every offset.
    short_hits = 0
    for i in range(frame_bits - 1):
        span = min(exhaustive_width, frame_bits - i)
        res = np.zeros(1, dtype=np.uint64)
        for j in range(span):
            res = np.concatenate([res, res ^ xp[i + j]])
        short_hits += int(np.count_nonzero(res[1::2] == 0))  # bit 0 set: burst starts at i
    # Bursts of exactly w+1 bits at offset 0, exhaustive over the interior.
    top = int(xp[w]) ^ 1
    interior_bits = w - 1
    long_hits = 0
    chunk = 1 << 24
    total = 1 << interior_bits
    for start in range(0, total, chunk):
        v = np.arange(start, min(total, start + chunk), dtype=np.uint64)
        long_hits += int(np.count_nonzero(((v << np.uint64(1)) ^ np.uint64(top)) == 0))
    return {
        "frame_bits": frame_bits,
        "short_bursts_checked_up_to": exhaustive_width,
        "short_bursts_undetected": short_hits,
        "structural_max_detected_burst": w,
        "unit_shift": bool(g.bits & 1),
        "burst_length": w + 1,
        "interior_patterns": total,
        "undetected_per_offset": long_hits,
        "undetected_fraction": long_hits / total,
    }


def sample_four_events(
    samples: int,
    data_symbols: int = 8990,
    *,
    check: Crc = FCS32,
    rng: np.random.Generator | None = None,
    weighted: bool = True,
) -> dict:
    """Monte Carlo estimate of the undetected fraction of random 4-event placements."""
    rng = rng or np.random.default_rng()
    patterns = list(error_patterns())
    tab = tabulate_effects()
    w = np.array([float(tab.pattern_weights[str(p)]) for p in patterns]) if weighted else np.ones(len(patterns))
    w = w / w.sum()
    rows = _residue_rows(patterns, data_symbols, check.g)
    hits = cancelled = 0
    done = 0
    batch = 1 << 21
    while done < samples:
        m = min(batch, samples - done)
        pat = rng.choice(len(patterns), size=(m, 4), p=w)
        pos = rng.integers(0, data_symbols - 1, size=(m, 4))
        res = rows[pat[:, 0], pos[:, 0]] ^ rows[pat[:, 1], pos[:, 1]] ^ rows[pat[:, 2], pos[:, 2]] ^ rows[pat[:, 3], pos[:, 3]]
        for r in np.nonzero(res == 0)[0]:
            bits = 0
            for j in range(4):
                bits ^= patterns[pat[r, j]].value << (4 * int(pos[r, j]))
            if bits:
                hits += 1
            else:
                cancelled += 1
        done += m
    effective = samples - cancelled
    return {
        "check": check.name,
        "samples": samples,
        "undetected": hits,
        "fraction": hits / effective if effective else math.nan,
        "expected": 2.0 ** -check.width,
    }
