import numpy as np
import pytest

from fddilab import golden
from fddilab.fcs import CRC8, CRC16, G, GfPoly, is_codeword
from fddilab.search import (
    BoundExceeded,
    NotFoundWithinBound,
    PlacedPattern,
    burst_report,
    combined_polynomial,
    extent,
    find_undetected,
    min_degree_multiple,
    min_undetected_span,
    naive_undetected,
    sample_four_events,
    undetected_combinations,
    verify_table8,
)


def keyset(result):
    return {tuple((p.symbol_position, str(p.pattern)) for p in h) for h in result.hits}


@pytest.mark.parametrize("k,n,check", [(2, 40, CRC8), (3, 12, CRC8), (2, 200, CRC16)])
def test_meet_in_middle_matches_brute_force(k, n, check):
    fast = find_undetected(k, n, check=check)
    slow = naive_undetected(k, n, check=check)
    assert keyset(fast) == keyset(slow)
    if check is CRC8:
        assert fast.hits  # the 8-bit check misses some combinations
    for h in fast.hits:
        assert is_codeword(combined_polynomial(h), check.g)
        assert min(p.symbol_position for p in h) == 0
        assert max(p.last_symbol for p in h) < n


def test_single_and_pair_small_frame():
    assert find_undetected(1, 500).hits == []
    assert find_undetected(2, 500).hits == []


def test_bounds():
    with pytest.raises(BoundExceeded):
        find_undetected(4, 100)
    with pytest.raises(BoundExceeded):
        find_undetected(3, 5000)
    with pytest.raises(BoundExceeded):
        undetected_combinations(6, 10)


def test_placement_convention():
    p = PlacedPattern.place("0001-1000", 2)
    assert p.polynomial.bits == 0x18 << 8
    assert p.last_symbol == 3
    assert p.residue == GfPoly(0x18 << 8) % G
    with pytest.raises(ValueError):
        PlacedPattern.place("0010", -1)


@pytest.mark.parametrize("row,printed", golden.TABLE8)
def test_table8_rows_are_codewords(row, printed):
    for shift in (0, 17, 5000):
        placed = [PlacedPattern.place(p, s + shift) for s, p in row]
        assert is_codeword(combined_polynomial(placed))


def test_table8_rows_are_minimal_triples():
    # no sub-pair of a printed triple is itself undetected
    for row, _ in golden.TABLE8:
        placed = [PlacedPattern.place(p, s) for s, p in row]
        for i in range(3):
            pair = placed[:i] + placed[i + 1:]
            assert not is_codeword(combined_polynomial(pair))


def test_verify_table8(rng):
    rows = verify_table8(rng)
    assert all(r["ok"] for r in rows)


def test_extent():
    placed = [PlacedPattern.place("0010", 0), PlacedPattern.place("0001-0110", 10)]
    assert extent(placed) == 11


def test_min_span_weak_check():
    # brute force over all triples in 12 symbols is the oracle
    slow = naive_undetected(3, 12, check=CRC8)
    assert min_undetected_span(3, 12, check=CRC8) == min(extent(h) for h in slow.hits)


def test_four_event_combinations_are_codewords():
    hits = undetected_combinations(4, 8, check=CRC8)
    assert hits
    for h in hits:
        assert len(h) == 4
        assert is_codeword(combined_polynomial(h), CRC8.g)


@pytest.mark.parametrize("weight,degree", [(3, 91639), (4, 3006)])
def test_min_degree_multiple_fast_cases(weight, degree):
    poly = min_degree_multiple(weight, degree)
    assert poly.degree == degree and poly.weight == weight
    assert tuple(poly.exponents()) == golden.TABLE6[weight]


def test_min_degree_not_found():
    with pytest.raises(NotFoundWithinBound):
        min_degree_multiple(4, 3005)


def test_min_degree_weak_generator():
    # x^8+x^4+x^3+x^2+1 is primitive, so 1 + x^255 is its first weight-2 multiple
    assert min_degree_multiple(2, 300, CRC8.g).exponents() == [0, 255]


def test_burst_structure_weak_generator():
    r = burst_report(frame_bits=64, g=CRC8.g, exhaustive_width=8)
    assert r["short_bursts_undetected"] == 0
    assert r["structural_max_detected_burst"] == 8 and r["unit_shift"]
    assert r["undetected_per_offset"] == 1 and r["interior_patterns"] == 2 ** 7


def test_burst_exhaustive_count_weak_generator():
    # brute force: 9-bit bursts 1 b7..b1 1 that are multiples of g
    g = CRC8.g.bits
    hits = [v for v in range(1 << 7) if GfPoly((1 << 8) | (v << 1) | 1) % CRC8.g == GfPoly(0)]
    assert hits == [(g >> 1) & 0x7F]


def test_four_event_sampling_weak_check(rng):
    r = sample_four_events(200_000, 200, check=CRC8, rng=rng)
    sigma = np.sqrt(2 ** -8 * (1 - 2 ** -8) / 200_000)
    assert abs(r["fraction"] - 2 ** -8) < 4 * sigma


def test_table8_complete_at_maximum_frame():
    found = find_undetected(3, 8990, enforce_bound=False)
    got = {tuple((s, str(p)) for s, p in c) for c in found.offset_classes()}
    assert got == {row for row, _ in golden.TABLE8}
