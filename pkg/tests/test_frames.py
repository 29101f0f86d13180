import numpy as np
import pytest
from hypothesis import given, strategies as st

from fddilab.fcs import CRC16, FCS32
from fddilab.frames import (
    OddInfoLength,
    StationPolicy,
    Token,
    TokenFcUsedForFrame,
    build_frame,
    fc_exempt,
    frame_for_size,
    hex_digits,
    is_token_fc,
    parse,
    relay,
    repeat_station,
    validate,
    validate_token,
)

DA = "0000F81A2B3C"
SA = "08002B0102AB"

hexes = st.text(alphabet="0123456789ABCDEF", max_size=12).map(lambda s: s[: len(s) // 2 * 2])


def only_frame(stream):
    frames = parse(stream).frames
    assert len(frames) == 1
    return frames[0]


def test_build_and_parse():
    f = build_frame("50", DA, SA, "C0FFEE")
    assert f.symbols() == "IIIIJK50" + DA + SA + "C0FFEE" + f.fcs + "TRRR"
    assert FCS32.check(f.payload())
    c = only_frame(f.symbols())
    assert c.body == f.data_symbols and c.indicators == "RRR" and c.start == 4
    assert validate(c).valid


@given(hexes)
def test_any_built_frame_is_valid(info):
    f = build_frame("51", DA, SA, info)
    for mode in ("enhanced", "baseline", "option_a"):
        assert validate(only_frame(f.symbols()), mode=mode).valid


def test_narrow_check_field():
    f = build_frame("50", DA, SA, check=CRC16)
    assert len(f.fcs) == 8 and f.fcs.startswith("0000")
    assert validate(only_frame(f.symbols()), check=CRC16).valid
    assert not validate(only_frame(f.symbols()), check=FCS32).valid


def test_build_rejects():
    with pytest.raises(OddInfoLength):
        build_frame("50", DA, SA, "ABC")
    with pytest.raises(TokenFcUsedForFrame):
        build_frame("80", DA, SA)
    with pytest.raises(ValueError):
        build_frame("50", DA[:-1], SA)
    with pytest.raises(ValueError):
        build_frame("50", DA, SA, "JK")


def test_bad_fcs():
    f = build_frame("50", DA, SA, "00")
    s = f.symbols().replace("K50" + DA + SA + "00", "K50" + DA + SA + "01")
    assert validate(only_frame(s)).failure == "bad_fcs"


def test_symbol_violation_aborts():
    s = build_frame("50", DA, SA).symbols()
    s = s[:10] + "V" + s[11:]
    c = only_frame(s)
    assert c.aborted == "symbol_violation"
    assert validate(c).failure == "symbol_violation"


def test_odd_length():
    body = "50" + DA + SA + "0" * 9
    assert validate(only_frame("IIJK" + body + "TRRR")).failure == "bad_length"


def test_short_frame():
    assert validate(only_frame("IIJK50" + DA + "TRRR")).failure == "framing_violation"


def test_e_indicator_modes():
    f = build_frame("50", DA, SA, indicators="SRR")
    c = only_frame(f.symbols())
    assert validate(c).failure == "e_indicator_not_R"
    assert validate(c, mode="baseline").valid
    g = build_frame("50", DA, SA, indicators="RTR")
    cg = only_frame(g.symbols())
    assert validate(cg).valid
    assert validate(cg, mode="option_a").failure == "a_indicator_not_R_or_S"


def test_fc_classes():
    assert is_token_fc("80") and is_token_fc("C0") and not is_token_fc("50")
    assert fc_exempt("00") and fc_exempt("48") and fc_exempt("E2") and fc_exempt("20")
    assert not fc_exempt("50") and not fc_exempt("13")


def test_exempt_frame_skips_fcs():
    body = "20" + DA + SA + "00000000"
    assert validate(only_frame("IIJK" + body + "TRRR")).valid


def test_token():
    for restricted in (False, True):
        t = Token(restricted)
        (c,) = parse(t.symbols()).candidates
        assert c.kind == "token" and validate_token(c)
    (c,) = parse("IIJK50TT").candidates
    assert not validate_token(c)


def test_relay_marks_bad_fcs():
    f = build_frame("50", DA, SA, "00")
    bad = f.symbols().replace(SA + "00", SA + "01")
    out = relay(bad)
    assert out.endswith("TSRR") and len(out) == len(bad)
    assert relay(f.symbols()) == f.symbols()


def test_relay_strips_aborted_frame():
    s = build_frame("50", DA, SA).symbols()
    s = s[:12] + "Q" + s[13:] + "JK80TT"
    out = relay(s)
    assert out[12:].startswith("I" * (len(s) - 6 - 12))
    assert out.endswith("JK80TT")


def test_address_recognition():
    f = build_frame("50", DA, SA)
    seen = repeat_station(f, StationPolicy(address=DA))
    assert seen.indicators == "RSS"
    assert repeat_station(f, StationPolicy(address=SA)).indicators == "RRR"


def test_relay_baseline_keeps_odd_e():
    f = build_frame("50", DA, SA, indicators="TRR")
    assert relay(f.symbols(), StationPolicy(mode="baseline")).endswith("TTRR")
    assert relay(f.symbols()).endswith("TSRR")


def test_frame_for_size(rng):
    f = frame_for_size(45000, rng)
    assert f.code_bits == 45000 and FCS32.check(f.payload())
    with pytest.raises(ValueError):
        frame_for_size(45005, rng)


def test_hex_digits():
    assert hex_digits(np.array([0, 10, 15])) == "0AF"
