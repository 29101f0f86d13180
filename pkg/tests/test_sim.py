import math

import numpy as np
import pytest

from fddilab.analytics import RingParams
from fddilab.fcs import CRC8, FCS32
from fddilab.frames import Token, build_frame, frame_for_size
from fddilab.sim import (
    CLASSES,
    InvalidSimConfig,
    OutcomeTally,
    SimConfig,
    UndetectedCase,
    _blocks,
    _run_block,
    apply_flips,
    binomial_sigma,
    exhaustive_pass_fraction,
    mechanism,
    merge_scenario,
    predictions,
    replay,
    report,
    run,
    run_token,
    single_event_sweep,
    simulate_frame_trial,
    token_single_flip_conversions,
    wilson_interval,
)

SMALL = RingParams(links=10, ber=1e-4, frame_bits=600)


def test_zero_ber_all_clean():
    t = run(SimConfig(RingParams(links=5, ber=0.0, frame_bits=600), trials=3000))
    assert t["delivered_clean"] == 3000 and t.trials == 3000
    assert run_token(SimConfig(RingParams(links=5, ber=0.0), trials=500))["delivered_clean"] == 500


def test_deterministic():
    cfg = SimConfig(SMALL, trials=5000, seed=7)
    assert run(cfg).to_dict() == run(cfg).to_dict()
    assert run(cfg).to_dict() != run(SimConfig(SMALL, trials=5000, seed=8)).to_dict()


def test_schedule_independent():
    cfg = SimConfig(SMALL, trials=1000, seed=3, block_size=256)
    parts = [_run_block(cfg, b, n) for b, n in _blocks(cfg)]
    forward = sum(parts, OutcomeTally())
    backward = sum(reversed(parts), OutcomeTally())
    assert forward.to_dict() == backward.to_dict() == run(cfg).to_dict()


def test_tally_sums_to_trials():
    t = run(SimConfig(SMALL, trials=4000, seed=1))
    assert sum(t.counts.values()) == t.trials == 4000
    assert set(t.counts) <= set(CLASSES)


def test_frame_error_matches_closed_form():
    cfg = SimConfig(SMALL, trials=20000, seed=11)
    t = run(cfg)
    p = predictions(SMALL)["frame_error"]
    assert abs(t.error_fraction - p) < 3 * binomial_sigma(p, t.trials)


def test_token_loss_matches_closed_form():
    ring = RingParams(links=50, ber=1e-4)
    t = run_token(SimConfig(ring, trials=200_000, seed=2))
    p = predictions(ring)["token_loss"]
    lost = t["token_lost"] + t["token_converted"]
    assert abs(lost / t.trials - p) < 3 * binomial_sigma(p, t.trials)


def test_token_single_flip_never_converts():
    for restricted in (False, True):
        out = token_single_flip_conversions(restricted)
        assert out.get("token_converted", 0) == 0
        assert sum(out.values()) == 5 * len(Token(restricted).symbols()) + 1


def test_single_event_sweep_small_frame(rng):
    frame = frame_for_size(600, rng, fc="13")
    out = single_event_sweep(frame)
    assert "undetected_error" not in out
    assert sum(out.values()) == 601


def test_apply_flips():
    s = "IIJK00"
    assert apply_flips(s, (), 30) == s
    # cell 9 joins the second I to J: I -> 11110 (0), J -> 01000 (a violation)
    assert apply_flips(s, (9,), 30) == "I0vK00"
    with pytest.raises(IndexError):
        apply_flips(s, (30,), 30)


def test_apply_flips_matches_noise_model():
    from fddilab.coding import decode_stream, encode_stream, nrzi_demodulate, nrzi_modulate
    from fddilab.noise import apply_noise

    s = "IIIIJK5A0123TRRRII"
    n = 5 * (len(s) - 2)
    lv = nrzi_modulate(encode_stream(s))
    for c in range(-1, n):
        assert apply_flips(s, (c,), n) == decode_stream(nrzi_demodulate(apply_noise(lv, c)))


def test_config_validation():
    with pytest.raises(InvalidSimConfig):
        SimConfig(SMALL, trials=0)
    with pytest.raises(InvalidSimConfig):
        SimConfig(RingParams(ber=0.5))
    with pytest.raises(InvalidSimConfig):
        SimConfig(RingParams(frame_bits=601))
    with pytest.raises(InvalidSimConfig):
        SimConfig(SMALL, destination=11)


def test_undetected_cases_replay():
    cfg = SimConfig(RingParams(links=4, ber=1e-3, frame_bits=600), trials=2000, seed=2, check=CRC8, mode="baseline")
    t = run(cfg)
    assert t["undetected_error"] == len(t.cases) == 2
    assert {mechanism(c, CRC8) for c in t.cases} == {"false_delimiter", "fcs_codeword"}
    for case in t.cases:
        outcome, cand = replay(case, CRC8)
        assert outcome == "undetected_error" and cand.body == case.accepted.body


def test_forged_exempt_frame():
    """A false JK ahead of an FC of the form XX10 XXXX gives a frame with no FCS check."""
    info = "00" * 4 + "E2" + "00" * 30
    frame = build_frame("13", "0" * 12, "1" * 12, info)
    start = frame.symbols().index("E2", 30)
    # 00 -> JK is 11110 11110 -> 11000 10001, i.e. bit pairs (2,3), (6,7), (8,9)
    first = 5 * (start - 2)
    cells = (first + 2, first + 6, first + 8)
    flips = (tuple(sorted(cells)),)
    stream = apply_flips(frame.symbols() + "II", flips[0], frame.code_bits)
    assert stream[start - 2:start + 2] == "JKE2"
    case = UndetectedCase(frame.symbols(), flips, 1, "enhanced", None)
    outcome, cand = replay(case)
    assert outcome == "undetected_error" and cand.fc == "E2"
    case.accepted = cand
    assert mechanism(case) == "false_delimiter"


def test_same_noise_across_modes():
    ring = RingParams(links=4, ber=1e-3, frame_bits=600)
    a = run(SimConfig(ring, trials=2000, seed=9, mode="enhanced"))
    b = run(SimConfig(ring, trials=2000, seed=9, mode="baseline"))
    assert a["delivered_clean"] == b["delivered_clean"]
    assert a.error_fraction == b.error_fraction


def test_merge_degenerate_cut():
    f = frame_for_size(5 * 70, np.random.default_rng(0))
    body = f.data_symbols
    assert FCS32.check(bytes.fromhex(body[:20] + body[20:]))


@pytest.mark.slow
def test_merge_weak_check_rate():
    oracle = exhaustive_pass_fraction(CRC8)
    assert oracle == 2 ** -8
    r = merge_scenario(1_000_000, seed=4, check=CRC8)
    assert abs(r["fraction"] - oracle) < 3 * binomial_sigma(oracle, r["trials"])


def test_merge_full_check_no_hits():
    assert merge_scenario(200_000, seed=4)["passed"] == 0


def test_wilson():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0 and 0 < hi < 0.05
    assert all(math.isnan(x) for x in wilson_interval(0, 0))


def test_report_shape():
    cfg = SimConfig(SMALL, trials=2000, seed=1)
    r = report(cfg, run(cfg))
    assert r["frame_error_predicted"] == pytest.approx(predictions(SMALL)["frame_error"])
    lo, hi = r["frame_error_interval95"]
    assert lo <= r["frame_error_fraction"] <= hi
