"""Seeded Monte Carlo ring simulation.

A trial sends one frame (or token) around a ring of L links. On every link
each of the F+1 code cells (the frame's cells plus the one before it) is
struck independently with probability p. A strike inverts the received level
of that cell, so under NRZI the code-bits of that cell and the next one flip.
Stations between source and destination parse, validate and repeat the
stream; the destination applies the validity criteria.

Randomness: trials are grouped in fixed-size blocks and block b draws from
``PCG64(SeedSequence(seed, spawn_key=(b,)))``. Tallies therefore do not
depend on how blocks are scheduled, and all noise for a trial is drawn
before any of it is processed, so two runs differing only in the validity
rules see identical noise.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .analytics import RingParams
from .coding import DECODE_TABLE, _ENCODE_TABLE
from .fcs import FCS32, Crc, GfPoly, is_codeword
from .frames import (
    FCS_SYMBOLS,
    OVERHEAD_SYMBOLS,
    Candidate,
    Frame,
    Mode,
    StationPolicy,
    Token,
    build_frame,
    fc_exempt,
    hex_digits,
    parse,
    relay,
    validate,
    validate_token,
)

CLASSES = (
    "delivered_clean",
    "delivered_after_noise",
    "symbol_violation",
    "framing_violation",
    "bad_fcs",
    "e_marked_upstream",
    "undetected_error",
    "token_lost",
    "token_converted",
)
_FAILURE_CLASS = {
    "symbol_violation": "symbol_violation",
    "framing_violation": "framing_violation",
    "bad_length": "framing_violation",
    "bad_fcs": "bad_fcs",
    "e_indicator_not_R": "e_marked_upstream",
    "a_indicator_not_R_or_S": "framing_violation",
}
POSTAMBLE = "II"  # idle line after the PDU; not struck, but a strike on the last cell spills into it
BLOCK_SIZE = 4096
MAX_BER = 0.1


class InvalidSimConfig(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    ring: RingParams
    trials: int = 10_000
    seed: int = 0
    mode: Mode = "enhanced"
    check: Crc = FCS32
    fc: str = "13"
    destination: int | Literal["uniform"] = "uniform"
    short_circuit: bool = True
    block_size: int = BLOCK_SIZE
    keep_cases: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidSimConfig("trials must be at least 1")
        if not 0 <= self.ring.ber <= MAX_BER:
            raise InvalidSimConfig(f"p must lie in [0, {MAX_BER}]")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidSimConfig("seed must be a 64-bit unsigned integer")
        symbols, rem = divmod(self.ring.frame_bits, 5)
        data = symbols - OVERHEAD_SYMBOLS
        if rem or data % 2 or data < 34:
            raise InvalidSimConfig(f"no frame has {self.ring.frame_bits} code-bits")
        if self.destination != "uniform" and not 1 <= int(self.destination) <= self.ring.links:
            raise InvalidSimConfig("destination must be a link count in 1..L")


@dataclass
class UndetectedCase:
    """Everything needed to replay one undetected error."""

    frame: str
    flips: tuple[tuple[int, ...], ...]
    destination: int
    mode: str
    accepted: Candidate

    def to_dict(self) -> dict:
        return {
            "frame": self.frame,
            "flips": [list(f) for f in self.flips],
            "destination": self.destination,
            "mode": self.mode,
            "accepted_body": self.accepted.body,
            "accepted_span": [self.accepted.start, self.accepted.end],
        }


@dataclass
class OutcomeTally:
    counts: Counter = field(default_factory=Counter)
    trials: int = 0
    cases: list[UndetectedCase] = field(default_factory=list)

    def add(self, outcome: str, case: UndetectedCase | None = None):
        self.counts[outcome] += 1
        self.trials += 1
        if case is not None:
            self.cases.append(case)

    def __add__(self, other: "OutcomeTally") -> "OutcomeTally":
        return OutcomeTally(self.counts + other.counts, self.trials + other.trials, self.cases + other.cases)

    def __getitem__(self, outcome: str) -> int:
        return self.counts.get(outcome, 0)

    def fraction(self, outcome: str) -> float:
        return self[outcome] / self.trials if self.trials else math.nan

    @property
    def error_fraction(self) -> float:
        """Share of trials in which at least one cell was struck."""
        return 1 - self.fraction("delivered_clean")

    def to_dict(self) -> dict:
        return {"trials": self.trials, "counts": {c: self[c] for c in CLASSES}}


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n == 0:
        return (math.nan, math.nan)
    phat = successes / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def binomial_sigma(prob: float, n: int) -> float:
    return math.sqrt(prob * (1 - prob) / n)


def apply_flips(stream: str, cells, n_cells: int) -> str:
    """Received stream after strikes on ``cells`` (index -1 is the leading cell).

    Only the first ``n_cells`` code-bits may be struck, but the bit after the
    last struck cell flips as well, which may reach into the postamble.
    """
    nbits = 5 * len(stream)
    flipped = set()
    for c in cells:
        if not -1 <= c < n_cells:
            raise IndexError(f"cell {c} outside [-1, {n_cells})")
        for b in (c, c + 1):
            if 0 <= b < nbits:
                flipped ^= {b}
    if not flipped:
        return stream
    masks: dict[int, int] = {}
    for b in flipped:
        s, r = divmod(b, 5)
        masks[s] = masks.get(s, 0) ^ (1 << (4 - r))
    out = []
    pos = 0
    for s in sorted(masks):
        group = _ENCODE_TABLE[ord(stream[s])] ^ masks[s]
        out += [stream[pos:s], chr(DECODE_TABLE[group])]
        pos = s + 1
    out.append(stream[pos:])
    return "".join(out)


def _draw_flips(rng: np.random.Generator, counts: np.ndarray, n_cells: int) -> list[tuple[tuple[int, ...], ...]]:
    """Distinct struck cells per (trial, link) for a (trials, links) count matrix.

    Cells are drawn with replacement in one batch; the rare link that drew a
    cell twice is redrawn until its cells are distinct.
    """
    flat = counts.ravel()
    cells = rng.integers(-1, n_cells, size=int(flat.sum())).tolist()
    per_link: list[tuple[int, ...]] = [()] * len(flat)
    pos = 0
    for i in np.flatnonzero(flat).tolist():
        k = int(flat[i])
        chosen = cells[pos:pos + k]
        pos += k
        while len(set(chosen)) < k:
            chosen = rng.integers(-1, n_cells, size=k).tolist()
        per_link[i] = tuple(sorted(chosen))
    L = counts.shape[1]
    return [tuple(per_link[t * L:(t + 1) * L]) for t in range(counts.shape[0])]


def _destination_verdict(stream: str, original: Frame, mode: str, check: Crc, start: int):
    """(outcome, accepted candidate) at the destination."""
    parsed = parse(stream)
    accepted = None
    for cand in parsed.frames:
        if validate(cand, mode=mode, check=check).valid:
            if cand.body != original.data_symbols or cand.start != start:
                return "undetected_error", cand
            accepted = cand
    if accepted is not None:
        return "delivered", accepted
    frames = parsed.frames
    if not frames:
        return "framing_violation", None
    main = next((c for c in frames if c.start == start), frames[0])
    failure = validate(main, mode=mode, check=check).failure
    return _FAILURE_CLASS[failure], None


def _settled(stream: str, mode: str, start: int) -> bool:
    """True when nothing short of multiple further strikes can change the verdict."""
    parsed = parse(stream)
    frames = [c for c in parsed.frames if c.start == start]
    if not frames or len(parsed.candidates) != 1:
        return False
    c = frames[0]
    if c.aborted == "symbol_violation":
        return True
    return mode != "baseline" and c.aborted is None and c.e_indicator == "S"


def simulate_frame_trial(
    frame: Frame,
    flips: tuple[tuple[int, ...], ...],
    destination: int,
    config: SimConfig,
) -> tuple[str, Candidate | None]:
    """Run one trial with the given strikes; returns (outcome, accepted candidate)."""
    stream = frame.symbols() + POSTAMBLE
    n_cells = 5 * len(frame.symbols())
    start = frame.preamble_len
    policy = StationPolicy(mode=config.mode, check=config.check)
    struck = False
    for link in range(1, destination + 1):
        cells = flips[link - 1]
        if cells:
            struck = True
            stream = apply_flips(stream, cells, n_cells)
        if link == destination:
            break
        if cells:
            if config.short_circuit and _settled(stream, config.mode, start):
                continue
            stream = relay(stream, policy)
    if not struck:
        later = any(flips[destination:])
        return ("delivered_after_noise" if later else "delivered_clean"), None
    outcome, cand = _destination_verdict(stream, frame, config.mode, config.check, start)
    if outcome == "delivered":
        return "delivered_after_noise", cand
    return outcome, cand


def _run_block(config: SimConfig, block: int, trials: int) -> OutcomeTally:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed, spawn_key=(block,))))
    ring = config.ring
    n_cells = ring.frame_bits
    hits = rng.binomial(n_cells + 1, ring.ber, size=(trials, ring.links))
    rows = np.nonzero(hits.any(axis=1))[0]
    tally = OutcomeTally()
    tally.counts["delivered_clean"] = tally.trials = int(trials - len(rows))
    if not len(rows):
        return tally
    flips = _draw_flips(rng, hits[rows], n_cells)
    if config.destination == "uniform":
        dests = rng.integers(1, ring.links, size=len(rows)) if ring.links > 1 else np.ones(len(rows), int)
    else:
        dests = np.full(len(rows), int(config.destination))
    free = n_cells // 5 - OVERHEAD_SYMBOLS - 2 - FCS_SYMBOLS
    digits = hex_digits(rng.integers(0, 16, size=len(rows) * free))
    for i in range(len(rows)):
        d = digits[i * free:(i + 1) * free]
        frame = build_frame(config.fc, d[:12], d[12:24], d[24:], check=config.check)
        outcome, cand = simulate_frame_trial(frame, flips[i], int(dests[i]), config)
        case = None
        if outcome == "undetected_error" and config.keep_cases:
            case = UndetectedCase(frame.symbols(), flips[i], int(dests[i]), config.mode, cand)
        tally.add(outcome, case)
    return tally


def _blocks(config: SimConfig):
    full, rest = divmod(config.trials, config.block_size)
    for b in range(full):
        yield b, config.block_size
    if rest:
        yield full, rest


def run(config: SimConfig) -> OutcomeTally:
    tally = OutcomeTally()
    for block, size in _blocks(config):
        tally = tally + _run_block(config, block, size)
    return tally


def replay(case: UndetectedCase, check: Crc = FCS32) -> tuple[str, Candidate | None]:
    """Re-run a logged undetected case from its frame and strikes."""
    symbols = case.frame
    preamble = len(symbols) - len(symbols.lstrip("I"))
    body = symbols[preamble + 2: symbols.index("T", preamble + 2)]
    frame = Frame(body[:2], body[2:14], body[14:26], body[26:-8], body[-8:], symbols[-3:], preamble)
    config = SimConfig(
        RingParams(links=max(1, len(case.flips)), ber=0.0, frame_bits=max(250, 5 * len(symbols))),
        mode=case.mode,
        check=check,
        short_circuit=False,
    )
    return simulate_frame_trial(frame, case.flips, case.destination, config)


def mechanism(case: UndetectedCase, check: Crc = FCS32) -> str:
    """Why an undetected case slipped through.

    false_delimiter: the accepted frame starts or ends elsewhere than the
    original, so strikes forged a JK or a T. fcs_codeword: same delimiters and
    the data error is a multiple of the check generator. fc_exempt: the
    accepted FC skips the FCS check. Anything else is "unexplained".
    """
    preamble = len(case.frame) - len(case.frame.lstrip("I"))
    orig_end = case.frame.index("T", preamble + 2)
    acc = case.accepted
    if acc.start != preamble or acc.end != orig_end:
        return "false_delimiter"
    orig_body = case.frame[preamble + 2: orig_end]
    if fc_exempt(acc.fc):
        return "fc_exempt"
    diff = int(orig_body, 16) ^ int(acc.body, 16)
    if diff and is_codeword(GfPoly(diff), check.g):
        return "fcs_codeword"
    return "unexplained"


def single_event_sweep(frame: Frame, *, mode: Mode = "enhanced", check: Crc = FCS32) -> dict[str, int]:
    """Destination outcome of every possible single strike on one link."""
    stream = frame.symbols() + POSTAMBLE
    n_cells = 5 * len(frame.symbols())
    start = frame.preamble_len
    out = Counter()
    for c in range(-1, n_cells):
        outcome, _ = _destination_verdict(apply_flips(stream, (c,), n_cells), frame, mode, check, start)
        out["delivered_after_noise" if outcome == "delivered" else outcome] += 1
    return dict(out)


# Tokens ---------------------------------------------------------------------


def simulate_token_trial(token: Token, flips, n_cells: int) -> str:
    stream0 = token.symbols() + POSTAMBLE
    struck = False
    for cells in flips:
        if not cells:
            continue
        struck = True
        parsed = parse(apply_flips(stream0, cells, n_cells))
        same = [c for c in parsed.tokens if validate_token(c) and c.body == token.fc]
        if same and len(parsed.candidates) == 1:
            continue  # a recognised token is repeated cleanly
        if any(validate_token(c) for c in parsed.tokens):
            return "token_converted"
        return "token_lost"
    return "delivered_after_noise" if struck else "delivered_clean"


def run_token(config: SimConfig, restricted: bool = False) -> OutcomeTally:
    token = Token(restricted)
    n_cells = 5 * len(token.symbols())
    tally = OutcomeTally()
    for block, size in _blocks(config):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed, spawn_key=(block,))))
        hits = rng.binomial(n_cells + 1, config.ring.ber, size=(size, config.ring.links))
        struck = hits.any(axis=1)
        part = OutcomeTally()
        part.counts["delivered_clean"] = int(size - struck.sum())
        part.trials = int(size - struck.sum())
        for f in _draw_flips(rng, hits[struck], n_cells):
            part.add(simulate_token_trial(token, f, n_cells))
        tally = tally + part
    return tally


def token_single_flip_conversions(restricted: bool = False) -> dict[str, int]:
    """Outcome of every single strike on a token, by class."""
    token = Token(restricted)
    n_cells = 5 * len(token.symbols())
    out = Counter()
    for c in range(-1, n_cells):
        out[simulate_token_trial(token, ((c,),), n_cells)] += 1
    return dict(out)


# Merged frames --------------------------------------------------------------


def merge_scenario(
    trials: int,
    seed: int = 0,
    *,
    check: Crc = FCS32,
    data_symbols: int = 60,
) -> dict:
    """Splice the head of one frame onto the tail of another and count valid checks.

    Both frames carry ``data_symbols`` data symbols (header, info and FCS
    field). The cut points are uniform over the body and the spliced body is
    kept only when its length is a legal frame (even, at least 34 symbols).
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    n_payload = (data_symbols - FCS_SYMBOLS) // 2 - 1  # octets after FC
    pad = bytes((32 - check.width) // 8)
    width = check.width // 8

    def body(payload: bytes) -> str:
        payload = b"\x50" + payload
        value = check.compute(payload + pad)
        return (payload + pad + value.to_bytes(width, "big")).hex().upper()

    passed = done = 0
    while done < trials:
        batch = min(4096, 2 * (trials - done))
        raw = rng.bytes(2 * n_payload * batch)
        cuts = rng.integers(1, data_symbols, size=(batch, 2)).tolist()
        for i in range(batch):
            if done == trials:
                break
            off = 2 * n_payload * i
            a = body(raw[off:off + n_payload])
            b = body(raw[off + n_payload:off + 2 * n_payload])
            c1, c2 = cuts[i]
            spliced = a[:c1] + b[c2:]
            if len(spliced) % 2 or len(spliced) < 34 or spliced in (a, b):
                continue
            done += 1
            passed += check.check(bytes.fromhex(spliced))
    expected = 2.0 ** -check.width
    return {
        "check": check.name,
        "trials": trials,
        "passed": passed,
        "fraction": passed / trials,
        "expected": expected,
        "sigma": binomial_sigma(expected, trials),
        "interval95": wilson_interval(passed, trials),
    }


def exhaustive_pass_fraction(check: Crc, message_bytes: int = 2) -> float:
    """Share of all ``message_bytes``-octet strings that pass the check."""
    n = 1 << (8 * message_bytes)
    ok = sum(check.check(i.to_bytes(message_bytes, "big")) for i in range(n))
    return ok / n


# Reports ---------------------------------------------------------------------


def predictions(ring: RingParams) -> dict[str, float]:
    p, L, F = ring.ber, ring.links, ring.frame_bits
    return {
        "frame_error": 1 - (1 - p) ** (L * (F + 1)),
        "token_loss": 1 - (1 - p) ** (31 * L),
    }


def report(config: SimConfig, tally: OutcomeTally) -> dict:
    pred = predictions(config.ring)
    errors = tally.trials - tally["delivered_clean"]
    cases = [c.to_dict() | {"mechanism": mechanism(c, config.check)} for c in tally.cases]
    return {
        "tally": tally.to_dict(),
        "frame_error_fraction": tally.error_fraction,
        "frame_error_interval95": wilson_interval(errors, tally.trials),
        "frame_error_predicted": pred["frame_error"],
        "undetected_fraction": tally.fraction("undetected_error"),
        "undetected_interval95": wilson_interval(tally["undetected_error"], tally.trials),
        "undetected_cases": cases,
        "notes": [
            "frames aborted by a symbol violation are replaced by Idle up to the next JK",
        ],
    }
