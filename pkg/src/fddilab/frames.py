"""FDDI tokens and frames: construction, serialization, parsing and validity.

Every structure here works on symbol streams in the one-character notation of
:mod:`fddilab.coding`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .coding import DATA_SYMBOLS
from .fcs import FCS32, Crc

HEADER_SYMBOLS = 2 + 12 + 12  # FC, DA, SA
FCS_SYMBOLS = 8
MIN_DATA_SYMBOLS = HEADER_SYMBOLS + FCS_SYMBOLS
OVERHEAD_SYMBOLS = 4 + 2 + 1 + 3  # preamble, SD, ED, three indicators

Mode = Literal["enhanced", "baseline", "option_a"]
MODES = ("enhanced", "baseline", "option_a")
FAILURES = (
    "symbol_violation",
    "framing_violation",
    "bad_length",
    "bad_fcs",
    "e_indicator_not_R",
    "a_indicator_not_R_or_S",
)

_HEX = set(DATA_SYMBOLS)
_BODY_END = re.compile(r"[TQIHVv]|JK")
_INDICATORS = re.compile(r"(?:[0-9A-FKRST]|J(?!K))*")
_ABORT_TAIL = re.compile(r"JK")
_QUIET_VIOLATIONS = str.maketrans("Vv", "II")


class OddInfoLength(ValueError):
    pass


class TokenFcUsedForFrame(ValueError):
    pass


def is_token_fc(fc: str) -> bool:
    """FC of the form 1X00 0000."""
    return len(fc) == 2 and fc[0] in "8C" and fc[1] == "0"


def fc_exempt(fc: str) -> bool:
    """FC = 0X00 r000 or XX10 XXXX: frames accepted without an FCS check."""
    if len(fc) != 2 or not set(fc) <= _HEX:
        return False
    first = int(fc[0], 16)
    return (fc[0] in "04" and fc[1] in "08") or (first & 0b0011) == 0b0010


def _check_field(payload: str, check: Crc) -> str:
    """Eight-symbol FCS field; a narrower check sits in its low bits."""
    pad = (32 - check.width) // 4
    prefix = "0" * pad
    value = check.compute(bytes.fromhex(payload + prefix))
    return prefix + format(value, f"0{check.width // 4}X")


@dataclass(frozen=True)
class Frame:
    fc: str
    da: str
    sa: str
    info: str
    fcs: str
    indicators: str = "RRR"
    preamble_len: int = 4

    @property
    def data_symbols(self) -> str:
        return self.fc + self.da + self.sa + self.info + self.fcs

    @property
    def code_bits(self) -> int:
        return 5 * len(self.symbols())

    def symbols(self) -> str:
        return "I" * self.preamble_len + "JK" + self.data_symbols + "T" + self.indicators

    def payload(self) -> bytes:
        return bytes.fromhex(self.data_symbols)


@dataclass(frozen=True)
class Token:
    restricted: bool = False
    preamble_len: int = 4

    @property
    def fc(self) -> str:
        return "C0" if self.restricted else "80"

    def symbols(self) -> str:
        return "I" * self.preamble_len + "JK" + self.fc + "TT"


def build_frame(
    fc: str,
    da: str,
    sa: str,
    info: str = "",
    *,
    check: Crc = FCS32,
    indicators: str = "RRR",
    preamble_len: int = 4,
) -> Frame:
    fc, da, sa, info = (x.upper() for x in (fc, da, sa, info))
    for name, value, size in (("fc", fc, 2), ("da", da, 12), ("sa", sa, 12)):
        if len(value) != size:
            raise ValueError(f"{name} must be {size} data symbols, got {len(value)}")
    if not set(fc + da + sa + info) <= _HEX:
        raise ValueError("frame fields must contain data symbols only")
    if len(info) % 2:
        raise OddInfoLength(f"info has {len(info)} symbols; it must be whole octets")
    if is_token_fc(fc):
        raise TokenFcUsedForFrame(f"FC {fc} is reserved for tokens")
    fcs = _check_field(fc + da + sa + info, check)
    return Frame(fc, da, sa, info, fcs, indicators, preamble_len)


def frame_for_size(code_bits: int, rng=None, *, fc: str = "50", check: Crc = FCS32) -> Frame:
    """A frame of exactly ``code_bits`` code-bits with uniformly random addresses and info."""
    symbols, rem = divmod(code_bits, 5)
    data = symbols - OVERHEAD_SYMBOLS
    if rem or data < MIN_DATA_SYMBOLS or data % 2:
        raise ValueError(f"no frame has {code_bits} code-bits")
    if rng is None:
        rng = np.random.default_rng(0)
    digits = hex_digits(rng.integers(0, 16, data - 2 - FCS_SYMBOLS))
    return build_frame(fc, digits[:12], digits[12:24], digits[24:], check=check)


_HEX_BYTES = np.frombuffer(DATA_SYMBOLS.encode("ascii"), dtype=np.uint8)


def hex_digits(values) -> str:
    """Data symbols for an array of nibble values."""
    return _HEX_BYTES[np.asarray(values)].tobytes().decode("ascii")


def serialize(pdu: Frame | Token) -> str:
    return pdu.symbols()


@dataclass(frozen=True)
class ViolationEvent:
    kind: str
    position: int
    detail: str = ""


@dataclass(frozen=True)
class Candidate:
    """A PDU as delimited by the receiver.

    ``start`` is the stream index of J; ``end`` is the index of the terminating
    T (or of the symbol that aborted the PDU). ``body`` holds everything
    between K and ``end``.
    """

    kind: Literal["frame", "token"]
    start: int
    end: int
    body: str
    indicators: str = ""
    aborted: str | None = None

    @property
    def fc(self) -> str:
        return self.body[:2]

    @property
    def da(self) -> str:
        return self.body[2:14]

    @property
    def e_indicator(self) -> str | None:
        return self.indicators[0] if self.indicators else None

    @property
    def indicator_start(self) -> int:
        return self.end + 1


@dataclass(frozen=True)
class ParseResult:
    candidates: list[Candidate] = field(default_factory=list)
    events: list[ViolationEvent] = field(default_factory=list)

    @property
    def frames(self) -> list[Candidate]:
        return [c for c in self.candidates if c.kind == "frame"]

    @property
    def tokens(self) -> list[Candidate]:
        return [c for c in self.candidates if c.kind == "token"]


def _structure_problem(body: str) -> str | None:
    if not set(body) <= _HEX:
        return "control symbol inside frame"
    if len(body) < HEADER_SYMBOLS:
        return "T in FC, DA or SA field"
    if is_token_fc(body[:2]):
        return "token FC on a frame"
    if len(body) % 2:
        return "odd number of data symbols"
    return None


def parse(stream: str) -> ParseResult:
    """Delimit PDUs in a received symbol stream.

    JK is recognised on symbol boundaries only. A line-state or violation
    symbol inside a PDU aborts it; a fresh JK inside a PDU restarts.
    """
    candidates: list[Candidate] = []
    events: list[ViolationEvent] = []
    pos = 0
    n = len(stream)
    while True:
        j = stream.find("JK", pos)
        if j < 0:
            break
        body_start = j + 2
        m = _BODY_END.search(stream, body_start)
        if m is None:
            candidates.append(Candidate("frame", j, n, stream[body_start:], aborted="unterminated"))
            events.append(ViolationEvent("framing_violation", n, "stream ends inside frame"))
            break
        stop = m.start()
        body = stream[body_start:stop]
        found = m.group()
        if found == "JK":
            candidates.append(Candidate("frame", j, stop, body, aborted="restarted"))
            events.append(ViolationEvent("framing_violation", stop, "JK inside frame"))
            pos = stop
            continue
        if found != "T":
            candidates.append(Candidate("frame", j, stop, body, aborted="symbol_violation"))
            events.append(ViolationEvent("symbol_violation", stop, f"{found} inside frame"))
            pos = stop + 1
            continue
        if len(body) == 2 and stream.startswith("T", stop + 1):
            candidates.append(Candidate("token", j, stop, body, "T"))
            if not is_token_fc(body):
                events.append(ViolationEvent("framing_violation", j, "TT after non-token FC"))
            pos = stop + 2
            continue
        ind = _INDICATORS.match(stream, stop + 1).group()
        candidates.append(Candidate("frame", j, stop, body, ind))
        problem = _structure_problem(body)
        if problem:
            events.append(ViolationEvent("framing_violation", stop, problem))
        pos = stop + 1 + len(ind)
    return ParseResult(candidates, events)


@dataclass(frozen=True)
class ValidityVerdict:
    valid: bool
    failure: str | None = None
    fcs_exempt: bool = False

    def __post_init__(self):
        if self.valid != (self.failure is None):
            raise ValueError("a verdict is valid exactly when it carries no failure")


def validate(candidate: Candidate, *, mode: Mode = "enhanced", check: Crc = FCS32) -> ValidityVerdict:
    """Apply the frame validity criteria in order."""
    if candidate.kind != "frame":
        return ValidityVerdict(False, "framing_violation")
    if candidate.aborted == "symbol_violation":
        return ValidityVerdict(False, "symbol_violation")
    if candidate.aborted:
        return ValidityVerdict(False, "framing_violation")
    body = candidate.body
    problem = _structure_problem(body)
    if problem == "odd number of data symbols" or (problem is None and len(body) < MIN_DATA_SYMBOLS):
        return ValidityVerdict(False, "bad_length")
    if problem:
        return ValidityVerdict(False, "framing_violation")
    exempt = fc_exempt(body[:2])
    if not exempt and not check.check(bytes.fromhex(body)):
        return ValidityVerdict(False, "bad_fcs")
    if mode != "baseline" and candidate.e_indicator != "R":
        return ValidityVerdict(False, "e_indicator_not_R", exempt)
    if mode == "option_a" and (len(candidate.indicators) < 2 or candidate.indicators[1] not in "RS"):
        return ValidityVerdict(False, "a_indicator_not_R_or_S", exempt)
    return ValidityVerdict(True, None, exempt)


def validate_token(candidate: Candidate) -> bool:
    return candidate.kind == "token" and is_token_fc(candidate.body) and candidate.aborted is None


@dataclass(frozen=True)
class StationPolicy:
    """How a repeating station treats frames.

    ``address`` (12 data symbols) enables address recognition; when it
    matches DA the A indicator is set, and C too when ``copies`` is true.
    """

    mode: Mode = "enhanced"
    address: str | None = None
    copies: bool = True
    check: Crc = FCS32


def _fcs_bad(body: str, check: Crc) -> bool:
    if _structure_problem(body) or len(body) < MIN_DATA_SYMBOLS:
        return False
    return not fc_exempt(body[:2]) and not check.check(bytes.fromhex(body))


def repeat_indicators(candidate: Candidate, policy: StationPolicy = StationPolicy()) -> str:
    """Frame-status indicators as a repeating station transmits them."""
    ind = list(candidate.indicators)
    if not ind:
        return ""
    if _fcs_bad(candidate.body, policy.check) and ind[0] == "R":
        ind[0] = "S"
    if policy.mode != "baseline" and ind[0] not in "RS":
        ind[0] = "S"
    if policy.address is not None and candidate.da == policy.address:
        if len(ind) > 1 and ind[1] in "RS":
            ind[1] = "S"
        if policy.copies and len(ind) > 2 and ind[2] in "RS":
            ind[2] = "S"
    return "".join(ind)


def repeat_station(pdu: Frame | Candidate, policy: StationPolicy = StationPolicy()) -> Frame | Candidate:
    if isinstance(pdu, Frame):
        received = Candidate("frame", 0, 0, pdu.data_symbols, pdu.indicators)
        return replace(pdu, indicators=repeat_indicators(received, policy))
    return replace(pdu, indicators=repeat_indicators(pdu, policy))


def relay(stream: str, policy: StationPolicy = StationPolicy(), parsed: ParseResult | None = None) -> str:
    """The symbol stream a station puts on its outbound link.

    Aborted frames are stripped to Idle up to the next JK, violation symbols
    outside frames go out as Idle, and frame-status indicators follow
    :func:`repeat_indicators`. The stream length is preserved.
    """
    parsed = parse(stream) if parsed is None else parsed
    pieces = []
    pos = 0
    for c in parsed.candidates:
        if c.aborted == "symbol_violation":
            m = _ABORT_TAIL.search(stream, c.end)
            stop = m.start() if m else len(stream)
            pieces += [stream[pos:c.end], "I" * (stop - c.end)]
            pos = stop
        elif c.kind == "frame" and c.aborted is None and c.indicators:
            new = repeat_indicators(c, policy)
            if new != c.indicators:
                s = c.indicator_start
                pieces += [stream[pos:s], new]
                pos = s + len(new)
    pieces.append(stream[pos:])
    return "".join(pieces).translate(_QUIET_VIOLATIONS)
