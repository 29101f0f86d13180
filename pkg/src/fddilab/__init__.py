"""Error analysis toolkit for FDDI: symbol coding, noise effects, the 32-bit FCS,
frame validity, closed-form error rates, residue searches and ring simulation."""

__version__ = "0.1.0"

from .analytics import RingParams, RateReport, frame_error, token_loss, ue_false_ed, ue_false_sd, ue_fcs
from .coding import Symbol, decode_stream, encode_stream, nrzi_demodulate, nrzi_modulate
from .fcs import CRC8, CRC16, FCS32, G, GfPoly, fcs_check, fcs_compute, is_codeword, poly_mod, xpow_mod
from .frames import Frame, Token, build_frame, parse, validate
from .noise import ErrorPattern, NoiseEvent, apply_noise, tabulate_effects

__all__ = [
    "__version__",
    "RingParams", "RateReport", "frame_error", "token_loss", "ue_false_ed", "ue_false_sd", "ue_fcs",
    "Symbol", "decode_stream", "encode_stream", "nrzi_demodulate", "nrzi_modulate",
    "CRC8", "CRC16", "FCS32", "G", "GfPoly", "fcs_check", "fcs_compute", "is_codeword", "poly_mod", "xpow_mod",
    "Frame", "Token", "build_frame", "parse", "validate",
    "ErrorPattern", "NoiseEvent", "apply_noise", "tabulate_effects",
]
