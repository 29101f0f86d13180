"""Reference tables as printed, kept for comparison.

The generators in :mod:`fddilab.noise`, :mod:`fddilab.analytics` and
:mod:`fddilab.search` are authoritative at runtime; these copies exist only to
be compared against.
"""

# Effect of one noise event on each data symbol. Columns are the changed
# code-bit positions 1, (1,2), (2,3), (3,4), (4,5), 5. "VH" is written "v".
TABLE2_COLUMNS = ((1,), (1, 2), (2, 3), (3, 4), (4, 5), (5,))
TABLE2 = {
    "0": "6V8JFI",
    "1": "SKV74v",
    "2": "HVJ8B3",
    "3": "VTS9A2",
    "4": "C8VV15",
    "5": "D9RTv4",
    "6": "0AvvT7",
    "7": "IBV1V6",
    "8": "v402K9",
    "9": "V5I3v8",
    "A": "V6Cv3B",
    "B": "R7DK2A",
    "C": "4vAESD",
    "D": "5VBFJC",
    "E": "VHvCIF",
    "F": "TVKD0E",
}

TABLE3_INTRA = {
    "data": (32, "40.00"),
    "J": (3, "3.75"),
    "K": (4, "5.00"),
    "R": (1, "1.25"),
    "S": (2, "2.50"),
    "T": (3, "3.75"),
    "violation": (19, "23.75"),
}
TABLE3_INTRA_SUBTOTAL = (64, "80")
TABLE3_INTER = {
    "data-data": (84, "6.56"),
    "data-T": (14, "1.09"),
    "data-R": (14, "1.09"),
    "data-S": (14, "1.09"),
    "violation": (130, "10.16"),
}
TABLE3_INTER_SUBTOTAL = (256, "20")
SYMBOL_VIOLATION_SHARE = "33.91"
DATA_TO_DATA_SHARE = "46.56"
CONTROL_SHARE = "19.53"

# Data error patterns (XOR of data-bits); None where the result is not data.
TABLE4 = {
    "0": ("0110", None, "1000", None, "1111", None),
    "1": (None, None, None, "0110", "0101", None),
    "2": (None, None, None, "1010", "1001", "0001"),
    "3": (None, None, None, "1010", "1001", "0001"),
    "4": ("1000", "1100", None, None, "0101", "0001"),
    "5": ("1000", "1100", None, None, None, "0001"),
    "6": ("0110", "1100", None, None, None, "0001"),
    "7": (None, "1100", None, "0110", None, "0001"),
    "8": (None, "1100", "1000", "1010", None, "0001"),
    "9": (None, "1100", None, "1010", None, "0001"),
    "A": (None, "1100", "0110", None, "1001", "0001"),
    "B": (None, "1100", "0110", None, "1001", "0001"),
    "C": ("1000", None, "0110", "0010", None, "0001"),
    "D": ("1000", None, "0110", "0010", None, "0001"),
    "E": (None, None, None, "0010", None, "0001"),
    "F": (None, None, None, "0010", "1111", "0001"),
}

TABLE5 = {
    "0010": (4, "5.00"),
    "0101": (2, "2.50"),
    "0110": (6, "7.50"),
    "1000": (2, "2.50"),
    "1001": (4, "5.00"),
    "1010": (4, "5.00"),
    "1100": (8, "10.00"),
    "1111": (2, "2.50"),
    "0001-0110": (28, "2.19"),
    "0001-1000": (56, "4.38"),
}
TABLE5_TOTAL = "46.56"

# Minimum-degree multiples of the FCS generator, by Hamming weight.
TABLE6 = {
    3: (0, 41678, 91639),
    4: (0, 2215, 2866, 3006),
    5: (0, 89, 117, 155, 300),
    6: (0, 79, 85, 123, 186, 203),
    7: (0, 45, 53, 74, 80, 120, 123),
    8: (0, 5, 13, 16, 36, 41, 88, 89),
    9: (0, 2, 3, 18, 19, 32, 37, 57, 66),
    10: (0, 3, 7, 25, 27, 30, 33, 36, 38, 53),
    11: (0, 5, 7, 16, 31, 32, 35, 37, 41, 43, 44),
    12: (0, 3, 5, 7, 8, 13, 18, 21, 24, 26, 30, 42),
    13: (0, 1, 6, 15, 18, 20, 23, 29, 33, 35, 37, 40, 42),
}

# weight -> (max frame size in data-bits, octets)
TABLE7 = {
    3: (91639, 11454),
    4: (3006, 375),
    5: (300, 37),
    6: (203, 25),
    7: (123, 15),
    8: (89, 11),
    9: (66, 8),
    10: (53, 6),
    11: (44, 5),
    12: (42, 5),
    13: (42, 5),
}

# Undetected triples: ((offset, pattern), ...) and the printed probability for
# large rings.
TABLE8 = (
    (((0, "1010"), (625, "1111"), (3605, "0010")), 3.29e-25),
    (((0, "1000"), (1366, "1001"), (6398, "0010")), 1.58e-25),
    (((0, "1001"), (1630, "1001"), (5509, "1000")), 2.12e-25),
    (((0, "1111"), (1835, "1001"), (8404, "0101")), 1.79e-26),
    (((0, "0010"), (1947, "1111"), (3096, "1000")), 1.80e-25),
    (((0, "1100"), (2239, "0001-0110"), (3289, "0110")), 9.14e-25),
    (((0, "0101"), (3881, "0001-1000"), (5609, "0110")), 2.71e-25),
    (((0, "1100"), (3882, "0010"), (5609, "1000")), 4.13e-25),
    (((0, "0001-1000"), (4209, "1111"), (8972, "0001-0110")), 3.98e-28),
    (((0, "1001"), (6092, "0110"), (6340, "0101")), 2.43e-25),
)
TABLE8_TOTAL = 2.74e-24

# noise events -> (data symbols, non-data symbols, total symbols, octets)
TABLE9 = {
    3: (3096, 10, 3106, 1553),
    4: (434, 10, 444, 222),
    5: (30, 10, 40, 20),
}

# Summary of error rates. Columns: large ring, BER=2.5E-11, 100 links,
# 450-octet frames. Cells are kept as printed.
TABLE10_COLUMNS = (
    {"links": 1000, "ber": 2.5e-10, "frame_octets": 4500},
    {"links": 1000, "ber": 2.5e-11, "frame_octets": 4500},
    {"links": 100, "ber": 2.5e-10, "frame_octets": 4500},
    {"links": 1000, "ber": 2.5e-10, "frame_octets": 450},
)
TABLE10 = {
    ("frame_error", "P"): ("1.13E-02", "1.13E-03", "1.13E-03", "1.13E-03"),
    ("frame_error", "M_ms"): ("32.", "320.", "320.", "32."),
    ("token_loss", "P"): ("7.75E-06", "7.75E-07", "7.75E-07", "7.75E-06"),
    ("token_loss", "M_s"): ("229.", "2288.", "229.", "229."),
    ("fcs3", "P"): ("2.74E-24", "2.74E-27", "2.74E-25", "0"),
    ("fcs3", "M_yr"): ("4.17E+12", "4.17E+15", "4.17E+13", "inf"),
    ("fcs4", "P"): ("3.64E-30", "3.64E-34", "3.64E-31", "3.49E-34"),
    ("fcs4", "M_yr"): ("3.14E+18", "3.14E+22", "3.14E+19", "3.27E+21"),
    ("false_ed", "P"): ("4.93E-25", "4.93E-27", "4.93E-26", "4.75E-26"),
    ("false_ed", "M_yr"): ("2.31E+13", "2.31E+15", "2.31E+14", "2.40E+13"),
    ("false_sd", "P"): ("1.53E-24", "1.53E-26", "1.53E-25", "1.47E-25"),
    ("false_sd", "M_yr"): ("7.47E+12", "7.47E+14", "7.47E+13", "7.75E+12"),
    ("false_ed_baseline", "P"): ("3.16E-14", "3.16E-15", "3.16E-15", "3.04E-15"),
    ("false_ed_baseline", "M_yr"): ("362.", "3616.", "3616.", "375."),
    ("fcs3_baseline", "P"): ("1.37E-18", "1.37E-21", "1.37E-21", "0"),
    ("fcs3_baseline", "M_yr"): ("8.34E+06", "8.34E+09", "8.34E+09", "inf"),
    ("fcs4_baseline", "P"): ("1.45E-21", "1.45E-25", "1.45E-25", "1.40E-25"),
    ("fcs4_baseline", "M_yr"): ("7.85E+09", "7.85E+13", "7.85E+13", "8.17E+12"),
    ("false_ed_option_a", "P"): ("2.32E-35", "2.32E-38", "2.32E-36", "2.30E-36"),
    ("false_ed_option_a", "M_yr"): ("4.92E+23", "4.92E+26", "4.92E+24", "4.97E+23"),
}
