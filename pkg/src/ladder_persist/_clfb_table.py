"""Static table of the Auslander-Reiten quiver of CL(fb).

Vertices are named by their dimension vectors, bottom row first
(d1 d2 d3 d4 d5 d6), and listed column by column from the simple
projective P(5) to the simple injective I(1).  Arrows are single arrows
(multiplicities of irreducible maps are not represented).

Do not edit without updating ``CHECKSUM``; the table is verified on import.
"""

VERTICES = (
    "000010",
    "010010", "000110", "000011",
    "010121",
    "010011", "000111", "010110",
    "011011", "010111", "110110",
    "011111", "010000", "110111",
    "000100", "121111", "000001",
    "110100", "111111", "011001",
    "110000", "111101", "011000",
    "111001", "111100",
    "001001", "111000", "100100",
    "001000", "100000",
)

ARROWS = (
    ("000010", "010010"), ("000010", "000110"), ("000010", "000011"),
    ("010010", "010121"), ("000110", "010121"), ("000011", "010121"),
    ("010121", "010011"), ("010121", "000111"), ("010121", "010110"),
    ("010011", "010111"), ("000111", "010111"), ("010110", "010111"),
    ("010011", "011011"), ("010110", "110110"),
    ("011011", "011111"), ("010111", "011111"),
    ("010111", "010000"),
    ("010111", "110111"), ("110110", "110111"),
    ("011111", "000100"),
    ("011111", "121111"), ("010000", "121111"), ("110111", "121111"),
    ("110111", "000001"),
    ("000100", "110100"), ("121111", "110100"),
    ("121111", "111111"),
    ("121111", "011001"), ("000001", "011001"),
    ("110100", "110000"),
    ("110100", "111101"), ("111111", "111101"), ("011001", "111101"),
    ("011001", "011000"),
    ("110000", "111001"), ("111101", "111001"),
    ("111101", "111100"), ("011000", "111100"),
    ("111001", "001001"),
    ("111001", "111000"), ("111100", "111000"),
    ("111100", "100100"),
    ("001001", "001000"), ("111000", "001000"),
    ("111000", "100000"), ("100100", "100000"),
)

CHECKSUM = "2f09da4d1f6c1b9802d8dd43091d2c9917212eb1f2320b3d6c219ab08511b262"
