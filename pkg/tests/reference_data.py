"""Printed reference values for the four bundled models.

Polynomials are transcribed as text and parsed, so they serve as oracles
independent of the determinant code that produces the detecting functions.
"""

V2 = ["l1", "l2"]
V3 = ["l1", "l2", "l3"]

EXDEG_F3 = "288*l1^6*l2^12 - 72/5*l1^6 + 9/40*l1^11 - 2304*l2^24 + 28692*l2^12 - 9/5*l1^5*l2^12"
EXDEG_F5 = "800*l1^6*l2^12 + 5/8*l1^11 + 92500*l2^12 - 100*l1^5 - 6400*l2^24 - 5*l1^5*l2^12"

EXSTAT_f0 = "18*l1^9 + 18*l1^2 - 54*l1^6 - 792*l1^3*l2^4 - 2904*l2^8"
EXSTAT_f2 = "3*l1^10 + l1^7*l2 - l1^2*l2^7 + l1^5*l2^5 - l1^4*l2^5 - l1^3*l2^4 - l2^9"
EXSTAT_f3 = "18*l1^9 - 81*l1^7 - 54*l1^6 - 792*l1^3*l2^4 - 2904*l2^8"
# a_0 = f_2 + 4, a_2 = f_0 - 8 l1^2 - 36 l1^7 - 20, a_3 = a_0 - 9
EXSTAT_a0 = f"({EXSTAT_f2}) + 4"
EXSTAT_a2 = f"({EXSTAT_f0}) - 8*l1^2 - 36*l1^7 - 20"
EXSTAT_a3 = f"({EXSTAT_a0}) - 9"

SURFDEG_F4 = (
    "-1792*l1^17 - 512*l3^4*l2^3 + 8448*l1^13 - 16*l3^8*l2^6 + 1792*l3^8"
    " + 16*l2^6*l1^17 - 112*l2^6*l1^13 - 16*l2^6*l1^4 + 112*l2^6"
)
SURFDEG_F7 = (
    "-11319*l1^4 - 5488*l1^17 - 49*l3^8*l2^6 - 4802*l3^4*l2^3 + 5488*l3^8"
    " + 49*l2^6*l1^17 - 343*l2^6*l1^13 - 49*l2^6*l1^4 + 343*l2^6"
)

SURFSTAT_f0 = (
    "20*l1^15 + 40*l1^13*l3^3*l2^2 + 10*l1^13*l2^4 + 100*l1^2 + 200*l3^3*l2^2 + 50*l2^4"
    " + 160*l2^8*l1^2 + 320*l2^10*l3^3 + 80*l2^12 - 10*l2^6 + 20*l2^3*l3^2 - 10*l3^4"
)
SURFSTAT_f4 = "-85*l1^9 + 11*l1^5*l3^2 - 6*l1^3*l2^2 - l2^3*l3^2 + 6*l1^5*l3^4 + 17*l2^4 + l3^6"
SURFSTAT_f5 = (
    "20*l1^15 + 40*l1^13*l3^3*l2^2 + 10*l1^13*l2^4 - 125*l1^13 + 160*l2^8*l1^2"
    " + 320*l2^10*l3^3 + 80*l2^12 - 1000*l2^8 - 10*l2^6 + 20*l2^3*l3^2 - 10*l3^4"
)
SURFSTAT_a0 = f"({SURFSTAT_f4}) + 16"
SURFSTAT_a4 = f"({SURFSTAT_f0}) - 64*l1^2 - 80*l1^13 - 128*l3^3*l2^2 - 32*l2^4 - 640*l2^8 - 144"
SURFSTAT_a5 = f"({SURFSTAT_f4}) - 9"

# (model, j) -> (factor, cofactor); F_j = factor * cofactor, or F_j itself when the cofactor is None
DETECTING = {
    ("exdeg", 3): (EXDEG_F3, None),
    ("exdeg", 5): (EXDEG_F5, None),
    ("exstat", 0): (EXSTAT_f0, EXSTAT_a0),
    ("exstat", 2): (EXSTAT_f2, EXSTAT_a2),
    ("exstat", 3): (EXSTAT_f3, EXSTAT_a3),
    ("surfdeg", 4): (SURFDEG_F4, None),
    ("surfdeg", 7): (SURFDEG_F7, None),
    ("surfstat", 0): (SURFSTAT_f0, SURFSTAT_a0),
    ("surfstat", 4): (SURFSTAT_f4, SURFSTAT_a4),
    ("surfstat", 5): (SURFSTAT_f5, SURFSTAT_a5),
}

# ind h(g_i, F_j)(0); "prod" is the product of all listed F_j
INDICES = {
    "exdeg": {
        "g1": {3: 2, 5: 1, "prod": 3},
        "g2": {3: 0, 5: 1},
        "g3": {3: 0, 5: 0},
        "g4": {3: 0, 5: 0},
    },
    "exstat": {
        "g1": {0: 2, 2: 3, 3: 2, "prod": 7},
        "g2": {0: 0, 2: 0, 3: -2},
        "g3": {0: 0, 2: 1, 3: 0},
        "g4": {0: 0, 2: -2, 3: 0},
    },
}

CANDIDATES = {
    "exdeg": ([3, 5], True),
    "exstat": ([0, 2, 3], False),
    "surfdeg": ([4, 7], True),
    "surfstat": ([0, 4, 5], False),
}

# total b(F) of the product, and per-frequency (b(F_j), (b1, b2, b3, b4))
BRANCHES = {
    "exdeg": (6, {3: (4, (1, 1, 1, 1)), 5: (2, (1, 0, 0, 1))}),
    "exstat": (14, {0: (4, (1, 1, 1, 1)), 2: (6, (1, 3, 0, 2)), 3: (4, (0, 2, 2, 0))}),
}
# printed b(F_5) for exdeg; its own quadrant counts sum to 2
EXDEG_PRINTED_B5 = 5
