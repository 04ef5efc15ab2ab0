"""Frozen expected values, computed once by the scripts in tests/oracles/.

Tests compare library output against these constants; regenerate only by
rerunning the oracle scripts, never by copying library output back in.
"""

# --- canonical 8-interval rotation model -----------------------------------

# root > 1 of  x^4 - 6x^3 - 6x^2 - 6x + 1  (60 significant digits);
# satisfies lam + 1/lam = 3 + sqrt(17)
LAMBDA_N4 = "6.97983577921557449360548251014807755929803597041286317395186"
EC_POLY_N4 = (1, -6, -6, -6, 1)

# offset window (one-parameter family of even solutions) and the probe used
# by every geometric oracle; window endpoints good to ~10 digits
BETA_WINDOW_N4 = ("0.0003163262136", "0.002204201384")
BETA_PROBE_N4 = "0.001259375"
C1_PROBE_N4 = "0.626259375"

# route words at cutting point 1 (right = delta route, left = gamma route)
ROUTE_RIGHT_N4 = (1, 6, 3, 8)
ROUTE_LEFT_N4 = (8, 3, 6, 1)
K_N4 = 4

# merge-orbit values Phi~^3 of the two sides of cutting point 1 (5 digits)
W3_LEFT_N4 = 0.053398
W3_RIGHT_N4 = 0.946414

# PL-degenerate closure corner fixed points around cutting point 1
XLSTAR_1_N4 = "0.999842217588247055938650157955"
XRSTAR_1_N4 = "1.00015807967711587706849130881"

# --- 12-interval rotation model ---------------------------------------------

LAMBDA_N6 = "10.9999322610461835789222779314181819062418965074146822350195"
EC_POLY_N6 = (1, -10, -10, -10, -10, -10, 1)
BETA_WINDOW_N6 = ("4.713502203e-7", "5.173562598e-6")
BETA_PROBE_N6 = "2.82245640902e-6"
K_N6 = 6

# --- alternate pairing (1 3)(2 4)(5 7)(6 8) ---------------------------------

# solvable like every valid N=4 pairing on uniform cutting points (all 21
# were enumerated and solved): same slope polynomial, offsets a permuted
# copy of the canonical ones.  Exhaustive run: tests/oracles/ narrative.
ALT_PAIRING_N4 = (3, 4, 1, 2, 7, 8, 5, 6)

# deliberately impossible geometry for the canonical pairing: intervals 1
# and 5 are iota-partners of length 12/25 each, so expansion would have to
# fit an image of length > 12/25 into the 13/25 left over minus its partner;
# the orbit equations then admit no expanding slope
INFEASIBLE_Z_N4 = ("0", "12/25", "125/250", "126/250",
                   "127/250", "247/250", "248/250", "249/250")

# --- leveled-graph census (combinatorial quotient) --------------------------

SPHERES_N4 = (8, 56, 392, 2736, 19096, 133288, 930328, 6493536)
PAIRS_N4 = {4: 8, 5: 48, 6: 336, 7: 2352, 8: 16408}
# recurrence extension (|S_L| = 7|S_{L-1}| - P(L-1) - P(L),
# P(L) = 6|S_{L-4}| - P(L-4)):
SPHERES_N4_EXT = {9: 45323816, 10: 316352792, 11: 2208090536, 12: 15412109328}
MULTI_CLASSES_L7_N4 = 16          # 3-word classes, first at level 7
SPHERES_N6 = (12, 132, 1452, 15972, 175692, 1932600)
FIRST_PAIR_LEVEL_N6 = 6
PAIRS_N6_AT_6 = 12

# geometric word census at the probe: newly empty words per level and
# equality of components (live words mod route swaps) with the quotient
DEAD_WORDS_N4 = {5: 56, 6: 384, 7: 2688}
DEAD_L5_SPLIT_N4 = {"gamma": 32, "delta": 24}
COMPONENTS_MATCH_THROUGH = 7

# --- Markov refinement (cutting-point move) ---------------------------------

D_OFFSET_N4 = ("0.0000261842981569894877918305012511016888653761203308"
               "291183886977")
ZP_2_N4 = "0.124973815701843010512208169498748898311134623879669170881611"
P_FIX_8_N4 = "0.937500148632681466503570733384391214504398651074454465190741"
MARKOV_POINTS_N4 = 56             # 8 moved + 8 fixed + 24 left + 16 right
MARKOV_MIN_SEP_N4 = 1.1e-3
MARKOV_ROW_SUMS_N4 = {1, 2, 7, 14, 20}

# --- cutting-point relators / quotient surface ------------------------------

RELATOR_N4 = (5, 2, 7, 4, 1, 6, 3, 8)
EULER_N4 = -2
GENUS_N4 = 2
EULER_N6 = -4
GENUS_N6 = 3
