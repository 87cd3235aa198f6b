"""Bundled demo data: a simulated ranked-set sample of HIV infection-to-
diagnosis times in weeks, set size 5, six cycles.

The entry 2447 (cycle 3, rank 4) is implausibly large next to its
neighbors and is almost certainly a transcription artifact in the
original tabulation; it is preserved verbatim so the worked example stays
reproducible against that source.
"""

# Rows are cycles 1..6, columns are judged ranks 1..5.
TABLE_CYCLE_MAJOR = (
    (192, 277, 293, 329, 376),
    (158, 256, 236, 411, 508),
    (137, 280, 451, 2447, 478),
    (171, 229, 143, 268, 248),
    (203, 232, 238, 367, 363),
    (287, 274, 415, 413, 323),
)

SET_SIZE = 5
CYCLES = 6
