"""Deterministic top-k selection shared by every scorer in the package.

Scores are compared after rounding to ``SCORE_DECIMALS`` places so that values
which are mathematically equal but differ by floating-point noise count as
ties; ties are then broken by ascending id.
"""

import numpy as np

SCORE_DECIMALS = 12


def tie_key(score: float) -> float:
    return float(np.round(float(score), SCORE_DECIMALS))


def top_k(scores, id_order, k, mask=None):
    """Indices of the ``k`` best entries of ``scores``.

    ``id_order[i]`` is the lexicographic rank of entry ``i``'s id. ``mask``
    (boolean, True = eligible) removes entries from consideration.
    """
    scores = np.asarray(scores, dtype=np.float64)
    idx = np.arange(len(scores)) if mask is None else np.flatnonzero(mask)
    if k <= 0 or len(idx) == 0:
        return idx[:0]
    keys = -np.round(scores[idx], SCORE_DECIMALS)
    order = np.lexsort((np.asarray(id_order)[idx], keys))
    return idx[order[:k]]
