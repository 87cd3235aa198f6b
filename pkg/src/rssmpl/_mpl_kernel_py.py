"""Pure-numpy fallback for the compiled estimator kernel.

Same contract as ``_mpl_kernel.pooled_mpl_curve``; results agree with the
compiled version up to floating-point summation order.
"""

from __future__ import annotations

import numpy as np


def pooled_mpl_curve(values, ts):
    """Evaluate the pooled estimator for each replication row at each t.

    ``values`` is (reps, n), ``ts`` is (T,).  Returns ``(est, cnt)`` with
    shapes (reps, T); ``est`` is 0.0 wherever ``cnt`` is 0.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    reps = values.shape[0]
    est = np.zeros((reps, ts.shape[0]), dtype=np.float64)
    cnt = np.zeros((reps, ts.shape[0]), dtype=np.int64)
    for j, t in enumerate(ts):
        below = values <= t
        c = below.sum(axis=1)
        acc = ((t - values) * below).sum(axis=1)
        cnt[:, j] = c
        # minimum(..., t): roundoff must not push a mean past its bound t.
        est[:, j] = np.where(c > 0, np.minimum(acc / np.maximum(c, 1), t), 0.0)
    return est, cnt
