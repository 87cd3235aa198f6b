# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loop: pooled mean-past-lifetime curves over a batch of
replications.  Mirrors ``_mpl_kernel_py.pooled_mpl_curve``."""

import numpy as np

cimport numpy as cnp


def pooled_mpl_curve(values, ts):
    """Evaluate the pooled estimator for each replication row at each t.

    Parameters
    ----------
    values : (reps, n) array
        One replication's pooled sample per row.
    ts : (T,) array
        Evaluation times.

    Returns
    -------
    est : (reps, T) float64 array, 0.0 where no value is at or below t
    cnt : (reps, T) int64 array of qualifying counts
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    est = np.zeros((values.shape[0], ts.shape[0]), dtype=np.float64)
    cnt = np.zeros((values.shape[0], ts.shape[0]), dtype=np.int64)
    _curve(values, ts, est, cnt)
    return est, cnt


cdef void _curve(
    double[:, ::1] values,
    double[::1] ts,
    double[:, ::1] est,
    cnp.int64_t[:, ::1] cnt,
) noexcept nogil:
    cdef Py_ssize_t reps = values.shape[0]
    cdef Py_ssize_t n = values.shape[1]
    cdef Py_ssize_t nt = ts.shape[0]
    cdef Py_ssize_t i, j, l
    cdef double t, acc, x
    cdef cnp.int64_t c
    for i in range(reps):
        for j in range(nt):
            t = ts[j]
            acc = 0.0
            c = 0
            for l in range(n):
                x = values[i, l]
                if x <= t:
                    c += 1
                    acc += t - x
            if c > 0:
                acc = acc / c
                # Roundoff must not push the mean past its exact bound t.
                est[i, j] = acc if acc < t else t
            cnt[i, j] = c
