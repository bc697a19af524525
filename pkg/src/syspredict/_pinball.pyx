# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled lane of the exact pinball-loss candidate scan.

Evaluates every line through two sample points with distinct abscissae plus
every horizontal line through a point, returning the minimizer of the
pinball loss with deterministic tie-breaking (loss, then |slope|, then
intercept).  Per-candidate summation aborts early once the running loss
strictly exceeds the incumbent; pinball terms are nonnegative, so aborted
candidates can never win or tie.
"""

from libc.math cimport INFINITY, fabs


def scan(double[::1] x, double[::1] y, double tau):
    """Return (intercept, slope, loss) of the exact pinball minimizer."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double best_a = 0.0, best_b = 0.0, best_loss = INFINITY
    cdef double a, b, dx, r, loss
    cdef bint aborted

    for i in range(n):
        for j in range(i + 1, n):
            dx = x[j] - x[i]
            if dx == 0.0:
                continue
            b = (y[j] - y[i]) / dx
            a = y[i] - b * x[i]
            loss = 0.0
            aborted = False
            for k in range(n):
                r = y[k] - a - b * x[k]
                loss += r * tau if r >= 0.0 else r * (tau - 1.0)
                if loss > best_loss:
                    aborted = True
                    break
            if aborted:
                continue
            if loss < best_loss or (
                loss == best_loss
                and (
                    fabs(b) < fabs(best_b)
                    or (fabs(b) == fabs(best_b) and a < best_a)
                )
            ):
                best_loss = loss
                best_a = a
                best_b = b

    for i in range(n):
        a = y[i]
        loss = 0.0
        aborted = False
        for k in range(n):
            r = y[k] - a
            loss += r * tau if r >= 0.0 else r * (tau - 1.0)
            if loss > best_loss:
                aborted = True
                break
        if aborted:
            continue
        if loss < best_loss or (
            loss == best_loss and (0.0 < fabs(best_b) or (best_b == 0.0 and a < best_a))
        ):
            best_loss = loss
            best_a = a
            best_b = 0.0

    return best_a, best_b, best_loss
