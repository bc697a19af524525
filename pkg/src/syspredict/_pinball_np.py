"""Pure-numpy lane of the exact pinball-loss candidate scan.

Mirrors the compiled lane: same candidate set (pair lines in lexicographic
(i, j) order, then horizontals), same deterministic tie-breaking on
(loss, |slope|, intercept); np.lexsort is stable, so ties resolve to the
earliest candidate exactly as the sequential scan does.  Candidates are
processed in blocks to bound the residual-matrix size.
"""

from __future__ import annotations

import numpy as np

BLOCK = 2048


def _best_in_block(x, y, tau, a_blk, b_blk):
    resid = y[None, :] - a_blk[:, None] - b_blk[:, None] * x[None, :]
    loss = np.sum(resid * (tau - (resid < 0.0)), axis=1)
    order = np.lexsort((a_blk, np.abs(b_blk), loss))
    i = order[0]
    return loss[i], abs(b_blk[i]), a_blk[i], b_blk[i]


def scan(x, y, tau):
    """Return (intercept, slope, loss) of the exact pinball minimizer."""
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n = x.size
    ii, jj = np.triu_indices(n, k=1)
    dx = x[jj] - x[ii]
    keep = dx != 0.0
    ii, jj, dx = ii[keep], jj[keep], dx[keep]
    b_all = (y[jj] - y[ii]) / dx
    a_all = y[ii] - b_all * x[ii]
    # horizontals through each point come after the pair candidates
    a_all = np.concatenate([a_all, y])
    b_all = np.concatenate([b_all, np.zeros(n)])

    best = None  # (loss, |b|, a, b)
    for start in range(0, a_all.size, BLOCK):
        cand = _best_in_block(
            x, y, tau, a_all[start:start + BLOCK], b_all[start:start + BLOCK]
        )
        if best is None or cand[:3] < best[:3]:
            best = cand
    loss, _, a, b = best
    return float(a), float(b), float(loss)
