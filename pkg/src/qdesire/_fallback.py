"""Pure numpy versions of the hot kernels.

These are selected when the compiled extension is unavailable and serve as
the reference the compiled kernels are benchmarked and cross-checked against.
"""
import math

import numpy as np


def jacobi_sweeps(a, v, thresh, max_sweeps):
    """Run cyclic complex Jacobi sweeps on ``a`` in place.

    ``v`` accumulates the rotations. Returns the number of sweeps used, or -1
    when the off-diagonal part is still above ``thresh`` after ``max_sweeps``.
    """
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            m = np.abs(a[p, p + 1:]).max()
            if m > off:
                off = m
        if off <= thresh:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= thresh:
                    continue
                e = (apq / mag).conjugate()
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * e * aq
                a[:, q] = s * ap + c * e * aq
                rp = a[p, :].copy()
                rq = a[q, :]
                ec = e.conjugate()
                a[p, :] = c * rp - s * ec * rq
                a[q, :] = s * rp + c * ec * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * e * vq
                v[:, q] = s * vp + c * e * vq
    return -1


def accumulate_payoffs(cdf, payoffs, draws):
    """Map uniform draws to outcomes by inverse CDF and sum payoffs in order.

    Parameters
    ----------
    cdf : (k,) float array, cumulative Born probabilities with ``cdf[-1] == 1``
    payoffs : (g, k) float array, payoff of each gamble for each outcome
    draws : (N,) float array of uniforms in [0, 1)

    Returns
    -------
    outcomes : (N,) int64 array
    totals : (g,) float array, left-to-right sums over trials
    """
    k = cdf.shape[0]
    outcomes = np.searchsorted(cdf, draws, side="right").astype(np.int64)
    np.minimum(outcomes, k - 1, out=outcomes)
    g = payoffs.shape[0]
    totals = np.zeros(g)
    if draws.shape[0]:
        # cumsum adds strictly left to right, matching the compiled loop
        for j in range(g):
            totals[j] = np.cumsum(payoffs[j, outcomes])[-1]
    return outcomes, totals
