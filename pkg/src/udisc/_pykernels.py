"""Pure-Python versions of the polynomial kernels in ``_kernels.pyx``.

Both backends use the same Neumaier-compensated accumulation, so they agree
to the last bit on every platform where ``math.pow`` is the C ``pow``.
"""

import math

import numpy as np


def block_poly(coeffs, v, cos2, sin2):
    """Sum of ``coeffs[j] * cos2**j * sin2**(v - j)`` over ``j``."""
    s = 0.0
    comp = 0.0
    pw = math.pow
    for j in range(len(coeffs)):
        c = coeffs[j]
        if c == 0.0:
            continue
        term = c * pw(cos2, j) * pw(sin2, v - j)
        t = s + term
        if abs(s) >= abs(term):
            comp += (s - t) + term
        else:
            comp += (term - t) + s
        s = t
    return s + comp


def weighted_blocks(coeffs, vexp, weights, cos2, sin2):
    """``out[p] = sum_b weights[b] * block_poly(coeffs[b], vexp[b], cos2[p], sin2[p])``."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    vexp = np.asarray(vexp, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    cos2 = np.asarray(cos2, dtype=np.float64)
    sin2 = np.asarray(sin2, dtype=np.float64)
    nb = coeffs.shape[0]
    rows = [coeffs[b].tolist() for b in range(nb)]
    vs = vexp.tolist()
    ws = weights.tolist()
    out = np.empty(cos2.shape[0], dtype=np.float64)
    for p, (x, y) in enumerate(zip(cos2.tolist(), sin2.tolist())):
        s = 0.0
        comp = 0.0
        for b in range(nb):
            w = ws[b]
            if w == 0.0:
                continue
            term = w * block_poly(rows[b], vs[b], x, y)
            t = s + term
            if abs(s) >= abs(term):
                comp += (s - t) + term
            else:
                comp += (term - t) + s
            s = t
        out[p] = s + comp
    return out
