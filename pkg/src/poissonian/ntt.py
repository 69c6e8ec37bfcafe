"""Exact integer autocorrelation through a number-theoretic transform.

Works modulo the prime ``998244353 = 119 * 2**23 + 1`` with primitive
root 3, so transform lengths up to ``2**23`` are available.  Products of two
residues stay below ``2**60`` and fit comfortably in int64.
"""

import numpy as np

MOD = 998244353
ROOT = 3
MAX_LOG2 = 23


def _twiddles(length, inverse=False):
    """Powers ``w**j`` for ``j < length // 2`` of a primitive ``length``-th root."""
    w = pow(ROOT, (MOD - 1) // length, MOD)
    if inverse:
        w = pow(w, MOD - 2, MOD)
    half = length // 2
    tw = np.ones(1, dtype=np.int64)
    while tw.size < half:
        step = pow(w, tw.size, MOD)
        tw = np.concatenate([tw, tw * step % MOD])
    return tw[:half]


def ntt_forward(a):
    """Decimation-in-frequency transform; output is in bit-reversed order."""
    a = np.array(a, dtype=np.int64) % MOD
    L = a.size
    tw_full = _twiddles(L)
    span = L
    while span >= 2:
        h = span // 2
        tw = tw_full[:: L // span]
        blk = a.reshape(L // span, 2, h)
        u = blk[:, 0, :].copy()
        v = blk[:, 1, :]
        blk[:, 0, :] = (u + v) % MOD
        blk[:, 1, :] = (u - v) % MOD * tw % MOD
        span = h
    return a


def ntt_inverse(a):
    """Decimation-in-time inverse taking bit-reversed input to natural order."""
    a = np.array(a, dtype=np.int64) % MOD
    L = a.size
    tw_full = _twiddles(L, inverse=True)
    span = 2
    while span <= L:
        h = span // 2
        tw = tw_full[:: L // span]
        blk = a.reshape(L // span, 2, h)
        u = blk[:, 0, :].copy()
        v = blk[:, 1, :] * tw % MOD
        blk[:, 0, :] = (u + v) % MOD
        blk[:, 1, :] = (u - v) % MOD
        span *= 2
    return a * pow(L, MOD - 2, MOD) % MOD


def exact_autocorrelation(elements, X):
    """``c[n] = #{(a, b): a - b = n}`` for ``0 <= n <= X``, computed exactly."""
    elements = np.asarray(elements, dtype=np.int64)
    if elements.size >= MOD:
        raise OverflowError("set too large for the modular transform")
    length = 1 << (2 * X + 1).bit_length()
    if length.bit_length() - 1 > MAX_LOG2:
        raise OverflowError(f"X={X} needs a transform longer than 2**{MAX_LOG2}")
    ind = np.zeros(length, dtype=np.int64)
    ind[elements] = 1
    rev = np.zeros(length, dtype=np.int64)
    rev[(-elements) % length] = 1
    prod = ntt_forward(ind) * ntt_forward(rev) % MOD
    return ntt_inverse(prod)[: X + 1]
