"""Numba-compiled kernels (default hot path).

Same contracts as ``numpy_backend``; explicit loops instead of vector
operations, no fastmath, sequential evaluation order.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _popcount_one(x):
    count = 0
    while x:
        x &= x - 1
        count += 1
    return count


@njit(cache=True)
def popcount(values):
    out = np.empty(values.shape[0], dtype=np.int64)
    for i in range(values.shape[0]):
        out[i] = _popcount_one(values[i])
    return out


@njit(cache=True)
def ladder_contributions(indices, amps, bit_mask, prefix_mask, create):
    n = indices.shape[0]
    out_idx = np.empty(n, dtype=np.int64)
    out_amp = np.empty(n, dtype=np.complex128)
    counts = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        idx = indices[i]
        occupied = (idx & bit_mask) != 0
        if occupied == create:
            continue
        c = _popcount_one(idx & prefix_mask)
        sign = 1 - ((c & 1) << 1)
        out_idx[m] = idx ^ bit_mask
        out_amp[m] = amps[i] * sign
        counts[m] = c
        m += 1
    return out_idx[:m], out_amp[:m], counts[:m]


@njit(cache=True)
def hop_contributions(indices, amps, src_mask, dst_mask, prefix_src, prefix_dst, between_mask):
    n = indices.shape[0]
    out_idx = np.empty(n, dtype=np.int64)
    out_amp = np.empty(n, dtype=np.complex128)
    counts = np.empty(n, dtype=np.int64)
    signs = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        idx = indices[i]
        if (idx & src_mask) == 0 or (idx & dst_mask) != 0:
            continue
        c_src = _popcount_one(idx & prefix_src)
        mid = idx ^ src_mask
        c_dst = _popcount_one(mid & prefix_dst)
        sign = 1 - (((c_src + c_dst) & 1) << 1)
        out_idx[m] = mid | dst_mask
        out_amp[m] = amps[i] * sign
        counts[m] = _popcount_one(mid & between_mask)
        signs[m] = sign
        m += 1
    return out_idx[:m], out_amp[:m], counts[:m], signs[:m]


@njit(cache=True)
def rotation_contributions(indices, amps, mask_i, mask_j, prefix_i, prefix_j, cos_t, sin_t):
    n = indices.shape[0]
    pair_mask = mask_i | mask_j
    n_rot = 0
    for i in range(n):
        idx = indices[i]
        if ((idx & mask_i) != 0) != ((idx & mask_j) != 0):
            n_rot += 1
    out_idx = np.empty(n + n_rot, dtype=np.int64)
    out_amp = np.empty(n + n_rot, dtype=np.complex128)
    m = 0
    # fixed points
    for i in range(n):
        idx = indices[i]
        if ((idx & mask_i) != 0) == ((idx & mask_j) != 0):
            out_idx[m] = idx
            out_amp[m] = amps[i]
            m += 1
    # diagonal part of the rotation
    for i in range(n):
        idx = indices[i]
        if ((idx & mask_i) != 0) != ((idx & mask_j) != 0):
            out_idx[m] = idx
            out_amp[m] = amps[i] * cos_t
            m += 1
    # transfer part
    transfer = 1j * sin_t
    for i in range(n):
        idx = indices[i]
        occ_i = (idx & mask_i) != 0
        occ_j = (idx & mask_j) != 0
        if occ_i == occ_j:
            continue
        u = idx if occ_i else idx ^ pair_mask
        c = _popcount_one(u & prefix_i) + _popcount_one((u ^ mask_i) & prefix_j)
        sign = 1 - ((c & 1) << 1)
        out_idx[m] = idx ^ pair_mask
        out_amp[m] = amps[i] * (transfer * sign)
        m += 1
    return out_idx, out_amp
