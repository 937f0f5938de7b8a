"""Vectorized pure-numpy kernels (fallback path).

Mirrors ``numba_backend`` operation for operation; contribution order and
arithmetic are kept identical so outputs match bitwise.
"""

import numpy as np


def popcount(values):
    """Set-bit counts of a nonnegative int64 array."""
    return np.bitwise_count(values.astype(np.uint64)).astype(np.int64)


def ladder_contributions(indices, amps, bit_mask, prefix_mask, create):
    """Apply one ladder operator to every basis term.

    Terms where the operator is illegal (creating into an occupied mode,
    annihilating an empty one) are dropped.  Returns the surviving target
    indices, the signed amplitudes, and the per-term count of occupied
    anticommuting modes below the operator's mode.
    """
    occupied = (indices & bit_mask) != 0
    keep = occupied != create
    idx = indices[keep]
    amp = amps[keep]
    counts = popcount(idx & prefix_mask)
    signs = 1 - ((counts & 1) << 1)
    return idx ^ bit_mask, amp * signs, counts


def hop_contributions(indices, amps, src_mask, dst_mask, prefix_src, prefix_dst, between_mask):
    """Annihilate at src then create at dst on every basis term.

    Returns target indices, signed amplitudes, the occupied anticommuting
    count strictly between the endpoints (evaluated after annihilation),
    and the exact acquired sign of each surviving term.
    """
    keep = ((indices & src_mask) != 0) & ((indices & dst_mask) == 0)
    idx = indices[keep]
    amp = amps[keep]
    src_counts = popcount(idx & prefix_src)
    mid = idx ^ src_mask
    dst_counts = popcount(mid & prefix_dst)
    signs = 1 - (((src_counts + dst_counts) & 1) << 1)
    counts = popcount(mid & between_mask)
    return mid | dst_mask, amp * signs, counts, signs


def rotation_contributions(indices, amps, mask_i, mask_j, prefix_i, prefix_j, cos_t, sin_t):
    """Two-level hopping rotation exp(i*theta*(f_j^+ f_i + f_i^+ f_j)).

    Terms with both or neither of the two modes occupied are fixed points.
    Singly occupied terms contribute cos(theta) on themselves and
    i*s*sin(theta) on their bit-swapped partner, where s is the coupling
    sign evaluated on the i-occupied member of the pair.

    Output layout is [fixed terms, diagonal terms, transfer terms], each
    block in input order; the caller coalesces.
    """
    pair_mask = mask_i | mask_j
    rotating = ((indices & mask_i) != 0) != ((indices & mask_j) != 0)
    fixed_idx = indices[~rotating]
    fixed_amp = amps[~rotating]
    ridx = indices[rotating]
    ramp = amps[rotating]
    u = np.where((ridx & mask_i) != 0, ridx, ridx ^ pair_mask)
    counts = popcount(u & prefix_i) + popcount((u ^ mask_i) & prefix_j)
    signs = 1 - ((counts & 1) << 1)
    transfer = 1j * sin_t
    out_idx = np.concatenate([fixed_idx, ridx, ridx ^ pair_mask])
    out_amp = np.concatenate([fixed_amp, ramp * cos_t, ramp * (transfer * signs)])
    return out_idx, out_amp
