"""Compiled inner loop shared by the dense and tiled transform engines.

The loop accumulates in strict ascending-j order and steps the twiddle
index incrementally: jk stays in [0, q) because each update adds k < q
and conditionally subtracts q, so no modulo is taken inside the loop.
Keeping the order fixed makes the output bit-for-bit independent of how
the k range is partitioned across workers.
"""

from __future__ import annotations

import numba


@numba.njit(cache=True, nogil=True)
def partial_row_sums(out, state, roots, q, k0, k1, j0, j1):
    """out[k - k0] = sum_{j in [j0, j1)} roots[(j*k) mod q] * state[j].

    Writes rows k0..k1-1 of the (possibly tiled) transform into `out`,
    which the caller passes as a view over its own disjoint slice.
    """
    for k in range(k0, k1):
        acc = complex(0.0, 0.0)
        jk = (j0 * k) % q
        for j in range(j0, j1):
            acc += roots[jk] * state[j]
            jk += k
            if jk >= q:
                jk -= q
        out[k - k0] = acc
