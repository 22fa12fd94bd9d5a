"""Interchangeable engines for the transform V_k = (1/sqrt(q)) sum_j e^(+2i*pi*jk/q) V_j.

Four routes to the same unitary:

* ``dense_dft``   - O(q^2) row-at-a-time kernel, outputs split into blocks
                    that run on a thread pool (the production path).
* ``tiled_dft``   - same arithmetic with the inner sum split into segments
                    whose partial results are reduced afterwards; trades
                    extra memory for shorter per-task inner loops.
* ``fft_dft``     - radix-2 O(q log q) fast transform.
* ``circuit_qft`` - gate-by-gate Hadamard/controlled-phase construction,
                    capped at small widths; exists to cross-check the rest.

All engines use the +i sign convention and fold 1/sqrt(q) into the output,
so squared magnitudes are probabilities directly.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ._kernels import partial_row_sums

ENGINES = ("dense", "tiled", "fft", "circuit")

CIRCUIT_MAX_WIDTH = 12


def _require_power_of_two(q: int) -> None:
    if q < 2 or q & (q - 1):
        raise ValueError(f"size must be a power of two >= 2, got {q}")


@dataclass(frozen=True)
class TwiddleTable:
    """roots[j] = e^(+2i*pi*j/q); one table serves every output row."""

    q: int
    roots: np.ndarray


@dataclass(frozen=True)
class KernelPlan:
    """Work decomposition: outputs per block, input segments, workers.

    workers=None means "use every available core". block_size larger
    than q is clamped rather than rejected so one default works for
    every register size.
    """

    block_size: int = 256
    tiles: int = 1
    workers: int | None = None

    def resolved(self, q: int) -> "KernelPlan":
        bs = min(self.block_size, q)
        if bs < 1 or q % bs:
            raise ValueError(f"block_size {self.block_size} does not divide q={q}")
        if self.tiles < 1 or q % self.tiles:
            raise ValueError(f"tiles {self.tiles} does not divide q={q}")
        workers = self.workers if self.workers is not None else (os.cpu_count() or 1)
        if workers < 1:
            raise ValueError("workers must be >= 1")
        return replace(self, block_size=bs, workers=workers)

    def num_blocks(self, q: int) -> int:
        return q // min(self.block_size, q)


def build_twiddles(q: int, max_width: int = 24) -> TwiddleTable:
    _require_power_of_two(q)
    if q.bit_length() - 1 > max_width:
        raise ValueError(f"q={q} exceeds the configured maximum width {max_width}")
    roots = np.exp((2j * np.pi / q) * np.arange(q))
    return TwiddleTable(q=q, roots=roots)


def _run_blocks(tasks, workers: int) -> None:
    # Tasks write disjoint output views, so no locking is needed; the
    # kernel drops the GIL, letting blocks overlap on real cores.
    if workers <= 1 or len(tasks) <= 1:
        for args in tasks:
            partial_row_sums(*args)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for _ in pool.map(lambda args: partial_row_sums(*args), tasks):
            pass


def dense_dft(state: np.ndarray, tw: TwiddleTable, plan: KernelPlan) -> np.ndarray:
    """Full O(q^2) transform, parallel over output blocks."""
    q = tw.q
    state = np.ascontiguousarray(state, dtype=np.complex128)
    if state.shape != (q,):
        raise ValueError(f"state length {state.shape} does not match q={q}")
    plan = plan.resolved(q)
    if plan.tiles != 1:
        raise ValueError("dense_dft is untiled; use tiled_dft for tiles >= 2")
    out = np.empty(q, dtype=np.complex128)
    bs = plan.block_size
    tasks = [
        (out[k0 : k0 + bs], state, tw.roots, q, k0, k0 + bs, 0, q)
        for k0 in range(0, q, bs)
    ]
    _run_blocks(tasks, plan.workers)
    out *= 1.0 / math.sqrt(q)
    return out


def tiled_dft(state: np.ndarray, tw: TwiddleTable, plan: KernelPlan) -> np.ndarray:
    """Dense transform with the inner sum split into contiguous segments.

    Each (output block, segment) pair writes one strip of a partial-sum
    buffer; a single-owner reduction then adds the segments in ascending
    order. Results match dense_dft to float accumulation-order error.
    """
    q = tw.q
    state = np.ascontiguousarray(state, dtype=np.complex128)
    if state.shape != (q,):
        raise ValueError(f"state length {state.shape} does not match q={q}")
    plan = plan.resolved(q)
    if plan.tiles < 2:
        raise ValueError("tiled_dft needs tiles >= 2; use dense_dft otherwise")
    seg = q // plan.tiles
    bs = plan.block_size
    partial = np.empty((plan.tiles, q), dtype=np.complex128)
    tasks = [
        (partial[t, k0 : k0 + bs], state, tw.roots, q, k0, k0 + bs, t * seg, (t + 1) * seg)
        for t in range(plan.tiles)
        for k0 in range(0, q, bs)
    ]
    _run_blocks(tasks, plan.workers)
    out = partial[0].copy()
    for t in range(1, plan.tiles):
        out += partial[t]
    out *= 1.0 / math.sqrt(q)
    return out


def fft_dft(state: np.ndarray) -> np.ndarray:
    """Radix-2 decimation-in-time version of the same transform."""
    a = np.array(state, dtype=np.complex128)
    q = a.size
    _require_power_of_two(q)
    a = bit_reverse_permute(a)
    size = 2
    while size <= q:
        half = size // 2
        tw = np.exp((2j * np.pi / size) * np.arange(half))
        blocks = a.reshape(-1, size)
        t = blocks[:, half:] * tw
        blocks[:, half:] = blocks[:, :half] - t
        blocks[:, :half] += t
        size *= 2
    a *= 1.0 / math.sqrt(q)
    return a


def apply_hadamard(state: np.ndarray, qubit_index: int) -> np.ndarray:
    """(u, v) -> ((u+v)/sqrt2, (u-v)/sqrt2) over index pairs differing in one bit."""
    a = np.array(state, dtype=np.complex128)
    q = a.size
    _require_power_of_two(q)
    w = q.bit_length() - 1
    if not 0 <= qubit_index < w:
        raise ValueError(f"qubit index {qubit_index} out of range for w={w}")
    view = a.reshape(q >> (qubit_index + 1), 2, 1 << qubit_index)
    u = view[:, 0, :].copy()
    v = view[:, 1, :].copy()
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    view[:, 0, :] = (u + v) * inv_sqrt2
    view[:, 1, :] = (u - v) * inv_sqrt2
    return a


def apply_controlled_phase(
    state: np.ndarray, control: int, target: int, angle: float
) -> np.ndarray:
    """Multiply amplitudes with both index bits set by e^(+i*angle)."""
    if control == target:
        raise ValueError("control and target must differ")
    a = np.array(state, dtype=np.complex128)
    q = a.size
    _require_power_of_two(q)
    w = q.bit_length() - 1
    for bit in (control, target):
        if not 0 <= bit < w:
            raise ValueError(f"qubit index {bit} out of range for w={w}")
    idx = np.arange(q)
    sel = ((idx >> control) & (idx >> target) & 1).astype(bool)
    a[sel] *= np.exp(1j * angle)
    return a


def bit_reverse_permute(state: np.ndarray) -> np.ndarray:
    """output[reverse_bits(a)] = input[a] over the full index width."""
    a = np.asarray(state)
    q = a.size
    _require_power_of_two(q)
    w = q.bit_length() - 1
    idx = np.arange(q)
    rev = np.zeros(q, dtype=np.int64)
    for b in range(w):
        rev |= ((idx >> b) & 1) << (w - 1 - b)
    out = np.empty_like(a)
    out[rev] = a
    return out


def circuit_qft(state: np.ndarray, max_width: int = CIRCUIT_MAX_WIDTH) -> np.ndarray:
    """Gate-level construction: Hadamards plus controlled phases.

    The gate count is O(w^2) but every gate touches all q amplitudes, so
    this engine is capped (it is an oracle, not a performance path).
    """
    a = np.array(state, dtype=np.complex128)
    q = a.size
    _require_power_of_two(q)
    w = q.bit_length() - 1
    if w > max_width:
        raise ValueError(f"circuit engine capped at w <= {max_width}, got w={w}")
    for i in range(w - 1, -1, -1):
        a = apply_hadamard(a, i)
        for j in range(i - 1, -1, -1):
            a = apply_controlled_phase(a, j, i, 2.0 * np.pi / (1 << (i - j + 1)))
    return bit_reverse_permute(a)


def transform(
    state: np.ndarray,
    engine: str,
    tw: TwiddleTable | None = None,
    plan: KernelPlan | None = None,
) -> np.ndarray:
    """Run the selected engine; dense/tiled get a twiddle table on demand."""
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if engine == "fft":
        return fft_dft(state)
    if engine == "circuit":
        return circuit_qft(state)
    if tw is None:
        tw = build_twiddles(len(state))
    if plan is None:
        plan = KernelPlan()
    if engine == "dense":
        return dense_dft(state, tw, plan)
    return tiled_dft(state, tw, plan)
