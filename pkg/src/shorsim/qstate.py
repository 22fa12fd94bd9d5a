"""Two-part quantum register |r1, r2> simulated classically.

Part 1 holds q amplitudes over the exponents a, part 2 holds the residue
x**a mod n attached to each index. Because part 2 is a deterministic
function of the index, the joint state never needs a q*n-dimensional
array: one complex vector plus one integer vector of length q is exact.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace

import numpy as np

_NORM_TOL = 1e-9
_DUMP_MAGIC = b"QREG"
_DUMP_VERSION = 1
_DUMP_HEADER = struct.Struct("<4sIII")  # magic, version, w, reserved


class Sampler:
    """Deterministic uniform-double source derived from a 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self) -> float:
        """Next double in [0, 1)."""
        return float(self._gen.random())


@dataclass
class CompositeRegister:
    q: int
    amplitudes: np.ndarray  # complex128, length q
    residues: np.ndarray  # int64, length q, values in [0, n)
    n: int | None = None
    x: int | None = None
    collapsed_k: int | None = None


def _require_power_of_two(q: int) -> None:
    if q < 2 or q & (q - 1):
        raise ValueError(f"q must be a power of two >= 2, got {q}")


def _require_normalized(reg: CompositeRegister) -> None:
    norm = l2_norm(reg)
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValueError(f"register is not normalized (|amp| = {norm!r})")


def init_uniform(q: int) -> CompositeRegister:
    """Uniform superposition (1/sqrt(q)) * sum_a |a, 0>."""
    _require_power_of_two(q)
    amp = np.full(q, 1.0 / math.sqrt(q), dtype=np.complex128)
    res = np.zeros(q, dtype=np.int64)
    return CompositeRegister(q=q, amplitudes=amp, residues=res)


def entangle_modexp(reg: CompositeRegister, x: int, n: int) -> CompositeRegister:
    """Fill part 2 with x**a mod n for every index a.

    The residues repeat with the multiplicative order of x, so one pass
    around the cycle followed by tiling reproduces the incremental
    residue[a] = residue[a-1]*x mod n recurrence for the whole register.
    """
    if n < 2:
        raise ValueError("modulus must be >= 2")
    if math.gcd(x, n) != 1:
        raise ValueError(f"x={x} shares a factor with n={n}")
    if reg.collapsed_k is not None:
        raise ValueError("register already collapsed")
    cycle = [1]
    r = x % n
    while r != 1:
        cycle.append(r)
        r = r * x % n
    res = np.resize(np.asarray(cycle, dtype=np.int64), reg.q)
    return replace(reg, residues=res, n=n, x=x)


def measure_part2(reg: CompositeRegister, s: Sampler) -> tuple[int, CompositeRegister]:
    """Observe part 2, collapsing part 1 onto the matching indices.

    The outcome k is drawn by inverse CDF over the total weight of each
    residue class; surviving amplitudes are rescaled to unit norm.
    """
    _require_normalized(reg)
    if reg.collapsed_k is not None:
        raise ValueError("part 2 was already measured")
    weights = np.abs(reg.amplitudes) ** 2
    nclasses = int(reg.residues.max()) + 1
    probs = np.bincount(reg.residues, weights=weights, minlength=nclasses)
    cum = np.cumsum(probs)
    k = int(np.searchsorted(cum, s.uniform() * cum[-1], side="right"))
    k = min(k, nclasses - 1)
    mask = reg.residues == k
    kept = np.sqrt(weights[mask].sum())
    amp = np.zeros_like(reg.amplitudes)
    amp[mask] = reg.amplitudes[mask] / kept
    return k, replace(reg, amplitudes=amp, collapsed_k=k)


def sample_part1(reg: CompositeRegister, s: Sampler) -> int:
    """Born-rule read of part 1: index m with probability |amp[m]|**2."""
    _require_normalized(reg)
    probs = np.abs(reg.amplitudes) ** 2
    cum = np.cumsum(probs)
    m = int(np.searchsorted(cum, s.uniform() * cum[-1], side="right"))
    return min(m, reg.q - 1)


def l2_norm(reg: CompositeRegister) -> float:
    return float(np.linalg.norm(reg.amplitudes))


def dump_state(reg: CompositeRegister, path) -> None:
    """Write amplitudes as little-endian (re, im) double pairs.

    A 16-byte header (magic "QREG", version, register width w) precedes
    the q complex values.
    """
    w = reg.q.bit_length() - 1
    with open(path, "wb") as fh:
        fh.write(_DUMP_HEADER.pack(_DUMP_MAGIC, _DUMP_VERSION, w, 0))
        fh.write(np.ascontiguousarray(reg.amplitudes, dtype="<c16").tobytes())


def load_state(path) -> np.ndarray:
    """Read back a dump_state file, returning the amplitude vector."""
    with open(path, "rb") as fh:
        magic, version, w, _ = _DUMP_HEADER.unpack(fh.read(_DUMP_HEADER.size))
        if magic != _DUMP_MAGIC:
            raise ValueError(f"not a register dump (magic {magic!r})")
        if version != _DUMP_VERSION:
            raise ValueError(f"unsupported dump version {version}")
        q = 1 << w
        data = np.frombuffer(fh.read(q * 16), dtype="<c16")
        if data.size != q:
            raise ValueError("truncated register dump")
        return data.astype(np.complex128)
