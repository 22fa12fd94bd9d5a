"""End-to-end factoring driver with retries, timing, and recursion.

One attempt walks the whole pipeline: pick a base, build the register,
entangle, measure part 2, transform part 1, sample, and post-process the
sampled index into a period candidate and (with luck) factors. The run
loop retries with fresh randomness and recursively splits composite
cofactors until only primes remain.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

from . import numtheory as nt
from . import qft, qstate

PHASES = ("setup", "entangle", "measure2", "qft", "sample", "postprocess")

_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class ShorConfig:
    n: int
    base_override: int | None = None
    seed: int = 0
    kernel: str = "fft"
    plan: qft.KernelPlan = field(default_factory=qft.KernelPlan)
    max_attempts: int = 32
    time_budget: float | None = None
    multiplier_cap: int = 8
    max_width: int = 24
    dump_state_path: str | None = None


@dataclass
class AttemptTrace:
    x: int
    q: int | None
    k: int | None
    m: int | None
    candidate: nt.PeriodCandidate | None
    outcome: nt.FactorOutcome
    phase_times: dict[str, float]


@dataclass
class ShorResult:
    n: int
    factors: list[int]
    attempts: list[AttemptTrace]
    total_time: float
    succeeded: bool


def _derive_seed(seed: int, salt: int) -> int:
    """splitmix64 step over seed xor salt; decorrelates child runs."""
    z = (seed ^ (salt * 0x9E3779B97F4A7C15)) & _MASK64
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _draw_base(n: int, sampler: qstate.Sampler) -> int:
    # uniform over [2, n-2]; 1 and n-1 are excluded because their
    # periods (1 and 2 with x^(p/2) = -1) never produce factors
    return 2 + int(sampler.uniform() * (n - 3))


def single_attempt(cfg: ShorConfig, sampler: qstate.Sampler) -> AttemptTrace:
    """One pass of the quantum pipeline, every phase timed."""
    n = cfg.n
    if cfg.kernel not in qft.ENGINES:
        raise ValueError(f"unknown kernel {cfg.kernel!r}")
    times = {ph: 0.0 for ph in PHASES}

    t0 = time.perf_counter()
    if cfg.base_override is not None:
        x = cfg.base_override
        if not 1 < x < n:
            raise ValueError(f"base override {x} outside (1, {n})")
    else:
        x = _draw_base(n, sampler)
    g = math.gcd(x, n)
    if g > 1:
        times["setup"] = time.perf_counter() - t0
        return AttemptTrace(
            x=x, q=None, k=None, m=None, candidate=None,
            outcome=nt.FactorOutcome.classical(g), phase_times=times,
        )
    rw = nt.choose_register_width(n, cfg.max_width)
    reg = qstate.init_uniform(rw.q)
    tw = None
    if cfg.kernel in ("dense", "tiled"):
        tw = qft.build_twiddles(rw.q, cfg.max_width)
    times["setup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    reg = qstate.entangle_modexp(reg, x, n)
    times["entangle"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    k, reg = qstate.measure_part2(reg, sampler)
    times["measure2"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    spectrum = qft.transform(reg.amplitudes, cfg.kernel, tw, cfg.plan)
    times["qft"] = time.perf_counter() - t0
    post = replace(reg, amplitudes=spectrum)
    if cfg.dump_state_path:
        qstate.dump_state(post, cfg.dump_state_path)

    t0 = time.perf_counter()
    m = qstate.sample_part1(post, sampler)
    times["sample"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    candidate = None
    est = nt.extract_period(m, rw.q, n, x, cfg.multiplier_cap)
    if isinstance(est, nt.PeriodCandidate):
        candidate = est
        outcome = nt.derive_factors(n, x, est.p)
    else:
        outcome = est
    times["postprocess"] = time.perf_counter() - t0

    return AttemptTrace(
        x=x, q=rw.q, k=k, m=m, candidate=candidate,
        outcome=outcome, phase_times=times,
    )


def run_shor(cfg: ShorConfig) -> ShorResult:
    """Factor cfg.n completely, retrying and recursing as needed.

    Returns succeeded=False (with traces intact) when max_attempts or
    the time budget runs out before a nontrivial split is found.
    """
    t_start = time.perf_counter()
    n = cfg.n
    if n < 3:
        raise ValueError("n must be >= 3")
    deadline = None if cfg.time_budget is None else t_start + cfg.time_budget
    attempts: list[AttemptTrace] = []

    parts: list[int] | None = None
    shortcut = nt.pre_checks(n)  # raises NothingToFactor on primes
    if shortcut is not None:
        parts = list(shortcut.factors)
    else:
        sampler = qstate.Sampler(cfg.seed)
        for _ in range(cfg.max_attempts):
            if deadline is not None and time.perf_counter() >= deadline:
                break
            trace = single_attempt(cfg, sampler)
            attempts.append(trace)
            if trace.outcome.kind == "classical_shortcut":
                g = trace.outcome.shortcut
                parts = [g, n // g]
                break
            if trace.outcome.kind == "factors":
                parts = list(trace.outcome.factors)
                break

    if parts is None:
        return ShorResult(
            n=n, factors=[], attempts=attempts,
            total_time=time.perf_counter() - t_start, succeeded=False,
        )

    primes: list[int] = []
    for part in parts:
        if nt.is_prime(part):
            primes.append(part)
            continue
        budget = None if deadline is None else max(deadline - time.perf_counter(), 0.0)
        child = replace(
            cfg,
            n=part,
            seed=_derive_seed(cfg.seed, part),
            base_override=None,
            time_budget=budget,
            dump_state_path=None,
        )
        sub = run_shor(child)
        attempts.extend(sub.attempts)
        if not sub.succeeded:
            return ShorResult(
                n=n, factors=[], attempts=attempts,
                total_time=time.perf_counter() - t_start, succeeded=False,
            )
        primes.extend(sub.factors)

    primes.sort()
    return ShorResult(
        n=n, factors=primes, attempts=attempts,
        total_time=time.perf_counter() - t_start, succeeded=True,
    )


def profile_phases(result: ShorResult) -> dict[str, float]:
    """Fraction of summed attempt time spent in each pipeline phase."""
    if not result.attempts:
        raise ValueError("result carries no attempts to profile")
    sums = {ph: 0.0 for ph in PHASES}
    for trace in result.attempts:
        for ph, v in trace.phase_times.items():
            sums[ph] += v
    total = sum(sums.values())
    if total <= 0.0:
        raise ValueError("attempt traces carry no timing data")
    return {ph: v / total for ph, v in sums.items()}
