"""Classical number theory for Shor's algorithm.

Everything here is exact integer arithmetic: modular exponentiation,
register sizing, the continued-fraction estimator that turns a measured
QFT index back into a period candidate, and the gcd step that turns a
verified period into factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

RETRY_REASONS = frozenset(
    {"odd_period", "trivial_root", "zero_measurement", "bad_candidate"}
)

# Witnesses proving compositeness for every composite below 3.3e24,
# which covers the full 64-bit range this package targets.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class NothingToFactor(ValueError):
    """Raised when the input is prime (or too small to split)."""


@dataclass(frozen=True)
class RegisterWidth:
    """Power-of-two register size q = 2**w with n**2 <= q < 2*n**2."""

    q: int
    w: int


@dataclass(frozen=True)
class PeriodCandidate:
    """A verified period guess and the convergent it came from.

    p = multiplier * denominator(source_convergent), and the caller has
    already checked modpow(x, p, n) == 1 before this object exists.
    """

    p: int
    source_convergent: tuple[int, int]
    multiplier: int


@dataclass(frozen=True)
class FactorOutcome:
    """Result of one post-processing step: factors, a retry, or a gcd win."""

    kind: str  # "factors" | "retry" | "classical_shortcut"
    factors: tuple[int, int] | None = None
    reason: str | None = None
    shortcut: int | None = None

    @classmethod
    def found(cls, f1: int, f2: int) -> "FactorOutcome":
        lo, hi = sorted((f1, f2))
        return cls(kind="factors", factors=(lo, hi))

    @classmethod
    def retry(cls, reason: str) -> "FactorOutcome":
        if reason not in RETRY_REASONS:
            raise ValueError(f"unknown retry reason {reason!r}")
        return cls(kind="retry", reason=reason)

    @classmethod
    def classical(cls, g: int) -> "FactorOutcome":
        return cls(kind="classical_shortcut", shortcut=g)


def gcd(a: int, b: int) -> int:
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    if a < 0 or b < 0:
        raise ValueError("gcd expects nonnegative arguments")
    return math.gcd(a, b)


def modpow(base: int, exp: int, modulus: int) -> int:
    """base**exp mod modulus by square-and-multiply.

    Python integers widen automatically, so the intermediate products
    cannot overflow even for 64-bit operands.
    """
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    if base < 0 or exp < 0:
        raise ValueError("base and exponent must be nonnegative")
    return pow(base, exp, modulus)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    if n in small:
        return True
    if any(n % p == 0 for p in small):
        return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _integer_nth_root(n: int, k: int) -> int:
    """Largest b with b**k <= n."""
    if n < 1:
        return 0
    b = int(round(n ** (1.0 / k)))
    # float estimate can be off by one either way
    while b > 1 and b**k > n:
        b -= 1
    while (b + 1) ** k <= n:
        b += 1
    return b


def perfect_power(n: int) -> tuple[int, int] | None:
    """Return (b, k) with n = b**k, k >= 2, if such a pair exists."""
    if n < 4:
        return None
    for k in range(2, n.bit_length() + 1):
        b = _integer_nth_root(n, k)
        if b >= 2 and b**k == n:
            return b, k
    return None


def pre_checks(n: int) -> FactorOutcome | None:
    """Strip the cases the quantum pipeline cannot or need not handle.

    Even n and perfect powers are factored immediately; primes raise
    NothingToFactor; a plain odd composite returns None and proceeds.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if n % 2 == 0:
        if n == 2:
            raise NothingToFactor("2 is prime")
        return FactorOutcome.found(2, n // 2)
    if is_prime(n):
        raise NothingToFactor(f"{n} is prime")
    power = perfect_power(n)
    if power is not None:
        b, _ = power
        return FactorOutcome.found(b, n // b)
    return None


def choose_register_width(n: int, max_width: int = 24) -> RegisterWidth:
    """The unique power of two q with n**2 <= q < 2*n**2."""
    if n < 3:
        raise ValueError("n must be >= 3")
    w = (n * n - 1).bit_length()
    if w > max_width:
        raise ValueError(
            f"register width {w} for n={n} exceeds the configured maximum {max_width}"
        )
    return RegisterWidth(q=1 << w, w=w)


def classical_period(x: int, n: int) -> int:
    """Brute-force multiplicative order of x mod n (test oracle)."""
    if not 1 < x < n:
        raise ValueError("need 1 < x < n")
    if math.gcd(x, n) != 1:
        raise ValueError("x must be coprime to n")
    r = x % n
    p = 1
    while r != 1:
        r = r * x % n
        p += 1
    return p


def convergents(m: int, q: int) -> list[tuple[int, int]]:
    """All continued-fraction convergents of m/q, in lowest terms.

    The zero measurement carries no information, so m = 0 yields an
    empty list rather than the degenerate convergent 0/1.
    """
    if q < 1:
        raise ValueError("q must be positive")
    if not 0 <= m < q:
        raise ValueError("need 0 <= m < q")
    if m == 0:
        return []
    terms = []
    a, b = m, q
    while b:
        terms.append(a // b)
        a, b = b, a % b
    out = []
    num, num_prev = 1, 0
    den, den_prev = 0, 1
    for t in terms:
        num, num_prev = t * num + num_prev, num
        den, den_prev = t * den + den_prev, den
        out.append((num, den))
    return out


def extract_period(
    m: int,
    q: int,
    n: int,
    x: int,
    multiplier_cap: int = 8,
) -> PeriodCandidate | FactorOutcome:
    """Estimate the period of x mod n from a measured index m.

    Scans convergent denominators d <= n of m/q and small multiples
    p = k*d, and returns the smallest p that verifies modpow(x, p, n) == 1.
    Among candidates with equal p, the one needing the smallest multiplier
    wins (i.e. the convergent that already carries the most structure).
    """
    if m == 0:
        return FactorOutcome.retry("zero_measurement")
    best: tuple[int, int, int] | None = None  # (p, multiplier, denominator)
    best_src: tuple[int, int] | None = None
    for num, den in convergents(m, q):
        if den > n:
            break
        for k in range(1, multiplier_cap + 1):
            p = k * den
            if p > n:
                break
            if modpow(x, p, n) == 1:
                key = (p, k, den)
                if best is None or key < best:
                    best = key
                    best_src = (num, den)
                break  # larger k on this denominator only grows p
    if best is None:
        return FactorOutcome.retry("bad_candidate")
    p, k, _ = best
    return PeriodCandidate(p=p, source_convergent=best_src, multiplier=k)


def derive_factors(n: int, x: int, p: int) -> FactorOutcome:
    """Turn a verified period into factors of n via gcd(x**(p/2) +- 1, n)."""
    if modpow(x, p, n) != 1:
        raise ValueError("p is not a period of x mod n")
    if p % 2 == 1:
        return FactorOutcome.retry("odd_period")
    y = modpow(x, p // 2, n)
    if y == n - 1:
        return FactorOutcome.retry("trivial_root")
    for g in (math.gcd(y - 1, n), math.gcd(y + 1, n)):
        if 1 < g < n:
            return FactorOutcome.found(g, n // g)
    return FactorOutcome.retry("bad_candidate")
