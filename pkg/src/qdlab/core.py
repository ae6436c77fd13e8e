"""Shared building blocks: prime bases, product weights, subsets, log-domain scalars."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

# Largest dimension for which full subset enumeration (2^d - 1 subsets) is attempted.
MAX_ENUM_DIMENSION = 25

# Products switch to log space beyond this many factors, or when any factor
# leaves [1/LOG_DOMAIN_MAGNITUDE, LOG_DOMAIN_MAGNITUDE].
LOG_DOMAIN_FACTOR_LIMIT = 32
LOG_DOMAIN_MAGNITUDE = 1e8

_SEGMENT = 1 << 20


class BudgetError(ValueError):
    """An operation would exceed one of its desk-scale budget guards."""


# ---------------------------------------------------------------------------
# prime bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PrimeBases:
    """The first ``d`` primes, used as per-coordinate Halton bases."""

    d: int
    bases: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if len(self.bases) != self.d:
            raise ValueError("bases length must equal d")
        if self.bases[-1] < 2:
            raise ValueError("bases must be exactly the first d primes, ascending")
        primes = _simple_sieve(self.bases[-1])
        if primes.size != self.d or not np.array_equal(primes, np.asarray(self.bases)):
            raise ValueError("bases must be exactly the first d primes, ascending")

    def __iter__(self) -> Iterator[int]:
        return iter(self.bases)

    def __getitem__(self, j: int) -> int:
        return self.bases[j]


def sieve_limit(d: int) -> int:
    """A-priori upper bound for the d-th prime (valid for d >= 6, padded below)."""
    if d < 6:
        return 13
    x = float(d)
    return int(x * (math.log(x) + math.log(math.log(x)))) + 1


def _simple_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime)


def first_primes(d: int) -> PrimeBases:
    """Return the first ``d`` primes via a segmented sieve.

    The sieve allocates one boolean segment at a time up to the a-priori
    bound ``d (log d + log log d)``, so very large ``d`` stays cheap in memory.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    limit = sieve_limit(d)
    base = _simple_sieve(math.isqrt(limit) + 1)
    found: list[int] = []
    lo = 2
    while lo <= limit and len(found) < d:
        hi = min(lo + _SEGMENT, limit + 1)
        mark = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                mark[start - lo :: p] = False
        found.extend(int(v) for v in np.flatnonzero(mark) + lo)
        lo = hi
    if len(found) < d:
        raise RuntimeError("prime bound underestimated the d-th prime")
    return PrimeBases(d, tuple(found[:d]))


# ---------------------------------------------------------------------------
# product weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class WeightFamily:
    """Product weights gamma_j, one per coordinate, non-increasing in (0, 1].

    ``kind`` is one of ``power`` (gamma_j = j^-(1+alpha)), ``reciprocal``
    (1/j), ``logsqrt`` (min(1, c_hat/sqrt(log(j+1)))) and ``explicit``
    (a finite validated list).
    """

    kind: str
    alpha: float = 0.0
    c_hat: float = 0.0
    gammas: tuple[float, ...] = ()

    @classmethod
    def power_law(cls, alpha: float) -> "WeightFamily":
        if not alpha > 0.0:
            raise ValueError("power-law exponent must be > 0")
        return cls("power", alpha=float(alpha))

    @classmethod
    def reciprocal(cls) -> "WeightFamily":
        return cls("reciprocal")

    @classmethod
    def log_sqrt(cls, c_hat: float) -> "WeightFamily":
        if not c_hat > 0.0:
            raise ValueError("logsqrt scale must be > 0")
        return cls("logsqrt", c_hat=float(c_hat))

    @classmethod
    def explicit(cls, gammas: Iterable[float]) -> "WeightFamily":
        vals = tuple(float(g) for g in gammas)
        if not vals:
            raise ValueError("explicit weights need at least one entry")
        for g in vals:
            if not 0.0 < g <= 1.0:
                raise ValueError("explicit weights must lie in (0, 1]")
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise ValueError("explicit weights must be non-increasing")
        return cls("explicit", gammas=vals)

    @classmethod
    def ones(cls, d: int) -> "WeightFamily":
        """Unit weights: every projection counts fully."""
        return cls.explicit([1.0] * d)

    @classmethod
    def parse(cls, text: str) -> "WeightFamily":
        """Parse a CLI weight spec: ``power:A``, ``reciprocal``, ``logsqrt:C``,
        ``explicit:g1,g2,...`` or ``ones:D``."""
        name, _, arg = text.partition(":")
        name = name.strip().lower()
        if name == "power":
            return cls.power_law(float(arg))
        if name == "reciprocal":
            return cls.reciprocal()
        if name == "logsqrt":
            return cls.log_sqrt(float(arg))
        if name == "explicit":
            return cls.explicit(float(g) for g in arg.split(","))
        if name == "ones":
            return cls.ones(int(arg))
        raise ValueError(f"unknown weight family {text!r}")

    def __str__(self) -> str:
        if self.kind == "power":
            return f"power:{self.alpha:g}"
        if self.kind == "reciprocal":
            return "reciprocal"
        if self.kind == "logsqrt":
            return f"logsqrt:{self.c_hat:g}"
        return "explicit:" + ",".join(f"{g:g}" for g in self.gammas)

    def weight(self, j: int) -> float:
        """gamma_j for a 1-based coordinate index."""
        if j < 1:
            raise ValueError("coordinate index must be >= 1")
        if self.kind == "power":
            return float(j) ** -(1.0 + self.alpha)
        if self.kind == "reciprocal":
            return 1.0 / j
        if self.kind == "logsqrt":
            return min(1.0, self.c_hat / math.sqrt(math.log(j + 1)))
        if j > len(self.gammas):
            raise ValueError(f"explicit weights defined only up to j = {len(self.gammas)}")
        return self.gammas[j - 1]

    def weights(self, d: int) -> np.ndarray:
        """gamma_1..gamma_d as a float array."""
        j = np.arange(1, d + 1, dtype=float)
        if self.kind == "power":
            return j ** -(1.0 + self.alpha)
        if self.kind == "reciprocal":
            return 1.0 / j
        if self.kind == "logsqrt":
            return np.minimum(1.0, self.c_hat / np.sqrt(np.log(j + 1.0)))
        if d > len(self.gammas):
            raise ValueError(f"explicit weights defined only up to j = {len(self.gammas)}")
        return np.asarray(self.gammas[:d], dtype=float)


def weight_at(family: WeightFamily, j: int) -> float:
    return family.weight(j)


def stable_product(factors: Iterable[float]) -> float:
    """Product of nonnegative factors, switching to log space when the factor
    count or the factor range makes direct multiplication unsafe."""
    vals = np.asarray(list(factors), dtype=float)
    if vals.size == 0:
        return 1.0
    if np.any(vals < 0.0):
        raise ValueError("stable_product expects nonnegative factors")
    if np.any(vals == 0.0):
        return 0.0
    small = 1.0 / LOG_DOMAIN_MAGNITUDE
    if vals.size <= LOG_DOMAIN_FACTOR_LIMIT and np.all((vals >= small) & (vals <= LOG_DOMAIN_MAGNITUDE)):
        return float(np.prod(vals))
    log_sum = float(np.sum(np.log(vals)))
    if log_sum >= math.log(sys.float_info.max):
        return math.inf
    return math.exp(log_sum)


def subset_weight(family: WeightFamily, u: Sequence[int]) -> float:
    """gamma_u = prod_{j in u} gamma_j."""
    return stable_product(family.weight(j) for j in u)


def partial_sum_jgamma(family: WeightFamily, d: int) -> float:
    """sum_{j<=d} j gamma_j, the summability diagnostic for the weight family."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    j = np.arange(1, d + 1, dtype=float)
    return float(np.sum(j * family.weights(d)))


def max_nonempty_subset_product(factors: Sequence[float]) -> tuple[float, tuple[int, ...]]:
    """Maximize prod_{j in u} a_j over non-empty u, for nonnegative a_j.

    If any factor exceeds 1 the maximizer collects exactly those factors;
    otherwise it is the best singleton.  Returns (value, 1-based indices).
    """
    a = np.asarray(factors, dtype=float)
    if a.size == 0:
        raise ValueError("need at least one factor")
    if np.any(a < 0.0):
        raise ValueError("factors must be nonnegative")
    big = np.flatnonzero(a > 1.0)
    if big.size:
        return stable_product(a[big]), tuple(int(i) + 1 for i in big)
    k = int(np.argmax(a))
    return float(a[k]), (k + 1,)


def max_subset_jgamma(family: WeightFamily, d: int) -> float:
    """max over non-empty u of prod_{j in u} (j gamma_j), in closed form."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    j = np.arange(1, d + 1, dtype=float)
    value, _ = max_nonempty_subset_product(j * family.weights(d))
    return value


# ---------------------------------------------------------------------------
# subsets
# ---------------------------------------------------------------------------


def normalize_subset(u: Iterable[int], d: int) -> tuple[int, ...]:
    """Validate a coordinate subset against dimension ``d``; returns a sorted tuple."""
    items = [int(i) for i in u]
    t = tuple(sorted(items))
    if not t:
        raise ValueError("subset must be non-empty")
    if len(set(t)) != len(t):
        raise ValueError("subset contains duplicate indices")
    if t[0] < 1 or t[-1] > d:
        raise ValueError(f"subset indices must lie in 1..{d}")
    return t


def nonempty_subsets(d: int) -> Iterator[tuple[int, ...]]:
    """All non-empty subsets of {1..d}: smallest cardinality first, then lexicographic."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d > MAX_ENUM_DIMENSION:
        raise BudgetError(f"subset enumeration capped at d <= {MAX_ENUM_DIMENSION}")
    for size in range(1, d + 1):
        yield from combinations(range(1, d + 1), size)


# ---------------------------------------------------------------------------
# log-domain scalars
# ---------------------------------------------------------------------------

_FLOAT_MAX_LOG10 = math.log10(sys.float_info.max)


@dataclass(frozen=True, slots=True)
class LogValue:
    """A nonnegative scalar held as its base-10 log so magnitudes like 10^775 stay exact enough.

    ``sign`` is 0 for zero, 1 for positive; ``log10mag`` is meaningful only
    when ``sign == 1``.  Multiplication adds logs; comparison orders by sign
    then magnitude.
    """

    sign: int
    log10mag: float = 0.0

    def __post_init__(self) -> None:
        if self.sign not in (0, 1):
            raise ValueError("sign must be 0 (zero) or 1 (positive)")
        if self.sign == 1 and not math.isfinite(self.log10mag):
            raise ValueError("log10 magnitude must be finite")

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(0)

    @classmethod
    def from_float(cls, x: float) -> "LogValue":
        if x < 0.0:
            raise ValueError("LogValue represents nonnegative scalars only")
        if x == 0.0:
            return cls(0)
        return cls(1, math.log10(x))

    @classmethod
    def from_log10(cls, log10mag: float) -> "LogValue":
        return cls(1, float(log10mag))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def log10(self) -> float:
        if self.sign == 0:
            raise ValueError("log10 of zero is undefined")
        return self.log10mag

    def to_float(self) -> float:
        """Collapse to a float; overflows to inf, zero maps to 0.0."""
        if self.sign == 0:
            return 0.0
        if self.log10mag >= _FLOAT_MAX_LOG10:
            return math.inf
        try:
            return 10.0 ** self.log10mag
        except OverflowError:
            return math.inf

    def __mul__(self, other: "LogValue | float | int") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.from_float(float(other))
        if self.sign == 0 or other.sign == 0:
            return LogValue(0)
        return LogValue(1, self.log10mag + other.log10mag)

    __rmul__ = __mul__

    def __pow__(self, exponent: float) -> "LogValue":
        if self.sign == 0:
            if exponent == 0:
                return LogValue(1, 0.0)
            if exponent < 0:
                raise ZeroDivisionError("zero to a negative power")
            return LogValue(0)
        return LogValue(1, self.log10mag * float(exponent))

    def _key(self) -> tuple[int, float]:
        return (self.sign, self.log10mag if self.sign else -math.inf)

    def __lt__(self, other: "LogValue") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "LogValue") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "LogValue") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "LogValue") -> bool:
        return self._key() >= other._key()

    def mantissa_exponent(self) -> tuple[float, int]:
        """(m, e) with value = m * 10^e and 1 <= m < 10."""
        if self.sign == 0:
            raise ValueError("zero has no normalized mantissa")
        e = math.floor(self.log10mag)
        m = 10.0 ** (self.log10mag - e)
        if m >= 10.0:  # guard the floor/pow seam
            m /= 10.0
            e += 1
        return m, e

    def format_e(self, digits: int = 12) -> str:
        """Render as ``mEe`` scientific text, e.g. ``1.7E775``."""
        if self.sign == 0:
            return "0"
        m, e = self.mantissa_exponent()
        m = round(m, digits - 1)
        if m >= 10.0:
            m /= 10.0
            e += 1
        return f"{m:.{digits - 1}f}E{e}"

    def format_decimal(self, digits: int = 6) -> str:
        """Human rendering, e.g. ``4.313x10^45``; small magnitudes print plainly."""
        if self.sign == 0:
            return "0"
        if -6.0 < self.log10mag < 15.0:
            return f"{self.to_float():.{digits}g}"
        m, e = self.mantissa_exponent()
        m = round(m, digits - 1)
        if m >= 10.0:
            m /= 10.0
            e += 1
        return f"{m:.{digits - 1}f}x10^{e}"

    @classmethod
    def parse(cls, text: str) -> "LogValue":
        """Inverse of the renderers: accepts ``mEe``, ``mx10^e`` and plain floats."""
        t = text.strip().replace("×", "x")
        if t == "0":
            return cls(0)
        for sep in ("x10^", "X10^"):
            if sep in t:
                m_text, e_text = t.split(sep, 1)
                m = float(m_text)
                if m <= 0.0:
                    raise ValueError("mantissa must be positive")
                return cls(1, math.log10(m) + float(int(e_text)))
        if "E" in t or "e" in t:
            m_text, e_text = t.replace("e", "E").split("E", 1)
            m = float(m_text)
            if m <= 0.0:
                raise ValueError("mantissa must be positive")
            return cls(1, math.log10(m) + float(int(e_text)))
        return cls.from_float(float(t))

    def __str__(self) -> str:
        return self.format_decimal()
