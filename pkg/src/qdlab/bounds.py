"""Discrepancy upper bounds for Halton-type point sets and their weighted forms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    MAX_ENUM_DIMENSION,
    BudgetError,
    PrimeBases,
    WeightFamily,
    first_primes,
    max_nonempty_subset_product,
    normalize_subset,
)

#: Bound families evaluated per projection u at sample size N.
BOUND_KINDS = (
    "halton",  # (log N)^|u| / N * prod (3 b_j - 2) / log b_j, per-coordinate primes
    "niederreiter-classic",  # 1/N * prod ((b_j-1)/(2 log b_j) log N + (b_j+3)/2)
    "six-j",  # (log N)^|u| / N * prod 6j, base-free linear factors
    "niederreiter-seq",  # (log N)^|u| / N * (4 b^2 / log b)^|u| * prod j, one base b
    "xing-niederreiter",  # b^g (log N)^|u| / N * C^|u| * prod j
    "hofer-niederreiter",  # same shape as xing-niederreiter
    "sobol",  # (log N)^|u| / N * C^|u| * prod j log2 log2 (j+3)
)

_NEEDS_SINGLE_BASE = {"niederreiter-seq", "xing-niederreiter", "hofer-niederreiter"}
_NEEDS_G = {"xing-niederreiter", "hofer-niederreiter"}
_NEEDS_C = {"xing-niederreiter", "hofer-niederreiter", "sobol"}


@dataclass(frozen=True, slots=True)
class BoundModel:
    """One bound family plus its free constants.

    ``b`` is the single construction base for digital-sequence models, ``g``
    the quality offset, ``C`` a leading constant the source leaves free
    (must exceed 1; defaults to 2).
    """

    kind: str
    b: int | None = None
    g: int | None = None
    C: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in BOUND_KINDS:
            raise ValueError(f"unknown bound kind {self.kind!r}; expected one of {BOUND_KINDS}")
        if self.kind in _NEEDS_SINGLE_BASE:
            if self.b is None or self.b < 2:
                raise ValueError(f"{self.kind} needs a construction base b >= 2")
        if self.kind in _NEEDS_G:
            if self.g is None or self.g < 0:
                raise ValueError(f"{self.kind} needs a quality offset g >= 0")
        if self.kind in _NEEDS_C:
            if self.C is None:
                object.__setattr__(self, "C", 2.0)
            elif not self.C > 1.0:
                raise ValueError(f"{self.kind} needs a leading constant C > 1")


def projection_bound(
    model: BoundModel,
    u: Sequence[int],
    N: int,
    bases: PrimeBases | Sequence[int] | None = None,
) -> float:
    """Evaluate the model's star-discrepancy bound for projection ``u`` at size ``N``.

    Per-coordinate prime bases default to the first primes; everything is
    accumulated in log space so deep projections cannot overflow.
    """
    if N < 2:
        raise ValueError("bounds need N >= 2 (log N = 0 is degenerate)")
    d = max(int(i) for i in u) if u else 0
    uu = normalize_subset(u, d)
    log_n = math.log(N)
    loglog = math.log(log_n)
    size = len(uu)

    if model.kind in ("halton", "niederreiter-classic"):
        if bases is None:
            bases = first_primes(d)
        elif not isinstance(bases, PrimeBases):
            bases = PrimeBases(len(tuple(bases)), tuple(int(b) for b in bases))
        if bases.d < d:
            raise ValueError("bases do not cover the largest index in u")
        bj = [bases[j - 1] for j in uu]
        if model.kind == "halton":
            acc = size * loglog - log_n
            acc += sum(math.log((3.0 * b - 2.0) / math.log(b)) for b in bj)
            return math.exp(acc)
        acc = -log_n
        acc += sum(
            math.log((b - 1.0) / (2.0 * math.log(b)) * log_n + (b + 3.0) / 2.0) for b in bj
        )
        return math.exp(acc)

    if model.kind == "six-j":
        acc = size * loglog - log_n + sum(math.log(6.0 * j) for j in uu)
        return math.exp(acc)

    if model.kind == "niederreiter-seq":
        b = float(model.b)
        acc = size * loglog - log_n + size * math.log(4.0 * b * b / math.log(b))
        acc += sum(math.log(j) for j in uu)
        return math.exp(acc)

    if model.kind in ("xing-niederreiter", "hofer-niederreiter"):
        b = float(model.b)
        acc = model.g * math.log(b) + size * loglog - log_n + size * math.log(model.C)
        acc += sum(math.log(j) for j in uu)
        return math.exp(acc)

    # sobol
    acc = size * loglog - log_n + size * math.log(model.C)
    acc += sum(math.log(j * math.log2(math.log2(j + 3.0))) for j in uu)
    return math.exp(acc)


def six_j_domination(j: int, bases: PrimeBases | None = None) -> tuple[float, float]:
    """((3 b_j - 2)/log b_j, 6 j): the per-coordinate prime factor and its linear cap."""
    if j < 1:
        raise ValueError("coordinate index must be >= 1")
    if bases is None:
        bases = first_primes(j)
    if bases.d < j:
        raise ValueError("bases do not cover index j")
    b = bases[j - 1]
    return (3.0 * b - 2.0) / math.log(b), 6.0 * j


# ---------------------------------------------------------------------------
# weighted bounds
# ---------------------------------------------------------------------------


def weighted_bound_max(family: WeightFamily, d: int, N: int) -> float:
    """Max-form weighted bound: (1/N) max over non-empty u of prod (6 j gamma_j log N)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if N < 2:
        raise ValueError("bounds need N >= 2")
    j = np.arange(1, d + 1, dtype=float)
    factors = 6.0 * j * family.weights(d) * math.log(N)
    value, _ = max_nonempty_subset_product(factors)
    return value / N


def weighted_bound_product(family: WeightFamily, d: int, N: int) -> float:
    """Product-form weighted bound: (1/N) (-1 + prod (1 + 6 j gamma_j log N)).

    Dominates the max form; the product accumulates as a sum of log1p terms
    so large dimensions stay finite as long as the result itself fits.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if N < 2:
        raise ValueError("bounds need N >= 2")
    j = np.arange(1, d + 1, dtype=float)
    total = float(np.sum(np.log1p(6.0 * j * family.weights(d) * math.log(N))))
    return math.expm1(total) / N


def _half_tables(values: np.ndarray) -> np.ndarray:
    """Subset sums of ``values`` indexed by bitmask (table of length 2^len)."""
    table = np.zeros(1, dtype=float)
    for v in values:
        table = np.concatenate((table, table + v))
    return table


def min_improved_weighted_bound(family: WeightFamily, d: int, N: int) -> float:
    """max over non-empty u of prod(j gamma_j) * min(prod 1/j, (6 log N)^|u| / N).

    Exact subset enumeration, meet-in-the-middle so d = 25 stays cheap.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d > MAX_ENUM_DIMENSION:
        raise BudgetError(f"subset enumeration capped at d <= {MAX_ENUM_DIMENSION}")
    if N < 2:
        raise ValueError("bounds need N >= 2")
    j = np.arange(1, d + 1, dtype=float)
    log_jg = np.log(j * family.weights(d))
    log_invj = -np.log(j)
    log_c = math.log(6.0 * math.log(N))
    log_n = math.log(N)

    h = d // 2
    lo_jg, hi_jg = _half_tables(log_jg[:h]), _half_tables(log_jg[h:])
    lo_invj, hi_invj = _half_tables(log_invj[:h]), _half_tables(log_invj[h:])
    lo_card = np.array([bin(i).count("1") for i in range(1 << h)], dtype=float)
    hi_card = np.array([bin(i).count("1") for i in range(1 << (d - h))], dtype=float)

    best = -math.inf
    for hi in range(len(hi_jg)):
        skip_empty = 1 if hi == 0 else 0  # exclude the overall empty subset
        jg = hi_jg[hi] + lo_jg[skip_empty:]
        invj = hi_invj[hi] + lo_invj[skip_empty:]
        card = hi_card[hi] + lo_card[skip_empty:]
        if len(jg) == 0:
            continue
        val = jg + np.minimum(invj, card * log_c - log_n)
        m = float(val.max())
        if m > best:
            best = m
    return math.exp(best)


# ---------------------------------------------------------------------------
# Lambert W machinery
# ---------------------------------------------------------------------------

LAMBERT_MAX_ITER = 50
LAMBERT_TOL = 1e-13


def lambert_w(z: float) -> float:
    """Principal-branch W(z) for z >= 0 by Halley iteration from w = log(1+z).

    Stops when |w e^w - z| <= 1e-13 z; raises after 50 iterations.
    """
    z = float(z)
    if not z >= 0.0:
        raise ValueError("principal branch evaluated for z >= 0 only")
    if z == 0.0:
        return 0.0
    w = math.log1p(z)
    tol = LAMBERT_TOL * z
    for _ in range(LAMBERT_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - z
        if abs(f) <= tol:
            return w
        # Halley step for f(w) = w e^w - z
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        w -= f / denom
    raise ArithmeticError("Lambert W iteration did not converge within 50 steps")


def lambert_w_residual(z: float, w: float) -> float:
    """|w e^w - z|, the defining residual."""
    return abs(w * math.exp(w) - z)


def solve_power_equation(a: float, z: float) -> float:
    """The x > 0 with (a x)^x = z, namely x = log z / W(a log z)."""
    if a <= 0.0:
        raise ValueError("coefficient a must be positive")
    if z <= 1.0:
        raise ValueError("needs z > 1 so that log z > 0")
    lz = math.log(z)
    return lz / lambert_w(a * lz)


def ell_star(N: float) -> float:
    """The crossing cardinality: the real ell solving (e/ell)^ell = (6 log N)^ell / N.

    Rearranged as (6 log N / e * ell)^ell = N, hence
    ell* = log N / W((6/e) (log N)^2).
    """
    if not N > 1.0:
        raise ValueError("needs N > 1")
    log_n = math.log(N)
    return log_n / lambert_w((6.0 / math.e) * log_n * log_n)


def ell_star_residual(N: float) -> float:
    """Relative back-substitution residual |(e/l)^l / ((6 log N)^l / N) - 1| at l = ell_star."""
    ell = ell_star(N)
    log_n = math.log(N)
    lhs = ell * (1.0 - math.log(ell))
    rhs = ell * math.log(6.0 * log_n) - log_n
    return abs(math.expm1(lhs - rhs))


_LOG10 = math.log(10.0)


def delta_star(N: float, *, factor: float = 6.0) -> float:
    """The N-dependent exponent gap delta*(N); needs N >= 10.

    delta*(N) = (loglog N + log c) / (2 loglog N + log c - 1
                - log(2 loglog N + log c - 1)) with c = 6 for anchored boxes
    and c = 12 for the unanchored variant.  Decreases to 1/2 very slowly.
    """
    if not N >= 10.0:
        raise ValueError("defined for N >= 10")
    return delta_star_from_log(math.log(N), factor=factor)


def delta_star_from_log(log_n: float, *, factor: float = 6.0) -> float:
    """delta* evaluated from log N directly, for N too large to represent."""
    if not log_n >= _LOG10 * (1.0 - 1e-12):
        raise ValueError("defined for N >= 10")
    if not factor > 0.0:
        raise ValueError("constant must be positive")
    t = math.log(log_n)
    lc = math.log(factor)
    s = 2.0 * t + lc - 1.0
    if s <= 0.0:
        raise ValueError("argument too small for the exponent expression")
    return (t + lc) / (s - math.log(s))


def halton_weighted_bound_final(
    family: WeightFamily,
    d: int,
    N: float,
    *,
    unanchored: bool = False,
) -> float:
    """Closed-form weighted bound N^-(1 - delta*(N)) * max_u prod (j gamma_j).

    The unanchored flag doubles the interior constant (6 -> 12), which only
    enters through delta*.
    """
    from .core import max_subset_jgamma

    factor = 12.0 if unanchored else 6.0
    delta = delta_star(N, factor=factor)
    peak = max_subset_jgamma(family, d)
    return math.exp((delta - 1.0) * math.log(N)) * peak
