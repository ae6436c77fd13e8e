"""Exact star, unanchored and weighted discrepancies on critical grids, at desk scale."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import (
    BudgetError,
    WeightFamily,
    nonempty_subsets,
    normalize_subset,
    subset_weight,
)
from .sequences import PointSet

# The full critical grid has prod_j (m_j + 1) nodes; refuse beyond this.
GRID_CELL_BUDGET = 10**9
# The unanchored sweep touches prod_j (#corner pairs_j) boxes; same cap.
PAIR_CELL_BUDGET = 10**9
# Coordinates closer than this are one grid line.
COORD_MERGE_TOL = 1e-15

_CHUNK = 1 << 21  # boxes evaluated per vectorized batch in the unanchored sweep
_DENSE_SLAB = 8  # per-slab point count above which scatter+cumsum beats region adds


@dataclass(frozen=True)
class AnchoredBox:
    """An origin-anchored box [0, upper); upper in [0, 1]^d."""

    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.upper:
            raise ValueError("box needs at least one coordinate")
        for a in self.upper:
            if not 0.0 <= a <= 1.0:
                raise ValueError("box corner must lie in [0, 1]^d")


@dataclass(frozen=True)
class Box:
    """A corner pair (lower, upper) with lower <= upper componentwise."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper) or not self.upper:
            raise ValueError("corner dimensions must match and be non-empty")
        for a, b in zip(self.lower, self.upper):
            if not (0.0 <= a <= b <= 1.0):
                raise ValueError("need 0 <= lower <= upper <= 1 componentwise")


@dataclass(frozen=True)
class DiscrepancyResult:
    """A discrepancy value with the box (and subset, when weighted) attaining it.

    ``witness_closed`` records the counting convention under which the witness
    reproduces the value: False means the plain half-open/open count, True the
    closed count (the supremum is approached by boxes shrinking onto the
    closed box).  For weighted results the box lives in the projection named
    by ``witness_subset``.
    """

    value: float
    witness_box: AnchoredBox | Box
    witness_closed: bool
    witness_subset: tuple[int, ...] | None = None

    def to_json(self) -> str:
        import json

        if isinstance(self.witness_box, AnchoredBox):
            box = {"upper": list(self.witness_box.upper), "closed": self.witness_closed}
        else:
            box = {
                "lower": list(self.witness_box.lower),
                "upper": list(self.witness_box.upper),
                "closed": self.witness_closed,
            }
        doc = {
            "value": self.value,
            "witness_box": box,
            "witness_subset": list(self.witness_subset) if self.witness_subset else None,
        }
        return json.dumps(doc)


def local_discrepancy(p: PointSet, box: AnchoredBox | Sequence[float]) -> float:
    """Delta(alpha) = #{x < alpha componentwise}/N - vol[0, alpha)."""
    alpha = np.asarray(box.upper if isinstance(box, AnchoredBox) else box, dtype=float)
    if alpha.ndim != 1 or alpha.shape[0] != p.d:
        raise ValueError("corner dimension must match the point set")
    if np.any(alpha < 0.0) or np.any(alpha > 1.0):
        raise ValueError("corner must lie in [0, 1]^d")
    count = int(np.count_nonzero(np.all(p.coords < alpha, axis=1)))
    return count / p.N - float(np.prod(alpha))


def _grid_axis(col: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct values (merged within COORD_MERGE_TOL) and per-point ranks."""
    uniq = np.unique(col)
    if len(uniq) > 1:
        keep = np.empty(len(uniq), dtype=bool)
        keep[0] = True
        np.greater(np.diff(uniq), COORD_MERGE_TOL, out=keep[1:])
        uniq = uniq[keep]
    ranks = np.searchsorted(uniq, col, side="right") - 1
    return uniq, ranks


# ---------------------------------------------------------------------------
# star discrepancy
# ---------------------------------------------------------------------------


def star_discrepancy_exact(p: PointSet, *, budget: int = GRID_CELL_BUDGET) -> DiscrepancyResult:
    """Exact D*_N via the critical grid prod_j ({x_ij} + {1}).

    At every grid node alpha both one-sided gaps are evaluated: the open gap
    vol(alpha) - #{x < alpha}/N and the closed gap #{x <= alpha}/N -
    vol(alpha); the supremum over all boxes equals the maximum of these over
    the grid.  Counting uses padded cumulative rank counts, swept one slab of
    the first axis at a time, so memory stays at the size of one grid slice.
    """
    coords = p.coords
    N, d = coords.shape
    axes = [_grid_axis(coords[:, j]) for j in range(d)]
    cells = math.prod(len(u) + 1 for u, _ in axes)
    if cells > budget:
        raise BudgetError(f"critical-grid budget exceeded: {cells:.3g} > {budget:.3g} nodes")
    if d == 1:
        value, alpha, closed = _star_1d(N, axes[0])
    else:
        value, alpha, closed = _star_nd(coords, axes)
    return DiscrepancyResult(value, AnchoredBox(alpha), closed)


def _star_1d(N: int, axis: tuple[np.ndarray, np.ndarray]) -> tuple[float, tuple[float, ...], bool]:
    uniq, ranks = axis
    m = len(uniq)
    g = np.append(uniq, 1.0)
    sr = np.sort(ranks)
    nodes = np.arange(m + 1)
    open_cnt = np.searchsorted(sr, nodes, side="left")
    closed_cnt = np.searchsorted(sr, np.minimum(nodes, m - 1), side="right")
    open_gap = g - open_cnt / N
    closed_gap = closed_cnt / N - g
    combined = np.maximum(open_gap, closed_gap)
    k = int(np.argmax(combined))
    value = float(combined[k])
    return value, (float(g[k]),), bool(closed_gap[k] > open_gap[k])


def _star_nd(coords: np.ndarray, axes: list[tuple[np.ndarray, np.ndarray]]) -> tuple[float, tuple[float, ...], bool]:
    N, d = coords.shape
    uniq0, ranks0 = axes[0]
    m0 = len(uniq0)
    g0 = np.append(uniq0, 1.0)
    inner = axes[1:]
    inner_sizes = tuple(len(u) + 1 for u, _ in inner)
    g_inner = [np.append(u, 1.0) for u, _ in inner]
    inner_ranks = [r for _, r in inner]

    vol_rest = g_inner[0]
    for g in g_inner[1:]:
        vol_rest = np.multiply.outer(vol_rest, g)

    # closed-count lookup along each inner axis: node k reads cumulative cell min(k+1, m)
    closed_idx = [np.minimum(np.arange(s) + 1, s - 1) for s in inner_sizes]

    order = np.argsort(ranks0, kind="stable")
    starts = np.searchsorted(ranks0[order], np.arange(m0 + 1))

    A = np.zeros(inner_sizes, dtype=np.int32)  # Cp[k0]: counts with rank0 < k0, cumulative over inner ranks
    tmp: np.ndarray | None = None
    inv_n = 1.0 / N
    best_value = -math.inf
    best_node: tuple[int, int] = (0, 0)

    for k0 in range(m0 + 1):
        vol = g0[k0] * vol_rest
        gaps = vol - A * inv_n  # open gap at (k0, .): A still holds Cp[k0]

        if k0 < m0:
            sel = order[starts[k0] : starts[k0 + 1]]
            if len(sel) <= _DENSE_SLAB:
                for i in sel:
                    region = tuple(slice(int(inner_ranks[t][i]) + 1, None) for t in range(d - 1))
                    A[region] += 1
            else:
                if tmp is None:
                    tmp = np.zeros(inner_sizes, dtype=np.int32)
                else:
                    tmp.fill(0)
                np.add.at(tmp, tuple(inner_ranks[t][sel] + 1 for t in range(d - 1)), 1)
                for ax in range(d - 1):
                    np.cumsum(tmp, axis=ax, out=tmp)
                A += tmp

        closed = A * inv_n  # A now holds Cp[min(k0+1, m0)]
        for ax, idx in enumerate(closed_idx):
            closed = np.take(closed, idx, axis=ax)
        np.maximum(gaps, closed - vol, out=gaps)

        slab_max = float(gaps.max())
        if slab_max > best_value:
            best_value = slab_max
            best_node = (k0, int(np.argmax(gaps)))

    k0, flat = best_node
    inner_idx = np.unravel_index(flat, inner_sizes)
    alpha = (float(g0[k0]),) + tuple(float(g_inner[t][inner_idx[t]]) for t in range(d - 1))
    a = np.asarray(alpha)
    vol = float(np.prod(a))
    open_cnt = int(np.count_nonzero(np.all(coords < a, axis=1)))
    closed_cnt = int(np.count_nonzero(np.all(coords <= a, axis=1)))
    closed_side = (closed_cnt * inv_n - vol) > (vol - open_cnt * inv_n)
    return best_value, alpha, bool(closed_side)


# ---------------------------------------------------------------------------
# unanchored discrepancy
# ---------------------------------------------------------------------------


def _axis_pairs(uniq: np.ndarray) -> dict[str, np.ndarray]:
    """Corner pairs for one axis: lower grid {0} + coords, upper grid coords + {1}.

    Returns per-pair edge lengths and padded-cumulative rank windows for
    closed-closed and open-open counting (window given as [lo, hip) with
    hip clamped so empty windows count zero).
    """
    m = len(uniq)
    lower = uniq if uniq[0] == 0.0 else np.concatenate(([0.0], uniq))
    upper = np.concatenate((uniq, [1.0]))
    nl, nu = len(lower), len(upper)

    # pair (i, j) is admissible when lower[i] <= upper[j]
    first_j = np.searchsorted(upper, lower, side="left")
    counts = nu - first_j
    a_idx = np.repeat(np.arange(nl), counts)
    b_idx = np.concatenate([np.arange(fj, nu) for fj in first_j]) if nl else np.empty(0, int)

    lo_cc_ax = np.searchsorted(uniq, lower, side="left")  # first rank with coord >= lower
    lo_oo_ax = np.searchsorted(uniq, lower, side="right")  # first rank with coord > lower
    hi_cc_ax = np.searchsorted(uniq, upper, side="right")  # one past last rank with coord <= upper
    hi_oo_ax = np.searchsorted(uniq, upper, side="left")  # one past last rank with coord < upper

    a_val = lower[a_idx]
    b_val = upper[b_idx]
    return {
        "edge": b_val - a_val,
        "a_val": a_val,
        "b_val": b_val,
        "lo_cc": lo_cc_ax[a_idx],
        "hip_cc": np.maximum(lo_cc_ax[a_idx], hi_cc_ax[b_idx]),
        "lo_oo": lo_oo_ax[a_idx],
        "hip_oo": np.maximum(lo_oo_ax[a_idx], hi_oo_ax[b_idx]),
    }


def unanchored_discrepancy_exact(p: PointSet, *, budget: int = PAIR_CELL_BUDGET) -> DiscrepancyResult:
    """Exact unanchored D_N: supremum of |#/N - vol| over boxes [a, b).

    Critical corner pairs take lower corners from point coordinates + {0} and
    upper corners from point coordinates + {1}; the count-heavy side uses
    closed-closed counting (boxes shrinking onto points), the volume-heavy
    side open-open counting (boxes grown between points).
    """
    coords = p.coords
    N, d = coords.shape
    axes = [_grid_axis(coords[:, j]) for j in range(d)]
    pairs = [_axis_pairs(u) for u, _ in axes]
    pair_counts = [len(pr["edge"]) for pr in pairs]
    cells = math.prod(pair_counts)
    if cells > budget:
        raise BudgetError(f"corner-pair budget exceeded: {cells:.3g} > {budget:.3g} boxes")

    cum = _padded_cumulative([r for _, r in axes], [len(u) for u, _ in axes], N)
    inv_n = 1.0 / N

    corner_sign: list[tuple[np.ndarray, float]] = []
    for picks in range(1 << d):
        sign = -1.0 if bin(picks).count("1") % 2 else 1.0
        corner_sign.append((np.array([(picks >> t) & 1 for t in range(d)], dtype=bool), sign))

    best_value = -math.inf
    best_flat = 0
    best_closed = True
    shape = tuple(pair_counts)
    for lo_flat in range(0, cells, _CHUNK):
        hi_flat = min(lo_flat + _CHUNK, cells)
        flat = np.arange(lo_flat, hi_flat)
        idx = np.unravel_index(flat, shape)

        vol = pairs[0]["edge"][idx[0]].copy()
        for t in range(1, d):
            vol *= pairs[t]["edge"][idx[t]]

        cc = np.zeros(flat.shape, dtype=float)
        oo = np.zeros(flat.shape, dtype=float)
        for lo_pick, sign in corner_sign:
            sel_cc = tuple(
                pairs[t]["lo_cc"][idx[t]] if lo_pick[t] else pairs[t]["hip_cc"][idx[t]] for t in range(d)
            )
            sel_oo = tuple(
                pairs[t]["lo_oo"][idx[t]] if lo_pick[t] else pairs[t]["hip_oo"][idx[t]] for t in range(d)
            )
            cc += sign * cum[sel_cc]
            oo += sign * cum[sel_oo]

        heavy_count = cc * inv_n - vol
        heavy_vol = vol - oo * inv_n
        combined = np.maximum(heavy_count, heavy_vol)
        j = int(np.argmax(combined))
        if float(combined[j]) > best_value:
            best_value = float(combined[j])
            best_flat = lo_flat + j
            best_closed = bool(heavy_count[j] >= heavy_vol[j])

    idx = np.unravel_index(best_flat, shape)
    lower = tuple(float(pairs[t]["a_val"][idx[t]]) for t in range(d))
    upper = tuple(float(pairs[t]["b_val"][idx[t]]) for t in range(d))
    return DiscrepancyResult(best_value, Box(lower, upper), best_closed)


def _padded_cumulative(ranks: list[np.ndarray], m: list[int], N: int) -> np.ndarray:
    """F with F[f] = #points whose rank vector is < f componentwise (0-padded)."""
    shape = tuple(mm + 1 for mm in m)
    cum = np.zeros(shape, dtype=np.int32)
    np.add.at(cum, tuple(r + 1 for r in ranks), 1)
    for ax in range(len(shape)):
        np.cumsum(cum, axis=ax, out=cum)
    return cum


# ---------------------------------------------------------------------------
# weighted variants
# ---------------------------------------------------------------------------


def _weighted_exact(
    p: PointSet,
    weight_of: Callable[[tuple[int, ...]], float],
    oracle: Callable[[PointSet], DiscrepancyResult],
    *,
    threads: int = 1,
    prune: bool = True,
) -> DiscrepancyResult:
    """max over non-empty u of gamma_u * D(P(u)); ties keep the earliest subset
    in (cardinality, lexicographic) order."""
    subsets = list(nonempty_subsets(p.d))
    best: DiscrepancyResult | None = None
    best_value = -math.inf

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda u: oracle(p.project(u)), subsets))
        for u, sub in zip(subsets, results):
            value = weight_of(u) * sub.value
            if value > best_value:
                best_value = value
                best = DiscrepancyResult(value, sub.witness_box, sub.witness_closed, u)
    else:
        for u in subsets:
            gamma_u = weight_of(u)
            # D(P(u)) <= 1 for star (and <= 1 for unanchored), so small weights cannot win
            if prune and gamma_u <= best_value:
                continue
            sub = oracle(p.project(u))
            value = gamma_u * sub.value
            if value > best_value:
                best_value = value
                best = DiscrepancyResult(value, sub.witness_box, sub.witness_closed, u)
    assert best is not None
    return best


def weighted_star_discrepancy_exact(
    p: PointSet,
    family: WeightFamily,
    *,
    threads: int = 1,
    budget: int = GRID_CELL_BUDGET,
) -> DiscrepancyResult:
    """Weighted star discrepancy: max over non-empty u of gamma_u * D*(P(u))."""
    return _weighted_exact(
        p,
        lambda u: subset_weight(family, u),
        lambda q: star_discrepancy_exact(q, budget=budget),
        threads=threads,
    )


def weighted_unanchored_discrepancy_exact(
    p: PointSet,
    family: WeightFamily,
    *,
    threads: int = 1,
    budget: int = PAIR_CELL_BUDGET,
) -> DiscrepancyResult:
    """Weighted unanchored discrepancy: max over non-empty u of gamma_u * D(P(u))."""
    return _weighted_exact(
        p,
        lambda u: subset_weight(family, u),
        lambda q: unanchored_discrepancy_exact(q, budget=budget),
        threads=threads,
    )


def subset_contributions(
    p: PointSet,
    family: WeightFamily,
    *,
    unanchored: bool = False,
    threads: int = 1,
    budget: int | None = None,
) -> list[tuple[tuple[int, ...], float, float, float]]:
    """Per-subset rows (u, gamma_u, D(P(u)), gamma_u * D(P(u))) in canonical order."""
    if unanchored:
        oracle = lambda q: unanchored_discrepancy_exact(q, budget=budget or PAIR_CELL_BUDGET)
    else:
        oracle = lambda q: star_discrepancy_exact(q, budget=budget or GRID_CELL_BUDGET)
    subsets = list(nonempty_subsets(p.d))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda u: oracle(p.project(u)), subsets))
    else:
        results = [oracle(p.project(u)) for u in subsets]
    rows = []
    for u, sub in zip(subsets, results):
        gamma_u = subset_weight(family, u)
        rows.append((u, gamma_u, sub.value, gamma_u * sub.value))
    return rows


def evaluate_witness(p: PointSet, result: DiscrepancyResult, family: WeightFamily | None = None) -> float:
    """Recompute the discrepancy value from a result's witness box.

    Counts with the convention recorded in ``witness_closed`` and projects by
    ``witness_subset`` when present (scaling by gamma_u for weighted results).
    """
    q = p.project(result.witness_subset) if result.witness_subset else p
    coords = q.coords
    n = q.N
    if isinstance(result.witness_box, AnchoredBox):
        alpha = np.asarray(result.witness_box.upper)
        vol = float(np.prod(alpha))
        if result.witness_closed:
            count = int(np.count_nonzero(np.all(coords <= alpha, axis=1)))
            value = count / n - vol
        else:
            count = int(np.count_nonzero(np.all(coords < alpha, axis=1)))
            value = vol - count / n
    else:
        lo = np.asarray(result.witness_box.lower)
        hi = np.asarray(result.witness_box.upper)
        vol = float(np.prod(hi - lo))
        if result.witness_closed:
            count = int(np.count_nonzero(np.all((coords >= lo) & (coords <= hi), axis=1)))
            value = count / n - vol
        else:
            count = int(np.count_nonzero(np.all((coords > lo) & (coords < hi), axis=1)))
            value = vol - count / n
    if result.witness_subset and family is not None:
        value *= subset_weight(family, result.witness_subset)
    return value
