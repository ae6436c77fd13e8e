import itertools
import json
import math

import numpy as np
import pytest

from qdlab.core import BudgetError, WeightFamily, first_primes, nonempty_subsets
from qdlab.exact import (
    AnchoredBox,
    Box,
    DiscrepancyResult,
    evaluate_witness,
    local_discrepancy,
    star_discrepancy_exact,
    subset_contributions,
    unanchored_discrepancy_exact,
    weighted_star_discrepancy_exact,
    weighted_unanchored_discrepancy_exact,
)
from qdlab.sequences import PointSet, halton_points


def brute_star(coords):
    # exhaustive critical-grid scan; independent of the sweep implementation
    n, d = coords.shape
    axes = [sorted(set(coords[:, j]) | {1.0}) for j in range(d)]
    best = 0.0
    for y in itertools.product(*axes):
        ya = np.asarray(y)
        vol = float(np.prod(ya))
        lt = int(np.all(coords < ya, axis=1).sum())
        le = int(np.all(coords <= ya, axis=1).sum())
        best = max(best, vol - lt / n, le / n - vol)
    return best


def brute_unanchored(coords):
    n, d = coords.shape
    lows = [sorted(set(coords[:, j]) | {0.0}) for j in range(d)]
    highs = [sorted(set(coords[:, j]) | {1.0}) for j in range(d)]
    best = 0.0
    for x in itertools.product(*lows):
        xa = np.asarray(x)
        for y in itertools.product(*highs):
            ya = np.asarray(y)
            if np.any(xa > ya):
                continue
            vol = float(np.prod(ya - xa))
            strict = int(np.all((coords > xa) & (coords < ya), axis=1).sum())
            weak = int(np.all((coords >= xa) & (coords <= ya), axis=1).sum())
            best = max(best, vol - strict / n, weak / n - vol)
    return best


def pts(rows):
    return PointSet(np.asarray(rows, dtype=float))


class TestKnownExactValues:
    def test_single_midpoint(self):
        assert star_discrepancy_exact(pts([[0.5]])).value == pytest.approx(0.5, abs=1e-12)

    def test_van_der_corput_four(self):
        p = halton_points(first_primes(1), 4)
        assert star_discrepancy_exact(p).value == pytest.approx(0.25, abs=1e-12)

    def test_single_origin_2d(self):
        assert star_discrepancy_exact(pts([[0.0, 0.0]])).value == pytest.approx(1.0, abs=1e-12)

    def test_unanchored_two_points(self):
        p = pts([[0.0], [0.5]])
        assert unanchored_discrepancy_exact(p).value == pytest.approx(0.5, abs=1e-12)

    def test_unanchored_single_midpoint(self):
        # degenerate boxes shrinking onto the point carry count 1, volume 0
        assert unanchored_discrepancy_exact(pts([[0.5]])).value == pytest.approx(1.0, abs=1e-12)


class TestAgainstBruteForce:
    @pytest.mark.parametrize("d,n", [(1, 7), (2, 6), (3, 5)])
    def test_star_random(self, d, n):
        rng = np.random.default_rng(100 * d + n)
        for _ in range(12):
            p = PointSet(rng.random((n, d)))
            got = star_discrepancy_exact(p).value
            assert got == pytest.approx(brute_star(p.coords), abs=1e-12)

    def test_star_halton(self):
        for d, n in ((1, 16), (2, 9), (3, 6)):
            p = halton_points(first_primes(d), n)
            assert star_discrepancy_exact(p).value == pytest.approx(
                brute_star(p.coords), abs=1e-12
            )

    @pytest.mark.parametrize("d,n", [(1, 8), (2, 6)])
    def test_unanchored_random(self, d, n):
        rng = np.random.default_rng(17 + d)
        for _ in range(8):
            p = PointSet(rng.random((n, d)))
            got = unanchored_discrepancy_exact(p).value
            assert got == pytest.approx(brute_unanchored(p.coords), abs=1e-12)

    def test_unanchored_halton_2d(self):
        p = halton_points(first_primes(2), 8)
        assert unanchored_discrepancy_exact(p).value == pytest.approx(
            brute_unanchored(p.coords), abs=1e-12
        )

    def test_points_with_tied_coordinates(self):
        p = pts([[0.25, 0.5], [0.25, 0.25], [0.5, 0.5], [0.75, 0.25]])
        assert star_discrepancy_exact(p).value == pytest.approx(brute_star(p.coords), abs=1e-12)
        assert unanchored_discrepancy_exact(p).value == pytest.approx(
            brute_unanchored(p.coords), abs=1e-12
        )

    def test_unanchored_dominates_star(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            p = PointSet(rng.random((6, 2)))
            assert (
                unanchored_discrepancy_exact(p).value
                >= star_discrepancy_exact(p).value - 1e-12
            )


class TestWitness:
    def test_star_witness_reproduces_value(self):
        rng = np.random.default_rng(31)
        for _ in range(6):
            p = PointSet(rng.random((8, 2)))
            res = star_discrepancy_exact(p)
            assert isinstance(res.witness_box, AnchoredBox)
            assert evaluate_witness(p, res) == pytest.approx(res.value, abs=1e-12)

    def test_unanchored_witness_reproduces_value(self):
        rng = np.random.default_rng(37)
        for _ in range(6):
            p = PointSet(rng.random((7, 2)))
            res = unanchored_discrepancy_exact(p)
            assert isinstance(res.witness_box, Box)
            assert evaluate_witness(p, res) == pytest.approx(res.value, abs=1e-12)

    def test_weighted_witness_carries_subset(self):
        p = halton_points(first_primes(2), 16)
        fam = WeightFamily.parse("explicit:1,0.5")
        res = weighted_star_discrepancy_exact(p, fam)
        assert res.witness_subset is not None
        assert evaluate_witness(p, res, fam) == pytest.approx(res.value, abs=1e-12)

    def test_to_json_round_trip_fields(self):
        res = star_discrepancy_exact(pts([[0.5]]))
        doc = json.loads(res.to_json())
        assert doc["value"] == pytest.approx(0.5)
        assert "upper" in doc["witness_box"]

    def test_box_validation(self):
        with pytest.raises(ValueError):
            Box((0.5,), (0.25,))
        with pytest.raises(ValueError):
            AnchoredBox((1.5,))


class TestWeighted:
    def test_frozen_halton_anchor(self):
        p = halton_points(first_primes(2), 16)
        fam = WeightFamily.parse("explicit:1,0.5")
        res = weighted_star_discrepancy_exact(p, fam)
        assert res.value == pytest.approx(0.10069444444444445, abs=1e-12)
        assert res.witness_subset == (1, 2)

    def test_frozen_projection_values(self):
        p = halton_points(first_primes(2), 16)
        fam = WeightFamily.parse("explicit:1,0.5")
        rows = {u: (g, dv, c) for u, g, dv, c in subset_contributions(p, fam)}
        assert rows[(1,)][1] == pytest.approx(0.0625, abs=1e-12)
        assert rows[(2,)][1] == pytest.approx(0.14351851851851855, abs=1e-12)
        assert rows[(1, 2)][1] == pytest.approx(0.2013888888888889, abs=1e-12)

    def test_unit_weights_reduce_to_plain_star(self):
        rng = np.random.default_rng(41)
        p = PointSet(rng.random((10, 3)))
        fam = WeightFamily.parse("ones:3")
        assert weighted_star_discrepancy_exact(p, fam).value == pytest.approx(
            star_discrepancy_exact(p).value, abs=1e-12
        )

    def test_unit_weights_reduce_to_plain_unanchored(self):
        rng = np.random.default_rng(43)
        p = PointSet(rng.random((6, 2)))
        fam = WeightFamily.parse("ones:2")
        assert weighted_unanchored_discrepancy_exact(p, fam).value == pytest.approx(
            unanchored_discrepancy_exact(p).value, abs=1e-12
        )

    def test_contribution_rows_are_consistent(self):
        p = halton_points(first_primes(3), 12)
        fam = WeightFamily.parse("power:2")
        rows = subset_contributions(p, fam)
        assert [u for u, *_ in rows] == list(nonempty_subsets(3))
        for u, gamma, dval, contrib in rows:
            assert contrib == pytest.approx(gamma * dval, abs=0.0)
        best = max(c for *_, c in rows)
        assert weighted_star_discrepancy_exact(p, fam).value == pytest.approx(best, abs=1e-12)

    def test_threads_match_serial(self):
        p = halton_points(first_primes(3), 20)
        fam = WeightFamily.parse("reciprocal")
        a = weighted_star_discrepancy_exact(p, fam, threads=1)
        b = weighted_star_discrepancy_exact(p, fam, threads=2)
        assert a.value == b.value
        assert a.witness_subset == b.witness_subset


class TestGuards:
    def test_star_budget(self):
        rng = np.random.default_rng(47)
        p = PointSet(rng.random((64, 3)))
        with pytest.raises(BudgetError):
            star_discrepancy_exact(p, budget=10)

    def test_unanchored_budget(self):
        rng = np.random.default_rng(53)
        p = PointSet(rng.random((64, 2)))
        with pytest.raises(BudgetError):
            unanchored_discrepancy_exact(p, budget=10)


class TestLocalDiscrepancy:
    def test_spot_values(self):
        p = halton_points(first_primes(1), 4)
        assert local_discrepancy(p, AnchoredBox((0.3,))) == pytest.approx(0.2, abs=1e-15)
        assert local_discrepancy(p, (1.0,)) == pytest.approx(0.0, abs=1e-15)
        assert local_discrepancy(p, (0.5,)) == pytest.approx(0.0, abs=1e-15)

    def test_dimension_check(self):
        p = halton_points(first_primes(2), 4)
        with pytest.raises(ValueError):
            local_discrepancy(p, (0.5,))
        with pytest.raises(ValueError):
            local_discrepancy(p, (0.5, 1.5))
