"""Halton point sets: radical inverses, direct and block-incremental generation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import PrimeBases, first_primes, normalize_subset

# Indices stay below 2^53 so every digit extraction is exact in float64.
MAX_INDEX = 1 << 53


def radical_inverse(b: int, n: int) -> float:
    """van der Corput radical inverse: mirror the base-b digits of n about the radix point.

    phi_b(n) = n_0/b + n_1/b^2 + ... for n = n_0 + n_1 b + ...; one floating
    division per digit, exact for power-of-two bases.
    """
    if b < 2:
        raise ValueError("base must be >= 2")
    if not 0 <= n < MAX_INDEX:
        raise ValueError("index must lie in [0, 2^53)")
    result = 0.0
    denom = 1.0
    while n:
        n, digit = divmod(n, b)
        denom *= b
        result += digit / denom
    return result


def _radical_inverse_array(b: int, idx: np.ndarray) -> np.ndarray:
    # Same per-element operation order as the scalar loop, so results agree bitwise.
    out = np.zeros(idx.shape, dtype=float)
    n = idx.astype(np.int64, copy=True)
    denom = 1.0
    while n.any():
        digit = n % b
        n //= b
        denom *= b
        out += digit / denom
    return out


def _coerce_bases(bases: PrimeBases | Sequence[int] | int) -> tuple[int, ...]:
    if isinstance(bases, PrimeBases):
        return bases.bases
    if isinstance(bases, int):
        return first_primes(bases).bases
    out = tuple(int(b) for b in bases)
    if not out:
        raise ValueError("need at least one base")
    for b in out:
        if b < 2:
            raise ValueError("bases must be >= 2")
    if len(set(out)) != len(out):
        raise ValueError("bases must be distinct")
    return out


@dataclass(frozen=True)
class PointSet:
    """An (N, d) array of points in [0, 1)^d, optionally tagged with its Halton bases."""

    coords: np.ndarray
    bases: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.coords, dtype=float)
        if arr.ndim != 2:
            raise ValueError("coords must be a 2-d array of shape (N, d)")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("point set must be non-empty with d >= 1")
        if np.any(arr < 0.0) or np.any(arr >= 1.0):
            raise ValueError("coordinates must lie in [0, 1)")
        if self.bases is not None and len(self.bases) != arr.shape[1]:
            raise ValueError("bases length must match dimension")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)

    @property
    def N(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    def project(self, u: Iterable[int]) -> "PointSet":
        """Keep only the coordinates named by the 1-based subset ``u``."""
        t = normalize_subset(u, self.d)
        cols = [j - 1 for j in t]
        bases = tuple(self.bases[c] for c in cols) if self.bases is not None else None
        return PointSet(self.coords[:, cols], bases)

    def to_csv(self) -> str:
        header = ",".join(f"x{j}" for j in range(1, self.d + 1))
        lines = [header]
        for row in self.coords:
            lines.append(",".join(f"{x:.17g}" for x in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "d": self.d,
            "N": self.N,
            "bases": list(self.bases) if self.bases is not None else None,
            "points": [[float(x) for x in row] for row in self.coords],
        }
        return json.dumps(doc)

    @classmethod
    def from_csv(cls, text: str, bases: Sequence[int] | None = None) -> "PointSet":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if len(lines) < 2:
            raise ValueError("CSV must hold a header and at least one point")
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
        return cls(np.asarray(rows, dtype=float), tuple(bases) if bases else None)

    @classmethod
    def from_json(cls, text: str) -> "PointSet":
        doc = json.loads(text)
        bases = tuple(doc["bases"]) if doc.get("bases") else None
        return cls(np.asarray(doc["points"], dtype=float), bases)


def halton_points(
    bases: PrimeBases | Sequence[int] | int,
    N: int,
    start: int = 0,
) -> PointSet:
    """First N Halton points (indices start..start+N-1) by direct radical inversion."""
    b = _coerce_bases(bases)
    if N < 1:
        raise ValueError("N must be >= 1")
    if start < 0 or start + N > MAX_INDEX:
        raise ValueError("indices must lie in [0, 2^53)")
    idx = np.arange(start, start + N, dtype=np.int64)
    cols = [_radical_inverse_array(base, idx) for base in b]
    return PointSet(np.column_stack(cols), b)


def _block_extend(values: np.ndarray, b: int, k: int) -> np.ndarray:
    if len(values) != b**k:
        raise ValueError(f"block extension needs exactly b^k = {b**k} input values")
    # x_{n + r b^k} = x_n + r / b^(k+1): b stacked copies of the block.
    denom = float(b) ** (k + 1)
    offsets = np.arange(b, dtype=float) / denom
    return (values[None, :] + offsets[:, None]).ravel()


def halton_block_extend(current: "PointSet | np.ndarray | Sequence[float]", b: int, k: int) -> "PointSet | np.ndarray":
    """Grow the first b^k van der Corput values to the first b^(k+1), in O(b^(k+1)).

    Each output block r appends digit r at position k+1, i.e. adds r/b^(k+1)
    to every current value; the result is bitwise identical to direct
    radical_inverse evaluation.
    """
    if b < 2:
        raise ValueError("base must be >= 2")
    if k < 0:
        raise ValueError("level must be >= 0")
    if isinstance(current, PointSet):
        if current.d != 1:
            raise ValueError("block extension applies to one coordinate at a time")
        ext = _block_extend(current.coords[:, 0], b, k)
        return PointSet(ext[:, None], current.bases)
    values = np.asarray(current, dtype=float)
    if values.ndim != 1:
        raise ValueError("expected a 1-d value array")
    return _block_extend(values, b, k)


def halton_points_incremental(
    bases: PrimeBases | Sequence[int] | int,
    N: int,
    start: int = 0,
) -> PointSet:
    """Same points as halton_points, built by per-base block doubling in O(dN) work."""
    b = _coerce_bases(bases)
    if N < 1:
        raise ValueError("N must be >= 1")
    if start < 0 or start + N > MAX_INDEX:
        raise ValueError("indices must lie in [0, 2^53)")
    need = start + N
    cols = []
    for base in b:
        values = np.zeros(1, dtype=float)
        k = 0
        while len(values) < need:
            values = _block_extend(values, base, k)
            k += 1
        cols.append(values[start : start + N])
    return PointSet(np.column_stack(cols), b)


def project(p: PointSet, u: Iterable[int]) -> PointSet:
    """Module-level alias for PointSet.project."""
    return p.project(u)
