"""Finite frequency sets in [-1/2, 1/2] and their covering statistics.

Frequency sets are always finite point sets here; the covering number
N(delta) is the fewest intervals of length < delta needed to cover the
set, computed exactly by a greedy left-to-right sweep (optimal in one
dimension).  The box-counting dimension is reported as a least-squares
exponent fitted over a finite range of scales, never as the true
limiting dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "LambdaSet",
    "CoverReport",
    "covering_number",
    "dimension_profile",
    "make_lacunary",
    "make_cantor",
    "make_arithmetic_grid",
    "lambda_set_to_text",
    "lambda_set_from_text",
]


@dataclass(frozen=True)
class LambdaSet:
    """Strictly sorted finite set of frequencies in [-1/2, 1/2].

    ``origin_gap`` is the largest eps >= 0 such that the open interval
    (-eps, eps) misses every point.
    """

    points: np.ndarray
    origin_gap: float = field(default=0.0)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1:
            raise ValueError("points must be one-dimensional")
        if len(pts) and (pts.min() < -0.5 or pts.max() > 0.5):
            raise ValueError("points must lie in [-1/2, 1/2]")
        if len(pts) > 1 and not np.all(np.diff(pts) > 0):
            raise ValueError("points must be strictly sorted")
        gap = float(np.min(np.abs(pts))) if len(pts) else 0.5
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "origin_gap", gap)
        pts.setflags(write=False)

    @classmethod
    def from_points(cls, points: Iterable[float]) -> "LambdaSet":
        pts = np.unique(np.asarray(list(points), dtype=np.float64))
        return cls(points=pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class CoverReport:
    """Covering counts across scales, with a fitted box-counting exponent.

    ``c_d_at`` maps a candidate dimension d to max over the probed
    scales of N(delta) * delta^d, a finite-scale stand-in for the
    covering constant at dimension d.
    """

    deltas: np.ndarray
    counts: np.ndarray
    fitted_dimension: float
    c_d_at: Mapping[float, float]


def covering_number(lam: LambdaSet, delta: float) -> int:
    """Minimal number of intervals of length < delta covering the set."""
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    pts = lam.points
    n = len(pts)
    if n == 0:
        return 0
    count = 0
    i = 0
    while i < n:
        start = pts[i]
        # an interval of length just under delta covers points within < delta
        i = int(np.searchsorted(pts, start + delta, side="left"))
        count += 1
    return count


_DEFAULT_D_CANDIDATES = (0.0, 0.25, 0.5, 0.6309297535714574, 0.75, 1.0)


def dimension_profile(
    lam: LambdaSet,
    scales: Sequence[float],
    d_candidates: Sequence[float] = _DEFAULT_D_CANDIDATES,
) -> CoverReport:
    """Covering counts over the given scales plus a fitted log-log slope."""
    deltas = np.asarray(sorted(scales, reverse=True), dtype=np.float64)
    if len(deltas) < 3:
        raise ValueError("need at least 3 scales")
    if deltas.min() <= 0 or deltas.max() > 1:
        raise ValueError("scales must lie in (0, 1]")
    counts = np.array([covering_number(lam, d) for d in deltas], dtype=np.int64)
    if np.all(counts == counts[0]):
        fitted = 0.0
    else:
        slope = np.polyfit(np.log(1.0 / deltas), np.log(counts), 1)[0]
        fitted = float(max(slope, 0.0))
    c_d_at = {
        float(d): float(np.max(counts * deltas**d)) for d in d_candidates
    }
    return CoverReport(
        deltas=deltas, counts=counts, fitted_dimension=fitted, c_d_at=c_d_at
    )


def make_lacunary(count: int, ratio: float, offset: float = 0.0) -> LambdaSet:
    """Points offset + ratio^j for j = 1..count (dimension-zero fixture)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    pts = offset + ratio ** np.arange(1, count + 1, dtype=np.float64)
    return LambdaSet.from_points(pts)


def make_cantor(
    level: int, ratio: float, base_interval: tuple[float, float] = (0.0, 0.5)
) -> LambdaSet:
    """Endpoints of the level-`level` kept intervals of a Cantor construction.

    Each step keeps the two end subintervals of relative length ``ratio``.
    The endpoint set at level L has 2^(L+1) points and covering count
    exactly 2^L at scale just above (ratio^L * base length).
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    if not 0.0 < ratio < 0.5:
        raise ValueError("ratio must lie in (0, 1/2)")
    a, b = base_interval
    if not a < b:
        raise ValueError("base interval must be nondegenerate")
    intervals = [(float(a), float(b))]
    for _ in range(level):
        nxt = []
        for lo, hi in intervals:
            w = (hi - lo) * ratio
            nxt.append((lo, lo + w))
            nxt.append((hi - w, hi))
        intervals = nxt
    pts: list[float] = []
    for lo, hi in intervals:
        pts.extend((lo, hi))
    return LambdaSet.from_points(pts)


def make_arithmetic_grid(count: int, origin_gap: float) -> LambdaSet:
    """count equispaced points in [origin_gap, 1/2] (dimension-one fixture)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if not 0.0 <= origin_gap < 0.5:
        raise ValueError("origin_gap must lie in [0, 1/2)")
    if count == 1:
        return LambdaSet.from_points([origin_gap])
    return LambdaSet.from_points(np.linspace(origin_gap, 0.5, count))


def lambda_set_to_text(lam: LambdaSet) -> str:
    return "\n".join(repr(float(p)) for p in lam.points) + "\n"


def lambda_set_from_text(text: str) -> LambdaSet:
    vals = [float(ln) for ln in text.splitlines() if ln.strip()]
    return LambdaSet.from_points(vals)
