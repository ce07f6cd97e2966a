"""Sparse collections of dyadic intervals, bilinear forms, and weights.

A collection of dyadic intervals is sparse when each interval I owns a
witness set E(I) of more than |I|/10 of its points, with the witness
sets pairwise disjoint.  The bilinear form sums local r-averages over
the collection; dominating a pairing |<Tf, g>| by the form is
certified here with a greedy stopping-time construction.

Muckenhoupt and reverse-Holder characteristics are computed as exact
maxima over all integer subintervals of a window up to a length cap,
so they are window-relative lower bounds of the true suprema.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .spectra import Signal

__all__ = [
    "DyadicInterval",
    "SparseCollection",
    "Weight",
    "local_average",
    "sparse_form",
    "verify_sparse",
    "sparse_certificate",
    "ap_characteristic",
    "rh_characteristic",
    "weighted_bound_check",
    "weighted_norm",
    "collection_to_text",
    "collection_from_text",
]


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """Integer points [position * 2^scale, (position+1) * 2^scale)."""

    scale: int
    position: int

    def __post_init__(self) -> None:
        if self.scale < 0:
            raise ValueError("scale must be >= 0")

    @property
    def start(self) -> int:
        return self.position * 2**self.scale

    @property
    def length(self) -> int:
        return 2**self.scale

    @property
    def stop(self) -> int:
        return self.start + self.length

    def points(self) -> np.ndarray:
        return np.arange(self.start, self.stop)

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        if self.scale == 0:
            raise ValueError("a singleton interval has no children")
        return (
            DyadicInterval(self.scale - 1, 2 * self.position),
            DyadicInterval(self.scale - 1, 2 * self.position + 1),
        )

    def triple(self) -> tuple[int, int]:
        """Start/stop of the concentric threefold enlargement."""
        return self.start - self.length, self.stop + self.length

    def contains(self, other: "DyadicInterval") -> bool:
        return self.start <= other.start and other.stop <= self.stop

    @staticmethod
    def containing(lo: int, hi: int) -> "DyadicInterval":
        """Smallest dyadic interval containing the integer range [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        if lo < 0 <= hi:
            raise ValueError("no dyadic interval spans negative and nonnegative points")
        k = max(int(hi - lo + 1).bit_length() - 1, 0)
        while True:
            if lo >> k == hi >> k:
                return DyadicInterval(k, lo >> k)
            k += 1


@dataclass(frozen=True)
class SparseCollection:
    """Dyadic intervals with pairwise disjoint witness sets."""

    intervals: tuple[DyadicInterval, ...]
    witnesses: dict[DyadicInterval, frozenset[int]]

    def __len__(self) -> int:
        return len(self.intervals)


def local_average(f: Signal, interval, r: float = 1.0) -> float:
    """[ |I|^-1 sum_{n in I} |f(n)|^r ]^(1/r); interval is dyadic or (start, stop)."""
    if r < 1.0:
        raise ValueError("r must be >= 1")
    if isinstance(interval, DyadicInterval):
        start, stop = interval.start, interval.stop
    else:
        start, stop = interval
    if stop <= start:
        raise ValueError("interval must be nonempty")
    lo = max(start, f.n_first)
    hi = min(stop, f.n_last + 1)
    if hi <= lo:
        return 0.0
    seg = np.abs(f.values[lo - f.offset : hi - f.offset])
    return float((np.sum(seg**r) / (stop - start)) ** (1.0 / r))


def verify_sparse(coll: SparseCollection) -> tuple[bool, list[str]]:
    """Check witness disjointness and the strict 1/10 density rule."""
    violations: list[str] = []
    seen: dict[int, DyadicInterval] = {}
    for iv in coll.intervals:
        wit = coll.witnesses.get(iv)
        if wit is None:
            violations.append(f"{iv} has no witness set")
            continue
        pts = set(range(iv.start, iv.stop))
        stray = set(wit) - pts
        if stray:
            violations.append(f"{iv} witness leaves the interval at {sorted(stray)[:4]}")
        if not len(wit) * 10 > iv.length:
            violations.append(
                f"{iv} witness too small: {len(wit)} points for length {iv.length}"
            )
        for n in wit:
            if n in seen:
                violations.append(f"witness point {n} shared by {seen[n]} and {iv}")
            else:
                seen[n] = iv
    return not violations, violations


def sparse_form(
    coll: SparseCollection, f: Signal, g: Signal, r: float = 1.0
) -> float:
    """sum over the collection of <f>_{I,r} <g>_{I,r} |I|."""
    ok, violations = verify_sparse(coll)
    if not ok:
        raise ValueError("invalid sparse collection: " + "; ".join(violations[:3]))
    total = 0.0
    for iv in coll.intervals:
        total += local_average(f, iv, r) * local_average(g, iv, r) * iv.length
    return total


def _stopping_children(
    root: DyadicInterval,
    cond: Callable[[DyadicInterval], bool],
) -> list[DyadicInterval]:
    """Maximal proper dyadic subintervals satisfying the condition."""
    selected: list[DyadicInterval] = []
    if root.scale == 0:
        return selected
    frontier = list(root.children())
    while frontier:
        iv = frontier.pop()
        if cond(iv):
            selected.append(iv)
        elif iv.scale > 0:
            frontier.extend(iv.children())
    return selected


def sparse_certificate(
    t_eval: Callable[[Signal], Signal],
    f: Signal,
    g: Signal,
    r: float = 1.0,
    threshold: float = 4.0,
    max_depth: int = 64,
) -> tuple[SparseCollection, float]:
    """Greedy stopping-time certificate for |<Tf, g>| <= K * form(f, g).

    Starting from the smallest dyadic interval containing both supports,
    each node selects the maximal dyadic subintervals where either the
    threefold-enlarged r-average of f or the plain r-average of g jumps
    by more than the threshold; witnesses are the unselected points.
    Returns the collection and the smallest K valid for this pair.
    """
    if not 1.0 <= r:
        raise ValueError("r must be >= 1")
    lo = min(f.n_first, g.n_first)
    hi = max(f.n_last, g.n_last)
    root = DyadicInterval.containing(lo, hi)
    intervals: list[DyadicInterval] = []
    witnesses: dict[DyadicInterval, frozenset[int]] = {}

    def build(iv: DyadicInterval, depth: int) -> None:
        if depth > max_depth:
            raise RecursionError("stopping-time recursion exceeded max_depth")
        intervals.append(iv)
        f_ref = local_average(f, iv.triple(), r)
        g_ref = local_average(g, (iv.start, iv.stop), r)

        def cond(j: DyadicInterval) -> bool:
            return (
                local_average(f, j.triple(), r) > threshold * f_ref
                or local_average(g, (j.start, j.stop), r) > threshold * g_ref
            )

        children = _stopping_children(iv, cond)
        covered = set()
        for j in children:
            covered.update(range(j.start, j.stop))
        witnesses[iv] = frozenset(set(range(iv.start, iv.stop)) - covered)
        for j in children:
            build(j, depth + 1)

    build(root, 0)
    coll = SparseCollection(intervals=tuple(intervals), witnesses=witnesses)
    tf = t_eval(f)
    pairing = 0.0 + 0.0j
    lo_p = max(tf.n_first, g.n_first)
    hi_p = min(tf.n_last, g.n_last)
    if hi_p >= lo_p:
        a = tf.values[lo_p - tf.offset : hi_p - tf.offset + 1]
        b = g.values[lo_p - g.offset : hi_p - g.offset + 1]
        pairing = np.sum(a * np.conj(b))
    form = sparse_form(coll, f, g, r)
    if form == 0.0:
        constant = 0.0 if abs(pairing) == 0.0 else float("inf")
    else:
        constant = float(abs(pairing) / form)
    return coll, constant


@dataclass(frozen=True)
class Weight:
    """Strictly positive density on a window of Z."""

    offset: int
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or len(vals) == 0:
            raise ValueError("values must be a nonempty 1-d array")
        if not np.all(vals > 0) or not np.all(np.isfinite(vals)):
            raise ValueError("weight values must be strictly positive and finite")
        object.__setattr__(self, "values", vals)
        vals.setflags(write=False)

    @property
    def n_first(self) -> int:
        return self.offset

    @property
    def n_last(self) -> int:
        return self.offset + len(self.values) - 1


def ap_characteristic(w: Weight, p: float, max_len: int = 1024) -> float:
    """Muckenhoupt characteristic over window subintervals up to max_len.

    [w]_{A_p} = sup_Q ( <w^{1/(1-p)}>_Q )^{p-1} <w>_Q for p > 1.
    """
    if p <= 1.0:
        raise ValueError("p must be > 1")
    v = w.values
    dual = v ** (1.0 / (1.0 - p))
    c1 = np.concatenate([[0.0], np.cumsum(v)])
    c2 = np.concatenate([[0.0], np.cumsum(dual)])
    best = 0.0
    n = len(v)
    for ell in range(1, min(max_len, n) + 1):
        s1 = (c1[ell:] - c1[:-ell]) / ell
        s2 = (c2[ell:] - c2[:-ell]) / ell
        best = max(best, float(np.max(s2 ** (p - 1.0) * s1)))
    return best


def rh_characteristic(w: Weight, p: float, max_len: int = 1024) -> float:
    """Reverse-Holder characteristic sup_Q <w^p>_Q^{1/p} / <w>_Q."""
    if p <= 1.0:
        raise ValueError("p must be > 1")
    v = w.values
    vp = v**p
    c1 = np.concatenate([[0.0], np.cumsum(v)])
    cp = np.concatenate([[0.0], np.cumsum(vp)])
    best = 0.0
    n = len(v)
    for ell in range(1, min(max_len, n) + 1):
        s1 = (c1[ell:] - c1[:-ell]) / ell
        sp = ((cp[ell:] - cp[:-ell]) / ell) ** (1.0 / p)
        best = max(best, float(np.max(sp / s1)))
    return best


def weighted_norm(f: Signal, w: Weight, p: float) -> float:
    """l^p norm against the weight, restricted to the weight's window."""
    lo = max(f.n_first, w.n_first)
    hi = min(f.n_last, w.n_last)
    if hi < lo:
        return 0.0
    fv = np.abs(f.values[lo - f.offset : hi - f.offset + 1])
    wv = w.values[lo - w.offset : hi - w.offset + 1]
    return float(np.sum(wv * fv**p) ** (1.0 / p))


@dataclass(frozen=True)
class WeightedBoundReport:
    """Monte Carlo lower estimate of a weighted operator norm."""

    p: float
    ratios: np.ndarray
    running_max: np.ndarray

    @property
    def estimate(self) -> float:
        return float(self.running_max[-1])


def weighted_bound_check(
    t_eval: Callable[[Signal], Signal],
    w: Weight,
    p: float,
    trials: int,
    seed: int,
    support: tuple[int, int] | None = None,
) -> WeightedBoundReport:
    """sup over random trials of ||Tf||_{l^p(w)} / ||f||_{l^p(w)}.

    Test signals are complex Gaussian, supported inside the weight's
    window (or the given support range).  Deterministic given the seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    lo, hi = support if support is not None else (w.n_first, w.n_last)
    width = hi - lo + 1
    ratios = np.zeros(trials)
    for t in range(trials):
        vals = rng.standard_normal(width) + 1j * rng.standard_normal(width)
        f = Signal(lo, vals)
        denom = weighted_norm(f, w, p)
        ratios[t] = weighted_norm(t_eval(f), w, p) / denom
    return WeightedBoundReport(
        p=p, ratios=ratios, running_max=np.maximum.accumulate(ratios)
    )


def collection_to_text(coll: SparseCollection) -> str:
    """Lines of (scale, position, witness points) for external re-checks."""
    lines = []
    for iv in coll.intervals:
        wit = ",".join(str(n) for n in sorted(coll.witnesses[iv]))
        lines.append(f"{iv.scale} {iv.position} {wit}")
    return "\n".join(lines) + "\n"


def collection_from_text(text: str) -> SparseCollection:
    intervals = []
    witnesses = {}
    for ln in text.splitlines():
        if not ln.strip():
            continue
        scale, position, *rest = ln.split()
        iv = DyadicInterval(int(scale), int(position))
        pts = frozenset(
            int(tok) for tok in (rest[0].split(",") if rest and rest[0] else [])
        )
        intervals.append(iv)
        witnesses[iv] = pts
    return SparseCollection(intervals=tuple(intervals), witnesses=witnesses)
