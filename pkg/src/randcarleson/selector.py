"""Random selector sequences and their deterministic skeletons.

A selector sequence is a family of independent {0,1} variables X_m with
P(X_m = 1) = m^(-alpha) for a fixed 0 < alpha < 1.  This module samples
such sequences reproducibly, tracks the running count S_m, its mean
W_m = sum sigma_n, the centered variables Y_m = X_m - sigma_m, the
hitting times a_j (first m with S_m = j), and the deterministic
skeleton p_j = floor(C_alpha * j^(1/(1-alpha))) that approximates a_j.

Sequences are stored for m = 1..N.  Negative indices follow the odd
extension S_{-m} = -S_m, W_{-m} = -W_m, and X, Y depend on |m| only;
the accessors on :class:`SelectorPath` implement this convention.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import mpmath
import numpy as np

__all__ = [
    "SelectorParams",
    "SelectorPath",
    "HittingTimes",
    "DeterministicSkeleton",
    "ConcentrationReport",
    "sample_path",
    "sample_ensemble",
    "path_from_selectors",
    "hitting_times",
    "skeleton",
    "concentration_report",
    "path_to_table",
    "path_from_table",
]


@dataclass(frozen=True)
class SelectorParams:
    """Parameters of a selector sequence: decay exponent, length, RNG seed."""

    alpha: float
    length: int
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.length < 1:
            raise ValueError(f"length must be >= 1, got {self.length}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@functools.lru_cache(maxsize=64)
def _sigma_and_w(alpha: float, length: int) -> tuple[np.ndarray, np.ndarray]:
    """sigma_m = m^-alpha and W_m = sum_{n<=m} sigma_n for m = 1..length.

    The cumulative sum is done in extended precision so W is accurate to
    float64 roundoff even for long sequences (W enters denominators).
    """
    m = np.arange(1, length + 1, dtype=np.float64)
    sigma = m ** (-alpha)
    w = np.cumsum(sigma.astype(np.longdouble)).astype(np.float64)
    sigma.setflags(write=False)
    w.setflags(write=False)
    return sigma, w


@dataclass(frozen=True)
class SelectorPath:
    """One sampled realization of a selector sequence.

    Arrays are indexed by m-1 for m = 1..params.length:
    ``x`` the 0/1 selectors, ``s`` the running counts, ``w`` the running
    means, ``y = x - sigma`` the centered selectors.
    """

    params: SelectorParams
    x: np.ndarray
    s: np.ndarray
    w: np.ndarray
    y: np.ndarray

    @property
    def length(self) -> int:
        return self.params.length

    @property
    def sigma(self) -> np.ndarray:
        return _sigma_and_w(self.params.alpha, self.params.length)[0]

    def x_at(self, m: int) -> int:
        """X_{|m|}; m must be nonzero."""
        return int(self.x[abs(m) - 1])

    def s_at(self, m: int) -> int:
        """S_m with S_0 = 0 and the odd extension to negative m."""
        if m == 0:
            return 0
        v = int(self.s[abs(m) - 1])
        return v if m > 0 else -v

    def w_at(self, m: int) -> float:
        """W_m with W_0 = 0 and the odd extension to negative m."""
        if m == 0:
            return 0.0
        v = float(self.w[abs(m) - 1])
        return v if m > 0 else -v

    def y_at(self, m: int) -> float:
        """Y_{|m|} = X_{|m|} - sigma_{|m|}."""
        return float(self.y[abs(m) - 1])


def sample_path(params: SelectorParams) -> SelectorPath:
    """Draw one selector path from a counter-based (Philox) stream.

    Identical params (including seed) give a bit-identical path on every
    platform.  X_1 = 1 always, since sigma_1 = 1.
    """
    sigma, w = _sigma_and_w(params.alpha, params.length)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(params.seed)))
    u = rng.random(params.length)
    x = (u < sigma).astype(np.int8)
    return _assemble(params, x, sigma, w)


def _assemble(
    params: SelectorParams, x: np.ndarray, sigma: np.ndarray, w: np.ndarray
) -> SelectorPath:
    s = np.cumsum(x, dtype=np.int64)
    y = x.astype(np.float64) - sigma
    for a in (x, s, y):
        a.setflags(write=False)
    return SelectorPath(params=params, x=x, s=s, w=w, y=y)


def sample_ensemble(
    alpha: float, length: int, n_paths: int, seed: int
) -> list[SelectorPath]:
    """Independent paths with per-path seeds derived from a master seed."""
    child_seeds = np.random.SeedSequence(seed).generate_state(n_paths, np.uint64)
    return [
        sample_path(SelectorParams(alpha=alpha, length=length, seed=int(s)))
        for s in child_seeds
    ]


def path_from_selectors(alpha: float, x: np.ndarray | list[int], seed: int = 0) -> SelectorPath:
    """Build a path from an explicit 0/1 sequence (test fixtures)."""
    x = np.asarray(x, dtype=np.int8)
    params = SelectorParams(alpha=alpha, length=len(x), seed=seed)
    sigma, w = _sigma_and_w(alpha, len(x))
    return _assemble(params, x.copy(), sigma, w)


@dataclass(frozen=True)
class HittingTimes:
    """a[j] = min{m >= 1 : S_m = j} for j = 1..S_N, plus the a[0] convention.

    a[0] = 0 when a[1] = 1 (the probability-one case, since sigma_1 = 1),
    else a[0] = 1.  With a[0] = 0 the block grouping m = a_{j-1}+1 .. a_j
    partitions {1, ..., a_jmax} exactly.
    """

    a: np.ndarray
    a0_convention: int

    @property
    def j_max(self) -> int:
        return len(self.a) - 1


def hitting_times(path: SelectorPath) -> HittingTimes:
    s = path.s
    j_max = int(s[-1])
    # first index m with s[m] = j; s is nondecreasing with 0/1 steps
    a = np.empty(j_max + 1, dtype=np.int64)
    a[1:] = np.searchsorted(s, np.arange(1, j_max + 1), side="left") + 1
    a0 = 0 if (j_max >= 1 and a[1] == 1) else 1
    a[0] = a0
    a.setflags(write=False)
    return HittingTimes(a=a, a0_convention=a0)


@dataclass(frozen=True)
class DeterministicSkeleton:
    """p_j = floor(C_alpha j^(1/(1-alpha))), r_j = p_j - p_{j-1} with p_0 = 0.

    ``first_regular_j`` is the smallest j such that r_i >= 1 for every
    i >= j (the gaps below it are a small-j degeneracy of the floor
    formula, where consecutive p_j coincide).
    """

    alpha: float
    c_alpha: float
    p: np.ndarray
    r: np.ndarray
    first_regular_j: int

    @property
    def j_max(self) -> int:
        return len(self.p) - 1


def skeleton(alpha: float, j_max: int) -> DeterministicSkeleton:
    """Deterministic skeleton of the hitting times, exact integer floors.

    When 1/(1-alpha) is an integer d, C_alpha = d^-d and the floor is
    pure integer arithmetic: p_j = j^d // d^d.  Otherwise the floor is
    evaluated in 50-digit arithmetic, raising if the value sits too
    close to an integer to round confidently.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max}")
    growth = 1.0 / (1.0 - alpha)
    c_alpha = (1.0 - alpha) ** growth
    d = round(growth)
    p = np.zeros(j_max + 1, dtype=np.int64)
    if abs(growth - d) < 1e-12 and d >= 1:
        dd = d**d
        for j in range(1, j_max + 1):
            v = j**d // dd
            if v > 2**62:
                raise OverflowError(f"p_{j} exceeds the integer range")
            p[j] = v
    else:
        with mpmath.workdps(50):
            ca = mpmath.power(1 - mpmath.mpf(alpha), growth)
            g = mpmath.mpf(1) / (1 - mpmath.mpf(alpha))
            for j in range(1, j_max + 1):
                v = ca * mpmath.power(j, g)
                fl = mpmath.floor(v)
                if v - fl < mpmath.mpf("1e-30"):
                    raise ArithmeticError(
                        f"floor of C_alpha * {j}^{float(g)} is numerically ambiguous"
                    )
                if fl > 2**62:
                    raise OverflowError(f"p_{j} exceeds the integer range")
                p[j] = int(fl)
    r = np.diff(p, prepend=0)
    gaps = np.nonzero(r[1:] < 1)[0]
    first_regular_j = int(gaps[-1]) + 2 if len(gaps) else 1
    p.setflags(write=False)
    r.setflags(write=False)
    return DeterministicSkeleton(
        alpha=alpha, c_alpha=c_alpha, p=p, r=r, first_regular_j=first_regular_j
    )


@dataclass(frozen=True)
class ConcentrationReport:
    """Per-path values of max_m |S_m - W_m| m^-(eps + (1-alpha)/2)."""

    epsilon: float
    statistics: np.ndarray

    def exceedance_fraction(self, threshold: float) -> float:
        return float(np.mean(self.statistics > threshold))

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.statistics, q))


def concentration_report(
    paths: list[SelectorPath], epsilon: float
) -> ConcentrationReport:
    """Normalized fluctuation statistic of S - W, per path and in bulk."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not paths:
        raise ValueError("need at least one path")
    alpha = paths[0].params.alpha
    length = paths[0].params.length
    for p in paths:
        if p.params.alpha != alpha or p.params.length != length:
            raise ValueError("all paths must share alpha and length")
    expo = epsilon + (1.0 - alpha) / 2.0
    scale = np.arange(1, length + 1, dtype=np.float64) ** (-expo)
    stats = np.array(
        [float(np.max(np.abs(p.s - p.w) * scale)) for p in paths]
    )
    return ConcentrationReport(epsilon=epsilon, statistics=stats)


def path_to_table(path: SelectorPath) -> str:
    """Flat text table (m, x, s, w) for cross-checking other implementations."""
    lines = [f"# alpha={path.params.alpha!r} length={path.params.length} seed={path.params.seed}"]
    lines.append("m,x,s,w")
    for i in range(path.length):
        lines.append(f"{i + 1},{int(path.x[i])},{int(path.s[i])},{float(path.w[i])!r}")
    return "\n".join(lines) + "\n"


def path_from_table(text: str) -> SelectorPath:
    """Inverse of :func:`path_to_table`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0]
    if not header.startswith("#"):
        raise ValueError("missing parameter header")
    fields = dict(tok.split("=", 1) for tok in header[1:].split())
    alpha = float(fields["alpha"])
    seed = int(fields["seed"])
    rows = [ln.split(",") for ln in lines[2:]]
    x = np.array([int(r[1]) for r in rows], dtype=np.int8)
    path = path_from_selectors(alpha, x, seed=seed)
    w_read = np.array([float(r[3]) for r in rows])
    if not np.allclose(w_read, path.w, rtol=0, atol=1e-12):
        raise ValueError("w column inconsistent with alpha")
    return path


def expected_count_deviation(path: SelectorPath) -> float:
    """max_m |W_m - m^(1-alpha)/(1-alpha)|, the integral-test remainder."""
    alpha = path.params.alpha
    m = np.arange(1, path.length + 1, dtype=np.float64)
    ref = m ** (1.0 - alpha) / (1.0 - alpha)
    return float(np.max(np.abs(path.w - ref)))
