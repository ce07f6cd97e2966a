"""Empirical norm estimation, block decay fits, and tail experiments.

Maximal-operator norms are estimated from below by random search over
test signals; single-frequency convolution norms are bracketed from
above by certified multiplier sup-norms.  Both numbers are reported,
never a single "the norm" value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .lambda_sets import LambdaSet
from .operators import block_P_k, block_Q_k
from .selector import SelectorPath, _sigma_and_w, sample_ensemble
from .spectra import FrequencyGrid, Signal, certified_supnorm, dft, padded_supnorm

__all__ = [
    "NormEstimate",
    "TailExperiment",
    "DecayFit",
    "SobolevReport",
    "ModulatedConvolutionFamily",
    "opnorm_estimate",
    "block_multiplier_signal",
    "block_decay_fit",
    "sobolev_check",
    "subgaussian_tail",
    "square_function_value",
]


@dataclass(frozen=True)
class NormEstimate:
    """Monte Carlo lower bound, with an optional certified upper bound."""

    p: float
    lower_bound: float
    trials: int
    seed: int
    symbol_upper: float | None = None

    def __post_init__(self) -> None:
        if self.symbol_upper is not None and self.lower_bound > self.symbol_upper * (1 + 1e-9):
            raise ValueError("lower bound exceeds certified upper bound")


def _test_signal(rng: np.random.Generator, lo: int, hi: int, profile: int) -> Signal:
    """Rotating catalogue of test profiles: Gaussian noise, spike, block."""
    width = hi - lo + 1
    kind = profile % 3
    if kind == 0:
        vals = rng.standard_normal(width) + 1j * rng.standard_normal(width)
    elif kind == 1:
        vals = np.zeros(width, dtype=np.complex128)
        vals[rng.integers(width)] = 1.0
    else:
        vals = np.zeros(width, dtype=np.complex128)
        a = int(rng.integers(width))
        b = int(rng.integers(a, width))
        vals[a : b + 1] = 1.0
    return Signal(lo, vals)


def opnorm_estimate(
    op: Callable[[Signal], Signal],
    p: float,
    window: tuple[int, int],
    trials: int,
    seed: int,
    symbol_upper: float | None = None,
) -> NormEstimate:
    """max over random test signals of ||op f||_p / ||f||_p."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    lo, hi = window
    best = 0.0
    for t in range(trials):
        f = _test_signal(rng, lo, hi, t)
        denom = f.norm(p)
        if denom == 0.0:
            continue
        best = max(best, op(f).norm(p) / denom)
    return NormEstimate(
        p=p, lower_bound=best, trials=trials, seed=seed, symbol_upper=symbol_upper
    )


def block_multiplier_signal(
    path: SelectorPath, k: int, family: str = "P", derivative: bool = False
) -> Signal:
    """Kernel coefficients of one dyadic block, as a signal on Z.

    For the P family the coefficient at +-m is +-Y_m/W_m on
    2^k <= m < 2^(k+1) (times m when ``derivative``).  For the Q family
    the coefficients sit at the count shifts +-(S_{m-1}+1) over the
    closed block, so the transform of the returned signal is the
    frequency profile of the block operator at frequency zero.
    """
    alpha = path.params.alpha
    if family == "P":
        lo, hi = 2**k, 2 ** (k + 1) - 1
    elif family == "Q":
        lo, hi = 2**k, 2 ** (k + 1)
    else:
        raise ValueError("family must be 'P' or 'Q'")
    if hi > path.length:
        raise ValueError(f"block k={k} exceeds path length {path.length}")
    m = np.arange(lo, hi + 1)
    coeff = path.y[m - 1] / path.w[m - 1]
    if derivative:
        coeff = coeff * m
    if family == "P":
        reach = hi
        vals = np.zeros(2 * reach + 1, dtype=np.complex128)
        vals[reach + m] = coeff
        vals[reach - m] = -coeff
        return Signal(-reach, vals)
    shifts = np.concatenate([[0], path.s])[m - 1] + 1
    reach = int(shifts.max())
    vals = np.zeros(2 * reach + 1, dtype=np.complex128)
    np.add.at(vals.view(np.float64), 2 * (reach + shifts), coeff)
    np.subtract.at(vals.view(np.float64), 2 * (reach - shifts), coeff)
    return Signal(-reach, vals)


@dataclass(frozen=True)
class DecayFit:
    """log2 least-squares slopes of block bounds against the scale k."""

    ks: np.ndarray
    symbol_bounds: np.ndarray
    derivative_bounds: np.ndarray
    mc_lower: np.ndarray | None
    symbol_slope: float
    derivative_slope: float
    mc_slope: float | None
    degenerate: bool


def _fit_slope(ks: np.ndarray, vals: np.ndarray) -> tuple[float, bool]:
    if np.any(vals <= 0):
        return 0.0, True
    return float(np.polyfit(ks, np.log2(vals), 1)[0]), False


def block_decay_fit(
    paths: Sequence[SelectorPath],
    lambda_set: LambdaSet,
    k_range: Sequence[int],
    family: str = "P",
    grid_exponent: int = 16,
    mc_trials: int = 0,
    mc_window: int = 64,
    seed: int = 0,
) -> DecayFit:
    """Fitted decay rates of block operator bounds across dyadic scales.

    Symbol and derivative-symbol bounds are certified grid-padded
    sup-norms averaged over paths in log2; the optional Monte Carlo
    column is a maximal-operator lower bound over the frequency set.
    """
    ks = np.asarray(sorted(k_range), dtype=np.float64)
    if len(ks) < 3:
        raise ValueError("need at least 3 scales")
    sym = np.zeros(len(ks))
    der = np.zeros(len(ks))
    mc = np.zeros(len(ks)) if mc_trials else None
    for i, k in enumerate(int(k) for k in ks):
        s_vals, d_vals, m_vals = [], [], []
        for path in paths:
            sig = block_multiplier_signal(path, k, family)
            s_vals.append(certified_supnorm(sig, grid_exponent))
            dsig = block_multiplier_signal(path, k, family, derivative=True)
            d_vals.append(certified_supnorm(dsig, grid_exponent))
            if mc_trials:
                op = (block_P_k if family == "P" else block_Q_k)
                m_vals.append(
                    opnorm_estimate(
                        lambda f, p=path: op(p, lambda_set, k, f),
                        2.0,
                        (-mc_window, mc_window),
                        mc_trials,
                        seed,
                    ).lower_bound
                )
        sym[i] = np.exp2(np.mean(np.log2(s_vals)))
        der[i] = np.exp2(np.mean(np.log2(d_vals)))
        if mc_trials:
            mc[i] = np.exp2(np.mean(np.log2(m_vals)))
    symbol_slope, deg1 = _fit_slope(ks, sym)
    derivative_slope, deg2 = _fit_slope(ks, der)
    mc_slope = None
    deg3 = False
    if mc_trials:
        mc_slope, deg3 = _fit_slope(ks, mc)
    return DecayFit(
        ks=ks,
        symbol_bounds=sym,
        derivative_bounds=der,
        mc_lower=mc,
        symbol_slope=symbol_slope,
        derivative_slope=derivative_slope,
        mc_slope=mc_slope,
        degenerate=deg1 or deg2 or deg3,
    )


@dataclass(frozen=True)
class ModulatedConvolutionFamily:
    """T_lambda f = f * (e(lambda .) phi) for a fixed smooth kernel phi."""

    kernel: Signal

    def apply(self, lam: float, f: Signal) -> Signal:
        n = self.kernel.positions()
        h = self.kernel.values * np.exp(2j * np.pi * lam * n)
        out = np.convolve(h, f.values)
        return Signal(f.offset + self.kernel.offset, out)

    def norm_bound(self, grid: FrequencyGrid) -> float:
        """Certified sup over frequency translates of the multiplier norm."""
        return padded_supnorm(dft(self.kernel, grid))

    def derivative_norm_bound(self, grid: FrequencyGrid) -> float:
        """Certified bound for the frequency derivative of the family."""
        n = self.kernel.positions()
        dk = Signal(self.kernel.offset, 2j * np.pi * n * self.kernel.values)
        return padded_supnorm(dft(dk, grid))

    def maximal(self, lambda_set: LambdaSet, f: Signal) -> Signal:
        best = None
        offset = None
        for lam in lambda_set:
            ev = self.apply(float(lam), f)
            mag = np.abs(ev.values)
            best = mag if best is None else np.maximum(best, mag)
            offset = ev.offset
        return Signal(offset, best.astype(np.complex128))


@dataclass(frozen=True)
class SobolevReport:
    """Maximal-inequality check for a differentiable multiplier family."""

    a: float
    big_a: float
    c_d: float
    dimension: float
    slack: float
    ratios: np.ndarray

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    @property
    def passed(self) -> bool:
        return self.max_ratio <= 1.0


def sobolev_check(
    family: ModulatedConvolutionFamily,
    lambda_set: LambdaSet,
    dimension: float,
    c_d: float,
    signals: Sequence[Signal],
    grid_exponent: int = 16,
    slack: float = 10.0,
) -> SobolevReport:
    """Covering-dimension maximal inequality with an explicit slack factor.

    Checks ||sup over the set |T_lambda f|||_2 against
    slack * C_d^(1/2) (a + a^(1-d/2) A^(d/2)) ||f||_2 with certified a, A.
    """
    grid = FrequencyGrid(2**grid_exponent)
    a = family.norm_bound(grid)
    big_a = family.derivative_norm_bound(grid)
    bound_factor = slack * np.sqrt(c_d) * (
        a + a ** (1.0 - dimension / 2.0) * big_a ** (dimension / 2.0)
    )
    ratios = np.zeros(len(signals))
    for i, f in enumerate(signals):
        lhs = family.maximal(lambda_set, f).norm(2.0)
        ratios[i] = lhs / (bound_factor * f.norm(2.0))
    return SobolevReport(
        a=a, big_a=big_a, c_d=c_d, dimension=dimension, slack=slack, ratios=ratios
    )


def square_function_value(alpha: float, k: int) -> float:
    """[sum over the closed block of sigma_m / W_m^2]^(1/2), deterministic."""
    hi = 2 ** (k + 1)
    sigma, w = _sigma_and_w(alpha, hi)
    m = np.arange(2**k, hi + 1)
    return float(np.sqrt(np.sum(sigma[m - 1] / w[m - 1] ** 2)))


@dataclass(frozen=True)
class TailExperiment:
    """Exceedance curve of a random block multiplier across an ensemble."""

    k: int
    alpha: float
    samples: int
    threshold_grid: np.ndarray
    exceedance: np.ndarray
    square_function: float
    reference_scale: float
    fitted_rate: float
    magnitudes: np.ndarray


def subgaussian_tail(
    alpha: float,
    length: int,
    k: int,
    lam: float,
    theta: float,
    n_paths: int,
    threshold_grid: Sequence[float],
    seed: int,
) -> TailExperiment:
    """Sample the block multiplier at a fixed frequency pair across paths.

    M = sum over the closed block of Y_m e(lambda m + theta (S_{m-1}+1)) / W_m
    per path; exceedance is the empirical fraction with |M| above
    t * 2^(-k(1-alpha)/2) per threshold t.  The summands form a bounded
    martingale difference sequence, so an exp(-c t^2) envelope is fitted.
    """
    if n_paths < 1:
        raise ValueError("need at least one path")
    hi = 2 ** (k + 1)
    if hi > length:
        raise ValueError("path length too short for the block")
    paths = sample_ensemble(alpha, length, n_paths, seed)
    m = np.arange(2**k, hi + 1)
    mags = np.zeros(n_paths)
    for i, path in enumerate(paths):
        s_prev = np.concatenate([[0], path.s])[m - 1]
        phase = np.exp(2j * np.pi * (lam * m + theta * (s_prev + 1)))
        mags[i] = abs(np.sum(path.y[m - 1] * phase / path.w[m - 1]))
    scale = 2.0 ** (-k * (1.0 - alpha) / 2.0)
    ts = np.asarray(threshold_grid, dtype=np.float64)
    exceed = np.array([float(np.mean(mags > t * scale)) for t in ts])
    pos = (exceed > 0) & (ts > 0)
    fitted = float(np.min(-np.log(exceed[pos]) / ts[pos] ** 2)) if pos.any() else np.inf
    return TailExperiment(
        k=k,
        alpha=alpha,
        samples=n_paths,
        threshold_grid=ts,
        exceedance=exceed,
        square_function=square_function_value(alpha, k),
        reference_scale=scale,
        fitted_rate=fitted,
        magnitudes=mags,
    )
