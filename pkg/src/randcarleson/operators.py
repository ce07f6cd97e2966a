"""Modulated singular convolutions on Z and their maximal variants.

Two operator families act on finitely supported signals:

* the t-family convolves against odd kernels supported on 0 < |m| <= M,
  with summand coeff(|m|) sgn(m) e(lambda m) f(x - m);
* the c-family is written for m > 0 and antisymmetrized, with summand
  coeff(m) e(lambda m) (f(x - h_m) - f(x + h_m)) where the shift h_m is
  either the running selector count S_m or S_{m-1} + 1.

The full random operators decompose exactly into the implemented term
kinds; the decomposition identities are float-exact and exercised in
the tests.  The constant c_alpha = 1 - alpha makes the deterministic
part of sigma_m / W_m match c_alpha / m up to O(m^-2), which is the
unique choice leaving a summable remainder.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .lambda_sets import LambdaSet
from .selector import (
    DeterministicSkeleton,
    HittingTimes,
    SelectorPath,
    _sigma_and_w,
    hitting_times,
)
from .spectra import Signal, dirichlet

__all__ = [
    "T_KINDS",
    "C_KINDS",
    "ModulatedKernelSpec",
    "MaximalResult",
    "AjCoefficients",
    "Lemma43Report",
    "c_alpha",
    "eval_single_lambda",
    "eval_maximal",
    "hardy_littlewood_max",
    "block_P_k",
    "block_Q_k",
    "aj_coefficients",
    "aj_identity_check",
    "aj_dirichlet_approx",
    "lemma43_bound_check",
    "tail_coefficient_mass",
]

# t-family kernels shift by m itself; c-family kernels shift by the
# (random) selector count.  Block restrictions follow the defining sums:
# half-open [2^k, 2^(k+1)) for the t-family, closed [2^k, 2^(k+1)] for
# the c-family.
T_KINDS = ("carleson", "t_full", "term_R0", "term_R1", "term_R2", "term_R3")
C_KINDS = ("c_full", "term_C1", "term_C2", "term_C3", "term_C4")

_PATH_KINDS = ("t_full", "term_R2", "term_R3") + C_KINDS


def c_alpha(alpha: float) -> float:
    """Normalization of the deterministic kernel part."""
    return 1.0 - alpha


def _e(t):
    return np.exp(2j * np.pi * np.asarray(t, dtype=np.float64))


@dataclass(frozen=True)
class ModulatedKernelSpec:
    """Which kernel, at which truncation, over which selector path.

    ``block_k`` restricts the summation to the dyadic block of scale k.
    ``m_max`` truncates the kernel; for block kinds it is ignored in
    favor of the block's own range.
    """

    kind: str
    alpha: float
    m_max: int
    path: SelectorPath | None = None
    block_k: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in T_KINDS + C_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.kind in _PATH_KINDS and self.path is None:
            raise ValueError(f"kind {self.kind!r} requires a selector path")
        if self.path is not None and self.path.params.alpha != self.alpha:
            raise ValueError("path alpha disagrees with spec alpha")
        lo, hi = self.m_range()
        if hi < lo:
            raise ValueError("empty summation range")
        if self.path is not None and hi > self.path.length:
            raise ValueError(
                f"summation up to m={hi} exceeds path length {self.path.length}"
            )

    @property
    def family(self) -> str:
        return "t" if self.kind in T_KINDS else "c"

    def m_range(self) -> tuple[int, int]:
        """Inclusive positive-m summation range."""
        if self.block_k is None:
            return 1, self.m_max
        k = self.block_k
        if self.family == "t":
            return 2**k, 2 ** (k + 1) - 1
        return 2**k, 2 ** (k + 1)


def _coefficients(spec: ModulatedKernelSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(m, coeff, shift) arrays over the spec's positive-m range.

    For the t-family the shift equals m.  Coefficients are real.
    """
    lo, hi = spec.m_range()
    m = np.arange(lo, hi + 1, dtype=np.int64)
    ca = c_alpha(spec.alpha)
    if spec.path is not None:
        sigma = spec.path.sigma
        w_all = spec.path.w
        x = spec.path.x
        s = spec.path.s
        y = spec.path.y
    else:
        sigma, w_all = _sigma_and_w(spec.alpha, hi)
        x = s = y = None
    idx = m - 1
    w = w_all[idx]
    sg = sigma[idx]
    kind = spec.kind
    if kind == "carleson":
        coeff = 1.0 / m
    elif kind == "term_R0":
        coeff = ca / m
    elif kind in ("term_R1", "term_C2"):
        coeff = sg / w - ca / m
    elif kind in ("term_R2", "term_C3"):
        coeff = y[idx] / w
    elif kind in ("term_R3", "term_C1"):
        on = x[idx].astype(bool)
        coeff = np.zeros(len(m))
        sv = s[idx][on].astype(np.float64)
        coeff[on] = 1.0 / sv - 1.0 / w[on]
    elif kind in ("t_full", "c_full"):
        on = x[idx].astype(bool)
        coeff = np.zeros(len(m))
        coeff[on] = 1.0 / s[idx][on].astype(np.float64)
    elif kind == "term_C4":
        coeff = ca / m
    else:  # pragma: no cover
        raise AssertionError(kind)
    if spec.family == "t":
        shift = m
    elif kind in ("c_full", "term_C1"):
        shift = s[idx]
    else:
        s_prev = np.empty(len(m), dtype=np.int64)
        s_prev[:] = s[idx - 1]
        if lo == 1:
            s_prev[0] = 0
        shift = s_prev + 1
    return m, coeff, shift


def eval_single_lambda(
    spec: ModulatedKernelSpec, lam: float, f: Signal
) -> Signal:
    """Exact truncated evaluation at one frequency.

    The output window is the input window enlarged by the maximal shift;
    positions outside it are exact zeros.
    """
    m, coeff, shift = _coefficients(spec)
    phase = _e(lam * m)
    fv = f.values
    n = len(fv)
    if spec.family == "t":
        reach = int(m[-1])
        h = np.zeros(2 * reach + 1, dtype=np.complex128)
        h[reach + m] = coeff * phase
        h[reach - m] = -coeff * np.conj(phase)
        out = np.convolve(h, fv)
        return Signal(f.offset - reach, out)
    # c-family: group equal shifts, then antisymmetrized accumulation
    weights = coeff * phase
    reach = max(int(shift.max()), 1)
    b = np.zeros(reach + 1, dtype=np.complex128)
    np.add.at(b.view(np.float64), 2 * shift, weights.real)
    np.add.at(b.view(np.float64), 2 * shift + 1, weights.imag)
    out = np.zeros(n + 2 * reach, dtype=np.complex128)
    for h in np.nonzero(b)[0]:
        out[reach + h : reach + h + n] += b[h] * fv
        out[reach - h : reach - h + n] -= b[h] * fv
    return Signal(f.offset - reach, out)


@dataclass(frozen=True)
class MaximalResult:
    """Pointwise supremum over a finite frequency set, with maximizers."""

    values: Signal
    argmax: Mapping[int, float]


def eval_maximal(
    spec: ModulatedKernelSpec, lambda_set: LambdaSet, f: Signal
) -> MaximalResult:
    """max over the frequency set of |single-frequency evaluation|."""
    if len(lambda_set) == 0:
        raise ValueError("frequency set is empty")
    best = None
    best_lam = None
    offset = None
    for lam in lambda_set:
        ev = eval_single_lambda(spec, float(lam), f)
        mag = np.abs(ev.values)
        if best is None:
            best = mag
            best_lam = np.full(len(mag), float(lam))
            offset = ev.offset
        else:
            upd = mag > best
            best = np.where(upd, mag, best)
            best_lam[upd] = float(lam)
    argmax = {offset + i: float(best_lam[i]) for i in range(len(best))}
    return MaximalResult(
        values=Signal(offset, best.astype(np.complex128)), argmax=argmax
    )


def hardy_littlewood_max(
    f: Signal, window: tuple[int, int] | None = None
) -> Signal:
    """Uncentered maximal averages max_{I contains x} |I|^-1 sum_I |f|.

    Exact: the optimal interval never extends past the support hull, so
    endpoints range over the hull only.  ``window`` selects the output
    positions (default: the signal's own window).
    """
    slo, shi = f.n_first, f.n_last
    lo, hi = window if window is not None else (slo, shi)
    a = np.abs(f.values)
    ns = len(a)
    pref = np.concatenate([[0.0], np.cumsum(a)])  # pref[i] = sum a[:i]
    out = np.zeros(hi - lo + 1)
    # left of the support: interval [x, b], b in the hull
    xs = np.arange(lo, min(hi, slo - 1) + 1)
    if len(xs):
        b = np.arange(slo, shi + 1)
        mass = pref[1:]
        vals = mass[None, :] / (b[None, :] - xs[:, None] + 1.0)
        out[xs - lo] = vals.max(axis=1)
    # right of the support: interval [a, x]
    xs = np.arange(max(lo, shi + 1), hi + 1)
    if len(xs):
        astart = np.arange(slo, shi + 1)
        mass = pref[-1] - pref[:-1]
        vals = mass[None, :] / (xs[:, None] - astart[None, :] + 1.0)
        out[xs - lo] = vals.max(axis=1)
    # inside the hull: both endpoints range over the hull
    for x in range(max(lo, slo), min(hi, shi) + 1):
        i = x - slo
        left = np.arange(0, i + 1)        # interval start index within hull
        right = np.arange(i, ns)          # interval end index within hull
        mass = pref[right + 1][None, :] - pref[left][:, None]
        length = right[None, :] - left[:, None] + 1.0
        out[x - lo] = (mass / length).max()
    return Signal(lo, out.astype(np.complex128))


def block_P_k(
    path: SelectorPath, lambda_set: LambdaSet, k: int, f: Signal
) -> Signal:
    """Maximal centered-selector block operator at dyadic scale k."""
    if 2 ** (k + 1) - 1 > path.length:
        raise ValueError(f"block k={k} exceeds path length {path.length}")
    spec = ModulatedKernelSpec(
        kind="term_R2", alpha=path.params.alpha, m_max=2 ** (k + 1) - 1,
        path=path, block_k=k,
    )
    return eval_maximal(spec, lambda_set, f).values


def block_Q_k(
    path: SelectorPath, lambda_set: LambdaSet, k: int, f: Signal
) -> Signal:
    """Maximal block operator with count shifts at dyadic scale k."""
    if 2 ** (k + 1) > path.length:
        raise ValueError(f"block k={k} exceeds path length {path.length}")
    spec = ModulatedKernelSpec(
        kind="term_C3", alpha=path.params.alpha, m_max=2 ** (k + 1),
        path=path, block_k=k,
    )
    return eval_maximal(spec, lambda_set, f).values


@dataclass(frozen=True)
class AjCoefficients:
    """Block sums of e(lambda m)/m between consecutive hitting times.

    ``grouping`` is "shift_exact" for blocks m = b_{j-1}+1 .. b_j (the
    grouping under which the shift-regrouping identity is exact) or
    "stated" for blocks m = b_{j-1} .. b_j - 1 intersected with m >= 1.
    """

    lam: float
    source_kind: str
    grouping: str
    coeffs: np.ndarray


def _boundaries(source) -> tuple[np.ndarray, str]:
    if isinstance(source, HittingTimes):
        return source.a, "random"
    if isinstance(source, DeterministicSkeleton):
        return source.p, "skeleton"
    raise TypeError(f"unsupported block source {type(source).__name__}")


def aj_coefficients(
    source, lam: float, j_max: int | None = None, grouping: str = "shift_exact"
) -> AjCoefficients:
    """Coefficients A_j(lambda) for j = 1..j_max (index 0 unused)."""
    b, kind = _boundaries(source)
    if grouping not in ("shift_exact", "stated"):
        raise ValueError(f"unknown grouping {grouping!r}")
    if j_max is None:
        j_max = len(b) - 1
    if j_max > len(b) - 1:
        raise ValueError(f"j_max={j_max} exceeds available blocks {len(b) - 1}")
    m_top = int(b[j_max])
    m = np.arange(1, m_top + 1, dtype=np.float64)
    vals = _e(lam * m) / m
    pref = np.concatenate([[0.0 + 0.0j], np.cumsum(vals)])  # pref[i] = sum m<=i
    coeffs = np.zeros(j_max + 1, dtype=np.complex128)
    for j in range(1, j_max + 1):
        if grouping == "shift_exact":
            lo, hi = int(b[j - 1]) + 1, int(b[j])
        else:
            lo, hi = max(int(b[j - 1]), 1), int(b[j]) - 1
        if hi >= lo:
            coeffs[j] = pref[hi] - pref[lo - 1]
    coeffs.setflags(write=False)
    return AjCoefficients(lam=lam, source_kind=kind, grouping=grouping, coeffs=coeffs)


def aj_identity_check(path: SelectorPath, lam: float, f: Signal) -> float:
    """Residual of regrouping count shifts into first-hit blocks.

    Both sides are truncated at m = a_{jmax}, jmax = S_N, so the blocks
    are complete and the identity is exact up to float roundoff.
    """
    ht = hitting_times(path)
    j_max = ht.j_max
    if j_max < 1:
        raise ValueError("path too short: no complete blocks")
    m_top = int(ht.a[j_max])
    m = np.arange(1, m_top + 1)
    s_prev = np.concatenate([[0], path.s[: m_top - 1]])
    shifts = s_prev + 1
    weights = _e(lam * m.astype(np.float64)) / m
    reach = j_max
    n = len(f.values)
    lhs = np.zeros(n + 2 * reach, dtype=np.complex128)
    b = np.zeros(reach + 1, dtype=np.complex128)
    np.add.at(b.view(np.float64), 2 * shifts, weights.real)
    np.add.at(b.view(np.float64), 2 * shifts + 1, weights.imag)
    rhs_coeff = aj_coefficients(ht, lam, j_max, "shift_exact").coeffs
    rhs = np.zeros_like(lhs)
    for h in range(1, reach + 1):
        for target, c in ((lhs, b[h]), (rhs, rhs_coeff[h])):
            target[reach + h : reach + h + n] += c * f.values
            target[reach - h : reach - h + n] -= c * f.values
    return float(np.max(np.abs(lhs - rhs)))


def aj_dirichlet_approx(
    skel: DeterministicSkeleton, lam: float, j_lo: int = 2, j_hi: int | None = None
) -> tuple[np.ndarray, float]:
    """Errors of the Dirichlet-kernel approximation to the block sums.

    Compares A_j (stated grouping, whose phases match the approximant
    termwise) with e(p_j lambda) D_{r_j}(-lambda) / p_{j-1}.  Degenerate
    blocks (r_j = 0, or p_{j-1} = 0 where the approximant is undefined)
    contribute approximant 0.  Returns per-j absolute errors and the
    fitted constant max_j err_j * j^(1 + 1/(1-alpha)).
    """
    if j_hi is None:
        j_hi = skel.j_max
    co = aj_coefficients(skel, lam, j_hi, grouping="stated").coeffs
    expo = 1.0 + 1.0 / (1.0 - skel.alpha)
    errs = np.zeros(j_hi - j_lo + 1)
    for j in range(j_lo, j_hi + 1):
        rj = int(skel.r[j])
        pjm1 = int(skel.p[j - 1])
        if rj > 0 and pjm1 >= 1:
            approx = _e(skel.p[j] * lam) * dirichlet(rj, -lam) / pjm1
        else:
            approx = 0.0
        errs[j - j_lo] = abs(co[j] - approx)
    js = np.arange(j_lo, j_hi + 1, dtype=np.float64)
    fitted_c = float(np.max(errs * js**expo))
    return errs, fitted_c


@dataclass(frozen=True)
class Lemma43Report:
    """Pointwise domination constant for the deterministic skeleton sum."""

    epsilon: float
    constant: float
    lambdas: np.ndarray
    lhs: Signal
    maximal: Signal


def lemma43_bound_check(
    skel: DeterministicSkeleton,
    epsilon: float,
    f: Signal,
    n_lambda: int = 65,
) -> Lemma43Report:
    """Smallest K with sup-over-frequencies LHS <= K log(1/eps) Mf pointwise.

    LHS(x) = max over a frequency grid of [eps, 1/2] of
    |sum_{1 < j < lambda^(-alpha/(1-alpha))} e(lambda p_j)/j (f(x+j) - f(x-j))|.
    """
    if not 0.0 < epsilon <= 0.25:
        raise ValueError("epsilon must lie in (0, 1/4]")
    expo = skel.alpha / (1.0 - skel.alpha)
    j_global = int(np.ceil(epsilon**-expo)) - 1
    if j_global > skel.j_max:
        raise ValueError(
            f"skeleton covers j <= {skel.j_max}, need {j_global}"
        )
    lambdas = np.linspace(epsilon, 0.5, n_lambda)
    n = len(f.values)
    reach = max(j_global, 1)
    sup = np.zeros(n + 2 * reach)
    for lam in lambdas:
        j_top = int(np.ceil(lam**-expo)) - 1
        out = np.zeros(n + 2 * reach, dtype=np.complex128)
        for j in range(2, j_top + 1):
            g = _e(lam * skel.p[j]) / j
            out[reach - j : reach - j + n] += g * f.values  # f(x + j)
            out[reach + j : reach + j + n] -= g * f.values  # f(x - j)
        np.maximum(sup, np.abs(out), out=sup)
    lo = f.offset - reach
    hi = f.offset + n - 1 + reach
    mf = hardy_littlewood_max(f, window=(lo, hi))
    mfv = mf.values.real
    mask = mfv > 0
    denom = np.log(1.0 / epsilon)
    constant = float(np.max(sup[mask] / (denom * mfv[mask]))) if mask.any() else 0.0
    return Lemma43Report(
        epsilon=epsilon,
        constant=constant,
        lambdas=lambdas,
        lhs=Signal(lo, sup.astype(np.complex128)),
        maximal=mf,
    )


def tail_coefficient_mass(spec: ModulatedKernelSpec) -> float:
    """l1 mass of kernel coefficients beyond the truncation.

    For kinds whose coefficients decay like 1/m (the full operators and
    the leading deterministic kernels) the analytic tail diverges and
    the mass is reported as inf.  For the summable kinds the sum runs
    over the remaining sampled range (path kinds) or a fourfold range
    extension (deterministic kinds).
    """
    if spec.kind in ("carleson", "term_R0", "t_full", "c_full", "term_C4"):
        return float("inf")
    lo, hi = spec.m_range()
    limit = spec.path.length if spec.path is not None else 4 * hi
    if limit <= hi:
        return 0.0
    ext = ModulatedKernelSpec(
        kind=spec.kind, alpha=spec.alpha, m_max=limit, path=spec.path
    )
    m, coeff, _ = _coefficients(ext)
    return float(np.sum(np.abs(coeff[m > hi])))
