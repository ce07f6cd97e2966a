import numpy as np
import pytest

from randcarleson.spectra import (
    FrequencyGrid,
    Signal,
    certified_supnorm,
    delta,
    dft,
    dirichlet,
    max_abs_difference,
    padded_supnorm,
    signal_from_text,
    signal_to_text,
)


def _e(t):
    return np.exp(2j * np.pi * t)


def rng():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(0)))


def test_signal_basics():
    f = Signal(-2, np.array([1.0, 2.0, 3.0]))
    assert f.n_first == -2 and f.n_last == 0
    assert f.at(-1) == 2.0
    assert f.at(5) == 0.0
    assert f.norm(2.0) == pytest.approx(np.sqrt(14.0))
    assert f.norm(np.inf) == 3.0
    g = f + f.scaled(-1.0)
    assert np.all(g.values == 0)
    assert max_abs_difference(f, f) == 0.0


def test_delta():
    d = delta(3)
    assert d.at(3) == 1.0 and d.at(2) == 0.0


def test_dft_direct_oracle():
    r = rng()
    f = Signal(-5, r.standard_normal(11) + 1j * r.standard_normal(11))
    grid = FrequencyGrid(16)
    sample = dft(f, grid, method="direct")
    n = f.positions()
    for i, beta in enumerate(grid.nodes):
        ref = np.sum(f.values * _e(-beta * n))
        assert sample.values[i] == pytest.approx(ref, abs=1e-12)


def test_dft_fft_matches_direct():
    r = rng()
    f = Signal(-17, r.standard_normal(40) + 1j * r.standard_normal(40))
    grid = FrequencyGrid(64)
    a = dft(f, grid, method="direct").values
    b = dft(f, grid, method="fft").values
    assert np.max(np.abs(a - b)) < 1e-10


def test_dft_fft_rejects_small_grid():
    f = Signal(0, np.ones(10))
    with pytest.raises(ValueError):
        dft(f, FrequencyGrid(8), method="fft")


def test_dirichlet_closed_form():
    for n in (1, 2, 7, 31):
        for theta in (0.013, 0.25, 0.49, -0.3):
            ref = np.sum(_e(theta * np.arange(1, n + 1)))
            assert dirichlet(n, theta) == pytest.approx(ref, abs=1e-10)
    # degenerate direction near integer theta
    assert dirichlet(5, 1e-12) == pytest.approx(5.0, abs=1e-9)


def test_dirichlet_true_bounds():
    # |D_n(theta) - n| <= pi n (n+1) |theta| and |D_n(theta)| <= 1/(2|theta|)
    thetas = np.linspace(1e-4, 0.5, 500)
    for n in (1, 2, 5, 20):
        for theta in thetas:
            d = dirichlet(n, float(theta))
            assert abs(d - n) <= np.pi * n * (n + 1) * theta + 1e-9
            assert abs(d) <= 1.0 / (2.0 * theta) + 1e-9


def test_padded_supnorm_is_upper_bound():
    r = rng()
    f = Signal(-8, r.standard_normal(17))
    bound = padded_supnorm(dft(f, FrequencyGrid(64)))
    n = f.positions()
    for beta in r.uniform(-0.5, 0.5, 200):
        val = abs(np.sum(f.values * _e(-beta * n)))
        assert val <= bound + 1e-12


def test_certified_supnorm_tightness():
    r = rng()
    f = Signal(0, r.standard_normal(32))
    bound = certified_supnorm(f, grid_exponent=8, rel_tol=0.01)
    dense = dft(f, FrequencyGrid(2**16))
    true_sup = float(np.max(np.abs(dense.values)))
    assert true_sup <= bound <= 1.03 * true_sup


def test_text_roundtrip():
    r = rng()
    f = Signal(-3, r.standard_normal(7) + 1j * r.standard_normal(7))
    back = signal_from_text(signal_to_text(f))
    assert back.offset == f.offset
    assert np.array_equal(back.values, f.values)
