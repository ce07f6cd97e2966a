import numpy as np
import pytest

from randcarleson.operators import hardy_littlewood_max
from randcarleson.sparse import (
    DyadicInterval,
    SparseCollection,
    Weight,
    ap_characteristic,
    collection_from_text,
    collection_to_text,
    local_average,
    rh_characteristic,
    sparse_certificate,
    sparse_form,
    verify_sparse,
    weighted_bound_check,
    weighted_norm,
)
from randcarleson.spectra import Signal


def rng():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(2)))


def test_dyadic_interval_geometry():
    iv = DyadicInterval(3, 2)
    assert (iv.start, iv.stop, iv.length) == (16, 24, 8)
    left, right = iv.children()
    assert (left.start, left.stop) == (16, 20)
    assert (right.start, right.stop) == (20, 24)
    assert iv.triple() == (8, 32)
    assert iv.contains(left) and not left.contains(iv)


def test_containing():
    iv = DyadicInterval.containing(5, 11)
    assert iv.start <= 5 and iv.stop > 11
    assert iv.length == 16
    assert DyadicInterval.containing(7, 7).length == 1
    neg = DyadicInterval.containing(-10, -5)
    assert neg.start <= -10 and neg.stop > -5
    with pytest.raises(ValueError):
        DyadicInterval.containing(-3, 4)  # no dyadic interval crosses zero
    with pytest.raises(ValueError):
        DyadicInterval.containing(4, 3)


def test_local_average_oracle():
    f = Signal(0, np.array([1.0, 2.0, 0.0, 4.0]))
    iv = DyadicInterval(2, 0)  # [0, 4)
    assert local_average(f, iv, 1.0) == pytest.approx(7.0 / 4.0)
    assert local_average(f, iv, 2.0) == pytest.approx(np.sqrt(21.0 / 4.0))
    # zero outside the support window
    assert local_average(f, DyadicInterval(2, 4), 1.0) == 0.0


def test_verify_sparse_accepts_and_rejects():
    i0 = DyadicInterval(3, 0)
    i1 = DyadicInterval(2, 0)
    good = SparseCollection(
        intervals=(i0, i1),
        witnesses={i0: frozenset(range(4, 8)), i1: frozenset(range(0, 4))},
    )
    ok, violations = verify_sparse(good)
    assert ok and not violations
    shared = SparseCollection(
        intervals=(i0, i1),
        witnesses={i0: frozenset(range(0, 8)), i1: frozenset(range(0, 4))},
    )
    ok, violations = verify_sparse(shared)
    assert not ok and any("shared" in v for v in violations)
    thin = SparseCollection(
        intervals=(DyadicInterval(5, 0),),
        witnesses={DyadicInterval(5, 0): frozenset({0, 1, 2})},
    )
    ok, violations = verify_sparse(thin)
    assert not ok and any("too small" in v for v in violations)


def test_sparse_form_oracle():
    iv = DyadicInterval(2, 0)
    coll = SparseCollection(
        intervals=(iv,), witnesses={iv: frozenset(range(4))}
    )
    f = Signal(0, np.array([1.0, 1.0, 1.0, 1.0]))
    g = Signal(0, np.array([2.0, 0.0, 0.0, 0.0]))
    assert sparse_form(coll, f, g, 1.0) == pytest.approx(1.0 * 0.5 * 4)


def test_certificate_dominates_pairing():
    r = rng()
    width = 64
    f = Signal(0, r.standard_normal(width) + 1j * r.standard_normal(width))
    g = Signal(0, r.standard_normal(width) + 1j * r.standard_normal(width))
    coll, constant = sparse_certificate(hardy_littlewood_max, f, g, r=1.5)
    ok, violations = verify_sparse(coll)
    assert ok, violations
    tf = hardy_littlewood_max(f)
    lo = max(tf.n_first, g.n_first)
    hi = min(tf.n_last, g.n_last)
    a = tf.values[lo - tf.offset : hi - tf.offset + 1]
    b = g.values[lo - g.offset : hi - g.offset + 1]
    pairing = abs(np.sum(a * np.conj(b)))
    form = sparse_form(coll, f, g, 1.5)
    assert pairing <= constant * form * (1 + 1e-9)
    assert np.isfinite(constant)


def test_weight_characteristics_unit():
    w = Weight(0, np.ones(256))
    assert ap_characteristic(w, 2.0) == pytest.approx(1.0)
    assert rh_characteristic(w, 2.0) == pytest.approx(1.0)


def test_ap_characteristic_brute_force():
    r = rng()
    vals = np.exp(r.standard_normal(20))
    w = Weight(0, vals)
    best = 0.0
    for lo in range(20):
        for hi in range(lo, 20):
            seg = vals[lo : hi + 1]
            best = max(
                best,
                np.mean(seg ** (1.0 / (1.0 - 2.0))) ** (2.0 - 1.0) * np.mean(seg),
            )
    assert ap_characteristic(w, 2.0) == pytest.approx(best)


def test_weight_validation():
    with pytest.raises(ValueError):
        Weight(0, np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        ap_characteristic(Weight(0, np.ones(4)), 1.0)


def test_weighted_norm_oracle():
    w = Weight(0, np.array([1.0, 4.0]))
    f = Signal(-1, np.array([9.0, 3.0, 1.0]))
    # restricted to n = 0, 1: (1*3^2 + 4*1^2)^(1/2)
    assert weighted_norm(f, w, 2.0) == pytest.approx(np.sqrt(13.0))


def test_weighted_bound_check_deterministic():
    w = Weight(0, np.ones(32))
    op = lambda f: f
    r1 = weighted_bound_check(op, w, 2.0, 10, 3)
    r2 = weighted_bound_check(op, w, 2.0, 10, 3)
    assert np.array_equal(r1.ratios, r2.ratios)
    assert r1.estimate == pytest.approx(1.0)


def test_collection_text_roundtrip():
    i0 = DyadicInterval(3, 0)
    i1 = DyadicInterval(2, 1)
    coll = SparseCollection(
        intervals=(i0, i1),
        witnesses={i0: frozenset({0, 1, 2}), i1: frozenset({5, 6})},
    )
    back = collection_from_text(collection_to_text(coll))
    assert back.intervals == coll.intervals
    assert back.witnesses == coll.witnesses
