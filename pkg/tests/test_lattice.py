"""Tests for the double q-lattice: intervals, interlacing, variational series."""

import numpy as np
import pytest

from conftest import interlacing_child, random_config
from qzw.errors import BadOrder, DuplicatePoints, SizeMismatch
from qzw.lattice import (
    MINUS,
    PLUS,
    Configuration,
    LatticeParams,
    LatticePoint,
    TailSpec,
    config,
    interlace,
    interlace_via_tilde,
    interval_I,
    interval_I_tilde,
    variational_series,
)


def pt(branch, m):
    return LatticePoint(branch, m)


def test_point_order_is_exact(lat):
    # minus branch increases with exponent, plus branch decreases
    assert pt(MINUS, 0) < pt(MINUS, 3) < pt(PLUS, 5) < pt(PLUS, 0)
    assert lat.value(pt(MINUS, 1)) == -0.5
    assert lat.value(pt(PLUS, 2)) == 0.25


def test_configuration_validation(lat):
    with pytest.raises(DuplicatePoints):
        Configuration(lat, (pt(PLUS, 1), pt(PLUS, 1)))
    with pytest.raises(BadOrder):
        Configuration(lat, (pt(PLUS, 0), pt(PLUS, 1)))  # values 1, 0.5 decreasing
    c = config(lat, [(PLUS, 0), (MINUS, 0), (PLUS, 3)])
    assert [lat.value(p) for p in c] == [-1.0, 0.125, 1.0]


def test_interval_I_same_sign_frozen(lat):
    # I(-1, -0.25) = {-1, -0.5}: half-open [a, b) on the negative side
    got = interval_I(pt(MINUS, 0), pt(MINUS, 2), lat)
    assert [lat.value(p) for p in got] == [-1.0, -0.5]
    assert not got.truncated
    # (0.25, 1] on the positive side: right endpoint in, left out
    got = interval_I(pt(PLUS, 2), pt(PLUS, 0), lat)
    assert [lat.value(p) for p in got] == [0.5, 1.0]


def test_interval_I_crossing_zero(lat):
    tail = TailSpec(cutoff=0.06, cap=16.0)
    got = interval_I(pt(MINUS, 0), pt(PLUS, 0), lat, tail)
    assert got.truncated
    vals = [lat.value(p) for p in got]
    assert vals == [-1.0, -0.5, -0.25, -0.125, -0.0625, 0.0625, 0.125, 0.25, 0.5, 1.0]
    assert vals == sorted(vals)


def test_interval_I_rejects_bad_order(lat):
    with pytest.raises(BadOrder):
        interval_I(pt(PLUS, 0), pt(MINUS, 0), lat)


def test_interval_I_tilde_inclusion_rules(lat):
    # (a, b] on the negative side
    got = interval_I_tilde(pt(MINUS, 0), pt(MINUS, 2), lat)
    assert [lat.value(p) for p in got] == [-0.5, -0.25]
    # [a, b) on the positive side
    got = interval_I_tilde(pt(PLUS, 2), pt(PLUS, 0), lat)
    assert [lat.value(p) for p in got] == [0.25, 0.5]
    # (a, b) across zero: both endpoints excluded
    tail = TailSpec(cutoff=0.2, cap=16.0)
    got = interval_I_tilde(pt(MINUS, 0), pt(PLUS, 0), lat, tail)
    assert [lat.value(p) for p in got] == [-0.5, -0.25, 0.25, 0.5]


def test_interval_I_tilde_infinite_endpoints(lat):
    tail = TailSpec(cutoff=0.2, cap=4.0)
    got = interval_I_tilde(None, pt(MINUS, 0), lat, tail)
    assert got.truncated
    assert [lat.value(p) for p in got] == [-4.0, -2.0, -1.0]
    got = interval_I_tilde(pt(PLUS, 1), None, lat, tail)
    assert [lat.value(p) for p in got] == [0.5, 1.0, 2.0, 4.0]
    got = interval_I_tilde(None, None, lat, tail)
    vals = [lat.value(p) for p in got]
    assert vals == sorted(vals) and len(vals) == 10


def test_tilde_intervals_partition_window(lat):
    # the N+1 second-kind intervals of Y tile the lattice window, for Y
    # strictly inside the window
    rng = np.random.default_rng(2)
    tail = TailSpec(cutoff=0.5**30, cap=2.0**8)
    for _ in range(50):
        y = random_config(lat, int(rng.integers(1, 5)), rng)
        edges = [None, *y.points, None]
        seen = []
        for a, b in zip(edges, edges[1:]):
            seen.extend(interval_I_tilde(a, b, lat, tail).points)
        window = interval_I_tilde(None, None, lat, tail).points
        assert sorted(seen) == sorted(window)
        assert len(set(seen)) == len(seen)


def test_interlace_frozen_examples(lat):
    x = config(lat, [(MINUS, 0), (MINUS, 1)])  # {-1, -0.5}
    assert interlace(x, config(lat, [(MINUS, 0)]))  # {-1}: left endpoint in
    assert not interlace(x, config(lat, [(MINUS, 1)]))  # {-0.5}: right endpoint out
    with pytest.raises(SizeMismatch):
        interlace(x, x)


def test_interlace_matches_tilde_characterization(lat):
    rng = np.random.default_rng(4)
    agree_true = 0
    for _ in range(1000):
        x = random_config(lat, int(rng.integers(2, 7)), rng)
        if rng.uniform() < 0.5:
            y = interlacing_child(x, rng)
        else:
            y = random_config(lat, len(x) - 1, rng)
        a = interlace(x, y)
        b = interlace_via_tilde(x, y)
        assert a == b
        agree_true += a
    assert agree_true > 100  # the generator exercises both outcomes


def test_variational_series_frozen(lat):
    x = config(lat, [(MINUS, 0), (PLUS, 1), (PLUS, 0)])  # {-1, 0.5, 1}
    s = variational_series(x)
    assert [lat.value(p) for p in s] == [1.0, -1.0, 0.5]


def test_variational_series_envelope(lat):
    # |x_(2n)| <= |x_(1)| q^(n-1) and |x_(2n+1)| <= |x_(1)| q^n hold for
    # every configuration; the constructor re-checks them
    rng = np.random.default_rng(6)
    for _ in range(200):
        x = random_config(lat, int(rng.integers(1, 8)), rng)
        s = variational_series(x)
        vals = np.abs(s.values())
        assert (np.diff(vals) <= 1e-12).all()
        top = vals[0]
        for j, v in enumerate(vals[1:], start=2):
            shift = (j - 1) // 2
            assert v <= top * lat.q**shift * (1 + 1e-9)


def test_variational_series_uneven_zetas():
    # cross-branch magnitude comparisons with zeta_- != -zeta_+
    lat = LatticeParams(q=0.5, zeta_minus=-3.0, zeta_plus=1.0)
    x = config(lat, [(MINUS, 1), (PLUS, 0)])  # values -1.5, 1
    s = variational_series(x)
    assert [lat.value(p) for p in s] == [-1.5, 1.0]
    # exact tie across branches: |-3 q^2| = |0.75| vs 0.75 on plus branch
    lat2 = LatticeParams(q=0.5, zeta_minus=-3.0, zeta_plus=0.75)
    x2 = config(lat2, [(MINUS, 2), (PLUS, 0)])
    s2 = variational_series(x2)
    assert [lat2.value(p) for p in s2] == [0.75, -0.75]  # positive first on tie


def test_json_round_trip(lat):
    x = config(lat, [(MINUS, 2), (PLUS, 3), (PLUS, -1)])
    y = Configuration.from_json(x.to_json())
    assert y == x
    assert '"branch": "-"' in x.to_json()


def test_tailspec_default(lat):
    t = TailSpec.default(lat)
    assert t.cutoff == pytest.approx(0.5**64)
    assert t.cap == pytest.approx(2.0**32)
    with pytest.raises(ValueError):
        TailSpec(cutoff=1.0, cap=0.5)
