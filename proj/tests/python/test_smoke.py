import math

import numpy as np
import pytest

import ellrad


def test_sequences():
    seq = ellrad.SemiAxes.polynomial(1.0, 0.0, 100)
    assert seq.m == 100
    assert seq.sigma(4) == pytest.approx(0.25)
    assert seq.sigma(101) == 0.0
    assert len(seq.values) == 100
    assert ellrad.n_zero(ellrad.SemiAxes.polynomial(0.25, 0.0, 4096), 0.5) == 10
    with pytest.raises(ValueError):
        ellrad.SemiAxes.from_values([1.0, 2.0])


def test_gaussian_matrix_is_nested():
    g = ellrad.sample(7, 3, 10).matrix()
    h = ellrad.sample(7, 5, 12).matrix()
    assert g.shape == (3, 10)
    np.testing.assert_array_equal(g, h[:3, :10])


def test_radius_against_numpy():
    seq = ellrad.SemiAxes.polynomial(1.0, 0.0, 40)
    g = ellrad.sample(3, 6, 40)
    r = ellrad.section_radius(seq, g)
    d = np.array(seq.values)
    _, _, vt = np.linalg.svd(g.matrix() * d)
    kernel = vt[6:].T
    expected = np.linalg.svd(d[:, None] * kernel, compute_uv=False)[0]
    assert r["radius"] == pytest.approx(expected, rel=1e-9)
    it = ellrad.section_radius(seq, g, method="iterative")
    assert it["radius"] == pytest.approx(expected, rel=1e-8)
    assert seq.sigma(7) <= r["radius"] <= ellrad.worst_case_error(seq, g, 3) + 1e-10


def test_estimator_and_bounds():
    g = ellrad.sample(1, 4, 8)
    x = np.zeros(8)
    x[:2] = [1.0, -3.0]
    np.testing.assert_allclose(ellrad.apply_estimator(g, 2, x), x, atol=1e-12)
    ones = ellrad.SemiAxes.from_values([1.0] * 100)
    assert ellrad.ub_main(ones, 4)["rhs"] == pytest.approx(1105.0)
    assert ellrad.gordon_an(2) == pytest.approx(math.sqrt(math.pi / 2))
    rep = ellrad.realization_ub(ellrad.SemiAxes.polynomial(1.0, 0.0, 12), ellrad.sample(1, 6, 12), 3)
    assert rep["holds"]


def test_concentration():
    lo, hi = ellrad.check_laurent_massart([1.0] * 100, 0.5, 1000, 1)
    assert lo["claimed_bound"] == pytest.approx(math.exp(-6.25))
    assert lo["verdict"] != "violated" and hi["verdict"] != "violated"
    t = ellrad.check_szarek(5, 0.1, 1000, 2)
    assert t["claimed_bound"] == pytest.approx(0.1 * math.sqrt(2 * math.e))


def test_sweep_roundtrip():
    cfg = {
        "sequence": {"family": "polynomial", "alpha": 1.0, "m": 32},
        "n_list": [0, 2, 4],
        "trials": 2,
        "master_seed": 3,
    }
    csv_text, summary = ellrad.sweep(cfg)
    lines = csv_text.strip().splitlines()
    assert lines[0] == ellrad.CSV_HEADER
    assert len(lines) == 1 + 3 * 2
    assert [c["n"] for c in summary["cells"]] == [0, 2, 4]
    assert ellrad.sweep(cfg)[0] == csv_text
    with pytest.raises(ValueError):
        ellrad.sweep({**cfg, "bogus": 1})
