import math

import numpy as np
import pytest

import kirchdelay


def test_characteristic_roots():
    b = kirchdelay.characteristic_roots(2)
    assert b[0] == pytest.approx(4.730041, abs=1e-6)
    assert b[1] == pytest.approx(7.853205, abs=1e-6)


def test_mode_matrices():
    m = kirchdelay.mode_matrices(4)
    G = np.asarray(m["grad"])
    assert G.shape == (4, 4)
    assert np.allclose(G, G.T)
    assert m["mass_residual"] < 1e-10
    assert np.allclose(np.asarray(m["lambdas"]), np.asarray(m["betas"]) ** 4)


def test_xi_window_default():
    lo, hi = kirchdelay.xi_window()
    assert lo == pytest.approx(0.2)
    assert hi == pytest.approx(0.8)


def test_validate_reports_gain_failure():
    assert kirchdelay.validate()["passed"]
    bad = kirchdelay.validate(overrides={"problem.mu2": 2})
    assert not bad["passed"]
    names = [e["name"] for e in bad["entries"] if not e["passed"]]
    assert "A4.gain" in names


def test_short_run():
    out = kirchdelay.run(overrides={"numerics.T": 2, "numerics.n_modes": 4})
    t = np.asarray(out["t"])
    E = np.asarray(out["E"])
    assert t[0] == 0.0 and t[-1] == pytest.approx(2.0)
    assert np.all(np.diff(E) <= 1e-9)
    assert np.asarray(out["a"]).shape == (len(t), 4)
    assert np.allclose(np.asarray(out["energy_parts"]).sum(axis=1), E, rtol=1e-12)
    s = out["summary"]
    assert s["k"] > 0.0
    assert s["max_identity_residual"] < 1e-4 * s["E0"]


def test_fit_decay_synthetic():
    t = np.linspace(0.0, 5.0, 101)
    fit = kirchdelay.fit_decay(t, 2.0 * np.exp(-3.0 * t))
    assert fit["K"] == pytest.approx(2.0)
    assert fit["k"] == pytest.approx(3.0)
    assert fit["r2"] == pytest.approx(1.0)


def test_errors_are_raised():
    with pytest.raises(kirchdelay.KirchdelayError):
        kirchdelay.validate(overrides={"kernel.h0": "abc"})
    with pytest.raises(kirchdelay.KirchdelayError):
        kirchdelay.validate(overrides={"no.such": 1})
    with pytest.raises(kirchdelay.KirchdelayError):
        kirchdelay.fit_decay([0.0, 1.0], [1.0, -1.0])
