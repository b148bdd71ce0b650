import csv
import math

import pytest

import gibbsflow as gf


def test_philox_known_answer():
    assert gf.philox4x32([0, 0, 0, 0], [0, 0]) == [0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8]


def test_windows_and_rates():
    w = gf.Window.interval(0.0, 2.0)
    assert w.volume == 2.0
    assert w.contains([1.0]) and not w.contains([2.0])
    spec = gf.InteractionSpec.area(1, 1.0, 1.0, 1.0)
    assert gf.birth_rate(spec, [0.0], []) == pytest.approx(math.exp(-1.0))
    assert gf.birth_rate(spec, [0.0], [[0.0]]) == pytest.approx(1.0)
    lo, hi = gf.rate_bounds(spec)
    assert lo <= math.exp(-1.0) and hi == 1.0
    with pytest.raises(ValueError):
        gf.InteractionSpec.area(1, 1.0, -1.0, 1.0)


def test_poisson_and_simulation_are_seeded():
    w = gf.Window.cube(2, 0.0, 3.0)
    a = gf.sample_poisson(1.0, w, seed=3)
    assert a == gf.sample_poisson(1.0, w, seed=3)
    assert all(w.contains(p) for p in a)
    spec = gf.InteractionSpec.ideal(1, 1.0)
    obs = gf.Window.interval(0.0, 2.0)
    tr = gf.simulate(spec, obs, 1.0, 1.0, [[0.5]], seed=4)
    again = gf.simulate(spec, obs, 1.0, 1.0, [[0.5]], seed=4)
    assert tr.births() == again.births()
    s0 = tr.state_at(0.0)
    assert s0["full"] == [[0.5]] and s0["born"] == []
    with pytest.raises(IndexError):
        tr.state_at(2.0)


def test_lattice_two_state():
    model = gf.LatticeModel.line(gf.InteractionSpec.ideal(1, 1.0), 1, 1.0)
    q = gf.GeneratorMatrix(model)
    assert q.dense().tolist() == [[-1.0, 1.0], [1.0, -1.0]]
    nu = gf.stationary(model)
    assert nu == pytest.approx([0.5, 0.5])
    assert gf.fisher([0.75, 0.25], nu, q) == pytest.approx(math.log(3.0) / 2.0)
    assert gf.rel_entropy([1.0, 0.0], nu) == pytest.approx(math.log(2.0))
    assert gf.spectral_gap(q, nu) == pytest.approx(2.0)
    assert gf.de_bruijn_check([0.9, 0.1], model, 2.0)["max_residual"] <= 1e-8


def test_experiment_catalogue_and_run():
    names = {e["name"]: e for e in gf.experiments()}
    assert len(names) == 15
    assert names["decay"]["params"]["fit_end"] == 60.0
    out = gf.run_experiment("finite-time-gibbs", seed=24301)
    assert out["passed"] and out["criterion"] == "A7"
    assert set(out["results"][0]) == {"case", "quantity", "value", "se", "n"}
    curve = out["curves"]["tv_curve"]
    assert len(curve) == 200 and set(curve[0]) == {"t", "tv"}
    with pytest.raises(gf.ConfigError):
        gf.run_experiment("decay", {"bogus": 1})
