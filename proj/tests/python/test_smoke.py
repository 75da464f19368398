import math

import numpy as np
import pytest

import vortexlab as vl


def test_speed_and_equilibrium():
    p = vl.StreetParams(b=0.2805, h=1.2)
    assert vl.street_speed(vl.StreetParams(b=0.2805, h=1.2, big_n=0)) == pytest.approx(
        0.5 * math.tanh(math.pi * 0.2805)
    )
    assert vl.equilibrium_residual(p) < 1e-10
    square = vl.StreetParams(b=0.5, h=1.0)
    assert vl.array_speed(square) - 0.5 == pytest.approx(0.0, abs=1e-10)


def test_stream_function_broadcasts():
    p = vl.StreetParams()
    x = np.linspace(0.1, 0.9, 5)
    y = np.full(5, 0.6)
    psi = vl.stream_function(x, y, p, vl.array_speed(p))
    assert psi.shape == (5,)
    assert psi[0] == pytest.approx(vl.stream_function(x[0] + 1.0, 0.6, p, vl.array_speed(p)))


def test_topology_and_bifurcations():
    assert vl.topology_class(vl.StreetParams(h=0.9))["k"] == 2
    h = vl.bifurcation_sequence(0.2805, 3)
    assert h[0] == pytest.approx(0.9598, abs=5e-3)
    assert h[1] == pytest.approx(0.8568, abs=5e-3)
    assert h[2] == pytest.approx(0.8096, abs=5e-3)
    assert vl.find_bifurcation(0.2805, 1, 0.9, 1.0) == pytest.approx(h[0], abs=1e-10)


def test_errors_map_to_exceptions():
    with pytest.raises(vl.ValidationError):
        vl.StreetParams(b=1.5, h=1.0)
    with pytest.raises(vl.DegenerateError):
        vl.bifurcation_sequence(0.5, 2)
    with pytest.raises(vl.NumericalError):
        vl.find_bifurcation(0.2805, 1, 0.97, 1.0)


def test_dipole_evolution():
    d = 0.4
    out = vl.evolve([complex(-d / 2, 0), complex(d / 2, 0)], [1.0, -1.0], 5.0)
    assert out["completed"]
    shift = 5.0 / (2 * math.pi * d)
    assert abs(out["positions"][0] - complex(-d / 2, shift)) < 1e-8


def test_cli_in_process():
    code, out, err = vl.run_cli(["equilibrium", "--hs", "0.5", "--n-list", "0,1"])
    assert code == 0
    assert out.splitlines()[0] == "h,two_n_plus_one,u_n"
    code, _, err = vl.run_cli(["bifurcate", "--bogus"])
    assert code == 1
