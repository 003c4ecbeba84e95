import math
from statistics import NormalDist

import mpmath
import numpy as np
import pytest

from irsa.degree import named_distribution
from irsa.density_evolution import bp_threshold, compute_gamma
from irsa.errors import InvalidPopulation, UnknownDistribution
from irsa.scaling import (
    BUILTIN_PARAMS,
    ScalingParams,
    builtin_params,
    fep_predict,
    params_from_de,
    plp_predict,
    predict,
    q_tail,
    waterfall_center,
)


def mp_q(x):
    return float(mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2)


def test_q_tail_basics():
    assert q_tail(0.0) == 0.5
    assert q_tail(1.959964) == pytest.approx(0.025, abs=1e-6)
    for x in np.linspace(-8, 8, 161):
        assert q_tail(x) + q_tail(-x) == pytest.approx(1.0, abs=1e-12)
        assert abs(q_tail(x) - mp_q(x)) <= 1e-12
    # deep tail keeps relative accuracy
    assert q_tail(10.0) == pytest.approx(mp_q(10.0), rel=1e-12)
    assert np.allclose(q_tail(np.array([0.0, 1.0])), [0.5, mp_q(1.0)])


def test_builtin_rows():
    assert builtin_params("x3") == ScalingParams(0.818469, 0.497867, 0.964528, 0.783499)
    assert builtin_params("x4") == ScalingParams(0.772280, 0.409321, 0.827849, 0.906054)
    assert builtin_params("lambda2") == ScalingParams(0.851325, 0.496301, 1.50477, 0.835418)
    with pytest.raises(UnknownDistribution):
        builtin_params("x9")


@pytest.mark.parametrize("name", list(BUILTIN_PARAMS))
def test_builtin_matches_density_evolution(name):
    dist = named_distribution(name)
    params = builtin_params(name)
    assert bp_threshold(dist, tol=1e-7).g_star == pytest.approx(params.g_star, abs=1e-5)
    assert compute_gamma(dist) == pytest.approx(params.gamma, abs=1e-5)


def test_params_validation():
    with pytest.raises(ValueError):
        ScalingParams(0.8, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        ScalingParams(0.8, 0.5, 1.0, 1.2)


@pytest.mark.parametrize("name", list(BUILTIN_PARAMS))
@pytest.mark.parametrize("m", [50, 200])
def test_center_is_one_half(name, m):
    params = builtin_params(name)
    g0 = waterfall_center(m, params)
    assert fep_predict(m, g0, params) == pytest.approx(0.5, abs=1e-15)
    assert plp_predict(m, g0, params) == pytest.approx(params.gamma / 2, abs=1e-15)


def test_plug_in_value():
    p = builtin_params("x3")
    arg = math.sqrt(200) * (0.818469 - 0.964528 * 200 ** (-2 / 3) - 0.70) / math.sqrt(0.497867**2 + 0.70)
    expected = 1 - NormalDist().cdf(arg)
    assert fep_predict(200, 0.70, p) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.0948973, abs=1e-6)


@pytest.mark.parametrize("name", list(BUILTIN_PARAMS))
def test_tiny_load(name):
    params = builtin_params(name)
    values = fep_predict(200, np.array([1e-4, 1e-3, 0.01, 0.05]), params)
    assert np.all(values < 1e-10)
    assert np.all(np.diff(values) >= 0)


@pytest.mark.parametrize("name", list(BUILTIN_PARAMS))
def test_monotone_in_load_and_frame_length(name):
    params = builtin_params(name)
    grid = np.linspace(1e-3, 1.0, 2000)
    for m in (50, 200):
        assert np.all(np.diff(fep_predict(m, grid, params)) >= 0)
    for g in np.linspace(0.05, params.g_star - 0.01, 20):
        vals = [fep_predict(m, g, params) for m in (50, 100, 200, 500, 1000)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_plp_is_gamma_times_fep():
    params = builtin_params("lambda2")
    grid = np.linspace(0.4, 1.0, 61)
    fep = fep_predict(50, grid, params)
    plp = plp_predict(50, grid, params)
    assert np.array_equal(plp, params.gamma * fep)
    assert np.all(plp <= fep) and np.all(np.diff(plp) >= 0)
    pt = predict(50, 0.7, params)
    assert pt.plp == pytest.approx(params.gamma * pt.fep, rel=1e-15)


def test_finite_population_converges():
    params = builtin_params("x3")
    m, g = 200, 0.72
    limit = fep_predict(m, g, params)
    gaps = [abs(fep_predict(m, g, params, population=r * m) - limit) for r in (2, 10, 100, 1000)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4
    with pytest.raises(InvalidPopulation):
        fep_predict(m, g, params, population=m)


def test_params_from_de():
    dist = named_distribution("x4")
    params = params_from_de(dist, 0.409321, 0.827849)
    assert params.g_star == pytest.approx(0.772280, abs=1e-5)
    assert params.gamma == pytest.approx(0.906054, abs=1e-5)
