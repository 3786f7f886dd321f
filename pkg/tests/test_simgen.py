import numpy as np
import pytest
from scipy.integrate import quad

from condscreen.errors import UnsupportedScenario
from condscreen.simgen import (
    CoefficientProfile,
    Scenario,
    ScenarioSpec,
    draw_response,
    generate,
    heteroscedastic_mean,
    make_exposure,
    replication_rng,
    sample_ar_gaussian,
    scale_active_set,
)


@pytest.fixture(scope="module")
def ar_block():
    return {rho: sample_ar_gaussian(10_000, 4, rho, np.random.default_rng(17)) for rho in (0.0, 0.5)}


def test_ar_independent_columns(ar_block):
    z = ar_block[0.0]
    assert abs(np.corrcoef(z[:, 0], z[:, 1])[0, 1]) < 0.03


def test_ar_correlation_decay(ar_block):
    z = ar_block[0.5]
    assert np.corrcoef(z[:, 0], z[:, 1])[0, 1] == pytest.approx(0.5, abs=0.03)
    assert np.corrcoef(z[:, 0], z[:, 2])[0, 1] == pytest.approx(0.25, abs=0.03)


@pytest.mark.parametrize("rho", [0.0, 0.5])
def test_ar_unit_variance(ar_block, rho):
    np.testing.assert_allclose(ar_block[rho].var(axis=0), 1.0, atol=0.05)


def test_exposure_values():
    assert make_exposure(0.0) == 0.5
    pdf = lambda t: np.exp(-0.5 * t * t) / np.sqrt(2 * np.pi)  # noqa: E731
    ref = 0.5 + quad(pdf, 0.0, 1.959964, epsabs=1e-14)[0]
    assert make_exposure(1.959964) == pytest.approx(ref, abs=1e-12)
    assert make_exposure(1.959964) == pytest.approx(0.975, abs=1e-6)
    z = np.linspace(-6, 6, 121)
    np.testing.assert_allclose(make_exposure(z) + make_exposure(-z), 1.0, atol=1e-12)


def test_coefficient_functions():
    prof = CoefficientProfile()
    assert prof(3, 0.25) == pytest.approx(2.0, abs=1e-15)
    assert prof(0, 0.41) == 2.0 and prof(0, 0.4) == 0.0
    assert prof(1, 0.5) == 1.5
    assert prof(2, 1.0) == 1.0
    assert prof(4, 1.0) == pytest.approx(np.exp(0.5))
    active = scale_active_set(1000)
    assert prof.beta(7, 0.3, active) == 0.0


def test_oscillating_coefficient_integrates_to_zero():
    val, _ = quad(lambda t: float(CoefficientProfile()(3, t)), 0.0, 1.0, epsabs=1e-13)
    assert abs(val) <= 1e-10


def test_active_set_scaling():
    assert scale_active_set(1000) == (1, 99, 399, 599, 999)
    assert scale_active_set(50) == (0, 4, 19, 29, 49)
    for p in (5, 6, 13, 200, 5000):
        a = scale_active_set(p)
        assert len(set(a)) == 5 and min(a) >= 0 and max(a) < p
    with pytest.raises(UnsupportedScenario):
        scale_active_set(4)


def test_scenario_validation():
    assert ScenarioSpec("Ex2Case3").name is Scenario.EX2_CASE3
    with pytest.raises(UnsupportedScenario):
        ScenarioSpec("ex3case1")
    with pytest.raises(ValueError):
        ScenarioSpec(rho=1.0)
    spec = ScenarioSpec(p=1000)
    assert spec.active_labels == (2, 100, 400, 600, 1000)
    assert ScenarioSpec(p=20, exposure_column=None).exposure_column == 20


@pytest.mark.parametrize("name", list(Scenario))
def test_generate_reproducible(name):
    spec = ScenarioSpec(name, n=60, p=30, seed=99)
    a = generate(spec, replication_rng(99, 4))
    b = generate(spec, replication_rng(99, 4))
    for f in ("x", "y", "u"):
        np.testing.assert_array_equal(getattr(a.data, f), getattr(b.data, f))
    c = generate(spec, replication_rng(99, 5))
    assert not np.array_equal(a.data.y, c.data.y)
    assert a.data.x.shape == (60, 30)
    assert np.all((a.data.u > 0) & (a.data.u < 1))
    assert np.all(np.isfinite(a.data.y))


def test_default_rng_uses_spec_seed():
    spec = ScenarioSpec(n=20, p=10, seed=5)
    np.testing.assert_array_equal(generate(spec).data.y, generate(spec).data.y)


def test_exposure_is_latent_column():
    spec = ScenarioSpec(n=50, p=10, seed=1, exposure_column=0)
    rep = generate(spec, replication_rng(1, 0))
    z = sample_ar_gaussian(50, 11, 0.5, replication_rng(1, 0))
    np.testing.assert_array_equal(rep.data.u, make_exposure(z[:, 0]))
    np.testing.assert_array_equal(rep.data.x, z[:, 1:])


def test_null_logistic_is_fair_coin():
    spec = ScenarioSpec(Scenario.EX1_CASE1, n=10_000, p=10, seed=3)
    rep = generate(spec, coefficients=CoefficientProfile.zero())
    assert set(np.unique(rep.data.y)) <= {0.0, 1.0}
    assert rep.data.y.mean() == pytest.approx(0.5, abs=0.015)


def test_heteroscedastic_error_has_zero_mean():
    spec = ScenarioSpec(Scenario.EX2_CASE4, n=5, p=10, seed=8)
    rep = generate(spec)
    x, u = rep.data.x, rep.data.u
    rng = np.random.default_rng(12)
    draws = np.array([draw_response(spec.name, x, u, spec.active_set, rng)[0]
                      for _ in range(10_000)])
    mean = heteroscedastic_mean(x, u, spec.active_set)
    b600 = CoefficientProfile()(3, u)
    se = 2.0 * np.exp(b600 * x[:, spec.active_set[3]]) / np.sqrt(10_000)
    assert np.all(np.abs(draws.mean(axis=0) - mean) < 4 * se)


def test_poisson_clamp_recorded():
    n = 4
    x = np.zeros((n, 10))
    x[:, 1] = 40.0  # beta_2 = 2 when u > 0.4 -> eta = 80
    u = np.full(n, 0.9)
    y, clamped = draw_response(Scenario.EX1_CASE2, x, u, scale_active_set(10),
                               np.random.default_rng(0))
    assert clamped == n
    assert np.all(np.isfinite(y))
