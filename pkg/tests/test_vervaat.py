import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import ks_1samp

from fixedpivot.mt import MT19937
from fixedpivot.vervaat import EULER_GAMMA, VervaatParams, dickman_cdf, vervaat_pdf_cdf, vervaat_rnd

E_GAMMA = math.exp(-EULER_GAMMA)

# Dickman rho at integers (rho(2) = 1 - ln 2); density is exp(-gamma) * rho(x)
RHO = {2.0: 1 - math.log(2), 3.0: 0.0486083882911316, 4.0: 0.00491092564776083, 10.0: 2.77017183772596e-11}


def test_flat_density_on_unit_interval():
    x = np.linspace(1e-3, 1.0, 200)
    f, F = vervaat_pdf_cdf(x, 1.0)
    assert np.abs(f - E_GAMMA).max() < 1e-12
    assert np.abs(F - E_GAMMA * x).max() < 1e-12


def test_scalar_points():
    f, F = vervaat_pdf_cdf(0.5, 1.0)
    assert f == pytest.approx(E_GAMMA, abs=1e-6)
    assert vervaat_pdf_cdf(1.0, 1.0)[1] == pytest.approx(E_GAMMA, abs=1e-6)
    assert vervaat_pdf_cdf(50.0, 1.0)[1] == pytest.approx(1.0, abs=1e-6)


def test_dickman_rho_values():
    x = np.array(list(RHO))
    f, _ = vervaat_pdf_cdf(x, 1.0)
    assert f / E_GAMMA == pytest.approx(np.array(list(RHO.values())), rel=1e-10)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 3.7])
def test_cdf_monotone_bounded_and_integrates(beta):
    x = np.linspace(1e-3, 5 * beta + 3, 3000)
    f, F = vervaat_pdf_cdf(x, beta)
    assert f.min() >= -1e-9
    assert F.min() >= 0 and F.max() <= 1 + 1e-9
    assert np.diff(F).min() >= -1e-12
    breaks = list(range(1, int(5 * beta) + 1))
    mass = quad(lambda t: vervaat_pdf_cdf(t, beta)[0], 0, 5 * beta, points=breaks, limit=500)[0]
    tail = 1 - vervaat_pdf_cdf(5 * beta, beta)[1]
    assert mass + tail == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.5])
def test_derivative_of_cdf_is_pdf(beta):
    x = np.linspace(0.3, 4 * beta + 2, 400)
    x = x[np.abs(x - np.round(x)) > 1e-3]
    h = 1e-6
    dF = (vervaat_pdf_cdf(x + h, beta)[1] - vervaat_pdf_cdf(x - h, beta)[1]) / (2 * h)
    assert np.abs(dF - vervaat_pdf_cdf(x, beta)[0]).max() < 1e-3


def test_series_route_is_close():
    x = np.array([0.5, 1.5, 2.5, 4.0])
    f, F = vervaat_pdf_cdf(x, 1.0)
    fs, Fs = vervaat_pdf_cdf(x, 1.0, method="series")
    assert np.abs(F - Fs).max() < 5e-3
    assert np.abs(f - fs).max() < 2e-2
    assert vervaat_pdf_cdf(np.array([0.5]), 2.0, method="series", n_terms=150)[1][0] == pytest.approx(
        vervaat_pdf_cdf(0.5, 2.0)[1], rel=0.05
    )


def test_params():
    p = VervaatParams(1.0, 10)
    assert p.pascal.shape == (11, 11)
    assert p.pascal[3, 2] == 10  # C(5, 3)
    with pytest.raises(ValueError):
        VervaatParams(0.0)
    with pytest.raises(ValueError):
        VervaatParams(1.0, 0)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        vervaat_pdf_cdf([0.0, 1.0], 1.0)
    with pytest.raises(ValueError):
        vervaat_pdf_cdf([1.0], -1.0)
    with pytest.raises(ValueError):
        vervaat_pdf_cdf([1.0], 1.0, method="laplace")
    with pytest.raises(ValueError):
        vervaat_rnd(1.0, 3, MT19937(1), eps=0.0)


def test_sampler():
    y = vervaat_rnd(1.0, 100_000, MT19937(11))
    assert (y > 0).all()
    assert y.mean() == pytest.approx(1.0, rel=0.02)
    assert ks_1samp(y, dickman_cdf).statistic < 0.02
    assert vervaat_rnd(1.0, 0, MT19937(1)).size == 0


def test_sampler_other_beta():
    beta = 2.5
    y = vervaat_rnd(beta, 20_000, np.random.default_rng(1))
    assert y.mean() == pytest.approx(beta, rel=0.03)  # E[Y] = beta
    assert ks_1samp(y, lambda t: vervaat_pdf_cdf(t, beta)[1]).statistic < 0.02
