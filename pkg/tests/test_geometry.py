import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plugris.geometry import (
    AnglePair,
    GeometryDomainError,
    UraGeometry,
    efd_approx,
    efd_exact,
    footprint_spacing,
    hpbw,
    sub_ris_side_length,
    sub_ris_spacing,
    ura_response,
    ura_response_batch,
    wavelength,
)

LAM = wavelength(28e9)


def ura(nx, ny, lam=LAM):
    return UraGeometry.half_wavelength(nx, ny, lam)


angles = st.builds(
    AnglePair,
    st.floats(-math.pi, math.pi),
    st.floats(-math.pi / 2, math.pi / 2),
)
shapes = st.tuples(st.integers(1, 12), st.integers(1, 12))


def test_wavelength_28ghz():
    assert LAM == pytest.approx(0.0107068735, rel=1e-9)


def test_ura_response_broadside_is_uniform():
    a = ura_response(ura(10, 10), AnglePair(0.0, 0.0))
    np.testing.assert_allclose(a, np.full(100, 0.1 + 0j), atol=1e-15)


def test_ura_response_two_element_endfire():
    a = ura_response(ura(2, 1), AnglePair(0.0, math.pi / 2))
    np.testing.assert_allclose(a, np.array([1, -1]) / math.sqrt(2), atol=1e-12)


def test_ura_response_element_ordering():
    # n = n_y * N_x + n_x, checked against an explicit double loop
    geom = UraGeometry(3, 2, 0.004, 0.006, LAM)
    ang = AnglePair(0.7, 0.4)
    k = 2 * math.pi / LAM
    kx = k * math.sin(0.4) * math.cos(0.7)
    ky = k * math.sin(0.4) * math.sin(0.7)
    expected = np.empty(6, complex)
    for n_y in range(2):
        for n_x in range(3):
            expected[n_y * 3 + n_x] = np.exp(1j * (kx * n_x * 0.004 + ky * n_y * 0.006))
    np.testing.assert_allclose(ura_response(geom, ang), expected / math.sqrt(6), atol=1e-12)


@given(shapes, angles)
def test_ura_response_norm_and_magnitudes(shape, ang):
    geom = ura(*shape)
    a = ura_response(geom, ang)
    assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(np.abs(a), 1 / math.sqrt(geom.n), atol=1e-12)


@given(shapes, angles)
@settings(max_examples=50)
def test_batch_matches_scalar(shape, ang):
    geom = ura(*shape)
    batch = ura_response_batch(geom, np.array([ang.azimuth]), np.array([ang.elevation]))
    np.testing.assert_allclose(batch[0], ura_response(geom, ang), atol=1e-12)


def test_ura_response_rejects_nonfinite():
    with pytest.raises(ValueError):
        ura_response(ura(2, 2), AnglePair(float("nan"), 0.0))
    with pytest.raises(ValueError):
        ura_response_batch(ura(2, 2), np.array([np.inf]), np.array([0.0]))


@pytest.mark.parametrize("bad", [(0, 1, 1.0, 1.0, 1.0), (1, 1, 0.0, 1.0, 1.0), (1, 1, 1.0, 1.0, -1.0)])
def test_ura_geometry_validation(bad):
    with pytest.raises(ValueError):
        UraGeometry(*bad)


def test_hpbw_values():
    assert hpbw(10, LAM / 2, LAM) == pytest.approx(0.1782, abs=1e-12)
    assert hpbw(1, LAM, LAM) == pytest.approx(0.891, abs=1e-12)


@given(st.integers(1, 500), st.floats(1e-3, 1.0))
def test_hpbw_halves_when_array_doubles(n, spacing):
    assert hpbw(2 * n, spacing, LAM) == pytest.approx(hpbw(n, spacing, LAM) / 2, rel=1e-15)


def test_efd_exact_values():
    assert efd_exact(10, 0.1782, 0.0) == pytest.approx(1.7867306760835437, rel=1e-12)
    assert efd_exact(2.5, 0.1782, math.pi / 3) == pytest.approx(1.05690615038881, rel=1e-12)


def test_efd_exact_grazing_raises():
    with pytest.raises(GeometryDomainError):
        efd_exact(10, 0.1782, math.pi / 2 - 0.1782 / 2)
    with pytest.raises(GeometryDomainError):
        efd_exact(10, 0.1782, 1.6)


def test_efd_approx():
    assert efd_approx(10, 0.1782) == pytest.approx(1.782, abs=1e-12)
    assert efd_approx(10, 0.0) == 0.0
    rel = (efd_exact(10, 0.1782, 0) - efd_approx(10, 0.1782)) / efd_exact(10, 0.1782, 0)
    assert 0 < rel < 3e-3


@given(st.floats(0.1, 100.0), st.floats(1e-4, math.pi / 2 - 1e-3))
def test_efd_exact_dominates_approx(d, h):
    exact, approx = efd_exact(d, h, 0.0), efd_approx(d, h)
    assert exact >= approx * (1 - 1e-12)
    if h <= 0.3:
        assert (exact - approx) / exact < 0.01


@given(st.floats(1e-3, 0.5), st.floats(0.0, 1.0), st.floats(1e-4, 0.3))
def test_efd_exact_increasing_in_incidence(h, t, dt):
    limit = math.pi / 2 - h / 2 - 1e-6
    t0 = t * limit
    t1 = min(t0 + dt, limit)
    if t1 <= t0:
        return
    assert efd_exact(5, h, t1) > efd_exact(5, h, t0)
    assert efd_exact(5, h, -t1) > efd_exact(5, h, -t0)
    assert efd_exact(5, h, -t1) == efd_exact(5, h, t1)


def test_side_length():
    assert sub_ris_side_length(10, LAM / 2) == pytest.approx(0.0535343675, abs=1e-9)
    assert sub_ris_side_length(1, 0.3) == 0.3
    assert sub_ris_side_length(20, LAM / 2) == pytest.approx(2 * sub_ris_side_length(10, LAM / 2))


def test_spacing_spot_values():
    _, efd, delta = footprint_spacing(10, 2.5, 10, LAM)
    assert efd == pytest.approx(0.4455, abs=1e-12)
    assert delta == pytest.approx(0.19598281625, abs=1e-9)
    _, efd, delta = footprint_spacing(10, 20.0, 10, LAM)
    assert efd == pytest.approx(3.564, abs=1e-12)
    assert delta == pytest.approx(1.75523281625, abs=1e-9)
    assert sub_ris_spacing(0.3, 0.3) == 0.0


def test_spacing_uses_exact_beyond_sixty_degrees():
    _, efd, _ = footprint_spacing(10, 2.5, 10, LAM, theta0=1.2)
    assert efd == pytest.approx(efd_exact(2.5, 0.1782, 1.2))
    _, efd, _ = footprint_spacing(10, 2.5, 10, LAM, theta0=0.5, exact=True)
    assert efd == pytest.approx(efd_exact(2.5, 0.1782, 0.5))


@given(st.integers(2, 60), st.floats(0.5, 50.0), st.integers(1, 40))
def test_spacing_decreases_with_bs_array(n, d, m):
    assert footprint_spacing(n + 1, d, m, LAM)[2] < footprint_spacing(n, d, m, LAM)[2]
