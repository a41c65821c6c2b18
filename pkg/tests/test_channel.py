import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plugris.channel import (
    PathLossParams,
    PhaseProfile,
    effective_channel,
    fixed_beam_profile,
    gain_variance,
    los_channel,
    optimal_profile,
    pathloss_db,
    random_profile,
    sample_gain,
)
from plugris.geometry import AnglePair, UraGeometry, ura_response, wavelength

LAM = wavelength(28e9)
INDOOR = PathLossParams(32.4, 1.73, 28.0)
OUTDOOR = PathLossParams(32.4, 2.1, 28.0)

angles = st.builds(
    AnglePair,
    st.floats(-math.pi, math.pi),
    st.floats(-math.pi / 2, math.pi / 2),
)
small_shapes = st.tuples(st.integers(1, 6), st.integers(1, 6))


def ura(nx, ny):
    return UraGeometry.half_wavelength(nx, ny, LAM)


def test_pathloss_values():
    assert pathloss_db(1.0, INDOOR) == pytest.approx(61.34316062684438, abs=1e-9)
    assert pathloss_db(2.5, INDOOR) == pytest.approx(68.22752277687063, abs=1e-9)
    assert pathloss_db(20.0, OUTDOOR) == pytest.approx(88.66479053578799, abs=1e-9)
    with pytest.raises(ValueError):
        pathloss_db(0.0, INDOOR)


def test_gain_variance_value():
    assert gain_variance(68.2271) == pytest.approx(1.5041460238446293e-07, rel=1e-9)


def test_sample_gain_unit_variance():
    rng = np.random.default_rng(7)
    g = sample_gain(0.0, rng, 10**6)
    p = np.abs(g) ** 2
    assert 0.995 <= p.mean() <= 1.005
    # within 3 standard errors as well
    assert abs(p.mean() - 1.0) < 3 * p.std() / math.sqrt(p.size)


def test_sample_gain_pathloss_variance():
    rng = np.random.default_rng(8)
    pl = pathloss_db(2.5, INDOOR)
    p = np.abs(sample_gain(pl, rng, 10**6)) ** 2
    assert abs(p.mean() - gain_variance(pl)) < 3 * p.std() / math.sqrt(p.size)


def test_sample_gain_deterministic():
    a = [sample_gain(10.0, np.random.default_rng(3)) for _ in range(2)]
    assert a[0] == a[1]
    assert isinstance(a[0], complex)


def test_los_channel_scalar():
    h = los_channel(ura(1, 1), ura(1, 1), 1.0, AnglePair(0.3, 0.2), AnglePair(-1.0, 0.5))
    np.testing.assert_allclose(h.matrix, [[1.0 + 0j]], atol=1e-15)


def test_los_channel_frobenius_and_rank():
    h = los_channel(ura(10, 10), ura(10, 10), 1.0, AnglePair(0.3, 0.2), AnglePair(-1.0, 0.5))
    assert np.linalg.norm(h.matrix) == pytest.approx(100.0, rel=1e-9)
    s = np.linalg.svd(h.matrix, compute_uv=False)
    assert s[1] < 1e-9 * s[0]


def test_los_channel_entries_bruteforce():
    rng = np.random.default_rng(11)
    tx, rx = ura(4, 3), ura(2, 5)
    aod, aoa = AnglePair(0.4, -0.3), AnglePair(2.0, 1.1)
    gain = 0.3 - 0.7j
    h = los_channel(tx, rx, gain, aod, aoa).matrix
    a_tx, a_rx = ura_response(tx, aod), ura_response(rx, aoa)
    for _ in range(20):
        m, n = rng.integers(rx.n), rng.integers(tx.n)
        expected = math.sqrt(tx.n * rx.n) * gain * a_rx[m] * np.conj(a_tx[n])
        assert h[m, n] == pytest.approx(expected, abs=1e-12)


@given(small_shapes, angles, angles)
@settings(max_examples=60)
def test_fixed_beam_unit_modulus(shape, inc, beam):
    prof = fixed_beam_profile(ura(*shape), inc, beam)
    np.testing.assert_allclose(np.abs(np.diag(prof.matrix)), 1.0, atol=1e-12)
    assert np.all((prof.phases >= 0) & (prof.phases < 2 * np.pi))


def test_fixed_beam_self_cancellation():
    ang = AnglePair(0.9, 0.4)
    prof = fixed_beam_profile(ura(10, 10), ang, ang)
    np.testing.assert_allclose(np.exp(1j * prof.phases), 1.0, atol=1e-12)


def test_fixed_beam_phase_difference():
    geom = ura(3, 4)
    inc, beam = AnglePair(0.2, 0.5), AnglePair(-2.0, 0.1)
    prof = fixed_beam_profile(geom, inc, beam)
    k = lambda a: 2 * math.pi / LAM * math.sin(a.elevation) * np.array(
        [math.cos(a.azimuth), math.sin(a.azimuth)]
    )
    expected = geom.positions() @ (k(beam) - k(inc))
    np.testing.assert_allclose(np.exp(1j * prof.phases), np.exp(1j * expected), atol=1e-12)


def test_matched_profile_gives_full_reflection_gain():
    # a_tris^H Psi a_rris sums M aligned phasors of weight 1/M each
    geom = ura(10, 10)
    inc, dep = AnglePair(-1.3, 0.8), AnglePair(2.4, 0.15)
    prof = fixed_beam_profile(geom, inc, dep)
    a_r, a_t = ura_response(geom, inc), ura_response(geom, dep)
    terms = np.conj(a_t) * prof.coefficients * a_r
    np.testing.assert_allclose(terms, terms[0], atol=1e-12)
    assert abs(terms.sum()) == pytest.approx(1.0, abs=1e-12)


def _e2e(bs, ris, ue, alpha, beta, aod_bs, aoa_ris, aod_ris, aoa_ue, prof):
    g = los_channel(bs, ris, alpha, aod_bs, aoa_ris)
    r = los_channel(ris, ue, beta, aod_ris, aoa_ue)
    h = effective_channel(r, prof, g)
    f_t, f_r = ura_response(bs, aod_bs), ura_response(ue, aoa_ue)
    return f_r.conj() @ h @ f_t


@given(angles, angles, angles, angles, st.integers(1, 4), st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_coherent_gain_identity(aod_bs, aoa_ris, aod_ris, aoa_ue, mx, my):
    bs, ris, ue = ura(3, 2), ura(mx, my), ura(2, 1)
    alpha, beta = 0.3 + 0.4j, -1.2 + 0.1j
    prof = optimal_profile(ris, aoa_ris, aod_ris)
    v = _e2e(bs, ris, ue, alpha, beta, aod_bs, aoa_ris, aod_ris, aoa_ue, prof)
    expected = math.sqrt(bs.n * ue.n) * ris.n * abs(alpha * beta)
    assert abs(v) == pytest.approx(expected, rel=1e-9)
    # any fixed beam does no better than the matched one
    fixed = fixed_beam_profile(ris, aoa_ris, AnglePair(math.pi / 2, math.pi / 32))
    w = _e2e(bs, ris, ue, alpha, beta, aod_bs, aoa_ris, aod_ris, aoa_ue, fixed)
    assert abs(w) <= expected * (1 + 1e-9)


def test_optimal_equals_fixed_when_beam_matches():
    geom = ura(5, 5)
    inc, dep = AnglePair(0.1, 0.2), AnglePair(np.pi / 2, np.pi / 32)
    np.testing.assert_allclose(
        optimal_profile(geom, inc, dep).phases, fixed_beam_profile(geom, inc, dep).phases
    )
    flipped = AnglePair(-np.pi / 2, np.pi / 32)
    assert not np.allclose(
        optimal_profile(geom, inc, flipped).coefficients, optimal_profile(geom, inc, dep).coefficients
    )


def test_random_profile():
    prof = random_profile(10**6, np.random.default_rng(5))
    assert abs(prof.coefficients.mean()) < 0.01
    np.testing.assert_allclose(np.abs(prof.coefficients), 1.0, atol=1e-12)
    again = random_profile(10**6, np.random.default_rng(5))
    np.testing.assert_array_equal(prof.phases, again.phases)
    with pytest.raises(ValueError):
        random_profile(0, np.random.default_rng(0))


def test_effective_channel_identity_profile():
    bs, ris, ue = ura(2, 2), ura(3, 1), ura(2, 1)
    g = los_channel(bs, ris, 0.5j, AnglePair(0.1, 0.2), AnglePair(0.3, 0.4))
    r = los_channel(ris, ue, 1.5, AnglePair(0.5, 0.6), AnglePair(0.7, 0.8))
    np.testing.assert_allclose(
        effective_channel(r, PhaseProfile(np.zeros(3)), g), r.matrix @ g.matrix, atol=1e-14
    )


def test_effective_channel_scalar_case():
    one = ura(1, 1)
    alpha, beta, psi = 0.3 - 0.2j, 1.1 + 0.5j, 0.77
    g = los_channel(one, one, alpha, AnglePair(0.0, 0.0), AnglePair(0.0, 0.0))
    r = los_channel(one, one, beta, AnglePair(0.0, 0.0), AnglePair(0.0, 0.0))
    h = effective_channel(r, PhaseProfile(np.array([psi])), g)
    assert h[0, 0] == pytest.approx(alpha * beta * np.exp(1j * psi), abs=1e-15)


@given(angles, angles, angles, angles)
@settings(max_examples=30, deadline=None)
def test_effective_channel_rank_one(a1, a2, a3, a4):
    bs, ris, ue = ura(3, 3), ura(4, 2), ura(2, 2)
    g = los_channel(bs, ris, 1e-3 + 2e-3j, a1, a2)
    r = los_channel(ris, ue, 2e-3, a3, a4)
    prof = random_profile(ris.n, np.random.default_rng(1))
    s = np.linalg.svd(effective_channel(r, prof, g), compute_uv=False)
    assert s[1] <= 1e-9 * s[0] or s[0] == 0


def test_effective_channel_dimension_mismatch():
    bs, ris, ue = ura(2, 2), ura(3, 1), ura(2, 1)
    g = los_channel(bs, ris, 1, AnglePair(0, 0), AnglePair(0, 0))
    r = los_channel(ris, ue, 1, AnglePair(0, 0), AnglePair(0, 0))
    with pytest.raises(ValueError):
        effective_channel(r, PhaseProfile(np.zeros(4)), g)
