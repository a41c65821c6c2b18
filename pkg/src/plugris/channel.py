"""Single-path LOS channels, path loss and RIS phase-shift profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AnglePair, UraGeometry, ura_phasors, ura_response


@dataclass(frozen=True)
class PathLossParams:
    "Close-in path-loss parameters; ``f_c`` is in GHz."

    a: float
    b: float
    f_c: float

    def __post_init__(self) -> None:
        if not self.b > 0:
            raise ValueError(f"path-loss exponent coefficient must be positive, got {self.b}")
        if not self.f_c > 0:
            raise ValueError(f"carrier frequency must be positive, got {self.f_c}")


def pathloss_db(d: float, params: PathLossParams) -> float:
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    return params.a + 10 * params.b * math.log10(d) + 20 * math.log10(params.f_c)


def gain_variance(pl_db: float) -> float:
    return 10 ** (-0.1 * pl_db)


def sample_gain(pl_db: float, rng: np.random.Generator, size=None):
    """Draw circularly-symmetric complex Gaussian gains with variance ``10^(-PL/10)``.

    Returns a Python complex when ``size`` is None, otherwise an array.
    """
    scale = math.sqrt(gain_variance(pl_db) / 2)
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    if size is None:
        return complex(scale * z)
    return scale * z


@dataclass(frozen=True)
class LosChannel:
    matrix: np.ndarray
    gain: complex
    aod: AnglePair
    aoa: AnglePair


def los_channel(
    tx_geom: UraGeometry,
    rx_geom: UraGeometry,
    gain: complex,
    aod: AnglePair,
    aoa: AnglePair,
) -> LosChannel:
    """Rank-one LOS channel ``sqrt(N_tx N_rx) * gain * a_rx(aoa) a_tx(aod)^H``."""
    a_tx = ura_response(tx_geom, aod)
    a_rx = ura_response(rx_geom, aoa)
    h = math.sqrt(tx_geom.n * rx_geom.n) * gain * np.outer(a_rx, a_tx.conj())
    return LosChannel(h, complex(gain), aod, aoa)


@dataclass(frozen=True)
class PhaseProfile:
    "Per-element reflection phases in radians, wrapped to ``[0, 2*pi)``."

    phases: np.ndarray

    @property
    def m(self) -> int:
        return self.phases.shape[-1]

    @property
    def coefficients(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.coefficients)


def _wrap(phases: np.ndarray) -> np.ndarray:
    w = np.mod(phases, 2 * np.pi)
    # mod of a tiny negative value rounds up to exactly 2*pi
    return np.where(w >= 2 * np.pi, 0.0, w)


def fixed_beam_coefficients(geom: UraGeometry, incident_az, incident_el, beam_az, beam_el) -> np.ndarray:
    """Reflection coefficients ``sqrt(M) * f_b * conj(a(incident))``, broadcast over angles.

    ``f_b`` carries no normalization, so every coefficient has unit modulus.
    """
    f_b = ura_phasors(geom, beam_az, beam_el)
    a_inc = ura_phasors(geom, incident_az, incident_el) / math.sqrt(geom.n)
    return math.sqrt(geom.n) * f_b * a_inc.conj()


def fixed_beam_profile(sub_ris_geom: UraGeometry, incident: AnglePair, beam: AnglePair) -> PhaseProfile:
    """Pre-configured profile that redirects a wave from ``incident`` toward ``beam``."""
    c = fixed_beam_coefficients(
        sub_ris_geom, incident.azimuth, incident.elevation, beam.azimuth, beam.elevation
    )
    return PhaseProfile(_wrap(np.angle(c)))


def optimal_profile(sub_ris_geom: UraGeometry, incident: AnglePair, departure: AnglePair) -> PhaseProfile:
    """Matched profile of a semi-passive RIS: the fixed-beam construction aimed at the true UE direction."""
    return fixed_beam_profile(sub_ris_geom, incident, departure)


def random_profile(m: int, rng: np.random.Generator) -> PhaseProfile:
    if m < 1:
        raise ValueError(f"profile needs at least one element, got {m}")
    return PhaseProfile(rng.uniform(0.0, 2 * np.pi, m))


def effective_channel(r: LosChannel, psi: PhaseProfile, g: LosChannel) -> np.ndarray:
    "End-to-end channel ``R Psi G`` through one sub-RIS."
    m = psi.m
    if r.matrix.shape[1] != m or g.matrix.shape[0] != m:
        raise ValueError(
            f"dimension mismatch: R {r.matrix.shape}, Psi {m}x{m}, G {g.matrix.shape}"
        )
    return (r.matrix * psi.coefficients[None, :]) @ g.matrix
