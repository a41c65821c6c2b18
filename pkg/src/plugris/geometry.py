"""Array responses and beam-footprint geometry for uniform rectangular arrays."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0
"Speed of light in m/s."

HPBW_FACTOR = 0.891


class GeometryDomainError(ValueError):
    """Raised when a footprint is evaluated outside its valid angular domain."""


def wavelength(f_c_hz: float) -> float:
    "Wavelength in meters for a carrier frequency in Hz."
    if f_c_hz <= 0:
        raise ValueError(f"carrier frequency must be positive, got {f_c_hz}")
    return SPEED_OF_LIGHT / f_c_hz


@dataclass(frozen=True)
class UraGeometry:
    """Uniform rectangular array layout.

    Element ``n = n_y * n_x_count + n_x`` sits at ``(n_x * spacing_x, n_y * spacing_y)``.
    """

    n_x: int
    n_y: int
    spacing_x: float
    spacing_y: float
    wavelength: float

    def __post_init__(self) -> None:
        if int(self.n_x) != self.n_x or int(self.n_y) != self.n_y:
            raise ValueError("element counts must be integers")
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError(f"element counts must be >= 1, got {self.n_x}x{self.n_y}")
        if not (self.spacing_x > 0 and self.spacing_y > 0):
            raise ValueError("element spacings must be positive")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")

    @classmethod
    def half_wavelength(cls, n_x: int, n_y: int, wavelength: float) -> "UraGeometry":
        return cls(n_x, n_y, wavelength / 2, wavelength / 2, wavelength)

    @property
    def n(self) -> int:
        return self.n_x * self.n_y

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_y)

    def positions(self) -> np.ndarray:
        "Element positions as an ``(N, 2)`` array in the flattened element order."
        ny, nx = np.meshgrid(np.arange(self.n_y), np.arange(self.n_x), indexing="ij")
        return np.column_stack([nx.ravel() * self.spacing_x, ny.ravel() * self.spacing_y])


@dataclass(frozen=True)
class AnglePair:
    """Azimuth and elevation in radians.

    Elevation is measured from the array broadside, so ``elevation = 0`` is the
    array normal and the wave vector vanishes there.
    """

    azimuth: float
    elevation: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.azimuth) and math.isfinite(self.elevation)):
            raise ValueError(f"angles must be finite, got {self}")
        if abs(self.azimuth) > math.pi + 1e-12:
            raise ValueError(f"azimuth {self.azimuth} outside [-pi, pi]")
        if abs(self.elevation) > math.pi / 2 + 1e-12:
            raise ValueError(f"elevation {self.elevation} outside [-pi/2, pi/2]")

    @classmethod
    def from_degrees(cls, azimuth: float, elevation: float) -> "AnglePair":
        return cls(math.radians(azimuth), math.radians(elevation))

    def direction(self) -> np.ndarray:
        return direction_vectors(self.azimuth, self.elevation)


def direction_vectors(azimuth, elevation) -> np.ndarray:
    "Unit propagation directions, shape ``(..., 3)``."
    az = np.asarray(azimuth, dtype=float)
    el = np.asarray(elevation, dtype=float)
    s = np.sin(el)
    return np.stack([s * np.cos(az), s * np.sin(az), np.cos(el)], axis=-1)


def wave_vector(angles: AnglePair, wavelength: float) -> np.ndarray:
    "In-plane wave vector ``2*pi/lambda * [sin(el)cos(az), sin(el)sin(az)]``."
    s = math.sin(angles.elevation)
    k = 2 * math.pi / wavelength
    return np.array([k * s * math.cos(angles.azimuth), k * s * math.sin(angles.azimuth)])


def ura_axis_phasors(geom: UraGeometry, azimuth, elevation) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis phasors ``exp(j k_x n_x dx)`` and ``exp(j k_y n_y dy)``.

    Shapes are ``(..., N_x)`` and ``(..., N_y)``; the full unnormalized
    response is their outer product.
    """
    az = np.asarray(azimuth, dtype=float)
    el = np.asarray(elevation, dtype=float)
    if not (np.all(np.isfinite(az)) and np.all(np.isfinite(el))):
        raise ValueError("angles must be finite")
    k = 2 * np.pi / geom.wavelength
    s = np.sin(el)
    kx = (k * s * np.cos(az))[..., None]
    ky = (k * s * np.sin(az))[..., None]
    px = np.exp(1j * kx * (np.arange(geom.n_x) * geom.spacing_x))
    py = np.exp(1j * ky * (np.arange(geom.n_y) * geom.spacing_y))
    return px, py


def ura_phasors(geom: UraGeometry, azimuth, elevation) -> np.ndarray:
    """Unnormalized array phasors ``exp(j k^T p_n)`` for many directions at once.

    ``azimuth`` and ``elevation`` broadcast together; the element axis is
    appended last. The per-axis phasors are combined by an outer product, which
    is exact because ``k^T p_n`` is separable in ``n_x`` and ``n_y``.
    """
    px, py = ura_axis_phasors(geom, azimuth, elevation)
    out = py[..., :, None] * px[..., None, :]
    return out.reshape(out.shape[:-2] + (geom.n,))


def ura_response_batch(geom: UraGeometry, azimuth, elevation) -> np.ndarray:
    "Normalized steering vectors for arrays of angles, shape ``(..., N)``."
    return ura_phasors(geom, azimuth, elevation) / math.sqrt(geom.n)


def ura_response(geom: UraGeometry, angles: AnglePair) -> np.ndarray:
    """Unit-norm steering vector of a URA toward ``angles``.

    Entry ``n`` equals ``exp(j k^T p_n) / sqrt(N)``.
    """
    k = wave_vector(angles, geom.wavelength)
    return np.exp(1j * (geom.positions() @ k)) / math.sqrt(geom.n)


def hpbw(n_axis: int, spacing: float, wavelength: float) -> float:
    "Half-power beamwidth in radians along one array axis."
    if n_axis <= 0 or spacing <= 0 or wavelength <= 0:
        raise ValueError("hpbw inputs must be positive")
    return HPBW_FACTOR * wavelength / (n_axis * spacing)


def efd_exact(d: float, hpbw: float, theta0: float) -> float:
    """Effective footprint diameter of a beam landing at incidence ``theta0``.

    ``theta0`` is measured from the surface broadside; only its magnitude
    matters.

    Raises
    ------
    GeometryDomainError
        If the beam edge grazes the surface, i.e. ``cos(hpbw/2 + theta0) <= 0``.
    """
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    edge = hpbw / 2 + abs(theta0)
    if edge >= math.pi / 2:
        raise GeometryDomainError(f"beam grazes the surface: hpbw/2 + |theta0| = {edge:.6g} rad")
    return 2 * d * math.sin(hpbw / 2) / math.cos(edge)


def efd_approx(d: float, hpbw: float) -> float:
    "Small-beamwidth footprint diameter at normal incidence."
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    return hpbw * d


def sub_ris_side_length(m_axis: int, spacing: float) -> float:
    if m_axis <= 0 or spacing <= 0:
        raise ValueError("sub-RIS side inputs must be positive")
    return m_axis * spacing


def sub_ris_spacing(efd: float, iota: float) -> float:
    """Edge-to-edge gap between neighbouring sub-RISs.

    Negative values mean the footprint is already smaller than the panel.
    """
    return (efd - iota) / 2


def deployable_spacing(delta: float) -> float:
    return max(delta, 0.0)


def footprint_spacing(
    n_t_axis: int,
    d: float,
    m_axis: int,
    wavelength: float,
    *,
    bs_spacing: float | None = None,
    ris_spacing: float | None = None,
    theta0: float = 0.0,
    exact: bool = False,
) -> tuple[float, float, float]:
    """Compose beamwidth, footprint and sub-RIS spacing for one array axis.

    The small-angle footprint is used while ``|theta0| <= pi/3`` unless
    ``exact`` is set; larger incidence angles always use the exact form.

    Returns
    -------
    (hpbw, efd, delta)
    """
    bs_spacing = wavelength / 2 if bs_spacing is None else bs_spacing
    ris_spacing = wavelength / 2 if ris_spacing is None else ris_spacing
    bw = hpbw(n_t_axis, bs_spacing, wavelength)
    if exact or abs(theta0) > math.pi / 3:
        efd = efd_exact(d, bw, theta0)
    else:
        efd = efd_approx(d, bw)
    iota = sub_ris_side_length(m_axis, ris_spacing)
    return bw, efd, sub_ris_spacing(efd, iota)
