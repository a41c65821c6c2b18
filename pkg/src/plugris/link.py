"""Modulation, the combined received-signal model and ML detection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

GainMode = Literal["amplitude", "power"]
SUPPORTED_ORDERS = (2, 4, 8, 16)


@dataclass(frozen=True)
class Constellation:
    """Gray-labelled M-PSK alphabet with unit average energy.

    ``labels[i]`` is the integer bit label of ``points[i]``; point ``i`` sits
    at phase ``2*pi*i/M`` so neighbouring indices are neighbouring points.
    """

    order: int
    points: np.ndarray
    labels: np.ndarray

    @property
    def bits_per_symbol(self) -> int:
        return int(round(math.log2(self.order)))

    @property
    def bit_labels(self) -> list[str]:
        return [format(int(v), f"0{self.bits_per_symbol}b") for v in self.labels]


def psk(order: int) -> Constellation:
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported PSK order {order}; choose from {SUPPORTED_ORDERS}")
    i = np.arange(order)
    points = np.exp(2j * np.pi * i / order)
    if order == 2:
        points = np.array([1.0 + 0j, -1.0 + 0j])
    return Constellation(order, points, i ^ (i >> 1))


def bpsk() -> Constellation:
    return psk(2)


def bit_errors(i, j, cons: Constellation):
    "Hamming distance between the bit labels of symbols ``i`` and ``j`` (vectorized)."
    x = np.bitwise_xor(cons.labels[i], cons.labels[j])
    counts = np.zeros_like(x)
    for b in range(cons.bits_per_symbol):
        counts = counts + ((x >> b) & 1)
    return counts if np.ndim(counts) else int(counts)


def array_gain_db(g_e: float, n: int) -> float:
    if n < 1:
        raise ValueError(f"array needs at least one element, got {n}")
    return g_e + 10 * math.log10(n)


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power, noise and array gains entering the signal term.

    ``gain_mode`` selects how the dB array gains become the multiplicative
    factors of the received signal: ``"amplitude"`` uses ``10^(G/20)``,
    ``"power"`` uses ``10^(G/10)``.
    """

    tx_power: float
    noise_variance: float
    g_element: float = 0.0
    array_gain_tx: float = 0.0
    array_gain_rx: float = 0.0
    gain_mode: GainMode = "amplitude"

    def __post_init__(self) -> None:
        if not self.tx_power > 0:
            raise ValueError(f"tx_power must be positive, got {self.tx_power}")
        if not self.noise_variance > 0:
            raise ValueError(f"noise_variance must be positive, got {self.noise_variance}")
        if self.gain_mode not in ("amplitude", "power"):
            raise ValueError(f"unknown gain_mode {self.gain_mode!r}")

    @property
    def _divisor(self) -> float:
        return 20.0 if self.gain_mode == "amplitude" else 10.0

    @property
    def gain_tx(self) -> float:
        return 10 ** (self.array_gain_tx / self._divisor)

    @property
    def gain_rx(self) -> float:
        return 10 ** (self.array_gain_rx / self._divisor)

    @property
    def signal_scale(self) -> float:
        "The factor ``sqrt(P) G_t G_r`` multiplying the equivalent channel."
        return math.sqrt(self.tx_power) * self.gain_tx * self.gain_rx

    @property
    def sigma(self) -> float:
        return math.sqrt(self.noise_variance)


@dataclass(frozen=True)
class BeamformerPair:
    f_t: np.ndarray
    f_r: np.ndarray

    def __post_init__(self) -> None:
        for name in ("f_t", "f_r"):
            v = getattr(self, name)
            if abs(np.linalg.norm(v) - 1.0) > 1e-9:
                raise ValueError(f"{name} must have unit norm")


def equivalent_channel(h_eff: np.ndarray, bf: BeamformerPair) -> complex:
    "Scalar ``f_r^H H_eff f_t``."
    h_eff = np.atleast_2d(h_eff)
    if h_eff.shape != (bf.f_r.size, bf.f_t.size):
        raise ValueError(
            f"dimension mismatch: H {h_eff.shape} vs f_r {bf.f_r.size}, f_t {bf.f_t.size}"
        )
    return complex(bf.f_r.conj() @ h_eff @ bf.f_t)


def complex_noise(variance: float, rng: np.random.Generator, size) -> np.ndarray:
    return math.sqrt(variance / 2) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def received_symbol(
    h_eff: np.ndarray,
    bf: BeamformerPair,
    s: complex,
    budget: LinkBudget,
    rng: np.random.Generator,
) -> complex:
    """Combiner output for one transmitted symbol.

    Noise is drawn per receive antenna and passed through the combiner.
    """
    heq = equivalent_channel(h_eff, bf)
    n = complex_noise(budget.noise_variance, rng, bf.f_r.size)
    return complex(budget.signal_scale * heq * s + bf.f_r.conj() @ n)


def detect(y, scaled_heq, points: np.ndarray) -> np.ndarray:
    """Batched ML decision: nearest hypothesis ``scaled_heq * s`` to each ``y``.

    ``np.argmin`` returns the first minimum, so ties go to the lowest index.
    """
    y = np.asarray(y)
    hyp = np.asarray(scaled_heq)[..., None] * points
    return np.argmin(np.abs(y[..., None] - hyp) ** 2, axis=-1)


def ml_detect(
    y: complex,
    h_eff: np.ndarray,
    bf: BeamformerPair,
    budget: LinkBudget,
    cons: Constellation,
) -> int:
    heq = equivalent_channel(h_eff, bf)
    return int(detect(y, budget.signal_scale * heq, cons.points))
