"""Closed-form performance expressions: pairwise error bounds, rate, power and complexity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal, NamedTuple

import numpy as np
from scipy.special import erfc

from .link import BeamformerPair, Constellation, LinkBudget, bit_errors, equivalent_channel

if TYPE_CHECKING:
    from .sim import Scenario


class Estimate(NamedTuple):
    "Monte Carlo sample mean and its standard error."

    mean: float
    stderr: float


def q_function(x):
    return 0.5 * erfc(np.asarray(x) / math.sqrt(2))


def cpep(
    s_star: complex,
    s_hat: complex,
    h_eff: np.ndarray,
    bf: BeamformerPair,
    budget: LinkBudget,
) -> float:
    """Probability of deciding ``s_hat`` over ``s_star`` for a known channel.

    A vanishing equivalent channel leaves the decision to noise alone and
    returns 1/2.
    """
    if s_star == s_hat:
        raise ValueError("pairwise error needs two distinct symbols")
    v = np.atleast_2d(h_eff) @ bf.f_t * (s_star - s_hat)
    proj = complex(bf.f_r.conj() @ v)
    denom = math.sqrt(2) * budget.sigma * np.linalg.norm(bf.f_r * proj)
    if denom == 0.0:
        return 0.5
    return float(q_function(budget.signal_scale * abs(proj) ** 2 / denom))


def cpep_batch(heq, delta: complex, budget: LinkBudget) -> np.ndarray:
    """CPEP for an array of scalar equivalent channels ``f_r^H H f_t``.

    With a unit-norm combiner the ratio in the full expression reduces to
    ``|heq * delta|``.
    """
    arg = budget.signal_scale * np.abs(np.asarray(heq) * delta) / (math.sqrt(2) * budget.sigma)
    return q_function(arg)


def _estimate(samples: np.ndarray) -> Estimate:
    n = samples.size
    stderr = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Estimate(float(samples.mean()), stderr)


def upep_from_channels(s_star: complex, s_hat: complex, heq, budget: LinkBudget) -> Estimate:
    if s_star == s_hat:
        raise ValueError("pairwise error needs two distinct symbols")
    return _estimate(cpep_batch(heq, s_star - s_hat, budget))


def upep(
    s_star: complex,
    s_hat: complex,
    scenario: "Scenario",
    n_realizations: int,
    rng: np.random.Generator,
    tx_power: float | None = None,
) -> Estimate:
    """Average CPEP over ``n_realizations`` independent channel draws of ``scenario``."""
    from .sim import draw_equivalent_channels

    if n_realizations < 1:
        raise ValueError("need at least one realization")
    heq = draw_equivalent_channels(scenario, n_realizations, rng)
    return upep_from_channels(s_star, s_hat, heq, scenario.budget(tx_power))


def upep_table(cons: Constellation, heq, budget: LinkBudget) -> tuple[np.ndarray, np.ndarray]:
    """UPEP means and standard errors for every ordered pair; the diagonal is zero."""
    m = cons.order
    means, errs = np.zeros((m, m)), np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if i != j:
                means[i, j], errs[i, j] = upep_from_channels(cons.points[i], cons.points[j], heq, budget)
    return means, errs


def aber_union_bound(cons: Constellation, upep_table: np.ndarray) -> float:
    """Bit-weighted union bound on the average bit error rate."""
    table = np.asarray(upep_table, dtype=float)
    if table.shape != (cons.order, cons.order):
        raise ValueError(f"UPEP table must be {cons.order}x{cons.order}, got {table.shape}")
    i, j = np.meshgrid(np.arange(cons.order), np.arange(cons.order), indexing="ij")
    weights = bit_errors(i, j, cons)
    np.fill_diagonal(table, 0.0)
    return float((weights * table).sum() / (cons.bits_per_symbol * cons.order))


def snr(h_eff: np.ndarray, bf: BeamformerPair, budget: LinkBudget) -> float:
    heq = equivalent_channel(h_eff, bf)
    return abs(budget.signal_scale * heq) ** 2 / budget.noise_variance


def snr_batch(heq, budget: LinkBudget) -> np.ndarray:
    return np.abs(budget.signal_scale * np.asarray(heq)) ** 2 / budget.noise_variance


def rate_from_snr(snr_values) -> Estimate:
    return _estimate(np.log2(1.0 + np.asarray(snr_values, dtype=float)))


def achievable_rate(
    scenario: "Scenario",
    n_realizations: int,
    rng: np.random.Generator,
    tx_power: float | None = None,
) -> Estimate:
    """Ergodic rate ``E[log2(1 + SNR)]`` in bits/s/Hz with its standard error."""
    from .sim import draw_equivalent_channels

    if n_realizations < 1:
        raise ValueError("need at least one realization")
    heq = draw_equivalent_channels(scenario, n_realizations, rng)
    return rate_from_snr(snr_batch(heq, scenario.budget(tx_power)))


@dataclass(frozen=True)
class PowerModel:
    """Hardware power figures in watts; defaults follow the reference setup.

    ``f_s`` is the converter sampling rate (Nyquist, twice the 100 MHz band).
    """

    p_pa: float = 20e-3
    p_ps: float = 30e-3
    p_rf_chain: float = 40e-3
    p_bb: float = 200e-3
    p_lna: float = 20e-3
    p_pa_ris: float = 10e-3
    fom_w: float = 46.1e-15
    f_s: float = 2e8
    bits_transceiver: int = 4
    bits_ris: int = 1
    n_rf: int = 1
    active_fraction_ris: float = 0.08

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
        if self.active_fraction_ris > 1:
            raise ValueError("active_fraction_ris must lie in [0, 1]")


def adc_power(model: PowerModel, bits: int) -> float:
    "Walden figure-of-merit converter power; DACs use the same figure."
    if bits < 1:
        raise ValueError(f"converter needs at least one bit, got {bits}")
    return model.fom_w * model.f_s * 2**bits


def power_tx(model: PowerModel, n_t: int, p_transmit: float) -> float:
    p_dac = adc_power(model, model.bits_transceiver)
    return (
        p_transmit
        + n_t * model.p_pa
        + model.n_rf * (n_t * model.p_ps + model.p_rf_chain + 2 * p_dac)
        + model.p_bb
    )


def power_rx(model: PowerModel, n_r: int) -> float:
    p_adc = adc_power(model, model.bits_transceiver)
    return n_r * model.p_lna + model.n_rf * (n_r * model.p_ps + model.p_rf_chain + 2 * p_adc) + model.p_bb


def active_elements(model: PowerModel, m: int) -> int:
    "Baseband-connected elements: nearest integer, at least one when the fraction is positive."
    if model.active_fraction_ris == 0:
        return 0
    return max(1, math.floor(model.active_fraction_ris * m + 0.5))


def power_ris_passive(model: PowerModel, m: int) -> float:
    if m < 0:
        raise ValueError("element count must be nonnegative")
    return m * model.p_pa_ris


def power_ris_semi(model: PowerModel, m: int) -> float:
    p_adc = adc_power(model, model.bits_ris)
    m_active = active_elements(model, m)
    return (
        power_ris_passive(model, m)
        + m_active * (model.p_lna + model.p_rf_chain + 2 * p_adc)
        + model.p_bb
    )


def energy_efficiency(rate: float, bandwidth: float, p_c: float) -> float:
    "Delivered bits per joule."
    if not p_c > 0:
        raise ValueError(f"consumed power must be positive, got {p_c}")
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    return rate * bandwidth / p_c


@dataclass(frozen=True)
class ComplexityParams:
    m_ris: int
    n_t: int
    n_r: int
    m_ary: int

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value}")


def detector_complexity(params: ComplexityParams, scheme: Literal["semi_passive", "plug_in"]) -> int:
    """Leading-order operation count of the ML detector.

    The semi-passive receiver rebuilds ``R Psi G`` for every hypothesis; the
    plug-in receiver works directly on the measured end-to-end channel.
    """
    p = params
    if scheme == "semi_passive":
        return p.m_ary * p.m_ris * p.n_t * (p.m_ris + p.n_r)
    if scheme == "plug_in":
        return p.m_ary * p.n_r * p.n_t
    raise ValueError(f"unknown detector scheme {scheme!r}")
