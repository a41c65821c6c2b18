"""Scenario presets and the Monte Carlo engine for ABER, rate and energy-efficiency sweeps.

Every random quantity comes from a substream keyed by ``(seed, stream tag,
grid point, chunk)``. Chunks have a fixed size, so results do not depend on
how many worker threads process them. Link draws (angles, gains, symbols and
noise) and scheme draws (blind phases) use separate tags, which pairs the
channel samples seen by different schemes at the same seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from . import analysis
from .analysis import PowerModel
from .channel import (
    PathLossParams,
    PhaseProfile,
    effective_channel,
    fixed_beam_profile,
    los_channel,
    optimal_profile,
    pathloss_db,
    random_profile,
    sample_gain,
)
from .geometry import (
    AnglePair,
    UraGeometry,
    direction_vectors,
    ura_axis_phasors,
    ura_response_batch,
    wavelength,
)
from .link import (
    BeamformerPair,
    Constellation,
    LinkBudget,
    array_gain_db,
    bit_errors,
    complex_noise,
    detect,
    ml_detect,
    psk,
    received_symbol,
)

SchemeKind = Literal["plug_in", "semi_passive", "blind"]

DEFAULT_CHUNK = 4096
DEFAULT_TRIALS = 100_000
DEFAULT_REALIZATIONS = 10_000
SEGMENT_ELEVATION = math.pi / 32

# substream tags
_ABER_LINK, _ABER_SCHEME, _BOUND_LINK, _BOUND_SCHEME, _RATE_LINK, _RATE_SCHEME = range(6)


def default_power_grid() -> list[float]:
    return [float(p) for p in range(-30, 31, 2)]


def dbm_to_watts(p_dbm: float) -> float:
    return 10 ** ((p_dbm - 30) / 10)


def substream(seed: int, *key: int) -> np.random.Generator:
    "Independent generator for ``key`` under ``seed``."
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def segment_beams(k: int) -> list[AnglePair]:
    """Fixed-beam departure directions for ``k`` azimuth segments of the dead zone.

    ``k = 2`` and ``k = 4`` return the reference beam sets; other counts split
    ``[-pi, pi]`` into equal sectors and aim at each sector centre.
    """
    if k < 1:
        raise ValueError(f"need at least one segment, got {k}")
    p, el = math.pi, SEGMENT_ELEVATION
    if k == 2:
        return [AnglePair(p / 2, el), AnglePair(-p / 2, el)]
    if k == 4:
        return [AnglePair(p / 4, el), AnglePair(3 * p / 4, el), AnglePair(-p / 4, el), AnglePair(-3 * p / 4, el)]
    return [AnglePair(-p + (2 * i + 1) * p / k, el) for i in range(k)]


def _assign(azimuth, elevation, beams: Sequence[AnglePair]) -> np.ndarray:
    b = direction_vectors([x.azimuth for x in beams], [x.elevation for x in beams])
    u = direction_vectors(azimuth, elevation)
    # smallest angle between unit vectors = largest dot product; argmax keeps the first tie
    return np.argmax(u @ b.T, axis=-1)


def assign_sub_ris(ue_departure: AnglePair, beams: Sequence[AnglePair]) -> int:
    "Index of the fixed beam closest in angle to the UE direction; ties go to the lowest index."
    if not beams:
        raise ValueError("beam list is empty")
    return int(_assign(ue_departure.azimuth, ue_departure.elevation, beams))


@dataclass(frozen=True)
class Scheme:
    """RIS operating mode.

    ``plug_in`` serves each user through one of ``len(beams)`` pre-configured
    sub-RISs of the scenario's sub-RIS shape. ``semi_passive`` and ``blind``
    use one surface of ``ris_shape`` elements.
    """

    kind: SchemeKind
    beams: tuple[AnglePair, ...] = ()
    ris_shape: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.kind == "plug_in":
            if len(self.beams) < 1:
                raise ValueError("plug-in scheme needs at least one sub-RIS beam")
        elif self.kind in ("semi_passive", "blind"):
            if self.ris_shape is None or min(self.ris_shape) < 1:
                raise ValueError(f"{self.kind} scheme needs a positive RIS shape")
        else:
            raise ValueError(f"unknown scheme kind {self.kind!r}")

    @classmethod
    def plug_in(cls, k: int) -> "Scheme":
        return cls("plug_in", tuple(segment_beams(k)))

    @classmethod
    def semi_passive(cls, n_x: int = 10, n_y: int = 10) -> "Scheme":
        return cls("semi_passive", ris_shape=(n_x, n_y))

    @classmethod
    def blind(cls, n_x: int = 10, n_y: int = 10) -> "Scheme":
        return cls("blind", ris_shape=(n_x, n_y))

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        """Build a scheme from ``plug_in:K``, ``semi_passive:NXxNY`` or ``blind:NXxNY``.

        A bare element count is accepted for square surfaces, e.g. ``semi_passive:100``.
        """
        kind, _, arg = text.strip().partition(":")
        if kind == "plug_in":
            return cls.plug_in(int(arg) if arg else 2)
        if kind in ("semi_passive", "blind"):
            shape = _parse_shape(arg) if arg else (10, 10)
            return cls(kind, ris_shape=shape)
        raise ValueError(f"unknown scheme {text!r}")

    @property
    def label(self) -> str:
        if self.kind == "plug_in":
            return f"plug_in_k{len(self.beams)}"
        nx, ny = self.ris_shape
        return f"{self.kind}_{nx}x{ny}"


def _parse_shape(arg: str) -> tuple[int, int]:
    if "x" in arg:
        a, b = arg.split("x")
        return int(a), int(b)
    n = int(arg)
    r = math.isqrt(n)
    if r * r != n:
        raise ValueError(f"element count {n} is not a square; give the shape as NXxNY")
    return r, r


@dataclass(frozen=True)
class AngleBounds:
    "Uniform draw bounds ``(low, high)`` in radians for every direction in the link."

    bs_aod_az: tuple[float, float] = (-math.pi, math.pi)
    bs_aod_el: tuple[float, float] = (-math.pi / 3, math.pi / 3)
    ris_aoa_az: tuple[float, float] = (-math.pi, math.pi)
    ris_aoa_el: tuple[float, float] = (-math.pi / 3, math.pi / 3)
    ris_aod_az: tuple[float, float] = (-math.pi, math.pi)
    ris_aod_el: tuple[float, float] = (-math.pi / 16, math.pi / 16)
    ue_aoa_az: tuple[float, float] = (-math.pi, math.pi)
    ue_aoa_el: tuple[float, float] = (-math.pi / 3, math.pi / 3)

    def __post_init__(self) -> None:
        for name, (lo, hi) in self.__dict__.items():
            limit = math.pi if name.endswith("_az") else math.pi / 2
            if not (-limit - 1e-12 <= lo <= hi <= limit + 1e-12):
                raise ValueError(f"{name} bounds {(lo, hi)} outside [-{limit:.4f}, {limit:.4f}]")


@dataclass(frozen=True)
class Scenario:
    name: str
    pathloss: PathLossParams
    d_br: float
    d_ru: float
    scheme: Scheme = field(default_factory=lambda: Scheme.plug_in(2))
    bs_shape: tuple[int, int] = (10, 10)
    ue_shape: tuple[int, int] = (1, 1)
    sub_ris_shape: tuple[int, int] = (10, 10)
    spacing_wavelengths: float = 0.5
    bounds: AngleBounds = field(default_factory=AngleBounds)
    bandwidth: float = 100e6
    noise_psd_dbm_hz: float = -174.0
    g_element_dbi: float = 0.0
    gain_mode: str = "amplitude"
    modulation_order: int = 2
    tx_power_dbm: float = 0.0
    power_model: PowerModel = field(default_factory=PowerModel)
    count_idle_power: bool = False

    def __post_init__(self) -> None:
        if not (self.d_br > 0 and self.d_ru > 0):
            raise ValueError("link distances must be positive")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        psk(self.modulation_order)

    def with_scheme(self, scheme: Scheme | str) -> "Scenario":
        if isinstance(scheme, str):
            scheme = Scheme.parse(scheme)
        return replace(self, scheme=scheme)

    @property
    def wavelength(self) -> float:
        return wavelength(self.pathloss.f_c * 1e9)

    def _ura(self, shape: tuple[int, int]) -> UraGeometry:
        d = self.spacing_wavelengths * self.wavelength
        return UraGeometry(shape[0], shape[1], d, d, self.wavelength)

    @property
    def bs_geom(self) -> UraGeometry:
        return self._ura(self.bs_shape)

    @property
    def ue_geom(self) -> UraGeometry:
        return self._ura(self.ue_shape)

    @property
    def sub_ris_geom(self) -> UraGeometry:
        return self._ura(self.sub_ris_shape)

    @property
    def ris_geom(self) -> UraGeometry:
        "Surface engaged in one transmission under the current scheme."
        if self.scheme.kind == "plug_in":
            return self.sub_ris_geom
        return self._ura(self.scheme.ris_shape)

    @property
    def constellation(self) -> Constellation:
        return psk(self.modulation_order)

    @property
    def noise_power_dbm(self) -> float:
        return self.noise_psd_dbm_hz + 10 * math.log10(self.bandwidth)

    @property
    def noise_variance(self) -> float:
        return dbm_to_watts(self.noise_power_dbm)

    def budget(self, tx_power: float | None = None) -> LinkBudget:
        "Link budget at ``tx_power`` watts (the scenario's default power when omitted)."
        p = dbm_to_watts(self.tx_power_dbm) if tx_power is None else tx_power
        return LinkBudget(
            tx_power=p,
            noise_variance=self.noise_variance,
            g_element=self.g_element_dbi,
            array_gain_tx=array_gain_db(self.g_element_dbi, self.bs_geom.n),
            array_gain_rx=array_gain_db(self.g_element_dbi, self.ue_geom.n),
            gain_mode=self.gain_mode,
        )

    def ris_power(self) -> float:
        "RIS power draw for the current scheme, counting only engaged elements by default."
        model, m = self.power_model, self.ris_geom.n
        if self.scheme.kind == "semi_passive":
            return analysis.power_ris_semi(model, m)
        p = analysis.power_ris_passive(model, m)
        if self.scheme.kind == "plug_in" and self.count_idle_power:
            p += analysis.power_ris_passive(model, m * (len(self.scheme.beams) - 1))
        return p

    def consumed_power(self, tx_power: float) -> float:
        model = self.power_model
        return (
            analysis.power_tx(model, self.bs_geom.n, tx_power)
            + analysis.power_rx(model, self.ue_geom.n)
            + self.ris_power()
        )


INDOOR_OFFICE = PathLossParams(32.4, 1.73, 28.0)
STREET_CANYON = PathLossParams(32.4, 2.1, 28.0)


def preset_scenario(name: str) -> Scenario:
    """Reference deployments: BS-side RIS indoors, UE-side RIS in a street canyon."""
    if name == "indoor_office":
        return Scenario(name, INDOOR_OFFICE, d_br=2.5, d_ru=10.0)
    if name == "street_canyon":
        return Scenario(name, STREET_CANYON, d_br=20.0, d_ru=10.0)
    raise ValueError(f"unknown scenario {name!r}; expected 'indoor_office' or 'street_canyon'")


@dataclass
class LinkDraw:
    "Per-trial directions (radians) and LOS gains for a batch of realizations."

    bs_aod_az: np.ndarray
    bs_aod_el: np.ndarray
    ris_aoa_az: np.ndarray
    ris_aoa_el: np.ndarray
    ris_aod_az: np.ndarray
    ris_aod_el: np.ndarray
    ue_aoa_az: np.ndarray
    ue_aoa_el: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def __len__(self) -> int:
        return self.alpha.size

    def angle(self, name: str, i: int) -> AnglePair:
        return AnglePair(float(getattr(self, name + "_az")[i]), float(getattr(self, name + "_el")[i]))


def draw_links(scenario: Scenario, n: int, rng: np.random.Generator) -> LinkDraw:
    b = scenario.bounds
    ang = {
        name: rng.uniform(*getattr(b, name), n)
        for name in (
            "bs_aod_az", "bs_aod_el", "ris_aoa_az", "ris_aoa_el",
            "ris_aod_az", "ris_aod_el", "ue_aoa_az", "ue_aoa_el",
        )
    }
    alpha = sample_gain(pathloss_db(scenario.d_br, scenario.pathloss), rng, n)
    beta = sample_gain(pathloss_db(scenario.d_ru, scenario.pathloss), rng, n)
    return LinkDraw(**ang, alpha=alpha, beta=beta)


def _separable_sum(*factors: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    """``sum_n prod_f f[n]`` over URA elements, for factors given per axis.

    Every factor is an outer product of an x- and a y-phasor, so the element
    sum splits into the product of the two per-axis sums.
    """
    px = factors[0][0]
    py = factors[0][1]
    for fx, fy in factors[1:]:
        px = px * fx
        py = py * fy
    return px.sum(axis=-1) * py.sum(axis=-1)


def _conj(pair: tuple[np.ndarray, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    return pair[0].conj(), pair[1].conj()


def _cascade(scenario: Scenario, draw: LinkDraw, rng: np.random.Generator) -> np.ndarray:
    "Per-trial ``a_tris^H Psi a_rris`` through the engaged surface."
    geom, scheme = scenario.ris_geom, scenario.scheme
    inc = ura_axis_phasors(geom, draw.ris_aoa_az, draw.ris_aoa_el)
    dep = ura_axis_phasors(geom, draw.ris_aod_az, draw.ris_aod_el)
    if scheme.kind == "blind":
        psi = np.exp(1j * rng.uniform(0.0, 2 * np.pi, (len(draw), geom.n)))
        px, py = dep[0].conj() * inc[0], dep[1].conj() * inc[1]
        channel = (py[:, :, None] * px[:, None, :]).reshape(len(draw), geom.n)
        return np.einsum("ij,ij->i", channel, psi) / geom.n
    if scheme.kind == "semi_passive":
        beam = dep
    else:
        idx = _assign(draw.ris_aod_az, draw.ris_aod_el, scheme.beams)
        beam = ura_axis_phasors(
            geom,
            np.array([b.azimuth for b in scheme.beams])[idx],
            np.array([b.elevation for b in scheme.beams])[idx],
        )
    # Psi = sqrt(M) f_b conj(a_inc) with a_inc = phasors / sqrt(M); steering vectors add 1/M
    return _separable_sum(_conj(dep), beam, _conj(inc), inc) / geom.n


def equivalent_channels(
    scenario: Scenario, draw: LinkDraw, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Scalar channels ``f_r^H R Psi G f_t`` for every trial, plus the combiners.

    Uses the rank-one factorization of ``G`` and ``R`` and the per-axis
    separability of URA responses, so a trial costs ``O(N_x + N_y)`` per array
    (``O(M)`` for a blind surface). Beamformers are matched to the drawn BS
    departure and UE arrival directions.
    """
    bs, ue, ris = scenario.bs_geom, scenario.ue_geom, scenario.ris_geom
    a_t = ura_axis_phasors(bs, draw.bs_aod_az, draw.bs_aod_el)
    a_r = ura_axis_phasors(ue, draw.ue_aoa_az, draw.ue_aoa_el)
    f_t, f_r = a_t, a_r
    tx = _separable_sum(_conj(a_t), f_t) / bs.n
    rx = _separable_sum(_conj(f_r), a_r) / ue.n
    scale = math.sqrt(bs.n * ris.n) * math.sqrt(ris.n * ue.n)
    heq = scale * draw.alpha * draw.beta * tx * rx * _cascade(scenario, draw, rng)
    return heq, ura_response_batch(ue, draw.ue_aoa_az, draw.ue_aoa_el)


def draw_equivalent_channels(scenario: Scenario, n: int, rng: np.random.Generator) -> np.ndarray:
    "Fresh link draws followed by the scheme's equivalent channels, all from ``rng``."
    return equivalent_channels(scenario, draw_links(scenario, n, rng), rng)[0]


def trial_channel(
    scenario: Scenario, draw: LinkDraw, i: int, rng: np.random.Generator
) -> tuple[np.ndarray, BeamformerPair, PhaseProfile]:
    """Full-matrix end-to-end channel for trial ``i`` of ``draw``.

    This is the reference path: it builds ``G``, ``R`` and ``Psi`` explicitly.
    """
    bs, ue, ris = scenario.bs_geom, scenario.ue_geom, scenario.ris_geom
    aod_bs, aoa_ris = draw.angle("bs_aod", i), draw.angle("ris_aoa", i)
    aod_ris, aoa_ue = draw.angle("ris_aod", i), draw.angle("ue_aoa", i)
    g = los_channel(bs, ris, complex(draw.alpha[i]), aod_bs, aoa_ris)
    r = los_channel(ris, ue, complex(draw.beta[i]), aod_ris, aoa_ue)
    scheme = scenario.scheme
    if scheme.kind == "blind":
        profile = random_profile(ris.n, rng)
    elif scheme.kind == "semi_passive":
        profile = optimal_profile(ris, aoa_ris, aod_ris)
    else:
        beam = scheme.beams[assign_sub_ris(aod_ris, scheme.beams)]
        profile = fixed_beam_profile(ris, aoa_ris, beam)
    h = effective_channel(r, profile, g)
    bf = BeamformerPair(
        ura_response_batch(bs, aod_bs.azimuth, aod_bs.elevation),
        ura_response_batch(ue, aoa_ue.azimuth, aoa_ue.elevation),
    )
    return h, bf, profile


def run_trial(
    scenario: Scenario,
    tx_power: float,
    symbol_index: int | None,
    rng: np.random.Generator,
) -> tuple[int, int]:
    """One transmission through explicitly built matrices.

    Draws the channel, configures the scheme's profile, sends a symbol
    (uniformly drawn when ``symbol_index`` is None), detects it and returns
    ``(detected index, bit errors)``.
    """
    cons = scenario.constellation
    draw = draw_links(scenario, 1, rng)
    h, bf, _ = trial_channel(scenario, draw, 0, rng)
    if symbol_index is None:
        symbol_index = int(rng.integers(cons.order))
    budget = scenario.budget(tx_power)
    y = received_symbol(h, bf, cons.points[symbol_index], budget, rng)
    detected = ml_detect(y, h, bf, budget, cons)
    return detected, bit_errors(symbol_index, detected, cons)


@dataclass
class PointResult:
    power_dbm: float
    trials: int = 0
    aber: float = math.nan
    stderr: float = math.nan
    union_bound: float = math.nan
    bound_stderr: float = math.nan
    rate: float = math.nan
    rate_stderr: float = math.nan
    p_c: float = math.nan
    ee: float = math.nan


@dataclass
class SimResult:
    kind: Literal["aber", "rate", "ee"]
    scheme: str
    scenario: str
    seed: int
    points: list[PointResult]
    metadata: dict = field(default_factory=dict)

    @property
    def powers(self) -> np.ndarray:
        return np.array([p.power_dbm for p in self.points])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points], dtype=float)


def _chunks(total: int, size: int) -> list[tuple[int, int]]:
    return [(c, min(size, total - c * size)) for c in range(math.ceil(total / size))]


def _map(fn: Callable, items: Iterable, threads: int) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _error_chunk(scenario: Scenario, budget: LinkBudget, seed: int, point: int, chunk: int, n: int) -> int:
    cons = scenario.constellation
    link = substream(seed, _ABER_LINK, point, chunk)
    draw = draw_links(scenario, n, link)
    sent = link.integers(0, cons.order, n)
    noise = complex_noise(budget.noise_variance, link, (n, scenario.ue_geom.n))
    heq, f_r = equivalent_channels(scenario, draw, substream(seed, _ABER_SCHEME, point, chunk))
    scaled = budget.signal_scale * heq
    y = scaled * cons.points[sent] + np.einsum("ij,ij->i", f_r.conj(), noise)
    return int(bit_errors(sent, detect(y, scaled, cons.points), cons).sum())


def _channel_chunk(scenario: Scenario, seed: int, tags: tuple[int, int], point: int, chunk: int, n: int) -> np.ndarray:
    draw = draw_links(scenario, n, substream(seed, tags[0], point, chunk))
    return equivalent_channels(scenario, draw, substream(seed, tags[1], point, chunk))[0]


def _channels(scenario: Scenario, seed: int, tags, point: int, total: int, chunk_size: int, threads: int) -> np.ndarray:
    parts = _map(
        lambda c: _channel_chunk(scenario, seed, tags, point, c[0], c[1]),
        _chunks(total, chunk_size),
        threads,
    )
    return np.concatenate(parts)


def union_bound_samples(cons: Constellation, heq: np.ndarray, budget: LinkBudget) -> np.ndarray:
    "Per-realization union bound; its mean is the bound built from the UPEP table."
    acc = np.zeros(heq.shape)
    for i in range(cons.order):
        for j in range(cons.order):
            if i != j:
                w = bit_errors(i, j, cons)
                acc += w * analysis.cpep_batch(heq, cons.points[i] - cons.points[j], budget)
    return acc / (cons.bits_per_symbol * cons.order)


def run_aber_sweep(
    scenario: Scenario,
    power_grid: Sequence[float],
    trials_per_point: int = DEFAULT_TRIALS,
    seed: int = 0,
    *,
    bound_realizations: int = DEFAULT_REALIZATIONS,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> SimResult:
    """Simulated ABER and its union bound at each transmit power (dBm).

    The bound is evaluated on a channel population independent of the one
    used for the error count.
    """
    if trials_per_point < 1000:
        raise ValueError(f"trials_per_point must be >= 1000, got {trials_per_point}")
    cons = scenario.constellation
    eta = cons.bits_per_symbol
    points = []
    for k, p_dbm in enumerate(power_grid):
        budget = scenario.budget(dbm_to_watts(p_dbm))
        errors = sum(
            _map(
                lambda c: _error_chunk(scenario, budget, seed, k, c[0], c[1]),
                _chunks(trials_per_point, chunk_size),
                threads,
            )
        )
        bits = trials_per_point * eta
        aber = errors / bits
        heq = _channels(scenario, seed, (_BOUND_LINK, _BOUND_SCHEME), k, bound_realizations, chunk_size, threads)
        table, _ = analysis.upep_table(cons, heq, budget)
        bound = analysis.aber_union_bound(cons, table)
        samples = union_bound_samples(cons, heq, budget)
        points.append(
            PointResult(
                power_dbm=float(p_dbm),
                trials=trials_per_point,
                aber=aber,
                stderr=math.sqrt(aber * (1 - aber) / bits),
                union_bound=bound,
                bound_stderr=float(samples.std(ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else 0.0,
            )
        )
    return SimResult(
        "aber", scenario.scheme.label, scenario.name, seed, points,
        {"paired_sampling": True, "bound_realizations": bound_realizations, "chunk_size": chunk_size},
    )


def run_rate_sweep(
    scenario: Scenario,
    power_grid: Sequence[float],
    realizations: int = DEFAULT_REALIZATIONS,
    seed: int = 0,
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> SimResult:
    "Ergodic achievable rate at each transmit power (dBm)."
    if realizations < 1:
        raise ValueError("need at least one realization")
    points = []
    for k, p_dbm in enumerate(power_grid):
        budget = scenario.budget(dbm_to_watts(p_dbm))
        heq = _channels(scenario, seed, (_RATE_LINK, _RATE_SCHEME), k, realizations, chunk_size, threads)
        est = analysis.rate_from_snr(analysis.snr_batch(heq, budget))
        points.append(PointResult(float(p_dbm), realizations, rate=est.mean, rate_stderr=est.stderr))
    return SimResult(
        "rate", scenario.scheme.label, scenario.name, seed, points,
        {"paired_sampling": True, "chunk_size": chunk_size},
    )


def run_ee_sweep(
    scenario: Scenario,
    power_grid: Sequence[float],
    realizations: int = DEFAULT_REALIZATIONS,
    seed: int = 0,
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> SimResult:
    "Energy efficiency (bits/J) from the ergodic rate and the scheme's consumed power."
    res = run_rate_sweep(scenario, power_grid, realizations, seed, threads=threads, chunk_size=chunk_size)
    for pt in res.points:
        pt.p_c = scenario.consumed_power(dbm_to_watts(pt.power_dbm))
        pt.ee = analysis.energy_efficiency(pt.rate, scenario.bandwidth, pt.p_c)
    res.kind = "ee"
    res.metadata["count_idle_power"] = scenario.count_idle_power
    return res


def crossing_power(powers, values, level: float, *, log: bool = True) -> float:
    """Power where a curve first crosses ``level``, by linear interpolation.

    ABER curves are interpolated in ``log10``. Segments touching a zero or
    non-finite value are skipped; returns NaN if no crossing is found.
    """
    x = np.asarray(powers, dtype=float)
    y = np.asarray(values, dtype=float)
    if log:
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.log10(y)
        level = math.log10(level)
    for i in range(len(x) - 1):
        y0, y1 = y[i], y[i + 1]
        if not (np.isfinite(y0) and np.isfinite(y1)) or y0 == y1:
            continue
        if (y0 - level) * (y1 - level) <= 0:
            return float(x[i] + (level - y0) * (x[i + 1] - x[i]) / (y1 - y0))
    return math.nan
