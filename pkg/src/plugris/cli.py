"""Command-line front end: JSON run configs in, versioned CSV files and manifests out.

Subcommands ``geometry``, ``aber``, ``rate``, ``ee`` and ``complexity`` each
write ``<command>.csv`` and ``<command>.manifest.json`` into ``--out``. The
manifest echoes the resolved config, so feeding its ``config`` block back via
``--config`` reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .analysis import ComplexityParams, PowerModel, detector_complexity
from .channel import PathLossParams
from .geometry import GeometryDomainError, deployable_spacing, footprint_spacing, wavelength
from .sim import (
    AngleBounds,
    Scenario,
    Scheme,
    SimResult,
    preset_scenario,
    run_aber_sweep,
    run_ee_sweep,
    run_rate_sweep,
)

SCHEMA = 1
COMMANDS = ("geometry", "aber", "rate", "ee", "complexity")

EXIT_USAGE, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 2, 3, 4, 5


class ConfigError(ValueError):
    "Malformed or inconsistent run configuration."


DEFAULTS: dict[str, Any] = {
    "scenario": "indoor_office",
    "schemes": ["plug_in:2", "plug_in:4", "semi_passive:10x10"],
    "grid_dbm": {"start": -30, "stop": 30, "step": 2},
    "trials": 100_000,
    "bound_realizations": 10_000,
    "realizations": 10_000,
    "chunk_size": 4096,
    "seed": None,
    "geometry": {
        "n_t": [16, 36, 64, 100, 144, 196, 256, 324, 400, 576, 784, 1024],
        "d": [2.5, 5.0, 10.0, 20.0],
        "m": [16, 36, 64, 100, 144, 256],
        "theta0_deg": 0.0,
        "exact": False,
    },
    "complexity": {
        "m": [16, 36, 64, 100, 144, 196, 256, 324, 400],
        "n_t": [16, 36, 64, 100, 144, 196, 256],
        "n_r": [1],
        "m_ary": [2, 4, 8, 16],
    },
}

# scenario block key -> Scenario field (None marks keys handled separately)
SCENARIO_KEYS: dict[str, str | None] = {
    "preset": None,
    "a": None,
    "b": None,
    "f_c_ghz": None,
    "d_br": "d_br",
    "d_ru": "d_ru",
    "bs_shape": "bs_shape",
    "ue_shape": "ue_shape",
    "sub_ris_shape": "sub_ris_shape",
    "spacing_wavelengths": "spacing_wavelengths",
    "bandwidth_hz": "bandwidth",
    "noise_psd_dbm_hz": "noise_psd_dbm_hz",
    "g_element_dbi": "g_element_dbi",
    "gain_mode": "gain_mode",
    "modulation_order": "modulation_order",
    "count_idle_power": "count_idle_power",
    "angle_bounds_deg": None,
    "power_model": None,
}

COLUMNS = {
    "geometry": ["n_t", "d", "m", "hpbw", "efd", "delta", "deployable_delta"],
    "aber": ["power_dbm", "scheme", "aber", "stderr", "union_bound", "bound_stderr", "trials", "seed"],
    "rate": ["power_dbm", "scheme", "rate", "rate_stderr", "realizations", "seed"],
    "ee": ["power_dbm", "scheme", "rate", "rate_stderr", "p_c", "ee", "realizations", "seed"],
    "complexity": ["m", "n_t", "n_r", "m_ary", "scheme", "complexity"],
}


def _check_keys(block: dict, allowed, where: str) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


# blocks whose keys are filled individually from the defaults
NESTED = ("geometry", "complexity")


def _merge(defaults: dict, given: dict, where: str) -> dict:
    _check_keys(given, defaults, where)
    out = dict(defaults)
    for k, v in given.items():
        out[k] = _merge(defaults[k], v, f"{where}.{k}") if k in NESTED and where == "config" else v
    return out


def resolve_config(raw: dict, *, seed: int | None = None, schemes: list[str] | None = None) -> dict:
    "Fill defaults, apply command-line overrides and reject unknown keys."
    cfg = _merge(DEFAULTS, raw, "config")
    if seed is not None:
        cfg["seed"] = seed
    if schemes is not None:
        cfg["schemes"] = schemes
    return cfg


def power_grid(spec) -> list[float]:
    if isinstance(spec, list):
        return [float(x) for x in spec]
    _check_keys(spec, ("start", "stop", "step"), "grid_dbm")
    try:
        start, stop, step = (float(spec[k]) for k in ("start", "stop", "step"))
    except KeyError as exc:
        raise ConfigError(f"grid_dbm needs start, stop and step (missing {exc})") from None
    if step <= 0:
        raise ConfigError("grid_dbm step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(max(n, 0))]


def _shape(v, name: str) -> tuple[int, int]:
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v)):
        raise ConfigError(f"{name} must be a two-integer list [n_x, n_y]")
    return int(v[0]), int(v[1])


def build_scenario(spec) -> Scenario:
    "Scenario from a preset name or an inline block of overrides on a preset."
    if isinstance(spec, str):
        try:
            return preset_scenario(spec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    _check_keys(spec, SCENARIO_KEYS, "scenario")
    try:
        sc = preset_scenario(spec.get("preset", "indoor_office"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    pl = sc.pathloss
    pathloss = PathLossParams(spec.get("a", pl.a), spec.get("b", pl.b), spec.get("f_c_ghz", pl.f_c))
    changes: dict[str, Any] = {"pathloss": pathloss}
    for key, attr in SCENARIO_KEYS.items():
        if attr is not None and key in spec:
            changes[attr] = _shape(spec[key], key) if key.endswith("_shape") else spec[key]
    if "angle_bounds_deg" in spec:
        ab = spec["angle_bounds_deg"]
        _check_keys(ab, [f.name for f in fields(AngleBounds)], "scenario.angle_bounds_deg")
        changes["bounds"] = AngleBounds(**{k: tuple(math.radians(x) for x in v) for k, v in ab.items()})
    if "power_model" in spec:
        pm = spec["power_model"]
        _check_keys(pm, [f.name for f in fields(PowerModel)], "scenario.power_model")
        changes["power_model"] = PowerModel(**pm)
    if changes.get("gain_mode", "amplitude") not in ("amplitude", "power"):
        raise ConfigError("gain_mode must be 'amplitude' or 'power'")
    return replace(sc, **changes)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(command: str, rows: list[list]) -> bytes:
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS[command])
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode()


def atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _square_side(n: int, name: str) -> int:
    r = math.isqrt(n) if isinstance(n, int) and n > 0 else 0
    if r * r != n:
        raise ConfigError(f"{name} value {n!r} must be a positive perfect square (square array)")
    return r


def geometry_rows(cfg: dict) -> list[list]:
    g = cfg["geometry"]
    sc = build_scenario(cfg["scenario"])
    lam = wavelength(sc.pathloss.f_c * 1e9)
    spacing = sc.spacing_wavelengths * lam
    theta0 = math.radians(float(g["theta0_deg"]))
    rows = []
    for n_t, d, m in itertools.product(g["n_t"], g["d"], g["m"]):
        if not (isinstance(d, (int, float)) and d > 0):
            raise ConfigError(f"geometry distance {d!r} must be positive")
        bw, efd, delta = footprint_spacing(
            _square_side(n_t, "geometry.n_t"), float(d), _square_side(m, "geometry.m"), lam,
            bs_spacing=spacing, ris_spacing=spacing, theta0=theta0, exact=bool(g["exact"]),
        )
        rows.append([n_t, float(d), m, bw, efd, delta, deployable_spacing(delta)])
    return rows


def complexity_rows(cfg: dict) -> list[list]:
    c = cfg["complexity"]
    rows = []
    for m, n_t, n_r, m_ary in itertools.product(c["m"], c["n_t"], c["n_r"], c["m_ary"]):
        p = ComplexityParams(m, n_t, n_r, m_ary)
        for scheme in ("semi_passive", "plug_in"):
            rows.append([m, n_t, n_r, m_ary, scheme, detector_complexity(p, scheme)])
    return rows


def _require_seed(cfg: dict) -> int:
    seed = cfg["seed"]
    if seed is None:
        raise ConfigError("a seed is required (config 'seed' or --seed)")
    if not (isinstance(seed, int) and 0 <= seed < 2**64):
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def _schemes(cfg: dict) -> list[Scheme]:
    try:
        return [Scheme.parse(s) for s in cfg["schemes"]]
    except (ValueError, AttributeError) as exc:
        raise ConfigError(f"bad scheme list: {exc}") from None


def sweep_rows(command: str, cfg: dict, threads: int) -> list[list]:
    seed = _require_seed(cfg)
    base = build_scenario(cfg["scenario"])
    grid = power_grid(cfg["grid_dbm"])
    chunk = int(cfg["chunk_size"])
    rows = []
    for scheme in _schemes(cfg):
        sc = base.with_scheme(scheme)
        res: SimResult
        if command == "aber":
            res = run_aber_sweep(
                sc, grid, int(cfg["trials"]), seed,
                bound_realizations=int(cfg["bound_realizations"]), threads=threads, chunk_size=chunk,
            )
            rows += [[p.power_dbm, res.scheme, p.aber, p.stderr, p.union_bound, p.bound_stderr, p.trials, seed]
                     for p in res.points]
        elif command == "rate":
            res = run_rate_sweep(sc, grid, int(cfg["realizations"]), seed, threads=threads, chunk_size=chunk)
            rows += [[p.power_dbm, res.scheme, p.rate, p.rate_stderr, p.trials, seed] for p in res.points]
        else:
            res = run_ee_sweep(sc, grid, int(cfg["realizations"]), seed, threads=threads, chunk_size=chunk)
            rows += [[p.power_dbm, res.scheme, p.rate, p.rate_stderr, p.p_c, p.ee, p.trials, seed]
                     for p in res.points]
    return rows


def run_command(command: str, cfg: dict, out_dir: Path, threads: int = 1) -> Path:
    "Run one subcommand with a resolved config; returns the manifest path."
    start = time.perf_counter()
    builders: dict[str, Callable[[], list[list]]] = {
        "geometry": lambda: geometry_rows(cfg),
        "complexity": lambda: complexity_rows(cfg),
    }
    rows = builders[command]() if command in builders else sweep_rows(command, cfg, threads)
    out_dir.mkdir(parents=True, exist_ok=True)
    data = render_csv(command, rows)
    csv_path = out_dir / f"{command}.csv"
    atomic_write(csv_path, data)
    manifest = {
        "tool": "plugris",
        "version": __version__,
        "command": command,
        "config": cfg,
        "outputs": {csv_path.name: {"sha256": hashlib.sha256(data).hexdigest(), "rows": len(rows)}},
        "runtime_s": time.perf_counter() - start,
    }
    man_path = out_dir / f"{command}.manifest.json"
    atomic_write(man_path, (json.dumps(manifest, indent=2) + "\n").encode())
    return man_path


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plugris", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"plugris {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", type=Path, help="JSON run config (defaults apply when omitted)")
        s.add_argument("--out", type=Path, default=Path("."), help="output directory")
        s.add_argument("--seed", type=int, help="overrides the config seed")
        s.add_argument("--threads", type=int, default=1, help="worker threads, 0 = one per CPU")
        s.add_argument("--scheme", help="comma-separated schemes, e.g. plug_in:2,semi_passive:10x10")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        raw = {}
        if args.config is not None:
            try:
                raw = json.loads(args.config.read_text())
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON ({exc})") from None
        schemes = [s for s in args.scheme.split(",") if s] if args.scheme else None
        cfg = resolve_config(raw, seed=args.seed, schemes=schemes)
        if args.threads < 0:
            raise ConfigError("--threads must be >= 0")
        threads = args.threads or os.cpu_count() or 1
        manifest = run_command(args.command, cfg, args.out, threads)
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GeometryDomainError, ValueError, TypeError) as exc:
        print(f"error[domain]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(f"wrote {manifest}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
