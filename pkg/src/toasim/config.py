"""Run configuration: INI-style files, presets, env overrides, validation.

The format is flat key = value pairs under [section] headers, parsed with
configparser and validated strictly: every key must be known for the
chosen experiment and every required key present, so typos fail loudly
instead of silently running defaults.  Numbers accept scientific notation
plus a small table of multiplicative unit suffixes (documented in the CLI
help).  Environment variables TOASIM_<SECTION>_<KEY> override file values.

Precedence: preset < config file < environment.
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .oracle import GridSpec, default_dt
from .packet import GaussianPacket1D, GaussianPacket2D
from .physparams import HBAR, PhysParams
from .toa import QuadratureSpec

ENV_PREFIX = "TOASIM_"

# multiplicative suffixes; values are plain multipliers applied to the number
UNIT_SUFFIXES = {
    "m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9,
    "s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9,
    "m/s": 1.0, "cm/s": 1e-2, "mm/s": 1e-3, "um/s": 1e-6,
}

EXPERIMENTS = ("eigen-scan", "toa-1d", "toa-2d", "oracle", "deconv", "compare-1d2d")

_PARAM_KEYS = {"mass", "rabi", "decay", "laser_detuning", "laser_wavenumber"}
_PACKET_2D_KEYS = {
    "x0", "y0", "dx", "dy", "dkx", "dky", "kx0", "vx0", "ky0", "vy0", "diagnostic",
}
_PACKET_1D_KEYS = {"x0", "dx", "dkx", "kx0", "vx0"}
_QUAD_KEYS = {"n_kx", "n_ky", "span_sigmas", "t_max", "n_t"}

# allowed {section: keys} per experiment ("*" marks the section optional)
_SCHEMA = {
    "eigen-scan": {
        "run": {"experiment"},
        "params": _PARAM_KEYS,
        "scan": {"kx", "vx", "vy_min", "vy_max", "n_vy"},
        "output": {"prefix"},
    },
    "toa-1d": {
        "run": {"experiment"},
        "params": _PARAM_KEYS,
        "packet": _PACKET_1D_KEYS,
        "quadrature": _QUAD_KEYS,
        "output": {"prefix"},
    },
    "toa-2d": {
        "run": {"experiment", "include_compensated"},
        "params": _PARAM_KEYS,
        "packet": _PACKET_2D_KEYS | {"dy_list", "vy_list"},
        "quadrature": _QUAD_KEYS,
        "output": {"prefix"},
    },
    "oracle": {
        "run": {"experiment"},
        "params": _PARAM_KEYS,
        "packet": _PACKET_2D_KEYS,
        "grid": {"x_min", "x_max", "y_min", "y_max", "n_x", "n_y", "dt",
                 "n_steps", "t_max", "record_every"},
        "output": {"prefix"},
    },
    "deconv": {
        "run": {"experiment"},
        "params": _PARAM_KEYS,
        "packet": _PACKET_2D_KEYS,
        "deconv": {"input_pi", "epsilon"},
        "output": {"prefix"},
    },
    "compare-1d2d": {
        "run": {"experiment"},
        "params": _PARAM_KEYS,
        "packet": _PACKET_2D_KEYS,
        "quadrature": _QUAD_KEYS,
        "output": {"prefix"},
    },
}


@dataclass
class RunConfig:
    """Fully validated configuration for one experiment."""

    experiment: str
    params: PhysParams
    packet: GaussianPacket2D | GaussianPacket1D | None = None
    quadrature: QuadratureSpec | None = None
    grid: GridSpec | None = None
    scan: dict | None = None
    deconv: dict | None = None
    dy_list: list[float] | None = None
    vy_list: list[float] | None = None
    include_compensated: bool = False
    prefix: str | None = None
    resolved: dict = field(default_factory=dict)


def parse_number(text: str) -> float:
    """Float with optional unit suffix, e.g. '0.24um' or '9 cm/s'."""
    s = text.strip()
    try:
        return float(s)
    except ValueError:
        pass
    for suffix in sorted(UNIT_SUFFIXES, key=len, reverse=True):
        if s.endswith(suffix):
            head = s[: -len(suffix)].strip()
            try:
                return float(head) * UNIT_SUFFIXES[suffix]
            except ValueError:
                break
    raise ConfigError(f"cannot parse number {text!r}")


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"key {key!r} must be an integer, got {text!r}") from None


def _parse_bool(text: str, key: str) -> bool:
    s = text.strip().lower()
    if s in ("true", "yes", "on", "1"):
        return True
    if s in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"key {key!r} must be a boolean, got {text!r}")


def _parse_float_list(text: str) -> list[float]:
    return [parse_number(part) for part in text.split(",") if part.strip()]


def read_config_file(path: str) -> dict:
    """Parse an INI file into {section: {key: raw string}}."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError:
        raise
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    return {s: dict(parser.items(s)) for s in parser.sections()}


def merge(*layers: dict) -> dict:
    """Later layers override earlier ones, key by key."""
    out: dict = {}
    for layer in layers:
        for section, items in layer.items():
            out.setdefault(section, {}).update(items)
    return out


def env_overrides(environ=None) -> dict:
    """TOASIM_<SECTION>_<KEY>=value -> {section: {key: value}}."""
    environ = os.environ if environ is None else environ
    out: dict = {}
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX):].lower()
        section, _, key = rest.partition("_")
        if not section or not key:
            raise ConfigError(f"cannot interpret environment override {name!r}")
        out.setdefault(section, {})[key] = value
    return out


def to_ini(resolved: dict) -> str:
    """Render a resolved {section: {key: value}} mapping back to INI text."""
    parser = configparser.ConfigParser(interpolation=None)
    for section in sorted(resolved):
        parser[section] = dict(resolved[section])
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def _reject_unknown(raw: dict, experiment: str) -> None:
    schema = _SCHEMA[experiment]
    for section, items in raw.items():
        if section not in schema:
            raise ConfigError(
                f"unknown section [{section}] for experiment {experiment!r}"
            )
        for key in items:
            if key not in schema[section]:
                raise ConfigError(
                    f"unknown key {key!r} in section [{section}] for "
                    f"experiment {experiment!r}"
                )


def _need(raw: dict, section: str, key: str) -> str:
    try:
        return raw[section][key]
    except KeyError:
        raise ConfigError(f"missing required key {key!r} in section [{section}]") from None


def _get(raw: dict, section: str, key: str, default=None):
    return raw.get(section, {}).get(key, default)


def _exclusive(section: dict, a: str, b: str, what: str):
    if a in section and b in section:
        raise ConfigError(f"keys {a!r} and {b!r} are mutually exclusive ({what})")
    if a not in section and b not in section:
        raise ConfigError(f"one of {a!r} or {b!r} is required ({what})")


def _build_params(raw: dict) -> PhysParams:
    try:
        return PhysParams(
            mass=parse_number(_need(raw, "params", "mass")),
            rabi=parse_number(_need(raw, "params", "rabi")),
            decay=parse_number(_need(raw, "params", "decay")),
            laser_detuning=parse_number(_need(raw, "params", "laser_detuning")),
            laser_wavenumber=parse_number(_need(raw, "params", "laser_wavenumber")),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _width(section: dict, pos_key: str, mom_key: str, what: str) -> float:
    _exclusive(section, pos_key, mom_key, what)
    if pos_key in section:
        return parse_number(section[pos_key])
    return 1.0 / (2.0 * parse_number(section[mom_key]))


def _mean_k(section: dict, k_key: str, v_key: str, params: PhysParams,
            what: str, default=None) -> float:
    if k_key in section and v_key in section:
        raise ConfigError(f"keys {k_key!r} and {v_key!r} are mutually exclusive ({what})")
    if k_key in section:
        return parse_number(section[k_key])
    if v_key in section:
        return params.mass * parse_number(section[v_key]) / HBAR
    if default is not None:
        return default
    raise ConfigError(f"one of {k_key!r} or {v_key!r} is required ({what})")


def _build_packet_2d(raw: dict, params: PhysParams) -> GaussianPacket2D:
    section = raw.get("packet", {})
    if not section:
        raise ConfigError("missing section [packet]")
    try:
        return GaussianPacket2D(
            x0=parse_number(_need(raw, "packet", "x0")),
            y0=parse_number(section.get("y0", "0")),
            dx=_width(section, "dx", "dkx", "x width"),
            dy=_width(section, "dy", "dky", "y width"),
            kx0=_mean_k(section, "kx0", "vx0", params, "x mean"),
            ky0=_mean_k(section, "ky0", "vy0", params, "y mean", default=0.0),
            diagnostic=_parse_bool(section.get("diagnostic", "false"), "diagnostic"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_packet_1d(raw: dict, params: PhysParams) -> GaussianPacket1D:
    section = raw.get("packet", {})
    if not section:
        raise ConfigError("missing section [packet]")
    try:
        return GaussianPacket1D(
            x0=parse_number(_need(raw, "packet", "x0")),
            dx=_width(section, "dx", "dkx", "x width"),
            kx0=_mean_k(section, "kx0", "vx0", params, "x mean"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_quadrature(raw: dict) -> QuadratureSpec:
    section = raw.get("quadrature", {})
    t_max = parse_number(_need(raw, "quadrature", "t_max"))
    n_t = _parse_int(section.get("n_t", "200"), "n_t")
    if n_t < 2:
        raise ConfigError("n_t must be >= 2")
    if t_max <= 0:
        raise ConfigError("t_max must be positive")
    try:
        return QuadratureSpec(
            n_kx=_parse_int(section.get("n_kx", "96"), "n_kx"),
            n_ky=_parse_int(section.get("n_ky", "48"), "n_ky"),
            span_sigmas=parse_number(section.get("span_sigmas", "6")),
            time_samples=tuple(np.linspace(0.0, t_max, n_t)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_grid(raw: dict, params: PhysParams, packet: GaussianPacket2D) -> GridSpec:
    section = raw.get("grid", {})
    if not section:
        raise ConfigError("missing section [grid]")
    dt = parse_number(section["dt"]) if "dt" in section else default_dt(params, packet)
    if "n_steps" in section and "t_max" in section:
        raise ConfigError("keys 'n_steps' and 't_max' are mutually exclusive")
    if "n_steps" in section:
        n_steps = _parse_int(section["n_steps"], "n_steps")
    elif "t_max" in section:
        n_steps = int(np.ceil(parse_number(section["t_max"]) / dt))
    else:
        raise ConfigError("one of 'n_steps' or 't_max' is required in [grid]")
    try:
        return GridSpec(
            x_min=parse_number(_need(raw, "grid", "x_min")),
            x_max=parse_number(_need(raw, "grid", "x_max")),
            y_min=parse_number(_need(raw, "grid", "y_min")),
            y_max=parse_number(_need(raw, "grid", "y_max")),
            n_x=_parse_int(_need(raw, "grid", "n_x"), "n_x"),
            n_y=_parse_int(_need(raw, "grid", "n_y"), "n_y"),
            dt=dt,
            n_steps=n_steps,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_run_config(raw: dict) -> RunConfig:
    """Validate the merged raw mapping and construct all domain objects."""
    experiment = _get(raw, "run", "experiment")
    if experiment is None:
        raise ConfigError("missing key 'experiment' in section [run]")
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; expected one of {', '.join(EXPERIMENTS)}"
        )
    _reject_unknown(raw, experiment)
    params = _build_params(raw)
    cfg = RunConfig(experiment=experiment, params=params, resolved=raw,
                    prefix=_get(raw, "output", "prefix"))

    if experiment == "eigen-scan":
        section = raw.get("scan", {})
        if not section:
            raise ConfigError("missing section [scan]")
        kx = _mean_k(section, "kx", "vx", params, "scan wavenumber")
        if kx <= 0:
            raise ConfigError("scan kx must be positive")
        n_vy = _parse_int(_need(raw, "scan", "n_vy"), "n_vy")
        if n_vy < 2:
            raise ConfigError("n_vy must be >= 2")
        cfg.scan = {
            "kx": kx,
            "vy_min": parse_number(_need(raw, "scan", "vy_min")),
            "vy_max": parse_number(_need(raw, "scan", "vy_max")),
            "n_vy": n_vy,
        }
    elif experiment == "toa-1d":
        cfg.packet = _build_packet_1d(raw, params)
        cfg.quadrature = _build_quadrature(raw)
    elif experiment in ("toa-2d", "compare-1d2d"):
        cfg.packet = _build_packet_2d(raw, params)
        cfg.quadrature = _build_quadrature(raw)
        if experiment == "toa-2d":
            section = raw.get("packet", {})
            if "dy_list" in section and "vy_list" in section:
                raise ConfigError("keys 'dy_list' and 'vy_list' are mutually exclusive")
            if "dy_list" in section:
                cfg.dy_list = _parse_float_list(section["dy_list"])
                if any(v <= 0 for v in cfg.dy_list):
                    raise ConfigError("dy_list entries must be positive widths")
            if "vy_list" in section:
                cfg.vy_list = _parse_float_list(section["vy_list"])
            cfg.include_compensated = _parse_bool(
                _get(raw, "run", "include_compensated", "false"), "include_compensated"
            )
            if cfg.include_compensated and cfg.dy_list is not None:
                raise ConfigError("include_compensated applies to vy runs, not dy_list")
    elif experiment == "oracle":
        cfg.packet = _build_packet_2d(raw, params)
        cfg.grid = _build_grid(raw, params, cfg.packet)
    elif experiment == "deconv":
        cfg.packet = _build_packet_2d(raw, params)
        section = raw.get("deconv", {})
        epsilon = parse_number(section.get("epsilon", "1e-4"))
        if epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        cfg.deconv = {
            "input_pi": _need(raw, "deconv", "input_pi"),
            "epsilon": epsilon,
        }
    return cfg
