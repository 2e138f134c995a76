"""Command-line driver: presets, experiment orchestration, CSV/JSON output.

Subcommands map onto experiments:

    eigen    reflection-coefficient scan vs transverse velocity
    toa      arrival-time distribution by quadrature (1D or 2D model)
    oracle   grid-propagation cross-check, same CSV schema plus diagnostics
    deconv   detection-delay deconvolution of a previously computed Pi CSV
    compare  2D vs 1D distributions side by side with their L1 distance

Outputs are deterministic: identical configs produce byte-identical CSVs
regardless of --threads, and each run writes a JSON sidecar echoing the
fully resolved configuration so it can be replayed exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .config import (
    ENV_PREFIX, UNIT_SUFFIXES, RunConfig, build_run_config, env_overrides,
    merge, parse_number, read_config_file,
)
from .eigen2d import solve_2d_arrays
from .errors import ConfigError, NumericalGuardError
from .fluxdeconv import deconvolve, flux_xline, w_at_rest
from .oracle import ConditionalPropagator, initial_state, pi_from_norm, pi_from_population, validate_grid_for_packet
from .packet import GaussianPacket2D
from .physparams import HBAR, kinetic_detuning
from .toa import ToaSeries, l1_distance, pi_1d, pi_2d

CSV_HEADER = "# toa-sim csv v1"

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_CS = {
    "mass": "2.2069e-25",
    "rabi": "1.67e8",
    "decay": "3.3e8",
    "laser_detuning": "0",
    "laser_wavenumber": "7.37e6",
}

_FIG_PACKET = {
    "x0": "-1.32e-6",
    "dx": "0.24e-6",
    "vx0": "9cm/s",
    "y0": "0",
    "dy": "0.24e-6",
    "ky0": "0",
}

PRESETS = {
    # reflection scan vs transverse velocity at the reference parameters
    "fig5": {
        "run": {"experiment": "eigen-scan"},
        "params": dict(_CS),
        "scan": {"vx": "9cm/s", "vy_min": "-150", "vy_max": "150", "n_vy": "301"},
        "output": {"prefix": "fig5"},
    },
    # family of distributions for shrinking transverse width
    "fig2": {
        "run": {"experiment": "toa-2d"},
        "params": dict(_CS),
        "packet": dict(_FIG_PACKET, dy_list="2.4e-11,2.4e-12,7.2e-13,2.4e-13"),
        "quadrature": {"n_kx": "512", "n_ky": "160", "t_max": "8e-5", "n_t": "401"},
        "output": {"prefix": "fig2"},
    },
    # oblique incidence, positive transverse velocities, with compensated runs
    "fig3": {
        "run": {"experiment": "toa-2d", "include_compensated": "true"},
        "params": dict(_CS),
        "packet": dict(_FIG_PACKET, vy_list="30,60,90"),
        "quadrature": {"n_kx": "192", "n_ky": "48", "t_max": "8e-5", "n_t": "401"},
        "output": {"prefix": "fig3"},
    },
    # oblique incidence, negative transverse velocities
    "fig4": {
        "run": {"experiment": "toa-2d", "include_compensated": "true"},
        "params": dict(_CS),
        "packet": dict(_FIG_PACKET, vy_list="-30,-60,-90"),
        "quadrature": {"n_kx": "192", "n_ky": "48", "t_max": "8e-5", "n_t": "401"},
        "output": {"prefix": "fig4"},
    },
}

_SUBCOMMAND_EXPERIMENTS = {
    "eigen": ("eigen-scan",),
    "toa": ("toa-1d", "toa-2d"),
    "oracle": ("oracle",),
    "deconv": ("deconv",),
    "compare": ("compare-1d2d",),
}


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_csv(path: str, columns: dict) -> None:
    """Write named columns; floats rendered shortest-roundtrip, LF endings."""
    names = list(columns)
    rows = len(next(iter(columns.values())))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.write(",".join(names) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(columns[name][i]) for name in names) + "\n")


def read_pi_csv(path: str):
    """Read back (times, pi_raw) from a toa-sim CSV."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    header = lines[0].split(",")
    try:
        t_col = header.index("t")
        pi_col = header.index("pi_raw")
    except ValueError:
        raise ConfigError(f"{path} is not a toa-sim Pi CSV (needs t, pi_raw columns)")
    data = [ln.split(",") for ln in lines[1:]]
    times = np.array([float(row[t_col]) for row in data])
    pi = np.array([float(row[pi_col]) for row in data])
    return times, pi


def write_metadata(path: str, cfg: RunConfig, outputs: list, diagnostics: dict) -> None:
    payload = {
        "tool": "toa-sim",
        "version": __version__,
        "experiment": cfg.experiment,
        "resolved_config": cfg.resolved,
        "outputs": outputs,
        "diagnostics": diagnostics,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _series_columns(series: ToaSeries) -> dict:
    return {
        "t": series.times,
        "pi_raw": series.pi,
        "pi_clipped": series.pi_clipped,
        "cumulative": series.cumulative,
    }


def run_eigen(cfg: RunConfig, out_dir: str, threads: int) -> list:
    scan = cfg.scan
    vy = np.linspace(scan["vy_min"], scan["vy_max"], scan["n_vy"])
    ky = cfg.params.mass * vy / HBAR
    sol = solve_2d_arrays(cfg.params, scan["kx"], ky)
    prefix = cfg.prefix or "eigen"
    path = os.path.join(out_dir, f"{prefix}.csv")
    write_csv(path, {
        "v_y": vy,
        "k_y": ky,
        "abs_R1_sq": np.abs(sol.R1) ** 2,
        "abs_R2_sq": np.abs(sol.R2) ** 2,
        "R1_re": sol.R1.real, "R1_im": sol.R1.imag,
        "R2_re": sol.R2.real, "R2_im": sol.R2.imag,
        "C_plus_re": sol.C_plus.real, "C_plus_im": sol.C_plus.imag,
        "C_minus_re": sol.C_minus.real, "C_minus_im": sol.C_minus.imag,
    })
    meta = os.path.join(out_dir, f"{prefix}_meta.json")
    write_metadata(meta, cfg, [os.path.basename(path)], {"kx": scan["kx"]})
    return [path, meta]


def _write_series(path: str, series: ToaSeries, extra_columns: dict | None = None) -> None:
    columns = _series_columns(series)
    if extra_columns:
        columns.update(extra_columns)
    write_csv(path, columns)


def run_toa_1d(cfg: RunConfig, out_dir: str, threads: int) -> list:
    series = pi_1d(cfg.params, cfg.packet, cfg.quadrature)
    prefix = cfg.prefix or "toa1d"
    path = os.path.join(out_dir, f"{prefix}.csv")
    _write_series(path, series)
    meta = os.path.join(out_dir, f"{prefix}_meta.json")
    write_metadata(meta, cfg, [os.path.basename(path)], series.metadata)
    return [path, meta]


def _with_detuning(params, detuning):
    """Copy of params with the laser detuning replaced (compensation runs)."""
    from .physparams import PhysParams
    return PhysParams(
        mass=params.mass, rabi=params.rabi, decay=params.decay,
        laser_detuning=detuning, laser_wavenumber=params.laser_wavenumber,
    )


def run_toa_2d(cfg: RunConfig, out_dir: str, threads: int) -> list:
    prefix = cfg.prefix or "toa2d"
    base = cfg.packet
    outputs = []
    diagnostics = {}

    def emit(tag: str, series: ToaSeries):
        path = os.path.join(out_dir, f"{prefix}{tag}.csv")
        _write_series(path, series)
        outputs.append(path)
        diagnostics[f"run{tag}" if tag else "run"] = series.metadata

    if cfg.dy_list is None and cfg.vy_list is None:
        emit("", pi_2d(cfg.params, base, cfg.quadrature, threads=threads))
    else:
        baseline = pi_1d(cfg.params, base.x_marginal(), cfg.quadrature)
        path = os.path.join(out_dir, f"{prefix}_1d.csv")
        _write_series(path, baseline)
        outputs.append(path)
        diagnostics["baseline_1d"] = baseline.metadata
        if cfg.dy_list is not None:
            for i, dy in enumerate(cfg.dy_list):
                packet = GaussianPacket2D(
                    x0=base.x0, y0=base.y0, dx=base.dx, dy=dy,
                    kx0=base.kx0, ky0=base.ky0, diagnostic=base.diagnostic,
                )
                emit(f"_dy{i}", pi_2d(cfg.params, packet, cfg.quadrature, threads=threads))
        else:
            for i, vy in enumerate(cfg.vy_list):
                ky0 = cfg.params.mass * vy / HBAR
                packet = GaussianPacket2D(
                    x0=base.x0, y0=base.y0, dx=base.dx, dy=base.dy,
                    kx0=base.kx0, ky0=ky0, diagnostic=base.diagnostic,
                )
                emit(f"_vy{i}", pi_2d(cfg.params, packet, cfg.quadrature, threads=threads))
                if cfg.include_compensated:
                    comp = _with_detuning(cfg.params, kinetic_detuning(cfg.params, ky0).total)
                    emit(f"_vy{i}_comp", pi_2d(comp, packet, cfg.quadrature, threads=threads))

    meta = os.path.join(out_dir, f"{prefix}_meta.json")
    write_metadata(meta, cfg, [os.path.basename(p) for p in outputs], diagnostics)
    return outputs + [meta]


def run_oracle(cfg: RunConfig, out_dir: str, threads: int) -> list:
    validate_grid_for_packet(cfg.grid, cfg.params, cfg.packet)
    propagator = ConditionalPropagator(cfg.params, cfg.grid)
    record, _ = propagator.run(initial_state(cfg.packet, cfg.grid))
    series = pi_from_norm(record)
    series_pop = pi_from_population(record, cfg.params)
    prefix = cfg.prefix or "oracle"
    path = os.path.join(out_dir, f"{prefix}.csv")
    _write_series(path, series, {
        "norm_sq": record.norm_sq,
        "boundary_frac": record.boundary_frac,
    })
    peak = np.max(np.abs(series.pi)) or 1.0
    diagnostics = {
        **series.metadata,
        "eq3_eq4_max_dev_frac_of_peak": float(
            np.max(np.abs(series.pi - series_pop.pi)) / peak
        ),
        "dt": cfg.grid.dt,
        "n_steps": cfg.grid.n_steps,
    }
    meta = os.path.join(out_dir, f"{prefix}_meta.json")
    write_metadata(meta, cfg, [os.path.basename(path)], diagnostics)
    return [path, meta]


def run_deconv(cfg: RunConfig, out_dir: str, threads: int) -> list:
    times, pi_values = read_pi_csv(cfg.deconv["input_pi"])
    pi_series = ToaSeries.from_values(times, pi_values, {"source": cfg.deconv["input_pi"]})
    w = w_at_rest(cfg.params, times)
    ideal = deconvolve(pi_series, w, epsilon=cfg.deconv["epsilon"])
    flux = flux_xline(cfg.packet, cfg.params.mass, times)
    prefix = cfg.prefix or "deconv"
    p_id = os.path.join(out_dir, f"{prefix}_pi_id.csv")
    _write_series(p_id, ideal)
    p_w = os.path.join(out_dir, f"{prefix}_w.csv")
    write_csv(p_w, {"t": w.times, "w": w.values})
    p_flux = os.path.join(out_dir, f"{prefix}_flux.csv")
    write_csv(p_flux, {"t": flux.times, "jbar_x": flux.values})
    flux_series = ToaSeries.from_values(flux.times, flux.values, {})
    diagnostics = {
        "epsilon": cfg.deconv["epsilon"],
        "l1_pi_id_vs_flux": l1_distance(ideal, flux_series),
    }
    meta = os.path.join(out_dir, f"{prefix}_meta.json")
    write_metadata(meta, cfg, [os.path.basename(x) for x in (p_id, p_w, p_flux)], diagnostics)
    return [p_id, p_w, p_flux, meta]


def run_compare(cfg: RunConfig, out_dir: str, threads: int) -> list:
    series2d = pi_2d(cfg.params, cfg.packet, cfg.quadrature, threads=threads)
    series1d = pi_1d(cfg.params, cfg.packet.x_marginal(), cfg.quadrature)
    prefix = cfg.prefix or "compare"
    p2 = os.path.join(out_dir, f"{prefix}_2d.csv")
    p1 = os.path.join(out_dir, f"{prefix}_1d.csv")
    _write_series(p2, series2d)
    _write_series(p1, series1d)
    diagnostics = {
        "l1_2d_vs_1d": l1_distance(series2d, series1d),
        "run_2d": series2d.metadata,
        "run_1d": series1d.metadata,
    }
    meta = os.path.join(out_dir, f"{prefix}_meta.json")
    write_metadata(meta, cfg, [os.path.basename(p2), os.path.basename(p1)], diagnostics)
    return [p2, p1, meta]


_RUNNERS = {
    "eigen-scan": run_eigen,
    "toa-1d": run_toa_1d,
    "toa-2d": run_toa_2d,
    "oracle": run_oracle,
    "deconv": run_deconv,
    "compare-1d2d": run_compare,
}

_EPILOG = f"""\
config format:
  INI-style sections of key = value lines.  Numbers take scientific
  notation and optional unit suffixes ({", ".join(sorted(UNIT_SUFFIXES))}),
  e.g.  dx = 0.24um  or  vx0 = 9cm/s.
  Environment variables {ENV_PREFIX}<SECTION>_<KEY> override file values,
  e.g. {ENV_PREFIX}PARAMS_DECAY=1e8.
  Precedence: preset < config file < environment.

csv schema ({CSV_HEADER}):
  comma-separated, '.' decimal, header row, UTF-8, LF line endings.
  Distribution files carry t, pi_raw, pi_clipped, cumulative; pi_raw keeps
  small negative quadrature noise, pi_clipped floors it at zero.

exit codes: 0 ok, {EXIT_CONFIG} config error, {EXIT_NUMERICAL} numerical guard, {EXIT_IO} I/O failure.
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toa-sim",
        description="first-photon arrival-time model: spectral solver, "
                    "grid oracle, and deconvolution tools",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"toa-sim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, experiments in _SUBCOMMAND_EXPERIMENTS.items():
        p = sub.add_parser(name, help=f"run experiment: {' or '.join(experiments)}")
        p.add_argument("--config", metavar="PATH", help="INI config file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="named parameter preset")
        p.add_argument("--out", metavar="DIR", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=1, metavar="N",
                       help="worker threads (results identical for any N)")
    return parser


def _resolve_config(args) -> RunConfig:
    layers = []
    if args.preset:
        layers.append(PRESETS[args.preset])
    if args.config:
        layers.append(read_config_file(args.config))
    layers.append(env_overrides())
    raw = merge(*layers)
    if not raw:
        raise ConfigError("no configuration given; use --config and/or --preset")
    allowed = _SUBCOMMAND_EXPERIMENTS[args.command]
    raw.setdefault("run", {}).setdefault(
        "experiment", allowed[0] if len(allowed) == 1 else ""
    )
    if raw["run"]["experiment"] not in allowed:
        raise ConfigError(
            f"subcommand {args.command!r} runs {' or '.join(allowed)}, "
            f"not {raw['run']['experiment']!r}"
        )
    return build_run_config(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _resolve_config(args)
        os.makedirs(args.out, exist_ok=True)
        outputs = _RUNNERS[cfg.experiment](cfg, args.out, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in outputs:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
