"""Command-line front end.

``--beta`` is the inverse temperature: ``--beta 0`` is infinite temperature
and ``--beta inf`` is zero temperature.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import acceptance, experiments, report
from .experiments import DEFAULT_BETAS, DEFAULT_S_GRID, beta_label
from .states import INFINITY, U2Kind

COMMANDS = ("fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig4", "sweep", "verify")
CONFIG_KEYS = ("command", "beta", "s_grid", "lambda", "p", "u2", "out_dir", "plot", "workers")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    """A configuration value is malformed or out of range."""


@dataclass
class RunConfig:
    command: str
    beta: Optional[str] = None
    s_grid: list = field(default_factory=lambda: list(DEFAULT_S_GRID))
    lam: Optional[float] = None
    p: float = 0.5
    u2: str = "pswap"
    out_dir: Path = Path("results")
    plot: bool = False
    workers: int = 1
    tol: Optional[float] = None

    def betas(self) -> list[float]:
        if self.beta is not None:
            return [parse_beta(self.beta)]
        if self.command == "fig4":
            return [INFINITY]
        if self.command == "fig3c":
            return [0.0]
        return list(DEFAULT_BETAS)


def parse_beta(text) -> float:
    s = str(text).strip().lower()
    if s in ("inf", "infinity"):
        return INFINITY
    try:
        value = float(s)
    except ValueError:
        raise ConfigError(f"beta: expected 'inf' or a number >= 0, got {text!r}") from None
    if math.isnan(value) or value < 0:
        raise ConfigError(f"beta: must be >= 0 or 'inf', got {text!r}")
    return value


def parse_s_grid(text: str) -> list[float]:
    """``"a,b,step"`` to the inclusive grid ``a, a+step, ..., b``."""
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"s_grid: expected 'start,stop,step', got {text!r}")
    try:
        a, b, step = (float(x) for x in parts)
    except ValueError:
        raise ConfigError(f"s_grid: non-numeric entry in {text!r}") from None
    if step <= 0 or b < a:
        raise ConfigError(f"s_grid: need stop >= start and step > 0, got {text!r}")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + k * step, 12) for k in range(n)]


def _unit(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {value!r}") from None
    if not 0.0 <= v <= 1.0:
        raise ConfigError(f"{name}: must lie in [0, 1], got {v}")
    return v


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command: unknown command {cfg.command!r}")
    if cfg.beta is not None:
        parse_beta(cfg.beta)
    if not cfg.s_grid:
        raise ConfigError("s_grid: empty grid")
    cfg.s_grid = [_unit("s", s) for s in cfg.s_grid]
    if cfg.lam is not None:
        cfg.lam = _unit("lambda", cfg.lam)
    cfg.p = _unit("p", cfg.p)
    if cfg.u2 not in {k.value for k in U2Kind}:
        raise ConfigError(f"u2: expected 'pswap' or 'pcnot', got {cfg.u2!r}")
    if int(cfg.workers) < 1:
        raise ConfigError(f"workers: must be >= 1, got {cfg.workers}")
    cfg.workers = int(cfg.workers)
    cfg.out_dir = Path(cfg.out_dir)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="switchthermo",
        description="Quantum-switched thermalizing channels: figure drivers and acceptance checks.",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--beta", help="inverse temperature: a number >= 0, or 'inf' (zero temperature)")
    grid = ap.add_mutually_exclusive_group()
    grid.add_argument("--s", type=float, help="single thermalization strength")
    grid.add_argument("--s-grid", dest="s_grid", help="grid 'start,stop,step' (default 0,1,0.1)")
    ap.add_argument("--lambda", dest="lam", type=float, help="switch-on weight of the control state")
    ap.add_argument("--p", type=float, help="prior of message a=0 (default 0.5)")
    ap.add_argument("--u2", choices=[k.value for k in U2Kind], help="second interaction (sweep only)")
    ap.add_argument("--out", dest="out_dir", help="output directory (default ./results)")
    ap.add_argument("--plot", action="store_true", default=None, help="also write an SVG chart")
    ap.add_argument("--workers", type=int, help="threads for independent grid points (default 1)")
    ap.add_argument("--config", help="JSON file with RunConfig fields")
    ap.add_argument("--tol", type=float, help="verify: override every structural tolerance")
    return ap


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config: {path} must hold a JSON object")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"config: unknown keys {unknown}")
    return data


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Defaults, then the optional JSON file, then explicit flags."""
    args = build_parser().parse_args(argv)
    cfg = RunConfig(command=args.command)
    if args.command in ("fig3b", "fig3c"):
        cfg.s_grid = [1.0]

    if args.config:
        data = _load_config_file(args.config)
        if "command" in data and data["command"] != args.command:
            raise ConfigError(f"command: config says {data['command']!r} but {args.command!r} was given")
        for key, value in data.items():
            if key == "s_grid":
                if isinstance(value, str):
                    value = parse_s_grid(value)
                elif not isinstance(value, list):
                    raise ConfigError("s_grid: expected a list of numbers or 'start,stop,step'")
                cfg.s_grid = list(value)
            elif key == "lambda":
                cfg.lam = value
            elif key == "beta":
                cfg.beta = None if value is None else str(value)
            elif key != "command":
                setattr(cfg, key, value)

    if args.beta is not None:
        cfg.beta = args.beta
    if args.s is not None:
        cfg.s_grid = [args.s]
    elif args.s_grid is not None:
        cfg.s_grid = parse_s_grid(args.s_grid)
    for name in ("lam", "p", "u2", "out_dir", "plot", "workers", "tol"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    return validate(cfg)


def _write_sweep(cfg: RunConfig, name: str, rows, **plot_kw) -> None:
    path = report.write_csv(rows, cfg.out_dir / f"{name}.csv")
    print(f"wrote {path} ({len(rows)} rows)")
    if cfg.plot:
        svg = report.write_plot(rows, cfg.out_dir / f"{name}.svg", title=name, **plot_kw)
        print(f"wrote {svg}")


def run(cfg: RunConfig) -> int:
    cmd = cfg.command
    if cmd == "verify":
        return acceptance.verify(cfg.tol)

    betas = cfg.betas()
    if cmd == "fig2":
        lambdas = [cfg.lam] if cfg.lam is not None else [0.0, 1.0]
        rows = experiments.fig2_sweep(betas, cfg.s_grid, lambdas, cfg.p, workers=cfg.workers)
        _write_sweep(cfg, "fig2", rows)
    elif cmd == "fig3a":
        checks = experiments.fig3a_energy_check(cfg.s_grid, workers=cfg.workers)
        table = [(c.s, n, f, c.leakage, c.commutator) for c in checks for n, f in enumerate(c.fidelities)]
        path = report.write_table(("s", "n", "fidelity", "leakage", "commutator_norm"), table, cfg.out_dir / "fig3a.csv")
        for c in checks:
            print(f"s={c.s:.12g} mean fidelity={c.mean_fidelity:.6f} leakage={c.leakage:.3g}")
        print(f"wrote {path}")
    elif cmd == "fig3b":
        checks = [g for s in cfg.s_grid for g in experiments.fig3b_gibbs_check(s, betas)]
        table = [(beta_label(g.beta), g.s, g.u2, g.distance) for g in checks]
        path = report.write_table(("beta", "s", "u2", "trace_distance"), table, cfg.out_dir / "fig3b.csv")
        for g in checks:
            print(f"beta={beta_label(g.beta)} s={g.s:.12g} trace distance={g.distance:.3g}")
        print(f"wrote {path}")
    elif cmd == "fig3c":
        rows = []
        for beta in betas:
            for s in cfg.s_grid:
                state, dist = experiments.fig3c_witness(s, beta, 1.0 if cfg.lam is None else cfg.lam)
                print(f"beta={beta_label(beta)} s={s:.12g} trace distance to tau_M={dist:.12g}")
                print(np.array2string(state, precision=6, suppress_small=True))
                rows.append(experiments.fig3c_row(s, beta))
        _write_sweep(cfg, "fig3c", rows)
    elif cmd == "fig3d":
        rows = [
            r for beta in betas for r in experiments.fig3d_gain_vs_cost(cfg.s_grid, beta, cfg.p, workers=cfg.workers)
        ]
        _write_sweep(cfg, "fig3d", rows, fields=("gain_bits", "coherence_cost_bits"))
    elif cmd == "fig4":
        rows = [r for beta in betas for r in experiments.fig4_cnot_sweep(cfg.s_grid, beta, cfg.p, workers=cfg.workers)]
        _write_sweep(cfg, "fig4", rows, reference="bound_off")
    elif cmd == "sweep":
        lam = 1.0 if cfg.lam is None else cfg.lam
        rows = experiments.sweep(cfg.s_grid, betas, [lam], cfg.p, [U2Kind(cfg.u2)], workers=cfg.workers)
        _write_sweep(cfg, "sweep", rows)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_USAGE if exc.code else EXIT_OK
    except ConfigError as exc:
        print(f"switchthermo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(cfg)
    except OSError as exc:
        where = exc.filename or cfg.out_dir
        print(f"switchthermo: I/O error writing {where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
