"""Command-line entry point: run the benchmark, self-validate, print the gain.

Subcommands:
  run       execute the selected experiments; write one trajectory CSV per
            episode, a metrics CSV, and one figure per scenario; print a
            summary table and controller comparison.
  validate  run the library's invariant self-checks and print pass/fail.
  gain      print the optimal regulator gain and closed-loop eigenvalues.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import selfcheck
from .config import ConfigError, RunConfig, parse_config
from .controllers import lqr_gain
from .harness import (
    CONTROLLER_IDS,
    EpisodeSpec,
    episode_metrics,
    compare,
    make_controller,
    metrics_csv,
    run_episode,
    run_experiment1,
    run_experiment2,
    trajectory_csv,
)
from .plant import discretize, linearize
from .report import render_experiment_figures

_PRETTY = {"rshac": "RS-HAC", "fc": "FC", "lqr": "LQR"}
_ARROW = {"up": "↑", "down": "↓", "equal": "", "flagged": "!"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedgepole",
        description="Cart-pole balance benchmark: hedge-algebra, fuzzy and LQR controllers.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run experiments and write CSVs and figures")
    run_p.add_argument("--experiment", choices=("exp1", "exp2", "all"),
                       help="which experiment set to run (default from config)")
    run_p.add_argument("--controller", choices=CONTROLLER_IDS + ("all",),
                       help="restrict to one controller")
    run_p.add_argument("--config", help="path to a key-value config file")
    run_p.add_argument("--out", help="output directory (default results)")
    run_p.add_argument("--integrator", choices=("rk4", "euler"))
    run_p.add_argument("--dwell", type=float,
                       help="seconds the stability box must hold (default 0.5)")

    val_p = sub.add_parser("validate", help="run invariant and property self-checks")
    val_p.add_argument("--config", help="path to a key-value config file")

    gain_p = sub.add_parser("gain", help="print the LQR gain and closed-loop spectrum")
    gain_p.add_argument("--config", help="path to a key-value config file")
    return parser


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return parse_config("")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    updates = {}
    if getattr(args, "experiment", None):
        updates["experiment"] = args.experiment
    if getattr(args, "controller", None):
        updates["controllers"] = (tuple(CONTROLLER_IDS) if args.controller == "all"
                                  else (args.controller,))
    if getattr(args, "out", None):
        updates["out_dir"] = args.out
    if getattr(args, "integrator", None):
        updates["integrator"] = args.integrator
    if getattr(args, "dwell", None) is not None:
        updates["dwell"] = args.dwell
    return replace(cfg, **updates) if updates else cfg


def _experiment_kwargs(cfg: RunConfig) -> dict:
    return dict(params=cfg.plant, rshac_cfg=cfg.rshac, fuzzy_cfg=cfg.fuzzy,
                lqr_cfg=cfg.lqr, controllers=cfg.controllers,
                integrator=cfg.integrator, dwell=cfg.dwell, duration=cfg.duration)


def _run_custom(cfg: RunConfig):
    from .harness import ExperimentResult
    episodes = {}
    for name in cfg.controllers:
        control_fn = make_controller(name, cfg.plant, cfg.rshac, cfg.fuzzy, cfg.lqr)
        spec = EpisodeSpec(name, cfg.custom.x0, x_ref=cfg.custom.x_ref,
                           step_to=cfg.custom.step_to, t_step=cfg.custom.t_step,
                           duration=cfg.duration, ts=cfg.plant.Ts,
                           integrator=cfg.integrator)
        traj = run_episode(spec, cfg.plant, control_fn)
        episodes[(name, "custom")] = (spec, traj, episode_metrics(traj, cfg.dwell))
    return ExperimentResult("custom", ("custom",), tuple(cfg.controllers), episodes)


def _summary_table(results) -> str:
    lines = []
    for result in results:
        header = {"exp1": "Experiment 1: balance recovery",
                  "exp2": "Experiment 2: cart reference step",
                  "custom": "Custom episode"}.get(result.experiment,
                                                  result.experiment)
        lines.append(header)
        cols = []
        for scenario in result.scenarios:
            cols += [f"{scenario}:dt(s)", f"{scenario}:dxm(m)",
                     f"{scenario}:su(m/s)", f"{scenario}:ov(%)"]
        widths = [max(10, len(c) + 1) for c in cols]
        lines.append("  ctrl    " + "".join(c.rjust(w) for c, w in zip(cols, widths)))
        for name in result.controllers:
            cells = []
            for scenario in result.scenarios:
                m = result.metrics(name, scenario)
                cells.append("--" if m.transient_time is None
                             else f"{m.transient_time:.3f}")
                cells.append(f"{m.max_position_deviation:.3f}")
                cells.append(f"{m.control_effort:.3f}")
                cells.append("--" if m.overshoot_pct is None
                             else f"{m.overshoot_pct:.1f}")
            lines.append(f"  {_PRETTY.get(name, name):<8}"
                         + "".join(c.rjust(w) for c, w in zip(cells, widths)))
        lines.append("")
    return "\n".join(lines)


def _comparison_table(results) -> str:
    lines = []
    for result in results:
        if "rshac" not in result.controllers or len(result.controllers) < 2:
            continue
        lines.append(f"RS-HAC improvement per index ({result.experiment}; "
                     "up = RS-HAC better)")
        for other in result.controllers:
            if other == "rshac":
                continue
            for scenario in result.scenarios:
                cells = compare(result.metrics("rshac", scenario),
                                result.metrics(other, scenario))
                shown = []
                for key in ("dt", "dxm", "sigma_u", "overshoot_pct"):
                    if key not in cells:
                        continue
                    cell = cells[key]
                    if cell.percent is None:
                        shown.append(f"{key} !flagged")
                    else:
                        shown.append(f"{key} {_ARROW[cell.direction]}{cell.percent:.0f}%")
                lines.append(f"  vs {_PRETTY.get(other, other):<4} {scenario:<7} "
                             + "  ".join(shown))
        lines.append("")
    return "\n".join(lines)


def _cmd_run(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    results = []
    if cfg.experiment in ("exp1", "all"):
        results.append(run_experiment1(**_experiment_kwargs(cfg)))
    if cfg.experiment in ("exp2", "all"):
        results.append(run_experiment2(**_experiment_kwargs(cfg)))
    if cfg.experiment == "custom":
        results.append(_run_custom(cfg))

    os.makedirs(cfg.out_dir, exist_ok=True)
    metrics_rows = []
    for result in results:
        for name in result.controllers:
            for scenario in result.scenarios:
                spec, traj, metrics = result.episodes[(name, scenario)]
                fname = f"traj_{result.experiment}_{scenario}_{name}.csv"
                with open(os.path.join(cfg.out_dir, fname), "w",
                          encoding="utf-8", newline="") as fh:
                    fh.write(trajectory_csv(traj))
                metrics_rows.append((name, result.experiment, scenario, metrics))
    with open(os.path.join(cfg.out_dir, "metrics.csv"), "w",
              encoding="utf-8", newline="") as fh:
        fh.write(metrics_csv(metrics_rows))
    figures = render_experiment_figures(results, cfg.out_dir)

    print(_summary_table(results))
    print(_comparison_table(results))
    n_csv = sum(len(r.controllers) * len(r.scenarios) for r in results)
    print(f"wrote {n_csv} trajectory CSVs, metrics.csv and "
          f"{len(figures)} figures to {cfg.out_dir}")

    failed = [(r.experiment, s, c) for r in results
              for c in r.controllers for s in r.scenarios
              if not r.metrics(c, s).stabilized]
    for experiment, scenario, controller in failed:
        print(f"NOT STABILIZED: {controller} in {experiment}/{scenario}",
              file=sys.stderr)
    return 1 if failed else 0


def _cmd_validate(args) -> int:
    cfg = _load_config(args.config)
    failures = 0
    for name, problem in selfcheck.run_all(cfg):
        if problem is None:
            print(f"PASS  {name}")
        else:
            failures += 1
            print(f"FAIL  {name}: {problem}")
    print(f"{failures} failure(s)" if failures else "all checks passed")
    return 1 if failures else 0


def _cmd_gain(args) -> int:
    cfg = _load_config(args.config)
    model = discretize(linearize(cfg.plant), cfg.plant.Ts)
    K = lqr_gain(cfg.lqr, model)
    closed = model.A - model.B @ K.reshape(1, -1)
    mags = sorted(abs(v) for v in np.linalg.eigvals(closed))
    print("LQR gain K (u = -K [x - x_ref, x_dot, q, q_dot]):")
    print("  [" + ", ".join(f"{v:.4f}" for v in K) + "]")
    print("closed-loop eigenvalue magnitudes:")
    print("  [" + ", ".join(f"{v:.6f}" for v in mags) + "]")
    print(f"spectral radius: {mags[-1]:.6f} ({'stable' if mags[-1] < 1 else 'UNSTABLE'})")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "gain":
            return _cmd_gain(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
