"""Render benchmark trajectories as figures next to the CSV output."""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["render_experiment_figures"]

_COLORS = {"rshac": "tab:blue", "fc": "tab:orange", "lqr": "tab:green"}
_PRETTY = {"rshac": "RS-HAC", "fc": "FC", "lqr": "LQR"}
_RAD2DEG = 180.0 / math.pi


def _render_scenario(result, scenario, title, path):
    fig, (ax_x, ax_q, ax_u) = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    ref_drawn = False
    for name in result.controllers:
        spec, traj, _ = result.episodes[(name, scenario)]
        t = traj.times
        color = _COLORS.get(name, "tab:gray")
        label = _PRETTY.get(name, name)
        ax_x.plot(t, [s.x for s in traj.states], color=color, label=label, lw=1.2)
        ax_q.plot(t, [s.q * _RAD2DEG for s in traj.states], color=color,
                  label=label, lw=1.2)
        ax_u.plot(t, traj.inputs, color=color, label=label, lw=1.0)
        if not ref_drawn:
            ax_x.plot(t, traj.refs, "k--", lw=0.8, label="reference")
            ref_drawn = True
    ax_x.set_ylabel("cart position (m)")
    ax_q.set_ylabel("pendulum angle (deg)")
    ax_u.set_ylabel("input (m/s$^2$)")
    ax_u.set_xlabel("time (s)")
    for ax in (ax_x, ax_q, ax_u):
        ax.grid(True, alpha=0.3)
    ax_x.legend(loc="upper right", fontsize=9)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_experiment_figures(results, out_dir) -> list[str]:
    """One PNG per scenario: cart position, pendulum angle and input traces."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for result in results:
        for scenario in result.scenarios:
            if result.experiment == "exp1":
                title = f"Balance recovery, initial tilt {scenario[1:]} deg"
            elif result.experiment == "exp2":
                title = "Cart reference step"
            else:
                title = f"{result.experiment}: {scenario}"
            path = os.path.join(out_dir, f"fig_{result.experiment}_{scenario}.png")
            paths.append(_render_scenario(result, scenario, title, path))
    return paths
