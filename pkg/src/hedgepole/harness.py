"""Closed-loop episodes, stabilization metrics, and the benchmark experiments.

Two experiments make up the benchmark: balancing from an initial pendulum
tilt of 10/20/30 degrees, and stepping the cart reference by 0.2 m at t = 1 s
while keeping the pendulum upright.  Each runs every selected controller for
10 s at 1 kHz and reduces the trajectory to transient time, maximum cart
deviation, control effort, and (for the step case) percent overshoot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .controllers import (
    FuzzyConfig,
    LqrConfig,
    RsHacConfig,
    fuzzy_control,
    lqr_control,
    lqr_gain,
    rshac_control,
)
from .plant import CartPoleParams, PlantState, discretize, integrate_step, linearize

__all__ = [
    "CONTROLLER_IDS",
    "EpisodeSpec",
    "Trajectory",
    "Metrics",
    "ComparisonCell",
    "ExperimentResult",
    "stability_satisfied",
    "make_controller",
    "run_episode",
    "transient_time",
    "max_position_deviation",
    "control_effort",
    "overshoot_percent",
    "episode_metrics",
    "run_experiment1",
    "run_experiment2",
    "compare",
    "trajectory_csv",
    "metrics_csv",
]

CONTROLLER_IDS = ("rshac", "fc", "lqr")

# stabilization box: position (m), velocity (m/s), angle (rad), rate (rad/s)
STAB_POS = 0.02
STAB_VEL = 0.02
STAB_ANG = math.radians(0.5)
STAB_RATE = math.radians(0.5)

DWELL_DEFAULT = 0.5  # s the state must stay inside the box


def stability_satisfied(s: PlantState, x_ref: float) -> bool:
    """All four stabilization conditions at once (inclusive thresholds)."""
    return (abs(s.x - x_ref) <= STAB_POS
            and abs(s.x_dot) <= STAB_VEL
            and abs(s.q) <= STAB_ANG
            and abs(s.q_dot) <= STAB_RATE)


@dataclass(frozen=True)
class EpisodeSpec:
    """One closed-loop run: controller, initial state, reference, timing."""

    controller: str
    x0: PlantState
    x_ref: float = 0.0
    step_to: float | None = None   # reference value after the step, if any
    t_step: float | None = None    # step instant, s
    duration: float = 10.0
    ts: float = 0.001
    integrator: str = "rk4"

    def __post_init__(self):
        if self.controller not in CONTROLLER_IDS:
            raise ValueError(f"unknown controller {self.controller!r}")
        if not self.duration > 0.0 or not self.ts > 0.0:
            raise ValueError("duration and ts must be strictly positive")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if (self.step_to is None) != (self.t_step is None):
            raise ValueError("step_to and t_step must be given together")
        if self.t_step is not None and not 0.0 <= self.t_step < self.duration:
            raise ValueError("t_step must lie in [0, duration)")


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled closed-loop record, including the t = 0 sample."""

    times: tuple[float, ...]
    states: tuple[PlantState, ...]
    inputs: tuple[float, ...]
    refs: tuple[float, ...]
    blew_up: bool = False

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.states) == len(self.inputs) == len(self.refs) == n) or n == 0:
            raise ValueError("trajectory columns must be non-empty and equal-length")

    @property
    def ts(self) -> float:
        return self.times[1] - self.times[0] if len(self.times) > 1 else 0.0

    def activation_index(self) -> int:
        """First sample where the reference differs from its initial value."""
        first = self.refs[0]
        for i, r in enumerate(self.refs):
            if r != first:
                return i
        return 0


@dataclass(frozen=True)
class Metrics:
    """Per-episode performance indices."""

    transient_time: float | None    # s from reference activation; None if never
    stabilized: bool
    max_position_deviation: float   # m
    control_effort: float           # m/s; full-episode sum when not stabilized
    overshoot_pct: float | None     # %, step episodes only


def make_controller(name: str,
                    plant: CartPoleParams,
                    rshac_cfg: RsHacConfig | None = None,
                    fuzzy_cfg: FuzzyConfig | None = None,
                    lqr_cfg: LqrConfig | None = None):
    """Bind a controller id to a (state, x_ref) -> ControlOutput callable."""
    if name == "rshac":
        cfg = rshac_cfg or RsHacConfig.default()
        return lambda s, x_ref: rshac_control(s, x_ref, cfg)
    if name == "fc":
        cfg = fuzzy_cfg or FuzzyConfig.default()
        return lambda s, x_ref: fuzzy_control(s, x_ref, cfg)
    if name == "lqr":
        cfg = lqr_cfg or LqrConfig.default()
        K = tuple(lqr_gain(cfg, discretize(linearize(plant), plant.Ts)))
        bounds = (cfg.u_min, cfg.u_max)
        return lambda s, x_ref: lqr_control(s, x_ref, K, bounds)
    raise ValueError(f"unknown controller {name!r}")


def run_episode(spec: EpisodeSpec, params: CartPoleParams,
                control_fn) -> Trajectory:
    """Simulate one closed-loop episode.

    Each tick computes u from the current state and current reference, then
    holds it for one plant step (zero-order hold).  The reference switches on
    the sample grid at round(t_step / ts).  A non-finite state aborts the
    episode and flags the partial trajectory.
    """
    n_steps = int(round(spec.duration / spec.ts))
    k_step = int(round(spec.t_step / spec.ts)) if spec.t_step is not None else None
    if params.Ts != spec.ts:
        params = replace(params, Ts=spec.ts)
    times, states, inputs, refs = [], [], [], []
    s = spec.x0
    blew_up = False
    for k in range(n_steps + 1):
        if not s.is_finite():
            blew_up = True
            break
        ref = spec.step_to if (k_step is not None and k >= k_step) else spec.x_ref
        out = control_fn(s, ref)
        times.append(k * spec.ts)
        states.append(s)
        inputs.append(out.u)
        refs.append(ref)
        if k < n_steps:
            s = integrate_step(s, out.u, params, spec.integrator)
    return Trajectory(tuple(times), tuple(states), tuple(inputs), tuple(refs),
                      blew_up=blew_up)


def _box_flags(traj: Trajectory) -> list[bool]:
    return [stability_satisfied(s, r) for s, r in zip(traj.states, traj.refs)]


def _transient_index(traj: Trajectory, dwell: float) -> tuple[int | None, int]:
    ok = _box_flags(traj)
    n = len(ok)
    k0 = traj.activation_index()
    ts = traj.ts
    dwell_steps = int(round(dwell / ts)) if (ts > 0.0 and dwell > 0.0) else 0
    runs = [0] * n
    run = 0
    for i in range(n - 1, -1, -1):
        run = run + 1 if ok[i] else 0
        runs[i] = run
    for i in range(k0, n):
        if runs[i] >= dwell_steps + 1 and i + dwell_steps <= n - 1:
            return i, k0
    return None, k0


def transient_time(traj: Trajectory, dwell: float = DWELL_DEFAULT) -> float | None:
    """Time from reference activation until the state enters the box and
    stays inside for the dwell window; None when that never happens."""
    k_star, k0 = _transient_index(traj, dwell)
    if k_star is None:
        return None
    return traj.times[k_star] - traj.times[k0]


def max_position_deviation(traj: Trajectory) -> float:
    return max(abs(s.x - r) for s, r in zip(traj.states, traj.refs))


def control_effort(traj: Trajectory, k_end: int | None = None) -> float:
    """Sum of |u_k| * ts for k = 0 .. k_end (inclusive, clipped to the episode)."""
    last = len(traj.inputs) - 1 if k_end is None else min(k_end, len(traj.inputs) - 1)
    return sum(abs(u) for u in traj.inputs[:last + 1]) * traj.ts


def overshoot_percent(traj: Trajectory) -> float:
    """Percent overshoot of the cart position past a stepped reference."""
    k0 = traj.activation_index()
    step = traj.refs[k0] - traj.refs[0]
    if step == 0.0:
        raise ValueError("overshoot is undefined for a zero-magnitude step")
    sign = 1.0 if step > 0.0 else -1.0
    worst = max((traj.states[k].x - traj.refs[k]) * sign
                for k in range(k0, len(traj.states)))
    return 100.0 * max(0.0, worst) / abs(step)


def episode_metrics(traj: Trajectory, dwell: float = DWELL_DEFAULT) -> Metrics:
    k_star, k0 = _transient_index(traj, dwell)
    stabilized = k_star is not None and not traj.blew_up
    dt = traj.times[k_star] - traj.times[k0] if stabilized else None
    effort = control_effort(traj, k_star if stabilized else None)
    overshoot = None
    if k0 > 0 and traj.refs[k0] != traj.refs[0]:
        overshoot = overshoot_percent(traj)
    return Metrics(dt, stabilized, max_position_deviation(traj), effort, overshoot)


@dataclass(frozen=True)
class ExperimentResult:
    """All episodes of one experiment, keyed by (controller, scenario)."""

    experiment: str
    scenarios: tuple[str, ...]
    controllers: tuple[str, ...]
    episodes: dict  # (controller, scenario) -> (EpisodeSpec, Trajectory, Metrics)

    def metrics(self, controller: str, scenario: str) -> Metrics:
        return self.episodes[(controller, scenario)][2]


def _run_suite(experiment, scenario_specs, params, controllers, rshac_cfg,
               fuzzy_cfg, lqr_cfg, dwell):
    episodes = {}
    for name in controllers:
        control_fn = make_controller(name, params, rshac_cfg, fuzzy_cfg, lqr_cfg)
        for scenario, spec in scenario_specs:
            spec = replace(spec, controller=name)
            traj = run_episode(spec, params, control_fn)
            episodes[(name, scenario)] = (spec, traj, episode_metrics(traj, dwell))
    return ExperimentResult(experiment, tuple(s for s, _ in scenario_specs),
                            tuple(controllers), episodes)


def run_experiment1(params: CartPoleParams | None = None,
                    rshac_cfg: RsHacConfig | None = None,
                    fuzzy_cfg: FuzzyConfig | None = None,
                    lqr_cfg: LqrConfig | None = None,
                    controllers=CONTROLLER_IDS,
                    integrator: str = "rk4",
                    dwell: float = DWELL_DEFAULT,
                    duration: float = 10.0) -> ExperimentResult:
    """Balance recovery from initial tilts of 10, 20 and 30 degrees."""
    params = params or CartPoleParams()
    scenario_specs = []
    for deg in (10, 20, 30):
        spec = EpisodeSpec("rshac", PlantState(0.0, 0.0, math.radians(deg), 0.0),
                           duration=duration, ts=params.Ts, integrator=integrator)
        scenario_specs.append((f"q{deg}", spec))
    return _run_suite("exp1", scenario_specs, params, controllers,
                      rshac_cfg, fuzzy_cfg, lqr_cfg, dwell)


def run_experiment2(params: CartPoleParams | None = None,
                    rshac_cfg: RsHacConfig | None = None,
                    fuzzy_cfg: FuzzyConfig | None = None,
                    lqr_cfg: LqrConfig | None = None,
                    controllers=CONTROLLER_IDS,
                    integrator: str = "rk4",
                    dwell: float = DWELL_DEFAULT,
                    duration: float = 10.0,
                    step_to: float = 0.2,
                    t_step: float = 1.0) -> ExperimentResult:
    """Step the cart reference while holding the pendulum upright."""
    params = params or CartPoleParams()
    spec = EpisodeSpec("rshac", PlantState(0.0, 0.0, 0.0, 0.0),
                       step_to=step_to, t_step=t_step,
                       duration=duration, ts=params.Ts, integrator=integrator)
    return _run_suite("exp2", [("step", spec)], params, controllers,
                      rshac_cfg, fuzzy_cfg, lqr_cfg, dwell)


@dataclass(frozen=True)
class ComparisonCell:
    """Relative standing of the reference controller on one index."""

    metric: str
    percent: float | None
    direction: str  # "up" = reference better, "down" = worse, "equal", "flagged"


def compare(reference: Metrics, other: Metrics) -> dict[str, ComparisonCell]:
    """Percent differences of another controller against a reference row.

    Lower is better for every index.  Ratio indices are expressed relative
    to the reference value; overshoot, already a percentage, compares by
    difference in points.  An up arrow means the reference controller wins.
    """
    cells = {}
    pairs = [
        ("dt", reference.transient_time, other.transient_time, True),
        ("dxm", reference.max_position_deviation, other.max_position_deviation, True),
        ("sigma_u", reference.control_effort, other.control_effort, True),
        ("overshoot_pct", reference.overshoot_pct, other.overshoot_pct, False),
    ]
    for name, ours, theirs, is_ratio in pairs:
        if ours is None and theirs is None:
            continue
        if ours is None or theirs is None:
            cells[name] = ComparisonCell(name, None, "flagged")
            continue
        if ours == theirs:
            cells[name] = ComparisonCell(name, 0.0, "equal")
            continue
        if is_ratio:
            if ours == 0.0:
                cells[name] = ComparisonCell(name, None, "flagged")
                continue
            pct = abs(theirs - ours) / ours * 100.0
        else:
            pct = abs(theirs - ours)
        cells[name] = ComparisonCell(name, pct, "up" if theirs > ours else "down")
    return cells


def _fmt(v: float) -> str:
    return format(v, ".12g")


def trajectory_csv(traj: Trajectory) -> str:
    """Render a trajectory as CSV with header t,x,x_dot,q,q_dot,u,x_ref."""
    lines = ["t,x,x_dot,q,q_dot,u,x_ref"]
    for t, s, u, r in zip(traj.times, traj.states, traj.inputs, traj.refs):
        lines.append(",".join(map(_fmt, (t, s.x, s.x_dot, s.q, s.q_dot, u, r))))
    return "\n".join(lines) + "\n"


def metrics_csv(rows) -> str:
    """Render (controller, experiment, scenario, Metrics) rows as CSV."""
    lines = ["controller,experiment,scenario,dt,dxm,sigma_u,overshoot_pct,stabilized"]
    for controller, experiment, scenario, m in rows:
        dt = _fmt(m.transient_time) if m.transient_time is not None else ""
        ov = _fmt(m.overshoot_pct) if m.overshoot_pct is not None else ""
        lines.append(",".join([
            controller, experiment, scenario, dt,
            _fmt(m.max_position_deviation), _fmt(m.control_effort), ov,
            "true" if m.stabilized else "false",
        ]))
    return "\n".join(lines) + "\n"
