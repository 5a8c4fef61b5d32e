"""Invariant and property self-checks behind the ``validate`` subcommand.

Each check returns None on success or a short description of the violation.
The suite is a fast, dependency-free subset of the test suite meant for
sanity-checking an installation or a modified configuration.
"""

from __future__ import annotations

import math
import numpy as np

from .controllers import (
    adaptive_weights,
    fuzzy_control,
    lqr_control,
    lqr_gain,
    rshac_control,
    sirm_infer,
    solve_dare,
    spectral_radius,
    closed_loop_matrix,
)
from .harness import EpisodeSpec, make_controller, run_episode
from .hedge import generate_sqsm, msi, sqm_size_reference
from .plant import PlantState, discretize, linearize, nonlinear_derivative

__all__ = ["run_all"]


def _check_sqsm_properties(cfg):
    for n in (1, 3, 5, 7, 9, 13):
        for theta in (0.2, 0.5, 0.8):
            for alpha in (0.1, 0.35, 0.5, 0.9):
                frame = generate_sqsm(n, theta, alpha)
                values = frame.values
                mid = msi(n)
                if values[mid - 1] != theta:
                    return f"median value is not theta for n={n}"
                for i, v in enumerate(values):
                    if not (0.0 < v < 2.0 * theta):
                        return f"value outside (0, 2 theta) for n={n}"
                    if i and v <= values[i - 1]:
                        return f"values not strictly increasing for n={n}"
                    if abs(v + values[n - 1 - i] - 2.0 * theta) > 1e-12:
                        return f"values not symmetric for n={n}"
                # closed-form evaluation, index by index
                for idx in range(1, n + 1):
                    if idx < mid:
                        want = theta * (1.0 - alpha**idx)
                    elif idx > mid:
                        want = theta * (1.0 + alpha ** (n + 1 - idx))
                    else:
                        want = theta
                    if values[idx - 1] != want:
                        return f"recursion disagrees with closed form at index {idx}"
    return None


def _check_legacy_quantifier_agreement(cfg):
    for theta in (0.3, 0.5, 0.7):
        for alpha in (0.2, 0.5, 0.8):
            legacy = sqm_size_reference(theta, alpha)
            frame = generate_sqsm(7, theta, alpha)
            if legacy[3] != frame.values[3]:
                return "neutral label disagrees with the legacy quantifier"
    return None


def _check_sigmoid_properties(cfg):
    m = cfg.rshac.q.semantic_map
    if m.forward(m.c) != 0.5:
        return "center does not map to 0.5"
    prev = -1.0
    # stay within +-6 logistic units: farther out the curve is flat to
    # machine precision and finite differences are pure cancellation noise
    for i in range(201):
        x = m.c + (i - 100) * 0.06 / m.a
        xs = m.forward(x)
        if xs <= prev:
            return "sigmoid map is not strictly increasing"
        prev = xs
        d = 1e-6 / m.a
        fd = (m.forward(x + d) - m.forward(x - d)) / (2.0 * d)
        want = m.a * xs * (1.0 - xs)
        if abs(fd - want) > 1e-6 * max(abs(want), 1e-12):
            return f"derivative identity fails at x={x:.3f}"
    return None


def _check_round_trips(cfg):
    maps = [ch.semantic_map for ch in cfg.rshac.channels] + list(cfg.fuzzy.channels)
    for m in maps:
        if m.is_linear:
            lo, hi = m.crisp_lo, m.crisp_hi
            points = [lo + (hi - lo) * f for f in (0.05, 0.25, 0.5, 0.777, 0.95)]
        else:
            points = [m.c + v / m.a for v in (-4.0, -1.0, -0.1, 0.0, 0.2, 3.5)]
        for x in points:
            back = m.inverse(m.forward(x))
            if abs(back - x) > 1e-9 * max(1.0, abs(x)):
                return f"round trip off by {back - x:g} at x={x:g}"
    return None


def _check_sirm_identity(cfg):
    for i in range(101):
        xs = i / 100.0
        if abs(sirm_infer(xs, cfg.fuzzy) - xs) > 1e-12:
            return f"rule surface differs from identity at {xs}"
    return None


def _check_weights(cfg):
    l1, l2, blend = cfg.rshac.l1, cfg.rshac.l2, cfg.rshac.weight_blend
    for q in (0.0, 0.03, l1, 0.2, 0.5, l2, 1.2):
        w = adaptive_weights(q, l1, l2, blend)
        if abs(sum(w) - 1.0) > 1e-12:
            return f"weights do not sum to 1 at q={q}"
        if any(wi < 0.0 for wi in w):
            return f"negative weight at q={q}"
    eps = 1e-9
    for edge in (l1, l2):
        left = adaptive_weights(edge - eps, l1, l2, blend)
        right = adaptive_weights(edge + eps, l1, l2, blend)
        if any(abs(a - b) > 1e-6 for a, b in zip(left, right)):
            return f"weights discontinuous at {edge}"
    return None


def _check_plant(cfg):
    p = cfg.plant
    if nonlinear_derivative(PlantState(0, 0, 0, 0), 0.0, p) != (0, 0, 0, 0):
        return "upright fixed point is not stationary"
    model = linearize(p)
    h = 1e-6
    for j in range(4):
        bumped = [0.0] * 4
        bumped[j] = h
        up = nonlinear_derivative(PlantState(*bumped), 0.0, p)
        bumped[j] = -h
        dn = nonlinear_derivative(PlantState(*bumped), 0.0, p)
        for i in range(4):
            fd = (up[i] - dn[i]) / (2.0 * h)
            if abs(fd - model.A[i, j]) > 1e-6:
                return f"Jacobian mismatch at A[{i}][{j}]"
    d = discretize(model, p.Ts)
    if abs(d.A[0, 1] - p.Ts) > 0.0:
        return "discretization lost the integrator structure"
    return None


def _check_lqr(cfg):
    model = discretize(linearize(cfg.plant), cfg.plant.Ts)
    P = solve_dare(model.A, model.B, cfg.lqr.Q, cfg.lqr.r)
    BtP = model.B.T @ P
    gain = np.linalg.solve(np.atleast_2d(cfg.lqr.r) + BtP @ model.B, BtP @ model.A)
    residual = model.A.T @ P @ model.A - (model.A.T @ P @ model.B) @ gain \
        + cfg.lqr.Q - P
    if np.max(np.abs(residual)) >= 1e-8:
        return f"Riccati residual {np.max(np.abs(residual)):g}"
    K = lqr_gain(cfg.lqr, model)
    rho = spectral_radius(closed_loop_matrix(model, K))
    if rho >= 1.0:
        return f"closed loop unstable, spectral radius {rho:g}"
    return None


def _odd_symmetry_states():
    return [PlantState(0.11, -0.4, 0.21, -0.9), PlantState(-0.02, 0.1, -0.05, 0.3),
            PlantState(0.3, 1.1, 0.6, 2.0), PlantState(0.004, -0.02, 0.001, 0.015)]


def _check_controller_symmetry(cfg):
    model = discretize(linearize(cfg.plant), cfg.plant.Ts)
    K = tuple(lqr_gain(cfg.lqr, model))
    bounds = (cfg.lqr.u_min, cfg.lqr.u_max)
    laws = [
        ("rshac", lambda s: rshac_control(s, 0.0, cfg.rshac).u),
        ("fc", lambda s: fuzzy_control(s, 0.0, cfg.fuzzy).u),
        ("lqr", lambda s: lqr_control(s, 0.0, K, bounds).u),
    ]
    for name, law in laws:
        for s in _odd_symmetry_states():
            mirrored = PlantState(-s.x, -s.x_dot, -s.q, -s.q_dot)
            if law(mirrored) != -law(s):
                return f"{name} output is not exactly odd at {s}"
    return None


def _check_fixed_point_hold(cfg):
    for name in ("rshac", "fc", "lqr"):
        control_fn = make_controller(name, cfg.plant, cfg.rshac, cfg.fuzzy, cfg.lqr)
        spec = EpisodeSpec(name, PlantState(0.0, 0.0, 0.0, 0.0), duration=1.0,
                           ts=cfg.plant.Ts, integrator=cfg.integrator)
        traj = run_episode(spec, cfg.plant, control_fn)
        if any(s.as_tuple() != (0.0, 0.0, 0.0, 0.0) for s in traj.states):
            return f"{name} drifts from the origin"
        if any(u != 0.0 for u in traj.inputs):
            return f"{name} emits non-zero input at the origin"
    return None


def _check_mirror_episodes(cfg):
    q0 = math.radians(12.0)
    for name in ("rshac", "fc", "lqr"):
        control_fn = make_controller(name, cfg.plant, cfg.rshac, cfg.fuzzy, cfg.lqr)
        up = run_episode(EpisodeSpec(name, PlantState(0, 0, q0, 0), duration=1.5,
                                     ts=cfg.plant.Ts, integrator=cfg.integrator),
                         cfg.plant, control_fn)
        dn = run_episode(EpisodeSpec(name, PlantState(0, 0, -q0, 0), duration=1.5,
                                     ts=cfg.plant.Ts, integrator=cfg.integrator),
                         cfg.plant, control_fn)
        for a, b, ua, ub in zip(up.states, dn.states, up.inputs, dn.inputs):
            if (a.x != -b.x or a.x_dot != -b.x_dot or a.q != -b.q
                    or a.q_dot != -b.q_dot or ua != -ub):
                return f"{name} mirrored episode is not an exact negation"
    return None


_CHECKS = [
    ("semantic values: order, bounds, symmetry, closed form", _check_sqsm_properties),
    ("legacy quantifier agrees at the neutral label", _check_legacy_quantifier_agreement),
    ("sigmoid map: center, monotonicity, derivative identity", _check_sigmoid_properties),
    ("semantic maps round-trip", _check_round_trips),
    ("rule surface is the identity", _check_sirm_identity),
    ("adaptive weights: simplex and continuity", _check_weights),
    ("plant: fixed point and Jacobian", _check_plant),
    ("Riccati solution and closed-loop stability", _check_lqr),
    ("controllers are exactly odd", _check_controller_symmetry),
    ("origin is held exactly", _check_fixed_point_hold),
    ("mirrored episodes negate exactly", _check_mirror_episodes),
]


def run_all(cfg):
    """Yield (name, problem) pairs; problem is None when the check passes."""
    for name, fn in _CHECKS:
        try:
            problem = fn(cfg)
        except Exception as exc:  # a crash is a failure, not an abort
            problem = f"raised {type(exc).__name__}: {exc}"
        yield name, problem
