"""Acceptance suite: runs both benchmark experiments at desk scale and
checks every criterion at its stated tolerance, printing one pass/fail line
per criterion (run with ``pytest -s`` to see them inline).
"""

import math
import random

import numpy as np
import pytest

from hedgepole.controllers import (
    FuzzyConfig,
    LqrConfig,
    RsHacConfig,
    adaptive_weights,
    closed_loop_matrix,
    fuzzy_control,
    lqr_control,
    lqr_gain,
    rshac_control,
    sirm_infer,
    solve_dare,
    spectral_radius,
)
from hedgepole.harness import (
    EpisodeSpec,
    make_controller,
    run_episode,
    run_experiment1,
    run_experiment2,
    stability_satisfied,
    trajectory_csv,
)
from hedgepole.hedge import SemanticMap, generate_sqsm, msi
from hedgepole.plant import (
    CartPoleParams,
    PlantState,
    discretize,
    linearize,
    nonlinear_derivative,
)

PARAMS = CartPoleParams()
DEG = math.pi / 180.0
DWELL = 0.5

# reference benchmark values the suite reproduces
REF_GAIN = (-13.95, -11.69, -56.16, -7.89)
REF_EXP1 = {
    # controller -> scenario -> (dt, dxm, sigma_u)
    "rshac": {"q10": (2.052, 0.106, 1.194), "q20": (2.169, 0.187, 2.835),
              "q30": (2.598, 0.306, 5.121)},
    "fc": {"q10": (5.238, 0.084, 1.921), "q20": (6.205, 0.195, 4.301),
           "q30": (7.289, 0.335, 8.420)},
    "lqr": {"q10": (2.482, 0.106, 0.996), "q20": (2.704, 0.219, 2.049),
            "q30": (2.865, 0.356, 3.324)},
}
REF_EXP2_DT = {"rshac": 2.275, "lqr": 2.347}

_LINES = []


def _criterion(name, ok, detail=""):
    line = f"[acceptance] {'PASS' if ok else 'FAIL'}  {name}"
    if detail:
        line += f"  ({detail})"
    _LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def model():
    return discretize(linearize(PARAMS), PARAMS.Ts)


@pytest.fixture(scope="module")
def gain(model):
    return lqr_gain(LqrConfig.default(), model)


@pytest.fixture(scope="module")
def exp1():
    return run_experiment1(params=PARAMS, dwell=DWELL)


@pytest.fixture(scope="module")
def exp2():
    return run_experiment2(params=PARAMS, dwell=DWELL)


# --------------------------------------------------- criterion 1: LQR gain

def test_c1_gain_matches_reference_within_1pct(gain):
    """Known failing: the angle entry of the computed gain sits 1.4 % from
    the reference value while every other entry is within 0.8 %.  No
    reading of the stated penalty matrices closes the gap, so the check is
    kept at its stated 1 % tolerance and left red rather than loosened.
    """
    devs = [abs((k - r) / r) for k, r in zip(gain, REF_GAIN)]
    detail = "deviations " + ", ".join(f"{d * 100:.2f}%" for d in devs)
    _criterion("1a: regulator gain within 1% per entry", max(devs) <= 0.01,
               detail)


def test_c1_closed_loop_spectral_radius(model, gain):
    rho = spectral_radius(closed_loop_matrix(model, gain))
    _criterion("1b: closed-loop spectral radius < 1", rho < 1.0, f"rho={rho:.6f}")


# ------------------------------------------- criterion 2: LQR benchmark rows

def test_c2_lqr_rows(exp1):
    problems = []
    for scenario, (dt_ref, dxm_ref, su_ref) in REF_EXP1["lqr"].items():
        m = exp1.metrics("lqr", scenario)
        if m.transient_time is None:
            problems.append(f"{scenario}: not stabilized")
            continue
        if abs(m.transient_time - dt_ref) > 0.10 * dt_ref:
            problems.append(f"{scenario}: dt {m.transient_time:.3f} vs {dt_ref}")
        if abs(m.max_position_deviation - dxm_ref) > 0.10 * dxm_ref:
            problems.append(
                f"{scenario}: dxm {m.max_position_deviation:.3f} vs {dxm_ref}")
        if abs(m.control_effort - su_ref) > 0.15 * su_ref:
            problems.append(f"{scenario}: su {m.control_effort:.3f} vs {su_ref}")
    _criterion("2: LQR rows within 10%/10%/15%", not problems,
               "; ".join(problems))


# ------------------------------- criterion 3: RS-HAC and FC benchmark rows

def test_c3_all_scenarios_stabilize(exp1):
    problems = []
    for name in ("rshac", "fc"):
        for scenario in exp1.scenarios:
            spec, traj, m = exp1.episodes[(name, scenario)]
            if not m.stabilized:
                problems.append(f"{name}/{scenario}")
                continue
            # once captured (after the dwell window) the box must hold to
            # the end of the episode, otherwise the dwell is too short
            k_star = traj.times.index(m.transient_time)
            dwell_steps = int(round(DWELL / traj.ts))
            held = all(stability_satisfied(s, r) for s, r in
                       zip(traj.states[k_star + dwell_steps:],
                           traj.refs[k_star + dwell_steps:]))
            if not held:
                problems.append(f"{name}/{scenario}: box exits after capture")
    _criterion("3a: RS-HAC and FC stabilize all scenarios", not problems,
               "; ".join(problems))


def test_c3_transient_windows(exp1):
    problems = []
    for name in ("rshac", "fc"):
        for scenario, (dt_ref, _, _) in REF_EXP1[name].items():
            dt = exp1.metrics(name, scenario).transient_time
            if dt is None or abs(dt - dt_ref) > 0.25 * dt_ref:
                problems.append(f"{name}/{scenario}: {dt} vs {dt_ref}")
    _criterion("3b: RS-HAC and FC transient times within 25%", not problems,
               "; ".join(problems))


def test_c3_orderings(exp1):
    problems = []
    for scenario in exp1.scenarios:
        dts = {n: exp1.metrics(n, scenario).transient_time
               for n in ("rshac", "lqr", "fc")}
        if not (dts["rshac"] < dts["lqr"] < dts["fc"]):
            problems.append(f"{scenario}: dt order {dts}")
        efforts = {n: exp1.metrics(n, scenario).control_effort
                   for n in ("rshac", "fc")}
        if not efforts["rshac"] < efforts["fc"]:
            problems.append(f"{scenario}: effort order {efforts}")
    _criterion("3c: transient and effort orderings hold exactly",
               not problems, "; ".join(problems))


# --------------------------------------------- criterion 4: step experiment

def test_c4_step_experiment(exp2):
    problems = []
    ov_rshac = exp2.metrics("rshac", "step").overshoot_pct
    ov_fc = exp2.metrics("fc", "step").overshoot_pct
    if ov_rshac is None or ov_rshac > 5.0:
        problems.append(f"RS-HAC overshoot {ov_rshac}")
    if ov_fc is None or ov_rshac is None or ov_fc < 10.0 * ov_rshac:
        problems.append(f"FC overshoot {ov_fc} not 10x {ov_rshac}")
    for name, tol in (("rshac", 0.25), ("lqr", 0.10)):
        dt = exp2.metrics(name, "step").transient_time
        ref = REF_EXP2_DT[name]
        if dt is None or abs(dt - ref) > tol * ref:
            problems.append(f"{name} dt {dt} vs {ref}")
    detail = f"ov: rshac={ov_rshac:.2f}% fc={ov_fc:.2f}%"
    _criterion("4: step-experiment overshoot and transients", not problems,
               "; ".join(problems) or detail)


# ------------------------------------------- criterion 5: property battery

def test_c5_semantic_value_properties():
    rng = random.Random(42)
    ok = True
    for _ in range(150):
        n = rng.choice((1, 3, 5, 7, 9, 13))
        theta, alpha = rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)
        frame = generate_sqsm(n, theta, alpha)
        mid = msi(n)
        values = frame.values
        ok &= values[mid - 1] == theta
        for i, v in enumerate(values):
            ok &= 0.0 < v < 2.0 * theta
            ok &= i == 0 or v > values[i - 1]
            ok &= abs(v + values[n - 1 - i] - 2 * theta) <= 1e-12
        for idx in range(1, n + 1):
            if idx < mid:
                want = theta * (1 - alpha**idx)
            elif idx > mid:
                want = theta * (1 + alpha ** (n + 1 - idx))
            else:
                want = theta
            ok &= values[idx - 1] == want
    _criterion("5a: semantic-value order/symmetry/bounds/closed-form", ok)


def test_c5_sigmoid_properties():
    ok = True
    for a in (0.45, 8.0):
        m = SemanticMap.sigmoid(a)
        ok &= m.forward(0.0) == 0.5
        h = 1e-6 / a
        prev = -1.0
        for i in range(100):
            x = -6.0 / a + i * (12.0 / a) / 99.0
            xs = m.forward(x)
            ok &= xs > prev
            prev = xs
            fd = (m.forward(x + h) - m.forward(x - h)) / (2 * h)
            want = a * xs * (1.0 - xs)
            ok &= abs(fd - want) <= 1e-6 * abs(want)
        ok &= m.forward(1e6) > 1.0 - 1e-9 and m.forward(-1e6) < 1e-9
    _criterion("5b: sigmoid center/monotonicity/limits/derivative", ok)


def test_c5_round_trips():
    ok = True
    for m in (SemanticMap.linear(-0.43, 0.43), SemanticMap.linear(-2, 2),
              SemanticMap.sigmoid(8.0), SemanticMap.sigmoid(0.45)):
        if m.is_linear:
            pts = [m.crisp_lo + (m.crisp_hi - m.crisp_lo) * f
                   for f in (0.03, 0.2, 0.5, 0.88)]
        else:
            pts = [v / m.a for v in (-4.5, -1.0, 0.123, 2.0)]
        for x in pts:
            ok &= abs(m.inverse(m.forward(x)) - x) <= 1e-9 * max(1.0, abs(x))
    _criterion("5c: semantize/de-semantize round trips at 1e-9", ok)


def test_c5_sirm_identity():
    cfg = FuzzyConfig.default()
    worst = max(abs(sirm_infer(i / 400.0, cfg) - i / 400.0)
                for i in range(401))
    _criterion("5d: rule surface identity at 1e-12", worst <= 1e-12,
               f"worst={worst:g}")


def test_c5_weights_simplex_and_continuity():
    ok = True
    rng = random.Random(7)
    for _ in range(300):
        w = adaptive_weights(rng.uniform(-2, 2), 0.09, 0.87)
        ok &= abs(sum(w) - 1.0) <= 1e-12 and all(v >= 0 for v in w)
    for edge in (0.09, 0.87):
        lo = adaptive_weights(edge - 1e-13, 0.09, 0.87)
        hi = adaptive_weights(edge + 1e-13, 0.09, 0.87)
        ok &= all(abs(a - b) <= 1e-12 for a, b in zip(lo, hi))
    _criterion("5e: adaptive weights sum to one and are continuous", ok)


def test_c5_linearization_jacobian():
    model = linearize(PARAMS)
    h = 1e-6
    worst = 0.0
    for j in range(4):
        plus, minus = [0.0] * 4, [0.0] * 4
        plus[j], minus[j] = h, -h
        up = nonlinear_derivative(PlantState(*plus), 0.0, PARAMS)
        dn = nonlinear_derivative(PlantState(*minus), 0.0, PARAMS)
        for i in range(4):
            worst = max(worst, abs((up[i] - dn[i]) / (2 * h) - model.A[i, j]))
    _criterion("5f: linearization matches numeric Jacobian at 1e-6",
               worst < 1e-6, f"worst={worst:g}")


def test_c5_riccati_residual(model):
    cfg = LqrConfig.default()
    P = solve_dare(model.A, model.B, cfg.Q, cfg.r)
    BtP = model.B.T @ P
    g = np.linalg.solve(np.atleast_2d(cfg.r) + BtP @ model.B, BtP @ model.A)
    res = model.A.T @ P @ model.A - (model.A.T @ P @ model.B) @ g + cfg.Q - P
    worst = float(np.max(np.abs(res)))
    _criterion("5g: Riccati residual below 1e-8", worst < 1e-8,
               f"residual={worst:g}")


def test_c5_controller_odd_symmetry(gain):
    rng = random.Random(123)
    rshac_cfg, fuzzy_cfg = RsHacConfig.default(), FuzzyConfig.default()
    K = tuple(gain)
    ok = True
    for _ in range(200):
        s = PlantState(rng.uniform(-0.5, 0.5), rng.uniform(-2.5, 2.5),
                       rng.uniform(-1.2, 1.2), rng.uniform(-4, 4))
        ms = PlantState(-s.x, -s.x_dot, -s.q, -s.q_dot)
        ok &= rshac_control(ms, 0.0, rshac_cfg).u == -rshac_control(s, 0.0, rshac_cfg).u
        ok &= fuzzy_control(ms, 0.0, fuzzy_cfg).u == -fuzzy_control(s, 0.0, fuzzy_cfg).u
        ok &= lqr_control(ms, 0.0, K).u == -lqr_control(s, 0.0, K).u
    _criterion("5h: controllers are exactly odd", ok)


def test_c5_episode_mirror_symmetry():
    ok = True
    for name in ("rshac", "fc", "lqr"):
        control_fn = make_controller(name, PARAMS)
        up = run_episode(EpisodeSpec(name, PlantState(0, 0, 10 * DEG, 0)),
                         PARAMS, control_fn)
        dn = run_episode(EpisodeSpec(name, PlantState(0, 0, -10 * DEG, 0)),
                         PARAMS, control_fn)
        for a, b, ua, ub in zip(up.states, dn.states, up.inputs, dn.inputs):
            if (a.x != -b.x or a.x_dot != -b.x_dot or a.q != -b.q
                    or a.q_dot != -b.q_dot or ua != -ub):
                ok = False
                break
    _criterion("5i: mirrored episodes are exact negations", ok)


def test_c5_determinism():
    spec = EpisodeSpec("rshac", PlantState(0, 0, 20 * DEG, 0))
    a = run_episode(spec, PARAMS, make_controller("rshac", PARAMS))
    b = run_episode(spec, PARAMS, make_controller("rshac", PARAMS))
    _criterion("5j: reruns are byte-identical",
               a == b and trajectory_csv(a) == trajectory_csv(b))


# -------------------------------------------- criterion 6: fixed-point hold

def test_c6_fixed_point_hold():
    problems = []
    for name in ("rshac", "fc", "lqr"):
        control_fn = make_controller(name, PARAMS)
        traj = run_episode(EpisodeSpec(name, PlantState(0, 0, 0, 0)),
                           PARAMS, control_fn)
        if any(s.as_tuple() != (0.0, 0.0, 0.0, 0.0) for s in traj.states):
            problems.append(f"{name}: state drifts")
        if any(u != 0.0 for u in traj.inputs):
            problems.append(f"{name}: non-zero input")
    _criterion("6: origin held at exactly zero for the whole episode",
               not problems, "; ".join(problems))


def test_zz_summary():
    print()
    for line in _LINES:
        print(line)
