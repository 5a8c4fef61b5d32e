"""The three cart-pole balance controllers: RS-HAC, SIRM fuzzy, and LQR.

RS-HAC (hedge-algebra controller with recursive semantic values) and the
fuzzy controller share a four-stage pipeline per state channel:

  1. semantize the crisp signal (affine for x and x_dot on their bounded
     domains, logistic for q and q_dot which are unbounded),
  2. infer an intermediate control action in the semantic domain (RS-HAC
     interpolates on per-channel semantic-value lines; the fuzzy controller
     runs single-input rule modules whose weighted-average defuzzification
     reduces to the identity),
  3. de-semantize through the shared symmetric acceleration bounds,
  4. combine the four intermediate actions with weights that adapt to the
     pendulum angle magnitude.

All three controllers are pure functions of (state, reference, config) and
emit a saturated cart acceleration.  The numeric paths are arranged to be
exactly odd: negating the full state (with zero reference) negates the
output bit-for-bit, which the benchmark harness relies on for its mirror
test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hedge import (
    InferenceLine,
    LinguisticFrame,
    SemanticMap,
    build_inference_line,
    generate_sqsm,
)
from .plant import LinearModel, PlantState

__all__ = [
    "ControlOutput",
    "RsHacChannel",
    "RsHacConfig",
    "FuzzyConfig",
    "LqrConfig",
    "saturate",
    "adaptive_weights",
    "rshac_control",
    "sirm_infer",
    "fuzzy_control",
    "solve_dare",
    "lqr_gain",
    "lqr_control",
    "closed_loop_matrix",
    "spectral_radius",
]

U_MAX_DEFAULT = 29.42  # m/s^2, symmetric acceleration authority


def saturate(u: float, lo: float, hi: float) -> float:
    """Clamp a control value to [lo, hi]."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    return min(max(u, lo), hi)


def adaptive_weights(q: float, l1: float, l2: float,
                     blend: float = 0.2) -> tuple[float, float, float, float]:
    """Channel weights (w_q, w_q_dot, w_x, w_x_dot) from the angle magnitude.

    Inside |q| <= l1 every channel gets 0.25; beyond l2 the angle channel
    takes everything.  In between, w_q ramps linearly from 0.25 to 1 and the
    remainder goes mostly to the angular-rate channel: its share of
    (1 - w_q) rises from 1/3 at l1 (the equal split, which keeps the weight
    vector continuous there) to 1/2 once |q| exceeds l1 + blend, and the
    cart channels split what is left.  ``blend = 0`` selects the constant
    1/2 share, which is discontinuous at l1.
    """
    if not 0.0 < l1 < l2:
        raise ValueError(f"need 0 < l1 < l2, got l1={l1}, l2={l2}")
    aq = abs(q)
    if aq <= l1:
        return (0.25, 0.25, 0.25, 0.25)
    if aq >= l2:
        return (1.0, 0.0, 0.0, 0.0)
    w_q = 0.25 + (aq - l1) * (1.0 - 0.25) / (l2 - l1)
    if blend > 0.0:
        ramp = min(1.0, (aq - l1) / blend)
        share = 1.0 / 3.0 + ramp * (0.5 - 1.0 / 3.0)
    else:
        share = 0.5
    w_qd = (1.0 - w_q) * share
    w_x = w_xd = (1.0 - w_q - w_qd) / 2.0
    return (w_q, w_qd, w_x, w_xd)


@dataclass(frozen=True)
class ControlOutput:
    """Total acceleration plus the per-channel breakdown that produced it."""

    u: float
    intermediates: tuple[float, float, float, float]  # (u_x, u_x_dot, u_q, u_q_dot)
    weights: tuple[float, float, float, float]        # (w_x, w_x_dot, w_q, w_q_dot)


@dataclass(frozen=True)
class RsHacChannel:
    """One state channel: its semantic map and its state/control frames."""

    semantic_map: SemanticMap
    state_frame: LinguisticFrame
    control_frame: LinguisticFrame

    def __post_init__(self):
        if self.state_frame.n_labels != self.control_frame.n_labels:
            raise ValueError("state and control frames must have equal label counts")

    def line(self) -> InferenceLine:
        return build_inference_line(self.state_frame, self.control_frame)


@dataclass(frozen=True)
class RsHacConfig:
    """Full RS-HAC parameterization (defaults reproduce the benchmark rig)."""

    x: RsHacChannel
    x_dot: RsHacChannel
    q: RsHacChannel
    q_dot: RsHacChannel
    u_min: float = -U_MAX_DEFAULT
    u_max: float = U_MAX_DEFAULT
    l1: float = 0.09
    l2: float = 0.87
    weight_blend: float = 0.2

    def __post_init__(self):
        if not self.u_min < self.u_max:
            raise ValueError("need u_min < u_max")
        if not 0.0 < self.l1 < self.l2 < math.pi / 2.0:
            raise ValueError("need 0 < l1 < l2 < pi/2")
        if self.weight_blend < 0.0:
            raise ValueError("weight_blend must be non-negative")

    @property
    def channels(self) -> tuple[RsHacChannel, ...]:
        return (self.x, self.x_dot, self.q, self.q_dot)

    @classmethod
    def default(cls, **kwargs) -> "RsHacConfig":
        return make_rshac_config(**kwargs)


def make_rshac_config(
    x_min: float = -0.43, x_max: float = 0.43,
    xdot_min: float = -2.0, xdot_max: float = 2.0,
    a_q: float = 8.0, c_q: float = 0.0,
    a_qdot: float = 0.45, c_qdot: float = 0.0,
    n_x: int = 7, n_xdot: int = 5, n_q: int = 5, n_qdot: int = 7,
    alpha_x: float = 0.5, alpha_u_x: float = 0.35,
    alpha_xdot: float = 0.5, alpha_u_xdot: float = 0.8,
    alpha_q: float = 0.5, alpha_u_q: float = 0.725,
    alpha_qdot: float = 0.5, alpha_u_qdot: float = 0.8,
    theta: float = 0.5,
    u_min: float = -U_MAX_DEFAULT, u_max: float = U_MAX_DEFAULT,
    l1: float = 0.09, l2: float = 0.87, weight_blend: float = 0.2,
) -> RsHacConfig:
    """Assemble an RsHacConfig from flat per-channel parameters."""

    def channel(semantic_map, n, alpha_state, alpha_ctrl):
        return RsHacChannel(
            semantic_map,
            generate_sqsm(n, theta, alpha_state),
            generate_sqsm(n, theta, alpha_ctrl),
        )

    return RsHacConfig(
        x=channel(SemanticMap.linear(x_min, x_max), n_x, alpha_x, alpha_u_x),
        x_dot=channel(SemanticMap.linear(xdot_min, xdot_max), n_xdot,
                      alpha_xdot, alpha_u_xdot),
        q=channel(SemanticMap.sigmoid(a_q, c_q), n_q, alpha_q, alpha_u_q),
        q_dot=channel(SemanticMap.sigmoid(a_qdot, c_qdot), n_qdot,
                      alpha_qdot, alpha_u_qdot),
        u_min=u_min, u_max=u_max, l1=l1, l2=l2, weight_blend=weight_blend,
    )


def _dev_knots(frame: LinguisticFrame) -> tuple[float, ...]:
    # non-negative deviations of the upper-flank values from theta, plus 0;
    # regenerated from (theta, alpha) so both flanks share one magnitude
    half = (frame.n_labels - 1) // 2
    return (0.0,) + tuple(frame.theta * frame.alpha**i for i in range(half, 0, -1))


def _odd_interp(dev_in: tuple[float, ...], dev_out: tuple[float, ...],
                d: float) -> float:
    # piecewise-linear on the non-negative flank, mirrored exactly for d < 0,
    # clamped beyond the outermost knot
    if d < 0.0:
        return -_odd_interp(dev_in, dev_out, -d)
    last = len(dev_in) - 1
    if d >= dev_in[last]:
        return dev_out[last]
    j = 1
    while dev_in[j] < d:
        j += 1
    x0, x1 = dev_in[j - 1], dev_in[j]
    y0, y1 = dev_out[j - 1], dev_out[j]
    return y0 + (d - x0) * (y1 - y0) / (x1 - x0)


@lru_cache(maxsize=64)
def _rshac_tables(cfg: RsHacConfig):
    return tuple((_dev_knots(ch.state_frame), _dev_knots(ch.control_frame),
                  0.5 - ch.state_frame.theta, ch.control_frame.theta - 0.5)
                 for ch in cfg.channels)


def _check_state(s: PlantState, x_ref: float):
    if not (s.is_finite() and math.isfinite(x_ref)):
        raise ValueError(f"non-finite controller input: {s}, x_ref={x_ref}")


def _combine(cfg, s, u_x, u_xd, u_q, u_qd) -> ControlOutput:
    # fixed summation order keeps the output exactly odd under state negation
    w_q, w_qd, w_x, w_xd = adaptive_weights(s.q, cfg.l1, cfg.l2, cfg.weight_blend)
    u = w_x * u_x + w_xd * u_xd + w_q * u_q + w_qd * u_qd
    u = saturate(u, cfg.u_min, cfg.u_max)
    return ControlOutput(u, (u_x, u_xd, u_q, u_qd), (w_x, w_xd, w_q, w_qd))


def _desem_span(cfg) -> tuple[float, float]:
    span = cfg.u_max - cfg.u_min
    return span, cfg.u_min + 0.5 * span


def rshac_control(s: PlantState, x_ref: float, cfg: RsHacConfig) -> ControlOutput:
    """RS-HAC: semantize, interpolate per channel, de-semantize, combine."""
    _check_state(s, x_ref)
    tables = _rshac_tables(cfg)
    span, mid = _desem_span(cfg)
    crisp = (s.x - x_ref, s.x_dot, s.q, s.q_dot)
    outs = []
    for ch, (din, dout, in_off, out_off), value in zip(cfg.channels, tables, crisp):
        d = ch.semantic_map.forward_dev(value) + in_off
        e = _odd_interp(din, dout, d) + out_off
        outs.append(mid + e * span)
    return _combine(cfg, s, *outs)


_TRI_MFS_DEFAULT = ((0.0, 0.0, 0.5), (0.0, 0.5, 1.0), (0.5, 1.0, 1.0))
_SINGLETONS_DEFAULT = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class FuzzyConfig:
    """SIRM fuzzy controller: three triangular labels per channel.

    Stage 1, 3 and 4 parameters mirror the RS-HAC ones; only the inference
    stage differs.  Each membership triple is (support_lo, peak, support_hi)
    over the semantic domain [0, 1]; the default geometry forms a partition
    of unity whose weighted-average defuzzification is the identity map.
    """

    x_map: SemanticMap = SemanticMap.linear(-0.43, 0.43)
    xdot_map: SemanticMap = SemanticMap.linear(-2.0, 2.0)
    q_map: SemanticMap = SemanticMap.sigmoid(8.0)
    qdot_map: SemanticMap = SemanticMap.sigmoid(0.45)
    mfs: tuple[tuple[float, float, float], ...] = _TRI_MFS_DEFAULT
    singletons: tuple[float, ...] = _SINGLETONS_DEFAULT
    u_min: float = -U_MAX_DEFAULT
    u_max: float = U_MAX_DEFAULT
    l1: float = 0.09
    l2: float = 0.87
    weight_blend: float = 0.2

    def __post_init__(self):
        if len(self.mfs) != len(self.singletons):
            raise ValueError("one output singleton per membership function")
        for lo, peak, hi in self.mfs:
            if not (lo <= peak <= hi and lo < hi):
                raise ValueError(f"bad membership triple ({lo}, {peak}, {hi})")
        zero_lo, _, zero_hi = self.mfs[1]
        for i in (0, 2):
            lo, _, hi = self.mfs[i]
            if not (zero_lo <= lo and hi <= zero_hi and (hi - lo) < (zero_hi - zero_lo)):
                raise ValueError("the middle label must span the widest support")
        for xs in (0.0, 0.131, 0.25, 0.5, 0.77, 1.0):
            if abs(sum(_tri(xs, mf) for mf in self.mfs) - 1.0) > 1e-9:
                raise ValueError("membership functions must form a partition of unity")
        if not self.u_min < self.u_max:
            raise ValueError("need u_min < u_max")
        if not 0.0 < self.l1 < self.l2 < math.pi / 2.0:
            raise ValueError("need 0 < l1 < l2 < pi/2")

    @property
    def channels(self):
        return (self.x_map, self.xdot_map, self.q_map, self.qdot_map)

    @classmethod
    def default(cls, **kwargs) -> "FuzzyConfig":
        return cls(**kwargs)


def _tri(x: float, mf: tuple[float, float, float]) -> float:
    lo, peak, hi = mf
    if x < lo or x > hi:
        return 0.0
    if x == peak:
        return 1.0
    if x < peak:
        return (x - lo) / (peak - lo)
    return (hi - x) / (hi - peak)


def sirm_infer(xs: float, cfg: FuzzyConfig) -> float:
    """Weighted-average defuzzification of one semantic input.

    With the default label geometry this is the identity on [0, 1]: the rule
    surface is a straight line.
    """
    if not 0.0 <= xs <= 1.0:
        raise ValueError(f"semantic input must lie in [0, 1], got {xs}")
    num = 0.0
    den = 0.0
    for mf, c in zip(cfg.mfs, cfg.singletons):
        mu = _tri(xs, mf)
        num += mu * c
        den += mu
    if den == 0.0:
        raise ArithmeticError("no membership function active; geometry broken")
    return num / den


def _sirm_dev(dev: float, cfg: FuzzyConfig) -> float:
    # evaluate only the non-negative flank and mirror, so the rule surface
    # stays exactly odd; xs - 0.5 is exact for xs in [0.5, 1]
    if dev < 0.0:
        return -_sirm_dev(-dev, cfg)
    return sirm_infer(0.5 + dev, cfg) - 0.5


def fuzzy_control(s: PlantState, x_ref: float, cfg: FuzzyConfig) -> ControlOutput:
    """Same pipeline as rshac_control with SIRM inference in stage 2."""
    _check_state(s, x_ref)
    span, mid = _desem_span(cfg)
    crisp = (s.x - x_ref, s.x_dot, s.q, s.q_dot)
    outs = []
    for semantic_map, value in zip(cfg.channels, crisp):
        d = semantic_map.forward_dev(value)
        outs.append(mid + _sirm_dev(d, cfg) * span)
    return _combine(cfg, s, *outs)


@dataclass(frozen=True)
class LqrConfig:
    """Diagonal state penalties, scalar input penalty, shared saturation."""

    q_diag: tuple[float, float, float, float] = (40.0, 1.0, 100.0, 2.0)
    r: float = 0.2
    u_min: float = -U_MAX_DEFAULT
    u_max: float = U_MAX_DEFAULT

    def __post_init__(self):
        if any(qi < 0.0 for qi in self.q_diag):
            raise ValueError("state penalties must be non-negative")
        if not self.r > 0.0:
            raise ValueError("input penalty must be strictly positive")
        if not self.u_min < self.u_max:
            raise ValueError("need u_min < u_max")

    @property
    def Q(self) -> np.ndarray:
        return np.diag(self.q_diag)

    @classmethod
    def default(cls, **kwargs) -> "LqrConfig":
        return cls(**kwargs)


def solve_dare(A, B, Q, R, tol: float = 1e-10, max_iter: int = 10**6) -> np.ndarray:
    """Discrete algebraic Riccati equation by fixed-point iteration from P = Q.

    Iterates P <- A'PA - A'PB (R + B'PB)^-1 B'PA + Q until successive
    iterates differ by less than ``tol`` in max-norm.  Non-convergence within
    ``max_iter`` iterations signals an unstabilizable configuration.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float).reshape(A.shape[0], -1)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    P = Q.copy()
    for _ in range(max_iter):
        BtP = B.T @ P
        gain = np.linalg.solve(R + BtP @ B, BtP @ A)
        P_next = A.T @ P @ A - (A.T @ P @ B) @ gain + Q
        if np.max(np.abs(P_next - P)) < tol:
            return P_next
        P = P_next
    raise RuntimeError(f"Riccati iteration did not converge in {max_iter} steps")


def lqr_gain(cfg: LqrConfig, model: LinearModel) -> np.ndarray:
    """Optimal state-feedback gain K for the regulator law u = -K (x - x_ref).

    Returns K = (R + B'PB)^-1 B'PA.  The closed loop A - B K must be
    Schur-stable; anything else signals a convention or model bug.
    """
    if not model.discrete:
        raise ValueError("lqr_gain expects a discrete model")
    P = solve_dare(model.A, model.B, cfg.Q, cfg.r)
    BtP = model.B.T @ P
    K = np.linalg.solve(np.atleast_2d(cfg.r) + BtP @ model.B, BtP @ model.A)
    K = K.reshape(-1)
    rho = spectral_radius(closed_loop_matrix(model, K))
    if rho >= 1.0:
        raise RuntimeError(f"closed loop unstable (spectral radius {rho:.6f})")
    return K


def closed_loop_matrix(model: LinearModel, K) -> np.ndarray:
    """A - B K, the loop matrix under the regulator law u = -K x."""
    K = np.asarray(K, dtype=float).reshape(1, -1)
    return model.A - model.B @ K


def spectral_radius(M) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(M, dtype=float)))))


def lqr_control(s: PlantState, x_ref: float, K,
                bounds: tuple[float, float] = (-U_MAX_DEFAULT, U_MAX_DEFAULT)) -> ControlOutput:
    """Saturated regulator law u = -K (x - x_ref, x_dot, q, q_dot).

    Intermediates report the four per-state gain contributions; the equal
    weights are informational only.
    """
    k0, k1, k2, k3 = (float(v) for v in np.asarray(K).reshape(-1))
    e0 = s.x - x_ref
    c0, c1, c2, c3 = -(k0 * e0), -(k1 * s.x_dot), -(k2 * s.q), -(k3 * s.q_dot)
    u = saturate(c0 + c1 + c2 + c3, bounds[0], bounds[1])
    return ControlOutput(u, (c0, c1, c2, c3), (0.25, 0.25, 0.25, 0.25))
