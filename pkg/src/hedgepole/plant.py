"""Cart-pole plant: nonlinear dynamics, linearization, discretization, integration.

The cart is commanded in acceleration (partial feedback linearization), so
the state is X = [x, x_dot, q, q_dot] with q the pendulum angle from the
upright position and the input u = x_ddot in m/s^2.  Pendulum dynamics:

    q_ddot = (m*g*L*sin(q) - m*L*cos(q)*u - k*q_dot) / (I + m*L^2)

The angle is left unwrapped; balancing never leaves (-pi/2, pi/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CartPoleParams",
    "PlantState",
    "LinearModel",
    "nonlinear_derivative",
    "linearize",
    "discretize",
    "integrate_step",
]


@dataclass(frozen=True)
class CartPoleParams:
    """Physical parameters, defaults measured from a real desk rig."""

    m: float = 0.116527      # pendulum mass, kg
    L: float = 0.15          # pivot to center of gravity, m
    I: float = 8.7395e-4     # inertia about the center of gravity, kg m^2
    g: float = 9.80665       # gravitational acceleration, m/s^2
    k: float = 0.000161      # viscous joint damping, N s/rad
    Ts: float = 0.001        # sampling time, s

    def __post_init__(self):
        for name in ("m", "L", "I", "g", "Ts"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.k < 0.0:
            raise ValueError("joint damping k must be non-negative")

    @property
    def pivot_inertia(self) -> float:
        """I + m*L^2, the inertia entering the pendulum equation."""
        return self.I + self.m * self.L * self.L


@dataclass(frozen=True)
class PlantState:
    """Cart position/velocity (m, m/s) and pendulum angle/rate (rad, rad/s)."""

    x: float
    x_dot: float
    q: float
    q_dot: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.x_dot, self.q, self.q_dot)

    def is_finite(self) -> bool:
        return all(map(math.isfinite, self.as_tuple()))


@dataclass(frozen=True, eq=False)
class LinearModel:
    """State-space model x' = A x + B u (continuous) or x+ = A x + B u (discrete)."""

    A: np.ndarray
    B: np.ndarray
    discrete: bool
    ts: float | None = None

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float).reshape(-1, 1)
        if A.shape[0] != A.shape[1] or A.shape[0] != B.shape[0]:
            raise ValueError(f"inconsistent shapes A{A.shape} B{B.shape}")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self.discrete and not (self.ts and self.ts > 0.0):
            raise ValueError("discrete model needs a positive sampling time")


def _accel(q: float, q_dot: float, u: float, p: CartPoleParams) -> float:
    # fixed term order; each term flips sign exactly under (q, q_dot, u) negation
    num = (p.m * p.g * p.L * math.sin(q)
           - p.m * p.L * math.cos(q) * u
           - p.k * q_dot)
    return num / p.pivot_inertia


def nonlinear_derivative(s: PlantState, u: float,
                         p: CartPoleParams) -> tuple[float, float, float, float]:
    """Time derivative (x_dot, x_ddot, q_dot, q_ddot) of the full dynamics."""
    return (s.x_dot, u, s.q_dot, _accel(s.q, s.q_dot, u, p))


def linearize(p: CartPoleParams) -> LinearModel:
    """Continuous small-angle model about the upright fixed point."""
    j = p.pivot_inertia
    A = np.array([
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, p.m * p.g * p.L / j, -p.k / j],
    ])
    B = np.array([[0.0], [1.0], [0.0], [-p.m * p.L / j]])
    return LinearModel(A, B, discrete=False)


def discretize(model: LinearModel, ts: float) -> LinearModel:
    """Forward-Euler discretization: A_d = I + A*ts, B_d = B*ts."""
    if model.discrete:
        raise ValueError("model is already discrete")
    if not ts > 0.0:
        raise ValueError("sampling time must be strictly positive")
    n = model.A.shape[0]
    return LinearModel(np.eye(n) + model.A * ts, model.B * ts,
                       discrete=True, ts=ts)


def integrate_step(s: PlantState, u: float, p: CartPoleParams,
                   method: str = "rk4") -> PlantState:
    """Advance the nonlinear plant by one sampling period with u held constant.

    The control acts in zero-order hold: one value of u for the whole step.
    A non-finite result means the trajectory blew up; callers abort the
    episode when that happens.
    """
    ts = p.Ts
    x, xd, q, qd = s.as_tuple()
    if method == "euler":
        a = _accel(q, qd, u, p)
        return PlantState(x + ts * xd, xd + ts * u, q + ts * qd, qd + ts * a)
    if method != "rk4":
        raise ValueError(f"unknown integrator {method!r}")

    # classical four-stage rule; cart states are exact (x_ddot == u is constant)
    a1 = _accel(q, qd, u, p)
    k1 = (xd, u, qd, a1)
    h2 = 0.5 * ts
    a2 = _accel(q + h2 * k1[2], qd + h2 * k1[3], u, p)
    k2 = (xd + h2 * k1[1], u, qd + h2 * k1[3], a2)
    a3 = _accel(q + h2 * k2[2], qd + h2 * k2[3], u, p)
    k3 = (xd + h2 * k2[1], u, qd + h2 * k2[3], a3)
    a4 = _accel(q + ts * k3[2], qd + ts * k3[3], u, p)
    k4 = (xd + ts * k3[1], u, qd + ts * k3[3], a4)
    w = ts / 6.0
    return PlantState(
        x + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        xd + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        q + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        qd + w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    )
