"""Flat key-value run configuration with full-benchmark defaults.

The format is one ``section.key = value`` assignment per line, ``#`` starting
a comment.  Sections: plant, rshac, fuzzy, lqr, harness.  Every key is
optional; omitted keys keep the benchmark defaults.  Unknown keys and values
that violate a constructor invariant are rejected with the offending key and
line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .controllers import FuzzyConfig, LqrConfig, RsHacConfig, make_rshac_config
from .harness import DWELL_DEFAULT, CONTROLLER_IDS
from .plant import CartPoleParams, PlantState

__all__ = ["ConfigError", "CustomEpisode", "RunConfig", "parse_config"]

EXPERIMENTS = ("exp1", "exp2", "all", "custom")


class ConfigError(ValueError):
    """Raised for unparseable or invalid configuration input."""


@dataclass(frozen=True)
class CustomEpisode:
    """User-defined single scenario run by the ``custom`` experiment."""

    x0: PlantState = PlantState(0.0, 0.0, 0.0, 0.0)
    x_ref: float = 0.0
    step_to: float | None = None
    t_step: float | None = None


@dataclass(frozen=True)
class RunConfig:
    """Everything a benchmark invocation needs."""

    experiment: str = "all"
    controllers: tuple[str, ...] = CONTROLLER_IDS
    out_dir: str = "results"
    integrator: str = "rk4"
    dwell: float = DWELL_DEFAULT
    duration: float = 10.0
    plant: CartPoleParams = field(default_factory=CartPoleParams)
    rshac: RsHacConfig = field(default_factory=RsHacConfig.default)
    fuzzy: FuzzyConfig = field(default_factory=FuzzyConfig.default)
    lqr: LqrConfig = field(default_factory=LqrConfig.default)
    custom: CustomEpisode = field(default_factory=CustomEpisode)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not self.controllers:
            raise ConfigError("at least one controller must be selected")
        for c in self.controllers:
            if c not in CONTROLLER_IDS:
                raise ConfigError(f"unknown controller {c!r}")
        if self.integrator not in ("rk4", "euler"):
            raise ConfigError(f"unknown integrator {self.integrator!r}")
        if self.dwell < 0.0:
            raise ConfigError("dwell must be non-negative")
        if not self.duration > 0.0:
            raise ConfigError("duration must be strictly positive")


_PLANT_KEYS = {"m": float, "L": float, "I": float, "g": float, "k": float,
               "Ts": float}
_RSHAC_KEYS = {
    "x_min": float, "x_max": float, "xdot_min": float, "xdot_max": float,
    "a_q": float, "c_q": float, "a_qdot": float, "c_qdot": float,
    "n_x": int, "n_xdot": int, "n_q": int, "n_qdot": int,
    "alpha_x": float, "alpha_u_x": float, "alpha_xdot": float,
    "alpha_u_xdot": float, "alpha_q": float, "alpha_u_q": float,
    "alpha_qdot": float, "alpha_u_qdot": float,
    "theta": float, "u_min": float, "u_max": float,
    "l1": float, "l2": float, "weight_blend": float,
}
_FUZZY_KEYS = {
    "x_min": float, "x_max": float, "xdot_min": float, "xdot_max": float,
    "a_q": float, "c_q": float, "a_qdot": float, "c_qdot": float,
    "u_min": float, "u_max": float, "l1": float, "l2": float,
    "weight_blend": float,
}
_LQR_KEYS = {"q_x": float, "q_xdot": float, "q_q": float, "q_qdot": float,
             "r": float, "u_min": float, "u_max": float}
_HARNESS_KEYS = {
    "experiment": str, "controllers": str, "out": str, "integrator": str,
    "dwell": float, "duration": float,
    "custom_x0": float, "custom_xdot0": float,
    "custom_q0_deg": float, "custom_qdot0_deg": float,
    "custom_x_ref": float, "custom_step_to": float, "custom_t_step": float,
}
_SECTIONS = {"plant": _PLANT_KEYS, "rshac": _RSHAC_KEYS, "fuzzy": _FUZZY_KEYS,
             "lqr": _LQR_KEYS, "harness": _HARNESS_KEYS}


def _coerce(kind, raw, where):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {kind.__name__}") from None


def _parse_lines(text: str) -> dict[str, dict[str, tuple[object, str]]]:
    values: dict[str, dict[str, tuple[object, str]]] = {s: {} for s in _SECTIONS}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if "." not in key:
            raise ConfigError(f"line {lineno}: key {key!r} is missing its section")
        section, _, name = key.partition(".")
        where = f"line {lineno}: {key}"
        if section not in _SECTIONS:
            raise ConfigError(f"{where}: unknown section {section!r}")
        if name not in _SECTIONS[section]:
            raise ConfigError(f"{where}: unknown key")
        if not val:
            raise ConfigError(f"{where}: empty value")
        values[section][name] = (_coerce(_SECTIONS[section][name], val, where), where)
    return values


def _build(factory, kwargs, wheres):
    try:
        return factory(**kwargs)
    except (ValueError, TypeError) as exc:
        spots = ", ".join(wheres) if wheres else "defaults"
        raise ConfigError(f"{spots}: {exc}") from None


def parse_config(text: str = "") -> RunConfig:
    """Parse configuration text into a fully validated RunConfig.

    An empty document yields the complete benchmark defaults.
    """
    values = _parse_lines(text)

    def section_kwargs(section):
        raw = values[section]
        return ({k: v for k, (v, _) in raw.items()},
                [w for (_, w) in raw.values()])

    plant_kw, plant_where = section_kwargs("plant")
    plant = _build(CartPoleParams, plant_kw, plant_where)
    rshac_kw, rshac_where = section_kwargs("rshac")
    rshac = _build(make_rshac_config, rshac_kw, rshac_where)
    fuzzy_kw, fuzzy_where = section_kwargs("fuzzy")
    fuzzy = _build(_make_fuzzy, fuzzy_kw, fuzzy_where)
    lqr_kw, lqr_where = section_kwargs("lqr")
    lqr = _build(_make_lqr, lqr_kw, lqr_where)

    h = {k: v for k, (v, _) in values["harness"].items()}
    h_where = [w for (_, w) in values["harness"].values()]
    controllers = tuple(CONTROLLER_IDS)
    if "controllers" in h:
        names = tuple(c.strip() for c in h["controllers"].split(",") if c.strip())
        controllers = tuple(CONTROLLER_IDS) if names == ("all",) else names
    custom = _build(_make_custom, {k: v for k, v in h.items()
                                   if k.startswith("custom_")}, h_where)
    run_kwargs = dict(
        experiment=h.get("experiment", "all"),
        controllers=controllers,
        out_dir=h.get("out", "results"),
        integrator=h.get("integrator", "rk4"),
        dwell=h.get("dwell", DWELL_DEFAULT),
        duration=h.get("duration", 10.0),
        plant=plant, rshac=rshac, fuzzy=fuzzy, lqr=lqr, custom=custom,
    )
    return _build(RunConfig, run_kwargs, h_where)


def _make_fuzzy(x_min=-0.43, x_max=0.43, xdot_min=-2.0, xdot_max=2.0,
                a_q=8.0, c_q=0.0, a_qdot=0.45, c_qdot=0.0,
                u_min=None, u_max=None, l1=0.09, l2=0.87,
                weight_blend=0.2) -> FuzzyConfig:
    from .controllers import U_MAX_DEFAULT, SemanticMap
    return FuzzyConfig(
        x_map=SemanticMap.linear(x_min, x_max),
        xdot_map=SemanticMap.linear(xdot_min, xdot_max),
        q_map=SemanticMap.sigmoid(a_q, c_q),
        qdot_map=SemanticMap.sigmoid(a_qdot, c_qdot),
        u_min=-U_MAX_DEFAULT if u_min is None else u_min,
        u_max=U_MAX_DEFAULT if u_max is None else u_max,
        l1=l1, l2=l2, weight_blend=weight_blend,
    )


def _make_lqr(q_x=40.0, q_xdot=1.0, q_q=100.0, q_qdot=2.0, r=0.2,
              u_min=None, u_max=None) -> LqrConfig:
    from .controllers import U_MAX_DEFAULT
    return LqrConfig(
        q_diag=(q_x, q_xdot, q_q, q_qdot), r=r,
        u_min=-U_MAX_DEFAULT if u_min is None else u_min,
        u_max=U_MAX_DEFAULT if u_max is None else u_max,
    )


def _make_custom(custom_x0=0.0, custom_xdot0=0.0, custom_q0_deg=0.0,
                 custom_qdot0_deg=0.0, custom_x_ref=0.0,
                 custom_step_to=None, custom_t_step=None) -> CustomEpisode:
    if (custom_step_to is None) != (custom_t_step is None):
        raise ValueError("custom_step_to and custom_t_step must be given together")
    return CustomEpisode(
        x0=PlantState(custom_x0, custom_xdot0,
                      math.radians(custom_q0_deg), math.radians(custom_qdot0_deg)),
        x_ref=custom_x_ref, step_to=custom_step_to, t_step=custom_t_step,
    )
