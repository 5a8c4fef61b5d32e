"""Hedge-algebra primitives with recursive semantic values.

A linguistic variable is modelled as an odd-sized ordered label set.  Each
label gets a numeric semantic value in (0, 2*theta) from a two-parameter
recursion (the semantically quantifying simplified mapping, SQSM), so frames
of any size can be generated programmatically instead of deriving one closed
form per label.  Crisp signals enter and leave the semantic domain through
bijective semantic maps (affine on a bounded interval, or logistic for
unbounded variables), and inference between two frames is piecewise-linear
interpolation on their paired semantic values.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

__all__ = [
    "LinguisticFrame",
    "SemanticMap",
    "InferenceLine",
    "msi",
    "sie",
    "default_labels",
    "generate_sqsm",
    "sqm_size_reference",
    "semantize",
    "desemantize",
    "build_inference_line",
    "infer",
]

_SYMMETRY_TOL = 1e-12


def _check_odd_count(n_labels):
    if not isinstance(n_labels, int) or isinstance(n_labels, bool):
        raise TypeError(f"label count must be an integer, got {n_labels!r}")
    if n_labels < 1 or n_labels % 2 == 0:
        raise ValueError(f"label count must be a positive odd integer, got {n_labels}")


def _check_unit_open(name, value):
    if not (0.0 < value < 1.0):
        raise ValueError(f"{name} must lie in the open interval (0, 1), got {value}")


def msi(n_labels: int) -> int:
    """Median semantic index: 1-based position of the neutral label."""
    _check_odd_count(n_labels)
    return (n_labels - 1) // 2 + 1


def default_labels(n_labels: int, negative: str = "small", positive: str = "big",
                   neutral: str = "neutral") -> tuple[str, ...]:
    """Hedge-prefixed label names, most extreme first on each side.

    For 7 labels: very small, small, little small, neutral, little big,
    big, very big.  Larger frames stack additional "very" prefixes.
    """
    _check_odd_count(n_labels)
    half = (n_labels - 1) // 2

    def side(stem):
        names = []
        for j in range(1, half + 1):
            if j == half and half > 1:
                names.append(f"little {stem}")
            elif j == half - 1 or half == 1:
                names.append(stem)
            else:
                names.append("very " * (half - 1 - j) + stem)
        return names

    return tuple(side(negative) + [neutral] + list(reversed(side(positive))))


@dataclass(frozen=True)
class LinguisticFrame:
    """Odd-sized ordered label set with one semantic value per label.

    Values are strictly increasing, symmetric about ``theta`` and confined to
    the open interval (0, 2*theta); the median label carries exactly
    ``theta``.
    """

    n_labels: int
    theta: float
    alpha: float
    values: tuple[float, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        _check_odd_count(self.n_labels)
        _check_unit_open("theta", self.theta)
        _check_unit_open("alpha", self.alpha)
        if len(self.values) != self.n_labels:
            raise ValueError(
                f"expected {self.n_labels} semantic values, got {len(self.values)}")
        if self.labels is not None and len(self.labels) != self.n_labels:
            raise ValueError(
                f"expected {self.n_labels} labels, got {len(self.labels)}")
        mid = msi(self.n_labels)
        if self.values[mid - 1] != self.theta:
            raise ValueError("median label must carry exactly theta")
        top = 2.0 * self.theta
        for i, v in enumerate(self.values):
            if not (0.0 < v < top):
                raise ValueError(
                    f"semantic value {v} at index {i + 1} outside (0, {top})")
            if i and v <= self.values[i - 1]:
                raise ValueError("semantic values must be strictly increasing")
            mirror = self.values[self.n_labels - 1 - i]
            if abs((v + mirror) - top) > _SYMMETRY_TOL * max(1.0, top):
                raise ValueError("semantic values must be symmetric about theta")

    @property
    def median_index(self) -> int:
        return msi(self.n_labels)


def generate_sqsm(n_labels: int, theta: float, alpha: float,
                  labels: tuple[str, ...] | None = None) -> LinguisticFrame:
    """Generate a frame's semantic values by the two-sided recursion.

    Walking outward-in on both flanks at once, label i on the lower flank
    gets theta*(1 - alpha**i) and its mirror gets theta*(1 + alpha**i); the
    median label gets theta.  Runs in O(n/2) loop iterations.
    """
    _check_odd_count(n_labels)
    _check_unit_open("theta", theta)
    _check_unit_open("alpha", alpha)
    mid = msi(n_labels)
    values = [0.0] * n_labels
    values[mid - 1] = theta
    i = 1
    while i < mid:
        values[i - 1] = theta * (1.0 - alpha**i)
        values[n_labels - i] = theta * (1.0 + alpha**i)
        i += 1
    return LinguisticFrame(n_labels, theta, alpha, tuple(values), labels)


def sie(label: int | str, frame: LinguisticFrame) -> int:
    """Semantic index extraction: 1-based position of a label in the frame."""
    if isinstance(label, bool):
        raise TypeError("label must be an index or a name")
    if isinstance(label, int):
        if not 1 <= label <= frame.n_labels:
            raise ValueError(
                f"label index {label} outside 1..{frame.n_labels}")
        return label
    if frame.labels is None:
        raise ValueError("frame has no label names; use a 1-based index")
    try:
        return frame.labels.index(label) + 1
    except ValueError:
        raise ValueError(f"unknown label {label!r}") from None


def sqm_size_reference(theta: float, alpha: float) -> tuple[float, ...]:
    """Legacy seven-label quantification of SIZE, one closed form per label.

    Kept solely as a cross-check oracle: it agrees with the recursive values
    only at the neutral label, which is exactly what motivates the recursion.
    """
    _check_unit_open("theta", theta)
    _check_unit_open("alpha", alpha)
    return (
        theta * (1.0 - alpha) ** 2,                    # very small
        theta * (1.0 - alpha),                         # small
        theta * (1.0 - alpha + alpha**2),              # little small
        theta,                                         # neutral
        theta + alpha * (1.0 - theta) * (1.0 - alpha),  # little big
        theta + alpha * (1.0 - theta),                 # big
        theta + alpha * (1.0 - theta) * (2.0 - alpha),  # very big
    )


_LINEAR = "linear"
_SIGMOID = "sigmoid"


@dataclass(frozen=True)
class SemanticMap:
    """Bijective transform between a crisp domain and a semantic interval.

    Two kinds exist.  ``linear`` maps a bounded crisp interval
    [crisp_lo, crisp_hi] affinely onto [sem_lo, sem_hi] inside [0, 1]; crisp
    inputs outside the interval are clamped so transient excursions stay
    representable.  ``sigmoid`` maps the whole real line onto (0, 1) through
    a logistic curve with slope ``a`` and center ``c``, for variables whose
    crisp range cannot be bounded in advance.
    """

    kind: str
    crisp_lo: float = 0.0
    crisp_hi: float = 1.0
    sem_lo: float = 0.0
    sem_hi: float = 1.0
    a: float = 1.0
    c: float = 0.0

    def __post_init__(self):
        if self.kind == _LINEAR:
            if not self.crisp_lo < self.crisp_hi:
                raise ValueError("crisp domain must satisfy crisp_lo < crisp_hi")
            if not self.sem_lo < self.sem_hi:
                raise ValueError("semantic range must satisfy sem_lo < sem_hi")
            if self.sem_lo < 0.0 or self.sem_hi > 1.0:
                raise ValueError("semantic range must lie inside [0, 1]")
        elif self.kind == _SIGMOID:
            if not self.a > 0.0:
                raise ValueError("sigmoid slope must be strictly positive")
            if not math.isfinite(self.c):
                raise ValueError("sigmoid center must be finite")
        else:
            raise ValueError(f"unknown map kind {self.kind!r}")

    @classmethod
    def linear(cls, crisp_lo, crisp_hi, sem_lo=0.0, sem_hi=1.0) -> "SemanticMap":
        return cls(_LINEAR, crisp_lo=crisp_lo, crisp_hi=crisp_hi,
                   sem_lo=sem_lo, sem_hi=sem_hi)

    @classmethod
    def sigmoid(cls, a, c=0.0) -> "SemanticMap":
        return cls(_SIGMOID, a=a, c=c)

    @property
    def is_linear(self) -> bool:
        return self.kind == _LINEAR

    @property
    def semantic_center(self) -> float:
        return (self.sem_lo + self.sem_hi) / 2.0 if self.is_linear else 0.5

    @property
    def semantic_halfspan(self) -> float:
        return (self.sem_hi - self.sem_lo) / 2.0 if self.is_linear else 0.5

    def forward(self, x: float) -> float:
        """Crisp value to semantic value."""
        if self.is_linear:
            x = min(max(x, self.crisp_lo), self.crisp_hi)
            scale = (self.sem_hi - self.sem_lo) / (self.crisp_hi - self.crisp_lo)
            return self.sem_lo + (x - self.crisp_lo) * scale
        z = self.a * (x - self.c)
        if z >= 0.0:
            return 1.0 / (1.0 + math.exp(-z))
        e = math.exp(z)
        return e / (1.0 + e)

    def forward_dev(self, x: float) -> float:
        """Semantic deviation from the map's center.

        Algebraically ``forward(x) - semantic_center``, but evaluated in a
        centered form that is exactly odd in the crisp deviation, so mirrored
        inputs produce bit-for-bit mirrored semantics.
        """
        if self.is_linear:
            mid = (self.crisp_lo + self.crisp_hi) / 2.0
            scale = (self.sem_hi - self.sem_lo) / (self.crisp_hi - self.crisp_lo)
            hs = self.semantic_halfspan
            return min(max((x - mid) * scale, -hs), hs)
        t = 0.5 * self.a * (x - self.c)
        return math.copysign(0.5 * math.tanh(abs(t)), t)

    def inverse(self, xs: float) -> float:
        """Semantic value back to crisp value (exact inverse of forward)."""
        if self.is_linear:
            scale = (self.crisp_hi - self.crisp_lo) / (self.sem_hi - self.sem_lo)
            return self.crisp_lo + (xs - self.sem_lo) * scale
        if not 0.0 < xs < 1.0:
            raise ValueError(
                f"sigmoid inverse needs a semantic value in (0, 1), got {xs}")
        return self.c + math.log(xs / (1.0 - xs)) / self.a


def semantize(semantic_map: SemanticMap, x: float) -> float:
    """Map a crisp value into the semantic domain."""
    return semantic_map.forward(x)


def desemantize(semantic_map: SemanticMap, xs: float) -> float:
    """Map a semantic value back to the crisp domain."""
    return semantic_map.inverse(xs)


@dataclass(frozen=True)
class InferenceLine:
    """Monotone piecewise-linear map between two semantic domains."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.knots:
            raise ValueError("inference line needs at least one knot")
        for i in range(1, len(self.knots)):
            if self.knots[i][0] <= self.knots[i - 1][0]:
                raise ValueError("knot inputs must be strictly increasing")
            if self.knots[i][1] < self.knots[i - 1][1]:
                raise ValueError("knot outputs must be non-decreasing")

    @property
    def inputs(self) -> tuple[float, ...]:
        return tuple(k[0] for k in self.knots)

    @property
    def outputs(self) -> tuple[float, ...]:
        return tuple(k[1] for k in self.knots)


def build_inference_line(state_frame: LinguisticFrame,
                         control_frame: LinguisticFrame) -> InferenceLine:
    """Pair the i-th state value with the i-th control value.

    The order-preserving pairing keeps the semantic ordering of both frames,
    so the resulting line is monotone whenever both value lists are.
    """
    if state_frame.n_labels != control_frame.n_labels:
        raise ValueError(
            f"label counts differ: {state_frame.n_labels} vs {control_frame.n_labels}")
    return InferenceLine(tuple(zip(state_frame.values, control_frame.values)))


def infer(line: InferenceLine, xs: float) -> float:
    """Interpolate a semantic input through the line.

    Inputs beyond the first or last knot clamp to the boundary knot output:
    a bounded controller must not extrapolate control authority.
    """
    knots = line.knots
    if xs <= knots[0][0]:
        return knots[0][1]
    if xs >= knots[-1][0]:
        return knots[-1][1]
    j = bisect_right([k[0] for k in knots], xs)
    x0, y0 = knots[j - 1]
    x1, y1 = knots[j]
    return y0 + (xs - x0) * (y1 - y0) / (x1 - x0)
