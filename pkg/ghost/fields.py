"""
One-parameter families of 1-D vector fields  x' = R(r) + F(x).

A field pairs a parameter map R with a phase function F. Phase functions that
are defined one-sided (x -> x**alpha) are always realised through their even
extension |x|**alpha.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from config.ghost_config import ROOT_TOL
from ghost.errors import DomainViolation, InvalidFieldSpec, UnknownFamily

HALF_PI = math.pi / 2


def format_number(value):
    """Shortest text that round-trips a float; integral values lose their '.0'."""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _parse_number(text, spec):
    try:
        value = float(text)
    except ValueError:
        raise InvalidFieldSpec(f"bad number {text!r} in field spec {spec!r}") from None
    if not math.isfinite(value):
        raise InvalidFieldSpec(f"non-finite number in field spec {spec!r}")
    return value


def _parse_int(text, spec):
    value = _parse_number(text, spec)
    if value != int(value):
        raise InvalidFieldSpec(f"integer expected in field spec {spec!r}")
    return int(value)


def power_wave(a, theta):
    """
    The pendulum wave F_a on [-pi, pi], one branch per quarter of the circle.
    Scalar in, float out; no domain check (see pendulum.wave_F).
    """
    if theta < -HALF_PI:
        return -1.0 + ((-2 / math.pi) * (theta + HALF_PI)) ** a
    if theta < 0:
        return -1.0 + ((2 / math.pi) * (theta + HALF_PI)) ** a
    if theta < HALF_PI:
        return 1.0 - ((-2 / math.pi) * (theta - HALF_PI)) ** a
    return 1.0 - ((2 / math.pi) * (theta - HALF_PI)) ** a


_power_wave_array = np.vectorize(power_wave, otypes=[float])


# --- Phase functions ---

@dataclass(frozen=True)
class PhaseFn:
    """Base class of the phase variants F."""

    symmetric = True

    def __call__(self, x):
        raise NotImplementedError

    @property
    def local_exponent(self):
        """alpha in F(x) = |x|**alpha near the minimum, None if F is not of that form."""
        return None

    @property
    def spec(self):
        raise NotImplementedError

    def scale(self, level):
        """Width x_c > 0 of the bottleneck: F(x_c) = level."""
        return level ** (1.0 / self.local_exponent)


@dataclass(frozen=True)
class Quadratic(PhaseFn):
    def __call__(self, x):
        return x * x

    @property
    def local_exponent(self):
        return 2.0

    @property
    def spec(self):
        return "quadratic"


@dataclass(frozen=True)
class PowerPhase(PhaseFn):
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidFieldSpec(f"power phase needs alpha > 0, got {self.alpha}")

    def __call__(self, x):
        return abs(x) ** self.alpha

    @property
    def local_exponent(self):
        return float(self.alpha)

    @property
    def spec(self):
        return f"power:{format_number(self.alpha)}"


@dataclass(frozen=True)
class MonomialPhase(PhaseFn):
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise InvalidFieldSpec(f"monomial phase needs integer m >= 2, got {self.m}")

    def __call__(self, x):
        return abs(x) ** self.m

    @property
    def local_exponent(self):
        return float(self.m)

    @property
    def spec(self):
        return f"monomial:{int(self.m)}"


@dataclass(frozen=True)
class PendulumWave(PhaseFn):
    a: float

    symmetric = False

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise InvalidFieldSpec(f"pendulum wave needs a > 0, got {self.a}")

    def __call__(self, theta):
        if np.ndim(theta) == 0:
            return power_wave(self.a, theta)
        return _power_wave_array(self.a, theta)

    @property
    def spec(self):
        return f"pendulum:{format_number(self.a)}"

    def scale(self, level):
        # near pi/2 the wave is 1 - ((2/pi)|theta - pi/2|)**a
        return HALF_PI * level ** (1.0 / self.a)


# --- Parameter maps ---

@dataclass(frozen=True)
class ParamMap:
    """Base class of the parameter maps R."""

    sign_changing = False

    def __call__(self, r):
        raise NotImplementedError

    @property
    def spec(self):
        raise NotImplementedError

    def bottleneck_scale(self, r):
        """a(r) with R(r) = 1 / a(r)**2."""
        level = self(r)
        if level <= 0:
            raise DomainViolation(f"R({r}) = {level} has no bottleneck scale")
        return 1.0 / math.sqrt(level)


@dataclass(frozen=True)
class Identity(ParamMap):
    sign_changing = True

    def __call__(self, r):
        return r

    @property
    def spec(self):
        return "identity"


@dataclass(frozen=True)
class EvenPower(ParamMap):
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidFieldSpec(f"evenpower needs integer k >= 1, got {self.k}")

    def __call__(self, r):
        return r ** (2 * int(self.k))

    @property
    def spec(self):
        return f"evenpower:{int(self.k)}"

    def bottleneck_scale(self, r):
        if r == 0:
            raise DomainViolation("evenpower has no bottleneck scale at r=0")
        return abs(r) ** (-int(self.k))


@dataclass(frozen=True)
class InverseSquareExp(ParamMap):
    def __call__(self, r):
        # continuous extension by the limit value at r <= 0
        if r <= 0:
            return 0.0
        return math.exp(-2.0 / r)

    @property
    def spec(self):
        return "invsqexp"

    def bottleneck_scale(self, r):
        if r <= 0:
            raise DomainViolation(f"invsqexp has no bottleneck scale at r={r}")
        return math.exp(1.0 / r)


# --- Fields ---

@dataclass(frozen=True)
class VectorField1D:
    phase: PhaseFn
    param: ParamMap

    def rate(self, r, x):
        return self.param(r) + self.phase(x)

    @property
    def spec(self):
        return {"phase": self.phase.spec, "param": self.param.spec}

    @classmethod
    def from_spec(cls, phase, param="identity"):
        return cls(parse_phase(phase), parse_param(param))


def parse_phase(text):
    """`quadratic`, `power:<alpha>`, `monomial:<m>` or `pendulum:<a>`."""
    name, _, arg = text.strip().lower().partition(":")
    if name == "quadratic" and not arg:
        return Quadratic()
    if name == "power" and arg:
        return PowerPhase(_parse_number(arg, text))
    if name == "monomial" and arg:
        return MonomialPhase(_parse_int(arg, text))
    if name == "pendulum" and arg:
        return PendulumWave(_parse_number(arg, text))
    raise InvalidFieldSpec(f"unknown phase spec {text!r}")


def parse_param(text):
    """`identity`, `evenpower:<k>` or `invsqexp`."""
    name, _, arg = text.strip().lower().partition(":")
    if name == "identity" and not arg:
        return Identity()
    if name == "evenpower" and arg:
        return EvenPower(_parse_int(arg, text))
    if name == "invsqexp" and not arg:
        return InverseSquareExp()
    raise InvalidFieldSpec(f"unknown param spec {text!r}")


# --- Operations ---

class Bifurcation(Enum):
    SADDLE_NODE = "saddle-node"
    TOPOLOGICALLY_DEGENERATE = "topologically-degenerate"


def eval_field(field, r, x):
    return field.rate(r, x)


def fixed_points(field, r, search_box=10.0):
    """
    Roots of R(r) + F(x) = 0 inside [-search_box, search_box], sorted.

    Closed form per family: none for R > 0, the double root 0 for R = 0 and
    +-(-R)**(1/alpha) for R < 0.
    """
    if not math.isfinite(r):
        raise DomainViolation(f"r must be finite, got {r}")
    if not (math.isfinite(search_box) and search_box > 0):
        raise DomainViolation(f"search_box must be finite and positive, got {search_box}")
    if not field.phase.symmetric:
        raise UnknownFamily("pendulum fixed points are handled by the pendulum module")

    level = field.param(r)
    if level > 0:
        return []
    if level == 0:
        return [0.0]

    root = field.phase.scale(-level)
    roots = [-root, root] if root <= search_box else []
    for x in roots:
        residual = abs(field.rate(r, x))
        if residual > ROOT_TOL * max(1.0, abs(r)):
            raise DomainViolation(f"root {x} misses tolerance, residual {residual:.3e}")
    return roots


def classify_bifurcation(field):
    """SaddleNode when R changes sign at r = 0, TopologicallyDegenerate when R >= 0 on both sides."""
    if field.param.sign_changing:
        return Bifurcation.SADDLE_NODE
    return Bifurcation.TOPOLOGICALLY_DEGENERATE


def min_rate(field, r, lo, hi):
    """Minimum of the rate over [lo, hi], evaluated at the only candidate minima of each family."""
    candidates = [lo, hi]
    if field.phase.symmetric:
        candidates.append(min(max(0.0, lo), hi))
    elif lo < -HALF_PI < hi:
        candidates.append(-HALF_PI)
    return min(field.rate(r, x) for x in candidates)
