"""
Overdamped pendulum with angle-dependent length.

With L(theta) = F_a(theta) / sin(theta) the overdamped equation becomes

    theta' = omega - F_a(theta),   theta in [-pi, pi]

where F_a is the piecewise power wave through (0, 0), (pi/2, 1), (pi, 0),
(-pi/2, -1). The length at the bottleneck is L(pi/2) = 1 for every a, so
the wave exponent a alone decides how the transit time grows as omega -> 1+:
bounded for a < 1, logarithmic for a = 1, a power of omega - 1 for a > 1.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

from config.ghost_config import L_MAX, PENDULUM_INTERVAL
from ghost.errors import DivergentLimit, DomainViolation, NoTransit, SingularPoint
from ghost.fields import HALF_PI, power_wave
from ghost.passage import (
    Engine,
    Interval,
    OdeConfig,
    QuadratureConfig,
    ode_transit,
    quadrature_transit,
    scale_breakpoints,
)
from ghost.scaling import ScalingSample, SweepSpec, sweep_values

logger = logging.getLogger(__name__)

BOTTLENECK_IV = Interval(*PENDULUM_INTERVAL)


@dataclass(frozen=True)
class PendulumParams:
    a: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainViolation(f"wave exponent a must be positive, got {self.a}")
        if not math.isfinite(self.omega):
            raise DomainViolation(f"omega must be finite, got {self.omega}")

    @property
    def r(self):
        """Distance past the bifurcation, omega - 1."""
        return self.omega - 1.0


class Elongation(str, Enum):
    EXCLUDE = "exclude"
    CAP = "cap"


@dataclass(frozen=True)
class ElongationPolicy:
    l_max: float = L_MAX
    mode: Elongation = Elongation.EXCLUDE

    def __post_init__(self):
        if not self.l_max >= 1:
            raise DomainViolation(f"l_max must be >= 1, got {self.l_max}")
        object.__setattr__(self, "mode", Elongation(self.mode))


def _check_bottleneck_interval(iv):
    if iv.lo < 0 or iv.hi > math.pi:
        raise DomainViolation(f"bottleneck interval must lie in [0, pi], got [{iv.lo}, {iv.hi}]")


def _check_theta(theta):
    if not -math.pi <= theta <= math.pi:
        raise DomainViolation(f"theta must lie in [-pi, pi], got {theta}")


def wave_F(a, theta):
    if not a > 0:
        raise DomainViolation(f"wave exponent a must be positive, got {a}")
    _check_theta(theta)
    return power_wave(a, theta)


def elongation_L(a, theta, policy=ElongationPolicy()):
    """F_a(theta) / sin(theta); 0/0 at theta in {0, +-pi}."""
    value = wave_F(a, theta)
    if theta == 0 or abs(theta) == math.pi:
        if policy.mode is Elongation.EXCLUDE:
            raise SingularPoint(f"L is undefined at theta={theta}")
        return policy.l_max
    length = value / math.sin(theta)
    if policy.mode is Elongation.CAP:
        return min(length, policy.l_max)
    return length


def pendulum_rhs(p, theta):
    return p.omega - wave_F(p.a, theta)


def _rate(p):
    a, omega = p.a, p.omega
    return lambda theta: omega - power_wave(a, theta)


def _bottleneck_transit(a, r, lo, hi, cfg):
    """
    int_lo^hi dtheta / (omega - F_a) for [lo, hi] inside [0, pi], in u = theta - pi/2.
    There the rate is r + (|u| / (pi/2))**a exactly, and the split points
    around u = 0 keep their full precision however small r is.
    """
    u_lo, u_hi = lo - HALF_PI, hi - HALF_PI
    width = HALF_PI * r ** (1.0 / a) if r > 0 else 0.0
    return quadrature_transit(lambda u: r + (abs(u) / HALF_PI) ** a, u_lo, u_hi,
                              scale_breakpoints(0.0, width, u_lo, u_hi), cfg)


def bottleneck_time(p, iv=BOTTLENECK_IV, engine=Engine.QUADRATURE,
                    quad_cfg=QuadratureConfig(), ode_cfg=OdeConfig()):
    """Transit time of theta across iv (inside [0, pi]), the bottleneck around pi/2."""
    _check_bottleneck_interval(iv)
    if p.omega <= 1:
        raise NoTransit(f"omega={p.omega} <= 1: fixed points at the bottleneck block rotation")
    rate = _rate(p)
    if Engine(engine) is Engine.ODE:
        floor = min(rate(x) for x in (iv.lo, iv.hi, min(max(HALF_PI, iv.lo), iv.hi)))
        result = ode_transit(rate, iv.lo, iv.hi, floor, ode_cfg)
    else:
        result = _bottleneck_transit(p.a, p.r, iv.lo, iv.hi, quad_cfg)
    logger.debug("pendulum a=%g omega-1=%.6e t=%.17g", p.a, p.r, result.time)
    return result


def bottleneck_limit(a, iv=BOTTLENECK_IV, quad_cfg=QuadratureConfig()):
    """omega -> 1+ limit of the bottleneck time, finite only for a < 1."""
    if not a > 0:
        raise DomainViolation(f"wave exponent a must be positive, got {a}")
    _check_bottleneck_interval(iv)
    if a >= 1 and iv.lo <= HALF_PI <= iv.hi:
        raise DivergentLimit(f"bottleneck time diverges as omega -> 1+ for a={a}")
    # u = 0 is a piece boundary, where QUADPACK never evaluates the integrand
    return _bottleneck_transit(a, 0.0, iv.lo, iv.hi, quad_cfg).time


def rotation_period(p, quad_cfg=QuadratureConfig()):
    """Time of one full turn, int_{-pi}^{pi} dtheta / (omega - F_a(theta))."""
    if p.omega <= 1:
        raise NoTransit(f"omega={p.omega} <= 1: the pendulum locks at a fixed point")
    # the lower half circle, where F_a <= 0, plus the bottleneck half [0, pi]
    lower = quadrature_transit(_rate(p), -math.pi, 0.0, [-HALF_PI], quad_cfg)
    upper = _bottleneck_transit(p.a, p.r, 0.0, math.pi, quad_cfg)
    return lower.time + upper.time


def sine_rotation_period(omega, quad_cfg=QuadratureConfig()):
    """Period of the classical nonuniform oscillator theta' = omega - sin(theta)."""
    if not omega > 1:
        raise NoTransit(f"omega={omega} <= 1: the oscillator locks at a fixed point")
    width = math.sqrt(2.0 * (omega - 1.0))
    breakpoints = scale_breakpoints(HALF_PI, width, -math.pi, math.pi)
    return quadrature_transit(lambda theta: omega - math.sin(theta), -math.pi, math.pi,
                              breakpoints, quad_cfg).time


def sweep_bottleneck(a, spec=SweepSpec(), iv=BOTTLENECK_IV, threads=None,
                     quad_cfg=QuadratureConfig(), ode_cfg=OdeConfig()):
    """Bottleneck times for omega - 1 on the sweep grid, as (omega - 1, t) samples."""
    if not a > 0:
        raise DomainViolation(f"wave exponent a must be positive, got {a}")
    _check_bottleneck_interval(iv)
    logger.info("pendulum sweep a=%g over omega-1 in [%g, %g], %d points",
                a, spec.r_lo, spec.r_hi, spec.points)
    grid = spec.grid()
    times = sweep_values(
        lambda r: bottleneck_time(PendulumParams(a, 1.0 + r), iv, spec.engine, quad_cfg, ode_cfg).time,
        grid, threads)
    return [ScalingSample(float(r), float(t)) for r, t in zip(grid, times)]
