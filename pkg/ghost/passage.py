"""
Bottleneck passage times.

Two independent engines measure the time a trajectory of x' = R(r) + F(x)
spends crossing an interval:

  * quadrature of the separation-of-variables integral  t = int dx / rate(x)
  * direct time integration with an embedded Runge-Kutta 4(5) pair and event
    location on the dense output of the step containing the exit crossing

plus the closed forms used as oracles. The low-level engines take a plain
rate callable so the pendulum module can reuse them.
"""

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np
from scipy.integrate import RK45, quad
from scipy.optimize import brentq

from config.ghost_config import (
    DEFAULT_INTERVAL,
    MAX_SCALE_SPLITS,
    ODE_ABS_TOL,
    ODE_EVENT_TOL,
    ODE_MAX_STEPS,
    ODE_REL_TOL,
    QUAD_ABS_TOL,
    QUAD_MAX_SUBDIVISIONS,
    QUAD_REL_TOL,
    SPLIT_RATIO,
)
from ghost.errors import (
    DivergentLimit,
    DomainViolation,
    NonpositiveParameter,
    NoTransit,
    StepLimitExceeded,
    ToleranceNotMet,
)
from ghost.fields import HALF_PI, min_rate

logger = logging.getLogger(__name__)


class Engine(str, Enum):
    QUADRATURE = "quadrature"
    ODE = "ode"
    CLOSED_FORM = "closed_form"


class ClosedForm(str, Enum):
    A1 = "A1"                          # f(x) = sqrt|x| on [0, 1]
    A2 = "A2"                          # f(x) = |x|
    A3 = "A3"                          # f(x) = x**2
    NORMAL_FORM_SYM = "NormalFormSym"  # x' = r + x**2 on [-1, 1]
    PARAM_PROP1 = "ParamProp1"         # x' = 1/a**2 + x**2 on [-1, 1]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainViolation(f"interval ends must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise DomainViolation(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def parse(cls, text):
        """'lo,hi' as used by the CLI."""
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 2:
            raise DomainViolation(f"interval must look like 'lo,hi', got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]))
        except ValueError:
            raise DomainViolation(f"interval must look like 'lo,hi', got {text!r}") from None


DEFAULT_IV = Interval(*DEFAULT_INTERVAL)


@dataclass(frozen=True)
class PassageResult:
    time: float
    engine: Engine
    error_estimate: float
    evaluations: int

    def to_dict(self):
        data = asdict(self)
        data["engine"] = self.engine.value
        return data


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = QUAD_REL_TOL
    abs_tol: float = QUAD_ABS_TOL
    max_subdivisions: int = QUAD_MAX_SUBDIVISIONS

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_subdivisions < 1:
            raise DomainViolation("quadrature tolerances and subdivision budget must be positive")


@dataclass(frozen=True)
class OdeConfig:
    rel_tol: float = ODE_REL_TOL
    abs_tol: float = ODE_ABS_TOL
    max_steps: int = ODE_MAX_STEPS
    event_tol: float = ODE_EVENT_TOL

    def __post_init__(self):
        if min(self.rel_tol, self.abs_tol, self.event_tol) <= 0 or self.max_steps < 1:
            raise DomainViolation("ODE tolerances and step budget must be positive")


# --- Quadrature engine ---

def scale_breakpoints(center, width, lo, hi, ratio=SPLIT_RATIO, limit=MAX_SCALE_SPLITS):
    """
    Split points for an integrand peaked at `center` with half-width `width`:
    the center itself and center +- width * ratio**j inside (lo, hi).
    At most `limit` points per side; wider spacing is used when the range
    covers more decades than that.
    """
    points = set()
    if lo < center < hi:
        points.add(center)
    if width > 0 and math.isfinite(width):
        for side, reach in ((1.0, hi - center), (-1.0, center - lo)):
            if reach <= width:
                continue
            decades = math.log(reach / width) / math.log(ratio)
            stride = max(1, math.ceil(decades / limit))
            j = 0
            offset = width
            while offset < reach:
                points.add(center + side * offset)
                j += stride
                offset = width * ratio ** j
    return sorted(p for p in points if lo < p < hi)


def quadrature_transit(rate, lo, hi, breakpoints=(), cfg=QuadratureConfig()):
    """
    int_lo^hi dx / rate(x) by adaptive subdivision, one QUADPACK call per
    piece between consecutive breakpoints. The caller guarantees rate > 0.
    """
    evaluations = 0

    def integrand(x):
        nonlocal evaluations
        evaluations += 1
        return 1.0 / rate(x)

    edges = [lo, *[p for p in breakpoints if lo < p < hi], hi]
    total = 0.0
    error = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        out = quad(integrand, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                   limit=cfg.max_subdivisions, full_output=1)
        value, abserr = out[0], out[1]
        if len(out) > 3:
            # QUADPACK flagged the piece; accept only if the estimate still meets the request
            if abserr > max(cfg.abs_tol, cfg.rel_tol * abs(value)):
                raise ToleranceNotMet(f"piece [{a:.6g}, {b:.6g}]: {out[3]}")
            logger.debug("accepted flagged piece [%.6g, %.6g]: %s", a, b, out[3])
        total += value
        error += abserr
    return PassageResult(total, Engine.QUADRATURE, error, evaluations)


def _field_breakpoints(field, level, lo, hi):
    phase = field.phase
    if phase.symmetric:
        return scale_breakpoints(0.0, phase.scale(level) if level > 0 else 0.0, lo, hi)
    return [p for p in (-HALF_PI, 0.0, HALF_PI) if lo < p < hi]


def _check_transit(field, r, lo, hi):
    if not math.isfinite(r):
        raise DomainViolation(f"r must be finite, got {r}")
    floor = min_rate(field, r, lo, hi)
    if floor <= 0:
        raise NoTransit(f"rate {floor:.3e} <= 0 on [{lo}, {hi}] at r={r}: a fixed point blocks passage")
    return floor


def passage_time_quadrature(field, r, iv=DEFAULT_IV, cfg=QuadratureConfig()):
    _check_transit(field, r, iv.lo, iv.hi)
    level = field.param(r)
    phase = field.phase
    result = quadrature_transit(lambda x: level + phase(x), iv.lo, iv.hi,
                                _field_breakpoints(field, level, iv.lo, iv.hi), cfg)
    logger.debug("quadrature r=%.6e t=%.17g err=%.2e evals=%d",
                 r, result.time, result.error_estimate, result.evaluations)
    return result


def side_times(field, r, iv=DEFAULT_IV, cfg=QuadratureConfig()):
    """The left and right contributions A_-(r), A_+(r) of a passage across x = 0."""
    if not iv.lo < 0 < iv.hi:
        raise DomainViolation(f"interval [{iv.lo}, {iv.hi}] does not contain 0")
    left = passage_time_quadrature(field, r, Interval(iv.lo, 0.0), cfg)
    right = passage_time_quadrature(field, r, Interval(0.0, iv.hi), cfg)
    return left.time, right.time


# --- ODE engine ---

def _integrate(rate, x_enter, x_exit, floor, cfg, record):
    evaluations = 0

    def rhs(t, y):
        nonlocal evaluations
        evaluations += 1
        return np.array([rate(y[0])])

    # transit time is at most (x_exit - x_enter) / floor
    t_bound = 2.0 * (x_exit - x_enter) / floor
    solver = RK45(rhs, 0.0, np.array([float(x_enter)]), t_bound,
                  rtol=cfg.rel_tol, atol=cfg.abs_tol)
    times = [0.0]
    states = [float(x_enter)]
    steps = 0
    while True:
        if steps >= cfg.max_steps:
            raise StepLimitExceeded(f"no exit after {steps} steps (t={solver.t:.6g}, x={solver.y[0]:.6g})")
        t_prev = solver.t
        message = solver.step()
        steps += 1
        if solver.status == "failed":
            raise StepLimitExceeded(f"integrator failed at t={solver.t:.6g}: {message}")

        x_now = solver.y[0]
        if x_now >= x_exit:
            tol = cfg.event_tol / rate(x_exit)
            if x_now == x_exit:
                t_cross = solver.t
            else:
                dense = solver.dense_output()
                t_cross = brentq(lambda s: dense(s)[0] - x_exit, t_prev, solver.t, xtol=tol)
            times.append(t_cross)
            states.append(float(x_exit))
            return t_cross, tol, evaluations, steps, times, states
        if record:
            times.append(solver.t)
            states.append(x_now)
        if solver.status == "finished":
            raise NoTransit(f"trajectory stalled at x={x_now:.6g} before reaching {x_exit}")


def ode_transit(rate, x_enter, x_exit, floor, cfg=OdeConfig()):
    """First time x(T) = x_exit for x(0) = x_enter; floor is a positive lower bound of rate."""
    if x_enter == x_exit:
        return PassageResult(0.0, Engine.ODE, 0.0, 0)
    if x_enter > x_exit:
        raise DomainViolation(f"x_enter={x_enter} must not exceed x_exit={x_exit}")
    t_cross, tol, evaluations, steps, _, _ = _integrate(rate, x_enter, x_exit, floor, cfg, record=False)
    logger.debug("ode transit [%.6g, %.6g] t=%.17g steps=%d evals=%d",
                 x_enter, x_exit, t_cross, steps, evaluations)
    return PassageResult(t_cross, Engine.ODE, tol, evaluations)


def passage_time_ode(field, r, x_enter, x_exit, cfg=OdeConfig()):
    if x_enter == x_exit:
        return PassageResult(0.0, Engine.ODE, 0.0, 0)
    if x_enter > x_exit:
        raise DomainViolation(f"x_enter={x_enter} must not exceed x_exit={x_exit}")
    floor = _check_transit(field, r, x_enter, x_exit)
    level = field.param(r)
    phase = field.phase
    return ode_transit(lambda x: level + phase(x), x_enter, x_exit, floor, cfg)


def ode_trajectory(field, r, x_enter, x_exit, cfg=OdeConfig()):
    """Accepted (t, x) steps of a transit, ending exactly at the exit crossing."""
    if not x_enter < x_exit:
        raise DomainViolation(f"x_enter={x_enter} must be below x_exit={x_exit}")
    floor = _check_transit(field, r, x_enter, x_exit)
    level = field.param(r)
    phase = field.phase
    *_, times, states = _integrate(lambda x: level + phase(x), x_enter, x_exit, floor, cfg, record=True)
    return np.array(times), np.array(states)


def passage_time(field, r, iv=DEFAULT_IV, engine=Engine.QUADRATURE,
                 quad_cfg=QuadratureConfig(), ode_cfg=OdeConfig()):
    """Dispatch to the requested engine over the interval."""
    if Engine(engine) is Engine.ODE:
        return passage_time_ode(field, r, iv.lo, iv.hi, ode_cfg)
    if Engine(engine) is Engine.QUADRATURE:
        return passage_time_quadrature(field, r, iv, quad_cfg)
    raise DomainViolation("closed forms are selected with closed_form_passage")


# --- Closed forms ---

def closed_form_passage(example, r, aux=None):
    example = ClosedForm(example)
    if not r > 0:
        raise NonpositiveParameter(f"closed forms need r > 0, got {r}")
    if example is ClosedForm.A1:
        return 2.0 + 2.0 * r * math.log(r) - 2.0 * r * math.log1p(r)
    if example is ClosedForm.A2:
        return math.log1p(1.0 / r)
    if example is ClosedForm.A3:
        return math.atan(1.0 / math.sqrt(r)) / math.sqrt(r)
    if example is ClosedForm.NORMAL_FORM_SYM:
        return 2.0 * math.atan(1.0 / math.sqrt(r)) / math.sqrt(r)
    if aux is None or not aux > 0:
        raise NonpositiveParameter(f"ParamProp1 needs a(r) > 0, got {aux}")
    return 2.0 * aux * math.atan(aux)


def limit_passage_alpha(alpha):
    """r -> 0+ limit of int_0^1 dx / (r + x**alpha); finite only for alpha < 1."""
    if not alpha > 0:
        raise DomainViolation(f"alpha must be positive, got {alpha}")
    if alpha >= 1:
        raise DivergentLimit(f"passage time diverges as r -> 0+ for alpha={alpha}")
    return 1.0 / (1.0 - alpha)
