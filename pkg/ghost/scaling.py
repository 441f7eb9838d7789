"""
Scaling laws of passage times as r -> 0+.

Sweeps a log-spaced grid toward the bifurcation, fits the three scaling
classes (constant, logarithmic, power law), picks one, predicts the class
from the field family and scans the phase exponent alpha to expose the
switch of class at alpha = 1.
"""

import asyncio
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from config.ghost_config import (
    CONSTANT_BAND,
    DEFAULT_POINTS,
    DEFAULT_R_HI,
    DEFAULT_R_LO,
    DEFAULT_THREADS,
    LOG_MARGIN,
    MIN_POINTS,
    POWER_EXPONENT_BOUNDS,
    POWER_PROFILE_GRID,
    THREADS_ENV_VAR,
)
from ghost.errors import (
    DegenerateData,
    DomainViolation,
    GhostError,
    InsufficientData,
    SweepError,
    UnknownFamily,
)
from ghost.fields import EvenPower, Identity, InverseSquareExp, PowerPhase, VectorField1D
from ghost.passage import DEFAULT_IV, Engine, Interval, OdeConfig, QuadratureConfig, passage_time

logger = logging.getLogger(__name__)


class ScalingModel(str, Enum):
    CONSTANT = "constant"
    LOGARITHMIC = "logarithmic"
    POWER = "power"
    NON_POWER = "nonpower"  # predictions only


@dataclass(frozen=True)
class SweepSpec:
    r_lo: float = DEFAULT_R_LO
    r_hi: float = DEFAULT_R_HI
    points: int = DEFAULT_POINTS
    spacing: str = "log"
    engine: Engine = Engine.QUADRATURE
    interval: Interval = DEFAULT_IV

    def __post_init__(self):
        if not (math.isfinite(self.r_lo) and self.r_lo > 0):
            raise DomainViolation(f"r_lo must be positive, got {self.r_lo}")
        if not (math.isfinite(self.r_hi) and self.r_hi > self.r_lo):
            raise DomainViolation(f"r_hi must exceed r_lo, got [{self.r_lo}, {self.r_hi}]")
        if int(self.points) != self.points or self.points < MIN_POINTS:
            raise DomainViolation(f"a sweep needs at least {MIN_POINTS} points, got {self.points}")
        if self.spacing != "log":
            raise DomainViolation(f"only log spacing is supported, got {self.spacing!r}")
        object.__setattr__(self, "engine", Engine(self.engine))
        if self.engine is Engine.CLOSED_FORM:
            raise DomainViolation("sweeps run the quadrature or ode engine")

    def grid(self):
        """Strictly decreasing toward r_lo."""
        return np.geomspace(self.r_hi, self.r_lo, int(self.points))


@dataclass(frozen=True)
class ScalingSample:
    r: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0 and math.isfinite(self.t) and self.t > 0):
            raise DomainViolation(f"samples need finite positive r and t, got ({self.r}, {self.t})")


@dataclass(frozen=True)
class ScalingFit:
    """
    One fitted law. Which fields carry meaning depends on the model:
      constant     t ~ prefactor
      logarithmic  t ~ prefactor * ln(1/r) + intercept
      power        t ~ prefactor * r**(-exponent) + intercept
    rmse is the relative rmse sqrt(mean(((t_fit - t) / t)**2)).
    """

    model: ScalingModel
    exponent: Optional[float]
    prefactor: float
    intercept: float
    rmse: float
    r_squared: float

    def predict(self, r):
        r = np.asarray(r, dtype=float)
        if self.model is ScalingModel.CONSTANT:
            return np.full_like(r, self.prefactor)
        if self.model is ScalingModel.LOGARITHMIC:
            return self.prefactor * np.log(1.0 / r) + self.intercept
        return self.prefactor * r ** (-self.exponent) + self.intercept

    def to_dict(self):
        return {
            "model": self.model.value,
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "intercept": self.intercept,
            "rmse": self.rmse,
            "r_squared": self.r_squared,
        }


@dataclass(frozen=True)
class LawPrediction:
    """Scaling class expected from the field family; prefactor is the constant value for CONSTANT."""

    model: ScalingModel
    exponent: Optional[float] = None
    prefactor: Optional[float] = None
    note: str = ""

    def to_dict(self):
        return {"model": self.model.value, "exponent": self.exponent,
                "prefactor": self.prefactor, "note": self.note}


@dataclass(frozen=True)
class RegimeMap:
    entries: tuple = dataclass_field(default_factory=tuple)

    def __post_init__(self):
        alphas = [alpha for alpha, _ in self.entries]
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise DomainViolation(f"regime map alphas must be strictly increasing, got {alphas}")

    def models(self):
        return [fit.model for _, fit in self.entries]

    def to_list(self):
        return [{"alpha": alpha, **fit.to_dict()} for alpha, fit in self.entries]


# --- Sweeps ---

def resolve_threads(threads=None):
    """Worker count: explicit value, else GHOST_THREADS, else serial; 0 means every core."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV_VAR, "").strip()
        try:
            threads = int(raw) if raw else DEFAULT_THREADS
        except ValueError:
            raise DomainViolation(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise DomainViolation(f"thread count must be >= 0, got {threads}")
    return threads or os.cpu_count() or 1


def _measure_point(time_fn, r):
    try:
        return time_fn(r)
    except GhostError as exc:
        raise SweepError(r, exc) from exc


async def _gather_points(time_fn, grid, workers):
    loop = asyncio.get_running_loop()
    pool = ThreadPoolExecutor(max_workers=workers)
    try:
        tasks = [loop.run_in_executor(pool, _measure_point, time_fn, r) for r in grid]
        # gather keeps grid order whatever the completion order
        results = await asyncio.gather(*tasks, return_exceptions=True)
    finally:
        pool.shutdown(wait=True)
    for result in results:
        if isinstance(result, Exception):
            raise result
    return results


def sweep_values(time_fn, grid, threads=None):
    """time_fn(r) for every grid point, in grid order; the first failure aborts with its r."""
    workers = resolve_threads(threads)
    start = time.time()
    if workers == 1:
        values = [_measure_point(time_fn, float(r)) for r in grid]
    else:
        values = asyncio.run(_gather_points(time_fn, [float(r) for r in grid], workers))
    logger.info("swept %d points with %d worker(s) in %.2fs", len(values), workers, time.time() - start)
    return values


def sweep(field, spec=SweepSpec(), threads=None, quad_cfg=QuadratureConfig(), ode_cfg=OdeConfig()):
    logger.info("sweeping %s/%s over r in [%g, %g], %d points, %s engine",
                field.phase.spec, field.param.spec, spec.r_lo, spec.r_hi, spec.points, spec.engine.value)
    grid = spec.grid()
    times = sweep_values(
        lambda r: passage_time(field, r, spec.interval, spec.engine, quad_cfg, ode_cfg).time,
        grid, threads)
    return [ScalingSample(float(r), float(t)) for r, t in zip(grid, times)]


# --- Fits ---

def _as_arrays(samples):
    samples = [s if isinstance(s, ScalingSample) else ScalingSample(*s) for s in samples]
    if len(samples) < MIN_POINTS:
        raise InsufficientData(f"a scaling fit needs at least {MIN_POINTS} samples, got {len(samples)}")
    r = np.array([s.r for s in samples], dtype=float)
    t = np.array([s.t for s in samples], dtype=float)
    # fits run on t / t[0]; scaling t by a power of two then leaves every digit unchanged
    return r, t / t[0], t[0]


def _relative_rmse(fitted, y):
    return float(np.sqrt(np.mean(((fitted - y) / y) ** 2)))


def _r_squared(y, fitted):
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0:
        return 1.0 if ss_res == 0 else 0.0
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def fit_constant(samples):
    r, y, scale = _as_arrays(samples)
    level = float(np.mean(y))
    fitted = np.full_like(y, level)
    return ScalingFit(ScalingModel.CONSTANT, None, level * scale, 0.0,
                      _relative_rmse(fitted, y), _r_squared(y, fitted))


def fit_log(samples):
    """Least squares of t on ln(1/r)."""
    r, y, scale = _as_arrays(samples)
    log_inv_r = -np.log(r)
    if np.ptp(log_inv_r) == 0:
        raise DegenerateData("all samples share the same r")
    slope, intercept = np.polyfit(log_inv_r, y, 1)
    fitted = slope * log_inv_r + intercept
    return ScalingFit(ScalingModel.LOGARITHMIC, None, float(slope) * scale, float(intercept) * scale,
                      _relative_rmse(fitted, y), _r_squared(y, fitted))


def _offset_power(r, y, p):
    """Best (C, c0) of y ~ C * (r / r[0])**(-p) + c0 in relative residuals, and its rmse."""
    basis = (r / r[0]) ** (-p)
    design = np.column_stack([basis, np.ones_like(basis)]) / y[:, None]
    coef, *_ = np.linalg.lstsq(design, np.ones_like(y), rcond=None)
    rmse = float(np.sqrt(np.mean((design @ coef - 1.0) ** 2)))
    return float(coef[0]), float(coef[1]), rmse


def _profile_power(r, y):
    lo, hi = POWER_EXPONENT_BOUNDS
    grid = np.linspace(lo, hi, POWER_PROFILE_GRID)
    scores = [_offset_power(r, y, p)[2] for p in grid]
    best = int(np.argmin(scores))
    bracket = (grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)])
    res = minimize_scalar(lambda p: _offset_power(r, y, p)[2], bounds=bracket,
                          method="bounded", options={"xatol": 1e-12})
    p = float(res.x) if res.fun <= scores[best] else float(grid[best])
    coef, offset, rmse = _offset_power(r, y, p)
    return p, coef * r[0] ** p, offset, rmse


def fit_power(samples):
    """
    Least squares of ln t on ln r, exponent = -slope. A finite transit
    interval adds a constant to the pure power law, so the offset model
    t ~ C r**(-p) + c0 is profiled over p as well and kept when it fits better.
    """
    r, y, scale = _as_arrays(samples)
    log_r = np.log(r)
    if np.ptp(log_r) == 0:
        raise DegenerateData("all samples share the same r")
    log_y = np.log(y)
    slope, intercept = np.polyfit(log_r, log_y, 1)
    exponent, prefactor, offset = float(-slope), float(np.exp(intercept)), 0.0
    fitted = prefactor * r ** (-exponent)
    rmse = _relative_rmse(fitted, y)

    p, coef, c0, profiled_rmse = _profile_power(r, y)
    if coef > 0 and profiled_rmse + 1e-12 < rmse:
        exponent, prefactor, offset, rmse = p, coef, c0, profiled_rmse
        fitted = prefactor * r ** (-exponent) + offset

    if np.all(fitted > 0):
        r_squared = _r_squared(log_y, np.log(fitted))
    else:
        r_squared = _r_squared(y, fitted)
    return ScalingFit(ScalingModel.POWER, exponent, prefactor * scale, offset * scale, rmse, r_squared)


def select_model(candidates, constant_band=CONSTANT_BAND, log_margin=LOG_MARGIN):
    """
    Constant if its relative rmse is within the band, else logarithmic if it is
    within log_margin of the power law, else the power law.
    """
    by_model = {fit.model: fit for fit in candidates}
    try:
        constant = by_model[ScalingModel.CONSTANT]
        logarithmic = by_model[ScalingModel.LOGARITHMIC]
        power = by_model[ScalingModel.POWER]
    except KeyError as exc:
        raise DomainViolation(f"select_model needs constant, logarithmic and power fits, missing {exc}") from None
    if constant.rmse <= constant_band:
        return constant
    if logarithmic.rmse <= power.rmse + log_margin:
        return logarithmic
    return power


def fit_samples(samples):
    """Fit all three classes and select one."""
    choice = select_model([fit_constant(samples), fit_log(samples), fit_power(samples)])
    logger.info("selected %s (rmse %.3e)", choice.model.value, choice.rmse)
    return choice


# --- Predictions ---

def bottleneck_integral(alpha):
    """int_0^inf dy / (1 + y**alpha) for alpha > 1, by quadrature."""
    head, _ = quad(lambda y: 1.0 / (1.0 + y ** alpha), 0.0, 1.0, epsabs=0, epsrel=1e-12)
    tail, _ = quad(lambda y: 1.0 / (1.0 + y ** alpha), 1.0, np.inf, epsabs=0, epsrel=1e-12, limit=500)
    return head + tail


def _antiderivative(alpha, x):
    # of |x|**(-alpha), alpha < 1, odd in x
    return math.copysign(abs(x) ** (1.0 - alpha) / (1.0 - alpha), x)


def predicted_law(field, interval=DEFAULT_IV):
    """
    Scaling class implied by the family as r -> 0+ over an interval holding 0.
    R(r) = r**g with g = 1 (identity) or 2k (evenpower) rescales the exponent
    (alpha - 1)/alpha by g; invsqexp makes ln(1/R) = 2/r.
    """
    alpha = field.phase.local_exponent
    if alpha is None:
        raise UnknownFamily(f"no scaling prediction for phase {field.phase.spec}")
    if not interval.lo <= 0 <= interval.hi:
        raise DomainViolation(f"interval [{interval.lo}, {interval.hi}] does not contain the bottleneck at 0")
    param = field.param
    if isinstance(param, Identity):
        growth = 1.0
    elif isinstance(param, EvenPower):
        growth = 2.0 * param.k
    elif isinstance(param, InverseSquareExp):
        growth = None
    else:
        raise UnknownFamily(f"no scaling prediction for param {param.spec}")
    sides = (interval.lo < 0) + (interval.hi > 0)

    if alpha < 1:
        value = _antiderivative(alpha, interval.hi) - _antiderivative(alpha, interval.lo)
        return LawPrediction(ScalingModel.CONSTANT, prefactor=value, note="t = O(1)")
    if alpha == 1:
        if growth is None:
            return LawPrediction(ScalingModel.POWER, 1.0, 2.0 * sides, note="ln(1/R) = 2/r")
        return LawPrediction(ScalingModel.LOGARITHMIC, prefactor=sides * growth, note="t ~ ln(1/r)")
    p = (alpha - 1.0) / alpha
    prefactor = sides * bottleneck_integral(alpha)
    if growth is None:
        return LawPrediction(ScalingModel.NON_POWER, p, prefactor,
                             note=f"t ~ {prefactor:.6g} * exp({2 * p:.6g} / r)")
    return LawPrediction(ScalingModel.POWER, growth * p, prefactor, note=f"t ~ r^-{growth * p:.6g}")


# --- Regime map ---

def regime_scan(alpha_grid, spec=SweepSpec(), threads=None):
    alphas = [float(a) for a in alpha_grid]
    if not alphas or any(a <= 0 for a in alphas):
        raise DomainViolation(f"alphas must be positive, got {alphas}")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise DomainViolation(f"alphas must be strictly increasing, got {alphas}")
    entries = []
    for alpha in alphas:
        samples = sweep(VectorField1D(PowerPhase(alpha), Identity()), spec, threads)
        fit = fit_samples(samples)
        logger.info("alpha=%g -> %s%s", alpha, fit.model.value,
                    f" p={fit.exponent:.4f}" if fit.model is ScalingModel.POWER else "")
        entries.append((alpha, fit))
    return RegimeMap(tuple(entries))
