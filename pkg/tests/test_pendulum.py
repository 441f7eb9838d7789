import math

import numpy as np
import pytest
from scipy.integrate import quad

from ghost.errors import DivergentLimit, DomainViolation, NoTransit, SingularPoint
from ghost.fields import HALF_PI
from ghost.passage import Engine, Interval
from ghost.pendulum import (
    BOTTLENECK_IV,
    Elongation,
    ElongationPolicy,
    PendulumParams,
    bottleneck_limit,
    bottleneck_time,
    elongation_L,
    pendulum_rhs,
    rotation_period,
    sine_rotation_period,
    sweep_bottleneck,
    wave_F,
)
from ghost.scaling import ScalingModel, fit_samples

EXPONENTS = [0.5, 1.0, 2.0, 3.0]


# --- Wave and length ---

def test_wave_examples():
    assert wave_F(2.0, HALF_PI) == 1.0
    assert wave_F(1.0, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert wave_F(2.0, math.pi / 4) == pytest.approx(0.75)
    assert wave_F(2.0, -HALF_PI) == -1.0


def test_wave_rejects_bad_input():
    with pytest.raises(DomainViolation):
        wave_F(0.0, 1.0)
    with pytest.raises(DomainViolation):
        wave_F(2.0, 4.0)


@pytest.mark.parametrize("a", EXPONENTS)
def test_wave_is_continuous_across_branches(a):
    h = 1e-9
    for b in (-HALF_PI, 0.0, HALF_PI):
        assert wave_F(a, b - h) == pytest.approx(wave_F(a, b + h), abs=1e-6)
    assert wave_F(a, 0.0) == pytest.approx(0.0, abs=1e-14)
    assert wave_F(a, math.pi) == pytest.approx(0.0, abs=1e-14)
    assert wave_F(a, -math.pi) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("a", EXPONENTS)
def test_wave_is_odd_and_bounded(a):
    for theta in np.linspace(0.0, math.pi, 301)[1:]:
        assert wave_F(a, -theta) == -wave_F(a, theta)
        assert -1.0 <= wave_F(a, theta) <= 1.0


@pytest.mark.parametrize("a", EXPONENTS)
def test_elongation_examples(a):
    assert elongation_L(a, HALF_PI) == pytest.approx(1.0)
    assert elongation_L(a, 1e-8) == pytest.approx(2.0 * a / math.pi, rel=1e-6)
    assert elongation_L(a, -1.0) == pytest.approx(wave_F(a, 1.0) / math.sin(1.0))


def test_elongation_singular_points():
    for theta in (0.0, math.pi, -math.pi):
        with pytest.raises(SingularPoint):
            elongation_L(2.0, theta)
        assert elongation_L(2.0, theta, ElongationPolicy(mode="cap")) == 100.0


def test_elongation_policy():
    assert ElongationPolicy(l_max=5.0, mode="cap").mode is Elongation.CAP
    with pytest.raises(DomainViolation):
        ElongationPolicy(l_max=0.5)
    with pytest.raises(ValueError):
        ElongationPolicy(mode="stretch")


def test_pendulum_rhs():
    p = PendulumParams(2.0, 1.01)
    assert p.r == pytest.approx(0.01)
    assert pendulum_rhs(p, HALF_PI) == pytest.approx(0.01)
    assert pendulum_rhs(p, 0.0) == pytest.approx(1.01)
    assert pendulum_rhs(p, -HALF_PI) == pytest.approx(2.01)
    with pytest.raises(DomainViolation):
        PendulumParams(0.0, 1.5)


# --- Bottleneck passage ---

def test_bottleneck_time_examples():
    assert bottleneck_time(PendulumParams(2.0, 1.01)).time == pytest.approx(
        10.0 * math.pi * math.atan(5.0), rel=1e-6)
    assert bottleneck_time(PendulumParams(1.0, 1.01)).time == pytest.approx(math.pi * math.log(51.0), rel=1e-6)


@pytest.mark.parametrize("r", [1e-3, 1e-6, 1e-8, 1e-12])
def test_bottleneck_time_close_to_onset(r):
    # a = 0.5: pi * int_0^{1/2} dv / (r + sqrt(v)) = 2 pi (sqrt(1/2) - r ln((r + sqrt(1/2)) / r))
    p = PendulumParams(0.5, 1.0 + r)
    root, r = math.sqrt(0.5), p.r
    expected = 2.0 * math.pi * (root - r * math.log((r + root) / r))
    assert bottleneck_time(p).time == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
def test_rotation_period_close_to_onset(a):
    p = PendulumParams(a, 1.0 + 1e-8)
    period = rotation_period(p)
    assert period > bottleneck_time(p).time
    assert bottleneck_time(p).time < bottleneck_limit(a)
    assert math.isfinite(period)


@pytest.mark.parametrize("a", EXPONENTS)
def test_bottleneck_engines_agree(a):
    p = PendulumParams(a, 1.001)
    by_quad = bottleneck_time(p, engine=Engine.QUADRATURE).time
    by_ode = bottleneck_time(p, engine=Engine.ODE).time
    assert by_ode == pytest.approx(by_quad, rel=1e-4)


def test_bottleneck_rejects():
    with pytest.raises(NoTransit):
        bottleneck_time(PendulumParams(2.0, 1.0))
    with pytest.raises(NoTransit):
        bottleneck_time(PendulumParams(2.0, 0.9))
    with pytest.raises(DomainViolation):
        bottleneck_time(PendulumParams(2.0, 1.1), Interval(-1.0, 1.0))


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
def test_bottleneck_limit(a):
    expected = math.pi * 0.5 ** (1.0 - a) / (1.0 - a)
    assert bottleneck_limit(a) == pytest.approx(expected, rel=1e-6)
    near = bottleneck_time(PendulumParams(a, 1.0 + 1e-8)).time
    assert near == pytest.approx(expected, rel=1e-2)
    assert near < expected


def test_bottleneck_limit_diverges():
    for a in (1.0, 2.0):
        with pytest.raises(DivergentLimit):
            bottleneck_limit(a)
    # away from pi/2 the limit stays finite
    assert bottleneck_limit(2.0, Interval(0.0, 1.0)) > 0
    with pytest.raises(DomainViolation):
        bottleneck_limit(0.0)


# --- Rotation ---

def test_rotation_period_matches_direct_integral():
    p = PendulumParams(2.0, 2.0)
    quarters = np.linspace(-math.pi, math.pi, 5)
    direct = sum(quad(lambda th: 1.0 / (2.0 - wave_F(2.0, th)), lo, hi, epsabs=0.0, epsrel=1e-12)[0]
                 for lo, hi in zip(quarters, quarters[1:]))
    assert rotation_period(p) == pytest.approx(direct, rel=1e-8)


def test_rotation_period_contains_the_bottleneck():
    period = rotation_period(PendulumParams(2.0, 1.01))
    assert period > bottleneck_time(PendulumParams(2.0, 1.01)).time
    with pytest.raises(NoTransit):
        rotation_period(PendulumParams(2.0, 1.0))


def test_rotation_outside_bottleneck_is_bounded():
    # a = 1: the excess over the bottleneck tends to a finite value
    def excess(r):
        p = PendulumParams(1.0, 1.0 + r)
        return rotation_period(p) - bottleneck_time(p).time

    assert 0.0 < excess(1e-4) < 10.0
    assert excess(1e-6) == pytest.approx(excess(1e-4), rel=1e-3)


@pytest.mark.parametrize("omega", [1.001, 1.1, 2.0, 5.0])
def test_sine_rotation_period(omega):
    assert sine_rotation_period(omega) == pytest.approx(2.0 * math.pi / math.sqrt(omega ** 2 - 1.0), rel=1e-8)


def test_sine_rotation_period_locks():
    with pytest.raises(NoTransit):
        sine_rotation_period(1.0)


# --- Sweeps ---

@pytest.mark.parametrize("a, model", [
    (2.0, ScalingModel.POWER),
    (1.0, ScalingModel.LOGARITHMIC),
    (0.5, ScalingModel.CONSTANT),
])
def test_sweep_bottleneck_laws(a, model):
    samples = sweep_bottleneck(a, threads=1)
    assert samples[0].r == pytest.approx(1e-3)
    fit = fit_samples(samples)
    assert fit.model is model
    if model is ScalingModel.POWER:
        assert fit.exponent == pytest.approx(0.5, abs=0.02)


def test_sweep_bottleneck_rejects():
    with pytest.raises(DomainViolation):
        sweep_bottleneck(0.0)
    with pytest.raises(DomainViolation):
        sweep_bottleneck(2.0, iv=Interval(-1.0, 1.0))


def test_default_interval_holds_the_bottleneck():
    assert BOTTLENECK_IV.lo < HALF_PI < BOTTLENECK_IV.hi
