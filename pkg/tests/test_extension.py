"""Harmonic extension route: kernel mass, convergence of v(x, y) to the
trace, the weighted divergence residual, and the conormal derivative
against the singular-integral operator.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclap.errors import DomainError, PreconditionError, UsageError
from fraclap.extension import (ExtensionField, build_extension,
                               conormal_trace, extend, halfspace_kernel,
                               halfspace_kernel_mass, trace_constant,
                               weighted_divergence_residual)
from fraclap.fields import (CINF, PowerDecay, ScalarField, bump_field,
                            gaussian_field, lorentzian_field)
from fraclap.pointwise import frac_lap_point


# ---------------------------------------------------------------------------
# kernels

@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_halfspace_kernel_mass_is_one(n, s):
    for y in (0.1, 1.0, 7.0):
        assert halfspace_kernel_mass(n, s, y) == pytest.approx(1.0, abs=1e-9)


def test_halfspace_kernel_mass_needs_positive_height():
    with pytest.raises(DomainError):
        halfspace_kernel_mass(1, 0.5, 0.0)


def test_halfspace_kernel_cauchy_values():
    # s = 1/2, n = 1: P(y, x) = y / (pi (x^2 + y^2))
    y, x = 0.7, 0.4
    ref = y / (math.pi * (x * x + y * y))
    assert halfspace_kernel(1, 0.5, np.array([[x]]), y)[0] == pytest.approx(
        ref, rel=1e-12)


# ---------------------------------------------------------------------------
# the extension itself

def test_extension_converges_to_trace():
    # v(x, y) -> u(x) with the gap shrinking like y^{2s}
    s = 0.5
    g = gaussian_field(1)
    x = np.array([0.3])
    u0 = g.value(x)
    gaps = [abs(extend(g, x, y, s) - u0) for y in (0.25, 0.125, 0.0625)]
    assert gaps[0] > gaps[1] > gaps[2]
    for a, b in zip(gaps, gaps[1:]):
        assert b / a == pytest.approx(2.0 ** (-2 * s), rel=0.15)


def test_extension_field_levels_decrease():
    ext = build_extension(gaussian_field(1), 0.4)
    ys = np.asarray(ext.y_levels)
    assert np.all(np.diff(ys) < 0) and ys[-1] > 0
    with pytest.raises(UsageError):
        ExtensionField(gaussian_field(1), 0.4, (0.1, 0.2, 0.4))


def test_extension_bounded_by_sup():
    # v is an average of u: |v| <= sup|u| = 1 for the gaussian
    g = gaussian_field(1)
    for y in (0.05, 0.6, 3.0):
        assert abs(extend(g, np.array([0.1]), y, 0.3)) <= 1.0 + 1e-9


def test_extension_2d_smoke():
    v = extend(gaussian_field(2), np.array([0.2, -0.1]), 0.5, 0.6)
    assert 0.0 < v < 1.0


def test_strong_divergence_residual_small():
    ext = build_extension(gaussian_field(1), 0.5)
    res = weighted_divergence_residual(ext, ((-0.4, 0.4), (0.2, 0.8)),
                                       h=0.05)
    assert res < 5e-3


def test_weak_divergence_residual_detects_trace_term():
    # across y = 0 the evenly-reflected extension satisfies the weak
    # equation iff the base is s-harmonic there: the reflection carries a
    # surface term proportional to (-Delta)^s u
    from fraclap.ball import BallProblem, dirichlet_field
    s = 0.3
    box = ((-0.5, 0.5), (-0.3, 0.3))
    harm = dirichlet_field(BallProblem(1, 1.0, s, g=bump_field(1)))
    res_h = weighted_divergence_residual(build_extension(harm, s), box,
                                         mode="weak", n_tests=4)
    res_g = weighted_divergence_residual(build_extension(gaussian_field(1),
                                                         s), box,
                                         mode="weak", n_tests=4)
    assert res_h < 5e-3
    assert res_g > 100 * res_h


def test_divergence_residual_validation():
    ext = build_extension(gaussian_field(1), 0.5)
    with pytest.raises(UsageError):
        weighted_divergence_residual(ext, ((-1, 1), (-0.5, 0.5)))  # strong, y<0
    with pytest.raises(UsageError):
        weighted_divergence_residual(ext, ((-1, 1), (0.2, 0.8)), mode="weak")
    with pytest.raises(UsageError):
        weighted_divergence_residual(gaussian_field(1), ((-1, 1), (0, 1)))


# ---------------------------------------------------------------------------
# conormal trace

def test_trace_constant_cauchy_is_one():
    # s = 1/2: the extension is classically harmonic and the conormal
    # derivative IS the half Laplacian
    assert trace_constant(1, 0.5) == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_conormal_trace_matches_pointwise(s):
    g = gaussian_field(1)
    for x0 in (0.0, 0.7):
        tr = conormal_trace(g, [x0], s)
        ref = frac_lap_point(g, [x0], s).value
        assert tr.value == pytest.approx(ref, abs=1e-2 * (1 + abs(ref)))


def test_conormal_trace_bump():
    b = bump_field(1)
    tr = conormal_trace(b, [0.0], 0.5)
    ref = frac_lap_point(b, [0.0], 0.5).value
    assert tr.value == pytest.approx(ref, abs=2e-2 * (1 + abs(ref)))


def test_conormal_trace_level_validation():
    g = gaussian_field(1)
    with pytest.raises(UsageError):
        conormal_trace(g, [0.0], 0.5, levels=(0.1, 0.05))       # too few
    with pytest.raises(UsageError):
        conormal_trace(g, [0.0], 0.5, levels=(0.05, 0.1, 0.2))  # not decreasing


# ---------------------------------------------------------------------------
# input gates

def test_extension_input_gates():
    with pytest.raises(UsageError):
        build_extension(lambda P: P[:, 0], 0.5)
    with pytest.raises(DomainError):
        build_extension(gaussian_field(3), 0.5)
    with pytest.raises(DomainError):
        build_extension(gaussian_field(1), 1.5)
    grower = ScalarField(1, lambda P: 1.0 + np.abs(P[:, 0]) ** 1.4, CINF,
                         PowerDecay(-1.4, 2.0), name="grower")
    with pytest.raises(PreconditionError):
        build_extension(grower, 0.3)


@given(st.floats(min_value=0.1, max_value=0.9))
@settings(max_examples=10, deadline=None)
def test_extension_monotone_in_height_at_peak(s):
    # at the max of a radial field, averaging over wider kernels decreases v
    g = lorentzian_field(1)
    x = np.array([0.0])
    vs = [extend(g, x, y, s) for y in (0.1, 0.5, 2.0)]
    assert vs[0] > vs[1] > vs[2]
