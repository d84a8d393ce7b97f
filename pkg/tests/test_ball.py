"""Ball solvers: kernel normalizations against scipy quadrature, the
mean-value property, the constant-source closed form, Green-function
structure, and the Poisson solve against an independent exterior-integral
evaluation.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fraclap.ball import (BallProblem, constant_rhs_solution, dirichlet_field,
                          fundamental_solution, green_function, mean_kernel,
                          poisson_kernel_ball, s_mean_average, solve_full,
                          solve_homogeneous, solve_nonhomogeneous,
                          weighted_unit_integral)
from fraclap.constants import fundamental_constant
from fraclap.errors import DomainError, PreconditionError, UsageError
from fraclap.fields import (bump_field, constant_field, gaussian_field,
                            translate)


# ---------------------------------------------------------------------------
# kernels

@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_mean_kernel_unit_mass_1d(s):
    # independent of the package quadrature: scipy on each side of the ball
    r = 1.3
    val, err = quad(lambda y: mean_kernel(1, r, s, [[y]])[0], r, np.inf)
    assert 2 * val == pytest.approx(1.0, abs=1e-7 + 2 * err)


def test_mean_kernel_zero_inside():
    ys = np.linspace(-0.99, 0.99, 11)[:, None]
    assert np.all(mean_kernel(1, 1.0, 0.5, ys) == 0.0)


@pytest.mark.parametrize("x0", [0.0, 0.4, -0.7])
def test_poisson_kernel_unit_mass_1d(x0):
    r, s = 1.0, 0.6
    left, el = quad(lambda y: poisson_kernel_ball(1, r, s, [x0], [[y]])[0],
                    -np.inf, -r)
    right, er = quad(lambda y: poisson_kernel_ball(1, r, s, [x0], [[y]])[0],
                     r, np.inf)
    assert left + right == pytest.approx(1.0, abs=1e-6 + el + er)


def test_poisson_kernel_interior_only():
    with pytest.raises(DomainError):
        poisson_kernel_ball(1, 1.0, 0.5, [1.5], [[2.0]])


def test_poisson_kernel_positive():
    ys = np.array([[1.1], [2.0], [-4.0]])
    vals = poisson_kernel_ball(1, 1.0, 0.3, [0.2], ys)
    assert np.all(vals > 0)


def test_weighted_unit_integral_of_one():
    # int_0^1 tau^{s-1} (1-tau)^{-s} dtau = B(s, 1-s) = pi / sin(pi s)
    for s in (0.3, 0.5, 0.8):
        val, err, _, conv = weighted_unit_integral(
            lambda t: np.ones_like(t), s)
        assert conv
        assert val == pytest.approx(math.pi / math.sin(math.pi * s),
                                    rel=1e-9)


# ---------------------------------------------------------------------------
# mean-value property and homogeneous solve

def test_mean_value_property_of_solution():
    prob = BallProblem(1, 1.0, 0.5, g=gaussian_field(1))
    u = dirichlet_field(prob)
    for x0, rho in ((0.0, 0.3), (0.4, 0.1)):
        avg = s_mean_average(u, [x0], rho, 0.5)
        assert avg.converged
        assert avg.value == pytest.approx(u.value([x0]), abs=2e-6)


def test_constant_datum_reproduced():
    # g = c outside: the solution is identically c inside
    prob = BallProblem(1, 1.0, 0.4, g=constant_field(1, 3.5))
    for x in (0.0, 0.5, -0.8):
        ov = solve_homogeneous(prob, [x])
        assert ov.value == pytest.approx(3.5, abs=1e-8)


def test_solution_respects_bounds():
    # inf g <= u <= sup g
    g = gaussian_field(1)
    prob = BallProblem(1, 1.0, 0.6, g=g)
    for x in np.linspace(-0.9, 0.9, 7):
        v = solve_homogeneous(prob, [x]).value
        assert -1e-9 <= v <= 1.0 + 1e-9


def test_dirichlet_field_exterior_is_datum():
    g = gaussian_field(1)
    prob = BallProblem(1, 1.0, 0.5, g=g)
    u = dirichlet_field(prob)
    ys = np.array([[1.4], [-2.3], [5.0]])
    assert np.allclose(u(ys), g(ys), atol=1e-12)


def test_dirichlet_field_matches_node_solves():
    prob = BallProblem(1, 1.0, 0.3, g=bump_field(1))
    u = dirichlet_field(prob)
    for x in (-0.6, 0.1, 0.7):
        assert u.value([x]) == pytest.approx(
            solve_homogeneous(prob, [x]).value, abs=5e-7)


def test_2d_radial_datum_radial_solution():
    g = translate(gaussian_field(2), [0.0, 0.0])
    prob = BallProblem(2, 1.0, 0.5, g=g)
    a = solve_homogeneous(prob, [0.5, 0.0]).value
    b = solve_homogeneous(prob, [0.0, 0.5]).value
    assert a == pytest.approx(b, abs=1e-7)


# ---------------------------------------------------------------------------
# source terms

@pytest.mark.parametrize("n,s", [(1, 0.5), (2, 0.3), (3, 0.7)])
def test_constant_rhs_closed_form(n, s):
    # u(x) = Gamma(n/2) / (4^s Gamma(s+1) Gamma(s+n/2)) (r^2-|x|^2)^s
    r = 1.0
    x = np.zeros(n)
    x[0] = 0.3
    ref = (math.gamma(n / 2)
           / (4.0 ** s * math.gamma(s + 1) * math.gamma(s + n / 2))
           * (r * r - 0.09) ** s)
    assert constant_rhs_solution(n, s, r, x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("n,s", [(1, 0.5), (2, 0.4)])
def test_solve_nonhomogeneous_constant_source(n, s):
    prob = BallProblem(n, 1.0, s, f=constant_field(n, 1.0))
    for rad in (0.0, 0.35, 0.7):
        x = np.zeros(n)
        x[0] = rad
        ov = solve_nonhomogeneous(prob, x)
        assert ov.value == pytest.approx(constant_rhs_solution(n, s, 1.0, x),
                                         abs=5e-7)


def test_solve_full_is_sum_of_parts():
    prob = BallProblem(1, 1.0, 0.5, f=constant_field(1, 2.0),
                       g=gaussian_field(1))
    x = [0.3]
    full = solve_full(prob, x)
    hom = solve_homogeneous(prob, x)
    non = solve_nonhomogeneous(prob, x)
    assert full.value == pytest.approx(hom.value + non.value, abs=1e-12)


def test_solve_rejects_exterior_point():
    prob = BallProblem(1, 1.0, 0.5, g=gaussian_field(1))
    with pytest.raises(DomainError):
        solve_homogeneous(prob, [1.5])
    prob2 = BallProblem(1, 1.0, 0.5, f=constant_field(1))
    with pytest.raises(DomainError):
        solve_nonhomogeneous(prob2, [1.0])


# ---------------------------------------------------------------------------
# Green function / fundamental solution

def test_green_symmetry_and_positivity():
    for n, s in ((1, 0.5), (1, 0.3), (2, 0.6)):
        x = np.zeros(n)
        z = np.zeros(n)
        x[0], z[0] = 0.3, -0.5
        if n > 1:
            z[1] = 0.2
        gxz = green_function(n, 1.0, s, x, z)
        gzx = green_function(n, 1.0, s, z, x)
        assert gxz > 0
        assert gxz == pytest.approx(gzx, rel=1e-9)


def test_green_vanishes_outside():
    assert green_function(1, 1.0, 0.4, [0.3], [1.2]) == 0.0
    assert green_function(1, 1.0, 0.4, [1.2], [0.3]) == 0.0


def test_green_log_closed_form():
    # n=1, s=1/2: G = (1/pi) log((r^2-xz+sqrt((r^2-x^2)(r^2-z^2)))/(r|x-z|))
    r, x0, z0 = 1.0, 0.2, -0.4
    num = r * r - x0 * z0 + math.sqrt((r * r - x0 ** 2) * (r * r - z0 ** 2))
    ref = math.log(num / (r * abs(x0 - z0))) / math.pi
    assert green_function(1, r, 0.5, [x0], [z0]) == pytest.approx(ref,
                                                                  rel=1e-12)


def test_green_diagonal_behavior():
    assert green_function(1, 1.0, 0.3, [0.2], [0.2]) == np.inf
    fin = green_function(1, 1.0, 0.75, [0.2], [0.2])
    assert np.isfinite(fin) and fin > 0


def test_fundamental_solution_profile():
    n, s = 3, 0.4
    b = fundamental_constant(n, s)
    x = np.array([0.5, 0.5, 0.0])
    r = float(np.linalg.norm(x))
    assert fundamental_solution(n, s, x) == pytest.approx(
        b * r ** (2 * s - n), rel=1e-12)
    with pytest.raises(DomainError):
        fundamental_solution(1, 0.5, [0.3])


# ---------------------------------------------------------------------------
# problem validation

def test_ball_problem_validation():
    with pytest.raises(UsageError):
        BallProblem(1, 1.0, 0.5)
    with pytest.raises(DomainError):
        BallProblem(4, 1.0, 0.5, g=gaussian_field(1))
    with pytest.raises(DomainError):
        BallProblem(1, -1.0, 0.5, g=gaussian_field(1))
    with pytest.raises(UsageError):
        BallProblem(2, 1.0, 0.5, g=gaussian_field(1))


def test_s_mean_average_validation():
    g = gaussian_field(1)
    with pytest.raises(DomainError):
        s_mean_average(g, [0.0], -1.0, 0.5)
    with pytest.raises(UsageError):
        s_mean_average(lambda P: P[:, 0], [0.0], 1.0, 0.5)


@given(st.floats(min_value=0.05, max_value=0.95),
       st.floats(min_value=-0.6, max_value=0.6))
@settings(max_examples=30, deadline=None)
def test_homogeneous_solution_bounded_by_datum(s, x):
    prob = BallProblem(1, 1.0, s, g=bump_field(1))
    v = solve_homogeneous(prob, [x], m=32, m_max=64).value
    assert -1e-8 <= v <= 1.0 + 1e-8
