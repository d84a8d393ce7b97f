"""s-harmonic basis and least-squares approximation: exact recovery of
span members, nested-subset monotonicity, symmetry preservation, the
harmonicity of the basis itself, and the growing-ratio counterexample
machinery.
"""

import math

import numpy as np
import pytest

from fraclap.density import (FIT_HALF, ApproxResult, HarmonicBasis,
                             approximate, build_basis, combination,
                             harnack_failure_demo)
from fraclap.errors import (ConvergenceFailure, DomainError,
                            PreconditionError, UsageError)
from fraclap.fields import (CINF, Bounded, ScalarField, constant_field,
                            gaussian_field, window_sq_field)
from fraclap.pointwise import frac_lap_point
from fraclap.verify import Report

S = 0.5
R = 3.0


@pytest.fixture(scope="module")
def basis8():
    return build_basis(R, 8, 0.35, S)


# ---------------------------------------------------------------------------
# construction

def test_basis_structure(basis8):
    assert isinstance(basis8, HarmonicBasis)
    assert len(basis8) == 8
    c = np.asarray(basis8.centers)
    # centers mirror-symmetric, clear of both the ball and the outer radius
    assert np.allclose(np.sort(c), np.sort(-c))
    assert np.all(np.abs(c) > 1.0 + basis8.width / 2 - 1e-12)
    assert np.all(np.abs(c) < R - basis8.width / 2 + 1e-12)


def test_elements_vanish_inside_support_collar(basis8):
    # data live in a collar of B_R \ B_1: each element equals its datum
    # outside the unit ball and is s-harmonic inside
    e = basis8.elements[0]
    assert e.dim == 1
    xs = np.linspace(-0.9, 0.9, 7)[:, None]
    assert np.all(np.isfinite(e(xs)))


def test_basis_elements_are_s_harmonic(basis8):
    rng = np.random.default_rng(7)
    worst = 0.0
    for x in rng.uniform(-0.8, 0.8, size=2):
        ov = frac_lap_point(basis8.elements[3], [x], S)
        worst = max(worst, abs(ov.value))
    assert worst <= 1e-3


def test_subset_is_nested_and_symmetric(basis8):
    sub4 = basis8.subset(4)
    sub6 = basis8.subset(6)
    assert set(sub4.centers) <= set(sub6.centers) <= set(basis8.centers)
    c4 = np.asarray(sub4.centers)
    assert np.allclose(np.sort(c4), np.sort(-c4))
    # innermost-first: subset centers are the smallest in magnitude
    assert np.max(np.abs(c4)) <= np.min(
        np.abs(np.setdiff1d(basis8.centers, sub4.centers)))
    with pytest.raises(UsageError):
        basis8.subset(9)


def test_build_basis_validation():
    with pytest.raises(DomainError):
        build_basis(R, 4, 0.35, S, n=2)
    with pytest.raises(PreconditionError):
        build_basis(R, 0, 0.35, S)
    with pytest.raises(DomainError):
        build_basis(R, 4, -0.1, S)
    with pytest.raises(PreconditionError):
        build_basis(1.2, 4, 0.35, S)      # no room outside the unit ball


# ---------------------------------------------------------------------------
# fitting

def test_member_of_span_recovered_exactly(basis8):
    coef_true = np.array([0.5, -1.0, 2.0, 0.0, 1.5, -0.5, 0.25, 1.0])
    target = combination(basis8, coef_true, name="member")
    res = approximate(target, basis8)
    assert isinstance(res, ApproxResult)
    assert res.achieved_error < 1e-10
    assert res.validation_error < 1e-10
    assert np.max(np.abs(np.asarray(res.coefficients) - coef_true)) < 1e-8


def test_unit_coefficient_recovery(basis8):
    target = basis8.elements[2]
    res = approximate(target, basis8)
    want = np.zeros(8)
    want[2] = 1.0
    assert np.max(np.abs(np.asarray(res.coefficients) - want)) < 1e-8


def test_window_sq_fit_converges(basis8):
    # |x|^2 is approximable on the fit window; nested bases can only help
    errs = []
    for m in (2, 4, 8):
        res = approximate(window_sq_field(1), basis8.subset(m))
        errs.append(res.achieved_error)
    assert errs[0] >= errs[1] >= errs[2]
    assert errs[2] < 1e-2


def test_antisymmetric_target_antisymmetric_coefficients(basis8):
    # x (odd) over a mirror-symmetric basis: c(-center) = -c(center)
    odd = ScalarField(1, lambda P: np.clip(P[:, 0], -4, 4), CINF,
                      Bounded(4.0), name="x")
    res = approximate(odd, basis8)
    c = np.asarray(res.coefficients)
    centers = np.asarray(basis8.centers)
    order = np.argsort(centers)
    rorder = np.argsort(-centers)
    assert np.max(np.abs(c[order] + c[rorder])) < 1e-8


def test_constant_lies_near_span(basis8):
    res = approximate(constant_field(1, 1.0), basis8)
    assert res.achieved_error < 1e-2


def test_c1_norm_fit(basis8):
    # the gradient term makes the objective much stiffer at low m; eight
    # elements reach ~0.17, sixteen reach ~2e-3
    res = approximate(window_sq_field(1), basis8, norm="C1")
    assert res.norm == "C1"
    assert math.isfinite(res.achieved_error)
    assert res.achieved_error < 0.5
    c0 = approximate(window_sq_field(1), basis8)
    assert res.achieved_error >= c0.achieved_error   # C1 dominates C0


def test_single_element_positive_inside():
    b1 = build_basis(R, 1, 0.35, S)
    xs = np.linspace(-FIT_HALF, FIT_HALF, 41)[:, None]
    vals = b1.elements[0](xs)
    assert np.all(vals > 0)            # positive datum, positive solution


def test_validation_grid_is_independent(basis8):
    # validation error computed off the fit nodes stays comparable
    res = approximate(gaussian_field(1), basis8)
    assert res.validation_error < 3 * res.achieved_error + 1e-8


def test_condition_estimate_reported(basis8):
    res = approximate(window_sq_field(1), basis8)
    assert res.condition_estimate > 1.0
    assert math.isfinite(res.condition_estimate)


# ---------------------------------------------------------------------------
# fitting error paths

def test_approximate_validation(basis8):
    with pytest.raises(UsageError):
        approximate(window_sq_field(1), basis8, norm="L2")
    with pytest.raises(UsageError):
        approximate(lambda P: P[:, 0], basis8)
    with pytest.raises(DomainError):
        approximate(gaussian_field(2), basis8)


def test_non_finite_target_rejected(basis8):
    f = ScalarField(1, lambda P: np.where(np.abs(P[:, 0]) < 0.1, np.inf, 0.0),
                    CINF, Bounded(1.0), name="inf_spike")
    with pytest.raises(PreconditionError):
        approximate(f, basis8)


def test_zero_column_flagged(basis8):
    zero = ScalarField(1, lambda P: np.zeros(P.shape[0]), CINF, Bounded(0.0),
                       name="zero")
    broken = HarmonicBasis(R, S, basis8.width, basis8.centers,
                           (zero,) + basis8.elements[1:])
    with pytest.raises(ConvergenceFailure) as exc:
        approximate(window_sq_field(1), broken)
    assert "rank deficiency" in str(exc.value)


def test_combination_validation(basis8):
    with pytest.raises(UsageError):
        combination(basis8, [1.0, 2.0])
    f = combination(basis8, np.ones(8))
    xs = np.linspace(-0.5, 0.5, 5)[:, None]
    manual = sum(e(xs) for e in basis8.elements)
    assert np.allclose(f(xs), manual)


# ---------------------------------------------------------------------------
# the counterexample demo

def test_harnack_failure_demo_runs():
    rep = harnack_failure_demo(0.05, S, count=16)
    assert isinstance(rep, Report)
    assert rep.verdict == "pass"
    m = dict(rep.measured)
    assert m["achieved_error"] <= 0.05
    assert abs(m["infimum_location"]) <= 0.26
    assert m["inf_half_ball"] <= m["v_eps_at_0"] + 1e-12
    assert m["certified_ratio"] > 1.0


def test_harnack_demo_epsilon_range():
    for eps in (0.0, 0.2, -0.1):
        with pytest.raises(DomainError):
            harnack_failure_demo(eps, S)
