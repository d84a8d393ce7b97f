"""Pointwise singular-integral operator.

The binding oracle for the gaussian is the Kummer closed form

    (-Delta)^s e^{-|x|^2} = 4^s Gamma(s+n/2)/Gamma(n/2)
                            * 1F1(s+n/2; n/2; -|x|^2),

evaluated through scipy's hypergeometric routine — a code path sharing
nothing with the quadrature engine.  A few spot values are additionally
frozen as literals.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as sgamma, hyp1f1

from fraclap.errors import DomainError, PreconditionError, UsageError
from fraclap.fields import (CINF, Bounded, PowerDecay, ScalarField,
                            bump_field, constant_field, dilate_arg,
                            gaussian_field, lorentzian_field, translate,
                            xplus_field)
from fraclap.pointwise import (OpValue, frac_lap_grid, frac_lap_point,
                               pairing_check)
from fraclap.quadrature import QuadratureSpec


def kummer_gaussian(n, s, r2):
    return (4.0 ** s * sgamma(s + n / 2) / sgamma(n / 2)
            * hyp1f1(s + n / 2, n / 2, -r2))


# frozen spot values of the closed form (64-bit evaluations)
FROZEN = {
    (1, 0.5, 0.0): 1.128379167095513,     # 2/sqrt(pi)
    (1, 0.3, 0.5): 0.6518749204035531,
    (2, 0.5, 0.0): 1.772453850905516,     # sqrt(pi)
    (3, 0.7, 1.3): 0.06666634702328592,
}


def test_frozen_literals_match_live_oracle():
    for (n, s, r), v in FROZEN.items():
        assert kummer_gaussian(n, s, r * r) == pytest.approx(v, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_gaussian_against_kummer(n, s):
    g = gaussian_field(n)
    for r in (0.0, 0.5, 1.3):
        x = np.zeros(n)
        x[0] = r
        ov = frac_lap_point(g, x, s)
        ref = kummer_gaussian(n, s, r * r)
        assert ov.converged
        assert ov.value == pytest.approx(ref, abs=5e-8 * (1 + abs(ref)))
        assert abs(ov.value - ref) <= 10 * ov.err_est + 1e-12


def test_gaussian_at_2d_off_axis_point():
    # radial symmetry: only |x| matters
    ov1 = frac_lap_point(gaussian_field(2), [0.3, 0.4], 0.5)
    ov2 = frac_lap_point(gaussian_field(2), [0.5, 0.0], 0.5)
    assert ov1.value == pytest.approx(ov2.value, abs=1e-7)


def test_linearity():
    g = gaussian_field(1)
    b = bump_field(1)
    x, s = np.array([0.4]), 0.6
    lg = frac_lap_point(g, x, s).value
    lb = frac_lap_point(b, x, s).value
    from fraclap.fields import lincomb
    f = lincomb([2.0, -3.0], [g, b])
    lf = frac_lap_point(f, x, s).value
    assert lf == pytest.approx(2 * lg - 3 * lb, abs=1e-7)


def test_constant_annihilated():
    ov = frac_lap_point(constant_field(1, 5.0), [0.3], 0.4)
    assert ov.value == pytest.approx(0.0, abs=1e-9)


@given(st.floats(min_value=0.1, max_value=0.9),
       st.floats(min_value=0.3, max_value=2.5))
@settings(max_examples=30, deadline=None)
def test_scaling_law(s, lam):
    # (-Delta)^s [u(lam .)](x) = lam^{2s} ((-Delta)^s u)(lam x)
    g = gaussian_field(1)
    x = 0.37
    lhs = frac_lap_point(dilate_arg(g, lam), [x], s).value
    rhs = lam ** (2 * s) * frac_lap_point(g, [lam * x], s).value
    assert lhs == pytest.approx(rhs, abs=2e-6 * (1 + abs(rhs)))


def test_translation_equivariance():
    g = gaussian_field(1)
    t = translate(g, [0.8])
    a = frac_lap_point(t, [0.1], 0.5).value
    b = frac_lap_point(g, [0.9], 0.5).value
    assert a == pytest.approx(b, abs=1e-8)


def test_lorentzian_positive_at_origin():
    # maximum principle at the max of the field: value > 0 there
    ov = frac_lap_point(lorentzian_field(1), [0.0], 0.5)
    assert ov.converged and ov.value > 0


def test_xplus_s_harmonic_on_positive_axis():
    # (-Delta)^s x_+^s = 0 for x > 0
    f = xplus_field(0.5)
    for x in (0.5, 1.0, 2.0):
        ov = frac_lap_point(f, [x], 0.5)
        assert abs(ov.value) <= 1e-4 * (1 + x ** 0.5)


def test_grid_matches_point_and_threads():
    g = gaussian_field(1)
    pts = np.linspace(-1, 1, 5)
    seq = frac_lap_grid(g, pts, 0.5, threads=1)
    par = frac_lap_grid(g, pts, 0.5, threads=4)
    for a, b, x in zip(seq, par, pts):
        assert a.value == b.value              # bitwise
        assert a.value == frac_lap_point(g, [x], 0.5).value


def test_pairing_symmetry():
    # <Lu, v> = <u, Lv> for decaying fields
    u = gaussian_field(1)
    v = bump_field(1)
    out = pairing_check(u, v, 0.4)
    assert out["rel_gap"] < 1e-4
    assert out["lhs"] == pytest.approx(out["rhs"], rel=1e-4)


# ---------------------------------------------------------------------------
# error paths

def test_s_out_of_range():
    g = gaussian_field(1)
    for s in (0.0, 1.0, -0.3, 2.0):
        with pytest.raises(DomainError):
            frac_lap_point(g, [0.0], s)


def test_dimension_gate():
    f = ScalarField(4, lambda P: np.exp(-np.sum(P * P, axis=1)), CINF,
                    Bounded(1.0), name="4d")
    with pytest.raises(DomainError):
        frac_lap_point(f, np.zeros(4), 0.5)


def test_rough_field_rejected():
    # Holder alpha <= 2s: the integral need not converge at the center
    f = xplus_field(0.3)
    with pytest.raises(PreconditionError):
        frac_lap_point(f, [0.0], 0.5)      # evaluating AT the kink


def test_growing_field_rejected():
    f = ScalarField(1, lambda P: 1.0 + P[:, 0] ** 2, CINF,
                    PowerDecay(-2.0, 2.0), name="quad")
    with pytest.raises(PreconditionError):
        frac_lap_point(f, [0.0], 0.5)      # |x|^2 is not in L^1_s for any s


def test_not_a_field():
    with pytest.raises(UsageError):
        frac_lap_point(lambda P: P[:, 0], [0.0], 0.5)


def test_spec_override_respected():
    g = gaussian_field(1)
    tight = QuadratureSpec(tol_rel=1e-10, tol_abs=1e-13, max_nodes=400_000)
    ov = frac_lap_point(g, [0.2], 0.5, spec=tight)
    assert ov.err_est <= 1e-8
    assert ov.value == pytest.approx(kummer_gaussian(1, 0.5, 0.04), abs=1e-9)
