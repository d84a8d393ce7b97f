"""Field metadata: tags, transforms that preserve declared metadata, the
catalog, interpolants, and the weighted-L1 admissibility diagnostics.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclap.errors import DomainError, UsageError
from fraclap.fields import (C2, CINF, HOLDER, Bounded, CompactSupport,
                            PowerDecay, ScalarField, as_points, audit_field,
                            bump_field, catalog, check_L1s, constant_field,
                            dilate_arg, gaussian_field, growth_exponent,
                            holder_seminorm, interpolated_field_1d,
                            l1s_admissible, lincomb, list_catalog, rotate,
                            translate, window_sq_field, xplus_field)


# ---------------------------------------------------------------------------
# tags

def test_smoothness_tag_admits():
    assert CINF.admits(0.9)
    assert C2.admits(0.9)
    assert HOLDER(0.7).admits(0.3)
    assert not HOLDER(0.5).admits(0.3)     # alpha <= 2s


def test_smoothness_tag_validation():
    with pytest.raises(DomainError):
        HOLDER(0.0)
    with pytest.raises(DomainError):
        HOLDER(1.5)


def test_growth_exponent():
    assert growth_exponent(CompactSupport(1.0)) == 0.0
    assert growth_exponent(Bounded(3.0)) == 0.0
    assert growth_exponent(PowerDecay(2.0, 1.0)) == 0.0
    assert growth_exponent(PowerDecay(-1.5, 1.0)) == 1.5


def test_l1s_admissible():
    assert l1s_admissible(CompactSupport(2.0), 1, 0.3)
    assert l1s_admissible(Bounded(5.0), 1, 0.3)
    assert l1s_admissible(PowerDecay(-0.5, 1.0), 1, 0.3)   # grows |x|^{1/2}
    assert not l1s_admissible(PowerDecay(-0.8, 1.0), 1, 0.3)


# ---------------------------------------------------------------------------
# the field type

def test_scalar_field_call_shapes():
    g = gaussian_field(2)
    pts = np.zeros((5, 2))
    assert g(pts).shape == (5,)
    assert g.value([0.0, 0.0]) == pytest.approx(1.0)
    with pytest.raises(UsageError):
        g(np.zeros((5, 3)))


def test_scalar_field_rejects_bad_fn_output():
    f = ScalarField(1, lambda P: np.zeros((P.shape[0], 2)), CINF,
                    Bounded(1.0), name="bad")
    with pytest.raises(UsageError):
        f(np.zeros((3, 1)))


def test_as_points_promotes_1d():
    pts = as_points(np.array([1.0, 2.0, 3.0]), 1)
    assert pts.shape == (3, 1)


# ---------------------------------------------------------------------------
# catalog

def test_catalog_roundtrip():
    for name in list_catalog():
        f = catalog(name) if name != "xplus" else catalog(name, s=0.4)
        assert f.dim == 1
        assert np.isfinite(f(np.linspace(-3, 3, 7)[:, None])).all()


def test_catalog_unknown_name():
    with pytest.raises(UsageError):
        catalog("does_not_exist")


def test_gaussian_values():
    g = gaussian_field(3)
    x = np.array([[1.0, 2.0, 2.0]])
    assert g(x)[0] == pytest.approx(math.exp(-9.0))


def test_bump_compactly_supported():
    b = bump_field(2)
    assert isinstance(b.decay, CompactSupport)
    r = b.decay.radius
    outside = np.array([[r + 0.01, 0.0], [0.0, -r - 5.0]])
    assert np.all(b(outside) == 0.0)


def test_window_sq_is_square_inside():
    w = window_sq_field(1)
    xs = np.linspace(-1.9, 1.9, 21)
    assert np.allclose(w(xs[:, None]), xs ** 2)


def test_xplus_field_profile():
    s = 0.6
    f = xplus_field(s)
    assert f(np.array([[-1.0], [0.0]])).tolist() == [0.0, 0.0]
    assert f(np.array([[2.0]]))[0] == pytest.approx(2.0 ** s)
    assert len(f.nonsmooth) == 1          # the kink at the origin
    assert growth_exponent(f.decay) == pytest.approx(s)


def test_constant_field_bounded():
    c = catalog("constant")
    assert isinstance(c.decay, Bounded)
    assert c(np.array([[1e6]]))[0] == 1.0


# ---------------------------------------------------------------------------
# transforms

@given(st.floats(min_value=-3, max_value=3),
       st.floats(min_value=-2, max_value=2))
@settings(max_examples=30)
def test_translate_evaluates_shifted(shift, x):
    g = gaussian_field(1)
    t = translate(g, [shift])
    assert t(np.array([[x]]))[0] == pytest.approx(g(np.array([[x + shift]]))[0])


def test_translate_moves_support_and_kinks():
    f = xplus_field(0.5)
    t = translate(f, [1.0])
    (p, _tag), = t.nonsmooth
    assert p[0] == pytest.approx(-1.0)    # kink moves with the graph


@given(st.floats(min_value=0.2, max_value=4.0),
       st.floats(min_value=-2, max_value=2))
@settings(max_examples=30)
def test_dilate_arg(lam, x):
    g = bump_field(1)
    d = dilate_arg(g, lam)
    assert d(np.array([[x]]))[0] == pytest.approx(g(np.array([[lam * x]]))[0])
    assert d.decay.radius == pytest.approx(g.decay.radius / lam)


def test_dilate_rejects_nonpositive():
    with pytest.raises(DomainError):
        dilate_arg(gaussian_field(1), 0.0)


def test_rotate_radial_invariance(rng):
    th = 0.7
    Q = np.array([[math.cos(th), -math.sin(th)],
                  [math.sin(th), math.cos(th)]])
    g = gaussian_field(2)
    r = rotate(g, Q)
    pts = rng.normal(size=(20, 2))
    assert np.allclose(r(pts), g(pts))


def test_rotate_rejects_nonorthogonal():
    with pytest.raises(UsageError):
        rotate(gaussian_field(2), np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_lincomb_values_and_decay():
    g, b = gaussian_field(1), bump_field(1)
    f = lincomb([2.0, -1.0], [g, b])
    xs = np.linspace(-2, 2, 9)[:, None]
    assert np.allclose(f(xs), 2 * g(xs) - b(xs))


def test_lincomb_validation():
    with pytest.raises(UsageError):
        lincomb([1.0], [gaussian_field(1), bump_field(1)])
    with pytest.raises(UsageError):
        lincomb([], [])
    with pytest.raises(UsageError):
        lincomb([1.0, 1.0], [gaussian_field(1), gaussian_field(2)])


# ---------------------------------------------------------------------------
# interpolant

def test_interpolated_field_reproduces_nodes():
    xs = np.linspace(-2, 2, 17)
    vals = np.sin(xs)
    f = interpolated_field_1d(xs, vals)
    assert np.allclose(f(xs[:, None]), vals, atol=1e-14)
    assert f(np.array([[5.0]]))[0] == 0.0            # zero tails
    assert isinstance(f.decay, CompactSupport)


def test_interpolated_field_power_tails():
    xs = np.linspace(-2, 2, 17)
    f = interpolated_field_1d(xs, 1 / (1 + xs ** 2), tail_power=2.0)
    # the tail continues the edge value as (|x|/2)^{-2}
    v4 = f(np.array([[4.0]]))[0]
    assert v4 == pytest.approx((1 / 5) * (4 / 2) ** -2, rel=1e-12)
    assert isinstance(f.decay, PowerDecay)


def test_interpolated_field_validation():
    with pytest.raises(UsageError):
        interpolated_field_1d(np.array([0.0, 1.0]), np.array([1.0, 2.0]))
    xs = np.array([0.0, 1.0, 1.0, 2.0])
    with pytest.raises(UsageError):
        interpolated_field_1d(xs, np.zeros(4))


# ---------------------------------------------------------------------------
# diagnostics

def test_check_l1s_gaussian():
    finite, val, err = check_L1s(gaussian_field(1), 0.5)
    assert finite and val > 0 and err < 1e-6


def test_check_l1s_rejects_fast_growth():
    f = ScalarField(1, lambda P: 1.0 + np.abs(P[:, 0]) ** 1.5, CINF,
                    PowerDecay(-1.5, 2.0), name="grows")
    finite, _, _ = check_L1s(f, 0.3)
    assert not finite


def test_holder_seminorm_linear():
    f = ScalarField(1, lambda P: P[:, 0], CINF, PowerDecay(-1.0, 1.0),
                    name="id")
    sn = holder_seminorm(f, 1.0, ([-1.0], [1.0]))
    assert sn == pytest.approx(1.0, rel=1e-6)


def test_holder_seminorm_detects_root_singularity():
    f = xplus_field(0.5)
    # [x_+^{1/2}]_{C^{0.5}} = 1 with the pair straddling 0
    sn = holder_seminorm(f, 0.5, ([-0.5], [0.5]))
    assert sn == pytest.approx(1.0, rel=5e-2)


def test_audit_field_passes_catalog():
    for name in ("gaussian", "bump", "constant", "lorentzian"):
        assert audit_field(catalog(name)) == []


def test_audit_field_flags_lying_support():
    f = ScalarField(1, lambda P: np.ones(P.shape[0]), CINF,
                    CompactSupport(1.0), name="liar")
    assert audit_field(f) != []
