"""Scalar fields on R^n with the metadata the singular integrals need.

A field is a total vectorized map plus declared smoothness and decay.  The
decay tags drive tail handling (exact truncation for compact support,
closed-form bounds or absorbed-growth compactification for power laws); the
smoothness tag plus an optional finite list of nonsmooth points gates the
pointwise operator and places quadrature breakpoints.
"""

from dataclasses import dataclass, field as dc_field, replace
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, PreconditionError, UsageError
from .quadrature import adaptive_quad, sphere_rule, tail_integral

# --------------------------------------------------------------------------
# smoothness / decay tags

_KINDS = ("holder", "c1_holder", "c2", "cinf")


@dataclass(frozen=True)
class SmoothnessTag:
    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown smoothness kind {self.kind!r}")
        if self.kind in ("holder", "c1_holder"):
            if self.alpha is None or not (0.0 < self.alpha <= 1.0):
                raise DomainError("holder tags need alpha in (0, 1]")

    def admits(self, s):
        """Is the class at least C^{2s+eps}?"""
        if self.kind == "holder":
            return self.alpha > 2.0 * s
        if self.kind == "c1_holder":
            return 1.0 + self.alpha > 2.0 * s
        return True


HOLDER = lambda a: SmoothnessTag("holder", a)
C1_HOLDER = lambda a: SmoothnessTag("c1_holder", a)
C2 = SmoothnessTag("c2")
CINF = SmoothnessTag("cinf")


@dataclass(frozen=True)
class CompactSupport:
    radius: float


@dataclass(frozen=True)
class PowerDecay:
    """|u(y)| <= M (1+|y|)^{-p}; negative p declares polynomial growth."""
    p: float
    M: float


@dataclass(frozen=True)
class Bounded:
    M: float


def growth_exponent(decay):
    """Polynomial growth rate g >= 0 with |u(y)| = O(|y|^g)."""
    if isinstance(decay, PowerDecay) and decay.p < 0:
        return -decay.p
    return 0.0


def l1s_admissible(decay, n, s):
    """Does the decay tag guarantee finiteness of the s-weighted L^1 norm?"""
    if isinstance(decay, (CompactSupport, Bounded)):
        return True
    return decay.p > -2.0 * s


# --------------------------------------------------------------------------
# the field type

@dataclass
class ScalarField:
    """dim, vectorized evaluator, and the metadata tags.

    ``fn`` maps an (m, dim) float64 array to an (m,) array and must be total
    on finite inputs.  ``nonsmooth`` lists points where only ``bad_tag``
    regularity holds; away from them the ``smoothness`` tag applies.
    """

    dim: int
    fn: object
    smoothness: SmoothnessTag
    decay: object
    name: str = ""
    grad: object | None = None
    nonsmooth: tuple = ()      # ((point ndarray, SmoothnessTag), ...)

    def __call__(self, pts):
        pts = as_points(pts, self.dim)
        out = np.asarray(self.fn(pts), dtype=float)
        if out.shape != (pts.shape[0],):
            raise UsageError(
                f"field {self.name!r} returned shape {out.shape} "
                f"for {pts.shape[0]} points")
        return out

    def value(self, x):
        return float(self(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def nonsmooth_distances(self, x):
        x = np.asarray(x, dtype=float).reshape(self.dim)
        return [float(np.linalg.norm(x - p)) for p, _ in self.nonsmooth]


def as_points(pts, dim):
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 0:
        if dim != 1:
            raise UsageError("scalar point only valid for dim 1")
        return pts.reshape(1, 1)
    if pts.ndim == 1:
        if pts.shape[0] == dim:
            return pts.reshape(1, dim)
        if dim == 1:
            return pts.reshape(-1, 1)
        raise UsageError(f"cannot interpret shape {pts.shape} as points in R^{dim}")
    if pts.ndim == 2 and pts.shape[1] == dim:
        return pts
    raise UsageError(f"cannot interpret shape {pts.shape} as points in R^{dim}")


# --------------------------------------------------------------------------
# combinators (metadata transforms stay conservative)

def translate(f, shift):
    shift = np.asarray(shift, dtype=float).reshape(f.dim)
    decay = f.decay
    if isinstance(decay, CompactSupport):
        decay = CompactSupport(decay.radius + float(np.linalg.norm(shift)))
    elif isinstance(decay, PowerDecay):
        r = float(np.linalg.norm(shift))
        decay = PowerDecay(decay.p, decay.M * (1.0 + r) ** abs(decay.p) * 2.0 ** abs(decay.p))
    ns = tuple((p - shift, t) for p, t in f.nonsmooth)
    return ScalarField(f.dim, lambda P: f(P + shift), f.smoothness, decay,
                       name=f"{f.name}@{shift.tolist()}",
                       grad=(lambda P: f.grad(P + shift)) if f.grad else None,
                       nonsmooth=ns)


def dilate_arg(f, lam):
    """x -> u(lam x)."""
    lam = float(lam)
    if lam <= 0:
        raise DomainError("dilation factor must be positive")
    decay = f.decay
    if isinstance(decay, CompactSupport):
        decay = CompactSupport(decay.radius / lam)
    elif isinstance(decay, PowerDecay):
        decay = PowerDecay(decay.p, decay.M * max(lam, 1.0 / lam) ** abs(decay.p))
    ns = tuple((p / lam, t) for p, t in f.nonsmooth)
    return ScalarField(f.dim, lambda P: f(lam * P), f.smoothness, decay,
                       name=f"{f.name}*arg{lam}",
                       grad=(lambda P: lam * f.grad(lam * P)) if f.grad else None,
                       nonsmooth=ns)


def rotate(f, Q):
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (f.dim, f.dim) or not np.allclose(Q @ Q.T, np.eye(f.dim), atol=1e-12):
        raise UsageError("rotate needs an orthogonal dim x dim matrix")
    ns = tuple((Q.T @ p, t) for p, t in f.nonsmooth)
    return ScalarField(f.dim, lambda P: f(P @ Q.T), f.smoothness, f.decay,
                       name=f"{f.name}∘Q", nonsmooth=ns)


def lincomb(coeffs, fields):
    if len(coeffs) != len(fields) or not fields:
        raise UsageError("lincomb needs matching nonempty coeff/field lists")
    dim = fields[0].dim
    if any(f.dim != dim for f in fields):
        raise UsageError("lincomb fields must share a dimension")
    coeffs = [float(c) for c in coeffs]

    def fn(P):
        acc = coeffs[0] * fields[0](P)
        for c, f in zip(coeffs[1:], fields[1:]):
            acc = acc + c * f(P)
        return acc

    decay = _combine_decay([f.decay for f in fields], coeffs)
    sm = _weakest([f.smoothness for f in fields])
    ns = tuple(p for f in fields for p in f.nonsmooth)
    return ScalarField(dim, fn, sm, decay,
                       name="+".join(f"{c}*{f.name}" for c, f in zip(coeffs, fields)),
                       nonsmooth=ns)


def _combine_decay(decays, coeffs):
    if all(isinstance(d, CompactSupport) for d in decays):
        return CompactSupport(max(d.radius for d in decays))
    if any(isinstance(d, PowerDecay) for d in decays):
        worst_p = min(d.p if isinstance(d, PowerDecay) else
                      (np.inf if isinstance(d, CompactSupport) else 0.0)
                      for d in decays)
        total = 0.0
        for c, d in zip(coeffs, decays):
            m = d.M if not isinstance(d, CompactSupport) else 1.0
            total += abs(c) * m
        return PowerDecay(worst_p, total)
    total = sum(abs(c) * d.M for c, d in zip(coeffs, decays)
                if isinstance(d, Bounded))
    total += sum(abs(c) for c, d in zip(coeffs, decays)
                 if isinstance(d, CompactSupport))
    return Bounded(total)


_RANK = {"holder": 0, "c1_holder": 1, "c2": 2, "cinf": 3}


def _weakest(tags):
    return min(tags, key=lambda t: (_RANK[t.kind], t.alpha or 2.0))


# --------------------------------------------------------------------------
# catalog

def _smooth_step(t):
    """C-infinity transition: 1 for t <= 1, 0 for t >= 2."""
    t = np.asarray(t, dtype=float)
    lo = t <= 1.0
    hi = t >= 2.0
    mid = ~(lo | hi)
    out = np.zeros_like(t)
    out[lo] = 1.0
    tm = t[mid]
    a = np.exp(-1.0 / (2.0 - tm))
    b = np.exp(-1.0 / (tm - 1.0))
    out[mid] = a / (a + b)
    return out


def _norms(P):
    return np.sqrt(np.sum(P * P, axis=1))


def constant_field(dim=1, c=1.0):
    c = float(c)
    return ScalarField(dim, lambda P: np.full(P.shape[0], c), CINF, Bounded(abs(c)),
                       name=f"constant({c})",
                       grad=lambda P: np.zeros_like(P))


def gaussian_field(dim=1):
    def fn(P):
        return np.exp(-np.sum(P * P, axis=1))

    def gr(P):
        return -2.0 * P * fn(P)[:, None]

    return ScalarField(dim, fn, CINF, PowerDecay(8.0, 170.0), name="gaussian", grad=gr)


def bump_field(dim=1):
    """C^inf, identically 1 on B_1, supported in B_2."""
    return ScalarField(dim, lambda P: _smooth_step(_norms(P)), CINF,
                       CompactSupport(2.0), name="bump")


def xplus_field(s):
    s = float(s)
    if not (0.0 < s < 1.0):
        raise DomainError("xplus exponent must lie in (0,1)")

    def fn(P):
        x = P[:, 0]
        return np.where(x > 0.0, np.maximum(x, 0.0) ** s, 0.0)

    def gr(P):
        x = P[:, 0]
        g = np.zeros_like(P)
        pos = x > 0.0
        g[pos, 0] = s * x[pos] ** (s - 1.0)
        return g

    return ScalarField(1, fn, CINF, PowerDecay(-s, 1.0), name=f"xplus({s})",
                       grad=gr, nonsmooth=((np.zeros(1), HOLDER(s)),))


def window_sq_field(dim=1):
    """|x|^2 inside B_2, smoothly cut off by B_4 (keeps the s-weighted
    integral finite while behaving exactly quadratically near the origin)."""
    def fn(P):
        r = _norms(P)
        return r * r * _smooth_step(r / 2.0)

    return ScalarField(dim, fn, CINF, CompactSupport(4.0), name="window_sq")


def fourier_mode_field(dim=1, k=1, length=2 * np.pi):
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.shape != (dim,):
        k = np.full(dim, float(np.ravel(k)[0]))

    def fn(P):
        return np.cos(2.0 * np.pi * (P @ k) / float(length))

    return ScalarField(dim, fn, CINF, Bounded(1.0), name=f"fourier_mode(k={k.tolist()})")


def lorentzian_field(dim=1):
    def fn(P):
        return 1.0 / (1.0 + np.sum(P * P, axis=1))

    return ScalarField(dim, fn, CINF, PowerDecay(2.0, 2.0), name="lorentzian")


_CATALOG = {
    "constant": constant_field,
    "gaussian": gaussian_field,
    "bump": bump_field,
    "window_sq": window_sq_field,
    "fourier_mode": fourier_mode_field,
    "lorentzian": lorentzian_field,
}


def catalog(name, dim=1, **params):
    """Look up a catalog field by name.  'xplus' takes the exponent ``s``."""
    if name == "xplus":
        if dim != 1:
            raise UsageError("xplus is one-dimensional")
        return xplus_field(params.get("s", 0.5))
    try:
        maker = _CATALOG[name]
    except KeyError:
        raise UsageError(f"unknown catalog field {name!r}; "
                         f"known: {sorted(_CATALOG) + ['xplus']}") from None
    return maker(dim=dim, **params)


def list_catalog():
    return sorted(_CATALOG) + ["xplus"]


# --------------------------------------------------------------------------
# interpolants (used to chain operators and to wrap solver output)

def interpolated_field_1d(xs, vals, *, tail_power=None, name="interp1d"):
    """Cubic-spline field through (xs, vals) with matched power tails.

    Outside [xs[0], xs[-1]] the field continues as value_edge*(|x|/|edge|)^{-p}
    when ``tail_power`` = p is given, else as zero.
    """
    xs = np.asarray(xs, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if xs.ndim != 1 or xs.shape != vals.shape or xs.size < 4:
        raise UsageError("need matching 1-d arrays with at least 4 nodes")
    if not np.all(np.diff(xs) > 0):
        raise UsageError("interpolation nodes must be strictly increasing")
    sp = CubicSpline(xs, vals)
    lo, hi = float(xs[0]), float(xs[-1])
    vlo, vhi = float(vals[0]), float(vals[-1])

    def fn(P):
        x = P[:, 0]
        out = np.zeros_like(x)
        inside = (x >= lo) & (x <= hi)
        out[inside] = sp(x[inside])
        if tail_power is not None:
            p = float(tail_power)
            left = x < lo
            right = x > hi
            out[left] = vlo * (np.abs(x[left]) / abs(lo)) ** (-p)
            out[right] = vhi * (np.abs(x[right]) / abs(hi)) ** (-p)
        return out

    if tail_power is not None:
        mx = float(np.max(np.abs(vals)))
        decay = PowerDecay(float(tail_power),
                           mx * (1.0 + max(abs(lo), abs(hi))) ** abs(tail_power))
    else:
        decay = CompactSupport(max(abs(lo), abs(hi)))
    ns = ((np.array([lo]), C1_HOLDER(1.0)), (np.array([hi]), C1_HOLDER(1.0)))
    return ScalarField(1, fn, C2, decay, name=name, nonsmooth=ns)


# --------------------------------------------------------------------------
# diagnostics

def check_L1s(field, s, *, R0=None, tol=1e-9):
    """Finiteness and value of  int |u(y)| / (1 + |y|^{n+2s}) dy.

    Returns (finite, value, err_est).  A PowerDecay tag with p <= -2s is
    rejected analytically (the integral diverges); otherwise the radial
    profile is integrated directly out to R0 and the remainder on the exact
    compactified variable.
    """
    s = float(s)
    n = field.dim
    if isinstance(field.decay, PowerDecay) and field.decay.p <= -2.0 * s:
        return False, math.inf, math.inf
    dirs, w = sphere_rule(n)

    def profile(rho):
        # sum_j w_j |u(rho theta_j)| for an array of radii
        pts = rho[:, None, None] * dirs[None, :, :]
        vals = np.abs(field(pts.reshape(-1, n))).reshape(rho.size, -1)
        return vals @ w

    if R0 is None:
        R0 = 8.0
        if isinstance(field.decay, CompactSupport):
            R0 = max(4.0, field.decay.radius + 1.0)
    bp = [float(np.linalg.norm(p)) for p, _ in field.nonsmooth]

    def inner(rho):
        return profile(rho) * rho ** (n - 1) / (1.0 + rho ** (n + 2.0 * s))

    r1 = adaptive_quad(inner, 0.0, R0, tol_rel=tol, tol_abs=tol,
                       max_nodes=60_000, breakpoints=[b for b in bp if 0 < b < R0])
    if isinstance(field.decay, CompactSupport) and R0 >= field.decay.radius:
        return True, r1.value, r1.err_est

    def tail_profile(rho):
        # weight written as rho^{-1-2s} * correction; correction -> 1
        corr = rho ** (n + 2.0 * s) / (1.0 + rho ** (n + 2.0 * s))
        return profile(rho) * corr

    r2 = tail_integral(tail_profile, R0, s, growth=growth_exponent(field.decay),
                       tol_rel=tol, tol_abs=tol)
    return True, r1.value + r2.value, r1.err_est + r2.err_est


def holder_seminorm(field, alpha, box, h_min=1e-3):
    """Lower bound for the Holder seminorm by dyadic pair sampling.

    Monotone in the sample by construction: refining the dyadic levels only
    adds candidate pairs.
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    lo = np.atleast_1d(np.asarray(box[0], dtype=float))
    hi = np.atleast_1d(np.asarray(box[1], dtype=float))
    if lo.shape != (field.dim,) or hi.shape != (field.dim,) or np.any(hi <= lo):
        raise UsageError("box must be (lo, hi) with hi > lo componentwise")
    span = float(np.max(hi - lo))
    j_max = max(2, min(14 if field.dim == 1 else 7,
                       int(np.ceil(np.log2(span / h_min)))))
    best = 0.0
    for j in range(2, j_max + 1):
        m = 2 ** j + 1
        axes = [np.linspace(lo[d], hi[d], m) for d in range(field.dim)]
        if field.dim == 1:
            pts = axes[0][:, None]
            vals = field(pts)
            dv = np.abs(np.diff(vals))
            dh = np.abs(np.diff(axes[0]))
            best = max(best, float(np.max(dv / dh ** alpha)))
        else:
            grids = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([g.ravel() for g in grids], axis=1)
            vals = field(pts).reshape([m] * field.dim)
            for d in range(field.dim):
                dv = np.abs(np.diff(vals, axis=d))
                h = (hi[d] - lo[d]) / (m - 1)
                best = max(best, float(np.max(dv) / h ** alpha))
    return best


def audit_field(field, seed=0, n_samples=64):
    """Random spot checks of the declared metadata.  Returns violations."""
    rng = np.random.default_rng(seed)
    bad = []
    pts = rng.uniform(-6.0, 6.0, size=(n_samples, field.dim))
    vals = field(pts)
    r = np.sqrt(np.sum(pts * pts, axis=1))
    if isinstance(field.decay, CompactSupport):
        outside = r > field.decay.radius
        if np.any(np.abs(vals[outside]) > 0.0):
            bad.append("nonzero value outside declared support")
    elif isinstance(field.decay, PowerDecay):
        bound = field.decay.M * (1.0 + r) ** (-field.decay.p)
        if np.any(np.abs(vals) > bound * (1.0 + 1e-9)):
            bad.append("value exceeds declared power bound")
    elif isinstance(field.decay, Bounded):
        if np.any(np.abs(vals) > field.decay.M * (1.0 + 1e-9)):
            bad.append("value exceeds declared bound")
    if field.grad is not None:
        h = 1e-6
        keep = np.ones(n_samples, dtype=bool)
        for p, _ in field.nonsmooth:
            keep &= np.linalg.norm(pts - p, axis=1) > 0.05
        sample = pts[keep][:16]
        g = np.asarray(field.grad(sample))
        for d in range(field.dim):
            e = np.zeros(field.dim)
            e[d] = h
            fd = (field(sample + e) - field(sample - e)) / (2 * h)
            scale = np.maximum(1.0, np.abs(g[:, d]))
            if np.any(np.abs(fd - g[:, d]) / scale > 1e-4):
                bad.append(f"grad mismatch along axis {d}")
                break
    return bad
