"""Pointwise fractional Laplacian by singular-integral quadrature.

The operator is evaluated in the symmetric second-difference form

    (c/2) * int ( 2u(x) - u(x+y) - u(x-y) ) |y|^{-n-2s} dy

split into three zones:

* inner ball |y| < delta: replaced by its Taylor value
  -(c/2) (omega/n) delta^{2-2s}/(2-2s) * Lap u(x), with the Laplacian taken
  by central differences at step delta and a quartic-term error estimate.
  (Dropping the zone and bounding it would stall for s near 1, where the
  delta^{2-2s} bound stops shrinking.)
* mid annulus delta <= |y| <= R: adaptive radial quadrature against a
  product rule on the sphere.
* tail |y| > R: the u(x) part in closed form, the field part either
  bounded away analytically (compact support exactly, small power-decay
  remainders) or integrated exactly on the compactified variable.
"""

from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
import os

import numpy as np

from .constants import c_ns, sphere_area
from .errors import DomainError, PreconditionError, UsageError
from .fields import (CompactSupport, PowerDecay, ScalarField, as_points,
                     growth_exponent, l1s_admissible)
from .quadrature import QuadratureSpec, adaptive_quad, sphere_rule, tail_integral

S_MIN = 1e-3


@dataclass
class OpValue:
    value: float
    err_est: float
    nodes_used: int
    converged: bool


_ANG_DEFAULT = {1: None, 2: 48, 3: 16}


def _check_s_op(s):
    s = float(s)
    if not (S_MIN <= s <= 1.0 - S_MIN):
        raise DomainError(f"operator order s must lie in [{S_MIN}, {1-S_MIN}], got {s}")
    return s


def frac_lap_point(field, x, s, spec=None):
    """Evaluate the operator at one point.  Returns an OpValue."""
    if not isinstance(field, ScalarField):
        raise UsageError("frac_lap_point expects a ScalarField")
    s = _check_s_op(s)
    n = field.dim
    if n not in (1, 2, 3):
        raise DomainError(f"quadrature supports dim 1..3, got {n}")
    if not l1s_admissible(field.decay, n, s):
        raise PreconditionError(
            f"field {field.name!r} declares growth too strong for s={s} "
            "(needs p > -2s)")
    x = np.asarray(x, dtype=float).reshape(n)

    dists = field.nonsmooth_distances(x)
    at_kink = any(d < 1e-12 for d in dists)
    if at_kink:
        _, bad_tag = min(zip(dists, (t for _, t in field.nonsmooth)),
                         key=lambda z: z[0])
        if not bad_tag.admits(s):
            raise PreconditionError(
                f"field {field.name!r} is only {bad_tag.kind}"
                f"({bad_tag.alpha}) at the evaluation point; "
                f"order s={s} needs better than C^{2*s:.3g}")
    elif not field.smoothness.admits(s):
        raise PreconditionError(
            f"field {field.name!r} smoothness tag does not admit order s={s}")

    c = c_ns(n, s)
    omega = sphere_area(n)
    spec = spec or QuadratureSpec()
    delta = spec.delta
    positive_d = [d for d in dists if d > 1e-12]
    if positive_d:
        delta = min(delta, min(positive_d) / 4.0)
    nodes = 0
    ux = field.value(x)

    # ---- inner ball ------------------------------------------------------
    if at_kink:
        inner_v, inner_e, k = _inner_holder_bound(field, x, s, c, omega, delta)
    else:
        inner_v, inner_e, k = _inner_taylor(field, x, s, c, omega, delta, ux)
    nodes += k

    # ---- mid annulus -----------------------------------------------------
    dirs, wdir = sphere_rule(n, spec.ang_nodes or _ANG_DEFAULT[n])
    ndir = len(wdir)
    r_support = (field.decay.radius if isinstance(field.decay, CompactSupport)
                 else None)
    R = max(spec.R_mid, 2.0 * float(np.linalg.norm(x)) + 1.0)
    if r_support is not None:
        R = max(R, float(np.linalg.norm(x)) + r_support + 0.5)

    def second_diff_profile(rho):
        pts_p = (x[None, None, :] + rho[:, None, None] * dirs[None, :, :])
        pts_m = (x[None, None, :] - rho[:, None, None] * dirs[None, :, :])
        up = field(pts_p.reshape(-1, n)).reshape(rho.size, ndir)
        um = field(pts_m.reshape(-1, n)).reshape(rho.size, ndir)
        return (2.0 * ux - up - um) @ wdir

    bp = set()
    t = delta
    while t < R:
        bp.add(t)
        t *= 4.0
    for d in positive_d:
        bp.add(d)
    if r_support is not None:
        lo = abs(float(np.linalg.norm(x)) - r_support)
        bp.update(b for b in (lo, float(np.linalg.norm(x)) + r_support) if delta < b < R)
    mid_budget = max(2000, spec.max_nodes // (2 * ndir))

    def mid_integrand(rho):
        return rho ** (-1.0 - 2.0 * s) * second_diff_profile(rho)

    mid = adaptive_quad(mid_integrand, delta, R,
                        tol_rel=spec.tol_rel, tol_abs=spec.tol_abs / max(c, 1e-12),
                        max_nodes=mid_budget,
                        breakpoints=sorted(b for b in bp if delta < b < R))
    nodes += mid.nodes_used * 2 * ndir
    mid_v = 0.5 * c * mid.value
    mid_e = 0.5 * c * mid.err_est

    # ---- tail ------------------------------------------------------------
    tail_v = c * ux * omega * R ** (-2.0 * s) / (2.0 * s)
    tail_e = 0.0
    tail_converged = True
    t_u = 0.0
    if r_support is not None and R >= float(np.linalg.norm(x)) + r_support:
        pass  # field vanishes beyond R: T_u = 0 exactly
    else:
        bound = _tail_bound(field.decay, float(np.linalg.norm(x)), R, n, s, omega)
        target = 0.25 * max(spec.tol_abs, spec.tol_rel * (abs(mid_v) + abs(tail_v)))
        if spec.tail_mode == "analytic" and bound is not None and c * bound <= target:
            tail_e += c * bound
        else:
            def mean_profile(rho):
                pts = (x[None, None, :] + rho[:, None, None] * dirs[None, :, :])
                return field(pts.reshape(-1, n)).reshape(rho.size, ndir) @ wdir

            tr = tail_integral(mean_profile, R, s,
                               growth=growth_exponent(field.decay),
                               tol_rel=spec.tol_rel, tol_abs=spec.tol_abs / max(c, 1e-12),
                               max_nodes=max(2000, spec.max_nodes // (4 * ndir)))
            nodes += tr.nodes_used * ndir
            t_u = tr.value
            tail_e += c * tr.err_est
            tail_converged = tr.converged
    tail_v -= c * t_u

    value = inner_v + mid_v + tail_v
    err = inner_e + mid_e + tail_e
    return OpValue(value, err, nodes, bool(mid.converged and tail_converged))


def _inner_taylor(field, x, s, c, omega, delta, ux):
    n = field.dim
    h = delta
    eye = np.eye(n)
    pts = np.concatenate([x + h * eye, x - h * eye,
                          x + 2 * h * eye, x - 2 * h * eye], axis=0)
    vals = field(pts)
    up1, um1 = vals[:n], vals[n:2 * n]
    up2, um2 = vals[2 * n:3 * n], vals[3 * n:]
    lap = float(np.sum(up1 + um1 - 2.0 * ux)) / h ** 2
    # quartic central differences feed both error terms
    d4 = np.abs(up2 - 4 * up1 + 6 * ux - 4 * um1 + um2) / h ** 4
    q4 = float(np.sum(d4))
    value = -(0.5 * c) * (omega / n) * delta ** (2.0 - 2.0 * s) / (2.0 - 2.0 * s) * lap
    err_trunc = (0.5 * c) * omega * (q4 / 4.0) * delta ** (4.0 - 2.0 * s) / (4.0 - 2.0 * s)
    fd_err = (h * h * q4 / 12.0
              + 4.0 * np.finfo(float).eps * max(1.0, abs(ux)) / h ** 2)
    err_fd = (0.5 * c) * (omega / n) * delta ** (2.0 - 2.0 * s) / (2.0 - 2.0 * s) * fd_err
    return value, err_trunc + err_fd, 4 * n + 1


def _inner_holder_bound(field, x, s, c, omega, delta):
    """At a declared nonsmooth point: drop the inner ball, bound it by the
    local Holder quotient (tag admits s, so alpha > 2s and the bound is
    finite and shrinks with delta)."""
    n = field.dim
    tag = min((t for p, t in field.nonsmooth
               if float(np.linalg.norm(np.asarray(p) - x)) < 1e-12),
              key=lambda t: t.alpha or 2.0)
    alpha = tag.alpha if tag.alpha is not None else 1.0
    dirs, wdir = sphere_rule(n)
    ux = field.value(x)
    seminorm = 0.0
    k = 0
    for scale in (delta, delta / 2, delta / 4, delta / 8):
        pts = x[None, :] + scale * dirs
        vals = field(pts)
        k += len(vals)
        seminorm = max(seminorm, float(np.max(np.abs(vals - ux))) / scale ** alpha)
    bound = c * seminorm * omega * delta ** (alpha - 2.0 * s) / (alpha - 2.0 * s)
    return 0.0, bound, k


def _tail_bound(decay, x_norm, R, n, s, omega):
    """Closed-form bound for |T_u| = |int_{|y|>R} u(x+y)|y|^{-n-2s} dy|."""
    if isinstance(decay, CompactSupport):
        if R >= x_norm + decay.radius:
            return 0.0
        return None
    if isinstance(decay, PowerDecay):
        p = decay.p
        if p + 2.0 * s <= 0:
            return None
        if R < 2.0 * x_norm:
            return None
        # |u(x+y)| <= M 2^|p| |y|^{-p} on |y| >= max(2|x|, 1)
        return (decay.M * 2.0 ** abs(p) * omega
                * R ** (-(p + 2.0 * s)) / (p + 2.0 * s))
    # bounded field: |T_u| <= M omega R^{-2s}/(2s); rarely small enough
    return decay.M * omega * R ** (-2.0 * s) / (2.0 * s)


def frac_lap_grid(field, points, s, spec=None, threads=None):
    """Operator at many points.  One OpValue per point, order preserved;
    the result is independent of the thread count."""
    pts = as_points(points, field.dim)
    if threads is None:
        threads = int(os.environ.get("FRACLAP_THREADS", "1"))
    worker = lambda p: frac_lap_point(field, p, s, spec)
    if threads > 1 and len(pts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(worker, pts))
    return [worker(p) for p in pts]


def pairing_check(u, v, s, *, half_width=6.0, n_grid=241, spec=None, threads=None):
    """Symmetry of the bilinear pairing:  <Lu, v> vs <u, Lv> on a box.

    Both sides are grid quadratures (composite Simpson) of pointwise operator
    values; decaying fields make the box truncation negligible.  dim 1.
    """
    if u.dim != 1 or v.dim != 1:
        raise UsageError("pairing_check is one-dimensional")
    if n_grid % 2 == 0:
        n_grid += 1
    xs = np.linspace(-half_width, half_width, n_grid)
    w = np.ones(n_grid)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (xs[1] - xs[0]) / 3.0
    lu = np.array([o.value for o in frac_lap_grid(u, xs, s, spec, threads)])
    lv = np.array([o.value for o in frac_lap_grid(v, xs, s, spec, threads)])
    uv = u(xs[:, None])
    vv = v(xs[:, None])
    lhs = float(np.sum(w * lu * vv))
    rhs = float(np.sum(w * uv * lv))
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return {"lhs": lhs, "rhs": rhs, "rel_gap": abs(lhs - rhs) / scale}
