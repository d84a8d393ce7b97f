"""Deterministic adaptive quadrature and fixed rules.

Everything downstream (pointwise operator, extension, ball solvers) runs on
the engine in this module.  The adaptive driver is Gauss-Kronrod 15(7) with
worst-panel-first bisection, a hard node budget, and a deterministic combine
order, so repeated runs produce bitwise identical values.

Integrands are vectorized: ``f(rho)`` receives a 1-d float64 array and must
return an array of the same shape.
"""

from dataclasses import dataclass, field
import heapq
import math

import numpy as np
from scipy import special

from .errors import DomainError

# Kronrod-15 abscissae (non-negative half) and weights, embedded Gauss-7.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-point layout on [-1, 1], Gauss points at odd indices
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # ascending, 15
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WGFULL = np.zeros(15)
_WGFULL[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass
class QuadratureSpec:
    """Shared knobs for the singular-integral evaluators.

    delta       inner-ball radius for the pointwise operator
    R_mid       radius where the mid field hands over to the tail treatment
    tol_rel     relative tolerance target for each quadrature
    tol_abs     absolute tolerance floor
    max_nodes   budget of integrand evaluations per operator call
    tail_mode   "analytic": short-circuit the tail when the decay metadata
                gives a closed-form bound small enough to absorb into err_est
                (compact support is always exact); otherwise fall through to
                "compactified": map (R, inf) onto (0, 1) and integrate.
    ang_nodes   angular resolution override (defaults per dimension)
    """

    delta: float = 1e-3
    R_mid: float = 12.0
    tol_rel: float = 1e-7
    tol_abs: float = 1e-10
    max_nodes: int = 80_000
    tail_mode: str = "analytic"
    ang_nodes: int | None = None

    def __post_init__(self):
        if not (0 < self.delta < self.R_mid):
            raise DomainError(f"need 0 < delta < R_mid, got {self.delta}, {self.R_mid}")
        if self.tail_mode not in ("analytic", "compactified"):
            raise DomainError(f"unknown tail_mode {self.tail_mode!r}")
        if self.max_nodes < 200:
            raise DomainError("max_nodes too small to run a single panel sweep")


@dataclass
class QuadResult:
    value: float
    err_est: float
    nodes_used: int
    converged: bool


def _panel(f, a, b):
    """One GK15 pass over [a, b] -> (kronrod, |kronrod - gauss|)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    y = f(mid + half * _NODES)
    ik = half * float(_WK @ y)
    ig = half * float(_WGFULL @ y)
    return ik, abs(ik - ig)


def _panels_batch(f, intervals):
    """Evaluate GK15 on several intervals with one integrand call."""
    intervals = list(intervals)
    a = np.array([iv[0] for iv in intervals])
    b = np.array([iv[1] for iv in intervals])
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    y = f(pts).reshape(len(intervals), 15)
    ik = half * (y @ _WK)
    ig = half * (y @ _WGFULL)
    return [(float(v), abs(float(v) - float(g))) for v, g in zip(ik, ig)]


def adaptive_quad(f, a, b, *, tol_rel=1e-8, tol_abs=1e-12, max_nodes=40_000,
                  breakpoints=(), min_width=None):
    """Adaptive GK15 on [a, b] with optional interior breakpoints.

    Returns a QuadResult.  Panels are refined worst-error-first with a
    deterministic tie-break on the left endpoint; the final sum runs over
    panels sorted by position through math.fsum, so the result does not
    depend on refinement scheduling.
    """
    if not (b > a):
        return QuadResult(0.0, 0.0, 0, True)
    if min_width is None:
        min_width = 1e-14 * (b - a)
    cuts = sorted({float(a), float(b), *(float(t) for t in breakpoints if a < t < b)})
    intervals = list(zip(cuts[:-1], cuts[1:]))
    nodes = 0
    # (neg_err, left, right, value, err)
    heap = []
    frozen = []  # panels at min width: keep, never refine
    for (lo, hi), (val, err) in zip(intervals, _panels_batch(f, intervals)):
        nodes += 15
        heapq.heappush(heap, (-err, lo, hi, val, err))

    def totals():
        vals = [item[3] for item in heap] + [p[2] for p in frozen]
        errs = [item[4] for item in heap] + [p[3] for p in frozen]
        return math.fsum(vals), math.fsum(errs)

    while True:
        total_v, total_e = totals()
        if total_e <= max(tol_abs, tol_rel * abs(total_v)):
            break
        if nodes + 30 > max_nodes or not heap:
            value, err = _finish(heap, frozen)
            return QuadResult(value, err, nodes, False)
        batch = []
        while heap and len(batch) < 8:
            batch.append(heapq.heappop(heap))
        halves = []
        kept = []
        for _, lo, hi, val, err in batch:
            if hi - lo <= min_width:
                frozen.append((lo, hi, val, err))
                continue
            m = 0.5 * (lo + hi)
            halves.append((lo, m))
            halves.append((m, hi))
            kept.append(None)
        if not halves:
            value, err = _finish(heap, frozen)
            return QuadResult(value, err, nodes, False)
        results = _panels_batch(f, halves)
        nodes += 15 * len(halves)
        for (lo, hi), (val, err) in zip(halves, results):
            heapq.heappush(heap, (-err, lo, hi, val, err))
    value, err = _finish(heap, frozen)
    return QuadResult(value, err, nodes, True)


def _finish(heap, frozen):
    panels = [(item[1], item[3], item[4]) for item in heap]
    panels += [(p[0], p[2], p[3]) for p in frozen]
    panels.sort(key=lambda p: p[0])
    value = math.fsum(p[1] for p in panels)
    err = math.fsum(p[2] for p in panels)
    return value, err


def gauss_legendre(n):
    """Cached Gauss-Legendre rule on [-1, 1]."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


_GL_CACHE: dict = {}


def jacobi_rule_01(m, a_pow, b_pow):
    """Nodes/weights for  int_0^1 f(t) t^b_pow (1-t)^a_pow dt  =  sum w f(t).

    a_pow, b_pow > -1.  The weight is folded into w, so f is the smooth part.
    """
    if m not in range(1, 2000):
        raise DomainError("jacobi rule size out of range")
    with np.errstate(invalid="ignore"):   # scipy's recurrence warns at k=1 for a,b < 0
        x, w = special.roots_jacobi(m, a_pow, b_pow)
    t = 0.5 * (x + 1.0)
    w = w / 2.0 ** (a_pow + b_pow + 1.0)
    return t, w


def sphere_rule(dim, level=None):
    """Direction/weight sets integrating over the unit sphere S^{dim-1}.

    Weights sum to the sphere area (2, 2*pi, 4*pi for dim 1, 2, 3).  dim 1 is
    the two-point set {+1, -1}; dim 2 is the trapezoid rule on the circle
    (spectrally accurate for smooth integrands); dim 3 is a product of
    Gauss-Legendre in the polar cosine and trapezoid in azimuth.
    """
    if dim == 1:
        dirs = np.array([[1.0], [-1.0]])
        w = np.array([1.0, 1.0])
        return dirs, w
    if dim == 2:
        m = int(level or 48)
        phi = 2.0 * np.pi * (np.arange(m) + 0.5) / m
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        w = np.full(m, 2.0 * np.pi / m)
        return dirs, w
    if dim == 3:
        mp = int(level or 16)
        ma = 2 * mp
        ct, wt = gauss_legendre(mp)
        phi = 2.0 * np.pi * (np.arange(ma) + 0.5) / ma
        st = np.sqrt(1.0 - ct ** 2)
        dirs = np.empty((mp * ma, 3))
        w = np.empty(mp * ma)
        k = 0
        for i in range(mp):
            dirs[k:k + ma, 0] = st[i] * np.cos(phi)
            dirs[k:k + ma, 1] = st[i] * np.sin(phi)
            dirs[k:k + ma, 2] = ct[i]
            w[k:k + ma] = wt[i] * (2.0 * np.pi / ma)
            k += ma
        return dirs, w
    raise DomainError(f"sphere_rule supports dim 1..3, got {dim}")


def tail_integral(S, R, s, *, growth=0.0, tol_rel=1e-9, tol_abs=1e-13,
                  max_nodes=20_000):
    """Exact compactification of  int_R^inf rho^{-1-2s} S(rho) drho.

    Maps rho = R * tau^{-1/(2s)} so the weight becomes the constant
    R^{-2s}/(2s) on tau in (0, 1).  ``growth`` >= 0 declares S(rho) ~ rho^growth
    at infinity; the resulting tau^{-growth/(2s)} endpoint singularity is
    absorbed by a second power substitution, so the engine only ever sees a
    bounded integrand.  Requires growth < 2s.
    """
    if R <= 0:
        raise DomainError("tail radius must be positive")
    if growth >= 2 * s:
        raise DomainError("tail growth exponent must be < 2s for integrability")
    pref = R ** (-2.0 * s) / (2.0 * s)

    def g_tau(tau):
        # clamp: radii beyond 1e150 carry no measure after compactification
        # and would overflow |x|^2 in downstream evaluators
        with np.errstate(over="ignore"):
            rho = np.minimum(R * tau ** (-1.0 / (2.0 * s)), 1e150)
        return S(rho)

    if growth <= 0.0:
        r = adaptive_quad(g_tau, 0.0, 1.0, tol_rel=tol_rel,
                          tol_abs=tol_abs / max(pref, 1e-300),
                          max_nodes=max_nodes)
    else:
        q = growth / (2.0 * s)          # in (0, 1)
        c = 1.0 / (1.0 - q)

        # S ~ tau^{-q} meets the Jacobian sig^{c-1}; c(1-q)-1 = 0 so the
        # substituted integrand is bounded.
        def g_sigma(sig):
            tau = sig ** c
            return c * sig ** (c - 1.0) * g_tau(tau)

        r = adaptive_quad(g_sigma, 0.0, 1.0, tol_rel=tol_rel,
                          tol_abs=tol_abs / max(pref, 1e-300),
                          max_nodes=max_nodes)
    return QuadResult(pref * r.value, pref * r.err_est, r.nodes_used, r.converged)


def power_endpoint_quad(g, beta, b, **kw):
    """int_0^b rho^beta g(rho) drho  with beta > -1 and g smooth at 0.

    The substitution rho = sigma^{1/(1+beta)} removes the endpoint power
    exactly, so the engine integrates a bounded smooth function.
    """
    if beta <= -1.0:
        raise DomainError("endpoint exponent must exceed -1")
    c = 1.0 + beta

    def h(sig):
        return g(sig ** (1.0 / c)) / c

    r = adaptive_quad(h, 0.0, b ** c, **kw)
    return QuadResult(r.value, r.err_est, r.nodes_used, r.converged)


def fsum(values):
    return math.fsum(values)
