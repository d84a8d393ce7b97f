"""Monte Carlo Dirichlet solver driven by exact ball-exit sampling.

The jump process leaves a ball in one shot with the fractional Poisson
kernel as its exit law, so no time discretization is involved anywhere: a
walk on a general domain chains maximal-inscribed-ball exits (each ball is
centered at the walker, where the exit radius is an exact Beta draw) until
the walker lands outside.

Sampling is organized in fixed blocks with counter-based streams keyed by
(seed, block index), and block results are combined in index order, so a run
is bitwise reproducible regardless of how many threads execute the blocks.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .errors import (ConvergenceFailure, DomainError, PreconditionError,
                     UsageError)
from .fields import PowerDecay, ScalarField
from .pointwise import S_MIN, frac_lap_point

BLOCK = 4096


def _threads():
    try:
        return max(1, int(os.environ.get("FRACLAP_THREADS", "1")))
    except ValueError:
        return 1


def _block_rng(seed, block):
    key = np.array([seed, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ---------------------------------------------------------------------------
# domains

@dataclass(frozen=True)
class BallDomain:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.radius <= 0:
            raise DomainError("ball radius must be positive")

    @property
    def dim(self):
        return len(self.center)

    def inscribed_radius(self, pts):
        c = np.asarray(self.center)
        return self.radius - np.linalg.norm(np.atleast_2d(pts) - c, axis=1)


@dataclass(frozen=True)
class BoxDomain:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != len(self.hi) or any(
                a >= b for a, b in zip(self.lo, self.hi)):
            raise DomainError("box needs lo < hi componentwise")

    @property
    def dim(self):
        return len(self.lo)

    def inscribed_radius(self, pts):
        pts = np.atleast_2d(pts)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.minimum((pts - lo).min(axis=1), (hi - pts).min(axis=1))


@dataclass(frozen=True)
class UnionDomain:
    """Union of primitives.  The inscribed-ball oracle takes, at each point,
    the largest single-primitive ball around it; that is exact per primitive
    and conservative for the union (overlaps could allow a bigger ball)."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise DomainError("union of nothing")
        if len({p.dim for p in parts}) != 1:
            raise DomainError("union parts must share a dimension")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return self.parts[0].dim

    def inscribed_radius(self, pts):
        return np.max([p.inscribed_radius(pts) for p in self.parts], axis=0)


def _contains(domain, pts):
    return domain.inscribed_radius(pts) > 0.0


# ---------------------------------------------------------------------------
# config / estimate

@dataclass(frozen=True)
class McConfig:
    seed: int
    n_samples: int
    s: float = 0.5
    domain: object = None
    max_jumps: int = 512

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2 ** 64):
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.n_samples < 1:
            raise UsageError("n_samples must be >= 1")
        if self.max_jumps < 1:
            raise UsageError("max_jumps must be >= 1")
        if not (S_MIN <= self.s <= 1.0 - S_MIN):
            raise DomainError("s out of operator range")


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    n_effective: int
    truncated_walks: int


# ---------------------------------------------------------------------------
# exact exit sampling from a ball

def _uniform_dirs(n, size, rng):
    if n == 1:
        return np.where(rng.random(size) < 0.5, -1.0, 1.0)[:, None]
    g = rng.standard_normal((size, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _exit_radii(s, size, rng):
    """|Y|/r for exits launched from the center: 1/sqrt(B), B ~ Beta(s, 1-s)."""
    return 1.0 / np.sqrt(rng.beta(s, 1.0 - s, size))


def _exit_centered(n, s, size, rng):
    return _exit_radii(s, size, rng)[:, None] * _uniform_dirs(n, size, rng)


class _SideTable:
    """Inverse CDF of the one-sided exit law of the unit interval, built in
    the regularized-incomplete-beta coordinate w = I_tau(s, 1-s) where the
    density is the smooth bounded factor h(tau) = 1/(1 -+ z sqrt(tau))."""

    def __init__(self, z, s, side):
        self.s = s
        sign = 1.0 if side > 0 else -1.0
        J = 256
        w_edges = np.linspace(0.0, 1.0, J + 1)
        gl_t, gl_w = np.polynomial.legendre.leggauss(6)
        wq = (0.5 * (w_edges[1:, None] - w_edges[:-1, None]) * gl_t
              + 0.5 * (w_edges[1:, None] + w_edges[:-1, None]))
        tau = _sp.betaincinv(s, 1.0 - s, np.clip(wq, 1e-300, 1.0))
        h = 1.0 / (1.0 - sign * z * np.sqrt(tau))
        panel = 0.5 * (w_edges[1:] - w_edges[:-1]) * (h @ gl_w)
        cdf = np.concatenate([[0.0], np.cumsum(panel)])
        self.mass = cdf[-1]
        f = cdf / self.mass
        if np.any(np.diff(f) <= 0.0):
            raise ConvergenceFailure("exit-law CDF table is not monotone")
        self._f = f
        self._w = w_edges
        self.sign = sign

    def draw(self, u):
        w = np.interp(u, self._f, self._w)
        tau = _sp.betaincinv(self.s, 1.0 - self.s, w)
        tau = np.clip(tau, 1e-300, 1.0 - 1e-16)
        return self.sign / np.sqrt(tau)


def _exit_1d(z, s, size, rng):
    right = _SideTable(z, s, +1)
    left = _SideTable(z, s, -1)
    p_plus = right.mass / (right.mass + left.mass)
    u_side = rng.random(size)
    u_pos = rng.random(size)
    out = np.empty(size)
    m = u_side < p_plus
    out[m] = right.draw(u_pos[m])
    out[~m] = left.draw(u_pos[~m])
    return out[:, None]


def _exit_rejection(z, s, size, rng, draw_budget=300_000_000):
    """Exits of the unit ball from interior z != 0, dim 2 or 3: propose from
    the centered law, accept with [(1-|z|) |y| / |y - z|]^n <= 1.

    The acceptance rate decays like (1-|z|)^{n-s}, so starts hugging the
    boundary get slow; the budget converts a hopeless run into an error.
    """
    n = len(z)
    zn = np.linalg.norm(z)
    out = np.empty((size, n))
    pending = np.arange(size)
    drawn = 0
    while drawn < draw_budget:
        k = len(pending)
        if k == 0:
            return out
        y = _exit_centered(n, s, k, rng)
        drawn += k
        ratio = (1.0 - zn) * np.linalg.norm(y, axis=1) \
            / np.linalg.norm(y - z, axis=1)
        acc = rng.random(k) < ratio ** n
        out[pending[acc]] = y[acc]
        pending = pending[~acc]
    raise ConvergenceFailure(
        f"exit rejection sampler exhausted its draw budget with "
        f"{len(pending)} pending draws (start too close to the boundary)")


def _exit_batch(x_rel, s, size, rng):
    """Exits of the unit ball started at relative position x_rel (|x_rel|<1)."""
    n = len(x_rel)
    zn = float(np.linalg.norm(x_rel))
    if zn < 1e-14:
        return _exit_centered(n, s, size, rng)
    if n == 1:
        return _exit_1d(float(x_rel[0]), s, size, rng)
    return _exit_rejection(np.asarray(x_rel, float), s, size, rng)


def sample_exit(x, ball, s, rng):
    """One exit point of the jump process from ``ball`` started at ``x``.

    The law is the fractional Poisson kernel of the ball; draws land strictly
    outside.  ``ball`` is (center, radius); ``rng`` a numpy Generator.
    """
    center, radius = ball
    center = np.asarray(center, dtype=float)
    x = np.asarray(x, dtype=float).reshape(center.shape)
    if not (S_MIN <= s <= 1.0 - S_MIN):
        raise DomainError("s out of operator range")
    if np.linalg.norm(x - center) >= radius:
        raise DomainError("start point must lie strictly inside the ball")
    y = _exit_batch((x - center) / radius, s, 1, rng)
    return center + radius * y[0]


# ---------------------------------------------------------------------------
# Dirichlet solver

def _reduce_blocks(payoff_blocks):
    flat_sums = [math.fsum(p) for p in payoff_blocks]
    n_eff = sum(len(p) for p in payoff_blocks)
    if n_eff == 0:
        return float("nan"), float("nan"), 0
    mean = math.fsum(flat_sums) / n_eff
    sq = math.fsum(math.fsum((v - mean) ** 2 for v in p) for p in payoff_blocks)
    if n_eff > 1:
        stderr = math.sqrt(sq / (n_eff - 1) / n_eff)
    else:
        stderr = float("nan")
    return mean, stderr, n_eff


def mc_solve_dirichlet(g, config, x, *, sample_sink=None):
    """E[g at the domain-exit point | start at x], with standard error.

    On a ball the exit is sampled exactly in one shot.  On a box or union the
    walk chains centered inscribed-ball exits; walks still inside after
    ``max_jumps`` are excluded from the mean and counted in
    ``truncated_walks``.

    ``sample_sink(block_index, payoffs)`` receives each block's payoff array
    as it is produced (possibly from worker threads, in any order).
    """
    dom = config.domain
    if dom is None:
        raise UsageError("config.domain is required")
    if not isinstance(g, ScalarField):
        raise UsageError("exterior datum must be a ScalarField")
    if g.dim != dom.dim:
        raise UsageError(f"datum dim {g.dim} != domain dim {dom.dim}")
    x = np.asarray(x, dtype=float).reshape(dom.dim)
    r0 = float(dom.inscribed_radius(x[None, :])[0])
    if r0 <= 0:
        raise DomainError("start point must lie inside the domain")
    if r0 < 1e-9:
        raise DomainError("inscribed-ball radius below 1e-9 at the start "
                          "point; geometry too tight for the walk")
    s = config.s
    n_blocks = -(-config.n_samples // BLOCK)

    one_shot = isinstance(dom, BallDomain)
    if one_shot:
        center = np.asarray(dom.center)
        x_rel = (x - center) / dom.radius

    def run_block(b):
        rng = _block_rng(config.seed, b)
        m = min(BLOCK, config.n_samples - b * BLOCK)
        if one_shot:
            pts = center + dom.radius * _exit_batch(x_rel, s, m, rng)
            vals = g(pts)
            if sample_sink is not None:
                sample_sink(b, np.asarray(vals, dtype=float))
            return list(vals), 0
        pos = np.tile(x, (m, 1))
        inside = np.ones(m, dtype=bool)
        stuck = np.zeros(m, dtype=bool)
        for _ in range(config.max_jumps):
            idx = np.nonzero(inside)[0]
            if len(idx) == 0:
                break
            rad = dom.inscribed_radius(pos[idx])
            creep = rad < 1e-9
            if np.any(creep):
                # heavy-tail landings can graze the boundary from inside;
                # such walks cannot be continued and count as truncated
                stuck[idx[creep]] = True
                inside[idx[creep]] = False
                idx, rad = idx[~creep], rad[~creep]
                if len(idx) == 0:
                    continue
            pos[idx] += rad[:, None] * _exit_centered(dom.dim, s, len(idx), rng)
            inside[idx] = _contains(dom, pos[idx])
        done = ~inside & ~stuck
        vals = g(pos[done])
        if sample_sink is not None:
            sample_sink(b, np.asarray(vals, dtype=float))
        return list(vals), int(inside.sum() + stuck.sum())

    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        results = list(ex.map(run_block, range(n_blocks)))
    payoffs = [r[0] for r in results]
    truncated = sum(r[1] for r in results)
    mean, stderr, n_eff = _reduce_blocks(payoffs)
    return McEstimate(mean, stderr, n_eff, truncated)


# ---------------------------------------------------------------------------
# generator view

_GEN_SCALE_CACHE: dict = {}


def generator_check(field, x, s, t_values, config):
    """(t, estimate, stderr) rows for (1/t) E[u(x) - u(x + X_t)].

    X_t = t^{1/(2s)} Z with Z a standard isotropic 2s-stable draw;
    antithetic +-Z pairs cancel the odd fluctuation.  The rows converge
    linearly in t to the operator value; ``extrapolate_generator`` fits the
    line.  Estimates carry the frozen per-(n, s) calibration factor.
    """
    if not isinstance(field, ScalarField):
        raise UsageError("field must be a ScalarField")
    if isinstance(field.decay, PowerDecay) and field.decay.p < 0:
        raise PreconditionError("generator sampling needs a bounded field")
    x = np.asarray(x, dtype=float).reshape(field.dim)
    if not (S_MIN <= s <= 1.0 - S_MIN):
        raise DomainError("s out of operator range")
    ts = [float(t) for t in t_values]
    if any(t <= 0 for t in ts):
        raise DomainError("generator times must be positive")
    scale = generator_scale(field.dim, s)
    return [_generator_row(field, x, s, t, config, scale) for t in ts]


def _generator_row(field, x, s, t, config, scale):
    from .stable import isotropic_stable
    n = field.dim
    ux = float(field(x[None, :])[0])
    step = t ** (1.0 / (2.0 * s))
    n_blocks = -(-config.n_samples // BLOCK)

    def run_block(b):
        rng = _block_rng(config.seed, b)
        m = min(BLOCK, config.n_samples - b * BLOCK)
        Z = isotropic_stable(n, s, m, rng)
        up = field(x[None, :] + step * Z)
        um = field(x[None, :] - step * Z)
        return list((ux - 0.5 * (up + um)) / t)

    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        payoffs = list(ex.map(run_block, range(n_blocks)))
    mean, stderr, _n = _reduce_blocks(payoffs)
    return (t, scale * mean, scale * stderr)


def extrapolate_generator(rows):
    """Weighted polynomial fit in t of generator rows; returns (value, stderr).

    The rows converge to the operator value with an expansion in integer
    powers of t, so the fit is affine for 2-3 rows and quadratic from 4 rows
    up (the curvature term otherwise biases the intercept near zeros of the
    operator value).  The intercept's standard error comes from the weighted
    normal equations.
    """
    if len(rows) < 2:
        raise UsageError("need at least two t values to extrapolate")
    t = np.array([r[0] for r in rows])
    v = np.array([r[1] for r in rows])
    se = np.array([max(r[2], 1e-300) for r in rows])
    W = 1.0 / se ** 2
    cols = [np.ones_like(t), t] + ([t * t] if len(rows) >= 4 else [])
    A = np.stack(cols, axis=1)
    M = (A * W[:, None]).T @ A
    rhs = (A * W[:, None]).T @ v
    cov = np.linalg.inv(M)
    coef = cov @ rhs
    return float(coef[0]), float(math.sqrt(cov[0, 0]))


def generator_scale(n, s):
    """Frozen calibration factor tying the sampled process to the operator.

    The standard 2s-stable law already matches the Fourier-multiplier
    normalization, so the factor is 1 up to Monte Carlo noise; it is measured
    once per (n, s) against the singular-integral value on the gaussian and
    cached.
    """
    key = (int(n), round(float(s), 12))
    if key not in _GEN_SCALE_CACHE:
        from .fields import gaussian_field
        g = gaussian_field(n)
        x0 = np.zeros(n)
        ref = frac_lap_point(g, x0, s).value
        cfg = McConfig(seed=20061001, n_samples=400_000)
        rows = [_generator_row(g, x0, s, t, cfg, 1.0)
                for t in (0.3, 0.2, 0.15, 0.1, 0.075, 0.05)]
        # quadratic weighted fit: the affine model's curvature bias would
        # otherwise leak into every calibrated estimate
        t = np.array([r[0] for r in rows])
        v = np.array([r[1] for r in rows])
        W = 1.0 / np.array([r[2] for r in rows]) ** 2
        A = np.stack([np.ones_like(t), t, t * t], axis=1)
        coef = np.linalg.solve((A * W[:, None]).T @ A, (A * W[:, None]).T @ v)
        raw = float(coef[0])
        if not (0.8 * ref < raw < 1.25 * ref):
            raise ConvergenceFailure(
                f"generator calibration off by more than 25% (raw {raw}, "
                f"reference {ref})")
        _GEN_SCALE_CACHE[key] = ref / raw
    return _GEN_SCALE_CACHE[key]
