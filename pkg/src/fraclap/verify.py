"""Property-suite checks: maximum principle, Harnack behaviour, regularity.

Each check returns a Report -- a plain, timestamp-free record of what was
measured against what bar, so runs are bitwise reproducible and the CLI can
serialize them directly.  Quantities the underlying estimates do not pin
down (Harnack constants, Schauder constants) are reported, not asserted;
the verdict "reported" marks exactly those.
"""

from dataclasses import dataclass

import numpy as np

from .ball import BallProblem, solve_homogeneous
from .errors import PreconditionError, UsageError
from .fields import (CINF, Bounded, CompactSupport, ScalarField, as_points,
                     bump_field, gaussian_field)
from .pointwise import frac_lap_point

__all__ = ["Report", "check_max_principle", "check_harnack",
           "check_regularity_estimates", "run_all"]


@dataclass(frozen=True)
class Report:
    check_name: str
    inputs: dict
    measured: tuple          # of (label, value) pairs
    threshold: object        # numeric bar, or the string "reported-only"
    verdict: str             # "pass" | "fail" | "reported"

    def __post_init__(self):
        if self.verdict not in ("pass", "fail", "reported"):
            raise ValueError(f"unknown verdict {self.verdict!r}")

    def as_dict(self):
        def _plain(v):
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, np.ndarray):
                return [_plain(x) for x in v]
            if isinstance(v, (list, tuple)):
                return [_plain(x) for x in v]
            return v

        return {"check_name": self.check_name,
                "inputs": {k: _plain(v) for k, v in sorted(self.inputs.items())},
                "measured": [[lab, _plain(v)] for lab, v in self.measured],
                "threshold": _plain(self.threshold),
                "verdict": self.verdict}


# ---------------------------------------------------------------------------
# maximum principle


def _interior_grid(prob, k=21):
    t = np.linspace(-0.9, 0.9, k) * prob.radius
    if prob.dim == 1:
        return t[:, None]
    pts = np.zeros((k, prob.dim))
    pts[:, 0] = t
    diag = np.full(prob.dim, 0.9 * prob.radius / np.sqrt(prob.dim))
    return np.concatenate([pts, diag[None, :], -diag[None, :]])


def _exterior_samples(prob, k=160):
    rho = prob.radius * (1.0 + np.geomspace(1e-6, 40.0, k))
    if prob.dim == 1:
        return np.concatenate([rho, -rho])[:, None]
    pts = np.zeros((2 * k, prob.dim))
    pts[:k, 0] = rho
    pts[k:, :] = rho[:, None] / np.sqrt(prob.dim)
    return pts


def check_max_principle(prob, points=None):
    """Nonnegative exterior data force a nonnegative s-harmonic interior.

    Sign-changing data leave the theorem's hypothesis unmet, so the check
    reports instead of judging.  Zero data must give the zero solution.
    """
    if prob.f is not None:
        raise UsageError("the maximum principle check is for the "
                         "homogeneous problem (f = None)")
    if points is None:
        points = _interior_grid(prob)
    points = as_points(points, prob.dim)

    g_vals = prob.g(_exterior_samples(prob)) if prob.g is not None else np.zeros(1)
    g_min, g_max = float(np.min(g_vals)), float(np.max(np.abs(g_vals)))
    inputs = {"dim": prob.dim, "radius": prob.radius, "s": prob.s,
              "datum": getattr(prob.g, "name", "zero") if prob.g else "zero",
              "n_points": int(points.shape[0])}

    if g_min < -1e-12 * (1.0 + g_max):
        return Report("max_principle", inputs,
                      (("min_sampled_datum", g_min),),
                      "precondition: exterior datum >= 0", "reported")

    u = np.array([solve_homogeneous(prob, p).value for p in points])
    if prob.g is None or g_max <= 1e-14:
        sup = float(np.max(np.abs(u)))
        return Report("max_principle", inputs,
                      (("sup_abs_u_zero_datum", sup),), 1e-10,
                      "pass" if sup <= 1e-10 else "fail")

    u_min = float(np.min(u))
    return Report("max_principle", inputs,
                  (("min_interior_u", u_min),
                   ("strictly_positive", 1.0 if u_min > 0.0 else 0.0)),
                  -1e-8, "pass" if u_min >= -1e-8 else "fail")


# ---------------------------------------------------------------------------
# Harnack: the refined inequality holds, the naive one fails


def _harnack_windows(prob, x0, r, m):
    """sup/inf of the solution over B_{r/2}(x0) at a pinned resolution m."""
    t = np.linspace(-0.5 * r, 0.5 * r, 17)
    pts = np.tile(np.atleast_1d(x0), (17, 1)).astype(float)
    pts[:, 0] += t
    u = np.array([solve_homogeneous(prob, p, m=m, m_max=m).value for p in pts])
    return float(np.max(u)), float(np.min(u))


def check_harnack(prob=None, epsilon_list=(0.1, 0.05, 0.01)):
    """Two-sided Harnack audit.

    Branch A: with data nonnegative on all of R^n the sup and inf over
    half balls are comparable; the constant is the paper's unknown, so the
    measured ratios are reported and only their stability under doubling
    the solver's series resolution is judged.  Branch B runs the explicit
    failure construction and requires the certified ratio to blow up as
    the error budget shrinks.
    """
    from .density import harnack_failure_demo

    if prob is None:
        g = ScalarField(
            1, lambda P: np.exp(-4.0 * (np.abs(P[:, 0]) - 1.3) ** 2),
            CINF, Bounded(1.0), name="ring_gauss")
        prob = BallProblem(1, 1.0, 0.5, g=g)
    if prob.dim != 1:
        raise UsageError("the Harnack audit is one-dimensional")
    epsilon_list = tuple(sorted(float(e) for e in epsilon_list))[::-1]

    inputs = {"s": prob.s, "datum": getattr(prob.g, "name", "zero"),
              "epsilons": list(epsilon_list)}
    measured = []
    ok = True

    windows = ((0.0, 0.5), (0.3, 0.4), (-0.2, 0.6))
    for x0, r in windows:
        hi1, lo1 = _harnack_windows(prob, x0, r, 64)
        hi2, lo2 = _harnack_windows(prob, x0, r, 128)
        if min(lo1, lo2) <= 0.0:
            ok = False
            measured.append((f"ratio(x0={x0},r={r})", np.inf))
            continue
        ratio1, ratio2 = hi1 / lo1, hi2 / lo2
        drift = abs(ratio2 - ratio1) / ratio2
        measured.append((f"ratio(x0={x0},r={r})", ratio2))
        measured.append((f"ratio_drift(x0={x0},r={r})", drift))
        ok = ok and drift <= 0.10

    ratios = []
    for eps in epsilon_list:
        rep = harnack_failure_demo(eps, prob.s)
        if rep.verdict == "reported":
            return Report("harnack", inputs,
                          tuple(measured) + (("failure_demo_eps", eps),),
                          "approximation failure in the demo", "reported")
        vals = dict(rep.measured)
        ratios.append(vals["certified_ratio"])
        measured.append((f"failure_ratio(eps={eps})", ratios[-1]))
        measured.append((f"failure_fit_error(eps={eps})",
                         vals["achieved_error"]))
        ok = ok and rep.verdict == "pass"

    growth = ratios[-1] / ratios[0]
    measured.append(("failure_ratio_growth", growth))
    span = epsilon_list[0] / epsilon_list[-1]
    if span >= 5.0:
        ok = ok and growth >= 5.0
    else:
        ok = ok and growth > 1.0

    return Report("harnack", inputs, tuple(measured),
                  "branch A drift <= 10%; branch B ratio grows with 1/eps",
                  "pass" if ok else "fail")


# ---------------------------------------------------------------------------
# regularity: interior Hoelder gain of order 2s, derivative decay in r


def _holder_seminorm(vals, x, beta):
    dx = np.abs(x[:, None] - x[None, :])
    dv = np.abs(vals[:, None] - vals[None, :])
    mask = dx > 0.0
    return float(np.max(dv[mask] / dx[mask] ** beta))


def _seminorm_ratio(field, s, alpha, k):
    x = np.linspace(-1.5, 1.5, k)
    u = field(as_points(x[:, None], 1))
    lap = np.array([frac_lap_point(field, np.array([xi]), s).value for xi in x])
    num = _holder_seminorm(lap, x, alpha - 2.0 * s)
    den = _holder_seminorm(u, x, alpha)
    return num / den


def check_regularity_estimates(fields=None, alpha=1.0, s=0.3):
    """Hoelder gain of the operator plus interior derivative bounds.

    Part 1 measures [(-Delta)^s u]_{alpha-2s} / [u]_{alpha} over a family
    of smooth fields; the constant is reported, its stability under grid
    refinement and its exact invariance under u -> 2u are judged.  Part 2
    solves the Dirichlet problem on balls of growing radius with the same
    unit bump datum and checks max |D^gamma u| over the half ball against
    the r^{-|gamma|} interior-estimate scaling.
    """
    alpha, s = float(alpha), float(s)
    if not (2.0 * s < alpha <= 1.0):
        raise PreconditionError("need alpha in (2s, 1]")
    if fields is None:
        fields = (gaussian_field(1), bump_field(1))

    inputs = {"alpha": alpha, "s": s,
              "fields": [f.name for f in fields]}
    measured = []
    ok = True

    for f in fields:
        r_coarse = _seminorm_ratio(f, s, alpha, 25)
        r_fine = _seminorm_ratio(f, s, alpha, 49)
        drift = abs(r_fine - r_coarse) / r_fine
        measured.append((f"seminorm_ratio[{f.name}]", r_fine))
        measured.append((f"seminorm_drift[{f.name}]", drift))
        ok = ok and np.isfinite(r_fine) and drift <= 0.20

    # scaling audit: doubling u doubles both seminorms, ratio unchanged
    f = fields[0]
    x = np.linspace(-1.5, 1.5, 25)
    u = f(as_points(x[:, None], 1))
    lap = np.array([frac_lap_point(f, np.array([xi]), s).value for xi in x])
    base = (_holder_seminorm(lap, x, alpha - 2.0 * s)
            / _holder_seminorm(u, x, alpha))
    doubled = (_holder_seminorm(2.0 * lap, x, alpha - 2.0 * s)
               / _holder_seminorm(2.0 * u, x, alpha))
    measured.append(("scaling_audit_drift", abs(doubled - base)))
    ok = ok and doubled == base

    # data are scaled copies of one collar bump, so the exact solutions obey
    # u_r(x) = u_1(x/r) and the r^{-|gamma|} law is the entire content of
    # the measurement; a bump at fixed location would conflate the interior
    # estimate with a changing geometry.
    radii = (1.0, 2.0, 4.0)
    cprime = {0: [], 1: [], 2: []}
    for r in radii:
        g = ScalarField(
            1, lambda P, rr=r: np.where(
                np.abs(np.abs(P[:, 0]) - 1.5 * rr) < 0.25 * rr,
                np.exp(1.0 - 1.0 / np.clip(
                    1.0 - ((np.abs(P[:, 0]) - 1.5 * rr) / (0.25 * rr)) ** 2,
                    1e-300, None)), 0.0),
            CINF, CompactSupport(1.75 * r), name=f"collar_bump(r={r})")
        prob = BallProblem(1, r, s, g=g)
        h = 0.02 * r
        grid = np.arange(-0.5 * r, 0.5 * r + 0.5 * h, h)
        u = np.array([solve_homogeneous(prob, np.array([xi])).value
                      for xi in grid])
        d1 = np.gradient(u, h)
        d2 = np.gradient(d1, h)
        for k, vals in ((0, u), (1, d1), (2, d2)):
            cprime[k].append(float(np.max(np.abs(vals))) * r ** k)

    for k in (0, 1, 2):
        vals = cprime[k]
        spread = max(vals) / min(vals)
        measured.append((f"interior_C'(|gamma|={k})", max(vals)))
        measured.append((f"interior_C'_spread(|gamma|={k})", spread))
        ok = ok and spread <= 2.0

    return Report(
        "regularity_estimates", inputs, tuple(measured),
        "ratios stable <= 20%; scaling exact; C' spread <= 2 over r in {1,2,4}",
        "pass" if ok else "fail")


# ---------------------------------------------------------------------------


def run_all(suite="all"):
    """Run the selected property suite; deterministic Report list."""
    if suite not in ("all", "max", "harnack", "regularity"):
        raise UsageError("suite must be all, max, harnack, or regularity")
    reports = []
    if suite in ("all", "max"):
        pos = ScalarField(1, lambda P: np.exp(-(np.abs(P[:, 0]) - 1.6) ** 2),
                          CINF, Bounded(1.0), name="pos_gauss")
        sign = ScalarField(1, lambda P: P[:, 0] * np.exp(-P[:, 0] ** 2),
                           CINF, Bounded(1.0), name="odd_gauss")
        zero = ScalarField(2, lambda P: np.zeros(P.shape[0]), CINF,
                           Bounded(0.0), name="zero")
        reports.append(check_max_principle(BallProblem(1, 1.0, 0.5, g=pos)))
        reports.append(check_max_principle(BallProblem(2, 1.0, 0.3, g=zero)))
        reports.append(check_max_principle(BallProblem(1, 1.0, 0.7, g=sign)))
    if suite in ("all", "harnack"):
        reports.append(check_harnack())
    if suite in ("all", "regularity"):
        reports.append(check_regularity_estimates())
    return reports
