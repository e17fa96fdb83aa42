"""Confidence regions for a normal mean, shortest near a prior focal point.

For y ~ N(theta0, sigma^2) the acceptance interval at theta0 splits the error
budget alpha between the tails with a weight w solving the equal-ordinate
condition on the log-likelihood ratio

    lam_theta0(y) = l(y) + (y - theta0)^2 / (2 sigma^2)   (up to constants),

where l is the prior's log-marginal likelihood. Inverting the family of
acceptance intervals over theta0 yields a region with exact coverage whose
smallest member across all levels is the posterior mean (the focal point).
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from fabcr import _core
from fabcr.errors import DomainError, NumericalError, RegionBoundError
from fabcr.priors import PriorModel

_ENDPOINT_TOL = 1e-8


def _check_alpha(alpha):
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must be in (0,1), got %r" % (alpha,))
    return alpha


@dataclass(frozen=True)
class AcceptanceInterval:
    theta0: float
    w: float
    lo: float
    hi: float
    alpha: float

    def contains(self, y):
        return self.lo <= y <= self.hi


@dataclass(frozen=True)
class ConfidenceRegion:
    """Union of closed intervals in theta, sorted and disjoint."""
    intervals: Tuple[Tuple[float, float], ...]
    alpha: float
    focal: float
    y: float
    prior_spec: str
    multiple_components: bool = False

    def contains(self, theta):
        return any(lo <= theta <= hi for lo, hi in self.intervals)

    @property
    def width(self):
        return sum(hi - lo for lo, hi in self.intervals)

    @property
    def lo(self):
        return self.intervals[0][0]

    @property
    def hi(self):
        return self.intervals[-1][1]

    def to_json(self):
        return json.dumps({
            "prior": self.prior_spec,
            "y": self.y,
            "alpha": self.alpha,
            "focal": self.focal,
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "multiple_components": self.multiple_components,
        })

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(intervals=tuple((lo, hi) for lo, hi in d["intervals"]),
                   alpha=d["alpha"], focal=d["focal"], y=d["y"],
                   prior_spec=d["prior"],
                   multiple_components=d["multiple_components"])


@dataclass(frozen=True)
class PValueCurve:
    grid: Tuple[float, ...]
    pvals: Tuple[float, ...]
    y: float

    def write_csv(self, stream):
        stream.write("theta0,pvalue\n")
        for t, p in zip(self.grid, self.pvals):
            stream.write("%.17g,%.17g\n" % (t, p))


class _DegenerateWeight(Exception):
    """The spending weight is closer to 0/1 than double precision resolves
    (Gaussian prior far from its location); use the cutoff formulation."""


def _solve(model: PriorModel, theta0, alpha):
    """Kernel weight solve in prior-centred coordinates; returns (w, lo, hi)
    back in the original parameterization."""
    code, p1, p2, s = model._kernel_args()
    t0 = theta0 - model.loc
    w, lo, hi = _core.weight_solve(code, p1, p2, s, t0, alpha)
    if w <= 1e-8 or w >= 1.0 - 1e-8:
        # the solver resolves w only to ~1e-13 absolute, so this close to the
        # boundary the implied interval endpoint gets noisy; the cutoff
        # formulation stays well-conditioned there
        raise _DegenerateWeight(theta0, alpha, w)
    return w, lo + model.loc, hi + model.loc


# -- cutoff (Neyman-Pearson) formulation, used when w degenerates ----------
#
# The acceptance set is {t : lam(t) <= k} with lam(t) = l(t) +
# (t - theta0)^2 / (2 sigma^2), a strictly convex function whose minimiser
# y* satisfies posterior_mean(y*) = theta0. Membership of y only needs the
# null mass of the sublevel set at k = lam(y), which stays well-conditioned
# when the tail weight underflows.

def _lam(model, theta0, y):
    d = y - theta0
    return model.log_marginal(y) + d * d / (2.0 * model.sigma ** 2)


def _lam_minimizer(model, theta0):
    """Solve posterior_mean(t) = theta0 (the minimiser of lam)."""
    if model.kind == "gaussian":
        tau = model.sigma if model.tau is None else model.tau
        return model.loc + (theta0 - model.loc) * \
            (model.sigma ** 2 + tau ** 2) / tau ** 2
    lo = hi = theta0
    step = model.sigma
    for _ in range(200):
        if model.posterior_mean(lo) <= theta0:
            break
        lo -= step
        step *= 2.0
    step = model.sigma
    for _ in range(200):
        if model.posterior_mean(hi) >= theta0:
            break
        hi += step
        step *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if model.posterior_mean(mid) < theta0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * model.sigma:
            break
    return 0.5 * (lo + hi)


def _lam_root(model, theta0, level, start, direction):
    """Root of lam(t) = level marching from `start` (where lam < level)."""
    if model.kind == "gaussian":
        # lam is an explicit quadratic: solve it directly
        s2 = model.sigma ** 2
        tau = model.sigma if model.tau is None else model.tau
        v = s2 + tau * tau
        mu, t0 = model.loc, theta0 - model.loc
        a = 0.5 / s2 - 0.5 / v
        b = -t0 / s2
        c0 = t0 * t0 / (2.0 * s2) - 0.5 * math.log(2.0 * math.pi * v) - level
        disc = b * b - 4.0 * a * c0
        if disc < 0.0:
            raise NumericalError("lam level below its minimum", theta0=theta0,
                                 level=level, prior=model.spec_string())
        root = (-b + direction * math.sqrt(disc)) / (2.0 * a)
        return mu + root
    step = model.sigma
    inner = start
    outer = start + direction * step
    for _ in range(300):
        if _lam(model, theta0, outer) >= level:
            break
        inner = outer
        step *= 2.0
        outer = start + direction * step
    else:
        raise NumericalError("lam level-set root not bracketed",
                             theta0=theta0, level=level,
                             prior=model.spec_string())
    for _ in range(200):
        mid = 0.5 * (inner + outer)
        if _lam(model, theta0, mid) < level:
            inner = mid
        else:
            outer = mid
        if abs(outer - inner) < 1e-11 * model.sigma:
            break
    return 0.5 * (inner + outer)


def _sublevel_mass(model, theta0, level, ystar):
    a = _lam_root(model, theta0, level, ystar, -1.0)
    b = _lam_root(model, theta0, level, ystar, +1.0)
    s = model.sigma
    return (_core.norm_cdf((b - theta0) / s)
            - _core.norm_cdf((a - theta0) / s)), a, b


def _np_member(model, theta0, alpha, y):
    ystar = _lam_minimizer(model, theta0)
    level = _lam(model, theta0, y)
    if _lam(model, theta0, ystar) >= level:
        return True  # y is (numerically) the minimiser itself
    mass, _, _ = _sublevel_mass(model, theta0, level, ystar)
    return mass <= 1.0 - alpha + 1e-12


def _np_interval(model, theta0, alpha):
    """Acceptance bounds via bisection on the cutoff level."""
    ystar = _lam_minimizer(model, theta0)
    base = _lam(model, theta0, ystar)
    lo_k, hi_k = base, base + 1.0
    for _ in range(200):
        mass, a, b = _sublevel_mass(model, theta0, hi_k, ystar)
        if mass >= 1.0 - alpha:
            break
        lo_k = hi_k
        hi_k = base + 2.0 * (hi_k - base)
    for _ in range(200):
        mid = 0.5 * (lo_k + hi_k)
        mass, a, b = _sublevel_mass(model, theta0, mid, ystar)
        if mass < 1.0 - alpha:
            lo_k = mid
        else:
            hi_k = mid
        if hi_k - lo_k < 1e-13 * max(1.0, abs(hi_k)):
            break
    mass, a, b = _sublevel_mass(model, theta0, hi_k, ystar)
    w = _core.norm_cdf((a - theta0) / model.sigma) / alpha
    return w, a, b


def weight(model: PriorModel, theta0, alpha):
    """Spending weight w in (0,1): the share of alpha put in the lower tail
    of the acceptance interval at theta0."""
    alpha = _check_alpha(alpha)
    try:
        w, _, _ = _solve(model, float(theta0), alpha)
    except _DegenerateWeight:
        w, _, _ = _np_interval(model, float(theta0), alpha)
    return w


def acceptance_interval(model: PriorModel, theta0, alpha):
    alpha = _check_alpha(alpha)
    theta0 = float(theta0)
    try:
        w, lo, hi = _solve(model, theta0, alpha)
    except _DegenerateWeight:
        w, lo, hi = _np_interval(model, theta0, alpha)
    return AcceptanceInterval(theta0=theta0, w=w, lo=lo, hi=hi, alpha=alpha)


def focal_point(model: PriorModel, y):
    """Posterior mean of theta given y: the one point inside the region at
    every confidence level."""
    return model.posterior_mean(y)


def _membership(model, theta0, alpha, y):
    try:
        _, lo, hi = _solve(model, theta0, alpha)
    except _DegenerateWeight:
        return _np_member(model, theta0, alpha, y), None, None
    return lo <= y <= hi, lo, hi


def _search_cap(model, y):
    prof = model.tail_profile()
    kappa = prof.kappa if prof is not None else 0.0
    return abs(y) + 50.0 * model.sigma * max(1.0, kappa)


def _bracket_endpoint(model, y, alpha, start, direction, cap):
    """March from an interior point `start` in +-1 direction until membership
    is lost, then bisect the boundary to absolute tolerance 1e-8."""
    sigma = model.sigma
    step = sigma
    inside = start
    while True:
        cand = inside + direction * step
        if abs(cand - model.loc) > cap:
            cand = model.loc + direction * cap
        member, _, _ = _membership(model, cand, alpha, y)
        if not member:
            outside = cand
            break
        inside = cand
        if abs(cand - model.loc) >= cap:
            raise RegionBoundError(
                "region endpoint search exhausted its range: region may be "
                "open-ended", y=y, alpha=alpha, direction=direction, cap=cap,
                prior=model.spec_string())
        step *= 2.0
    while abs(outside - inside) > _ENDPOINT_TOL:
        mid = 0.5 * (inside + outside)
        member, _, _ = _membership(model, mid, alpha, y)
        if member:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def confidence_region(model: PriorModel, y, alpha, scan_step=None):
    """Region {theta0 : lo(theta0) <= y <= hi(theta0)}, endpoints to 1e-8.

    Default mode brackets outward from the focal point and returns a single
    interval. Passing ``scan_step`` enables a diagnostic dense scan of the
    membership function; if the scan detects disconnected components, the
    union is returned and ``multiple_components`` is set.
    """
    alpha = _check_alpha(alpha)
    y = float(y)
    if not math.isfinite(y):
        raise DomainError("y must be finite, got %r" % (y,))
    focal = model.posterior_mean(y)
    member, lo0, hi0 = _membership(model, focal, alpha, y)
    if not member:
        # allow only solve-tolerance slack before declaring failure
        slack = 1e-7 * model.sigma
        if lo0 is None or not (lo0 - slack <= y <= hi0 + slack):
            raise NumericalError("focal point not in its own region",
                                 y=y, alpha=alpha, focal=focal,
                                 prior=model.spec_string())
    cap = _search_cap(model, y)

    if scan_step is not None:
        return _scan_region(model, y, alpha, focal, cap, float(scan_step))

    left = _bracket_endpoint(model, y, alpha, focal, -1.0, cap)
    right = _bracket_endpoint(model, y, alpha, focal, +1.0, cap)
    return ConfidenceRegion(intervals=((left, right),), alpha=alpha,
                            focal=focal, y=y, prior_spec=model.spec_string())


def _scan_region(model, y, alpha, focal, cap, step):
    lo_grid = model.loc - cap
    n = max(2, int(math.ceil(2.0 * cap / step)) + 1)
    members = []
    for i in range(n):
        t = lo_grid + i * step
        m, _, _ = _membership(model, t, alpha, y)
        members.append(m)
    comps = []
    start = None
    for i, m in enumerate(members):
        if m and start is None:
            start = i
        elif not m and start is not None:
            comps.append((start, i - 1))
            start = None
    if start is not None:
        comps.append((start, n - 1))
    if not comps:
        raise NumericalError("dense scan found an empty region", y=y,
                             alpha=alpha, prior=model.spec_string())
    intervals = []
    for i0, i1 in comps:
        a = lo_grid + i0 * step
        b = lo_grid + i1 * step
        # refine the outer boundaries of each component
        if i0 > 0:
            a = _refine_down(model, y, alpha, a, a - step)
        if i1 < n - 1:
            b = _refine_up(model, y, alpha, b, b + step)
        intervals.append((a, b))
    return ConfidenceRegion(intervals=tuple(intervals), alpha=alpha,
                            focal=focal, y=y, prior_spec=model.spec_string(),
                            multiple_components=len(intervals) > 1)


def _refine_down(model, y, alpha, inside, outside):
    while abs(outside - inside) > _ENDPOINT_TOL:
        mid = 0.5 * (inside + outside)
        m, _, _ = _membership(model, mid, alpha, y)
        if m:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def _refine_up(model, y, alpha, inside, outside):
    return _refine_down(model, y, alpha, inside, outside)


def p_value_curve(model: PriorModel, y, grid):
    """p_y(theta0) = sup {alpha : theta0 in C_alpha(y)}, by bisection on
    alpha (tolerance 1e-6) using direct membership tests."""
    y = float(y)
    pvals = []
    for theta0 in grid:
        theta0 = float(theta0)
        a_lo, a_hi = 1e-9, 1.0 - 1e-9
        m_lo, _, _ = _membership(model, theta0, a_lo, y)
        if not m_lo:
            pvals.append(0.0)
            continue
        m_hi, _, _ = _membership(model, theta0, a_hi, y)
        if m_hi:
            pvals.append(1.0)
            continue
        while a_hi - a_lo > 1e-6:
            mid = 0.5 * (a_lo + a_hi)
            m, _, _ = _membership(model, theta0, mid, y)
            if m:
                a_lo = mid
            else:
                a_hi = mid
        pvals.append(0.5 * (a_lo + a_hi))
    return PValueCurve(grid=tuple(float(t) for t in grid),
                       pvals=tuple(pvals), y=y)


def z_interval(y, sigma, alpha):
    """Classical equal-tailed interval y +- sigma * Phi^-1(1 - alpha/2)."""
    alpha = _check_alpha(alpha)
    half = sigma * _core.norm_quantile(1.0 - 0.5 * alpha)
    return (y - half, y + half)
