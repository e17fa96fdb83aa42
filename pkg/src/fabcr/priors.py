"""Prior catalog for the Gaussian-mean problem.

Each model is a normal likelihood y ~ N(theta, sigma^2) paired with a prior
on theta located at ``loc`` (default 0). The model exposes the log-marginal
likelihood l(y) = log f(y), its derivative, the posterior mean (the focal
point of the confidence regions), and the tail classification
f(y) ~ gamma * |y|^(-delta) * exp(-kappa |y| / sigma) that governs the
large-|y| behaviour of the regions.

Catalog:

==============  ======================================  ==================
kind            prior on theta                          tail (kappa, delta)
==============  ======================================  ==================
flat            improper Lebesgue                       (0, 0)
flat+atom       improper flat + point mass at loc       (0, 0)
gaussian        N(loc, tau^2), tau free                 gaussian (excluded)
bp              normal scale mixture, BetaPrime(a, b)   (0, 2a+1)
horseshoe       bp with a = b = 1/2                     (0, 2)
gpd             bp with a = 1/2, b = 1                  (0, 2)
bessel          bp with a = 1, b = 1/2                  (0, 3)
laplace         double exponential, rate kappa/sigma    (kappa, 0)
==============  ======================================  ==================

The prior scale of every kind except ``gaussian`` (free tau) and
``flat+atom`` is tied to sigma, giving the model a clean scale-family
structure in sigma.
"""

import math
from dataclasses import dataclass
from typing import Optional

from fabcr import _core
from fabcr.errors import DomainError, SpecParseError

_SQRTPI = math.sqrt(math.pi)

KINDS = ("flat", "flat+atom", "gaussian", "bp", "horseshoe", "gpd", "bessel",
         "laplace")

_KIND_CODE = {
    "flat": _core.KIND_FLAT,
    "flat+atom": _core.KIND_FLAT_ATOM,
    "gaussian": _core.KIND_GAUSSIAN,
    "bp": _core.KIND_BETAPRIME,
    "horseshoe": _core.KIND_HORSESHOE,
    "gpd": _core.KIND_GPD,
    "bessel": _core.KIND_BESSEL,
    "laplace": _core.KIND_LAPLACE,
}

# (a, b) of the named beta-prime special cases
_BP_ALIAS = {"horseshoe": (0.5, 0.5), "gpd": (0.5, 1.0), "bessel": (1.0, 0.5)}


@dataclass(frozen=True)
class TailProfile:
    """Asymptotic marginal tail f(y) ~ gamma * |y|^(-delta) * exp(-kappa|y|/sigma)."""
    kappa: float
    delta: float
    gamma: float


@dataclass(frozen=True)
class PriorModel:
    kind: str
    sigma: float = 1.0
    loc: float = 0.0
    tau: Optional[float] = None     # gaussian; None means tied to sigma
    a: Optional[float] = None       # bp
    b: Optional[float] = None       # bp
    kappa: Optional[float] = None   # laplace
    gamma: Optional[float] = None   # flat+atom

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecParseError("unknown prior kind %r (choose from %s)"
                                 % (self.kind, ", ".join(KINDS)))
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError("sigma must be positive, got %r" % (self.sigma,))
        if not math.isfinite(self.loc):
            raise DomainError("loc must be finite, got %r" % (self.loc,))
        if self.kind == "gaussian":
            if self.tau is not None and not (math.isfinite(self.tau) and self.tau > 0):
                raise DomainError("gaussian prior: tau must be positive, got %r"
                                  % (self.tau,))
        elif self.kind == "bp":
            if self.a is None or self.b is None:
                raise SpecParseError("bp prior requires shapes a and b")
            if not (self.a > 0 and self.b > 0):
                raise DomainError("bp prior: shapes must be positive, got a=%r b=%r"
                                  % (self.a, self.b))
        elif self.kind == "laplace":
            if self.kappa is None or not (math.isfinite(self.kappa) and self.kappa > 0):
                raise DomainError("laplace prior: kappa must be positive, got %r"
                                  % (self.kappa,))
        elif self.kind == "flat+atom":
            if self.gamma is None or not (math.isfinite(self.gamma) and self.gamma > 0):
                raise DomainError("flat+atom prior: gamma must be positive, got %r"
                                  % (self.gamma,))

    # -- kernel plumbing ---------------------------------------------------

    def _kernel_args(self):
        """(kind_code, p1, p2, sigma) for the kernel backend."""
        code = _KIND_CODE[self.kind]
        if self.kind == "gaussian":
            return code, (self.sigma if self.tau is None else self.tau), 0.0, self.sigma
        if self.kind == "bp":
            return code, self.a, self.b, self.sigma
        if self.kind == "laplace":
            return code, self.kappa, 0.0, self.sigma
        if self.kind == "flat+atom":
            return code, self.gamma, 0.0, self.sigma
        return code, 0.0, 0.0, self.sigma

    def _shift(self, y):
        if not math.isfinite(y):
            raise DomainError("y must be finite, got %r" % (y,))
        return float(y) - self.loc

    # -- public surface ----------------------------------------------------

    @property
    def scale_tied(self):
        """True when the prior scale is tied to sigma (scale-family kinds)."""
        if self.kind == "gaussian":
            return self.tau is None
        return self.kind != "flat+atom"

    @property
    def symmetric(self):
        """All catalog priors are symmetric about loc."""
        return True

    def log_marginal(self, y):
        code, p1, p2, s = self._kernel_args()
        return _core.log_marginal(code, p1, p2, s, self._shift(y))

    def dlog_marginal(self, y):
        code, p1, p2, s = self._kernel_args()
        return _core.dlog_marginal(code, p1, p2, s, self._shift(y))

    def posterior_mean(self, y):
        code, p1, p2, s = self._kernel_args()
        return self.loc + _core.posterior_mean(code, p1, p2, s, self._shift(y))

    def tail_profile(self):
        """TailProfile of the marginal, or None for the Gaussian prior
        (its tail is Gaussian; the bounded-region asymptotics do not apply)."""
        if self.kind == "gaussian":
            return None
        if self.kind == "flat":
            return TailProfile(kappa=0.0, delta=0.0, gamma=1.0)
        if self.kind == "flat+atom":
            return TailProfile(kappa=0.0, delta=0.0, gamma=self.gamma)
        if self.kind == "laplace":
            k = self.kappa
            return TailProfile(kappa=k, delta=0.0,
                               gamma=k / (2.0 * self.sigma) * math.exp(0.5 * k * k))
        a, b = _BP_ALIAS.get(self.kind, (self.a, self.b))
        g = (math.gamma(a + 0.5) * (2.0 * self.sigma ** 2) ** a
             / (_SQRTPI * math.exp(_core.log_beta(a, b))))
        return TailProfile(kappa=0.0, delta=2.0 * a + 1.0, gamma=g)

    def with_sigma(self, sigma):
        """Same prior family rebuilt at a different likelihood scale."""
        return PriorModel(kind=self.kind, sigma=float(sigma), loc=self.loc,
                          tau=self.tau, a=self.a, b=self.b, kappa=self.kappa,
                          gamma=self.gamma)

    def spec_string(self):
        """Canonical plain-text spec, parseable by parse_prior."""
        parts = []
        if self.kind == "gaussian" and self.tau is not None:
            parts.append("tau=%.17g" % self.tau)
        elif self.kind == "bp":
            parts.append("a=%.17g" % self.a)
            parts.append("b=%.17g" % self.b)
        elif self.kind == "laplace":
            parts.append("kappa=%.17g" % self.kappa)
        elif self.kind == "flat+atom":
            parts.append("gamma=%.17g" % self.gamma)
        if self.loc != 0.0:
            parts.append("loc=%.17g" % self.loc)
        if parts:
            return "%s:%s" % (self.kind, ",".join(parts))
        return self.kind


def parse_prior(spec, sigma=1.0):
    """Build a PriorModel from a plain-text spec string.

    Examples: "flat", "horseshoe", "bp:a=1,b=0.5", "laplace:kappa=2",
    "gaussian:tau=1", "gaussian" (tau tied to sigma), "flat+atom:gamma=0.1".
    An optional "loc=<value>" entry shifts the prior location.
    """
    if not isinstance(spec, str) or not spec.strip():
        raise SpecParseError("empty prior spec")
    head, _, tail = spec.strip().partition(":")
    kind = head.strip().lower()
    if kind not in KINDS:
        raise SpecParseError("unknown prior kind %r in spec %r (choose from %s)"
                             % (kind, spec, ", ".join(KINDS)))
    kv = {}
    if tail.strip():
        for item in tail.split(","):
            key, eq, val = item.partition("=")
            key = key.strip().lower()
            if not eq or not key:
                raise SpecParseError("malformed parameter %r in prior spec %r"
                                     % (item, spec))
            try:
                kv[key] = float(val)
            except ValueError:
                raise SpecParseError("non-numeric value %r for %r in prior spec %r"
                                     % (val.strip(), key, spec)) from None
    allowed = {"flat": set(), "flat+atom": {"gamma"}, "gaussian": {"tau"},
               "bp": {"a", "b"}, "horseshoe": set(), "gpd": set(),
               "bessel": set(), "laplace": {"kappa"}}[kind] | {"loc"}
    extra = set(kv) - allowed
    if extra:
        raise SpecParseError("unexpected parameter(s) %s for prior kind %r"
                             % (", ".join(sorted(extra)), kind))
    return PriorModel(kind=kind, sigma=float(sigma), loc=kv.get("loc", 0.0),
                      tau=kv.get("tau"), a=kv.get("a"), b=kv.get("b"),
                      kappa=kv.get("kappa"), gamma=kv.get("gamma"))
