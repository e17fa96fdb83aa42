"""Shared fixtures and independent oracles for the test suite."""

import mpmath as mp

from fabcr.priors import parse_prior

# one representative model per prior kind
CATALOG_SPECS = (
    "flat",
    "flat+atom:gamma=0.5",
    "gaussian:tau=1",
    "bp:a=1.5,b=2",
    "horseshoe",
    "gpd",
    "bessel",
    "laplace:kappa=1",
)

# named beta-prime specializations and the (a, b) shapes they alias
BP_SPECIAL = (("horseshoe", 0.5, 0.5), ("gpd", 0.5, 1.0), ("bessel", 1.0, 0.5))


def quad_log_marginal(spec, y, sigma=1.0, dps=30):
    """Log-marginal by adaptive quadrature in mpmath, fully independent of
    the package kernels. The beta-prime kinds are integrated in their
    scale-mixture form: theta | t ~ N(0, sigma^2 t) with the variance factor
    t ~ BetaPrime(b, a)."""
    model = parse_prior(spec, sigma=sigma)
    with mp.workdps(dps):
        s = mp.mpf(model.sigma)
        yy = mp.mpf(y) - mp.mpf(model.loc)

        def phi(t, mu, sd):
            return mp.exp(-((t - mu) / sd) ** 2 / 2) / (sd * mp.sqrt(2 * mp.pi))

        kind = model.kind
        if kind == "flat":
            return 0.0
        if kind == "flat+atom":
            return float(mp.log(mp.mpf(model.gamma) + phi(yy, 0, s)))
        if kind == "gaussian":
            tau = mp.mpf(model.sigma if model.tau is None else model.tau)
            return float(mp.log(phi(yy, 0, mp.sqrt(s * s + tau * tau))))
        if kind == "laplace":
            rate = mp.mpf(model.kappa) / s

            def integrand(t):
                return phi(yy, t, s) * rate / 2 * mp.exp(-rate * abs(t))

            pts = sorted({mp.mpf(0), yy})
            return float(mp.log(mp.quad(integrand, [-mp.inf] + pts + [mp.inf])))
        ab = {"horseshoe": (0.5, 0.5), "gpd": (0.5, 1.0),
              "bessel": (1.0, 0.5)}.get(kind, (model.a, model.b))
        a, b = mp.mpf(ab[0]), mp.mpf(ab[1])

        def integrand(t):
            dens = t ** (b - 1) * (1 + t) ** (-a - b) / mp.beta(a, b)
            return phi(yy, 0, s * mp.sqrt(1 + t)) * dens

        return float(mp.log(mp.quad(integrand, [0, 1, 10, 1e3, 1e6, mp.inf])))
