# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cython twin of ``_kernels_py``: same API, compiled hot paths.

Keep in sync with the pure-Python reference; ``tests/test_backends.py``
cross-checks the two implementations.
"""

from libc.math cimport (exp, log, log1p, expm1, sqrt, fabs, erfc, lgamma,
                        tanh, round as c_round, INFINITY, M_PI)


KIND_FLAT = 0
KIND_GAUSSIAN = 1
KIND_BETAPRIME = 2
KIND_LAPLACE = 3
KIND_FLAT_ATOM = 4
KIND_HORSESHOE = 5
KIND_GPD = 6
KIND_BESSEL = 7

cdef double _SQRT2 = sqrt(2.0)
cdef double _SQRT2PI = sqrt(2.0 * M_PI)
cdef double _LOG_SQRT2PI = 0.5 * log(2.0 * M_PI)
cdef double _INV_SQRTPI = 1.0 / sqrt(M_PI)


# ---------------------------------------------------------------------------
# standard normal
# ---------------------------------------------------------------------------

cdef inline double c_norm_pdf(double z) nogil:
    return exp(-0.5 * z * z) / _SQRT2PI


cdef inline double c_norm_cdf(double z) nogil:
    return 0.5 * erfc(-z / _SQRT2)


cdef double c_norm_log_cdf(double z) nogil:
    cdef double zz, s, term
    cdef int k
    if z >= -25.0:
        return log(0.5 * erfc(-z / _SQRT2))
    zz = z * z
    s = 1.0
    term = 1.0
    for k in range(1, 16):
        term *= -(2 * k - 1) / zz
        s += term
        if fabs(term) < 1e-17 * s:
            break
    return -0.5 * zz - _LOG_SQRT2PI - log(-z) + log(s)


cdef double _quantile_approx(double p) nogil:
    cdef double q, r
    if p < 0.02425:
        q = sqrt(-2.0 * log(p))
        return (((((-7.784894002430293e-03 * q - 3.223964580411365e-01) * q
                   - 2.400758277161838e+00) * q - 2.549732539343734e+00) * q
                 + 4.374664141464968e+00) * q + 2.938163982698783e+00) / \
               ((((7.784695709041462e-03 * q + 3.224671290700398e-01) * q
                  + 2.445134137142996e+00) * q + 3.754408661907416e+00) * q + 1.0)
    if p > 0.97575:
        q = sqrt(-2.0 * log(1.0 - p))
        return -(((((-7.784894002430293e-03 * q - 3.223964580411365e-01) * q
                    - 2.400758277161838e+00) * q - 2.549732539343734e+00) * q
                  + 4.374664141464968e+00) * q + 2.938163982698783e+00) / \
               ((((7.784695709041462e-03 * q + 3.224671290700398e-01) * q
                  + 2.445134137142996e+00) * q + 3.754408661907416e+00) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((-3.969683028665376e+01 * r + 2.209460984245205e+02) * r
               - 2.759285104469687e+02) * r + 1.383577518672690e+02) * r
             - 3.066479806614716e+01) * r + 2.506628277459239e+00) * q / \
           (((((-5.447609879822406e+01 * r + 1.615858368580409e+02) * r
               - 1.556989798598866e+02) * r + 6.680131188771972e+01) * r
             - 1.328068155288572e+01) * r + 1.0)


cdef double c_norm_quantile(double p) nogil:
    cdef double x, f, u
    if p > 0.5:
        return -c_norm_quantile(1.0 - p)
    x = _quantile_approx(p)
    f = c_norm_cdf(x) - p
    if f != 0.0:
        u = f / c_norm_pdf(x)
        x -= u / (1.0 + 0.5 * x * u)
    return x


# ---------------------------------------------------------------------------
# Kummer 1F1
# ---------------------------------------------------------------------------

cdef double _KUMMER_TAYLOR_CUTOFF = 45.0


cdef double _kummer_taylor(double a, double b, double z) nogil:
    cdef double term = 1.0, s = 1.0
    cdef int k
    for k in range(2000):
        term *= (a + k) * z / ((b + k) * (k + 1.0))
        s += term
        if fabs(term) < 1e-17 * fabs(s):
            return s
    return s


cdef double _kummer_asymp_neg_log(double a, double b, double z) nogil:
    # log of Gamma(b)/Gamma(b-a) x^(-a) * series, x = -z (positive result
    # assumed, true for b > a > 0)
    cdef double x = -z, s = 1.0, term = 1.0, prev = INFINITY
    cdef int k
    for k in range(200):
        term *= (a + k) * (a - b + 1.0 + k) / ((k + 1.0) * x)
        if fabs(term) >= prev:
            break
        s += term
        prev = fabs(term)
        if fabs(term) < 1e-17 * fabs(s):
            break
    return lgamma(b) - lgamma(b - a) - a * log(x) + log(s)


cdef double c_log_kummer_1f1_neg(double a, double b, double z) nogil:
    if z == 0.0:
        return 0.0
    if -z <= _KUMMER_TAYLOR_CUTOFF:
        return z + log(_kummer_taylor(b - a, b, -z))
    return _kummer_asymp_neg_log(a, b, z)


def kummer_1f1(double a, double b, double z):
    cdef double s, term, prev, lg
    cdef int k
    if z == 0.0:
        return 1.0
    if fabs(z) <= _KUMMER_TAYLOR_CUTOFF:
        if z > 0.0 or b - a <= 0.0:
            return _kummer_taylor(a, b, z)
        return exp(z) * _kummer_taylor(b - a, b, -z)
    if z < 0.0:
        return exp(_kummer_asymp_neg_log(a, b, z))
    # z >> 0 asymptotic
    s = 1.0
    term = 1.0
    prev = INFINITY
    for k in range(200):
        term *= (b - a + k) * (1.0 - a + k) / ((k + 1.0) * z)
        if fabs(term) >= prev:
            break
        s += term
        prev = fabs(term)
        if fabs(term) < 1e-17 * fabs(s):
            break
    lg = lgamma(b) - lgamma(a) + z + (a - b) * log(z)
    if lg > 709.0:
        raise OverflowError("kummer_1f1 overflow: a=%g b=%g z=%g" % (a, b, z))
    return exp(lg) * s


def log_kummer_1f1_neg(double a, double b, double z):
    return c_log_kummer_1f1_neg(a, b, z)


# ---------------------------------------------------------------------------
# Dawson
# ---------------------------------------------------------------------------

cdef double _DAWSON_H = 0.2
cdef int _DAWSON_REACH = 36


cdef double c_dawson(double x) nogil:
    cdef double ax = fabs(x), t, s, xx, d, v, inv2, term
    cdef int n, n0, m, k
    if ax < 1.0:
        t = x
        s = x
        xx = -2.0 * x * x
        for n in range(1, 40):
            t *= xx / (2.0 * n + 1.0)
            s += t
            if fabs(t) < 1e-17 * fabs(s):
                break
        return s
    if ax < 7.0:
        n0 = <int>c_round(ax / _DAWSON_H)
        if n0 % 2 == 0:
            n0 += 1
        s = 0.0
        for m in range(-_DAWSON_REACH, _DAWSON_REACH + 1, 2):
            n = n0 + m
            d = ax - n * _DAWSON_H
            s += exp(-d * d) / n
        v = _INV_SQRTPI * s
    else:
        inv2 = 1.0 / (2.0 * ax * ax)
        term = 1.0
        s = 1.0
        for k in range(1, 40):
            term *= (2.0 * k - 1.0) * inv2
            s += term
            if term < 1e-17 * s:
                break
        v = s / (2.0 * ax)
    return v if x > 0 else -v


def dawson(double x):
    return c_dawson(x)


# ---------------------------------------------------------------------------
# modified Bessel I0, I1
# ---------------------------------------------------------------------------

cdef double _BESSEL_SERIES_CUTOFF = 18.0


cdef double _i0_series(double z) nogil:
    cdef double q = 0.25 * z * z, term = 1.0, s = 1.0
    cdef int k
    for k in range(1, 200):
        term *= q / (<double>k * k)
        s += term
        if term < 1e-17 * s:
            break
    return s


cdef double _i1_series(double z) nogil:
    cdef double q = 0.25 * z * z, term = 0.5 * z, s = 0.5 * z
    cdef int k
    for k in range(1, 200):
        term *= q / (k * (k + 1.0))
        s += term
        if term < 1e-17 * s:
            break
    return s


cdef double _iv_asymp_scaled(double z, double nu) nogil:
    cdef double mu = 4.0 * nu * nu, term = 1.0, s = 1.0, prev = INFINITY, c
    cdef int k
    for k in range(1, 60):
        c = 2.0 * k - 1.0
        term *= -(mu - c * c) / (8.0 * z * k)
        if fabs(term) >= prev:
            break
        s += term
        prev = fabs(term)
        if fabs(term) < 1e-17 * fabs(s):
            break
    return s / sqrt(2.0 * M_PI * z)


cdef double c_bessel_i0e(double z) nogil:
    if z <= _BESSEL_SERIES_CUTOFF:
        return exp(-z) * _i0_series(z)
    return _iv_asymp_scaled(z, 0.0)


cdef double c_bessel_i1e(double z) nogil:
    if z <= _BESSEL_SERIES_CUTOFF:
        return exp(-z) * _i1_series(z)
    return _iv_asymp_scaled(z, 1.0)


def bessel_i0e(double z):
    return c_bessel_i0e(z)


def bessel_i1e(double z):
    return c_bessel_i1e(z)


def bessel_i0(double z):
    if z <= _BESSEL_SERIES_CUTOFF:
        return _i0_series(z)
    if z > 705.0:
        raise OverflowError("bessel_i0 overflow: z=%g" % z)
    return exp(z) * _iv_asymp_scaled(z, 0.0)


def bessel_i1(double z):
    if z <= _BESSEL_SERIES_CUTOFF:
        return _i1_series(z)
    if z > 705.0:
        raise OverflowError("bessel_i1 overflow: z=%g" % z)
    return exp(z) * _iv_asymp_scaled(z, 1.0)


# ---------------------------------------------------------------------------
# digamma / log-gamma / log-beta
# ---------------------------------------------------------------------------

cdef double c_digamma(double x) nogil:
    cdef double s = 0.0, inv, inv2, series
    while x < 8.0:
        s -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = inv2 * (1.0 / 12.0
             - inv2 * (1.0 / 120.0
             - inv2 * (1.0 / 252.0
             - inv2 * (1.0 / 240.0
             - inv2 * (1.0 / 132.0
             - inv2 * (691.0 / 32760.0
             - inv2 * (1.0 / 12.0)))))))
    return s + log(x) - 0.5 * inv - series


def digamma(double x):
    return c_digamma(x)


def log_gamma(double x):
    return lgamma(x)


def log_beta(double a, double b):
    return lgamma(a) + lgamma(b) - lgamma(a + b)


def norm_pdf(double z):
    return c_norm_pdf(z)


def norm_cdf(double z):
    return c_norm_cdf(z)


def norm_log_cdf(double z):
    return c_norm_log_cdf(z)


def norm_quantile(double p):
    return c_norm_quantile(p)


# ---------------------------------------------------------------------------
# log-marginal likelihoods
# ---------------------------------------------------------------------------

cdef double _log_marginal_betaprime(double a, double b, double sigma, double y) nogil:
    cdef double z = -(y * y) / (2.0 * sigma * sigma)
    cdef double pref = (lgamma(a + 0.5) + lgamma(a + b)
                        - lgamma(a) - lgamma(a + b + 0.5))
    return pref - _LOG_SQRT2PI - log(sigma) + c_log_kummer_1f1_neg(a + 0.5, a + b + 0.5, z)


cdef double c_log_marginal(int kind, double p1, double p2, double sigma, double y) nogil:
    cdef double v, t, s, ratio, w, diff, kappa, la, lb, m, lse, gamma, lphi, lg
    if kind == 0:  # FLAT
        return 0.0
    if kind == 1:  # GAUSSIAN
        v = sigma * sigma + p1 * p1
        return -0.5 * log(2.0 * M_PI * v) - y * y / (2.0 * v)
    if kind == 2:  # BETAPRIME
        return _log_marginal_betaprime(p1, p2, sigma, y)
    if kind == 5:  # HORSESHOE
        t = fabs(y) / (_SQRT2 * sigma)
        if t < 0.05:
            return _log_marginal_betaprime(0.5, 0.5, sigma, y)
        return log(2.0 / (M_PI * sqrt(M_PI))) - log(fabs(y)) + log(c_dawson(t))
    if kind == 6:  # GPD
        s = y * y / (2.0 * sigma * sigma)
        if s == 0.0:
            ratio = 0.5
        else:
            ratio = -expm1(-s) / (2.0 * s)
        return -log(sigma) - _LOG_SQRT2PI + log(ratio)
    if kind == 7:  # BESSEL
        w = y * y / (4.0 * sigma * sigma)
        diff = c_bessel_i0e(w) - c_bessel_i1e(w)
        return -_LOG_SQRT2PI - log(sigma) + log(M_PI / 4.0) + log(diff)
    if kind == 3:  # LAPLACE
        kappa = p1
        t = y / sigma
        la = -kappa * t + c_norm_log_cdf(t - kappa)
        lb = kappa * t + c_norm_log_cdf(-t - kappa)
        m = la if la > lb else lb
        lse = m + log(exp(la - m) + exp(lb - m))
        return log(kappa / (2.0 * sigma)) + 0.5 * kappa * kappa + lse
    # FLAT_ATOM
    gamma = p1
    t = y / sigma
    lphi = -0.5 * t * t - _LOG_SQRT2PI - log(sigma)
    lg = log(gamma)
    if lphi > lg:
        return lphi + log1p(gamma * exp(-lphi))
    return lg + log1p(exp(lphi - lg))


cdef double c_dlog_marginal(int kind, double p1, double p2, double sigma, double y) nogil:
    cdef double t, d, sgn, s, dds, w, ratio, a, b, z, lr, kappa, la, lb
    cdef double gamma, lphi, lf
    if kind == 0:
        return 0.0
    if kind == 1:
        return -y / (sigma * sigma + p1 * p1)
    if kind == 2 or kind == 5 or kind == 6 or kind == 7:
        if kind == 5:
            t = fabs(y) / (_SQRT2 * sigma)
            if t >= 0.05:
                d = c_dawson(t)
                sgn = 1.0 if y > 0 else -1.0
                return -1.0 / y + sgn * (1.0 - 2.0 * t * d) / (d * _SQRT2 * sigma)
            a = 0.5
            b = 0.5
        elif kind == 6:
            s = y * y / (2.0 * sigma * sigma)
            if s < 1e-5:
                dds = -0.5 + s / 12.0 - s * s * s / 720.0
            elif s > 40.0:
                dds = -1.0 / s
            else:
                dds = 1.0 / expm1(s) - 1.0 / s
            return (y / (sigma * sigma)) * dds
        elif kind == 7:
            w = y * y / (4.0 * sigma * sigma)
            if w < 1e-8:
                ratio = 0.5 * (1.0 + 0.5 * w)
            else:
                ratio = c_bessel_i1e(w) / (w * (c_bessel_i0e(w) - c_bessel_i1e(w)))
            return (y / (2.0 * sigma * sigma)) * (ratio - 2.0)
        else:
            a = p1
            b = p2
        z = -(y * y) / (2.0 * sigma * sigma)
        lr = (c_log_kummer_1f1_neg(a + 1.5, a + b + 1.5, z)
              - c_log_kummer_1f1_neg(a + 0.5, a + b + 0.5, z))
        return -(y / (sigma * sigma)) * (a + 0.5) / (a + b + 0.5) * exp(lr)
    if kind == 3:
        kappa = p1
        t = y / sigma
        la = -kappa * t + c_norm_log_cdf(t - kappa)
        lb = kappa * t + c_norm_log_cdf(-t - kappa)
        return (kappa / sigma) * tanh(0.5 * (lb - la))
    # FLAT_ATOM
    gamma = p1
    t = y / sigma
    lphi = -0.5 * t * t - _LOG_SQRT2PI - log(sigma)
    lf = c_log_marginal(kind, p1, p2, sigma, y)
    return -(y / (sigma * sigma)) * exp(lphi - lf)


def log_marginal(int kind, double p1, double p2, double sigma, double y):
    if kind < 0 or kind > 7:
        raise ValueError("unknown prior kind code %r" % kind)
    return c_log_marginal(kind, p1, p2, sigma, y)


def dlog_marginal(int kind, double p1, double p2, double sigma, double y):
    if kind < 0 or kind > 7:
        raise ValueError("unknown prior kind code %r" % kind)
    return c_dlog_marginal(kind, p1, p2, sigma, y)


def posterior_mean(int kind, double p1, double p2, double sigma, double y):
    cdef double v, z, lr, kappa, t, la, lb
    if kind == 0:
        return y
    if kind == 1:
        v = p1 * p1
        return y * v / (sigma * sigma + v)
    if kind == 2:
        z = -(y * y) / (2.0 * sigma * sigma)
        lr = (c_log_kummer_1f1_neg(p1 + 1.5, p1 + p2 + 1.5, z)
              - c_log_kummer_1f1_neg(p1 + 0.5, p1 + p2 + 0.5, z))
        return y * (1.0 - (p1 + 0.5) / (p1 + p2 + 0.5) * exp(lr))
    if kind == 3:
        kappa = p1
        t = y / sigma
        la = -kappa * t + c_norm_log_cdf(t - kappa)
        lb = kappa * t + c_norm_log_cdf(-t - kappa)
        return y + sigma * kappa * tanh(0.5 * (lb - la))
    if kind < 0 or kind > 7:
        raise ValueError("unknown prior kind code %r" % kind)
    return y + sigma * sigma * c_dlog_marginal(kind, p1, p2, sigma, y)


# ---------------------------------------------------------------------------
# spending-weight solve
# ---------------------------------------------------------------------------

cdef inline double _lam_c(int kind, double p1, double p2, double sigma,
                          double theta0, double y) nogil:
    cdef double d = y - theta0
    return c_log_marginal(kind, p1, p2, sigma, y) + d * d / (2.0 * sigma * sigma)


def _lam(int kind, double p1, double p2, double sigma, double theta0, double y):
    return _lam_c(kind, p1, p2, sigma, theta0, y)


def weight_solve(int kind, double p1, double p2, double sigma,
                 double theta0, double alpha):
    cdef double wa = 1e-15, wb = 1.0 - 1e-15
    cdef double lo, hi, ga, gb, w, g, w_next, w_prev = 0.0, g_prev = 0.0
    cdef bint have_prev = False
    cdef int i

    lo = theta0 + sigma * c_norm_quantile(alpha * wa)
    hi = theta0 - sigma * c_norm_quantile(alpha * (1.0 - wa))
    ga = _lam_c(kind, p1, p2, sigma, theta0, lo) - _lam_c(kind, p1, p2, sigma, theta0, hi)
    if ga <= 0.0:
        return wa, lo, hi
    lo = theta0 + sigma * c_norm_quantile(alpha * wb)
    hi = theta0 - sigma * c_norm_quantile(alpha * (1.0 - wb))
    gb = _lam_c(kind, p1, p2, sigma, theta0, lo) - _lam_c(kind, p1, p2, sigma, theta0, hi)
    if gb >= 0.0:
        return wb, lo, hi

    w = 0.5
    for i in range(200):
        lo = theta0 + sigma * c_norm_quantile(alpha * w)
        hi = theta0 - sigma * c_norm_quantile(alpha * (1.0 - w))
        g = (_lam_c(kind, p1, p2, sigma, theta0, lo)
             - _lam_c(kind, p1, p2, sigma, theta0, hi))
        if g == 0.0:
            return w, lo, hi
        if g > 0.0:
            wa = w
        else:
            wb = w
        if wb - wa < 1e-13:
            break
        w_next = -1.0
        if have_prev and g != g_prev:
            w_next = w - g * (w - w_prev) / (g - g_prev)
        w_prev = w
        g_prev = g
        have_prev = True
        if not (wa < w_next < wb):
            w_next = 0.5 * (wa + wb)
        w = w_next
    w = 0.5 * (wa + wb)
    lo = theta0 + sigma * c_norm_quantile(alpha * w)
    hi = theta0 - sigma * c_norm_quantile(alpha * (1.0 - w))
    return w, lo, hi
