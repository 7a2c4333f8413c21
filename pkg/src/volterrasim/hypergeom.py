"""Gauss hypergeometric function for real arguments on [0, 1).

Only what the stationarity threshold needs: 2F1(a, b; c; z) for real
parameters and z in (-1, 1).  The defining power series is used on
|z| <= 1/2 where it converges fast; closer to 1 the standard 1 - z
connection formula takes over, with the logarithmic variant when
c - a - b is an integer.
"""

import math

from .errors import QuadratureError

MAX_TERMS = 10_000
SERIES_TOL = 1e-15


def log_gamma(x: float) -> float:
    """log |Gamma(x)| for real x (poles at non-positive integers raise)."""
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"Gamma pole at {x}")
    return math.lgamma(x)


def gamma_sign(x: float) -> float:
    """Sign of Gamma(x) for real non-pole x."""
    if x > 0.0:
        return 1.0
    return 1.0 if math.floor(x) % 2 == 0 else -1.0


def _gamma_ratio(num, den) -> float:
    """prod Gamma(num_i) / prod Gamma(den_j), computed in log space."""
    log = 0.0
    sign = 1.0
    for x in num:
        log += log_gamma(x)
        sign *= gamma_sign(x)
    for x in den:
        log -= log_gamma(x)
        sign *= gamma_sign(x)
    return sign * math.exp(log)


def log_beta(a: float, b: float) -> float:
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def _series(a: float, b: float, c: float, z: float) -> float:
    """Power series sum_k (a)_k (b)_k / (c)_k z^k / k!."""
    term = 1.0
    total = 1.0
    for k in range(MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if abs(term) <= SERIES_TOL * max(abs(total), 1.0):
            return total
    raise QuadratureError("2F1 series did not converge", value=total,
                          estimate=term)


def _is_nonpositive_int(x: float, tol: float = 1e-12) -> bool:
    return x <= tol and abs(x - round(x)) < tol


def _connection(a: float, b: float, c: float, z: float) -> float:
    """2F1 near z = 1 via the 1 - z formula (generic c - a - b)."""
    s = c - a - b
    w = 1.0 - z
    t1 = _gamma_ratio((c, s), (c - a, c - b)) * _series(a, b, 1.0 - s, w)
    t2 = _gamma_ratio((c, -s), (a, b)) * w ** s * _series(c - a, c - b, 1.0 + s, w)
    return t1 + t2


def _connection_log(a: float, b: float, c: float, z: float) -> float:
    """Logarithmic case c = a + b (the 1 - z formula degenerates)."""
    from scipy.special import digamma

    w = 1.0 - z
    lw = math.log(w)
    pref = _gamma_ratio((c,), (a, b))
    term = 1.0
    total = 0.0
    for k in range(MAX_TERMS):
        if k > 0:
            term *= (a + k - 1.0) * (b + k - 1.0) / (k * k) * w
        coef = 2.0 * digamma(k + 1.0) - digamma(a + k) - digamma(b + k) - lw
        piece = term * coef
        total += piece
        if k > 2 and abs(piece) <= SERIES_TOL * max(abs(total), 1.0):
            return pref * total
    raise QuadratureError("2F1 log-case series did not converge",
                          value=pref * total, estimate=piece)


def gauss_summation(a: float, b: float, c: float) -> float:
    """2F1(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)).

    Requires c - a - b > 0 (else the series diverges at z = 1).
    """
    if c - a - b <= 0.0:
        raise ValueError("2F1 diverges at z = 1 unless c - a - b > 0")
    return _gamma_ratio((c, c - a - b), (c - a, c - b))


def near_one_asymptotic(a: float, b: float, c: float, z: float) -> float:
    """Leading z -> 1 behaviour of 2F1(a, b; c; z).

    Finite limit for c - a - b > 0, logarithmic blow-up at c = a + b,
    power blow-up (1-z)^(c-a-b) below.
    """
    from scipy.special import digamma

    s = c - a - b
    if s > 1e-10:
        return gauss_summation(a, b, c)
    w = 1.0 - z
    if abs(s) <= 1e-10:
        return _gamma_ratio((c,), (a, b)) * (
            2.0 * digamma(1.0) - digamma(a) - digamma(b) - math.log(w))
    return _gamma_ratio((c, -s), (a, b)) * w ** s


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """2F1(a, b; c; z) for real parameters, z in (-1, 1).

    c must not be a non-positive integer.  When c - a - b is an integer
    and |z| > 1/2, the exact logarithmic connection is used for
    c = a + b; other integer gaps are handled by averaging two nearby
    perturbed evaluations, accurate to about 1e-7.
    """
    if _is_nonpositive_int(c) or (c <= 0 and abs(c - round(c)) < 1e-12):
        raise ValueError(f"c = {c} is a pole of 2F1")
    if z == 1.0:
        return gauss_summation(a, b, c)
    if not -1.0 < z < 1.0:
        raise ValueError(f"z must lie in (-1, 1), got {z}")
    if abs(z) <= 0.5:
        return _series(a, b, c, z)
    if z < 0.0:
        # Pfaff: map z in (-1, -1/2) to z/(z-1) in (1/3, 1/2)
        zz = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _series(a, c - b, c, zz)
    s = c - a - b
    if abs(s - round(s)) < 1e-7:
        if abs(s) < 1e-10:
            return _connection_log(a, b, c, z)
        eps = 1e-7
        return 0.5 * (_connection(a, b, c + eps, z)
                      + _connection(a, b, c - eps, z))
    return _connection(a, b, c, z)
