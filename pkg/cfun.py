"""
Complex special functions: log-gamma and the confluent hypergeometric 1F1.

Only the parameter families needed by the sector propagators are tuned for
(a near 0, 1/2 or 1 with a small imaginary part, b in {1/2, 3/2}, z = +-i tau^2),
but every routine accepts general complex input.
"""

import cmath
import math
import threading
from typing import Optional, Union

import mpmath

from config import get_settings
from errors import AsymptoticDomainError, PoleError, SeriesConvergenceError
from models import Hyp1F1Params

Number = Union[int, float, complex]

# Lanczos approximation, g = 7 with nine coefficients
LANCZOS_G = 7
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
_EPS = 2.220446049250313e-16

# mpmath contexts carry mutable precision, so each thread keeps its own.
_local = threading.local()


def _mp_context() -> mpmath.MPContext:
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = mpmath.MPContext()
        _local.ctx = ctx
    return ctx


def _is_pole(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and float(z.real).is_integer()


def _principal(value: complex) -> complex:
    imag = math.remainder(value.imag, 2.0 * math.pi)
    if imag == -math.pi:
        imag = math.pi
    return complex(value.real, imag)


def _log_gamma_branch(z: complex) -> complex:
    """Some branch of log Gamma(z); callers fold it onto the principal one."""
    if z.real < 0.5:
        # Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return _LOG_PI - cmath.log(cmath.sin(math.pi * z)) - _log_gamma_branch(1.0 - z)
    z -= 1.0
    x = LANCZOS_COEFFS[0]
    for i, coeff in enumerate(LANCZOS_COEFFS[1:], start=1):
        x += coeff / (z + i)
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def log_gamma(z: Number) -> complex:
    """
    Principal value of log Gamma(z), imaginary part in (-pi, pi].

    Raises:
        PoleError: if z is zero or a negative integer
    """
    z = complex(z)
    if _is_pole(z):
        raise PoleError(f"Gamma has a pole at z = {z}")
    return _principal(_log_gamma_branch(z))


def gamma(z: Number) -> complex:
    return cmath.exp(log_gamma(z))


def rgamma(z: Number) -> complex:
    """1/Gamma(z), exactly zero at the poles of Gamma."""
    z = complex(z)
    if _is_pole(z):
        return 0j
    return cmath.exp(-log_gamma(z))


def _extra_digits(z: complex) -> int:
    # largest series term is about e^|z| while the sum can be O(1)
    return int(math.ceil(abs(z) / math.log(10.0)))


def _series_native(a: complex, b: complex, z: complex, tol: float, max_terms: int) -> complex:
    term = 1.0 + 0j
    total = 1.0 + 0j
    radius = abs(z)
    for k in range(max_terms):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if k + 1 >= radius and abs(term) <= tol * abs(total):
            return total
    raise SeriesConvergenceError(
        f"1F1 series did not converge within {max_terms} terms (z = {z})"
    )


def _series_extended(
    a: complex, b: complex, z: complex, tol: float, max_terms: int, dps: int
) -> complex:
    ctx = _mp_context()
    ctx.dps = dps
    a_, b_, z_ = ctx.mpc(a), ctx.mpc(b), ctx.mpc(z)
    term = ctx.mpc(1)
    total = ctx.mpc(1)
    radius = abs(z)
    for k in range(max_terms):
        term = term * (a_ + k) / (b_ + k) * z_ / (k + 1)
        total += term
        if k + 1 >= radius and abs(term) <= tol * abs(total):
            return complex(total)
    raise SeriesConvergenceError(
        f"1F1 series did not converge within {max_terms} terms (z = {z})"
    )


def hyp1f1_series(p: Hyp1F1Params, tol: Optional[float] = None) -> complex:
    """
    Maclaurin series of 1F1(a; b; z) by term recursion.

    Summation stops once the terms are decreasing and the latest one is below
    ``tol`` relative to the partial sum. When the cancellation budget of the
    argument exceeds what double precision absorbs, the same recursion runs
    in extended precision.

    Args:
        p: Parameters (a, b, z)
        tol: Relative tail tolerance; defaults to the configured value

    Returns:
        The series value

    Raises:
        AsymptoticDomainError: if |z| exceeds the configured series radius
        SeriesConvergenceError: if the term cap is reached first
    """
    settings = get_settings()
    tol = settings.hyp1f1_series_tol if tol is None else tol
    a, b, z = p.a, p.b, p.z
    if abs(z) > settings.hyp1f1_series_max_radius:
        raise AsymptoticDomainError(
            f"|z| = {abs(z):.6g} exceeds the series radius "
            f"{settings.hyp1f1_series_max_radius}"
        )
    if z == 0 or a == 0:
        return 1.0 + 0j
    max_terms = settings.hyp1f1_series_max_terms
    if abs(z) <= settings.hyp1f1_native_radius:
        return _series_native(a, b, z, tol, max_terms)
    dps = 15 + _extra_digits(z) + 5
    return _series_extended(a, b, z, tol, max_terms, dps)


def _asymptotic_sum(
    first: complex, second: complex, z: complex, order: int, optimal: bool
) -> complex:
    """Sum_{k<order} (first)_k (second)_k / (k! z^k), optionally cut at the smallest term."""
    total = 0j
    term = 1.0 + 0j
    for k in range(order):
        if optimal and k > 0:
            if abs(term) > abs(previous):
                break
            if abs(term) <= _EPS * abs(total):
                total += term
                break
        total += term
        previous = term
        term = term * (first + k) * (second + k) / ((k + 1) * z)
        if term == 0:
            break
    return total


def hyp1f1_asymptotic(
    p: Hyp1F1Params,
    order: Optional[int] = None,
    optimal: bool = False,
) -> complex:
    """
    Large-|z| expansion of 1F1(a; b; z).

    Both exponential sectors are kept; the e^{+-i pi a} factor takes the sign
    of Im z (upper half-plane gives +). Each sector sums exactly ``order``
    terms unless ``optimal`` is set, in which case summation stops at the
    smallest term.

    Raises:
        AsymptoticDomainError: if |z| is below the configured asymptotic radius
    """
    settings = get_settings()
    order = settings.hyp1f1_asymptotic_order if order is None else order
    if order < 1:
        raise ValueError("order must be at least 1")
    a, b, z = p.a, p.b, p.z
    if abs(z) < settings.hyp1f1_asymptotic_min_radius:
        raise AsymptoticDomainError(
            f"|z| = {abs(z):.6g} is below the asymptotic radius "
            f"{settings.hyp1f1_asymptotic_min_radius}"
        )
    log_z = cmath.log(z)
    sign = 1.0 if z.imag >= 0 else -1.0

    result = 0j
    inv_gamma_b_minus_a = rgamma(b - a)
    if inv_gamma_b_minus_a != 0:
        series = _asymptotic_sum(a, a - b + 1.0, -z, order, optimal)
        result += (
            inv_gamma_b_minus_a
            * cmath.exp(1j * math.pi * a * sign - a * log_z)
            * series
        )
    inv_gamma_a = rgamma(a)
    if inv_gamma_a != 0:
        series = _asymptotic_sum(b - a, 1.0 - a, z, order, optimal)
        result += inv_gamma_a * cmath.exp(z + (a - b) * log_z) * series
    return gamma(b) * result


def hyp1f1(p: Hyp1F1Params) -> complex:
    """1F1(a; b; z) with series / asymptotic dispatch at the switch radius."""
    settings = get_settings()
    if abs(p.z) <= settings.hyp1f1_switch_radius:
        return hyp1f1_series(p)
    return hyp1f1_asymptotic(
        p, order=settings.hyp1f1_dispatch_max_order, optimal=True
    )
