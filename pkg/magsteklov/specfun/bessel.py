"""
Modified Bessel functions I0, I1, K0 and K1 for real positive arguments.

I uses its power series up to x = 15 and the large argument expansion
beyond. K uses the logarithmic series up to x = 2, and above that the
exponentially scaled integral

    e^x K_nu(x) = int_0^inf exp(-x (cosh s - 1)) cosh(nu s) ds

by the trapezoidal rule, which converges geometrically for this even,
analytic integrand.
"""
from __future__ import annotations
from dataclasses import dataclass
import math
import typing as t

import numpy as np

from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.specfun.exceptions import OverflowRange


EULER_GAMMA = 0.57721566490153286061

I_CROSSOVER = 15.0
K_CROSSOVER = 2.0
OVERFLOW_LIMIT = 700.0

SERIES_TERMS = 80
ASYMPTOTIC_TERMS = 30
INTEGRAL_NODES = 400
# exp(-45) is far below double precision relative to the s = 0 value.
INTEGRAL_CUTOFF = 45.0


Real = t.Union[float, np.ndarray]


@dataclass(frozen=True)
class BesselValue:
    kind: str
    order: int
    x: float
    value: float
    method: str


def _check(order: int, x: np.ndarray):
    if order not in (0, 1):
        raise InvalidParameters(
            f"Only orders 0 and 1 are supported, not {order}."
        )
    if np.any(~(x > 0.0)):
        raise InvalidParameters("Bessel arguments must be positive.")


def _output(value: np.ndarray, scalar: bool) -> Real:
    return float(value[0]) if scalar else value


###############################################################################
# I


def _i_series(order: int, x: np.ndarray) -> np.ndarray:
    quarter_square = 0.25 * x * x
    term = (0.5 * x) ** order
    total = term.copy()
    for k in range(1, SERIES_TERMS):
        term = term * quarter_square / (k * (k + order))
        total += term
    return total


def _i_asymptotic(order: int, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * order * order
    term = np.ones_like(x)
    total = term.copy()
    for k in range(1, ASYMPTOTIC_TERMS + 1):
        term = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        total += term
    return np.exp(x) / np.sqrt(2.0 * math.pi * x) * total


def bessel_i(order: int, x: Real) -> Real:
    """
    Modified Bessel function of the first kind, ``I_order(x)``.

    :param order:
        0 or 1.
    :param x:
        A positive float or array, at most 700.

    """
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check(order, x)
    if np.any(x > OVERFLOW_LIMIT):
        raise OverflowRange(
            f"I_{order} overflows for arguments above {OVERFLOW_LIMIT}."
        )

    value = np.empty_like(x)
    small = x <= I_CROSSOVER
    value[small] = _i_series(order, x[small])
    value[~small] = _i_asymptotic(order, x[~small])
    return _output(value, scalar)


###############################################################################
# K


def _k_series(order: int, x: np.ndarray) -> np.ndarray:
    quarter_square = 0.25 * x * x
    log_half = np.log(0.5 * x)

    if order == 0:
        term = np.ones_like(x)
        harmonic = 0.0
        total = np.zeros_like(x)
        for k in range(1, SERIES_TERMS):
            harmonic += 1.0 / k
            term = term * quarter_square / (k * k)
            total += harmonic * term
        return -(log_half + EULER_GAMMA) * _i_series(0, x) + total

    # psi(k + 1) + psi(k + 2), starting from psi(1) = -gamma.
    digamma = -EULER_GAMMA
    term = np.ones_like(x)
    total = (2.0 * digamma + 1.0) * term
    for k in range(1, SERIES_TERMS):
        digamma += 1.0 / k
        term = term * quarter_square / (k * (k + 1))
        total += (2.0 * digamma + 1.0 / (k + 1)) * term
    return 1.0 / x + log_half * _i_series(1, x) - 0.25 * x * total


def _k_scaled_integral(order: int, x: np.ndarray) -> np.ndarray:
    upper = np.arccosh(1.0 + INTEGRAL_CUTOFF / x)
    fractions = np.linspace(0.0, 1.0, INTEGRAL_NODES)
    s = upper[:, None] * fractions[None, :]
    integrand = np.exp(-x[:, None] * (np.cosh(s) - 1.0))
    if order == 1:
        integrand *= np.cosh(s)
    step = upper / (INTEGRAL_NODES - 1)
    return step * (
        integrand.sum(axis=1) - 0.5 * (integrand[:, 0] + integrand[:, -1])
    )


def bessel_k(order: int, x: Real, scaled: bool = False) -> Real:
    """
    Modified Bessel function of the second kind, ``K_order(x)``.

    :param order:
        0 or 1.
    :param x:
        A positive float or array.
    :param scaled:
        If True, return ``exp(x) * K_order(x)``, which doesn't underflow
        for large arguments.

    """
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check(order, x)

    value = np.empty_like(x)
    small = x <= K_CROSSOVER
    large = ~small

    value[small] = _k_series(order, x[small])
    if scaled:
        value[small] *= np.exp(x[small])

    value[large] = _k_scaled_integral(order, x[large])
    if not scaled:
        value[large] *= np.exp(-x[large])

    return _output(value, scalar)


###############################################################################


def evaluate(kind: str, order: int, x: float) -> BesselValue:
    """
    A single tagged value, as printed by the ``bessel`` command.
    """
    if kind == "I":
        value = bessel_i(order, x)
        method = "series" if x <= I_CROSSOVER else "asymptotic"
    elif kind == "K":
        value = bessel_k(order, x)
        method = "series" if x <= K_CROSSOVER else "integral"
    else:
        raise InvalidParameters(f"Unknown Bessel kind {kind!r}.")

    return BesselValue(
        kind=kind, order=order, x=float(x), value=value, method=method
    )


def ratio_i1_i0(x: Real) -> Real:
    return bessel_i(1, x) / bessel_i(0, x)


def ratio_k1_k0(x: Real) -> Real:
    """
    ``K1 / K0``, computed from the scaled functions so that large
    arguments don't underflow.
    """
    return bessel_k(1, x, scaled=True) / bessel_k(0, x, scaled=True)
