from __future__ import annotations
from dataclasses import dataclass
import functools
import inspect
import logging
import typing as t
import warnings

from magsteklov.shared.exceptions import RegimeViolation


logger = logging.getLogger(__file__)


RegimeFunction = t.Callable[..., float]

# Regime limits are inclusive, up to rounding of the regime number.
REGIME_SLACK = 1e-12


@dataclass
class RegimeGuard:
    """
    Describes a field strength regime. ``regime_number`` receives the
    arguments of the guarded function by name, and returns a dimensionless
    number which must not exceed ``limit``.
    """

    regime_number: RegimeFunction
    limit: float = 1.0
    description: str = "b * R^2"


def apply_regime_guard(guard: RegimeGuard):
    """
    A decorator which checks the regime before running the guarded
    function. The guarded function must accept an ``override`` keyword -
    when it's True, a violation produces a warning instead of an error.
    """

    def decorator(function):
        signature = inspect.signature(function)

        @functools.wraps(function)
        def inner_function(*args, **kwargs):
            bound = signature.bind(*args, **kwargs)
            bound.apply_defaults()
            arguments = dict(bound.arguments)
            override = arguments.pop("override", False)

            value = guard.regime_number(**arguments)
            if value > guard.limit * (1.0 + REGIME_SLACK):
                message = (
                    f"{function.__name__}: {guard.description} = {value:.6g} "
                    f"exceeds the radial regime limit {guard.limit:.6g}."
                )
                if not override:
                    raise RegimeViolation(message)
                logger.warning(message)
                warnings.warn(message)

            return function(*args, **kwargs)

        return inner_function

    return decorator
