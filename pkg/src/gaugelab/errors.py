"""Exception types shared across the package."""

from __future__ import annotations


class GaugeLabError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(GaugeLabError, ValueError):
    """An argument violated a constructor or operation precondition."""


class ScalarRegimeError(GaugeLabError, TypeError):
    """Exact-arithmetic machinery was handed a binary float.

    Floats are all rational, so counterexamples that hinge on telling
    rational points from irrational ones silently evaporate under float
    arithmetic.  Rejecting the mix at construction time keeps the two
    scalar regimes honest.
    """


class GaugeContractError(GaugeLabError):
    """A gauge evaluated to a non-positive width somewhere."""

    def __init__(self, point: object, value: object):
        self.point = point
        self.value = value
        super().__init__(f"gauge returned non-positive width {value!r} at s={point!r}")


class GaugeTooDemandingError(GaugeLabError):
    """Bisection hit its depth cap before every cell became fine.

    Carries the subinterval that could not be resolved so callers can
    report where the gauge collapses.
    """

    def __init__(self, lo: object, hi: object, depth: int):
        self.lo = lo
        self.hi = hi
        self.depth = depth
        super().__init__(
            f"gauge too demanding: no fine tag for ]{lo!r}, {hi!r}] within depth {depth}"
        )


class IntegrandEvalError(GaugeLabError):
    """Integrand evaluation failed; carries the offending tagged cell."""

    def __init__(self, tag: object, lo: object, hi: object, cause: BaseException):
        self.tag = tag
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"integrand evaluation failed at tag={tag!r} on ]{lo!r}, {hi!r}]: {cause}"
        )


class OracleInconsistencyError(GaugeLabError):
    """A sampled function value escaped the extrema oracle's [inf, sup]."""

    def __init__(self, point: object, value: object, bounds: tuple):
        self.point = point
        self.value = value
        self.bounds = bounds
        super().__init__(
            f"extrema oracle inconsistent: f({point!r}) = {value!r} outside {bounds!r}"
        )


class MonotonicityError(GaugeLabError):
    """A distribution function failed its monotonicity spot check."""


class EstimatorFailure(GaugeLabError):
    """A Monte Carlo estimator raised on some path; carries the path id."""

    def __init__(self, path_id: int, cause: BaseException):
        self.path_id = path_id
        super().__init__(f"estimator failed on path id={path_id}: {cause}")
