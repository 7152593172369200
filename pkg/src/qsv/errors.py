"""Exception hierarchy shared by all evaluators."""


class QSeriesError(Exception):
    """Base class for evaluation failures."""


class PoleError(QSeriesError, ZeroDivisionError):
    """A denominator factor vanished (to within the context's floor)."""


class ZeroXError(QSeriesError, ValueError):
    """A variable that appears as a divisor is (numerically) zero."""


class NonConvergent(QSeriesError, ArithmeticError):
    """A nonterminating series did not meet its stopping rule."""


class RankTooLarge(QSeriesError, ValueError):
    pass


class IntegrandError(QSeriesError, ArithmeticError):
    """The integrand produced a non-finite value at some lattice point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DomainViolation(QSeriesError, ValueError):
    """A resolved parameter record sits on or too close to a pole.

    ``factors`` lists ``(label, distance)`` pairs for every offending factor.
    """

    def __init__(self, factors):
        self.factors = list(factors)
        detail = ", ".join(f"{name} (dist {dist:.2e})" for name, dist in self.factors)
        super().__init__(f"parameters too close to a pole: {detail}")


class SamplingExhausted(QSeriesError, RuntimeError):
    pass
