"""
Upper bound on |f'(0)| for self-maps of the disc fixing 0 that omit a finite set of
values in (0, 1)
"""

import logging
import math
from dataclasses import dataclass

import ovbound.core as core
import ovbound.util as util
import ovbound.exception as exception

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class ExceptionalSet:
    alphas: tuple

    def __post_init__(self):
        util.validate(self.alphas is not None, "Missing alphas for exceptional set")

        alphas = list(self.alphas)
        util.validate(len(alphas) >= 1, "Exceptional set must contain at least one value")

        for alpha in alphas:
            core.check_open_interval(alpha)

        # Canonical order, so permuted input yields identical reports
        alphas = sorted(float(x) for x in alphas)

        for lower, upper in zip(alphas, alphas[1:]):
            if upper - lower <= core.TOLERANCES.duplicate:
                raise exception.ValidationException(f"Duplicate exceptional value: {upper}")

        object.__setattr__(self, "alphas", tuple(alphas))

    def __len__(self):
        return len(self.alphas)

    def __iter__(self):
        return iter(self.alphas)

    def log_sum(self):
        """
        sum_j ln(alpha_j), the value of g at the origin
        """
        return math.fsum(math.log(x) for x in self.alphas)

@dataclass(frozen=True)
class BoundReport:
    k: int
    alphas: ExceptionalSet
    numerator: float
    denominator: float
    bound: float

    def to_dict(self):
        return {
            "k": self.k,
            "alphas": list(self.alphas.alphas),
            "numerator": self.numerator,
            "denominator": self.denominator,
            "bound": self.bound
        }

def bound_k(exceptional_set):
    """
    2 ln(1/(alpha_1 ... alpha_k)) / sum_j (1 - alpha_j^2)/alpha_j
    """
    util.validate(isinstance(exceptional_set, ExceptionalSet), "Invalid exceptional set passed to bound_k")

    # Sum of logs rather than log of the product, which underflows for many small alphas
    numerator = 2.0 * math.fsum(-math.log(x) for x in exceptional_set.alphas)
    denominator = math.fsum((1.0 - x) * (1.0 + x) / x for x in exceptional_set.alphas)

    if not (numerator > 0.0 and denominator > 0.0):
        raise exception.OVBInternalException(f"Degenerate bound terms: {numerator} / {denominator}")

    report = BoundReport(
        k=len(exceptional_set),
        alphas=exceptional_set,
        numerator=numerator,
        denominator=denominator,
        bound=numerator / denominator
    )

    logger.debug(f"bound_k for {exceptional_set.alphas}: {report.bound}")

    return report

def bound_k1(alpha):
    """
    Single omitted value: 2 alpha ln(1/alpha) / (1 - alpha^2)
    """
    core.check_open_interval(alpha)

    return 2.0 * alpha * -math.log(alpha) / ((1.0 - alpha) * (1.0 + alpha))
