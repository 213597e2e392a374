"""
The single-omitted-value extremal map

  f(z) = psi_alpha(alpha ** cayley(c z))

omits alpha, fixes 0 and attains |f'(0)| = 2 alpha ln(1/alpha) / (1 - alpha^2).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

import ovbound.core as core
import ovbound.bounds as bounds
import ovbound.util as util
import ovbound.analytic_engine as analytic_engine

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class ExtremalSpec:
    alpha: float
    c: core.UnimodularConstant = core.UnimodularConstant()

    def __post_init__(self):
        core.check_open_interval(self.alpha)
        util.validate(isinstance(self.c, core.UnimodularConstant), f"Invalid constant for extremal spec: {self.c!r}")

class ExtremalK1(analytic_engine.AnalyticMap):
    """
    Accurate to rounding for |z| <= 0.999. Towards the boundary point conj(c) the
    Cayley factor grows without bound and f(z) rounds to alpha; no compensated
    arithmetic is attempted beyond |z| = 0.9999.
    """
    kind = "extremal_k1"

    def __init__(self, spec):
        util.validate(isinstance(spec, ExtremalSpec), "Invalid spec passed to ExtremalK1")
        super().__init__((spec.alpha,))

        self.spec = spec

    def evaluate(self, z):
        rotated = self.spec.c.value * np.asarray(z, dtype=complex)

        return core.blaschke(self.spec.alpha, core.cayley_power(self.spec.alpha, rotated))

    def params(self):
        return {"alpha": self.spec.alpha, "c": self.spec.c.value}

def extremal_map(spec):
    analytic_map = ExtremalK1(spec)
    logger.debug(f"Constructed {analytic_map!r}")

    return analytic_map

def exponent(spec, z):
    """
    ln(alpha) * cayley(c z), the logarithm of the omitted-value exponential. Its real
    part is negative on the whole disc.
    """
    util.validate(isinstance(spec, ExtremalSpec), "Invalid spec passed to exponent")

    return util.as_scalar(math.log(spec.alpha) * np.asarray(core.halfplane_exponent(z, spec.c)))

def extremal_derivative_closed_form(spec):
    """
    f'(0) = 2 c alpha ln(1/alpha) / (1 - alpha^2)
    """
    util.validate(isinstance(spec, ExtremalSpec), "Invalid spec passed to extremal_derivative_closed_form")

    return spec.c.value * bounds.bound_k1(spec.alpha)

analytic_engine.catalog[ExtremalK1.kind] = ExtremalK1
