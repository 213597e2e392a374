"""
Elementary conformal building blocks on the open unit disc: the Blaschke factor,
the Cayley map onto the right half-plane and deterministic sampling of the disc.

All functions accept python scalars or numpy arrays. Scalar input returns a python
complex, array input an array of the same shape.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

import ovbound.util as util
import ovbound.exception as exception

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class Tolerances:
    round_trip: float = 1e-12
    residual: float = 1e-9
    duplicate: float = 1e-12
    distinct_pair: float = 1e-9
    verdict_band: float = 1e-9
    unimodular: float = 1e-12
    pole: float = 1e-300
    sharpness: float = 1e-6
    # Below this |F| the discriminant square root is not continued
    precision_floor: float = 1e-14
    # f within this many ulp of an omitted value leaves h as pure rounding
    resolution_ulps: float = 4.0

TOLERANCES = Tolerances()

def check_open_interval(val, name="alpha"):
    util.validate(isinstance(val, (int, float, np.floating)) and not isinstance(val, bool),
        f"Invalid type for {name}: {type(val)}", exception.DomainException)
    util.validate(math.isfinite(val) and 0.0 < val < 1.0,
        f"{name} must lie strictly inside (0, 1): {val}", exception.DomainException)

def disc_point(z):
    """
    Validates that every point lies in the open unit disc and returns it unchanged
    """
    arr = np.asarray(z, dtype=complex)

    outside = ~(np.abs(arr) < 1.0)
    if np.any(outside):
        first = arr.ravel()[np.flatnonzero(outside.ravel())[0]]
        raise exception.DomainException(f"Point outside the open unit disc: {complex(first)}")

    return z

@dataclass(frozen=True)
class UnimodularConstant:
    value: complex = 1 + 0j

    def __post_init__(self):
        value = complex(self.value)
        modulus = abs(value)

        util.validate(math.isfinite(modulus) and abs(modulus - 1.0) <= TOLERANCES.unimodular,
            f"Constant is not unimodular: {value} (modulus {modulus})", exception.DomainException)

        # Renormalize so exponent maps don't drift
        object.__setattr__(self, "value", value / modulus)

    @classmethod
    def from_degrees(cls, degrees):
        # Quarter turns are exact so rotations by them introduce no rounding
        quarter_turns = {0: 1 + 0j, 1: 1j, 2: -1 + 0j, 3: -1j}
        if float(degrees) % 90.0 == 0.0:
            return cls(quarter_turns[int(float(degrees) % 360.0) // 90])

        radians = math.radians(degrees)

        return cls(complex(math.cos(radians), math.sin(radians)))

    @property
    def degrees(self):
        return util.argument_degrees(self.value)

    def __complex__(self):
        return self.value

@dataclass(frozen=True)
class DiscSamplingPlan:
    radii_count: int
    angles_count: int
    r_max: float

    def __post_init__(self):
        for name in ("radii_count", "angles_count"):
            count = getattr(self, name)
            util.validate(isinstance(count, (int, np.integer)) and not isinstance(count, bool) and count >= 1,
                f"Invalid {name} in sampling plan: {count}")

        util.validate(isinstance(self.r_max, (int, float)) and 0.0 < self.r_max < 1.0,
            f"Sampling plan r_max must lie in (0, 1): {self.r_max}")

    def size(self):
        return self.radii_count * self.angles_count

DEFAULT_PLAN = DiscSamplingPlan(radii_count=64, angles_count=256, r_max=0.999)

def blaschke(alpha, w):
    """
    Disc automorphism (alpha - w)/(1 - alpha w). Swaps 0 and alpha and is its own inverse.
    """
    check_open_interval(alpha)

    w = np.asarray(w, dtype=complex)
    denominator = 1.0 - alpha * w

    if np.any(np.abs(denominator) < TOLERANCES.pole):
        raise exception.PoleException(f"Blaschke factor for alpha {alpha} has a pole at the input")

    return util.as_scalar((alpha - w) / denominator)

def cayley(z):
    disc_point(z)

    z = np.asarray(z, dtype=complex)

    return util.as_scalar((1.0 + z) / (1.0 - z))

def cayley_inverse(w):
    w = np.asarray(w, dtype=complex)

    util.validate(np.all(w.real > 0.0), "cayley_inverse requires a strictly positive real part",
        exception.DomainException)

    return util.as_scalar((w - 1.0) / (w + 1.0))

def halfplane_exponent(z, c):
    util.validate(isinstance(c, UnimodularConstant), "Invalid constant passed to halfplane_exponent")
    disc_point(z)

    return cayley(c.value * np.asarray(z, dtype=complex))

def cayley_power(base, w):
    """
    base ** cayley(w) for a base in (0, 1).

    Evaluated as base * exp((cayley(w) - 1) * ln(base)) so that w = 0 returns base
    bit for bit. The full exponent has a negative real part, hence |result| < 1.
    """
    check_open_interval(base, "base")
    disc_point(w)

    w = np.asarray(w, dtype=complex)
    log_base = math.log(base)

    shift = (2.0 * w / (1.0 - w)) * log_base

    if np.any(shift.real + log_base >= 0.0):
        raise exception.OVBInternalException(f"Non-negative real exponent in cayley_power for base {base}")

    return util.as_scalar(base * np.exp(shift))

def disc_grid(plan):
    """
    Radius-major grid r_j * exp(i theta_m), r_j equally spaced in (0, r_max],
    theta_m equally spaced in [0, 2 pi)
    """
    util.validate(isinstance(plan, DiscSamplingPlan), "Invalid plan passed to disc_grid")

    radii = plan.r_max * (np.arange(1, plan.radii_count + 1) / plan.radii_count)
    angles = 2.0 * np.pi * np.arange(plan.angles_count) / plan.angles_count

    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
