"""
Two omitted values alpha_1, alpha_2.

A map f with psi_1(f) psi_2(f) = u, where u(z) = (alpha_1 alpha_2) ** cayley(c z), would
attain equality in the bound for k = 2. Solving the quadratic in f

  (1 - p u) f^2 + (u - 1) s f + (p - u) = 0,    p = alpha_1 alpha_2, s = alpha_1 + alpha_2

needs a square root of the discriminant F = q(u(z)),

  q(w) = (alpha_1 - alpha_2)^2 w^2 + (4 + 4 p^2 - 2 s^2) w + (alpha_1 - alpha_2)^2,

which exists on the whole disc when F(disc) misses [0, inf). Since u covers the punctured
disc, that holds when every root of q(w) = t, t >= 0, lies outside the open unit disc.
"""

import cmath
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

import ovbound.core as core
import ovbound.bounds as bounds
import ovbound.continuation as continuation
import ovbound.analytic_engine as analytic_engine
import ovbound.util as util
import ovbound.exception as exception

logger = logging.getLogger(__name__)

DEFAULT_T_SAMPLES = 1024

# Points per vectorized continuation pass in the candidate map
EVALUATION_CHUNK = 2048

VERDICTS = ("feasible", "infeasible", "inconclusive")

@dataclass(frozen=True)
class TwoValueSpec:
    alpha1: float
    alpha2: float
    c: core.UnimodularConstant = core.UnimodularConstant()

    def __post_init__(self):
        check_pair(self.alpha1, self.alpha2)
        util.validate(isinstance(self.c, core.UnimodularConstant), f"Invalid constant for two-value spec: {self.c!r}")

    @property
    def product(self):
        return self.alpha1 * self.alpha2

    @property
    def total(self):
        return self.alpha1 + self.alpha2

@dataclass(frozen=True)
class DiscriminantQuadratic:
    a_lead: float
    a_mid: float
    a_const: float

    def __post_init__(self):
        for name in ("a_lead", "a_mid", "a_const"):
            util.validate(math.isfinite(getattr(self, name)), f"Non-finite discriminant coefficient {name}")

        util.validate(self.a_lead > 0.0, f"Degenerate discriminant quadratic: a_lead = {self.a_lead}")

    def evaluate(self, w):
        w = np.asarray(w, dtype=complex)

        # Horner form
        return util.as_scalar((self.a_lead * w + self.a_mid) * w + self.a_const)

@dataclass(frozen=True)
class FeasibilityReport:
    alpha1: float
    alpha2: float
    a_lead: float
    a_mid: float
    t_max: float
    t_samples: int
    min_root_modulus: float
    argmin_t: float
    t0_root_modulus: float
    t0_circle_test: bool
    verdict: str
    one_root_min_modulus: float
    one_root_verdict: str

    def to_dict(self):
        return {
            "spec": {"alpha1": self.alpha1, "alpha2": self.alpha2},
            "a_lead": self.a_lead,
            "a_mid": self.a_mid,
            "t_max": self.t_max,
            "t_samples": self.t_samples,
            "min_root_modulus": self.min_root_modulus,
            "argmin_t": self.argmin_t,
            "t0_root_modulus": self.t0_root_modulus,
            "t0_circle_test": self.t0_circle_test,
            "verdict": self.verdict,
            "one_root_min_modulus": self.one_root_min_modulus,
            "one_root_verdict": self.one_root_verdict
        }

@dataclass(frozen=True)
class RegionCell:
    alpha1: float
    alpha2: float
    verdict: str
    min_root_modulus: float
    one_root_verdict: str
    t0_circle_test: bool

    def to_row(self):
        return {
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "verdict": self.verdict,
            "min_root_modulus": self.min_root_modulus
        }

@dataclass(frozen=True)
class RegionScan:
    resolution: int
    t_samples: int
    cells: list = field(default_factory=list)

    def census(self, cells=None, attr="verdict"):
        cells = self.cells if cells is None else cells

        counts = {verdict: 0 for verdict in VERDICTS}
        for cell in cells:
            counts[getattr(cell, attr)] += 1

        return counts

    def t0_circle_passes(self):
        return sum(1 for cell in self.cells if cell.t0_circle_test)

    def cell(self, alpha1, alpha2):
        """
        Cell nearest to (alpha1, alpha2)
        """
        return min(self.cells, key=lambda x: (abs(x.alpha1 - alpha1) + abs(x.alpha2 - alpha2)))

    def to_dict(self):
        return {
            "resolution": self.resolution,
            "t_samples": self.t_samples,
            "cells": len(self.cells),
            "counts": self.census(),
            "one_root_counts": self.census(attr="one_root_verdict"),
            "t0_circle_passes": self.t0_circle_passes()
        }

def check_pair(alpha1, alpha2):
    core.check_open_interval(alpha1, "alpha1")
    core.check_open_interval(alpha2, "alpha2")

    util.validate(abs(alpha1 - alpha2) > core.TOLERANCES.distinct_pair,
        f"Omitted values must be distinct: {alpha1}, {alpha2}")

def u_map(spec, z):
    """
    u(z) = (alpha_1 alpha_2) ** cayley(c z), a covering of the punctured disc with u(0) = alpha_1 alpha_2
    """
    util.validate(isinstance(spec, TwoValueSpec), "Invalid spec passed to u_map")

    return core.cayley_power(spec.product, spec.c.value * np.asarray(z, dtype=complex))

def unexpanded_discriminant(alpha1, alpha2, u):
    """
    (u - 1)^2 s^2 - 4 (1 - p u)(p - u), the discriminant of the quadratic in f
    """
    u = np.asarray(u, dtype=complex)
    p = alpha1 * alpha2
    s = alpha1 + alpha2

    return util.as_scalar((u - 1.0) ** 2 * s ** 2 - 4.0 * (1.0 - p * u) * (p - u))

def discriminant_quadratic(alpha1, alpha2):
    check_pair(alpha1, alpha2)

    p = alpha1 * alpha2
    s = alpha1 + alpha2
    spread = (alpha1 - alpha2) ** 2

    return DiscriminantQuadratic(a_lead=spread, a_mid=4.0 + 4.0 * p ** 2 - 2.0 * s ** 2, a_const=spread)

def _stable_parts(q, t):
    util.validate(isinstance(q, DiscriminantQuadratic), "Invalid quadratic passed to discriminant_roots")

    t = np.asarray(t, dtype=float)
    util.validate(np.all(np.isfinite(t)) and np.all(t >= 0.0), f"Level t must be non-negative: {t}",
        exception.DomainException)

    constant = q.a_const - t
    root = np.sqrt(q.a_mid * q.a_mid - 4.0 * q.a_lead * constant + 0j)

    # Match the sign of a_mid so the sum does not cancel
    sign = 1.0 if q.a_mid >= 0.0 else -1.0
    big = -0.5 * (q.a_mid + sign * root)

    if np.any(big == 0):
        raise exception.OVBInternalException(f"Vanishing root in discriminant quadratic {q}")

    return constant, big

def discriminant_roots(q, t):
    """
    Both roots of a_lead w^2 + a_mid w + (a_const - t) = 0, larger modulus first
    """
    constant, big = _stable_parts(q, t)

    return util.as_scalar(big / q.a_lead), util.as_scalar(constant / big)

def minus_branch_root(q, t):
    """
    The root -(a_mid + sqrt(D)) / (2 a_lead) followed by the one-root reading of the criterion
    """
    constant, big = _stable_parts(q, t)

    if q.a_mid >= 0.0:
        return util.as_scalar(big / q.a_lead)

    return util.as_scalar(constant / big)

def _verdict(min_modulus, circle_test=True):
    band = core.TOLERANCES.verdict_band

    if min_modulus < 1.0 - band:
        return "infeasible"

    if min_modulus >= 1.0 + band and circle_test:
        return "feasible"

    return "inconclusive"

def feasibility_check(alpha1, alpha2, t_samples=DEFAULT_T_SAMPLES):
    """
    Minimum root modulus of q(w) = t over a uniform grid on [0, t_max]. A root inside
    the disc forces t = |q(w)| <= a_lead + |a_mid| + a_const, hence t_max = 2 a_lead + |a_mid|.
    """
    util.validate(isinstance(t_samples, (int, np.integer)) and not isinstance(t_samples, bool) and t_samples >= 2,
        f"t_samples must be an integer >= 2: {t_samples}")

    q = discriminant_quadratic(alpha1, alpha2)
    t_max = 2.0 * q.a_lead + abs(q.a_mid)

    levels = np.linspace(0.0, t_max, t_samples)
    first, second = discriminant_roots(q, levels)

    moduli = np.minimum(np.abs(first), np.abs(second))
    index = int(np.argmin(moduli))

    t0_first, t0_second = discriminant_roots(q, 0.0)
    t0_root_modulus = min(abs(t0_first), abs(t0_second))

    # The t = 0 roots are a reciprocal pair, off the open disc only when both are unimodular
    t0_circle_test = bool(abs(q.a_mid) <= 2.0 * q.a_lead)

    one_root_min_modulus = float(np.min(np.abs(minus_branch_root(q, levels))))

    report = FeasibilityReport(
        alpha1=float(alpha1),
        alpha2=float(alpha2),
        a_lead=q.a_lead,
        a_mid=q.a_mid,
        t_max=t_max,
        t_samples=int(t_samples),
        min_root_modulus=float(moduli[index]),
        argmin_t=float(levels[index]),
        t0_root_modulus=float(t0_root_modulus),
        t0_circle_test=t0_circle_test,
        verdict=_verdict(float(moduli[index]), t0_circle_test),
        one_root_min_modulus=one_root_min_modulus,
        one_root_verdict=_verdict(one_root_min_modulus)
    )

    logger.debug(f"feasibility_check({alpha1}, {alpha2}): {report.verdict}, min modulus {report.min_root_modulus}")

    return report

def grid_values(resolution):
    return [i / (resolution + 1) for i in range(1, resolution + 1)]

def _scan_cell(args):
    alpha1, alpha2, t_samples = args
    report = feasibility_check(alpha1, alpha2, t_samples)

    return RegionCell(
        alpha1=alpha1,
        alpha2=alpha2,
        verdict=report.verdict,
        min_root_modulus=report.min_root_modulus,
        one_root_verdict=report.one_root_verdict,
        t0_circle_test=report.t0_circle_test
    )

def region_scan(resolution, t_samples=DEFAULT_T_SAMPLES, workers=1):
    """
    feasibility_check over {(i/(R+1), j/(R+1)) : 1 <= i, j <= R, i != j}, row-major
    """
    util.validate(isinstance(resolution, (int, np.integer)) and not isinstance(resolution, bool) and resolution >= 2,
        f"Scan resolution must be an integer >= 2: {resolution}")
    util.validate(isinstance(workers, int) and workers >= 1, f"Invalid worker count: {workers}")

    values = grid_values(resolution)
    tasks = [
        (values[i], values[j], t_samples)
        for i in range(resolution)
        for j in range(resolution)
        if i != j
    ]

    logger.debug(f"Scanning {len(tasks)} cells with {workers} worker(s)")

    if workers == 1:
        cells = [_scan_cell(task) for task in tasks]
    else:
        # map() yields in submission order
        with ProcessPoolExecutor(max_workers=workers) as executor:
            cells = list(executor.map(_scan_cell, tasks, chunksize=max(1, len(tasks) // (4 * workers))))

    return RegionScan(resolution=int(resolution), t_samples=int(t_samples), cells=cells)

def beta_condition(beta):
    """
    4 beta^4 + 8 beta^2 - 4 < 0
    """
    core.check_open_interval(beta, "beta")

    square = beta * beta

    return bool(4.0 * square * square + 8.0 * square - 4.0 < 0.0)

def beta_threshold(tolerance=1e-12):
    """
    Locates the flip of beta_condition on (0, 1) by bisection
    """
    util.validate(isinstance(tolerance, float) and tolerance > 0.0, f"Invalid bisection tolerance: {tolerance}")

    lower, upper = 0.0, 1.0
    while upper - lower > tolerance:
        middle = 0.5 * (lower + upper)
        if beta_condition(middle):
            lower = middle
        else:
            upper = middle

    return 0.5 * (lower + upper)

def discriminant_value(spec, z):
    """
    F(z) = q(u(z))
    """
    q = discriminant_quadratic(spec.alpha1, spec.alpha2)

    return q.evaluate(u_map(spec, z))

def discriminant_hits(spec, plan=core.DEFAULT_PLAN, tolerance=1e-6):
    """
    Number of grid samples whose discriminant value lies within tolerance of [0, inf)
    """
    util.validate(isinstance(plan, core.DiscSamplingPlan), "Invalid plan passed to discriminant_hits")

    values = np.asarray(discriminant_value(spec, core.disc_grid(plan)), dtype=complex)
    hits = (np.abs(values.imag) <= tolerance) & (values.real >= 0.0)

    return int(np.count_nonzero(hits))

def nearest_branch_point(spec):
    """
    A point of least modulus where F vanishes, or None when q has no root in the
    punctured disc. Zeros of F are the solutions of u(z) = w for the inside t = 0
    root w; the sheets log(w) +/- i pi give the closest conjugate pair.
    """
    q = discriminant_quadratic(spec.alpha1, spec.alpha2)

    inside = [w for w in discriminant_roots(q, 0.0) if 0.0 < abs(w) < 1.0]
    if len(inside) == 0:
        return None

    exponent = cmath.log(inside[0]) / math.log(spec.product)
    point = spec.c.value.conjugate() * core.cayley_inverse(exponent)

    logger.debug(f"Nearest branch point for {spec}: {point}")

    return complex(point)

class TwoValueCandidate(analytic_engine.AnalyticMap):
    """
    f = 2 (p - u) / ((1 - u) s + sqrt(F)), the root of the quadratic with f(0) = 0.

    The square root is continued along [0, z] from +(1 - p) s at the origin. The result
    is analytic on |z| < analytic_radius; past a branch point the radial continuation
    still returns a value but the map is cut along the ray.
    """
    kind = "two_value_candidate"

    def __init__(self, spec):
        util.validate(isinstance(spec, TwoValueSpec), "Invalid spec passed to TwoValueCandidate")
        super().__init__((spec.alpha1, spec.alpha2))

        self.spec = spec
        self.quadratic = discriminant_quadratic(spec.alpha1, spec.alpha2)

        branch_point = nearest_branch_point(spec)
        self.analytic_radius = 1.0 if branch_point is None else abs(branch_point)

    def params(self):
        return {"alpha1": self.spec.alpha1, "alpha2": self.spec.alpha2, "c": self.spec.c.value}

    def _discriminant(self, points):
        return self.quadratic.evaluate(u_map(self.spec, points))

    def _root_one(self, z):
        ts, values = continuation.radial_refine(self._discriminant, z, floor=core.TOLERANCES.precision_floor)

        return continuation.continue_sqrt(values)[-1]

    def sqrt_discriminant(self, z):
        """
        The continued branch of sqrt(F) at each point
        """
        points = np.asarray(z, dtype=complex)
        flat = points.ravel()
        roots = np.zeros(flat.shape, dtype=complex)

        for start in range(0, flat.size, EVALUATION_CHUNK):
            chunk = flat[start:start + EVALUATION_CHUNK]

            ts, matrix, ok = continuation.radial_batch(self._discriminant, chunk, floor=core.TOLERANCES.precision_floor)
            if np.any(ok):
                roots[start:start + EVALUATION_CHUNK][ok] = continuation.continue_sqrt(matrix[ok])[:, -1]

            for index in np.flatnonzero(~ok):
                roots[start + index] = self._root_one(chunk[index])

        return roots.reshape(points.shape)

    def _pieces(self, z):
        z = np.asarray(z, dtype=complex)
        u = np.asarray(u_map(self.spec, z), dtype=complex)

        return u, np.asarray(self.sqrt_discriminant(z), dtype=complex)

    def evaluate(self, z):
        p = self.spec.product
        s = self.spec.total

        u, root = self._pieces(z)
        denominator = (1.0 - u) * s + root

        if np.any(np.abs(denominator) < core.TOLERANCES.pole):
            raise exception.PoleException(f"Candidate map for {self.spec} has a pole at the input")

        fval = 2.0 * (p - u) / denominator

        residual = np.abs((1.0 - p * u) * fval * fval + (u - 1.0) * s * fval + (p - u))
        if np.any(residual > core.TOLERANCES.residual):
            raise exception.OVBInternalException(
                f"Candidate quadratic residual {float(residual.max())} exceeds {core.TOLERANCES.residual}")

        return util.as_scalar(fval)

    def other_root(self, z):
        """
        The second root of the quadratic on the same branch; (alpha_1 + alpha_2)/(1 + alpha_1 alpha_2) at 0
        """
        u, root = self._pieces(z)

        return util.as_scalar(((1.0 - u) * self.spec.total + root) / (2.0 * (1.0 - self.spec.product * u)))

def candidate_extremal_map(spec, *, force=False):
    util.validate(isinstance(spec, TwoValueSpec), "Invalid spec passed to candidate_extremal_map")

    report = feasibility_check(spec.alpha1, spec.alpha2)
    if report.verdict != "feasible":
        message = (f"Pair ({spec.alpha1}, {spec.alpha2}) is {report.verdict}: "
            f"discriminant root of modulus {report.min_root_modulus:.6g} inside the disc")

        if not force:
            raise exception.PreconditionException(message)

        logger.warning(f"{message}. Building the candidate anyway")

    candidate = TwoValueCandidate(spec)
    logger.debug(f"Constructed {candidate!r} with analytic radius {candidate.analytic_radius}")

    return candidate

def sharpness_verify(spec, plan=core.DEFAULT_PLAN, *, force=False):
    candidate = candidate_extremal_map(spec, force=force)

    return analytic_engine.verify_bound(candidate, bounds.ExceptionalSet((spec.alpha1, spec.alpha2)), plan)

def admissible_cells(scan):
    """
    Neighbouring off-diagonal cells with both values below the beta threshold,
    the region the existence claim speaks about
    """
    threshold = beta_threshold()
    step = 1.0 / (scan.resolution + 1)

    return [
        cell for cell in scan.cells
        if abs(cell.alpha1 - cell.alpha2) < 1.5 * step and max(cell.alpha1, cell.alpha2) < threshold
    ]

def existence_claim_status(scan):
    """
    confirmed: some admissible cell passes the two-root criterion.
    dependent on the one-root reading: only the one-root criterion passes there.
    refuted as stated: neither does.
    """
    cells = admissible_cells(scan)

    if scan.census(cells)["feasible"] > 0:
        return "confirmed"

    if scan.census(cells, attr="one_root_verdict")["feasible"] > 0:
        return "dependent on the one-root reading"

    return "refuted as stated"

analytic_engine.catalog[TwoValueCandidate.kind] = TwoValueCandidate
